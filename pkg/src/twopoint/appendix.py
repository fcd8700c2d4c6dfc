"""
Residual systems for the superfield two-point functions.

Each case decomposes a closed-form correlator into its Grassmann coefficients, expressed in
reduced variables (first point at time t, second point at the origin), and substitutes them
into the linear equations that covariance imposes on those coefficients.
"""
import logging
import os
from typing import Callable, Dict, List, Tuple

import sympy

from symbolic.errors import SymbolicError
from symbolic.expr import Expr
from symbolic.registry import sym
from twopoint.covariance import REDUCED, act, monomial_coefficient
from twopoint.forms import load_form, reduced_odd_kernel
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)
t, r, M, x = sym('t'), sym('r'), sym('M'), sym('x')
r_1, r_2, M_1, M_2 = sym('r_1'), sym('r_2'), sym('M_1'), sym('M_2')
x_1, x_2 = sym('x_1'), sym('x_2')
c1, c2 = sym('c1'), sym('c2')

Equation = Tuple[str, Expr]


def _check(report: Report, equations: List[Equation], bindings: Dict = None):
    for name, residual in equations:
        try:
            if bindings:
                residual = residual.substitute(bindings)
            zero = residual.is_zero()
            report.add(name, zero, None if zero else residual.to_text())
        except SymbolicError as e:
            report.record_error(name, e)


def _dt(e: Expr) -> Expr:
    return e.partial('t')


def _dr(e: Expr, name: str = 'r') -> Expr:
    return e.partial(name)


# ---- N=1: single difference coordinate ------------------------------------

def _n1_reduce(e: Expr) -> Expr:
    return e.substitute({'t_1': t, 't_2': 0, 'r_1': r, 'r_2': 0, 'M_1': M, 'M_2': -M,
                         'x_1': x, 'x_2': x})


N1_MONOMIALS = {
    'A': (),
    'B1': ('theta_1',), 'B2': ('theta_2',),
    'Bbar1': ('thetabar_1',), 'Bbar2': ('thetabar_2',),
    'C12': ('theta_1', 'theta_2'), 'Cbar12': ('thetabar_1', 'thetabar_2'),
    'C11': ('theta_1', 'thetabar_1'), 'C22': ('theta_2', 'thetabar_2'),
    'C12bar': ('theta_1', 'thetabar_2'), 'C21bar': ('theta_2', 'thetabar_1'),
    'D1': ('thetabar_1', 'theta_1', 'theta_2'), 'D2': ('thetabar_2', 'theta_1', 'theta_2'),
    'Dbar1': ('theta_1', 'thetabar_1', 'thetabar_2'), 'Dbar2': ('theta_2', 'thetabar_1', 'thetabar_2'),
    'E': ('theta_1', 'theta_2', 'thetabar_1', 'thetabar_2'),
}


def n1_coefficients() -> Dict[str, Expr]:
    """Coefficient functions of C = c1 C_1 + c2 C_2 in reduced variables."""
    body = _n1_reduce(load_form('s1_C1').body + load_form('s1_C2').body)
    return {name: monomial_coefficient(body, mono) for name, mono in N1_MONOMIALS.items()}


def n1_equations(k: Dict[str, Expr]) -> List[Equation]:
    A, E = k['A'], k['E']
    B1, B2, Bb1, Bb2 = k['B1'], k['B2'], k['Bbar1'], k['Bbar2']
    C12, Cb12, C11, C22, C12b, C21b = k['C12'], k['Cbar12'], k['C11'], k['C22'], k['C12bar'], k['C21bar']
    D1, D2, Db1, Db2 = k['D1'], k['D2'], k['Dbar1'], k['Dbar2']
    return [
        # odd translation G_-1/2
        ('G: B1 + B2', B1 + B2),
        ('G: C12 = dt A', C12 - _dt(A)),
        ('G: C11 + C21bar = -dr A', C11 + C21b + _dr(A)),
        ('G: C12bar + C22 = dr A', C12b + C22 - _dr(A)),
        ('G: dr(Bbar1 + Bbar2) + Dbar1 + Dbar2', _dr(Bb1 + Bb2) + Db1 + Db2),
        ('G: dt Bbar1 - dr B1 - D1', _dt(Bb1) - _dr(B1) - D1),
        ('G: dt Bbar2 + dr B1 - D2', _dt(Bb2) + _dr(B1) - D2),
        ('G: dt Cbar12 - dr C11 - dr C12bar - E', _dt(Cb12) - _dr(C11) - _dr(C12b) - E),
        ('G: dt(Dbar1 + Dbar2) + dr(D1 + D2)', _dt(Db1 + Db2) + _dr(D1 + D2)),
        # Ybar_0
        ('Ybar: Bbar1 + Bbar2', Bb1 + Bb2),
        ('Ybar: dr A - C11 - C12bar', _dr(A) - C11 - C12b),
        ('Ybar: -dr A - C21bar - C22', -_dr(A) - C21b - C22),
        ('Ybar: Cbar12 = 2M A', A * (2 * M) - Cb12),
        ('Ybar: dr(B1 + B2) + D1 + D2', _dr(B1 + B2) + D1 + D2),
        ('Ybar: dr Bbar1 - 2M B1 + Dbar1', _dr(Bb1) - B1 * (2 * M) + Db1),
        ('Ybar: -dr Bbar2 + 2M B2 - Dbar2', -_dr(Bb2) + B2 * (2 * M) - Db2),
        ('Ybar: dr C11 + dr C21bar + 2M C12 - E', _dr(C11) + _dr(C21b) + C12 * (2 * M) - E),
        ('Ybar: dr(Dbar1 + Dbar2) + 2M(D1 + D2)', _dr(Db1 + Db2) + (D1 + D2) * (2 * M)),
        # auxiliary field
        ('(2M dt - dr^2) A - E', _dt(A) * (2 * M) - _dr(_dr(A)) - E),
        ('E = -c1 M (x_1 + x_2 - 1) F_(x+1)',
         E - A.substitute({'c2': 0}) * (-M * (2 * x - 1) / t)),
        # quasi-primary conditions on the lowest component
        ('Y_1/2: (t dr + M r) A', _dr(A) * t + A * (M * r)),
        ('X_0: (t dt + r dr / 2 + x) A', _dt(A) * t + _dr(A) * (r / 2) + A * x),
    ]


def case_a1() -> Report:
    report = Report('A1', 'N=1 superfield two-point function')
    _check(report, n1_equations(n1_coefficients()))
    return report


# ---- N=2: odd translations and the fermion-number generator ---------------

def _n2_operator(body: Expr, weight) -> Tuple[Expr, Expr]:
    """Odd translation d_1 + d_2 and the fermion-number generator N_0 with total weight x_1 + x_2."""
    translation = body.partial('theta_1') + body.partial('theta_2')
    counting = body * weight
    for name in ('theta_1', 'thetabar_1', 'theta_2', 'thetabar_2'):
        counting = counting - Expr.odd(name) * body.partial(name)
    return translation, counting


def case_a2() -> Report:
    report = Report('A2', 'N=2 superfield two-point function')
    equations = []
    for name in ('st2', 'st2_const'):
        form = load_form(name)
        body = form.constrained()
        weight = form.constraints['x_1'] + form.constraints['x_2']
        translation, counting = _n2_operator(body, weight)
        equations += [(f'{name}: (d_1 + d_2) C', translation), (f'{name}: N_0 C', counting)]
    c2_part = _n1_reduce(load_form('s1_C2').body).substitute({'x': half})
    reduced = _n1_reduce(load_form('st2').body).substitute({'x_1': half, 'x_2': half})
    equations.append(('st2 = C_2 at x = 1/2', c2_part - reduced))
    _check(report, equations)
    return report


# ---- osp(2|2): two radial coordinates -----------------------------------------

def _osp22_reduce(e: Expr) -> Expr:
    return e.substitute({'t_1': t, 't_2': 0, 'theta_1': Expr.odd('theta'), 'theta_2': Expr.zero()})


def osp22_bessel_equations() -> List[Equation]:
    body = _osp22_reduce(load_form('prop53_case_ii').body)
    A0 = monomial_coefficient(body, ('theta',))
    A1 = monomial_coefficient(body, ('thetabar_1',))
    A2 = monomial_coefficient(body, ('thetabar_2',))
    sigma = M_1 * r_1 ** 2 + M_2 * r_2 ** 2

    def euler(e: Expr) -> Expr:
        return _dt(e) * t + (_dr(e, 'r_1') * r_1 + _dr(e, 'r_2') * r_2) / 2

    def boost(e: Expr) -> Expr:
        return (_dr(e, 'r_1') * r_1 - _dr(e, 'r_2') * r_2) * t

    return [
        ('G1_1/2: t A0 + r1 A1/2 + r2 A2/2', A0 * t + A1 * (r_1 / 2) + A2 * (r_2 / 2)),
        ('G2: dt A1 - dr1 A0', _dt(A1) - _dr(A0, 'r_1')),
        ('G2: dt A2 - dr2 A0', _dt(A2) - _dr(A0, 'r_2')),
        ('G2: dr1 A2 - dr2 A1', _dr(A2, 'r_1') - _dr(A1, 'r_2')),
        ('X1: A1', _dt(A1) * t + _dr(A1, 'r_1') * (r_1 / 2) + A1 * (x_1 - half)
         - _dr(A0, 'r_1') * t - A0 * (M_1 * r_1)),
        ('X1: A2', _dt(A2) * t + _dr(A2, 'r_1') * (r_1 / 2) + A2 * x_1 - A0 * (M_2 * r_2)),
        ('X1: A1, A2', _dr(A2, 'r_1') * t + A2 * (M_1 * r_1) - A1 * (M_2 * r_2)),
        ('X0: A0', euler(A0) + A0 * ((1 + x_1 + x_2) / 2)),
        ('X0: A1', euler(A1) + A1 * ((x_1 + x_2) / 2)),
        ('X0: A2', euler(A2) + A2 * ((x_1 + x_2) / 2)),
        ('boost: A0', boost(A0) + A0 * (t * (1 + x_1 - x_2) + sigma) + A1 * r_1),
        ('boost: A1', boost(A1) + A1 * (t * (x_1 - x_2) + sigma)),
        ('boost: A2', boost(A2) + A2 * (t * (x_1 - x_2) + sigma)),
        ('N0', (A0 + A1 + A2) * (x_1 + x_2 - 1)),
    ]


def osp22_quadratic_equations() -> List[Equation]:
    body = _osp22_reduce(load_form('prop53_case_iii').body)
    B1 = monomial_coefficient(body, ('theta', 'thetabar_1'))
    B2 = monomial_coefficient(body, ('theta', 'thetabar_2'))
    Dc = monomial_coefficient(body, ('thetabar_1', 'thetabar_2'))
    sigma = (M_1 * r_1 ** 2 + M_2 * r_2 ** 2) / 2

    def euler(e: Expr) -> Expr:
        return _dt(e) * t + (_dr(e, 'r_1') * r_1 + _dr(e, 'r_2') * r_2) / 2

    def special(e: Expr, shift) -> Expr:
        return _dt(e) * t ** 2 + _dr(e, 'r_1') * (t * r_1) + e * (t * shift + sigma)

    return [
        ('D = (2t/r2) B1', Dc - B1 * (2 * t / r_2)),
        ('B2 = -(r1/r2) B1', B2 + B1 * (r_1 / r_2)),
        ('G1_1/2: t B1 - r2 D/2', B1 * t - Dc * (r_2 / 2)),
        ('G1_1/2: t B2 + r1 D/2', B2 * t + Dc * (r_1 / 2)),
        ('G2: dr1 B2 - dr2 B1 - dt D', _dr(B2, 'r_1') - _dr(B1, 'r_2') - _dt(Dc)),
        ('X0: B1', euler(B1) + B1 * sympy.Rational(3, 2)),
        ('X0: B2', euler(B2) + B2 * sympy.Rational(3, 2)),
        ('X0: D', euler(Dc) + Dc),
        ('X1: B1', special(B1, x_1 + 1)),
        ('X1: B2', special(B2, x_1)),
        ('X1: D', special(Dc, x_1)),
        ('X1: mixed', _dt(Dc) * t + _dr(Dc, 'r_1') * (r_1 / 2) + Dc * (x_1 - half)
         - _dr(B2, 'r_1') * t - B2 * (M_1 * r_1) + B1 * (M_2 * r_2)),
        ('N0', (B1 + B2 + Dc) * (x_1 + x_2 - 2)),
    ]


def case_a3() -> Report:
    report = Report('A3', 'osp(2|2) two-point functions')
    _check(report, [(f'x1+x2=1: {n}', e) for n, e in osp22_bessel_equations()], {'x_2': 1 - x_1})
    _check(report, [(f'x1+x2=2: {n}', e) for n, e in osp22_quadratic_equations()], {'x_2': 2 - x_1})
    return report


# ---- se(3|2): reduced mass system ----------------------------------------------

def case_a4() -> Report:
    report = Report('A4', 'se(3|2) two-point function in reduced mass variables')
    realization = REDUCED['se32_reduced']()
    equations = []
    for name in ('se32', 'se32_d0'):
        form = load_form(name)
        for label in realization.labels():
            image = act(realization.operator(label), form.body)
            equations.append((f'{name}: {label}', image.substitute(form.constraints)))
    body = load_form('se32').constrained()
    bbar = monomial_coefficient(body, ('thetabar',))
    b = monomial_coefficient(body, ('theta',))
    equations.append(('B = -(r/2t) Bbar', b + bbar * (r / (2 * t))))
    _check(report, equations)
    return report


# ---- osp(2|4): consistency of the two restrictions -------------------------------

def case_a5() -> Report:
    report = Report('A5', 'osp(2|4) two-point function')
    st2 = load_form('osp24').constrained().substitute({
        't_1': t, 't_2': 0, 'r_1': r, 'r_2': 0, 'M_1': M,
        'theta_1': Expr.odd('theta'), 'theta_2': Expr.zero(),
        'thetabar_1': Expr.odd('thetabar'), 'thetabar_2': Expr.zero(),
    })
    reduced = load_form('osp24_reduced').constrained()
    se32_odd = load_form('se32').constrained().substitute({'d0': 0})
    _check(report, [
        ('s2tilde form = reduced form', st2 - reduced),
        ('se32 odd part = reduced form', se32_odd - reduced),
        ('reduced form = c2 kernel', reduced - reduced_odd_kernel() * c2),
    ])
    return report


CASES: Dict[str, Callable[[], Report]] = {
    'A1': case_a1,
    'A2': case_a2,
    'A3': case_a3,
    'A4': case_a4,
    'A5': case_a5,
}


def appendixA_pde_residuals(case: str) -> Report:
    """
    Substitute the closed-form coefficients into one residual system.

    :param case: A1 (N=1), A2 (N=2), A3 (osp(2|2)), A4 (se(3|2)) or A5 (osp(2|4))
    :return: Report with one entry per equation
    """
    builder = CASES.get(case)
    if builder is None:
        raise KeyError(f"Unknown residual system '{case}'. Known: {sorted(CASES)}")
    report = builder()
    logger.info(f"Residual system {case}: {'pass' if report.passed else 'fail'}")
    return report
