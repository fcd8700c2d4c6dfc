"""
Closed-form two-point functions.

A form is a body over the doubled coordinates (``t_1, r_1, zeta_1, theta_1, thetabar_1`` and
the same with suffix ``_2``) together with the constraint substitutions under which it is
covariant. Delta factors such as ``delta_{x,1/2}`` are kept as constraints, never as part of
the body. Spinor forms are 2x2 batteries indexed by the components (psi, phi).
"""
import logging
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Callable, Dict, Optional, Tuple, Union

import sympy

from symbolic.errors import UnknownForm
from symbolic.expr import Expr
from symbolic.registry import sym

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)

Spinor = Tuple[Tuple[Expr, Expr], Tuple[Expr, Expr]]
Body = Union[Expr, Spinor]

# Conventions for M_0: +1/2 d_zeta, -1/2 d_zeta, the mass representation, or the
# reduced single-variable system of the variable-mass algebra.
FRAMES = ('zeta+', 'zeta-', 'mass', 'reduced')

SCHROEDINGER_N = ('X_-1', 'X_0', 'X_1', 'Y_-1/2', 'Y_1/2', 'M_0', 'N')


@dataclass(frozen=True)
class PointCoords:
    index: int
    even: Dict[str, str]
    odd: Dict[str, str]
    params: Dict[str, str]

    def symbol(self, name: str) -> sympy.Symbol:
        target = self.even.get(name) or self.params.get(name)
        if target is None:
            raise KeyError(name)
        return sym(target)


@lru_cache(maxsize=None)
def point(index: int) -> PointCoords:
    """Coordinates of particle ``index``; the two namespaces are disjoint."""
    return PointCoords(
        index,
        {'t': f't_{index}', 'r': f'r_{index}', 'zeta': f'zeta_{index}'},
        {'theta1': f'theta_{index}', 'theta2': f'thetabar_{index}'},
        {'M': f'M_{index}', 'x': f'x_{index}', 'nu': f'nu_{index}'},
    )


SWAP = {
    **{f'{n}_1': f'{n}_2' for n in ('t', 'r', 'zeta', 'M', 'x', 'nu', 'theta', 'thetabar')},
    **{f'{n}_2': f'{n}_1' for n in ('t', 'r', 'zeta', 'M', 'x', 'nu', 'theta', 'thetabar')},
}


@dataclass
class TwoPointForm:
    name: str
    anchor: str
    body: Body
    algebra: str
    frame: str
    constraints: Dict[str, Any] = field(default_factory=dict)
    labels: Optional[Tuple[str, ...]] = None
    free_constants: Tuple[str, ...] = ()
    formal_funcs: Tuple[str, ...] = ()

    @property
    def spinor(self) -> bool:
        return isinstance(self.body, tuple)

    def constrained(self, extra: Optional[Dict[str, Any]] = None) -> Body:
        """Body with every constraint applied (idempotent)."""
        bindings = dict(self.constraints)
        bindings.update(extra or {})
        return map_body(self.body, lambda e: e.substitute(bindings))

    def with_constraints(self, suffix: str, **overrides: Any) -> 'TwoPointForm':
        """Copy with some constraints replaced, used for negative controls."""
        constraints = dict(self.constraints)
        constraints.update(overrides)
        return replace(self, name=f"{self.name}:{suffix}", constraints=constraints)

    def to_json(self) -> Dict[str, Any]:
        if self.spinor:
            body = [[e.to_text() for e in row] for row in self.body]
        else:
            body = self.body.to_text()
        return {
            'name': self.name,
            'anchor': self.anchor,
            'algebra': self.algebra,
            'frame': self.frame,
            'constraints': {k: sympy.sstr(v) for k, v in self.constraints.items()},
            'labels': list(self.labels) if self.labels else None,
            'free_constants': list(self.free_constants),
            'formal_funcs': list(self.formal_funcs),
            'body': body,
        }


def map_body(body: Body, fn: Callable[[Expr], Expr]) -> Body:
    if isinstance(body, tuple):
        return tuple(tuple(fn(e) for e in row) for row in body)
    return fn(body)


def swap_points(form: TwoPointForm, name: Optional[str] = None) -> TwoPointForm:
    """
    Exchange the two particles: C'_{ab}(1, 2) = C_{ba}(2, 1).

    Constraints are swapped along with the body.
    """
    bindings: Dict[str, Any] = {}
    for old, new in SWAP.items():
        bindings[old] = Expr.odd(new) if old.startswith('theta') else sym(new)

    def swapped(e: Expr) -> Expr:
        return e.substitute(bindings)

    if form.spinor:
        (a, b), (c, d) = form.body
        body = ((swapped(a), swapped(c)), (swapped(b), swapped(d)))
    else:
        body = swapped(form.body)
    constraints = {SWAP.get(k, k): sympy.sympify(v).xreplace({sym(o): sym(n) for o, n in SWAP.items()
                                                              if not o.startswith('theta')})
                   for k, v in form.constraints.items()}
    return replace(form, name=name or f"{form.name}_exchanged", body=body, constraints=constraints)


# ---- building blocks ------------------------------------------------------

t_1, t_2, r_1, r_2 = sym('t_1'), sym('t_2'), sym('r_1'), sym('r_2')
zeta_1, zeta_2 = sym('zeta_1'), sym('zeta_2')
M_1, M_2 = sym('M_1'), sym('M_2')
x_1, x_2, nu_1, nu_2 = sym('x_1'), sym('x_2'), sym('nu_1'), sym('nu_2')
psi0, phi0, c1, c2, a0, d0 = (sym(n) for n in ('psi0', 'phi0', 'c1', 'c2', 'a0', 'd0'))

tt = t_1 - t_2
rr = r_1 - r_2
zz = zeta_1 - zeta_2
uu = 4 * zz * tt + rr ** 2

theta_1, theta_2 = Expr.odd('theta_1'), Expr.odd('theta_2')
thetabar_1, thetabar_2 = Expr.odd('thetabar_1'), Expr.odd('thetabar_2')
theta = theta_1 - theta_2
thetabar = thetabar_1 - thetabar_2


def power(base: Any, exponent: Any) -> Expr:
    return Expr.power(base, exponent)


def gaussian(mass: Any = M_1) -> Expr:
    return Expr.exp(-mass * rr ** 2 / (2 * tt))


def heat_factor(exponent: Any) -> Expr:
    """``F_lambda = t^(-lambda) exp(-M r^2 / 2t)`` for the difference coordinates."""
    return power(tt, -exponent) * gaussian()


# ---- scalar forms in the dual mass coordinate -----------------------------

def scalar_formal() -> TwoPointForm:
    body = power(tt, -x_1) * Expr.func('f', zz + rr ** 2 / (4 * tt)) * psi0
    return TwoPointForm('scalar_f', 'scalar two-point function with an arbitrary scaling function',
                        body, 'sch1zeta', 'zeta+', {'x_2': x_1},
                        labels=SCHROEDINGER_N[:-1], free_constants=('psi0',), formal_funcs=('f',))


def scalar_with_n() -> TwoPointForm:
    body = power(tt, -x_1) * power(zz + rr ** 2 / (4 * tt), -x_1 - nu_1 - nu_2) * psi0
    return TwoPointForm('scalar_N', 'scalar two-point function fixed by the extra generator N',
                        body, 'sch1zeta', 'zeta+', {'x_2': x_1}, free_constants=('psi0',))


def scalar_nu0() -> TwoPointForm:
    body = power(tt, -x_1) * power(zz + rr ** 2 / (4 * tt), -x_1) * psi0
    return TwoPointForm('scalar_nu0', 'scalar two-point function at nu = 0',
                        body, 'sch1zeta', 'zeta+', {'x_2': x_1, 'nu_1': 0, 'nu_2': 0},
                        free_constants=('psi0',))


# ---- spinor forms ------------------------------------------------------

def spinor_equal_dimensions(phi_constant: Any = phi0) -> Spinor:
    """Battery for x_1 = x_2 with u = 4 zeta t + r^2."""
    lead = power(uu, -x_1 - 1)
    psipsi = lead * (psi0 * tt)
    mixed = lead * (-half * psi0 * rr)
    phiphi = lead * (psi0 * rr ** 2 / (4 * tt)) + power(uu, -x_1) * (phi_constant / tt)
    return (psipsi, mixed), (mixed, phiphi)


def spinor_case_i() -> TwoPointForm:
    return TwoPointForm('prop21_case_i', 'spinor two-point function for x_1 = x_2',
                        spinor_equal_dimensions(), 'conf3spinor', 'zeta+',
                        {'x_2': x_1, 'nu_2': -nu_1}, labels=SCHROEDINGER_N,
                        free_constants=('psi0', 'phi0'))


def spinor_case_ii() -> TwoPointForm:
    lead = power(uu, -x_1)
    zero = Expr.zero()
    body = (zero, lead * psi0), (zero, lead * (-half * psi0 * rr / tt))
    return TwoPointForm('prop21_case_ii', 'spinor two-point function for x_1 = x_2 + 1',
                        body, 'conf3spinor', 'zeta+', {'x_2': x_1 - 1, 'nu_2': -nu_1},
                        labels=SCHROEDINGER_N, free_constants=('psi0',))


def spinor_conformal() -> TwoPointForm:
    return TwoPointForm('prop22', 'conformally covariant spinor two-point function',
                        spinor_equal_dimensions(), 'conf3spinor', 'zeta+',
                        {'x_2': x_1, 'nu_1': 0, 'nu_2': 0, 'phi0': -psi0 / 4},
                        free_constants=('psi0',))


def scalar_parent() -> Expr:
    """``<f_1 f_2> = t^(-x) (zeta + r^2/4t)^(1-x)`` whose derivatives give the spinor form."""
    return power(tt, -x_1) * power(zz + rr ** 2 / (4 * tt), 1 - x_1)


def derived_spinor() -> TwoPointForm:
    """Spinor battery C_ab = D_a(1) D_b(2) <f_1 f_2> with D_psi = -d_zeta and D_phi = d_r."""
    parent = scalar_parent()
    first = (lambda e: -e.partial('zeta_1'), lambda e: e.partial('r_1'))
    second = (lambda e: -e.partial('zeta_2'), lambda e: e.partial('r_2'))
    body = tuple(tuple(d2(d1(parent)) for d2 in second) for d1 in first)
    return TwoPointForm('prop23_derived', 'spinor two-point function derived from a scalar one',
                        body, 'conf3spinor', 'zeta+', {'x_2': x_1, 'nu_1': 0, 'nu_2': 0})


def derived_constants() -> Dict[str, Expr]:
    """Normalizations ``psi0 = -x(x-1) 2^(2x+2)`` and ``phi0 = (x-1) 2^(2x-1)``."""
    return {
        'psi0': power(2, 2 * x_1 + 2) * (-x_1 * (x_1 - 1)),
        'phi0': power(2, 2 * x_1 - 1) * (x_1 - 1),
    }


# ---- superfield forms in the mass representation -------------------------

def n1_bosonic() -> Expr:
    """C_1 of the N=1 algebra, with t, r the coordinate differences and M = M_1."""
    inv = 1 / tt
    body = (Expr.one()
            + theta_1 * theta_2 * (inv * (-x_1 + M_1 * rr ** 2 / (2 * tt)))
            + thetabar_1 * thetabar_2 * (2 * M_1)
            - (theta_1 * thetabar_2 - theta_2 * thetabar_1) * (M_1 * rr / tt)
            - theta_1 * theta_2 * thetabar_1 * thetabar_2 * (inv * M_1 * (2 * x_1 - 1)))
    return body * heat_factor(x_1)


def n1_fermionic() -> Expr:
    """C_2 of the N=1 algebra."""
    cubic = thetabar_1 * theta_1 * theta_2 - thetabar_2 * theta_1 * theta_2
    body = theta * (-rr / (2 * tt)) + thetabar + cubic * ((half - x_1) / tt)
    return body * heat_factor(x_1)


MASS_CONSERVED = {'x_2': x_1, 'M_2': -M_1}


def n1_c1() -> TwoPointForm:
    return TwoPointForm('s1_C1', 'even N=1 superfield two-point function', n1_bosonic() * c1,
                        's1tilde', 'mass', dict(MASS_CONSERVED), free_constants=('c1',))


def n1_c2() -> TwoPointForm:
    return TwoPointForm('s1_C2', 'odd N=1 superfield two-point function', n1_fermionic() * c2,
                        's1tilde', 'mass', dict(MASS_CONSERVED), free_constants=('c2',))


def odd_kernel() -> Expr:
    """``t^(-1/2) exp(-M r^2 / 2t) (thetabar - (r/2t) theta)``."""
    return heat_factor(half) * (thetabar - theta * (rr / (2 * tt)))


def n2_constant() -> TwoPointForm:
    return TwoPointForm('st2_const', 'constant N=2 two-point function', Expr.coeff(c1),
                        's2tilde', 'mass', {'x_1': 0, 'x_2': 0, 'M_1': 0, 'M_2': 0},
                        free_constants=('c1',))


def n2_odd() -> TwoPointForm:
    return TwoPointForm('st2', 'odd N=2 two-point function', odd_kernel() * c2, 's2tilde', 'mass',
                        {'x_1': half, 'x_2': half, 'M_2': -M_1}, free_constants=('c2',))


def osp24() -> TwoPointForm:
    return TwoPointForm('osp24', 'two-point function covariant under the full osp(2|4)',
                        odd_kernel() * c2, 's2tilde', 'mass',
                        {'x_1': half, 'x_2': half, 'M_2': -M_1}, free_constants=('c2',))


# ---- osp(2|2): three admissible cases ------------------------------------

def _osp22_exponential() -> Expr:
    return Expr.exp(-M_1 * r_1 ** 2 / (2 * tt) + M_2 * r_2 ** 2 / (2 * tt))


def osp22_constant() -> TwoPointForm:
    return TwoPointForm('prop53_case_i', 'constant osp(2|2) two-point function', Expr.coeff(a0),
                        'osp22', 'mass', {'x_1': 0, 'x_2': 0, 'M_1': 0, 'M_2': 0},
                        free_constants=('a0',))


def osp22_bessel() -> TwoPointForm:
    """
    Case x_1 + x_2 = 1. The scaling functions h1, h2 of v = r_1 r_2 / t obey
    h1' = -M_1 h2 and h2' = M_2 h1 + (x_1 - x_2) h2 / v, solved by Bessel functions.
    """
    v = r_1 * r_2 / tt
    prefactor = power(tt, -half) * power(r_1 ** 2 / tt, (x_2 - x_1) / 2) * _osp22_exponential()
    body = ((thetabar_1 - theta * (r_1 / (2 * tt))) * Expr.func('h1', v)
            + (thetabar_2 - theta * (r_2 / (2 * tt))) * Expr.func('h2', v))
    return TwoPointForm('prop53_case_ii', 'osp(2|2) two-point function with Bessel scaling functions',
                        prefactor * body, 'osp22', 'mass', {'x_2': 1 - x_1},
                        free_constants=('alpha', 'beta'), formal_funcs=('h1', 'h2'))


def osp22_quadratic_coefficient() -> Expr:
    """``B = t^(-3/2) (r_1^2/t)^(1/2 - x_1) h(r_1 r_2/t) exp(-M_1 r_1^2/2t + M_2 r_2^2/2t)``."""
    return (power(tt, -sympy.Rational(3, 2)) * power(r_1 ** 2 / tt, half - x_1)
            * Expr.func('h', r_1 * r_2 / tt) * _osp22_exponential())


def osp22_quadratic() -> TwoPointForm:
    b = osp22_quadratic_coefficient()
    body = (theta * (thetabar_1 - thetabar_2 * (r_1 / r_2)) * b
            + thetabar_1 * thetabar_2 * (b * (2 * tt / r_2)))
    return TwoPointForm('prop53_case_iii', 'osp(2|2) two-point function with an arbitrary scaling function',
                        body, 'osp22', 'mass', {'x_2': 2 - x_1}, formal_funcs=('h',))


# ---- se(3|2): reduced single-mass system ---------------------------------
# Variables t, r are the differences, M the mass of the first particle, theta and thetabar
# the odd differences; x stands for x_1 + x_2.

t, r, M, x = sym('t'), sym('r'), sym('M'), sym('x')
red_theta, red_thetabar = Expr.odd('theta'), Expr.odd('thetabar')


def reduced_odd_kernel() -> Expr:
    return (power(t, -half) * Expr.exp(-M * r ** 2 / (2 * t))
            * (red_thetabar - red_theta * (r / (2 * t))))


def reduced_even_kernel() -> Expr:
    return (power(M, (x - 1) / 2) * power(t, -(x + 1) / 2) * Expr.exp(-M * r ** 2 / (2 * t))
            * red_theta * red_thetabar)


def se32_form() -> TwoPointForm:
    return TwoPointForm('se32', 'se(3|2) two-point function in the reduced mass variables',
                        reduced_odd_kernel() * c2 + reduced_even_kernel() * d0, 'se32_reduced',
                        'reduced', {'x': 1}, free_constants=('c2', 'd0'))


def se32_even() -> TwoPointForm:
    return TwoPointForm('se32_d0', 'even se(3|2) two-point function for arbitrary x_1 + x_2',
                        reduced_even_kernel() * d0, 'se32_reduced', 'reduced', {},
                        free_constants=('d0',))


def osp24_reduced() -> TwoPointForm:
    return TwoPointForm('osp24_reduced', 'osp(2|4) two-point function against the se(3|2) system',
                        reduced_odd_kernel() * c2, 'se32_reduced', 'reduced', {'x': 1},
                        free_constants=('c2',))


FORMS: Dict[str, Callable[[], TwoPointForm]] = {
    'scalar_f': scalar_formal,
    'scalar_N': scalar_with_n,
    'scalar_nu0': scalar_nu0,
    'prop21_case_i': spinor_case_i,
    'prop21_case_ii': spinor_case_ii,
    'prop21_case_ii_exchanged': lambda: swap_points(spinor_case_ii()),
    'prop22': spinor_conformal,
    'prop23_derived': derived_spinor,
    's1_C1': n1_c1,
    's1_C2': n1_c2,
    'st2_const': n2_constant,
    'st2': n2_odd,
    'osp24': osp24,
    'osp24_reduced': osp24_reduced,
    'prop53_case_i': osp22_constant,
    'prop53_case_ii': osp22_bessel,
    'prop53_case_iii': osp22_quadratic,
    'se32': se32_form,
    'se32_d0': se32_even,
}


@lru_cache(maxsize=None)
def load_form(name: str) -> TwoPointForm:
    """
    Build a registered two-point form.

    :param name: registry name
    :return: TwoPointForm with its constraint set
    :raises UnknownForm: if the name is not registered
    """
    builder = FORMS.get(name)
    if builder is None:
        raise UnknownForm(f"Unknown two-point form '{name}'. Known: {sorted(FORMS)}")
    form = builder()
    logger.debug(f"Built two-point form {name} ({form.algebra}, constraints {form.constraints})")
    return form


def form_names():
    return sorted(FORMS)
