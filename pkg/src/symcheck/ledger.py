"""
Dynamical-symmetry ledger.

Each entry is an explicit operator identity, typically [eom, generator] = cofactor * eom
(+ a correction that vanishes at x = 1/2), checked by exact operator equality. Solution
transport complements the ledger by applying generators to explicit solutions.
"""
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy

from algebra.realizations import M, Operator, dirac_operator, load_realization, nu, r, t, th1, x, zeta
from poisson.element import TWISTED, PoissonElement
from poisson.sns import mode_element
from symbolic.errors import SymbolicError
from symbolic.expr import Expr
from symbolic.superop import MatrixOperator, SuperOperator, mult, supercommutator
from symcheck.eom import eom_set, laplace_operator, schrodinger_operator, susy_operators
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)
Solution = Union[Expr, Tuple[Expr, Expr]]


@dataclass
class SymmetryIdentity:
    identity_id: str
    anchor: str
    lhs: Operator
    rhs: Operator
    generators: Tuple[str, ...] = ()
    realization: str = ''
    correction: Optional[Operator] = None
    bindings: Dict[str, Any] = field(default_factory=dict)


def verify_identity(identity: SymmetryIdentity) -> Report:
    """
    Exact check of lhs == rhs; when the identity carries an (x - 1/2) correction, that
    correction must also vanish at x = 1/2.
    """
    report = Report(identity.identity_id, identity.anchor)
    try:
        residual = identity.lhs - identity.rhs
        if identity.bindings:
            residual = residual.substitute(identity.bindings)
        report.add(identity.identity_id, residual.is_zero(), None if residual.is_zero() else residual.to_text())
        if identity.correction is not None:
            at_half = identity.correction.substitute({'x': half})
            report.add(f"{identity.identity_id} at x=1/2", at_half.is_zero(),
                       None if at_half.is_zero() else at_half.to_text())
    except SymbolicError as e:
        report.record_error(identity.identity_id, e)
    return report


def _scaled(op: SuperOperator, coeff) -> SuperOperator:
    return op.left_multiply(coeff)


def _matrix_scaled(op: MatrixOperator, coeff) -> MatrixOperator:
    return MatrixOperator.scalar(mult(coeff)).compose(op)


# ---- Schrödinger equation: sch1 -------------------------------------------------

def schrodinger_identities() -> List[SymmetryIdentity]:
    sch = load_realization('sch1')
    S = schrodinger_operator()
    zero = SuperOperator.zero()
    correction = mult(-2 * (x - half) * M)
    anchor = 'commutators of the Schrödinger operator with sch1'
    out = [
        SymmetryIdentity('[S, X_1]', anchor, supercommutator(S, sch.operator('X_1')),
                         _scaled(S, -2 * t) + correction, ('X_1',), 'sch1', correction),
        SymmetryIdentity('[S, X_0]', anchor, supercommutator(S, sch.operator('X_0')), -S, ('X_0',), 'sch1'),
    ]
    for label in ('X_-1', 'Y_-1/2', 'Y_1/2', 'M_0'):
        out.append(SymmetryIdentity(f'[S, {label}]', anchor, supercommutator(S, sch.operator(label)), zero,
                                    (label,), 'sch1'))
    return out


# ---- Dirac-Lévy-Leblond equation: conf3spinor -----------------------------------

def dirac_identities() -> List[SymmetryIdentity]:
    conf = load_realization('conf3spinor')
    dirac = dirac_operator()
    zero = MatrixOperator.scalar(SuperOperator.zero())
    e12 = MatrixOperator([[0, 2 * (x - half)], [0, 0]])
    e21 = MatrixOperator([[0, 0], [-(x - half), 0]])
    sigma = MatrixOperator([[-(x - half), 0], [0, x - half]])
    anchor = 'commutators of the Dirac-Lévy-Leblond operator with conf3'

    def comm(label: str) -> MatrixOperator:
        return supercommutator(dirac, conf.operator(label))

    out = [
        SymmetryIdentity('[D, X_1]', anchor, comm('X_1'), _matrix_scaled(dirac, -t) + e21, ('X_1',),
                         'conf3spinor', e21),
        SymmetryIdentity('[D, X_0]', anchor, comm('X_0'), _matrix_scaled(dirac, -half), ('X_0',), 'conf3spinor'),
        SymmetryIdentity('[D, W]', anchor, comm('W'), _matrix_scaled(dirac, 2 * zeta) + e12, ('W',),
                         'conf3spinor', e12),
        SymmetryIdentity('[D, V_+]', anchor, comm('V_+'), _matrix_scaled(dirac, -r) + sigma, ('V_+',),
                         'conf3spinor', sigma),
    ]
    for label in ('X_-1', 'Y_-1/2', 'Y_1/2', 'M_0', 'N', 'V_-'):
        out.append(SymmetryIdentity(f'[D, {label}]', anchor, comm(label), zero, (label,), 'conf3spinor'))
    return out


def conf3_auxiliary_identities() -> List[SymmetryIdentity]:
    conf = load_realization('conf3spinor')
    laplace = MatrixOperator.scalar(laplace_operator())
    dilation = MatrixOperator.scalar(SuperOperator.term(-t, 't') + SuperOperator.term(-r, 'r')
                                     + SuperOperator.term(-zeta, 'zeta'))
    anchor = 'auxiliary conf3 relations'
    two_x0_minus_n = conf.operator('X_0') + conf.operator('X_0') - conf.operator('N')
    return [
        SymmetryIdentity('2X_0 - N', anchor, two_x0_minus_n,
                         dilation + MatrixOperator.scalar(mult(-x - half - nu)), ('X_0', 'N'), 'conf3spinor'),
        SymmetryIdentity('[N, Y_1/2]', anchor, supercommutator(conf.operator('N'), conf.operator('Y_1/2')),
                         -conf.operator('Y_1/2'), ('N', 'Y_1/2'), 'conf3spinor'),
        SymmetryIdentity('[N, Y_-1/2]', anchor, supercommutator(conf.operator('N'), conf.operator('Y_-1/2')),
                         MatrixOperator.scalar(SuperOperator.zero()), ('N', 'Y_-1/2'), 'conf3spinor'),
        SymmetryIdentity('[L, V_-]', anchor, supercommutator(laplace, conf.operator('V_-')),
                         MatrixOperator.scalar(SuperOperator.zero()), ('V_-',), 'conf3spinor'),
        SymmetryIdentity('D o D', 'the spinor equations square to the Laplace operator',
                         dirac_operator().compose(dirac_operator()), laplace, (), 'conf3spinor'),
    ]


# ---- (3|2)-supersymmetric model: s2tilde ------------------------------------------

def quadratic_identities() -> List[SymmetryIdentity]:
    """Generators of s2tilde as quadratic expressions in the translations plus equation-of-motion terms."""
    s = load_realization('s2tilde')
    op = s.operator
    eom = susy_operators()
    S, S1 = eom['S'], eom["S'"]
    k = 1 / (2 * M)
    ym, yp = op('Y_-1/2'), op('Y_1/2')
    yb1, yb2 = op('Ybar1_0'), op('Ybar2_0')
    anchor = 'quadratic expressions of the super-Schrödinger generators'

    def ident(label: str, rhs: SuperOperator, correction: Optional[SuperOperator] = None,
              uses: Sequence[str] = ()) -> SymmetryIdentity:
        full = rhs + correction if correction is not None else rhs
        return SymmetryIdentity(f'{label} quadratic', anchor, op(label), full, (label,) + tuple(uses), 's2tilde',
                                correction)

    return [
        ident('X_-1', _scaled(ym * ym, -k) + _scaled(S, -k), uses=('Y_-1/2',)),
        ident('X_0', _scaled(ym * yp + yp * ym, -k / 2) + _scaled(S, -t * k) + _scaled(S1, th1 * (-k / 2)),
              mult(-(x - half) / 2), ('Y_-1/2', 'Y_1/2')),
        ident('X_1', _scaled(yp * yp, -k) + _scaled(S, -t ** 2 * k) + _scaled(S1, th1 * (-t * k)),
              mult(-(x - half) * t), ('Y_1/2',)),
        ident('G1_-1/2', _scaled(yb1 * ym, -k) + _scaled(S1, -k), uses=('Ybar1_0', 'Y_-1/2')),
        ident('G2_-1/2', _scaled(yb2 * ym, -k) + _scaled(S, th1 * (-k)), uses=('Ybar2_0', 'Y_-1/2')),
        ident('G1_1/2', _scaled(yb1 * yp, -k) + _scaled(S1, -t * k), uses=('Ybar1_0', 'Y_1/2')),
        ident('G2_1/2', _scaled(yb2 * yp, -k) + _scaled(S, th1 * (-t * k)), mult(th1 * (-(x - half))),
              ('Ybar2_0', 'Y_1/2')),
        ident('N_0', _scaled(yb2 * yb1 - yb1 * yb2, -k / 2) + _scaled(S1, th1 * (-k)), mult(x - half),
              ('Ybar1_0', 'Ybar2_0')),
        SymmetryIdentity('M_0 = [Y_1/2, Y_-1/2]', anchor, op('M_0'), supercommutator(yp, ym),
                         ('M_0', 'Y_1/2', 'Y_-1/2'), 's2tilde'),
        SymmetryIdentity('X_1 = -[G1_1/2, G2_1/2]', 'defining identity of X_1', op('X_1'),
                         -supercommutator(op('G1_1/2'), op('G2_1/2')), ('X_1', 'G1_1/2', 'G2_1/2'), 's2tilde'),
    ]


def susy_translation_identities() -> List[SymmetryIdentity]:
    s = load_realization('s2tilde')
    S = schrodinger_operator()
    return [SymmetryIdentity(f'[S, {label}] (s2tilde)', 'translations of the (3|2) model commute with S',
                             supercommutator(S, s.operator(label)), SuperOperator.zero(), (label,), 's2tilde')
            for label in ('X_-1', 'Y_-1/2', 'Y_1/2', 'Ybar1_0', 'Ybar2_0', 'M_0')]


def _run(name: str, anchor: str, identities: Iterable[SymmetryIdentity]) -> Report:
    report = Report(name, anchor)
    count = 0
    for identity in identities:
        report.extend(verify_identity(identity))
        count += 1
    report.summary = f"{count} identities"
    if report.passed:
        logger.info(f"{name}: {count} identities verified")
    return report


def verify_schrodinger_ledger() -> Report:
    return _run('ledger:schrodinger', 'Schrödinger operator identities', schrodinger_identities())


def verify_dirac_ledger() -> Report:
    return _run('ledger:dirac', 'Dirac-Lévy-Leblond identities', dirac_identities() + conf3_auxiliary_identities())


def verify_quadratic_ledger() -> Report:
    return _run('ledger:quadratic', 'quadratic identities of s2tilde',
                quadratic_identities() + susy_translation_identities())


def all_identities() -> List[SymmetryIdentity]:
    return (schrodinger_identities() + dirac_identities() + conf3_auxiliary_identities()
            + quadratic_identities() + susy_translation_identities())


def ledger_coverage() -> Report:
    """Every generator of sch1, conf3spinor and s2tilde appears in at least one identity."""
    covered: Dict[str, set] = {}
    for identity in all_identities():
        covered.setdefault(identity.realization, set()).update(identity.generators)
    report = Report('ledger-coverage', 'each generator appears in a verified identity')
    for name in ('sch1', 'conf3spinor', 's2tilde'):
        missing = sorted(set(load_realization(name).labels()) - covered.get(name, set()))
        report.add(name, not missing, ', '.join(missing) or None)
    return report


# ---- solution transport ----------------------------------------------------------

def heat_kernel() -> Expr:
    """t^(-1/2) exp(-M r^2 / 2t)."""
    return Expr.from_sympy(t ** (-half) * sympy.exp(-M * r ** 2 / (2 * t)))


def laplace_solutions() -> List[Expr]:
    """Solutions of (d_zeta d_t + d_r^2) f = 0."""
    return [Expr.from_sympy(r ** 2 - 2 * zeta * t),
            Expr.from_sympy(r),
            Expr.from_sympy(t ** (-half) * sympy.exp(-2 * M * zeta - M * r ** 2 / (2 * t)))]


def spinor_from_laplace(f: Expr) -> Tuple[Expr, Expr]:
    """(psi, phi) = (-d_zeta f, d_r f) solves the Dirac-Lévy-Leblond equations when f solves the Laplace one."""
    return -f.partial('zeta'), f.partial('r')


def solution_transport_check(model: str, generator: Optional[Operator] = None,
                             test_solutions: Optional[Sequence[Solution]] = None,
                             label: str = 'identity') -> Report:
    """
    Apply ``generator`` to each solution and check the image still solves the model equations.

    :param model: schrodinger, laplace, dirac or susy32
    :param generator: SuperOperator (MatrixOperator for dirac); None checks the solutions themselves
    """
    eoms = eom_set(model)
    if test_solutions is None:
        if model == 'dirac':
            test_solutions = [spinor_from_laplace(f) for f in laplace_solutions()]
        elif model == 'laplace':
            test_solutions = laplace_solutions()
        else:
            test_solutions = [heat_kernel(), Expr.one(), Expr.from_sympy(r ** 2 + t / M)]
    report = Report(f'transport:{model}:{label}', f'{label} maps {model} solutions to solutions')
    for i, solution in enumerate(test_solutions):
        entry = f"{label} on solution {i}"
        try:
            image = solution if generator is None else generator.apply(solution)
            ok = eoms.annihilates(image)
            report.add(entry, ok, None if ok else 'image is not annihilated')
        except SymbolicError as e:
            report.record_error(entry, e)
    return report


def transport_suite() -> Report:
    """Heat-kernel transport under sch1 at x = 1/2 and spinor transport under conf3 at x = 1/2."""
    report = Report('transport', 'symmetry generators act on explicit solutions')
    report.extend(solution_transport_check('schrodinger'), 'solutions')
    sch = load_realization('sch1').substitute({'x': half})
    for label in ('X_1', 'X_0', 'Y_1/2', 'X_-1', 'Y_-1/2'):
        report.extend(solution_transport_check('schrodinger', sch.operator(label), label=label))
    report.extend(solution_transport_check('laplace'), 'laplace')
    report.extend(solution_transport_check('dirac'), 'spinor')
    conf = load_realization('conf3spinor').substitute({'x': half, 'nu': 0})
    for label in ('X_1', 'X_0', 'Y_1/2', 'V_-', 'W', 'V_+'):
        report.extend(solution_transport_check('dirac', conf.operator(label), label=label))
    return report


# ---- sns(2) images of the equations of motion -------------------------------------

def check_sns_ops_vanish(m0_image: Optional[Any] = None) -> Report:
    """
    S = 2 M_0 X_-1 - Y_-1/2^2, S' = 2 M_0 G1_-1/2 - Y_-1/2 Ybar1_0, Sbar' = Y_-1/2 G1_-1/2 - X_-1 Ybar1_0
    and S'' = G1_-1/2 Ybar1_0 vanish as products in P~(2|2).

    :param m0_image: replacement for the image of M_0 (sabotage control)
    """
    sig = TWISTED[2]
    x_m = mode_element(2, 'X', -1)
    y_m = mode_element(2, 'Y', -half)
    g1 = mode_element(2, 'G1', -half)
    yb1 = mode_element(2, 'Ybar1', 0)
    m0 = mode_element(2, 'M', 0) if m0_image is None else PoissonElement.constant(sig, m0_image)
    products = {
        'S': m0 * x_m * 2 - y_m * y_m,
        "S'": m0 * g1 * 2 - y_m * yb1,
        "Sbar'": y_m * g1 - x_m * yb1,
        "S''": g1 * yb1,
    }
    report = Report('sns-eom' if m0_image is None else f'sns-eom[M_0 -> {m0_image}]',
                    'equation-of-motion operators vanish in the Poisson image')
    for name, value in products.items():
        report.add(name, value.is_zero(), None if value.is_zero() else value.to_text())
    return report
