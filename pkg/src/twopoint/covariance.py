"""
Two-particle action and covariance verification of two-point functions.
"""
import copy
import functools
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import sympy

from algebra.realizations import GeneratorDef, Realization, T, load_realization
from symbolic.errors import SignatureMismatch, SymbolicError
from symbolic.expr import Expr, sample_environment
from symbolic.registry import sort_grassmann, sym
from symbolic.superop import MatrixOperator, SuperOperator, mult
from twopoint.forms import (Body, M_1, TwoPointForm, derived_constants, load_form, map_body, point,
                            psi0, spinor_equal_dimensions, uu, x_1, x_2)
from utils.labels import parse_label
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)
DEFAULT_SEED = 42
DEFAULT_TOL = 1e-9
DEFAULT_POINTS = 10


@dataclass
class CovarianceReport(Report):
    form: str = ''
    algebra: str = ''
    mode: str = 'exact'

    def to_json(self) -> Dict[str, Any]:
        data = super().to_json()
        data.update({'form': self.form, 'algebra': self.algebra, 'mode': self.mode})
        return data


@dataclass
class SpinorPairAction:
    """Two-particle action on a 2x2 battery: (A.C)_ab = A1_ac C_cb + A2_bc C_ac."""
    first: MatrixOperator
    second: MatrixOperator

    def apply(self, body: Body, rewrite: bool = True) -> Body:
        rows = []
        for a in range(2):
            row = []
            for b in range(2):
                pieces = [self.first.entries[a][c].apply(body[c][b], rewrite) for c in range(2)]
                pieces += [self.second.entries[b][c].apply(body[a][c], rewrite) for c in range(2)]
                row.append(Expr.sum(pieces))
            rows.append(tuple(row))
        return tuple(rows)


TwoParticleOperator = Union[SuperOperator, SpinorPairAction]


# ---- reduced se(3|2) system ------------------------------------------------

def _reduced_gen(label: str, op: SuperOperator, parity: int) -> GeneratorDef:
    family, index = parse_label(label)
    return GeneratorDef(label, family, index, op, parity)


def reduced_se32(window: Optional[Dict] = None) -> Realization:
    """
    Two-particle se(3|2) generators after reduction to the differences t, r, theta, thetabar
    and the first mass M (conservation sets the second to -M, and zeta becomes -1/2 d_M).
    Generators acting trivially on such functions are omitted.
    """
    t, r, M, x = sym('t'), sym('r'), sym('M'), sym('x')
    theta, thetabar = Expr.odd('theta'), Expr.odd('thetabar')
    generators = [
        _reduced_gen('X_0', T(t, 't') + T(half * r, 'r') + T(theta * half, 'theta') + mult(x / 2), 0),
        _reduced_gen('Y_1/2', T(t, 'r') + mult(M * r) + T(theta * half, 'thetabar'), 0),
        _reduced_gen('V_-', T(-1, 'M', 'r') + T(r, 't') + T(thetabar, 'theta'), 0),
        _reduced_gen('D', T(t, 't') + T(r, 'r') + T(theta * half, 'theta') + T(thetabar * half, 'thetabar')
                     + T(-M, 'M') + mult(x - 1), 0),
        _reduced_gen('G2_-1/2', T(theta, 't') + T(thetabar, 'r'), 1),
        _reduced_gen('Ybar2_0', T(theta, 'r') + mult(thetabar * (2 * M)), 1),
    ]
    return Realization('se32_reduced', 'se(3|2) two-particle generators in reduced mass variables',
                       generators, coordinates=('t', 'r', 'M'))


REDUCED = {'se32_reduced': reduced_se32}


def load_two_point_realization(name: str) -> Realization:
    if name in REDUCED:
        return REDUCED[name]()
    return load_realization(name)


def realization_frame(realization: Realization) -> str:
    """Which convention a realization uses for the central generator M_0."""
    if realization.name in REDUCED:
        return 'reduced'
    if 'zeta' not in realization.coordinates:
        return 'mass'
    if 'M_0' not in realization:
        return 'zeta-'
    op = realization.operator('M_0')
    if isinstance(op, MatrixOperator):
        op = op.entries[0][0]
    return 'zeta+' if op == SuperOperator.term(half, 'zeta') else 'zeta-'


def two_particle_generator(realization: Realization, label: str,
                           point_params: Optional[Dict[int, Dict[str, Any]]] = None) -> TwoParticleOperator:
    """
    R(X) at point 1 plus R(X) at point 2.

    :param realization: single-particle realization
    :param label: generator label
    :param point_params: per-point overrides of the parameter bindings, e.g. {2: {'x': x_1}}
    :return: SuperOperator, or a SpinorPairAction for matrix realizations
    :raises UnknownLabel: if the label is not a generator of the realization
    """
    op = realization.operator(label)
    if realization.name in REDUCED:
        return op
    parts = []
    for index in (1, 2):
        coords = point(index)
        params: Dict[str, Any] = {k: sym(v) for k, v in coords.params.items()}
        params.update((point_params or {}).get(index, {}))
        parts.append(op.rename(coords.even, coords.odd, params))
    if realization.matrix:
        return SpinorPairAction(parts[0], parts[1])
    return parts[0] + parts[1]


def act(generator: TwoParticleOperator, body: Body, rewrite: bool = True) -> Body:
    return generator.apply(body, rewrite=rewrite)


def body_is_zero(body: Body) -> bool:
    if isinstance(body, tuple):
        return all(e.is_zero() for row in body for e in row)
    return body.is_zero()


def body_text(body: Body) -> str:
    if isinstance(body, tuple):
        return "[" + "; ".join(", ".join(e.to_text() for e in row) for row in body) + "]"
    return body.to_text()


def _entries(body: Body) -> List[Expr]:
    if isinstance(body, tuple):
        return [e for row in body for e in row]
    return [body]


def numeric_residual(body: Body, seed: int = DEFAULT_SEED, points: int = DEFAULT_POINTS) -> float:
    """Largest scaled residual over seeded sample points and Grassmann monomials."""
    entries = [e for e in _entries(body) if not e.is_zero()]
    names = sorted({n for e in entries for n in e.free_symbol_names()})
    worst = 0.0
    for k in range(points):
        env = sample_environment(names, seed + k)
        for e in entries:
            values, scale = e.evaluate_with_scale(env)
            for value in values.values():
                worst = max(worst, abs(value) / max(1.0, scale))
    return worst


def covariance_check(algebra_name: str, form: TwoPointForm, mode: str = 'exact',
                     seed: int = DEFAULT_SEED, tol: float = DEFAULT_TOL,
                     labels: Optional[Iterable[str]] = None) -> CovarianceReport:
    """
    Apply each two-particle generator to the form, impose the constraints, and test for zero.

    In exact mode formal functions are differentiated through their rewrite rules; in
    numeric mode derivative markers are kept and evaluated by the numeric evaluators.

    :raises SignatureMismatch: if the form and the realization disagree on the M_0 convention
    """
    if mode not in ('exact', 'numeric'):
        raise ValueError(f"Unknown covariance mode '{mode}'")
    realization = load_two_point_realization(algebra_name)
    frame = realization_frame(realization)
    if frame != form.frame:
        raise SignatureMismatch(f"Form {form.name} lives in frame '{form.frame}' but {algebra_name} "
                                f"uses '{frame}'")
    report = CovarianceReport(f"{form.name}@{algebra_name}", form.anchor, form=form.name,
                              algebra=algebra_name, mode=mode)
    for label in list(labels or form.labels or realization.labels()):
        try:
            generator = two_particle_generator(realization, label)
            image = act(generator, form.body, rewrite=(mode == 'exact'))
            residual = map_body(image, lambda e: e.substitute(form.constraints))
            if mode == 'exact':
                zero = body_is_zero(residual)
                report.add(label, zero, None if zero else body_text(residual), exact_zero=zero)
            else:
                value = numeric_residual(residual, seed)
                report.add(label, value < tol, None if value < tol else f"{value:.3e}",
                           numeric_residual=value)
        except SymbolicError as e:
            report.record_error(label, e)
    report.summary = f"{len(report.entries) - len(report.failures())}/{len(report.entries)} generators"
    logger.info(f"Covariance of {form.name} under {algebra_name} ({mode}): "
                f"{'pass' if report.passed else 'fail'}")
    return report


@functools.lru_cache(maxsize=None)
def _form_report(name: str, mode: str, seed: int, tol: float) -> CovarianceReport:
    form = load_form(name)
    return covariance_check(form.algebra, form, mode, seed, tol)


def check_form(name: str, mode: str = 'exact', seed: int = DEFAULT_SEED,
               tol: float = DEFAULT_TOL) -> CovarianceReport:
    """Covariance of a registered form under its own algebra; memoized per (name, mode, seed, tol)."""
    return copy.deepcopy(_form_report(name, mode, seed, tol))


# ---- components -----------------------------------------------------------

COMPONENT_MONOMIALS = {
    'f': lambda i: (),
    'phi': lambda i: (f'theta_{i}',),
    'phibar': lambda i: (f'thetabar_{i}',),
    'g': lambda i: (f'theta_{i}', f'thetabar_{i}'),
}


def monomial_coefficient(e: Expr, factors: Tuple[str, ...]) -> Expr:
    """Coefficient of the ordered product of ``factors``."""
    sign, canonical = sort_grassmann(tuple(factors))
    if sign == 0:
        return Expr.zero()
    return e.component(canonical) * sign


def component_extract(form: TwoPointForm) -> Dict[str, Expr]:
    """
    Component correlators of a superfield form Phi_i = f_i + phi_i theta_i + phibar_i thetabar_i
    + g_i theta_i thetabar_i. ``<a_1 b_2>`` is the coefficient of m_a(1) m_b(2); the same-point
    entries ``phi1phibar1``/``phi2phibar2`` are the coefficients of theta_i thetabar_i alone.
    """
    body = form.constrained()
    if form.spinor:
        names = ('psi', 'phi')
        return {f"{names[a]}1{names[b]}2": body[a][b] for a in range(2) for b in range(2)}
    out = {}
    for a, first in COMPONENT_MONOMIALS.items():
        for b, second in COMPONENT_MONOMIALS.items():
            out[f"{a}1{b}2"] = monomial_coefficient(body, first(1) + second(2))
    for i in (1, 2):
        out[f"phi{i}phibar{i}"] = monomial_coefficient(body, (f'theta_{i}', f'thetabar_{i}'))
    return out


# ---- suites ---------------------------------------------------------------

def derived_spinor_check() -> Report:
    """Derivatives of the scalar parent reproduce the equal-dimension spinor battery."""
    report = Report('derived spinor', 'spinor two-point function from derivatives of a scalar one')
    derived = load_form('prop23_derived').constrained()
    constants = derived_constants()
    psi_part = map_body(spinor_equal_dimensions(), lambda e: e.substitute({'psi0': 1, 'phi0': 0}))
    phi_part = map_body(spinor_equal_dimensions(), lambda e: e.substitute({'psi0': 0, 'phi0': 1}))
    names = ('psi', 'phi')
    for a in range(2):
        for b in range(2):
            expected = psi_part[a][b] * constants['psi0'] + phi_part[a][b] * constants['phi0']
            diff = derived[a][b] - expected
            report.add(f"{names[a]}{names[b]}", diff.is_zero(), None if diff.is_zero() else diff.to_text())
    return report


def spinor_covariance_suite() -> Report:
    """Equal and shifted dimensions, the exchanged case, the conformal restriction and the derived form."""
    report = Report('spinor two-point suite', 'covariant spinor two-point functions')
    for name in ('prop21_case_i', 'prop21_case_ii', 'prop21_case_ii_exchanged', 'prop22'):
        report.extend(check_form(name), prefix=name)

    case_ii = load_form('prop21_case_ii').body
    report.add('case_ii: <psi psi> = <phi psi> = 0', case_ii[0][0].is_zero() and case_ii[1][0].is_zero())

    exchanged = load_form('prop21_case_ii_exchanged')
    expected = psi0 * Expr.power(uu, -x_2)
    diff = exchanged.body[1][0] - expected
    report.add('exchanged: <phi psi> = psi0 u^(-x_2)', diff.is_zero(), None if diff.is_zero() else diff.to_text())
    report.add('exchanged: x_1 = x_2 - 1', sympy.simplify(exchanged.constraints.get('x_1', 0) - (x_2 - 1)) == 0)

    witness = load_form('prop22').with_constraints('phi0-free', phi0=psi0)
    result = covariance_check('conf3spinor', witness)
    failed = [e.identity_id for e in result.failures()]
    report.add('phi0 = psi0 witness fails on V_-', 'V_-' in failed, None if 'V_-' in failed else f"failed: {failed}")

    report.extend(derived_spinor_check(), prefix='derived')
    return report


NEGATIVE_CONTROLS = [
    ('s1_C1', 'x-shift', {'x_2': x_1 + sympy.Rational(1, 3)}, 'X_0'),
    ('s1_C1', 'mass-shift', {'M_2': -M_1 + 1}, 'M_0'),
    ('st2', 'mass-shift', {'M_2': -M_1 + 1}, 'M_0'),
    ('prop22', 'phi0-free', {'phi0': psi0}, 'V_-'),
    ('prop53_case_iii', 'x-shift', {'x_2': 3 - x_1}, 'N_0'),
    ('scalar_N', 'x-shift', {'x_2': x_1 + sympy.Rational(1, 3)}, 'X_0'),
]


def negative_controls() -> Report:
    """Perturbed constraints must break covariance on the named generator."""
    report = Report('negative controls', 'perturbed constraints')
    for name, suffix, overrides, expected in NEGATIVE_CONTROLS:
        form = load_form(name).with_constraints(suffix, **overrides)
        result = covariance_check(form.algebra, form)
        failed = [e.identity_id for e in result.failures()]
        report.add(form.name, expected in failed, None if expected in failed else f"failed: {failed}",
                   expected=expected, failed=failed)
    return report


SUPERFIELD_FORMS = ('scalar_f', 'scalar_N', 'scalar_nu0', 's1_C1', 's1_C2', 'st2_const', 'st2', 'osp24',
                    'osp24_reduced', 'prop53_case_i', 'prop53_case_ii', 'prop53_case_iii', 'se32', 'se32_d0')


def twopoint_suite(seed: int = DEFAULT_SEED, tol: float = DEFAULT_TOL) -> Report:
    """Exact covariance of every form, the numeric Bessel check, spinor batteries and negative controls."""
    report = Report('two-point suite', 'covariant two-point functions')
    for name in SUPERFIELD_FORMS:
        report.extend(check_form(name), prefix=name)
    report.extend(check_form('prop53_case_ii', 'numeric', seed, tol), prefix='prop53_case_ii:numeric')
    report.extend(spinor_covariance_suite(), prefix='spinor')
    report.extend(negative_controls(), prefix='control')
    return report
