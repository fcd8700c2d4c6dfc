"""
Poisson images of the super-Schrödinger and osp(2|4) generators and the morphism checks.

Each map sends a generator label to a quadratic element of P(2|2) or P(4|2); a map is a
Lie superalgebra morphism when every bracket of the realization maps to the Poisson
bracket of the images.
"""
import logging
import os
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from algebra.realizations import load_realization
from algebra.tables import BracketTable, check_closure, load_golden
from poisson.element import P22, P42, PoissonElement, Signature, grading, poisson_bracket
from symbolic.errors import SymbolicError
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)
ElementMap = Dict[str, PoissonElement]


def _mono(sig: Signature, coeff, q=0, p=0, theta=()) -> PoissonElement:
    return PoissonElement.monomial(sig, coeff, q=q, p=p, theta=theta)


def super_schroedinger_map() -> ElementMap:
    """Images of the 13 generators in P(2|2)."""
    s = P22
    return {
        'X_-1': _mono(s, half, q=2),
        'X_0': _mono(s, -half, q=1, p=1),
        'X_1': _mono(s, half, p=2),
        'Y_-1/2': _mono(s, 1, q=1),
        'Y_1/2': _mono(s, -1, p=1),
        'M_0': PoissonElement.constant(s, 1),
        'Ybar1_0': _mono(s, -1, theta=('theta1',)),
        'Ybar2_0': _mono(s, 1, theta=('theta2',)),
        'G1_-1/2': _mono(s, -half, q=1, theta=('theta1',)),
        'G2_-1/2': _mono(s, half, q=1, theta=('theta2',)),
        'G1_1/2': _mono(s, half, p=1, theta=('theta1',)),
        'G2_1/2': _mono(s, -half, p=1, theta=('theta2',)),
        'N_0': _mono(s, half, theta=('theta1', 'theta2')),
    }


def osp24_map() -> ElementMap:
    """Images of the 19 generators in P(4|2); q_2, p_2 carry the mass direction."""
    s = P42
    return {
        'X_-1': _mono(s, half, q=(2, 0), p=(0, 0)),
        'X_0': _mono(s, -half, q=(1, 0), p=(1, 0)),
        'X_1': _mono(s, half, q=(0, 0), p=(2, 0)),
        'Y_-1/2': _mono(s, 1, q=(1, 1), p=(0, 0)),
        'Y_1/2': _mono(s, -1, q=(0, 1), p=(1, 0)),
        'M_0': _mono(s, 1, q=(0, 2), p=(0, 0)),
        'N_0': _mono(s, half, q=(0, 0), p=(0, 0), theta=('theta1', 'theta2')),
        'Ybar1_0': _mono(s, -1, q=(0, 1), p=(0, 0), theta=('theta1',)),
        'Ybar2_0': _mono(s, 1, q=(0, 1), p=(0, 0), theta=('theta2',)),
        'G1_-1/2': _mono(s, -half, q=(1, 0), p=(0, 0), theta=('theta1',)),
        'G2_-1/2': _mono(s, half, q=(1, 0), p=(0, 0), theta=('theta2',)),
        'G1_1/2': _mono(s, half, q=(0, 0), p=(1, 0), theta=('theta1',)),
        'G2_1/2': _mono(s, -half, q=(0, 0), p=(1, 0), theta=('theta2',)),
        'D': _mono(s, -half, q=(1, 0), p=(1, 0)) + _mono(s, -half, q=(0, 1), p=(0, 1)),
        'V_+': _mono(s, 1, q=(0, 0), p=(1, 1)),
        'W': _mono(s, sympy.Rational(1, 4), q=(0, 0), p=(0, 2)),
        'V_-': _mono(s, -sympy.Rational(1, 4), q=(1, 0), p=(0, 1)),
        'Zbar1_0': _mono(s, sympy.Rational(1, 8), q=(0, 0), p=(0, 1), theta=('theta1',)),
        'Zbar2_0': _mono(s, -sympy.Rational(1, 8), q=(0, 0), p=(0, 1), theta=('theta2',)),
    }


def sabotaged_map() -> ElementMap:
    images = super_schroedinger_map()
    images['X_0'] = _mono(P22, half, q=1, p=1)
    return images


_tables: Dict[str, BracketTable] = {}


def _domain_table(name: str) -> BracketTable:
    if name not in _tables:
        realization = load_realization(name)
        golden = load_golden(realization.golden) if realization.golden else None
        _tables[name] = check_closure(realization, golden)
    return _tables[name]


def morphism_check(images: ElementMap, domain: str, anchor: str = '') -> Report:
    """
    Verify that ``images`` intertwines the realization brackets with the Poisson bracket.

    :param images: generator label -> PoissonElement
    :param domain: realization name whose bracket table is the reference
    :return: Report with one entry per generator pair
    """
    report = Report(f"morphism:{domain}", anchor)
    table = _domain_table(domain)
    missing = sorted(set(table.parities) - set(images))
    if missing:
        report.add('totality', False, f"no image for {missing}")
        return report
    for (a, b), entry in sorted(table.entries.items()):
        pair_id = f"[{a}, {b}]"
        if entry.result is None:
            report.add(pair_id, False, f"domain bracket outside the basis: {entry.residual}")
            continue
        try:
            lhs = poisson_bracket(images[a], images[b])
            rhs = PoissonElement.zero(lhs.signature)
            for label, coeff in entry.result.items():
                rhs = rhs + images[label] * coeff
            residual = lhs - rhs
            report.add(pair_id, residual.is_zero(), None if residual.is_zero() else residual.to_text())
        except SymbolicError as e:
            report.record_error(pair_id, e)
    report.summary = f"{len(images)} generators, {len(report.entries)} pairs"
    if report.passed:
        logger.info(f"{domain}: Poisson map is a morphism ({report.summary})")
    return report


def span_decompose(element: PoissonElement, basis: Sequence[Tuple[str, PoissonElement]]) -> Optional[Dict[str, sympy.Expr]]:
    """Coefficients expressing ``element`` over ``basis`` (None when outside the span)."""
    if element.is_zero():
        return {}
    unknowns = sympy.symbols(f'k0:{len(basis)}')
    keys = set(element.terms)
    for _, b in basis:
        keys.update(b.terms)
    equations = []
    for key in keys:
        expr = sum((u * b.terms.get(key, 0) for u, (_, b) in zip(unknowns, basis)), sympy.Integer(0))
        equations.append(expr - element.terms.get(key, 0))
    solutions = sympy.linsolve(equations, list(unknowns))
    if not solutions:
        return None
    solution = next(iter(solutions))
    zero_free = {u: 0 for u in unknowns}
    return {label: v for (label, _), v in ((lb, sympy.sympify(s).subs(zero_free)) for lb, s in zip(basis, solution))
            if v != 0}


def _monomial_key_set(images: List[PoissonElement]) -> set:
    keys = set()
    for img in images:
        keys.update(img.terms)
    return keys


def quadratic_image_check() -> Report:
    """The tildedeg-1 images of the 13 generators are exactly the quadratic monomials."""
    report = Report('prop3.7.1', 'image of the tildedeg-1 part is the space of quadratic monomials')
    images = super_schroedinger_map()
    degree_one = {label: img for label, img in images.items() if grading(img, 'tildedeg') == 1}
    quadratics = [((2,), (0,), ()), ((1,), (1,), ()), ((0,), (2,), ()),
                  ((1,), (0,), ('theta1',)), ((1,), (0,), ('theta2',)),
                  ((0,), (1,), ('theta1',)), ((0,), (1,), ('theta2',)),
                  ((0,), (0,), ('theta1', 'theta2'))]
    expected = {(tuple(q), tuple(sympy.Rational(b) for b in p), g) for q, p, g in quadratics}
    found = _monomial_key_set(list(degree_one.values()))
    report.add('count', len(degree_one) == 8, None if len(degree_one) == 8 else f"{sorted(degree_one)}")
    report.add('monomials', found == expected,
               None if found == expected else f"extra {found - expected}, missing {expected - found}")
    return report


def degree_one_closure_check() -> Report:
    """deg-1 images in P(4|2) close under the bracket and are the tildedeg-1 part plus the dilation."""
    report = Report('prop3.7.3', 'deg-1 elements of the osp(2|4) image')
    images = osp24_map()
    basis = []
    for label, img in sorted(images.items()):
        try:
            if grading(img, 'deg') == 1:
                basis.append((label, img))
        except SymbolicError:
            continue
    labels = [label for label, _ in basis]
    expected = sorted(['X_-1', 'X_0', 'X_1', 'G1_-1/2', 'G1_1/2', 'G2_-1/2', 'G2_1/2', 'N_0', 'D'])
    report.add('basis', labels == expected, None if labels == expected else f"{labels}")
    for i, (a, fa) in enumerate(basis):
        for b, fb in basis[i:]:
            result = span_decompose(poisson_bracket(fa, fb), basis)
            report.add(f"[{a}, {b}]", result is not None, None if result is not None else 'leaves the deg-1 span')
    return report
