"""
Seeded property checks of the Poisson superalgebra axioms.
"""
import itertools
import logging
import os
from typing import Dict, List, Optional, Sequence

import numpy as np
import sympy

from poisson.element import (P22, P42, TWISTED, PoissonElement, Signature, grading,
                             poisson_bracket)
from symbolic.errors import SymbolicError
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)

SIGNATURES: Dict[str, Signature] = {
    'P22': P22,
    'P42': P42,
    'P~21': TWISTED[1],
    'P~22': TWISTED[2],
}

DEFAULT_CASES = 50


def _sign(a: int, b: int) -> int:
    return -1 if (a * b) % 2 else 1


class ElementSampler:
    """Random parity-homogeneous polynomials of a signature, reproducible from a seed."""

    def __init__(self, signature: Signature, seed: int = 42):
        self.signature = signature
        self.rng = np.random.default_rng(seed)
        odd = signature.odd
        subsets = [s for k in range(len(odd) + 1) for s in itertools.combinations(odd, k)]
        self.by_parity = {p: [s for s in subsets if len(s) % 2 == p] for p in (0, 1)}
        self.p_powers = [sympy.Integer(0), half, sympy.Integer(1), sympy.Rational(3, 2)] \
            if signature.twisted else [sympy.Integer(k) for k in range(3)]

    def monomial(self, parity: int) -> PoissonElement:
        sig = self.signature
        choices = self.by_parity[parity]
        if not choices:
            return PoissonElement.zero(sig)
        theta = choices[self.rng.integers(len(choices))]
        qs = tuple(int(self.rng.integers(0, 3)) for _ in range(sig.m))
        ps = tuple(self.p_powers[self.rng.integers(len(self.p_powers))] for _ in range(sig.m))
        coeff = int(self.rng.integers(1, 4)) * (1 if self.rng.random() < 0.5 else -1)
        return PoissonElement.monomial(sig, coeff, q=qs, p=ps, theta=theta)

    def element(self, parity: Optional[int] = None, terms: int = 2) -> PoissonElement:
        if parity is None:
            parity = int(self.rng.integers(0, 2)) if self.by_parity[1] else 0
        result = PoissonElement.zero(self.signature)
        for _ in range(terms):
            result = result + self.monomial(parity)
        return result


def _parity(f: PoissonElement) -> int:
    return f.parity() or 0


def antisymmetry_residual(f: PoissonElement, g: PoissonElement) -> PoissonElement:
    return poisson_bracket(f, g) + poisson_bracket(g, f) * _sign(_parity(f), _parity(g))


def jacobi_residual(f: PoissonElement, g: PoissonElement, h: PoissonElement) -> PoissonElement:
    a, b, c = _parity(f), _parity(g), _parity(h)
    return (poisson_bracket(f, poisson_bracket(g, h)) * _sign(a, c)
            + poisson_bracket(g, poisson_bracket(h, f)) * _sign(b, a)
            + poisson_bracket(h, poisson_bracket(f, g)) * _sign(c, b))


def leibniz_residual(f: PoissonElement, g: PoissonElement, h: PoissonElement) -> PoissonElement:
    """{fg, h} - f{g, h} - {f, h}g for even f, g, h."""
    return poisson_bracket(f * g, h) - f * poisson_bracket(g, h) - poisson_bracket(f, h) * g


def check_axioms(name: str, cases: int = DEFAULT_CASES, seed: int = 42) -> Report:
    """
    Run every axiom over ``cases`` seeded triples of one signature.

    :param name: key of SIGNATURES
    """
    signature = SIGNATURES[name]
    sampler = ElementSampler(signature, seed)
    report = Report(f"axioms {signature.name}", 'Poisson superalgebra axioms')
    failures: Dict[str, List[str]] = {}

    def record(prop: str, ok: bool, witness: str):
        if not ok:
            failures.setdefault(prop, []).append(witness)

    for i in range(cases):
        f, g, h = sampler.element(), sampler.element(), sampler.element()
        try:
            record('antisymmetry', antisymmetry_residual(f, g).is_zero(), f"{f} | {g}")
            record('jacobi', jacobi_residual(f, g, h).is_zero(), f"{f} | {g} | {h}")
            fe, ge, he = sampler.element(0), sampler.element(0), sampler.element(0)
            record('leibniz', leibniz_residual(fe, ge, he).is_zero(), f"{fe} | {ge} | {he}")
            m1, m2 = sampler.monomial(int(i % 2 and bool(signature.odd))), sampler.monomial(0)
            if not (m1.is_zero() or m2.is_zero()):
                product = m1 * m2
                if not product.is_zero():
                    record('grade additivity',
                           grading(product, 'gra') == grading(m1, 'gra') + grading(m2, 'gra'), f"{m1} | {m2}")
                bracket = poisson_bracket(m1, m2)
                if not bracket.is_zero():
                    record('bracket grade -1',
                           grading(bracket, 'gra') == grading(m1, 'gra') + grading(m2, 'gra') - 1,
                           f"{m1} | {m2}")
        except SymbolicError as e:
            record('error', False, f"{type(e).__name__}: {e}")

    for prop in ('antisymmetry', 'jacobi', 'leibniz', 'grade additivity', 'bracket grade -1', 'error'):
        witnesses = failures.get(prop, [])
        if prop == 'error' and not witnesses:
            continue
        report.add(prop, not witnesses, witnesses[0] if witnesses else None, failures=len(witnesses))
    report.summary = f"{cases} seeded triples"
    return report


def axiom_suite(cases: int = DEFAULT_CASES, seed: int = 42,
                names: Sequence[str] = tuple(SIGNATURES)) -> Report:
    report = Report('axioms', 'Poisson superalgebra axioms')
    for name in names:
        report.extend(check_axioms(name, cases, seed), prefix=name)
    logger.info(f"Axiom suite over {list(names)}: {'pass' if report.passed else 'fail'}")
    return report
