"""
Contact brackets on superfunctions of (q | theta_1..theta_N) and their transport into P~(2|N).

A superfunction is a PoissonElement of TWISTED[N] whose p-exponents are all zero. The
alpha-lift multiplies each term phi theta^I by p^(alpha - |I|/2); brackets of lifts are
lifts of the transported bracket

    {f, g}_(alpha, beta) = -(alpha - E/2)(f) dg/dq + df/dq (beta - E/2)(g)
                           - (-1)^delta(f) sum_ij eta^ij d_i f d_j g

at weight alpha + beta - 1, where E counts odd variables. The contact bracket is the
case alpha = beta = 1.
"""
import logging
import os
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import sympy

from poisson.element import TWISTED, PoissonElement, poisson_bracket
from symbolic.errors import InhomogeneousParity, SignatureMismatch, SymbolicError
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)
DEFAULT_WEIGHTS = (sympy.Integer(0), half, sympy.Integer(1), sympy.Rational(3, 2))


def superfunction(n: int, coeff=1, q: int = 0, theta: Iterable[str] = ()) -> PoissonElement:
    return PoissonElement.monomial(TWISTED[n], coeff, q=q, p=0, theta=theta)


def _check_superfunction(f: PoissonElement):
    if not f.signature.twisted or any(ps[0] != 0 for (_, ps, _) in f.terms):
        raise SignatureMismatch(f"{f} is not a superfunction of a twisted signature")


def _by_degree(f: PoissonElement) -> Dict[int, PoissonElement]:
    parts: Dict[int, dict] = {}
    for key, c in f.terms.items():
        parts.setdefault(len(key[2]), {})[key] = c
    return {k: PoissonElement(f.signature, v) for k, v in parts.items()}


def transported_bracket(f: PoissonElement, g: PoissonElement, alpha, beta) -> PoissonElement:
    """
    Bracket of superfunctions carried by the alpha- and beta-lifts.

    :raises InhomogeneousParity: f or g mixes parities
    """
    _check_superfunction(f)
    _check_superfunction(g)
    f._same(g)
    delta = f.parity()
    if delta is None or g.parity() is None:
        raise InhomogeneousParity("contact brackets need parity-homogeneous operands")
    alpha, beta = sympy.Rational(alpha), sympy.Rational(beta)
    result = PoissonElement.zero(f.signature)
    for k, fk in _by_degree(f).items():
        for l, gl in _by_degree(g).items():
            a, b = alpha - half * k, beta - half * l
            result = result + fk.d_even('q') * gl * b - fk * gl.d_even('q') * a
    sign = -1 if delta else 1
    sig = f.signature
    for i, x in enumerate(sig.odd):
        fx = f.d_odd(x)
        if fx.is_zero():
            continue
        for j, y in enumerate(sig.odd):
            if sig.eta[i][j]:
                result = result - fx * g.d_odd(y) * (sign * sig.eta[i][j])
    return result


def contact_bracket(f: PoissonElement, g: PoissonElement) -> PoissonElement:
    return transported_bracket(f, g, 1, 1)


def alpha_lift(f: PoissonElement, alpha) -> PoissonElement:
    """Termwise lift phi theta^I -> phi theta^I p^(alpha - |I|/2)."""
    _check_superfunction(f)
    alpha = sympy.Rational(alpha)
    return PoissonElement(f.signature, {(qs, (alpha - half * len(g),), g): c for (qs, _, g), c in f.terms.items()})


def tilde(f: PoissonElement) -> PoissonElement:
    return alpha_lift(f, 1)


def _random_superfunction(n: int, rng: np.random.Generator) -> PoissonElement:
    odd = TWISTED[n].odd
    theta = tuple(name for name in odd if rng.integers(0, 2))
    coeff = int(rng.integers(1, 6)) * (1 if rng.integers(0, 2) else -1)
    return superfunction(n, coeff, q=int(rng.integers(-2, 4)), theta=theta)


def transport_check(n: int, cases: int = 30, seed: int = 42,
                    weights: Sequence = DEFAULT_WEIGHTS) -> Report:
    """
    {lift_alpha f, lift_beta g} = lift_(alpha+beta-1) {f, g}_(alpha, beta) on random monomials.

    The alpha = beta = 1 entries are the contact-to-Poisson transport of the tilde map.
    """
    rng = np.random.default_rng(seed)
    report = Report(f'transport:N={n}', 'alpha-lifts intertwine the transported bracket')
    for case in range(cases):
        f, g = _random_superfunction(n, rng), _random_superfunction(n, rng)
        alpha = sympy.Rational(weights[int(rng.integers(0, len(weights)))])
        beta = sympy.Rational(weights[int(rng.integers(0, len(weights)))])
        label = f"case {case}: alpha={alpha}, beta={beta}"
        try:
            lhs = poisson_bracket(alpha_lift(f, alpha), alpha_lift(g, beta))
            rhs = alpha_lift(transported_bracket(f, g, alpha, beta), alpha + beta - 1)
            residual = lhs - rhs
            report.add(label, residual.is_zero(), None if residual.is_zero() else residual.to_text(),
                       f=f.to_text(), g=g.to_text())
        except SymbolicError as e:
            report.record_error(label, e)
    return report


def tilde_transport_check(n: int, cases: int = 30, seed: int = 7) -> Report:
    return transport_check(n, cases, seed, weights=(1,))


def _multi_indices(n: int) -> List[tuple]:
    odd = TWISTED[n].odd
    subsets = [()]
    for name in odd:
        subsets += [s + (name,) for s in subsets]
    return subsets


def primary_field_check(n: int, weights: Sequence = DEFAULT_WEIGHTS,
                        indices: Optional[Sequence[int]] = None) -> Report:
    """
    Lifted fields are primary for the Virasoro-like X modes:
    {q^(k+1) p, q^(m+a) p^a theta^I} = (k a - m) q^(k+m+a) p^a theta^I with a = alpha - |I|/2.
    """
    indices = list(indices if indices is not None else range(-2, 3))
    report = Report(f'primary:N={n}', 'alpha-lifted fields are primary of dimension alpha - |I|/2')
    sig = TWISTED[n]
    for alpha in weights:
        alpha = sympy.Rational(alpha)
        for theta in _multi_indices(n):
            a = alpha - half * len(theta)
            for k in indices:
                x_mode = PoissonElement.monomial(sig, 1, q=k + 1, p=1)
                for m in indices:
                    exponent = m + a
                    if not exponent.is_integer:
                        exponent = m + a + half
                        m_eff = m + half
                    else:
                        m_eff = sympy.Integer(m)
                    field = PoissonElement.monomial(sig, 1, q=int(exponent), p=a, theta=theta)
                    expected = PoissonElement.monomial(sig, k * a - m_eff, q=int(exponent) + k, p=a, theta=theta)
                    residual = poisson_bracket(x_mode, field) - expected
                    label = f"alpha={alpha} theta={''.join(theta) or '1'} [X_{k}, A_{m_eff}]"
                    report.add(label, residual.is_zero(), None if residual.is_zero() else residual.to_text())
    return report
