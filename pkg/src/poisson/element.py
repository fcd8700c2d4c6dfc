"""
Poisson superalgebra elements: polynomials in q_i, p_i (half-integer powers of p in the
twisted case) and Grassmann variables, with the bracket

    {f, g} = sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i) - (-1)^delta(f) sum_ij eta^ij d_i f d_j g

using left Grassmann derivatives.
"""
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy

from symbolic.errors import (
    GradeTooHigh, Inhomogeneous, InhomogeneousParity, SignatureMismatch,
)
from symbolic.registry import merge_grassmann, odd_rank

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)


@dataclass(frozen=True)
class Signature:
    name: str
    m: int
    odd: Tuple[str, ...]
    eta: Tuple[Tuple[sympy.Rational, ...], ...]
    twisted: bool = False

    @property
    def q_names(self) -> Tuple[str, ...]:
        return ('q',) if self.m == 1 else tuple(f'q_{i + 1}' for i in range(self.m))

    @property
    def p_names(self) -> Tuple[str, ...]:
        return ('p',) if self.m == 1 else tuple(f'p_{i + 1}' for i in range(self.m))


def _eta(rows: Sequence[Sequence[int]]) -> Tuple[Tuple[sympy.Rational, ...], ...]:
    return tuple(tuple(sympy.Rational(v) for v in row) for row in rows)


# Supersymmetric (3|2) conventions: {theta1, theta2} = 2
P22 = Signature('P(2|2)', 1, ('theta1', 'theta2'), _eta([[0, 2], [2, 0]]))
P42 = Signature('P(4|2)', 2, ('theta1', 'theta2'), _eta([[0, 2], [2, 0]]))
# Twisted algebras; N=2 uses the complex pair (theta, thetabar) with {theta, thetabar} = 1
TWISTED = {
    0: Signature('P~(2|0)', 1, (), (), True),
    1: Signature('P~(2|1)', 1, ('theta',), _eta([[1]]), True),
    2: Signature('P~(2|2)', 1, ('theta', 'thetabar'), _eta([[0, 1], [1, 0]]), True),
}

GRADE_WEIGHTS = {
    'gra': {'q': 0, 'p': 1, 'theta': half},
    'tildedeg': {'q': half, 'p': half, 'theta': half},
}

MonoKey = Tuple[Tuple[int, ...], Tuple[sympy.Rational, ...], Tuple[str, ...]]


class PoissonElement:
    """Immutable element of a (possibly twisted) Poisson superalgebra."""

    __slots__ = ('signature', '_terms')

    def __init__(self, signature: Signature, terms: Optional[Dict[MonoKey, sympy.Expr]] = None):
        self.signature = signature
        self._terms: Dict[MonoKey, sympy.Expr] = {}
        for key, coeff in (terms or {}).items():
            coeff = sympy.nsimplify(coeff) if isinstance(coeff, float) else sympy.sympify(coeff)
            coeff = sympy.expand(coeff)
            if coeff != 0:
                self._check_key(key)
                self._terms[key] = coeff

    def _check_key(self, key: MonoKey):
        qs, ps, grass = key
        sig = self.signature
        if len(qs) != sig.m or len(ps) != sig.m:
            raise SignatureMismatch(f"monomial {key} does not fit {sig.name}")
        if any(not sympy.Rational(a).is_integer for a in qs):
            raise SignatureMismatch(f"q exponents must be integers in {sig.name}")
        for b in ps:
            b = sympy.Rational(b)
            if not (b.is_integer or (sig.twisted and (2 * b).is_integer)):
                raise SignatureMismatch(f"p exponent {b} not allowed in {sig.name}")
        if any(name not in sig.odd for name in grass):
            raise SignatureMismatch(f"odd variables {grass} not in {sig.name}")

    # ---- construction -------------------------------------------------

    @staticmethod
    def monomial(signature: Signature, coeff: Any = 1, q: Any = 0, p: Any = 0,
                 theta: Iterable[str] = ()) -> 'PoissonElement':
        qs = tuple(int(a) for a in (q if isinstance(q, (tuple, list)) else (q,) * 1))
        ps = tuple(sympy.Rational(b) for b in (p if isinstance(p, (tuple, list)) else (p,)))
        if signature.m == 2 and len(qs) == 1:
            raise SignatureMismatch("two-pair signatures need exponent tuples")
        sign = 1
        grass: Tuple[str, ...] = ()
        for name in theta:
            s, grass = merge_grassmann(grass, (name,))
            sign *= s
        if sign == 0:
            return PoissonElement(signature)
        return PoissonElement(signature, {(qs, ps, grass): sympy.sympify(coeff) * sign})

    @staticmethod
    def zero(signature: Signature) -> 'PoissonElement':
        return PoissonElement(signature)

    @staticmethod
    def constant(signature: Signature, value: Any = 1) -> 'PoissonElement':
        return PoissonElement.monomial(signature, value, q=(0,) * signature.m, p=(0,) * signature.m)

    @staticmethod
    def variable(signature: Signature, name: str) -> 'PoissonElement':
        zeros = [0] * signature.m
        if name in signature.q_names:
            qs = list(zeros)
            qs[signature.q_names.index(name)] = 1
            return PoissonElement.monomial(signature, 1, q=tuple(qs), p=tuple(zeros))
        if name in signature.p_names:
            ps = list(zeros)
            ps[signature.p_names.index(name)] = 1
            return PoissonElement.monomial(signature, 1, q=tuple(zeros), p=tuple(ps))
        if name in signature.odd:
            return PoissonElement.monomial(signature, 1, q=tuple(zeros), p=tuple(zeros), theta=(name,))
        raise SignatureMismatch(f"'{name}' is not a variable of {signature.name}")

    # ---- inspection ---------------------------------------------------

    @property
    def terms(self) -> Dict[MonoKey, sympy.Expr]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def parity(self) -> Optional[int]:
        parities = {len(g) % 2 for (_, _, g) in self._terms}
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None

    def _same(self, other: 'PoissonElement'):
        if not isinstance(other, PoissonElement):
            raise SignatureMismatch(f"expected a PoissonElement, got {type(other).__name__}")
        if other.signature != self.signature:
            raise SignatureMismatch(f"{self.signature.name} vs {other.signature.name}")

    # ---- arithmetic ---------------------------------------------------

    def _combine(self, pairs: Iterable[Tuple[MonoKey, sympy.Expr]]) -> 'PoissonElement':
        acc: Dict[MonoKey, sympy.Expr] = {}
        for key, coeff in pairs:
            acc[key] = acc.get(key, 0) + coeff
        return PoissonElement(self.signature, acc)

    def __add__(self, other: Any) -> 'PoissonElement':
        if not isinstance(other, PoissonElement):
            other = PoissonElement.constant(self.signature, other)
        self._same(other)
        return self._combine(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> 'PoissonElement':
        return PoissonElement(self.signature, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: Any) -> 'PoissonElement':
        if not isinstance(other, PoissonElement):
            other = PoissonElement.constant(self.signature, other)
        return self + (-other)

    def __mul__(self, other: Any) -> 'PoissonElement':
        if not isinstance(other, PoissonElement):
            return PoissonElement(self.signature, {k: c * sympy.sympify(other) for k, c in self._terms.items()})
        self._same(other)
        pairs = []
        for (q1, p1, g1), c1 in self._terms.items():
            for (q2, p2, g2), c2 in other._terms.items():
                sign, grass = merge_grassmann(g1, g2)
                if sign == 0:
                    continue
                key = (tuple(a + b for a, b in zip(q1, q2)), tuple(a + b for a, b in zip(p1, p2)), grass)
                pairs.append((key, c1 * c2 * sign))
        return self._combine(pairs)

    def __rmul__(self, other: Any) -> 'PoissonElement':
        return self * other

    def __pow__(self, k: int) -> 'PoissonElement':
        result = PoissonElement.constant(self.signature)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, PoissonElement):
            other = PoissonElement.constant(self.signature, other)
        return other.signature == self.signature and (self - other).is_zero()

    __hash__ = None

    # ---- calculus -----------------------------------------------------

    def d_even(self, name: str) -> 'PoissonElement':
        sig = self.signature
        pairs = []
        if name in sig.q_names:
            i = sig.q_names.index(name)
            for (qs, ps, g), c in self._terms.items():
                if qs[i]:
                    new_q = qs[:i] + (qs[i] - 1,) + qs[i + 1:]
                    pairs.append(((new_q, ps, g), c * qs[i]))
        elif name in sig.p_names:
            i = sig.p_names.index(name)
            for (qs, ps, g), c in self._terms.items():
                if ps[i]:
                    new_p = ps[:i] + (ps[i] - 1,) + ps[i + 1:]
                    pairs.append(((qs, new_p, g), c * ps[i]))
        else:
            raise SignatureMismatch(f"'{name}' is not an even variable of {sig.name}")
        return self._combine(pairs)

    def d_odd(self, name: str) -> 'PoissonElement':
        pairs = []
        for (qs, ps, g), c in self._terms.items():
            if name in g:
                pos = g.index(name)
                pairs.append(((qs, ps, g[:pos] + g[pos + 1:]), -c if pos % 2 else c))
        return self._combine(pairs)

    def bracket(self, other: 'PoissonElement') -> 'PoissonElement':
        return poisson_bracket(self, other)

    # ---- serialization ------------------------------------------------

    def _sorted(self):
        return sorted(self._terms.items(),
                      key=lambda kv: (tuple(kv[0][1]), kv[0][0], [odd_rank(n) for n in kv[0][2]]))

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        sig = self.signature
        chunks = []
        for (qs, ps, g), c in self._sorted():
            factors = []
            for name, a in zip(sig.q_names, qs):
                if a:
                    factors.append(name if a == 1 else f"{name}^{a}")
            for name, b in zip(sig.p_names, ps):
                if b:
                    factors.append(name if b == 1 else f"{name}^({b})" if not b.is_integer else f"{name}^{b}")
            factors += list(g)
            mono = "*".join(factors)
            c_text = sympy.sstr(c)
            if not mono:
                chunks.append(c_text)
            elif c == 1:
                chunks.append(mono)
            elif c == -1:
                chunks.append(f"-{mono}")
            else:
                chunks.append(f"({c_text})*{mono}" if c.is_Add else f"{c_text}*{mono}")
        return " + ".join(chunks).replace("+ -", "- ")

    def to_json(self) -> List[Dict[str, Any]]:
        return [{'coeff': sympy.sstr(c), 'q': [int(a) for a in qs], 'p': [str(b) for b in ps], 'theta': list(g)}
                for (qs, ps, g), c in self._sorted()]

    def __repr__(self) -> str:
        return f"PoissonElement[{self.signature.name}]({self.to_text()})"

    __str__ = to_text


def poisson_bracket(f: PoissonElement, g: PoissonElement) -> PoissonElement:
    """
    Super Poisson bracket.

    :raises SignatureMismatch: operands from different algebras
    :raises InhomogeneousParity: f mixes even and odd terms
    """
    f._same(g)
    sig = f.signature
    delta = f.parity()
    if delta is None or g.parity() is None:
        raise InhomogeneousParity("Poisson bracket needs parity-homogeneous operands")
    result = PoissonElement.zero(sig)
    for qn, pn in zip(sig.q_names, sig.p_names):
        result = result + f.d_even(qn) * g.d_even(pn) - f.d_even(pn) * g.d_even(qn)
    sign = -1 if delta else 1
    for i, a in enumerate(sig.odd):
        fa = f.d_odd(a)
        if fa.is_zero():
            continue
        for j, b in enumerate(sig.odd):
            if sig.eta[i][j] == 0:
                continue
            result = result - (fa * g.d_odd(b)) * (sign * sig.eta[i][j])
    return result


def _term_grade(sig: Signature, key: MonoKey, which: str) -> sympy.Rational:
    qs, ps, grass = key
    if which == 'delta':
        return sympy.Integer(len(grass) % 2)
    if which == 'deg':
        if sig.m == 1:
            weights_q, weights_p = [half], [half]
        else:
            weights_q, weights_p = [half, 0], [half, 1]
        return (sum(w * a for w, a in zip(weights_q, qs)) + sum(w * b for w, b in zip(weights_p, ps))
                + half * len(grass))
    weights = GRADE_WEIGHTS.get(which)
    if weights is None:
        raise Inhomogeneous(f"Unknown grading '{which}'")
    return weights['q'] * sum(qs) + weights['p'] * sum(ps) + weights['theta'] * len(grass)


def grading(f: PoissonElement, which: str) -> sympy.Rational:
    """
    Grade of a homogeneous element.

    :param which: delta, gra, deg or tildedeg
    :raises Inhomogeneous: terms of different grade
    """
    values = {_term_grade(f.signature, key, which) for key in f.terms}
    if not values:
        return sympy.Integer(0)
    if len(values) > 1:
        raise Inhomogeneous(f"{f} is not homogeneous for {which}: {sorted(values)}")
    return values.pop()


def quotient_project(f: PoissonElement) -> PoissonElement:
    """Representative in P~_{<=1} / P~_{<=-1/2}: drop every term of grade <= -1/2."""
    if not f.signature.twisted:
        raise SignatureMismatch("quotient projection is defined on twisted algebras only")
    kept = {}
    for key, c in f.terms.items():
        grade = _term_grade(f.signature, key, 'gra')
        if grade > 1:
            raise GradeTooHigh(f"term of grade {grade} in {f}")
        if grade > -half:
            kept[key] = c
    return PoissonElement(f.signature, kept)


def projected_bracket(f: PoissonElement, g: PoissonElement) -> PoissonElement:
    return quotient_project(poisson_bracket(quotient_project(f), quotient_project(g)))
