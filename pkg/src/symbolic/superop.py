"""
Graded differential operators with Expr coefficients.

A term ``c * d_{o1} ... d_{ok} * d^alpha`` is stored under the word
``(alpha, (o1, ..., ok))``; the even multi-index ``alpha`` is a sorted tuple of
``(symbol, count)`` pairs and the odd part follows the global Grassmann order.
All derivatives sit to the right of their coefficient.
"""
import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy

from symbolic.errors import IllegalSubstitution, InhomogeneousParity
from symbolic.expr import Expr
from symbolic.registry import is_even, is_odd, odd_rank, sort_grassmann

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EvenWord = Tuple[Tuple[str, int], ...]
Word = Tuple[EvenWord, Tuple[str, ...]]
IDENTITY_WORD: Word = ((), ())


def _bump(even: EvenWord, var: str) -> EvenWord:
    counts = dict(even)
    counts[var] = counts.get(var, 0) + 1
    return tuple(sorted(counts.items()))


def _insert_odd(odd: Tuple[str, ...], var: str) -> Tuple[int, Tuple[str, ...]]:
    if var in odd:
        return 0, ()
    rank = odd_rank(var)
    before = sum(1 for name in odd if odd_rank(name) < rank)
    merged = tuple(sorted(odd + (var,), key=odd_rank))
    return (-1 if before % 2 else 1), merged


def _word_key(word: Word):
    even, odd = word
    return (sum(c for _, c in even) + len(odd), even, [odd_rank(n) for n in odd])


class SuperOperator:
    """Immutable sum of coefficient * derivative-word terms in normal order."""

    __superoperator__ = True
    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Dict[Word, Expr]] = None):
        self._terms: Dict[Word, Expr] = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    @staticmethod
    def _build(pairs: Iterable[Tuple[Word, Expr]]) -> 'SuperOperator':
        acc: Dict[Word, List[Expr]] = {}
        for word, coeff in pairs:
            acc.setdefault(word, []).append(coeff)
        return SuperOperator({w: Expr.sum(cs) for w, cs in acc.items()})

    # ---- construction -------------------------------------------------

    @staticmethod
    def zero() -> 'SuperOperator':
        return SuperOperator()

    @staticmethod
    def identity() -> 'SuperOperator':
        return SuperOperator.multiplication(1)

    @staticmethod
    def multiplication(coeff: Any) -> 'SuperOperator':
        return SuperOperator({IDENTITY_WORD: Expr.coerce(coeff)})

    @staticmethod
    def d(*names: str) -> 'SuperOperator':
        """Product of partial derivatives ``d_{names[0]} d_{names[1]} ...``."""
        even: EvenWord = ()
        odd_names = []
        for name in names:
            if is_odd(name):
                odd_names.append(name)
            elif is_even(name):
                even = _bump(even, name)
            else:
                raise IllegalSubstitution(f"Cannot differentiate by '{name}'")
        sign, odd = sort_grassmann(tuple(odd_names))
        if sign == 0:
            return SuperOperator.zero()
        return SuperOperator({(even, odd): Expr.coeff(sign)})

    @staticmethod
    def term(coeff: Any, *names: str) -> 'SuperOperator':
        return Expr.coerce(coeff) * SuperOperator.d(*names)

    @staticmethod
    def sum(items: Iterable['SuperOperator']) -> 'SuperOperator':
        pairs = []
        for item in items:
            pairs.extend(item._terms.items())
        return SuperOperator._build(pairs)

    # ---- inspection ---------------------------------------------------

    @property
    def terms(self) -> Dict[Word, Expr]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def order(self) -> int:
        return max((sum(c for _, c in w[0]) + len(w[1]) for w in self._terms), default=0)

    def parity(self) -> Optional[int]:
        parities = set()
        for (_, odd), coeff in self._terms.items():
            p = coeff.parity()
            if p is None:
                return None
            parities.add((p + len(odd)) % 2)
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None

    # ---- arithmetic ---------------------------------------------------

    def __add__(self, other: Any) -> 'SuperOperator':
        if not isinstance(other, SuperOperator):
            other = SuperOperator.multiplication(other)
        return SuperOperator._build(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> 'SuperOperator':
        return SuperOperator({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: Any) -> 'SuperOperator':
        if not isinstance(other, SuperOperator):
            other = SuperOperator.multiplication(other)
        return self + (-other)

    def __rsub__(self, other: Any) -> 'SuperOperator':
        return SuperOperator.multiplication(other) - self

    def left_multiply(self, coeff: Any) -> 'SuperOperator':
        coeff = Expr.coerce(coeff)
        return SuperOperator._build((w, coeff * c) for w, c in self._terms.items())

    def __rmul__(self, other: Any) -> 'SuperOperator':
        return self.left_multiply(other)

    def __mul__(self, other: Any) -> 'SuperOperator':
        if isinstance(other, SuperOperator):
            return self.compose(other)
        if isinstance(other, (int, sympy.Rational)) or (isinstance(other, sympy.Expr) and other.is_number):
            return self.left_multiply(other)
        return self.compose(SuperOperator.multiplication(other))

    def __truediv__(self, other: Any) -> 'SuperOperator':
        return SuperOperator({w: c / other for w, c in self._terms.items()})

    def __pow__(self, k: int) -> 'SuperOperator':
        result = SuperOperator.identity()
        for _ in range(k):
            result = result.compose(self)
        return result

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, SuperOperator):
            other = SuperOperator.multiplication(other)
        return op_equal(self, other)

    __hash__ = None

    # ---- calculus -----------------------------------------------------

    def apply(self, e: Any, rewrite: bool = True, strict: bool = False) -> Expr:
        """
        Act on an expression.

        :param e: target expression
        :param rewrite: apply derivative rules of formal functions
        :param strict: reject derivatives of functions without a rule
        :return: sum of coefficient * iterated derivative
        """
        e = Expr.coerce(e)
        pieces = []
        for (even, odd), coeff in self._terms.items():
            value = e
            for name, count in even:
                for _ in range(count):
                    value = value.partial(name, rewrite=rewrite, strict=strict)
            for name in reversed(odd):
                value = value.partial(name)
            if not value.is_zero():
                pieces.append(coeff * value)
        return Expr.sum(pieces)

    def _derive_left(self, var: str) -> 'SuperOperator':
        """``d_var o self`` in normal order."""
        pairs = []
        if is_odd(var):
            for (even, odd), coeff in self._terms.items():
                dc = coeff.partial(var)
                if not dc.is_zero():
                    pairs.append(((even, odd), dc))
                sign, merged = _insert_odd(odd, var)
                if sign:
                    graded = coeff.even_part() - coeff.odd_part()
                    pairs.append(((even, merged), graded * sign))
        else:
            for (even, odd), coeff in self._terms.items():
                dc = coeff.partial(var)
                if not dc.is_zero():
                    pairs.append(((even, odd), dc))
                pairs.append(((_bump(even, var), odd), coeff))
        return SuperOperator._build(pairs)

    def compose(self, other: 'SuperOperator') -> 'SuperOperator':
        """Operator product ``self o other``."""
        results = []
        for (even, odd), coeff in self._terms.items():
            current = other
            for name, count in even:
                for _ in range(count):
                    current = current._derive_left(name)
            for name in reversed(odd):
                current = current._derive_left(name)
            results.append(current.left_multiply(coeff))
        return SuperOperator.sum(results)

    def substitute(self, bindings: Dict[str, Any]) -> 'SuperOperator':
        """Substitute parameters and constants inside the coefficients."""
        return SuperOperator._build((w, c.substitute(bindings)) for w, c in self._terms.items())

    def rename(self, even_names: Dict[str, str], odd_names: Dict[str, str],
               params: Optional[Dict[str, Any]] = None) -> 'SuperOperator':
        """Move the operator to another coordinate set (used for multi-point actions)."""
        bindings: Dict[str, Any] = {old: sympy.Symbol(new) for old, new in even_names.items()}
        bindings.update({old: Expr.odd(new) for old, new in odd_names.items()})
        bindings.update(params or {})
        pairs = []
        for (even, odd), coeff in self._terms.items():
            new_even: EvenWord = ()
            for name, count in even:
                for _ in range(count):
                    new_even = _bump(new_even, even_names.get(name, name))
            sign, new_odd = sort_grassmann(tuple(odd_names.get(n, n) for n in odd))
            if sign == 0:
                continue
            pairs.append(((new_even, new_odd), coeff.substitute(bindings) * sign))
        return SuperOperator._build(pairs)

    # ---- serialization ------------------------------------------------

    def _sorted(self) -> List[Tuple[Word, Expr]]:
        return sorted(self._terms.items(), key=lambda item: _word_key(item[0]))

    @staticmethod
    def _word_text(word: Word) -> str:
        even, odd = word
        parts = [f"∂_{n}" for n in odd]
        for name, count in even:
            parts.append(f"∂_{name}" if count == 1 else f"∂_{name}^{count}")
        return "".join(parts)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        chunks = []
        for word, coeff in self._sorted():
            if word == IDENTITY_WORD:
                chunks.append(coeff.to_text())
                continue
            c_text = coeff.to_text()
            if c_text == "1":
                chunks.append(self._word_text(word))
            elif c_text == "-1":
                chunks.append("-" + self._word_text(word))
            else:
                prefix = f"({c_text})" if len(coeff) > 1 else c_text
                chunks.append(f"{prefix}{self._word_text(word)}")
        return " + ".join(chunks).replace("+ -", "- ")

    def to_json(self) -> List[Dict[str, Any]]:
        return [{'coeff': coeff.to_json(), 'even': {n: c for n, c in word[0]}, 'odd': list(word[1])}
                for word, coeff in self._sorted()]

    def __repr__(self) -> str:
        return f"SuperOperator({self.to_text()})"

    __str__ = to_text


def op_equal(a: SuperOperator, b: SuperOperator) -> bool:
    return (a - b).is_zero()


def supercommutator(a, b):
    """``[a, b] = ab - (-1)^{|a||b|} ba`` for homogeneous operators (scalar or matrix)."""
    pa, pb = a.parity(), b.parity()
    if pa is None or pb is None:
        raise InhomogeneousParity(f"supercommutator needs homogeneous operands (parities {pa}, {pb})")
    if isinstance(a, MatrixOperator) or isinstance(b, MatrixOperator):
        a, b = MatrixOperator.coerce(a), MatrixOperator.coerce(b)
    ab = a.compose(b)
    ba = b.compose(a)
    return ab + ba if pa and pb else ab - ba


def D(*names: str) -> SuperOperator:
    return SuperOperator.d(*names)


def mult(coeff: Any) -> SuperOperator:
    return SuperOperator.multiplication(coeff)


class MatrixOperator:
    """2x2 matrix of SuperOperators acting on a two-component field."""

    __superoperator__ = True

    def __init__(self, entries: Sequence[Sequence[Any]]):
        if len(entries) != 2 or any(len(row) != 2 for row in entries):
            raise IllegalSubstitution("MatrixOperator needs a 2x2 entry list")
        self.entries: Tuple[Tuple[SuperOperator, ...], ...] = tuple(
            tuple(e if isinstance(e, SuperOperator) else mult(e) for e in row) for row in entries
        )

    @staticmethod
    def scalar(op: Any) -> 'MatrixOperator':
        op = op if isinstance(op, SuperOperator) else mult(op)
        return MatrixOperator([[op, SuperOperator.zero()], [SuperOperator.zero(), op]])

    @staticmethod
    def coerce(value: Any) -> 'MatrixOperator':
        return value if isinstance(value, MatrixOperator) else MatrixOperator.scalar(value)

    def __getitem__(self, index: Tuple[int, int]) -> SuperOperator:
        i, j = index
        return self.entries[i][j]

    def _map(self, fn) -> 'MatrixOperator':
        return MatrixOperator([[fn(self.entries[i][j]) for j in range(2)] for i in range(2)])

    def __add__(self, other: Any) -> 'MatrixOperator':
        other = MatrixOperator.coerce(other)
        return MatrixOperator([[self.entries[i][j] + other.entries[i][j] for j in range(2)] for i in range(2)])

    __radd__ = __add__

    def __neg__(self) -> 'MatrixOperator':
        return self._map(lambda e: -e)

    def __sub__(self, other: Any) -> 'MatrixOperator':
        return self + (-MatrixOperator.coerce(other))

    def __rmul__(self, other: Any) -> 'MatrixOperator':
        return self._map(lambda e: e.left_multiply(other))

    def __mul__(self, other: Any) -> 'MatrixOperator':
        if isinstance(other, (SuperOperator, MatrixOperator)):
            return self.compose(other)
        return self._map(lambda e: e * other)

    def compose(self, other: Any) -> 'MatrixOperator':
        other = MatrixOperator.coerce(other)
        return MatrixOperator([
            [self.entries[i][0].compose(other.entries[0][j]) + self.entries[i][1].compose(other.entries[1][j])
             for j in range(2)]
            for i in range(2)
        ])

    def parity(self) -> Optional[int]:
        parities = {e.parity() for row in self.entries for e in row if not e.is_zero()}
        if not parities:
            return 0
        if None in parities or len(parities) > 1:
            return None
        return parities.pop()

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def apply(self, vector: Sequence[Any], **kwargs) -> Tuple[Expr, Expr]:
        return tuple(
            self.entries[i][0].apply(vector[0], **kwargs) + self.entries[i][1].apply(vector[1], **kwargs)
            for i in range(2)
        )

    def substitute(self, bindings: Dict[str, Any]) -> 'MatrixOperator':
        return self._map(lambda e: e.substitute(bindings))

    def rename(self, even_names, odd_names, params=None) -> 'MatrixOperator':
        return self._map(lambda e: e.rename(even_names, odd_names, params))

    def __eq__(self, other: Any) -> bool:
        return (self - MatrixOperator.coerce(other)).is_zero()

    __hash__ = None

    def to_text(self) -> str:
        rows = ["[" + ", ".join(e.to_text() for e in row) + "]" for row in self.entries]
        return "[" + ", ".join(rows) + "]"

    def to_json(self) -> List[List[Any]]:
        return [[e.to_json() for e in row] for row in self.entries]

    def __repr__(self) -> str:
        return f"MatrixOperator({self.to_text()})"

    __str__ = to_text
