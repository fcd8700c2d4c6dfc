"""
Grassmann-valued symbolic expressions with a canonical form.

A term is ``coeff * prod(base_i ** rep_i) * exp(E) * prod(funcs) * theta_I`` where

- ``coeff`` is a rational function of commuting symbols (kept cancelled),
- ``rep_i`` is an exponent affine in the parameters whose constant part lies in [0, 1)
  (integer parts are absorbed into ``coeff``),
- ``E`` is a rational function,
- ``funcs`` are applications of registered formal functions,
- ``theta_I`` is a Grassmann monomial in the global order.

Two expressions are equal iff their canonical term maps agree, so ``is_zero`` is exact.
"""
import cmath
import logging
import os
import threading
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, Union

import mpmath
import numpy as np
import sympy
from sympy.core.function import AppliedUndef

from symbolic.errors import IllegalSubstitution, OpaqueDerivative, SingularPoint
from symbolic.registry import (
    BASES, CONSTANTS, EVEN_SYMBOLS, PARAMS, is_constant, is_even, is_odd, is_param,
    merge_grassmann, odd_rank, sym,
)

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

Scalar = Union[int, float, sympy.Expr]


def _rational(value: Any) -> sympy.Rational:
    if isinstance(value, float):
        return sympy.Rational(str(value))
    result = sympy.nsimplify(value) if not isinstance(value, (int, sympy.Rational)) else sympy.Rational(value)
    if not result.is_Rational:
        raise IllegalSubstitution(f"Expected a rational number, got {value}")
    return result


@dataclass(frozen=True)
class ExponentForm:
    """Exponent ``const + sum(coeff * param)`` with rational coefficients."""
    const: sympy.Rational = sympy.Integer(0)
    params: Tuple[Tuple[str, sympy.Rational], ...] = ()

    @staticmethod
    def coerce(value: Any) -> 'ExponentForm':
        if isinstance(value, ExponentForm):
            return value
        return ExponentForm.from_sympy(value)

    @staticmethod
    def from_sympy(value: Any) -> 'ExponentForm':
        if isinstance(value, float):
            value = sympy.Rational(str(value))
        e = sympy.expand(sympy.sympify(value))
        stray = [s for s in e.free_symbols if not is_param(str(s))]
        if stray:
            raise IllegalSubstitution(f"Exponent {e} depends on non-parameter symbols {stray}")
        if not e.free_symbols:
            return ExponentForm(_rational(e), ())
        gens = [sym(p) for p in PARAMS]
        poly = sympy.Poly(e, *gens)
        if poly.total_degree() > 1:
            raise IllegalSubstitution(f"Exponent {e} is not affine in the parameters")
        const = _rational(poly.coeff_monomial(1))
        coeffs = []
        for name, g in zip(PARAMS, gens):
            c = poly.coeff_monomial(g)
            if c != 0:
                coeffs.append((name, _rational(c)))
        return ExponentForm(const, tuple(sorted(coeffs)))

    def as_sympy(self) -> sympy.Expr:
        return self.const + sum((c * sym(n) for n, c in self.params), sympy.Integer(0))

    def __add__(self, other: 'ExponentForm') -> 'ExponentForm':
        merged: Dict[str, sympy.Rational] = dict(self.params)
        for name, c in other.params:
            merged[name] = merged.get(name, 0) + c
        return ExponentForm(self.const + other.const,
                            tuple(sorted((n, c) for n, c in merged.items() if c != 0)))

    def __neg__(self) -> 'ExponentForm':
        return self.scale(-1)

    def scale(self, k: Scalar) -> 'ExponentForm':
        k = _rational(k)
        if k == 0:
            return ExponentForm()
        return ExponentForm(self.const * k, tuple((n, c * k) for n, c in self.params))

    def is_zero(self) -> bool:
        return self.const == 0 and not self.params

    def is_integer(self) -> bool:
        return not self.params and self.const.is_Integer

    def split(self) -> Tuple[int, Optional['ExponentForm']]:
        """Integer part and the canonical representative with constant in [0, 1)."""
        k = int(sympy.floor(self.const))
        rep = ExponentForm(self.const - k, self.params)
        return k, (None if rep.is_zero() else rep)

    def to_json(self) -> Dict[str, Any]:
        return {'const': str(self.const), 'params': {n: str(c) for n, c in self.params}}

    def __str__(self) -> str:
        return sympy.sstr(self.as_sympy())


@dataclass(frozen=True)
class RationalKey:
    """Hashable canonical form of a rational function (numerator, monic denominator)."""
    num: sympy.Expr
    den: sympy.Expr

    def as_sympy(self) -> sympy.Expr:
        return self.num / self.den

    def __str__(self) -> str:
        return sympy.sstr(self.as_sympy())


def rational_key(value: Any) -> Optional[RationalKey]:
    e = sympy.cancel(sympy.together(sympy.sympify(value)))
    if e == 0:
        return None
    num, den = sympy.fraction(e)
    num, den = sympy.expand(num), sympy.expand(den)
    gens = sorted(den.free_symbols, key=str)
    lc = sympy.Poly(den, *gens).LC() if gens else den
    if lc != 1:
        num, den = sympy.expand(num / lc), sympy.expand(den / lc)
    return RationalKey(num, den)


def is_plain(value: sympy.Expr) -> bool:
    """True for rational functions of symbols (the coefficient class)."""
    if value.has(sympy.exp) or value.atoms(AppliedUndef):
        return False
    return all(p.exp.is_Integer for p in value.atoms(sympy.Pow))


@dataclass(frozen=True, order=True)
class FuncApp:
    name: str
    arg_text: str
    order: int
    arg: RationalKey

    @staticmethod
    def make(name: str, arg: Any, order: int = 0) -> 'FuncApp':
        key = rational_key(arg)
        if key is None:
            key = RationalKey(sympy.Integer(0), sympy.Integer(1))
        return FuncApp(name, str(key), order, key)

    def __str__(self) -> str:
        prime = "'" * self.order if self.order <= 3 else f"^({self.order})"
        return f"{self.name}{prime}({self.arg_text})"


# Term key: (grassmann, powers, exp, funcs)
TermKey = Tuple[Tuple[str, ...], Tuple[Tuple[int, ExponentForm], ...], Optional[RationalKey], Tuple[FuncApp, ...]]
EMPTY_KEY: TermKey = ((), (), None, ())


def _canon(coeff: sympy.Expr) -> sympy.Expr:
    return sympy.cancel(coeff)


def _check_finite(value: sympy.Expr, what: str) -> sympy.Expr:
    if value.has(sympy.zoo) or value.has(sympy.nan) or value.has(sympy.oo):
        raise SingularPoint(f"{what} is singular after substitution")
    return value


class Expr:
    """Immutable canonical Grassmann-valued expression."""

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Dict[TermKey, sympy.Expr]] = None):
        self._terms: Dict[TermKey, sympy.Expr] = terms or {}

    # ---- construction -------------------------------------------------

    @staticmethod
    def _build(pairs: Iterable[Tuple[TermKey, sympy.Expr]]) -> 'Expr':
        acc: Dict[TermKey, List[sympy.Expr]] = {}
        for key, coeff in pairs:
            if coeff == 0:
                continue
            acc.setdefault(key, []).append(coeff)
        terms = {}
        for key, coeffs in acc.items():
            c = _canon(sympy.Add(*coeffs))
            if c != 0:
                terms[key] = c
        return Expr(terms)

    @staticmethod
    def _single(key: TermKey, coeff: sympy.Expr, powers: Dict[int, ExponentForm]) -> 'Expr':
        """One term whose powers still need splitting into coefficient + representative."""
        rest = []
        for base_id, exponent in powers.items():
            k, rep = exponent.split()
            if k:
                coeff = coeff * BASES.polynomial(base_id) ** k
            if rep is not None:
                rest.append((base_id, rep))
        grass, _, exp_key, funcs = key
        return Expr._build([((grass, tuple(sorted(rest)), exp_key, funcs), coeff)])

    @staticmethod
    def zero() -> 'Expr':
        return Expr()

    @staticmethod
    def one() -> 'Expr':
        return Expr.coeff(1)

    @staticmethod
    def coeff(value: Scalar) -> 'Expr':
        value = sympy.sympify(value)
        if not is_plain(value):
            return Expr.from_sympy(value)
        return Expr._build([(EMPTY_KEY, value)])

    @staticmethod
    def symbol(name: str) -> 'Expr':
        return Expr.coeff(sym(name))

    @staticmethod
    def odd(name: str) -> 'Expr':
        if not is_odd(name):
            raise IllegalSubstitution(f"'{name}' is not a registered odd variable")
        return Expr._build([(((name,), (), None, ()), sympy.Integer(1))])

    @staticmethod
    def exp(arg: Scalar) -> 'Expr':
        arg = sympy.sympify(arg)
        if not is_plain(arg):
            raise IllegalSubstitution(f"Exponential argument {arg} is outside the rational class")
        key = rational_key(arg)
        if key is None:
            return Expr.one()
        return Expr._build([(((), (), key, ()), sympy.Integer(1))])

    @staticmethod
    def func(name: str, arg: Scalar, order: int = 0) -> 'Expr':
        arg = sympy.sympify(arg)
        if not is_plain(arg):
            raise IllegalSubstitution(f"Argument {arg} of {name} is outside the rational class")
        FUNCTIONS.get(name)
        return Expr._build([(((), (), None, (FuncApp.make(name, arg, order),)), sympy.Integer(1))])

    @staticmethod
    def power(base: Scalar, exponent: Any) -> 'Expr':
        """``base ** exponent`` for a rational-function base, factored into interned bases."""
        form = ExponentForm.coerce(exponent)
        base = sympy.cancel(sympy.together(sympy.sympify(base)))
        if not is_plain(base):
            raise IllegalSubstitution(f"Power base {base} is outside the rational class")
        if form.is_integer():
            k = int(form.const)
            if base == 0 and k < 0:
                raise SingularPoint("zero base under a negative power")
            return Expr.coeff(base ** k)
        if base == 0:
            raise SingularPoint("zero base under a symbolic or fractional power")
        num, den = sympy.fraction(base)
        content = sympy.Integer(1)
        powers: Dict[int, ExponentForm] = {}

        def add(base_id: int, mult: Scalar):
            powers[base_id] = powers.get(base_id, ExponentForm()) + form.scale(mult)

        for part, sign in ((num, 1), (den, -1)):
            c, factors = sympy.factor_list(sympy.expand(part))
            content *= c ** sign
            for f, m in factors:
                f = sympy.expand(f)
                gens = sorted(f.free_symbols, key=str)
                if gens and sympy.Poly(f, *gens).LC() < 0:
                    f = sympy.expand(-f)
                    content *= (-1) ** (m * sign)
                add(BASES.intern(f), m * sign)
        content = sympy.Rational(content)
        if content < 0:
            add(BASES.intern(sympy.Integer(-1), '-1'), 1)
            content = -content
        for prime, e in sympy.factorint(content.p).items():
            add(BASES.intern(sympy.Integer(prime), str(prime)), e)
        for prime, e in sympy.factorint(content.q).items():
            add(BASES.intern(sympy.Integer(prime), str(prime)), -e)
        powers = {b: e for b, e in powers.items() if not e.is_zero()}
        return Expr._single(EMPTY_KEY, sympy.Integer(1), powers)

    @staticmethod
    def from_sympy(value: Any) -> 'Expr':
        """Convert a sympy expression built from symbols, powers, exp and formal functions."""
        if isinstance(value, Expr):
            return value
        e = sympy.sympify(value)
        if is_plain(e):
            return Expr._build([(EMPTY_KEY, e)])
        if e.is_Add:
            return Expr.sum(Expr.from_sympy(a) for a in e.args)
        if e.is_Mul:
            result = Expr.one()
            for a in e.args:
                result = result * Expr.from_sympy(a)
            return result
        if e.is_Pow:
            base, exponent = e.as_base_exp()
            if exponent.is_Integer and exponent >= 0:
                return Expr.from_sympy(base) ** int(exponent)
            if is_plain(base):
                return Expr.power(base, exponent)
            if isinstance(base, sympy.exp):
                return Expr.exp(base.args[0] * exponent)
            raise IllegalSubstitution(f"Unsupported power {e}")
        if isinstance(e, sympy.exp):
            return Expr.exp(e.args[0])
        if isinstance(e, AppliedUndef):
            if len(e.args) != 1:
                raise IllegalSubstitution(f"Formal functions take one argument, got {e}")
            return Expr.func(e.func.__name__, e.args[0])
        raise IllegalSubstitution(f"Unsupported expression {e}")

    @staticmethod
    def coerce(value: Any) -> 'Expr':
        if isinstance(value, Expr):
            return value
        return Expr.from_sympy(value)

    @staticmethod
    def sum(items: Iterable['Expr']) -> 'Expr':
        pairs = []
        for item in items:
            pairs.extend(Expr.coerce(item)._terms.items())
        return Expr._build(pairs)

    # ---- inspection ---------------------------------------------------

    @property
    def terms(self) -> Dict[TermKey, sympy.Expr]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __len__(self) -> int:
        return len(self._terms)

    def is_pure_coefficient(self) -> bool:
        return all(key == EMPTY_KEY for key in self._terms)

    def coefficient(self) -> sympy.Expr:
        if not self.is_pure_coefficient():
            raise IllegalSubstitution(f"{self} is not a plain coefficient")
        return self._terms.get(EMPTY_KEY, sympy.Integer(0))

    def parity(self) -> Optional[int]:
        degrees = {len(key[0]) % 2 for key in self._terms}
        if not degrees:
            return 0
        return degrees.pop() if len(degrees) == 1 else None

    def even_part(self) -> 'Expr':
        return Expr({k: c for k, c in self._terms.items() if len(k[0]) % 2 == 0})

    def odd_part(self) -> 'Expr':
        return Expr({k: c for k, c in self._terms.items() if len(k[0]) % 2 == 1})

    def grassmann_components(self) -> Dict[Tuple[str, ...], 'Expr']:
        """Split into even coefficients of each Grassmann monomial."""
        parts: Dict[Tuple[str, ...], Dict[TermKey, sympy.Expr]] = {}
        for (grass, powers, exp_key, funcs), c in self._terms.items():
            parts.setdefault(grass, {})[((), powers, exp_key, funcs)] = c
        return {g: Expr(t) for g, t in sorted(parts.items(), key=lambda kv: [odd_rank(n) for n in kv[0]])}

    def component(self, grass: Tuple[str, ...]) -> 'Expr':
        return self.grassmann_components().get(tuple(grass), Expr.zero())

    def free_symbol_names(self) -> List[str]:
        names = set()
        for (_, powers, exp_key, funcs), c in self._terms.items():
            names |= {str(s) for s in c.free_symbols}
            for base_id, rep in powers:
                names |= {str(s) for s in BASES.polynomial(base_id).free_symbols}
                names |= {n for n, _ in rep.params}
            if exp_key is not None:
                names |= {str(s) for s in exp_key.as_sympy().free_symbols}
            for fa in funcs:
                names |= {str(s) for s in fa.arg.as_sympy().free_symbols}
        return sorted(names)

    def map_coefficients(self, fn: Callable[[sympy.Expr], sympy.Expr]) -> 'Expr':
        return Expr._build((k, fn(c)) for k, c in self._terms.items())

    # ---- arithmetic ---------------------------------------------------

    def __add__(self, other: Any) -> 'Expr':
        if _is_operator(other):
            return NotImplemented
        other = Expr.coerce(other)
        return Expr._build(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> 'Expr':
        return Expr({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: Any) -> 'Expr':
        if _is_operator(other):
            return NotImplemented
        return self + (-Expr.coerce(other))

    def __rsub__(self, other: Any) -> 'Expr':
        return Expr.coerce(other) - self

    def __mul__(self, other: Any) -> 'Expr':
        if _is_operator(other):
            return NotImplemented
        other = Expr.coerce(other)
        pairs = []
        for (g1, p1, e1, f1), c1 in self._terms.items():
            for (g2, p2, e2, f2), c2 in other._terms.items():
                sign, grass = merge_grassmann(g1, g2)
                if sign == 0:
                    continue
                powers: Dict[int, ExponentForm] = dict(p1)
                for base_id, rep in p2:
                    powers[base_id] = powers.get(base_id, ExponentForm()) + rep
                coeff = c1 * c2 * sign
                rest = []
                for base_id, exponent in powers.items():
                    k, rep = exponent.split()
                    if k:
                        coeff = coeff * BASES.polynomial(base_id) ** k
                    if rep is not None:
                        rest.append((base_id, rep))
                if e1 is None:
                    exp_key = e2
                elif e2 is None:
                    exp_key = e1
                else:
                    exp_key = rational_key(e1.as_sympy() + e2.as_sympy())
                funcs = tuple(sorted(f1 + f2))
                pairs.append(((grass, tuple(sorted(rest)), exp_key, funcs), coeff))
        return Expr._build(pairs)

    def __rmul__(self, other: Any) -> 'Expr':
        # scalars commute with everything
        return Expr.coerce(other) * self

    def __truediv__(self, other: Scalar) -> 'Expr':
        other = sympy.sympify(other)
        if not is_plain(other):
            raise IllegalSubstitution(f"Division by {other} is outside the coefficient class")
        return self.map_coefficients(lambda c: c / other)

    def __pow__(self, k: int) -> 'Expr':
        if not isinstance(k, int) or k < 0:
            raise IllegalSubstitution("Expr powers take nonnegative integers; use Expr.power")
        result = Expr.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other: Any) -> bool:
        if _is_operator(other):
            return False
        try:
            return (self - Expr.coerce(other)).is_zero()
        except IllegalSubstitution:
            return False

    __hash__ = None

    # ---- calculus -----------------------------------------------------

    def partial(self, var: str, rewrite: bool = True, strict: bool = False) -> 'Expr':
        """
        Partial derivative.

        :param var: even symbol or odd variable
        :param rewrite: apply registered derivative rules of formal functions
        :param strict: raise OpaqueDerivative instead of keeping a derivative marker
        :return: canonical derivative (left derivative for odd variables)
        """
        if is_odd(var):
            pairs = []
            for (grass, powers, exp_key, funcs), c in self._terms.items():
                if var not in grass:
                    continue
                position = grass.index(var)
                rest = grass[:position] + grass[position + 1:]
                pairs.append(((rest, powers, exp_key, funcs), -c if position % 2 else c))
            return Expr._build(pairs)
        if not (is_even(var) or is_param(var) or is_constant(var)):
            raise IllegalSubstitution(f"Unknown variable '{var}'")
        s = sym(var)
        pieces: List[Expr] = []
        pairs = []
        for key, c in self._terms.items():
            grass, powers, exp_key, funcs = key
            dc = sympy.diff(c, s)
            if dc != 0:
                pairs.append((key, dc))
            for base_id, rep in powers:
                dp = BASES.derivative(base_id, var)
                if dp != 0:
                    pairs.append((key, c * rep.as_sympy() * dp / BASES.polynomial(base_id)))
            if exp_key is not None:
                de = sympy.diff(exp_key.as_sympy(), s)
                if de != 0:
                    pairs.append((key, c * de))
            for index, fa in enumerate(funcs):
                arg = fa.arg.as_sympy()
                da = sympy.diff(arg, s)
                if da == 0:
                    continue
                others = funcs[:index] + funcs[index + 1:]
                definition = FUNCTIONS.get(fa.name)
                if rewrite and fa.order == 0 and definition.rule is not None:
                    base = Expr._build([((grass, powers, exp_key, others), c * da)])
                    pieces.append(base * definition.rule(arg))
                    continue
                if strict and definition.rule is None:
                    raise OpaqueDerivative(f"{fa.name} has no derivative rule")
                bumped = FuncApp(fa.name, fa.arg_text, fa.order + 1, fa.arg)
                pairs.append(((grass, powers, exp_key, tuple(sorted(others + (bumped,)))), c * da))
        return Expr.sum([Expr._build(pairs)] + pieces)

    def substitute(self, bindings: Dict[str, Any]) -> 'Expr':
        """
        Simultaneous substitution.

        Parameters take exponents, numbers or sympy values; even symbols take rational
        functions (plain coefficients); odd variables take odd expressions.
        """
        smap: Dict[sympy.Symbol, sympy.Expr] = {}
        odd_map: Dict[str, Expr] = {}
        for name, value in bindings.items():
            if is_odd(name):
                image = Expr.coerce(value)
                if not image.is_zero() and image.parity() != 1:
                    raise IllegalSubstitution(f"Odd variable {name} bound to a non-odd value")
                odd_map[name] = image
            elif is_param(name) or is_even(name) or is_constant(name):
                if isinstance(value, ExponentForm):
                    value = value.as_sympy()
                if isinstance(value, Expr):
                    if value.parity() != 0 or not value.is_pure_coefficient():
                        raise IllegalSubstitution(f"Even symbol {name} bound to {value}")
                    value = value.coefficient()
                value = sympy.sympify(value)
                if not is_plain(value):
                    raise IllegalSubstitution(f"Binding for {name} is outside the rational class")
                smap[sym(name)] = value
            else:
                raise IllegalSubstitution(f"Unknown variable '{name}'")
        if not smap and not odd_map:
            return self

        def subs(e: sympy.Expr, what: str) -> sympy.Expr:
            if not smap:
                return e
            return _check_finite(e.subs(smap, simultaneous=True), what)

        results: List[Expr] = []
        for (grass, powers, exp_key, funcs), c in self._terms.items():
            term = Expr.coeff(subs(c, 'coefficient'))
            if term.is_zero():
                continue
            for base_id, rep in powers:
                poly = BASES.polynomial(base_id)
                new_poly = subs(poly, 'base')
                new_rep = ExponentForm.from_sympy(subs(rep.as_sympy(), 'exponent'))
                term = term * Expr.power(new_poly, new_rep)
            if exp_key is not None:
                term = term * Expr.exp(subs(exp_key.as_sympy(), 'exponential'))
            for fa in funcs:
                term = term * Expr.func(fa.name, subs(fa.arg.as_sympy(), 'argument'), fa.order)
            for name in grass:
                term = term * odd_map.get(name, Expr.odd(name))
            results.append(term)
        return Expr.sum(results)

    # ---- numerics -----------------------------------------------------

    def eval_numeric(self, point: Optional[Dict[str, Any]] = None,
                     param_values: Optional[Dict[str, Any]] = None,
                     seed: int = 42) -> Dict[Tuple[str, ...], complex]:
        """
        Evaluate the coefficient of each Grassmann monomial.

        Symbols missing from ``point``/``param_values`` are drawn from a seeded generator.
        """
        env = dict(param_values or {})
        env.update(point or {})
        env = sample_environment(self.free_symbol_names(), seed, env)
        values, _ = self._evaluate(env)
        return values

    def evaluate_with_scale(self, env: Dict[str, complex]) -> Tuple[Dict[Tuple[str, ...], complex], float]:
        """Values per Grassmann monomial plus the largest absolute term value."""
        return self._evaluate(env)

    def _evaluate(self, env: Dict[str, complex]) -> Tuple[Dict[Tuple[str, ...], complex], float]:
        subs_map = {sym(n): v for n, v in env.items()}
        values: Dict[Tuple[str, ...], complex] = {}
        scale = 0.0
        for (grass, powers, exp_key, funcs), c in self._terms.items():
            value = _to_complex(c, subs_map)
            for base_id, rep in powers:
                base_value = _to_complex(BASES.polynomial(base_id), subs_map)
                if base_value == 0:
                    raise SingularPoint(f"base {BASES.name(base_id)} vanishes under exponent {rep}")
                value *= base_value ** _to_complex(rep.as_sympy(), subs_map)
            if exp_key is not None:
                value *= cmath.exp(_to_complex(exp_key.as_sympy(), subs_map))
            for fa in funcs:
                definition = FUNCTIONS.get(fa.name)
                if definition.numeric is None:
                    raise OpaqueDerivative(f"{fa.name} has no numeric evaluator")
                value *= complex(definition.numeric(_to_complex(fa.arg.as_sympy(), subs_map), fa.order, env))
            values[grass] = values.get(grass, 0j) + value
            scale = max(scale, abs(value))
        return values, scale

    # ---- serialization ------------------------------------------------

    def _sorted_items(self) -> List[Tuple[TermKey, sympy.Expr]]:
        def order(item):
            (grass, powers, exp_key, funcs), c = item
            return ([odd_rank(n) for n in grass], [(BASES.sort_key(b), str(r)) for b, r in powers],
                    str(exp_key), [str(f) for f in funcs], sympy.sstr(c))
        return sorted(self._terms.items(), key=order)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (grass, powers, exp_key, funcs), c in self._sorted_items():
            factors = []
            c_text = sympy.sstr(c)
            if c != 1 or not (powers or exp_key or funcs or grass):
                factors.append(f"({c_text})" if (c.is_Add or c.could_extract_minus_sign() and len(parts)) else c_text)
            factors += [f"{BASES.name(b)}^({r})" for b, r in powers]
            if exp_key is not None:
                factors.append(f"exp({exp_key})")
            factors += [str(f) for f in funcs]
            factors += list(grass)
            parts.append("*".join(factors))
        return " + ".join(parts)

    def to_json(self) -> List[Dict[str, Any]]:
        out = []
        for (grass, powers, exp_key, funcs), c in self._sorted_items():
            out.append({
                'coeff': sympy.sstr(c),
                'powers': [{'base': BASES.name(b), 'exponent': r.to_json()} for b, r in powers],
                'exp': None if exp_key is None else str(exp_key),
                'funcs': [{'name': f.name, 'arg': f.arg_text, 'order': f.order} for f in funcs],
                'grassmann': list(grass),
            })
        return out

    def __repr__(self) -> str:
        return f"Expr({self.to_text()})"

    __str__ = to_text


def _is_operator(value: Any) -> bool:
    return hasattr(value, '__superoperator__')


def _to_complex(value: sympy.Expr, subs_map: Dict[sympy.Symbol, Any]) -> complex:
    if value.is_number:
        return complex(value)
    result = value.xreplace({k: sympy.sympify(v) for k, v in subs_map.items() if k in value.free_symbols})
    result = sympy.N(result)
    if result.free_symbols:
        raise SingularPoint(f"no numeric value for {sorted(map(str, result.free_symbols))}")
    if result.has(sympy.zoo) or result.has(sympy.nan):
        raise SingularPoint(f"{value} is singular at the sample point")
    return complex(result)


SAMPLE_RANGES = {'default': (1.5, 3.0), 'second_point': (0.25, 1.0)}


def sample_environment(names: Iterable[str], seed: int = 42,
                       fixed: Optional[Dict[str, Any]] = None) -> Dict[str, complex]:
    """
    Deterministic sample values; second-point symbols (suffix ``_2``) are drawn from a
    lower range so that point differences stay away from zero.
    """
    rng = np.random.default_rng(seed)
    env: Dict[str, complex] = {}
    fixed = fixed or {}
    for name in sorted(set(names) | set(fixed)):
        if name in fixed:
            env[name] = complex(fixed[name])
            continue
        low, high = SAMPLE_RANGES['second_point' if name.endswith('_2') else 'default']
        env[name] = complex(rng.uniform(low, high))
    return env


# ---- formal functions ---------------------------------------------------

@dataclass
class FormalFuncDef:
    name: str
    rule: Optional[Callable[[sympy.Expr], Expr]] = None
    numeric: Optional[Callable[[complex, int, Dict[str, complex]], complex]] = None


class FunctionRegistry:
    """Formal functions with optional first-derivative rules and numeric evaluators"""

    def __init__(self):
        self._lock = threading.Lock()
        self._defs: Dict[str, FormalFuncDef] = {}
        logger.info("FunctionRegistry initialized")

    def register(self, name: str, rule=None, numeric=None) -> FormalFuncDef:
        with self._lock:
            definition = FormalFuncDef(name, rule, numeric)
            self._defs[name] = definition
            return definition

    def get(self, name: str) -> FormalFuncDef:
        try:
            return self._defs[name]
        except KeyError:
            raise IllegalSubstitution(f"Unknown formal function '{name}'")

    def names(self) -> List[str]:
        return sorted(self._defs)


FUNCTIONS = FunctionRegistry()


def _h1_rule(v: sympy.Expr) -> Expr:
    return Expr.func('h2', v) * (-sym('M_1'))


def _h2_rule(v: sympy.Expr) -> Expr:
    return Expr.func('h1', v) * sym('M_2') + Expr.func('h2', v) * ((sym('x_1') - sym('x_2')) / v)


def _bessel_parts(env: Dict[str, complex]):
    m1, m2 = mpmath.mpc(env['M_1']), mpmath.mpc(env['M_2'])
    x1 = mpmath.mpc(env['x_1'])
    x2 = mpmath.mpc(env['x_2']) if 'x_2' in env else 1 - x1
    mu = (x2 - x1 - 1) / 2
    mass = mpmath.sqrt(m1 * m2)
    a = mpmath.mpc(env.get('alpha', 1))
    b = mpmath.mpc(env.get('beta', 1))
    return m1, m2, mu, mass, a, b


def bessel_h1(v, env: Dict[str, complex]):
    _, _, mu, mass, a, b = _bessel_parts(env)
    return (a * (mass * v / 2) ** (-mu) * mpmath.besselj(mu, mass * v)
            + b * (mass / (2 * v)) ** mu * mpmath.besselj(-mu, mass * v))


def bessel_h2(v, env: Dict[str, complex]):
    m1, m2, mu, mass, a, b = _bessel_parts(env)
    return mpmath.sqrt(m2 / m1) * (a * (mass * v / 2) ** (-mu) * mpmath.besselj(mu + 1, mass * v)
                                   - b * (mass / (2 * v)) ** mu * mpmath.besselj(-mu - 1, mass * v))


def _numeric(fn):
    def evaluate(arg: complex, order: int, env: Dict[str, complex]) -> complex:
        with mpmath.workdps(30):
            if order == 0:
                return complex(fn(mpmath.mpc(arg), env))
            return complex(mpmath.diff(lambda v: fn(v, env), mpmath.mpc(arg), order))
    return evaluate


FUNCTIONS.register('h1', rule=_h1_rule, numeric=_numeric(bessel_h1))
FUNCTIONS.register('h2', rule=_h2_rule, numeric=_numeric(bessel_h2))
FUNCTIONS.register('f')
FUNCTIONS.register('h')

