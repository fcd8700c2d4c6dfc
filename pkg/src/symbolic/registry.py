import logging
import os
import threading
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import sympy

from symbolic.errors import IllegalSubstitution

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Commuting coordinates and masses; these are the only symbols partial() differentiates.
EVEN_SYMBOLS = [
    't', 'r', 'zeta', 'M', 'Mp',
    't_1', 'r_1', 'zeta_1', 'M_1',
    't_2', 'r_2', 'zeta_2', 'M_2',
    'q', 'p', 'q_1', 'p_1', 'q_2', 'p_2',
]

# Exponent parameters: exponents are affine in these with rational coefficients.
PARAMS = ['x', 'x_1', 'x_2', 'nu', 'nu_1', 'nu_2', 'mu']

# Free normalization constants of closed forms.
CONSTANTS = ['psi0', 'phi0', 'c1', 'c2', 'a0', 'd0', 'alpha', 'beta']

# Global Grassmann order.
_ODD_ORDER: List[str] = [
    'theta1', 'theta2',
    'theta_1', 'thetabar_1', 'theta_2', 'thetabar_2',
    'theta', 'thetabar',
]


@lru_cache(maxsize=None)
def sym(name: str) -> sympy.Symbol:
    return sympy.Symbol(name)


def is_even(name: str) -> bool:
    return name in EVEN_SYMBOLS


def is_param(name: str) -> bool:
    return name in PARAMS


def is_constant(name: str) -> bool:
    return name in CONSTANTS


def is_odd(name: str) -> bool:
    return name in _ODD_ORDER


def odd_rank(name: str) -> int:
    try:
        return _ODD_ORDER.index(name)
    except ValueError:
        raise IllegalSubstitution(f"'{name}' is not a registered odd variable")


def merge_grassmann(a: Tuple[str, ...], b: Tuple[str, ...]) -> Tuple[int, Tuple[str, ...]]:
    """
    Product of two canonically ordered Grassmann monomials.

    :return: (sign, canonical factors); sign is 0 when a factor repeats.
    """
    if not a or not b:
        return 1, a + b
    if set(a) & set(b):
        return 0, ()
    ranks_b = [odd_rank(n) for n in b]
    inversions = 0
    for name in a:
        ra = odd_rank(name)
        inversions += sum(1 for rb in ranks_b if rb < ra)
    merged = tuple(sorted(a + b, key=odd_rank))
    return (-1 if inversions % 2 else 1), merged


def sort_grassmann(factors: Tuple[str, ...]) -> Tuple[int, Tuple[str, ...]]:
    """Canonical reordering of an arbitrary factor list with its permutation sign."""
    if len(set(factors)) != len(factors):
        return 0, ()
    items = list(factors)
    sign = 1
    # insertion sort keeps the transposition count
    for i in range(1, len(items)):
        j = i
        while j > 0 and odd_rank(items[j - 1]) > odd_rank(items[j]):
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


class BaseRegistry:
    """
    Interned power bases: primitive irreducible polynomials with positive leading
    coefficient, prime numbers and the sign base -1.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._by_key: Dict[sympy.Expr, int] = {}
        self._polys: List[sympy.Expr] = []
        self._names: List[str] = []
        self._derivatives: Dict[Tuple[int, str], sympy.Expr] = {}
        for name in EVEN_SYMBOLS:
            self.intern(sym(name), name)
        t, r, zeta = sym('t'), sym('r'), sym('zeta')
        self.intern(4 * zeta * t + r ** 2, 'u')
        t12 = sym('t_1') - sym('t_2')
        r12 = sym('r_1') - sym('r_2')
        zeta12 = sym('zeta_1') - sym('zeta_2')
        self.intern(t12, 't12')
        self.intern(r12, 'r12')
        self.intern(zeta12, 'zeta12')
        self.intern(4 * zeta12 * t12 + r12 ** 2, 'u12')
        self.intern(sympy.Integer(-1), '-1')
        logger.info("BaseRegistry initialized")

    def intern(self, polynomial: sympy.Expr, name: Optional[str] = None) -> int:
        key = sympy.expand(polynomial)
        with self._lock:
            if key in self._by_key:
                return self._by_key[key]
            index = len(self._polys)
            self._by_key[key] = index
            self._polys.append(key)
            self._names.append(name or f"({key})")
            return index

    def polynomial(self, index: int) -> sympy.Expr:
        return self._polys[index]

    def name(self, index: int) -> str:
        return self._names[index]

    def is_constant(self, index: int) -> bool:
        return self._polys[index].is_number

    def derivative(self, index: int, var: str) -> sympy.Expr:
        key = (index, var)
        cached = self._derivatives.get(key)
        if cached is None:
            cached = sympy.diff(self._polys[index], sym(var))
            with self._lock:
                self._derivatives[key] = cached
        return cached

    def sort_key(self, index: int) -> str:
        return self._names[index]


BASES = BaseRegistry()
