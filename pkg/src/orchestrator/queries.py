"""
Ad-hoc queries shared by the command line and the HTTP API: brackets, tables, grades and root data.
"""
import logging
import os
from typing import Any, Dict, List, Optional

import pandas as pd
import sympy
from sympy.parsing.sympy_parser import parse_expr

from algebra.realizations import load_realization, parse_window, realization_names
from algebra.roots import root_data, roots_frame
from algebra.tables import BracketTable, Combination, bracket, check_closure, load_golden
from poisson.element import P22, P42, TWISTED, PoissonElement, Signature, grading
from poisson.sns import mode_bracket, sns_mode_table
from symbolic.errors import Inhomogeneous, SignatureMismatch, UnknownRealization
from utils.labels import pretty_label

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

SNS_ALGEBRAS = {'sns0': 0, 'sns1': 1, 'sns2': 2}

ELEMENT_SIGNATURES: Dict[str, Signature] = {
    'P22': P22,
    'P42': P42,
    'P~20': TWISTED[0],
    'P~21': TWISTED[1],
    'P~22': TWISTED[2],
}

GRADINGS = ('delta', 'gra', 'deg', 'tildedeg')


def algebra_names() -> List[str]:
    return realization_names() + sorted(SNS_ALGEBRAS)


def combination_text(combo: Optional[Combination], pretty: bool = False) -> str:
    if combo is None:
        return 'outside the basis'
    parts = []
    for label, coeff in sorted(combo.items()):
        coeff = sympy.simplify(coeff)
        if coeff == 0:
            continue
        name = pretty_label(label) if pretty else label
        if coeff == 1:
            parts.append(name)
        elif coeff == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"({sympy.sstr(coeff)})*{name}")
    return ' + '.join(parts).replace('+ -', '- ') or '0'


def bracket_query(algebra: str, a: str, b: str) -> Dict[str, Any]:
    """
    Bracket of two labelled generators of a realization or of a sns(N) mode algebra.

    :raises UnknownRealization: unknown algebra name
    :raises UnknownLabel: unknown generator label
    """
    if algebra in SNS_ALGEBRAS:
        combo: Optional[Combination] = mode_bracket(SNS_ALGEBRAS[algebra], a, b)
        operator_text = None
    else:
        realization = load_realization(algebra)
        operator, combo = bracket(realization, a, b)
        operator_text = operator.to_text()
    logger.debug(f"[{a}, {b}] in {algebra} = {combination_text(combo)}")
    return {
        'algebra': algebra,
        'pair': [a, b],
        'result': combination_text(combo),
        'pretty': combination_text(combo, pretty=True),
        'coefficients': None if combo is None else {k: sympy.sstr(v) for k, v in sorted(combo.items())},
        'operator': operator_text,
    }


def table_query(algebra: str, window: Optional[str] = None) -> BracketTable:
    parsed = parse_window(window) if window else None
    if algebra in SNS_ALGEBRAS:
        return sns_mode_table(SNS_ALGEBRAS[algebra], parsed)
    if algebra not in realization_names():
        raise UnknownRealization(f"Unknown algebra '{algebra}'. Known: {algebra_names()}")
    realization = load_realization(algebra, parsed)
    golden = load_golden(realization.golden) if realization.golden else None
    return check_closure(realization, golden)


def parse_element(text: str, signature: str = 'P22') -> PoissonElement:
    """
    Read a polynomial such as ``q**2*p*theta1 - 2*p**(1/2)`` as an element of a Poisson superalgebra.

    Odd variables keep the order in which they are written.

    :param signature: key of ELEMENT_SIGNATURES
    :raises SignatureMismatch: unknown signature, variable or exponent
    """
    sig = ELEMENT_SIGNATURES.get(signature)
    if sig is None:
        raise SignatureMismatch(f"Unknown signature '{signature}'. Known: {sorted(ELEMENT_SIGNATURES)}")
    even = {name: sympy.Symbol(name) for name in sig.q_names + sig.p_names}
    odd = {name: sympy.Symbol(name, commutative=False) for name in sig.odd}
    try:
        expr = sympy.expand(parse_expr(text, local_dict={**even, **odd}, evaluate=True))
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        raise SignatureMismatch(f"Cannot parse element {text!r}: {e}")

    result = PoissonElement.zero(sig)
    for term in sympy.Add.make_args(expr):
        commuting, ordered = term.args_cnc()
        theta: List[str] = []
        vanishes = False
        for factor in ordered:
            base, exponent = factor.as_base_exp()
            if str(base) not in odd:
                raise SignatureMismatch(f"'{base}' is not an odd variable of {sig.name}")
            if exponent != 1:
                vanishes = True
            theta.append(str(base))
        if vanishes:
            continue
        coeff, rest = sympy.Mul(*commuting).as_independent(*even.values(), as_Add=False)
        if coeff.free_symbols:
            raise SignatureMismatch(f"'{coeff}' involves symbols outside {sig.name}")
        powers = rest.as_powers_dict()
        qs = tuple(powers.get(even[name], 0) for name in sig.q_names)
        ps = tuple(powers.get(even[name], 0) for name in sig.p_names)
        if any(not sympy.Rational(a).is_integer for a in qs):
            raise SignatureMismatch(f"q exponents must be integers, got {qs}")
        result = result + PoissonElement.monomial(sig, coeff, q=qs, p=ps, theta=theta)
    return result


def grade_query(text: str, signature: str = 'P22') -> Dict[str, Any]:
    element = parse_element(text, signature)
    grades: Dict[str, Optional[str]] = {}
    for which in GRADINGS:
        try:
            grades[which] = sympy.sstr(grading(element, which))
        except Inhomogeneous:
            grades[which] = None
    return {'element': element.to_text(), 'signature': ELEMENT_SIGNATURES[signature].name, 'grades': grades}


def roots_query() -> List[Dict[str, Any]]:
    return [r.to_json() for r in root_data()]


def roots_table() -> pd.DataFrame:
    return roots_frame()
