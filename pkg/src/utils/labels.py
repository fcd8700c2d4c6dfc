import logging
import os
from typing import Optional, Tuple, Union

import sympy

from symbolic.errors import UnknownLabel

# Configure logging
logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# ASCII family name -> display symbol
PRETTY_FAMILIES = {
    'X': 'X', 'Y': 'Y', 'M': 'M', 'N': 'N', 'D': 'D', 'W': 'W', 'P': 'P', 'Q': 'Q',
    'V_+': 'V₊', 'V_-': 'V₋',
    'G': 'G', 'G1': 'G¹', 'G2': 'G²',
    'Ybar': 'Ȳ', 'Ybar1': 'Ȳ¹', 'Ybar2': 'Ȳ²',
    'Mbar': 'M̄', 'Mbar1': 'M̄¹', 'Mbar2': 'M̄²',
    'Zbar1': 'Z̄¹', 'Zbar2': 'Z̄²',
    'Z0': 'Z⁽⁰⁾', 'Z1': 'Z⁽¹⁾', 'Z2': 'Z⁽²⁾',
}

_SUBSCRIPTS = str.maketrans('0123456789-/', '₀₁₂₃₄₅₆₇₈₉₋⸝')


def format_index(index: Union[int, sympy.Rational]) -> str:
    index = sympy.Rational(index)
    return str(index.p) if index.q == 1 else f"{index.p}/{index.q}"


def make_label(family: str, index: Optional[Union[int, sympy.Rational]] = None) -> str:
    if index is None:
        return family
    return f"{family}_{format_index(index)}"


def parse_label(label: str) -> Tuple[str, Optional[sympy.Rational]]:
    """
    Split an ASCII generator label such as ``G1_-1/2`` into family and mode index.

    Labels without a numeric suffix (``V_+``, ``W``) have index None.
    """
    if not isinstance(label, str) or not label.strip():
        raise UnknownLabel(f"Invalid generator label: {label!r}")
    label = label.strip()
    family, sep, suffix = label.rpartition('_')
    if not sep:
        return label, None
    try:
        return family, sympy.Rational(suffix)
    except (TypeError, ValueError, sympy.SympifyError):
        return label, None


def pretty_label(label: str) -> str:
    family, index = parse_label(label)
    name = PRETTY_FAMILIES.get(family, family)
    if index is None:
        return name
    return name + format_index(index).translate(_SUBSCRIPTS)
