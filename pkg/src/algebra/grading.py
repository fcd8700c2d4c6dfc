"""Conformal dimensions and grades of the sns(N) field families."""
import logging
import os
from typing import Dict, Tuple

import sympy

from symbolic.errors import UnknownLabel
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

half = sympy.Rational(1, 2)

# family -> (conformal dimension, grade)
CDIM_GRADE: Dict[int, Dict[str, Tuple[sympy.Rational, sympy.Rational]]] = {
    0: {'X': (2, 1), 'Y': (3 * half, half), 'M': (1, 0)},
    1: {'X': (2, 1), 'Y': (3 * half, half), 'M': (1, 0), 'G': (3 * half, 1), 'Ybar': (1, half),
        'Mbar': (half, 0)},
    2: {'X': (2, 1), 'Y': (3 * half, half), 'M': (1, 0), 'G1': (3 * half, 1), 'G2': (3 * half, 1),
        'N': (1, 1), 'Ybar1': (1, half), 'Ybar2': (1, half), 'P': (half, half),
        'Mbar1': (half, 0), 'Mbar2': (half, 0), 'Q': (0, 0)},
}


def cdim_and_grade(n: int, family: str) -> Tuple[sympy.Rational, sympy.Rational]:
    """
    Tabulated conformal dimension and grade of an sns(n) family.

    :raises UnknownLabel: unknown N or family
    """
    try:
        cdim, grade = CDIM_GRADE[n][family]
    except KeyError:
        raise UnknownLabel(f"no family '{family}' in sns({n})")
    return sympy.Rational(cdim), sympy.Rational(grade)


def audit_gradings() -> Report:
    """
    Re-derive the table from the Poisson representatives: the conformal dimension is the
    power of p plus one, the grade is gra, and the mode index is the q-exponent minus the power of p.
    """
    from poisson.sns import MODE_FAMILIES, mode_element, mode_grade

    report = Report('gradings', 'conformal dimension and grade of the sns(N) fields')
    for n, families in sorted(CDIM_GRADE.items()):
        for family in families:
            cdim, grade = cdim_and_grade(n, family)
            fam = MODE_FAMILIES[n][family]
            derived_cdim = fam.p_power + 1
            derived_grade = mode_grade(n, family)
            index = half if fam.half else sympy.Integer(1)
            (qs, _, _), = mode_element(n, family, index).terms
            shift_ok = qs[0] - index == fam.p_power
            ok = derived_cdim == cdim and derived_grade == grade and shift_ok
            report.add(f"sns({n}) {family}", ok,
                       None if ok else f"cdim {derived_cdim} vs {cdim}, grade {derived_grade} vs {grade}",
                       cdim=str(cdim), grade=str(grade))
    return report
