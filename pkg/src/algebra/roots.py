"""
Root data of osp(2|4) in its P(4|2) realization.

The Cartan subalgebra is spanned by H = (p_1 q_1, p_2 q_2, theta1 theta2); every non-Cartan
generator image is a single monomial m with {H_k, m} = lambda_k m, and the root is written
lambda_1 f_1 + lambda_2 f_2 + lambda_3 alpha.
"""
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import pandas as pd
import sympy

from poisson.element import P42, PoissonElement, poisson_bracket
from poisson.morphisms import osp24_map
from symbolic.errors import SymbolicError

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

CARTAN_LABELS = ('X_0', 'N_0', 'D')


def cartan_basis() -> Tuple[PoissonElement, PoissonElement, PoissonElement]:
    one = (0, 0)
    return (PoissonElement.monomial(P42, 1, q=(1, 0), p=(1, 0)),
            PoissonElement.monomial(P42, 1, q=(0, 1), p=(0, 1)),
            PoissonElement.monomial(P42, 1, q=one, p=one, theta=('theta1', 'theta2')))


@dataclass(frozen=True)
class RootVector:
    label: str
    root: Tuple[int, int, int]
    factor: sympy.Expr
    monomial: PoissonElement
    parity: int

    @property
    def root_text(self) -> str:
        parts = []
        for coeff, name in zip(self.root, ('f1', 'f2', 'alpha')):
            if coeff == 0:
                continue
            sign = '-' if coeff < 0 else '+'
            magnitude = '' if abs(coeff) == 1 else str(abs(coeff))
            parts.append(f"{sign} {magnitude}{name}")
        text = ' '.join(parts)
        return text[2:] if text.startswith('+ ') else text.replace('- ', '-', 1)

    def to_json(self) -> Dict[str, Any]:
        return {'label': self.label, 'root': list(self.root), 'root_text': self.root_text,
                'factor': sympy.sstr(self.factor), 'monomial': self.monomial.to_text(),
                'parity': 'odd' if self.parity else 'even'}


def _eigenvalue(h: PoissonElement, m: PoissonElement) -> sympy.Rational:
    (key, coeff), = m.terms.items()
    image = poisson_bracket(h, m)
    value = image.terms.get(key, sympy.Integer(0)) / coeff
    if not (image - m * value).is_zero():
        raise SymbolicError(f"{m} is not a weight vector for {h}")
    return sympy.Rational(value)


def root_data() -> List[RootVector]:
    """Root vectors of the 16 non-Cartan generators, sorted by root."""
    cartan = cartan_basis()
    roots = []
    for label, image in osp24_map().items():
        if label in CARTAN_LABELS:
            continue
        if len(image.terms) != 1:
            raise SymbolicError(f"image of {label} is not a monomial: {image}")
        (key, factor), = image.terms.items()
        monomial = PoissonElement(P42, {key: 1})
        weights = tuple(_eigenvalue(h, monomial) for h in cartan)
        if any(not w.is_integer for w in weights):
            raise SymbolicError(f"non-integral weight {weights} for {label}")
        roots.append(RootVector(label, tuple(int(w) for w in weights), factor, monomial,
                                len(key[2]) % 2))
    roots.sort(key=lambda r: (r.parity, r.root))
    logger.debug(f"root data: {len(roots)} root vectors")
    return roots


def roots_frame() -> pd.DataFrame:
    rows = [{'label': r.label, 'root': r.root_text, 'monomial': r.monomial.to_text(),
             'factor': sympy.sstr(r.factor), 'parity': 'odd' if r.parity else 'even'}
            for r in root_data()]
    return pd.DataFrame(rows, columns=['label', 'root', 'monomial', 'factor', 'parity'])
