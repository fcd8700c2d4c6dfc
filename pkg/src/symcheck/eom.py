"""Equation-of-motion operators of the free Schrödinger, Laplace-dual, Dirac-Lévy-Leblond and (3|2) models."""
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List

from algebra.realizations import M, Operator, dirac_operator
from symbolic.errors import UnknownRealization
from symbolic.superop import D, MatrixOperator, SuperOperator

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

MODELS = ('schrodinger', 'laplace', 'dirac', 'susy32')


def schrodinger_operator() -> SuperOperator:
    """S = 2M d_t - d_r^2."""
    return SuperOperator.term(2 * M, 't') - D('r', 'r')


def laplace_operator() -> SuperOperator:
    """d_zeta d_t + d_r^2, the dual of -S under M -> -d_zeta/2."""
    return D('zeta', 't') + D('r', 'r')


def susy_operators() -> Dict[str, SuperOperator]:
    return {
        'S': schrodinger_operator(),
        "S'": SuperOperator.term(2 * M, 'theta1') - D('theta2', 'r'),
        "Sbar'": D('theta1', 'r') - D('theta2', 't'),
        "S''": D('theta1', 'theta2'),
    }


@dataclass
class EomSet:
    model: str
    operators: Dict[str, Operator] = field(default_factory=dict)

    @property
    def names(self) -> List[str]:
        return list(self.operators)

    def annihilates(self, value) -> bool:
        """True when every operator kills ``value`` (an Expr, or a two-component tuple for dirac)."""
        for op in self.operators.values():
            image = op.apply(value)
            parts = image if isinstance(image, tuple) else (image,)
            if any(not part.is_zero() for part in parts):
                return False
        return True


def eom_set(model: str) -> EomSet:
    """
    :param model: schrodinger, laplace, dirac or susy32
    :raises UnknownRealization: unknown model name
    """
    if model == 'schrodinger':
        return EomSet(model, {'S': schrodinger_operator()})
    if model == 'laplace':
        return EomSet(model, {'L': laplace_operator()})
    if model == 'dirac':
        return EomSet(model, {'D': dirac_operator()})
    if model == 'susy32':
        return EomSet(model, susy_operators())
    raise UnknownRealization(f"Unknown equation-of-motion model '{model}'; expected one of {MODELS}")


def dirac_squared_residual() -> MatrixOperator:
    """D o D - diag(L, L); zero when the spinor equations square to the Laplace operator."""
    dirac = dirac_operator()
    return dirac.compose(dirac) - MatrixOperator.scalar(laplace_operator())

