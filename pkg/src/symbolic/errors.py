"""Exception hierarchy shared by every symbolic module."""


class SymbolicError(Exception):
    """Base class for all domain errors raised by the library"""


class OpaqueDerivative(SymbolicError):
    """A formal function without a derivative rule had to be differentiated in closed form"""


class IllegalSubstitution(SymbolicError):
    """A binding violates parity or the supported value class"""


class SingularPoint(SymbolicError):
    """A base vanishes under a negative or symbolic exponent"""


class InhomogeneousParity(SymbolicError):
    """A parity-sensitive operation received a mixed even/odd operand"""


class UnknownRealization(SymbolicError):
    pass


class UnknownLabel(SymbolicError):
    pass


class UnknownForm(SymbolicError):
    pass


class SignatureMismatch(SymbolicError):
    """Poisson elements from different algebras were combined"""


class GradeTooHigh(SymbolicError):
    """A twisted Poisson element has a term of grade above one"""


class Inhomogeneous(SymbolicError):
    """An element is not homogeneous in the requested grading"""


class NotInSpan(SymbolicError):
    """A bracket does not decompose over the generator basis"""
