# exceptions.py - Error hierarchy for the loop algebra engine

INVALID_INPUT = 2
INSTABILITY = 3


class LoopAlgebraError(Exception):
    """Base class for every engine error"""

    exit_code = INVALID_INPUT


# Cartan data


class CartanValidationError(LoopAlgebraError):
    """Rejected symmetrized Cartan matrix"""


class NonSymmetric(CartanValidationError):
    pass


class PositivityViolation(CartanValidationError):
    pass


class GcdViolation(CartanValidationError):
    pass


class SignViolation(CartanValidationError):
    pass


class IntegralityViolation(CartanValidationError):
    pass


class UnknownCartanType(CartanValidationError):
    pass


class NotFiniteType(LoopAlgebraError):
    pass


class MissingDimensionTable(LoopAlgebraError):
    pass


# Scalars


class DivisionByZero(LoopAlgebraError):
    pass


class BadSpecialization(LoopAlgebraError):
    """The denominator vanishes at the drawn q_value"""


class AllSpecializationsBad(LoopAlgebraError):
    exit_code = INSTABILITY


# Polynomials and shuffle elements


class InfinitePolytope(LoopAlgebraError):
    pass


class ZeroPolynomial(LoopAlgebraError):
    pass


class Inhomogeneous(LoopAlgebraError):
    pass


class MixedSigns(LoopAlgebraError):
    pass


class ShuffleCancellationError(LoopAlgebraError):
    """Symmetrized numerator not divisible by the same-color Vandermonde"""

    exit_code = INSTABILITY


# Slopes and pairings


class EmptyBand(LoopAlgebraError):
    pass


class EmptyTestFamily(LoopAlgebraError):
    pass


class CapInstability(LoopAlgebraError):
    exit_code = INSTABILITY


class ZeroConstantDivisor(LoopAlgebraError):
    pass


class RankInstability(LoopAlgebraError):
    exit_code = INSTABILITY


# Characters and input


class NonIntegerSolution(LoopAlgebraError):
    pass


class LiteralParseError(LoopAlgebraError):
    pass
