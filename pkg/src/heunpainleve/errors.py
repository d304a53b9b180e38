"""Exception types raised across the package."""


class HeunError(Exception):
    """Base class for all package errors."""


# kernel
class DivisionByZero(HeunError, ZeroDivisionError):
    pass


class ZeroFunction(HeunError):
    pass


class UndecidableLeadingCoefficient(HeunError):
    """A parameter-dependent coefficient could not be certified nonzero."""


class ZeroDenominatorAtLocalization(HeunError):
    pass


class SingularHomography(HeunError):
    pass


class DegreeBoundViolated(HeunError):
    pass


# local analysis
class RankBelowTwo(HeunError):
    pass


class IrrationalBranch(HeunError):
    """A quadratic branch equation has no root in the coefficient field."""


class IrrationalIndicialRoots(HeunError):
    pass


class NotFuchsian(HeunError):
    pass


class NonIntegerIndexDifference(HeunError):
    pass


# Heun class
class NotHeunClass(HeunError):
    pass


class RootNotAtOrigin(HeunError):
    pass


class LambdaAtSigmaRoot(HeunError):
    pass


class ObstructionFound(HeunError):
    pass


# deformation engine and catalog
class NoSubcaseApplies(HeunError):
    pass


class UnknownType(HeunError):
    pass


class NotQuadraticInMu(HeunError):
    pass


class NotAutonomousShape(HeunError):
    pass


# numerics
class TooFewSamples(HeunError):
    pass


class PoleProximity(HeunError):
    pass


class StepUnderflow(HeunError):
    pass


# parsing
class SpecSyntaxError(HeunError):
    """Parse failure with a 1-based line/column and the expected tokens."""

    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UndeclaredParameter(SpecSyntaxError):
    pass


class SigmaNotFactored(HeunError):
    pass


class AlgebraicPoint(HeunError):
    """A denominator factor has no rational root in z."""


class ZeroDenominator(SpecSyntaxError):
    pass
