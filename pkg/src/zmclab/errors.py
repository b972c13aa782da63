"""Exception types raised across the package."""


class ZMCError(Exception):
    """Base class for all errors raised by zmclab."""


# series arithmetic
class ZeroConstantTerm(ZMCError, ZeroDivisionError):
    pass


class NonPositiveConstantTerm(ZMCError, ValueError):
    pass


class NotDivisible(ZMCError, ValueError):
    pass


# geometry
class LightlikePoint(ZMCError, ValueError):
    """Raised when a quantity needs ``B_F != 0`` but the point is light-like."""


class NotLightlike(ZMCError, ValueError):
    pass


class NotNormalized(ZMCError, ValueError):
    pass


class NotAdmissible(ZMCError, ValueError):
    pass


class IdenticallyLightlike(ZMCError, ValueError):
    """``B_F`` vanishes identically, so any ``phi`` is a witness."""


# construction
class OrderTooLow(ZMCError, ValueError):
    pass


class SeriesBlowup(ZMCError, ArithmeticError):
    pass


class InvalidInitialCurve(ZMCError, ValueError):
    pass


# approximation functions
class NotDegenerate(ZMCError, ValueError):
    pass


class ParamOutOfRange(ZMCError, ValueError):
    pass


class GridTooCoarse(ZMCError, ValueError):
    pass


class SingularCoefficient(ZMCError, ArithmeticError):
    pass


class NotSolutionPair(ZMCError, ValueError):
    pass


# curves
class RadiusExceeded(ZMCError, ValueError):
    pass


class ImaginaryResidue(ZMCError, ArithmeticError):
    pass


class NotSpacelike(ZMCError, ValueError):
    pass


class NotAGraph(ZMCError, ValueError):
    pass


class NotNull(ZMCError, ValueError):
    pass
