"""Exception hierarchy shared by all valgram modules."""


class ValgramError(Exception):
    pass


class InvalidPolygon(ValgramError, ValueError):
    """Input vertices do not describe a non-degenerate convex polygon."""


class OriginNotInterior(ValgramError, ValueError):
    pass


class FullPlaneHasNoAssociatedBody(ValgramError, ValueError):
    pass


class OutsideDifferenceBodyInterior(ValgramError, ValueError):
    pass


class SeminormVanishesOnDirection(ValgramError, ValueError):
    pass


class VolumeNotRecoverable(ValgramError, ValueError):
    pass


class NonPositiveDiscriminant(ValgramError, ArithmeticError):
    pass


class ParameterOutOfRange(ValgramError, ValueError):
    pass


class HypothesisViolated(ValgramError, ValueError):
    pass


class KindPreconditionViolated(ValgramError, ValueError):
    pass


class DegenerateSeminormPerimeter(ValgramError, ValueError):
    pass


class DegenerateDensity(ValgramError, ValueError):
    pass
