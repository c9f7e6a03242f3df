"""Exception types.  Each carries a short machine name used by the CLI."""


class GeoTransitError(Exception):
    """Base class; ``name`` is printed on stderr by the command line."""

    @property
    def name(self):
        return type(self).__name__


class ContractError(GeoTransitError, ValueError):
    pass


class ZeroDivisor(GeoTransitError, ZeroDivisionError):
    pass


class InvalidRescale(GeoTransitError, ValueError):
    pass


class NoIdempotents(GeoTransitError, ValueError):
    pass


class NotInGroup(GeoTransitError, ValueError):
    pass


class NotInterior(GeoTransitError, ValueError):
    pass


class NotAxial(GeoTransitError, ValueError):
    pass


class NotInfinitesimal(GeoTransitError, ValueError):
    pass


class StepTooLarge(GeoTransitError, ValueError):
    pass


class AmbiguousRank(GeoTransitError, ArithmeticError):
    def __init__(self, msg, singular_values=None):
        super().__init__(msg)
        self.singular_values = singular_values


class NoRealPath(GeoTransitError, ArithmeticError):
    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = list(trace or [])


class Obstructed(GeoTransitError, ArithmeticError):
    def __init__(self, msg, residual=float("nan"), trace=None):
        super().__init__(msg)
        self.residual = residual
        self.trace = list(trace or [])


class RightAngleImpossible(GeoTransitError, ValueError):
    pass


class ConstructionFailed(GeoTransitError, ArithmeticError):
    def __init__(self, msg, worst=None):
        super().__init__(msg)
        self.worst = worst


class SmoothnessGateFailed(GeoTransitError, ArithmeticError):
    pass


class NoParabolicAngle(GeoTransitError, ValueError):
    pass


class NotRepresentation(GeoTransitError, ValueError):
    pass
