"""Exception types shared across the package."""


class PtolemyError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class SelfFoldedFlip(PtolemyError):
    pass


class InvalidTriangulation(PtolemyError):
    pass


class RankMismatch(PtolemyError):
    pass


class DegenerateSpace(PtolemyError):
    pass


class RadicalVector(PtolemyError):
    pass


class NotLagrangian(PtolemyError):
    pass


class PathMismatch(PtolemyError):
    pass


class NotAFlip(PtolemyError):
    pass


class NotARelabel(PtolemyError):
    pass


class NonComposable(PtolemyError):
    pass


class IrreducibleResidual(PtolemyError):
    def __init__(self, message, residual=None, phase=None):
        super().__init__(message)
        self.residual = residual
        self.phase = phase


class PoleProximity(PtolemyError):
    pass


class QuadratureFailure(PtolemyError):
    pass


class DivergentParameter(PtolemyError):
    pass


class RankUnsupported(PtolemyError):
    pass


class GridTooCoarse(PtolemyError):
    pass


class BrokenChain(PtolemyError):
    pass


class NotALoop(PtolemyError):
    pass
