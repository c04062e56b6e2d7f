"""Exception hierarchy for warpsurf."""


class WarpSurfError(Exception):
    pass


class DomainError(WarpSurfError, ValueError):
    """A height coordinate fell outside (or too close to the ends of) the warping interval."""


class BaseMismatch(WarpSurfError, ValueError):
    pass


class DegeneratePlane(WarpSurfError, ValueError):
    pass


class DegenerateImmersion(WarpSurfError, ValueError):
    """The parameter derivatives are (numerically) linearly dependent."""


class RegularityError(DegenerateImmersion):
    pass


class AngleDegenerate(WarpSurfError, ValueError):
    """The tangential part of d/dt vanishes, so the adapted frame is undefined."""


class BoundaryError(WarpSurfError, ValueError):
    pass


class NonConvergence(WarpSurfError, RuntimeError):
    pass


class ModelMismatch(WarpSurfError, ValueError):
    pass


class GridTooSmall(WarpSurfError, ValueError):
    pass


class ConfigError(WarpSurfError, ValueError):
    pass
