"""Exception types shared across the package."""


class GeoMomentError(Exception):
    """Base class for errors raised by geomoment."""


class ParseError(GeoMomentError):
    """Malformed input file (cloud CSV, measure or cost JSON)."""


class DomainError(GeoMomentError):
    """A documented precondition does not hold for the given input.

    ``certificate``, when present, is a vector witnessing the violation
    (e.g. a separating functional for a point outside a convex hull).
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NoConvergenceError(GeoMomentError):
    """An iterative routine hit its iteration cap before certifying a result.

    ``cap`` is the cap that was exceeded; ``best`` carries the best iterate
    found so far, when one exists.
    """

    def __init__(self, message, cap=None, best=None):
        super().__init__(message)
        self.cap = cap
        self.best = best


class DegenerateSupportError(GeoMomentError):
    """Candidate boundary points are affinely dependent."""
