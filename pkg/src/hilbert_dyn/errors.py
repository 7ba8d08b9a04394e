"""Exception hierarchy. Every error raised by the library derives from
:class:`HilbertDynError` so the CLI can map them to exit code 2."""


class HilbertDynError(Exception):
    pass


class DimensionMismatch(HilbertDynError, ValueError):
    pass


class EmptyInterior(HilbertDynError, ValueError):
    pass


class DegenerateChord(HilbertDynError):
    pass


class Unbounded(HilbertDynError):
    """A chord has an infinite parameter interval: the body is unbounded."""


class OutsideDomain(HilbertDynError):
    pass


class NotOnBoundary(HilbertDynError):
    pass


class DistanceOverflow(HilbertDynError):
    pass


class NotInSimplex(HilbertDynError, ValueError):
    pass


class OutsideDisk(HilbertDynError, ValueError):
    pass


class RayTooShort(HilbertDynError):
    pass


class NotEscaping(HilbertDynError):
    pass


class BoundedOrbitSuspected(HilbertDynError):
    """No late record of b(n); carries the partial selection as ``selection``."""

    def __init__(self, message, selection=None):
        super().__init__(message)
        self.selection = selection


class InsufficientLength(HilbertDynError):
    pass


class OrbitTooShort(HilbertDynError):
    pass


class MapLeftDomain(HilbertDynError):
    pass


class ZeroImage(HilbertDynError):
    pass


class NonPositiveEntry(HilbertDynError, ValueError):
    pass


class MissingCertificate(HilbertDynError):
    pass


class ConfigInvalid(HilbertDynError, ValueError):
    pass
