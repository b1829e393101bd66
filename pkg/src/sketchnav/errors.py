"""Exception types shared across the package."""


class SketchNavError(Exception):
    """Base class for all package errors."""


class PathTooShortError(SketchNavError):
    """A finished stroke had fewer than two waypoints (a degenerate tap)."""


class DegeneratePathError(SketchNavError):
    """A point sequence has fewer than two distinct points."""


class NoPathAvailableError(SketchNavError):
    """The planner slot was asked for a plan before any path was set."""


class StoreError(SketchNavError):
    """Base class for path database errors."""


class DuplicatePathIdError(StoreError):
    """A path with the same id is already stored."""


class PathNotFoundError(StoreError):
    """The requested path id is not in the database."""


class NothingToSendError(StoreError):
    """A send was requested while the database holds no paths."""


class DatabaseFormatError(StoreError):
    """The database file did not parse or failed validation."""


class UnsupportedVersionError(StoreError):
    """The database file carries a version this build does not understand."""


class PersistenceError(StoreError):
    """Writing the database to disk failed; in-memory state is unchanged."""


class MapFormatError(SketchNavError):
    """Map metadata or image could not be read, or their dimensions disagree."""


class InvalidStartError(SketchNavError):
    """A simulation was started from an occupied cell."""


class OutOfBoundsError(SketchNavError):
    """Geometry that must stay inside the grid left it."""


class GridMismatchError(SketchNavError):
    """Two masks with different grid geometry were combined."""


class DegenerateSampleError(SketchNavError):
    """All paired differences are zero; the signed-rank test is undefined."""


class ProtocolError(SketchNavError):
    """A session message violated the wire protocol.

    `code` is the short machine-readable string echoed in error replies.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
