"""Exception types shared across the package."""


class PatternHCError(Exception):
    """Base class for all package errors."""


class EmptyPattern(PatternHCError, ValueError):
    pass


class BadGlyph(PatternHCError, ValueError):
    def __init__(self, position, glyph=None):
        self.position = position
        self.glyph = glyph
        super().__init__(f"bad glyph {glyph!r} at position {position}")


class PatternTooLong(PatternHCError, ValueError):
    pass


class InvalidProbability(PatternHCError, ValueError):
    pass


class DomainError(PatternHCError, ValueError):
    pass


class IndexOutOfRange(PatternHCError, IndexError):
    pass


class DivisibilityError(PatternHCError, ValueError):
    pass


class BinTooSmall(PatternHCError, ValueError):
    pass


class SizeMismatch(PatternHCError, ValueError):
    pass


class TooLarge(PatternHCError, ValueError):
    pass


class PatternMismatch(PatternHCError, ValueError):
    pass


class ConfigError(PatternHCError, ValueError):
    pass


class ExposureViolation(PatternHCError, RuntimeError):
    """An unexposed endpoint of an undiscovered arc was read."""


class PipelineFailure(PatternHCError):
    """A stage of a construction gave up. ``stage`` names the stage."""

    stage = "unknown"

    def __init__(self, message="", **detail):
        self.detail = detail
        super().__init__(message or self.stage)


class AOutsideWindow(PipelineFailure):
    stage = "AOutsideWindow"


class NotHandsome(PipelineFailure):
    stage = "NotHandsome"

    def __init__(self, condition, witness=None):
        self.condition = condition
        self.witness = witness
        super().__init__(f"{condition} violated: {witness}", condition=condition, witness=witness)


class PathBuildFailed(PipelineFailure):
    stage = "PathBuildFailed"

    def __init__(self, vertex, reason):
        self.vertex = vertex
        self.reason = reason
        super().__init__(f"vertex {vertex}: {reason}", vertex=vertex, reason=reason)


class MatchingFailed(PipelineFailure):
    stage = "MatchingFailed"

    def __init__(self, index, violator=None):
        self.index = index
        self.violator = violator
        super().__init__(f"no perfect matching between bins {index} and {index + 1}", index=index)


class HCNotFound(PipelineFailure):
    stage = "HCNotFound"
