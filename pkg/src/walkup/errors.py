"""Exception types shared across the package."""


class WalkupError(Exception):
    """Base class for all walkup errors."""


class UnreadableInput(WalkupError):
    """Input file cannot be opened or decoded."""


class SchemaError(WalkupError):
    """A line of an input file violates the expected schema."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class EmptySequence(WalkupError):
    """Input contains no landmark frames."""


class MissingLandmark(WalkupError):
    """A landmark required by an operation is absent or below the visibility threshold."""

    def __init__(self, index: int, detail: str = ""):
        msg = f"landmark {index} missing"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.index = index


class DegenerateVector(WalkupError):
    """Vector norm below tolerance; angle undefined."""


class SequenceTooShort(WalkupError):
    """Sequence shorter than the minimum required for windowed analysis."""


class SeriesTooShort(WalkupError):
    """Signal series too short for peak detection."""


class EmptySeries(WalkupError):
    """Feature extraction received an empty series."""


class UnknownFeature(WalkupError):
    """Feature name or parameter not in the supported catalogue."""


class UnsupportedItem(WalkupError):
    """No generator exists for the requested item."""
