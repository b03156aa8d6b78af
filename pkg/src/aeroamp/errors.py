"""aeroamp domain errors.

Every error raised by the pipeline derives from AeroampError so the CLI can
report it as a domain failure (exit code 1) rather than a crash.
"""


class AeroampError(Exception):
    """Base class for all aeroamp domain errors."""


# Telemetry

class MissingColumn(AeroampError, ValueError):
    """A mandatory telemetry column is absent from the input."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"Missing mandatory column: {column}")


class EmptyFlight(AeroampError):
    """A flight log contains no valid rows."""


class TooManyMalformedRows(AeroampError):
    """More rows were unparseable than the configured tolerance allows."""

    def __init__(self, skipped: int, total: int):
        self.skipped = skipped
        self.total = total
        super().__init__(f"{skipped} of {total} rows are malformed")


class NonMonotonicTime(AeroampError, ValueError):
    """Timestamps are not strictly increasing."""


class NoOverlap(AeroampError):
    """Sensor streams share no common time window."""


class TooFewSamples(AeroampError):
    """An integral needs at least two samples."""


# Segmentation

class NoFlightDetected(AeroampError):
    """The altitude trace never leaves the ground."""


class AmbiguousProfile(AeroampError):
    """The flight cannot be split into exactly one takeoff, cruise and landing."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Ambiguous flight profile: {reason}")


# Physics

class NonPositiveMass(AeroampError, ValueError):
    """Total mass must be strictly positive."""


# Estimation

class TrainCountTooLarge(AeroampError, ValueError):
    """The training fold would leave no flight for testing."""


class DegenerateDesign(AeroampError):
    """Regression design has no variance in the induced power."""


class ZeroMeasuredEnergy(AeroampError):
    """A flight's measured energy is zero, so its relative error is undefined."""


# Boosted trees

class EmptyGrid(AeroampError, ValueError):
    """A hyperparameter grid dimension is empty."""


class NoSamples(AeroampError, ValueError):
    """Training needs at least two samples."""


class DimensionMismatch(AeroampError, ValueError):
    """Feature vector length differs from the training features."""


class TooFewFlights(AeroampError):
    """Cross-validation needs at least as many flights as folds."""


# Mission

class ZeroSpeed(AeroampError, ValueError):
    """Segment speed must be strictly positive."""


class MissingModel(AeroampError):
    """A regime model needed for the mission is absent."""

    def __init__(self, regime: str):
        self.regime = regime
        super().__init__(f"No model for regime: {regime}")


class InsufficientBattery(AeroampError):
    """Vertical segments alone exhaust the battery."""

    def __init__(self, vertical_wh: float, e_max_wh: float):
        self.vertical_wh = vertical_wh
        self.e_max_wh = e_max_wh
        super().__init__(
            f"Takeoff and landing need {vertical_wh:.2f} Wh, battery holds {e_max_wh:.2f} Wh"
        )


class ZeroDistance(AeroampError, ValueError):
    """Per-distance intensity needs a positive distance."""


# Fleet

class ZeroDeliveryRate(AeroampError, ValueError):
    """Stops per km times packages per stop must be positive."""


class UnknownVehicle(AeroampError):
    """A referenced vehicle is not in the profile registry."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unknown vehicle: {name}")


class ZeroPayload(AeroampError, ValueError):
    """Per tonne-km metrics need a positive payload capacity."""


# Inputs

class InvalidSpec(AeroampError, ValueError):
    """A synthetic flight generator spec is unusable."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Invalid generator spec: {reason}")


class InvalidProfile(AeroampError, ValueError):
    """A JSON profile file is missing fields or holds invalid values."""


class MalformedInput(AeroampError, ValueError):
    """An input file is not valid JSON or lacks a required field."""

    def __init__(self, path, detail: str):
        self.path = str(path)
        super().__init__(f"Malformed input {self.path}: {detail}")


class InvalidMission(AeroampError, ValueError):
    """Mission geometry or the cruise model cannot give a range."""


class InvalidArgument(AeroampError, ValueError):
    """A numeric argument is outside its valid range."""
