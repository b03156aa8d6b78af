"""Flight telemetry ingestion, stream synchronization, power and energy.

A flight is held as a pandas DataFrame with the canonical columns below,
one row per synchronized sample (~5 Hz for the published flights).
"""

import json
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from aeroamp.config import Config, read_json
from aeroamp.errors import (
    EmptyFlight,
    InvalidArgument,
    InvalidProfile,
    MissingColumn,
    NoOverlap,
    NonMonotonicTime,
    TooFewSamples,
    TooManyMalformedRows,
)
from aeroamp.logging import get_logger

TIME = "time_s"

MANDATORY_COLUMNS = (
    "time_s",
    "voltage_v",
    "current_a",
    "pos_x_m",
    "pos_y_m",
    "pos_z_m",
    "vel_x_ms",
    "vel_y_ms",
    "vel_z_ms",
)
OPTIONAL_COLUMNS = ("wind_speed_ms", "wind_dir_deg", "roll_deg", "pitch_deg", "yaw_deg")
CANONICAL_COLUMNS = MANDATORY_COLUMNS + OPTIONAL_COLUMNS

# Published flights sample at roughly this cadence
DEFAULT_RATE_HZ = 5.0


@dataclass(frozen=True)
class TelemetrySample:
    """One synchronized sample of all sensors."""

    time: float
    voltage: float
    current: float
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    wind_speed: float | None = None
    wind_direction: float | None = None
    orientation: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class FlightMetadata:
    """Experiment settings of one flight."""

    flight_id: int
    payload_mass: float = 0.0
    target_altitude: float | None = None
    target_speed: float | None = None

    @classmethod
    def from_dict(cls, data: Mapping) -> "FlightMetadata":
        """Build from a metadata JSON entry."""
        try:
            return cls(
                flight_id=int(data["flight_id"]),
                payload_mass=float(data.get("payload_kg", 0.0)),
                target_altitude=_optional_float(data.get("altitude_m")),
                target_speed=_optional_float(data.get("speed_ms")),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidProfile(f"Bad flight metadata entry {dict(data)}: {e}") from e


@dataclass
class FlightRecord:
    """One flight: synchronized samples plus experiment metadata."""

    flight_id: int
    frame: pd.DataFrame
    payload_mass: float = 0.0
    target_altitude: float | None = None
    target_speed: float | None = None
    skipped_rows: int = 0

    def __post_init__(self):
        if self.frame.empty:
            raise EmptyFlight(f"Flight {self.flight_id} has no samples")

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def metadata(self) -> FlightMetadata:
        return FlightMetadata(
            self.flight_id, self.payload_mass, self.target_altitude, self.target_speed
        )

    @property
    def times(self) -> np.ndarray:
        return self.frame[TIME].to_numpy(dtype=float)

    @property
    def altitude(self) -> np.ndarray:
        return self.frame["pos_z_m"].to_numpy(dtype=float)

    @property
    def vertical_speed(self) -> np.ndarray:
        return self.frame["vel_z_ms"].to_numpy(dtype=float)

    @property
    def power(self) -> np.ndarray:
        """Electrical power of every sample, in watts."""
        return (self.frame["voltage_v"] * self.frame["current_a"]).to_numpy(dtype=float)

    @property
    def mean_wind(self) -> float:
        if "wind_speed_ms" not in self.frame:
            return 0.0
        wind = self.frame["wind_speed_ms"].dropna()
        return float(wind.mean()) if len(wind) else 0.0

    def samples(self) -> Iterator[TelemetrySample]:
        """Iterate samples in time order."""
        frame = self.frame
        has = {c: c in frame for c in OPTIONAL_COLUMNS}
        for row in frame.itertuples(index=False):
            values = row._asdict()
            orientation = None
            if has["roll_deg"] and has["pitch_deg"] and has["yaw_deg"]:
                orientation = (values["roll_deg"], values["pitch_deg"], values["yaw_deg"])
            yield TelemetrySample(
                time=values[TIME],
                voltage=values["voltage_v"],
                current=values["current_a"],
                position=(values["pos_x_m"], values["pos_y_m"], values["pos_z_m"]),
                velocity=(values["vel_x_ms"], values["vel_y_ms"], values["vel_z_ms"]),
                wind_speed=values.get("wind_speed_ms"),
                wind_direction=values.get("wind_dir_deg"),
                orientation=orientation,
            )


@dataclass(frozen=True)
class FlightSummary:
    """Duration, time-averaged power and energy of a flight or slice."""

    duration: float  # s
    mean_power: float  # W
    energy: float  # J


@dataclass
class ColumnMap:
    """Maps a source CSV layout onto the canonical telemetry schema.

    Attributes:
        columns: Source column name -> canonical column name.
        scale: Canonical column -> multiplicative factor (units, sign flips).
        flight_column: Column holding the flight id in combined files.
        metadata: Metadata key (payload_kg, altitude_m, speed_ms) -> source column.
    """

    columns: dict[str, str] = field(default_factory=dict)
    scale: dict[str, float] = field(default_factory=dict)
    flight_column: str | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_json(cls, path: str | Path) -> "ColumnMap":
        """Load a user-editable column map."""
        return cls.from_dict(read_json(path))

    @classmethod
    def from_dict(cls, data: Mapping) -> "ColumnMap":
        return cls(
            columns=dict(data.get("columns", {})),
            scale={k: float(v) for k, v in data.get("scale", {}).items()},
            flight_column=data.get("flight_column"),
            metadata=dict(data.get("metadata", {})),
        )

    @classmethod
    def published_dataset(cls) -> "ColumnMap":
        """Shipped map for the public combined flight CSV."""
        text = resources.files("aeroamp.data").joinpath("column_map.json").read_text()
        return cls.from_dict(json.loads(text))

    def apply(self, frame: pd.DataFrame) -> pd.DataFrame:
        """Rename and scale columns; metadata source columns are kept."""
        out = frame.rename(columns=self.columns)
        for column, factor in self.scale.items():
            if column in out:
                out[column] = pd.to_numeric(out[column], errors="coerce") * factor
        return out


def electrical_power(sample: TelemetrySample) -> float:
    """Pack voltage times pack current, in watts. Negative current passes through."""
    return sample.voltage * sample.current


def integrate_energy(power, times) -> float:
    """Trapezoidal integral of power over time.

    Args:
        power: Power samples in watts.
        times: Sample times in seconds, strictly increasing.

    Returns:
        Energy in joules.
    """
    power = np.asarray(power, dtype=float)
    times = np.asarray(times, dtype=float)
    if power.shape != times.shape:
        raise InvalidArgument(f"power has {power.size} samples, times has {times.size}")
    if times.size < 2:
        raise TooFewSamples(f"Need at least 2 samples to integrate, got {times.size}")
    if np.any(np.diff(times) <= 0):
        raise NonMonotonicTime("Timestamps must be strictly increasing")
    return float(trapezoid(power, times))


def summarize(power: np.ndarray, times: np.ndarray) -> FlightSummary:
    """Summary of a power trace: duration, time-averaged power, energy."""
    energy = integrate_energy(power, times)
    duration = float(times[-1] - times[0])
    return FlightSummary(duration=duration, mean_power=energy / duration, energy=energy)


def summarize_flight(flight: FlightRecord) -> FlightSummary:
    """Whole-flight summary."""
    return summarize(flight.power, flight.times)


def _optional_float(value) -> float | None:
    if value is None:
        return None
    value = float(value)
    return None if math.isnan(value) else value


def _clean_frame(
    frame: pd.DataFrame,
    source: str,
    max_malformed_fraction: float,
) -> tuple[pd.DataFrame, int]:
    """Validate columns, coerce numbers, drop malformed rows, sort by time."""
    logger = get_logger()

    for column in MANDATORY_COLUMNS:
        if column not in frame:
            raise MissingColumn(column)

    keep = [c for c in CANONICAL_COLUMNS if c in frame]
    frame = frame[keep].apply(pd.to_numeric, errors="coerce")

    total = len(frame)
    valid = frame[list(MANDATORY_COLUMNS)].notna().all(axis=1) & np.isfinite(
        frame["pos_z_m"]
    )
    skipped = int(total - valid.sum())
    if valid.sum() == 0:
        raise EmptyFlight(f"No valid rows in {source}")
    if skipped:
        logger.info(f"{source}: skipped {skipped} of {total} malformed rows")
        if skipped / total > max_malformed_fraction:
            raise TooManyMalformedRows(skipped, total)

    frame = frame[valid].sort_values(TIME, kind="mergesort")
    duplicated = frame[TIME].duplicated(keep="first")
    if duplicated.any():
        logger.info(f"{source}: dropped {int(duplicated.sum())} duplicate timestamps")
        frame = frame[~duplicated]

    return frame.reset_index(drop=True), skipped


def parse_flight_csv(
    path: str | Path,
    metadata: FlightMetadata,
    column_map: ColumnMap | None = None,
    max_malformed_fraction: float = 0.01,
) -> FlightRecord:
    """Read one flight CSV into a FlightRecord.

    Args:
        path: CSV with a header row naming the canonical (or mapped) columns.
        metadata: Flight id and experiment settings.
        column_map: Optional adapter for non-canonical headers.
        max_malformed_fraction: Share of unparseable rows tolerated.

    Returns:
        FlightRecord with samples sorted by time; unknown columns ignored.
    """
    frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    frame.columns = [c.strip() for c in frame.columns]
    if column_map is not None:
        frame = column_map.apply(frame)

    frame, skipped = _clean_frame(frame, str(path), max_malformed_fraction)
    get_logger().debug(f"Parsed flight {metadata.flight_id}: {len(frame)} samples from {path}")

    return FlightRecord(
        flight_id=metadata.flight_id,
        frame=frame,
        payload_mass=metadata.payload_mass,
        target_altitude=metadata.target_altitude,
        target_speed=metadata.target_speed,
        skipped_rows=skipped,
    )


def load_flight_batch(
    metadata_path: str | Path,
    data_dir: str | Path | None = None,
    column_map: ColumnMap | None = None,
    max_malformed_fraction: float = 0.01,
) -> list[FlightRecord]:
    """Load every flight listed in a metadata JSON array.

    Relative csv_path entries resolve against data_dir, then the configured
    dataset root, then the metadata file's own directory.
    """
    metadata_path = Path(metadata_path)
    entries = read_json(metadata_path)
    if not isinstance(entries, list):
        raise InvalidProfile(f"{metadata_path} must hold a JSON array of flights")

    root = Path(data_dir) if data_dir else Config.load().resolved_data_dir()
    if root is None:
        root = metadata_path.parent

    flights = []
    for entry in entries:
        meta = FlightMetadata.from_dict(entry)
        csv_path = Path(entry.get("csv_path", f"flight_{meta.flight_id}.csv"))
        if not csv_path.is_absolute():
            csv_path = root / csv_path
        flights.append(
            parse_flight_csv(csv_path, meta, column_map, max_malformed_fraction)
        )
    return flights


def load_dataset(
    path: str | Path,
    column_map: ColumnMap | None = None,
    max_malformed_fraction: float = 0.01,
) -> list[FlightRecord]:
    """Split a combined multi-flight CSV into FlightRecords.

    Flight metadata comes from per-row columns named in the column map.
    """
    column_map = column_map or ColumnMap.published_dataset()
    if not column_map.flight_column:
        raise InvalidProfile("Column map needs a flight_column for combined files")

    raw = pd.read_csv(path, low_memory=False)
    raw.columns = [c.strip() for c in raw.columns]
    if column_map.flight_column not in raw:
        raise MissingColumn(column_map.flight_column)

    metadata_frame = raw[[c for c in column_map.metadata.values() if c in raw]].copy()
    metadata_frame[column_map.flight_column] = raw[column_map.flight_column]
    mapped = column_map.apply(raw.drop(columns=list(column_map.metadata.values()), errors="ignore"))

    flights = []
    for flight_id, group in mapped.groupby(raw[column_map.flight_column], sort=True):
        meta_rows = metadata_frame.loc[group.index]
        meta = FlightMetadata(
            flight_id=int(flight_id),
            payload_mass=_metadata_value(meta_rows, column_map, "payload_kg") or 0.0,
            target_altitude=_metadata_value(meta_rows, column_map, "altitude_m"),
            target_speed=_metadata_value(meta_rows, column_map, "speed_ms"),
        )
        frame, skipped = _clean_frame(
            group, f"{path}#flight{flight_id}", max_malformed_fraction
        )
        flights.append(
            FlightRecord(
                flight_id=meta.flight_id,
                frame=frame,
                payload_mass=meta.payload_mass,
                target_altitude=meta.target_altitude,
                target_speed=meta.target_speed,
                skipped_rows=skipped,
            )
        )
    get_logger().info(f"Loaded {len(flights)} flights from {path}")
    return flights


def _metadata_value(rows: pd.DataFrame, column_map: ColumnMap, key: str) -> float | None:
    source = column_map.metadata.get(key)
    if source is None or source not in rows:
        return None
    values = pd.to_numeric(rows[source], errors="coerce").dropna()
    if values.empty:
        return None
    return float(values.mode().iloc[0]) * column_map.scale.get(key, 1.0)


def synchronize_streams(
    streams: Mapping[str, pd.DataFrame],
    rate: float = DEFAULT_RATE_HZ,
    metadata: FlightMetadata | None = None,
) -> FlightRecord:
    """Align per-sensor streams on a common uniform timeline.

    Each output value is the nearest source sample when one lies within half
    a period of the output time, else the linear interpolation between the
    neighbouring source samples. Times outside the common window are dropped.

    Args:
        streams: Sensor name -> frame with a time_s column plus value columns.
        rate: Output rate in Hz.
        metadata: Flight settings for the resulting record.

    Returns:
        FlightRecord on the uniform timeline.
    """
    if rate <= 0:
        raise InvalidArgument(f"rate must be positive, got {rate}")
    if not streams:
        raise NoOverlap("No streams to synchronize")

    for name, stream in streams.items():
        if TIME not in stream:
            raise MissingColumn(TIME)
        if len(stream) and np.any(np.diff(stream[TIME].to_numpy(dtype=float)) <= 0):
            raise NonMonotonicTime(f"Stream {name} is not time-ordered")

    starts = [s[TIME].iloc[0] for s in streams.values() if len(s)]
    ends = [s[TIME].iloc[-1] for s in streams.values() if len(s)]
    if len(starts) < len(streams):
        raise NoOverlap("At least one stream is empty")
    start, end = float(max(starts)), float(min(ends))
    if start > end:
        raise NoOverlap(f"Common window is empty ({start:.3f} s > {end:.3f} s)")

    period = 1.0 / rate
    count = int(math.floor((end - start) * rate + 1e-9)) + 1
    timeline = start + np.arange(count) * period

    columns = {TIME: timeline}
    for stream in streams.values():
        source_t = stream[TIME].to_numpy(dtype=float)
        nearest = _nearest_index(source_t, timeline)
        within = np.abs(source_t[nearest] - timeline) <= period / 2 + 1e-12
        for column in stream.columns:
            if column == TIME:
                continue
            values = pd.to_numeric(stream[column], errors="coerce").to_numpy(dtype=float)
            columns[column] = np.where(
                within, values[nearest], np.interp(timeline, source_t, values)
            )

    meta = metadata or FlightMetadata(flight_id=0)
    frame, skipped = _clean_frame(pd.DataFrame(columns), "synchronized streams", 1.0)
    return FlightRecord(
        flight_id=meta.flight_id,
        frame=frame,
        payload_mass=meta.payload_mass,
        target_altitude=meta.target_altitude,
        target_speed=meta.target_speed,
        skipped_rows=skipped,
    )


def _nearest_index(source_t: np.ndarray, targets: np.ndarray) -> np.ndarray:
    right = np.clip(np.searchsorted(source_t, targets), 0, len(source_t) - 1)
    left = np.clip(right - 1, 0, len(source_t) - 1)
    # Ties go to the earlier sample
    use_left = np.abs(targets - source_t[left]) <= np.abs(source_t[right] - targets)
    return np.where(use_left, left, right)
