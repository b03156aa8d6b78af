"""Automatic takeoff / cruise / landing segmentation of a flight.

Boundaries come from altitude and vertical speed. Trigger conditions must
hold for min_dwell seconds; shorter blips are treated as sensor jitter.
"""

from collections.abc import Iterable
from dataclasses import asdict, dataclass
from enum import StrEnum
from pathlib import Path

import numpy as np

from aeroamp.config import read_json
from aeroamp.errors import AeroampError, AmbiguousProfile, MalformedInput, NoFlightDetected
from aeroamp.logging import get_logger
from aeroamp.telemetry import FlightRecord, FlightSummary, summarize

# A flight must climb above this to count as airborne
AIRBORNE_ALTITUDE_M = 3.0


class Regime(StrEnum):
    TAKEOFF = "takeoff"
    CRUISE = "cruise"
    LANDING = "landing"


REGIMES = (Regime.TAKEOFF, Regime.CRUISE, Regime.LANDING)


@dataclass(frozen=True)
class SegmentationParams:
    """Thresholds of the regime detector (speeds m/s, altitudes m, times s)."""

    v_up_thresh: float = 0.3
    v_down_thresh: float = 0.3
    v_settle: float = 0.5
    alt_tol: float = 2.0
    min_dwell: float = 1.0
    touchdown_altitude: float = 1.0
    touchdown_speed: float = 0.2

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, path: str | Path) -> "SegmentationParams":
        data = read_json(path)
        valid = set(cls.__dataclass_fields__)
        try:
            return cls(**{k: float(v) for k, v in data.items() if k in valid})
        except (AttributeError, TypeError, ValueError) as e:
            raise MalformedInput(path, f"bad segmentation parameters ({e})") from e


@dataclass(frozen=True)
class RegimeSlice:
    """One regime of a flight.

    Covers samples [start_index, end_index); its time span runs to the next
    slice's first sample, t[end_index], so adjacent slices share a boundary.
    """

    regime: Regime
    start_index: int
    end_index: int
    start_time: float
    end_time: float
    duration: float
    mean_power: float
    energy: float

    def to_dict(self) -> dict:
        return {
            "regime": str(self.regime),
            "start_s": self.start_time,
            "end_s": self.end_time,
            "duration_s": self.duration,
            "mean_power_w": self.mean_power,
            "energy_j": self.energy,
        }


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Half-open [start, end) index runs where mask is True."""
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[0::2].tolist(), edges[1::2].tolist()))


def _hysteresis(mask: np.ndarray, dwell: int) -> np.ndarray:
    """Close False gaps shorter than dwell, then drop True runs shorter than dwell."""
    mask = mask.copy()
    runs = _runs(mask)
    for (_, prev_end), (next_start, _) in zip(runs, runs[1:]):
        if next_start - prev_end < dwell:
            mask[prev_end:next_start] = True
    for start, end in _runs(mask):
        if end - start < dwell:
            mask[start:end] = False
    return mask


def dwell_samples(times: np.ndarray, min_dwell: float) -> int:
    """Number of samples spanning min_dwell at the flight's median cadence."""
    if len(times) < 2:
        return 1
    dt = float(np.median(np.diff(times)))
    return max(1, int(round(min_dwell / dt)))


def detect_regimes(flight: FlightRecord, params: SegmentationParams | None = None) -> list[RegimeSlice]:
    """Split a flight into takeoff, cruise and landing.

    Takeoff starts at the first sustained climb and ends when the drone is
    near the target altitude with a settled vertical speed. Landing starts at
    the last sustained descent and ends at touchdown. Cruise is in between.

    Args:
        flight: Flight with altitude and vertical speed channels.
        params: Detector thresholds; defaults when omitted.

    Returns:
        Three contiguous, time-ordered slices.
    """
    params = params or SegmentationParams()
    times = flight.times
    z = flight.altitude
    vz = flight.vertical_speed
    n = len(times)
    dwell = dwell_samples(times, params.min_dwell)

    if n < 3 * dwell:
        raise AmbiguousProfile(f"only {n} samples, need {3 * dwell}")
    if not np.nanmax(z) > AIRBORNE_ALTITUDE_M:
        raise NoFlightDetected(f"Flight {flight.flight_id} never exceeds {AIRBORNE_ALTITUDE_M} m")

    climb = _runs(_hysteresis(vz > params.v_up_thresh, dwell))
    descent = _runs(_hysteresis(vz < -params.v_down_thresh, dwell))
    if not climb:
        raise AmbiguousProfile("no sustained climb")
    if not descent:
        raise AmbiguousProfile("no sustained descent")
    if any(d_end <= c_start for _, d_end in descent for c_start, _ in climb):
        raise AmbiguousProfile("descent followed by another climb")

    takeoff_start = climb[0][0]

    target = flight.target_altitude
    if target is None:
        target = float(np.nanmax(z))
    settled = _hysteresis(np.abs(vz) < params.v_settle, dwell)
    at_altitude = (z >= target - params.alt_tol) & settled
    candidates = np.flatnonzero(at_altitude[takeoff_start:])
    if candidates.size == 0:
        raise AmbiguousProfile("takeoff never settles at cruise altitude")
    takeoff_end = takeoff_start + int(candidates[0])

    landing_start = descent[-1][0]
    if landing_start <= takeoff_end:
        raise AmbiguousProfile("no cruise between takeoff and landing")

    on_ground = _hysteresis(
        (z < params.touchdown_altitude) & (np.abs(vz) < params.touchdown_speed), dwell
    )
    grounded = np.flatnonzero(on_ground[landing_start:])
    touchdown = landing_start + int(grounded[0]) if grounded.size else n - 1
    if touchdown <= landing_start:
        raise AmbiguousProfile("landing has no duration")

    bounds = [
        (Regime.TAKEOFF, takeoff_start, takeoff_end),
        (Regime.CRUISE, takeoff_end, landing_start),
        (Regime.LANDING, landing_start, touchdown),
    ]
    return [_make_slice(flight, regime, start, end) for regime, start, end in bounds]


def _make_slice(flight: FlightRecord, regime: Regime, start: int, end: int) -> RegimeSlice:
    times = flight.times
    summary = summarize(flight.power[start : end + 1], times[start : end + 1])
    return RegimeSlice(
        regime=regime,
        start_index=start,
        end_index=end,
        start_time=float(times[start]),
        end_time=float(times[end]),
        duration=summary.duration,
        mean_power=summary.mean_power,
        energy=summary.energy,
    )


def regime_summary(flight: FlightRecord, slice_: RegimeSlice) -> FlightSummary:
    """Duration, mean power and energy over a slice's time span."""
    end = min(slice_.end_index, len(flight) - 1)
    return summarize(
        flight.power[slice_.start_index : end + 1],
        flight.times[slice_.start_index : end + 1],
    )


def segment_batch(
    flights: Iterable[FlightRecord],
    params: SegmentationParams | None = None,
) -> tuple[list[tuple[FlightRecord, list[RegimeSlice]]], list[tuple[int, str]]]:
    """Segment many flights, collecting rejects instead of failing.

    Returns:
        (segmented flights with their slices, rejected (flight_id, reason) pairs)
    """
    logger = get_logger()
    segmented, rejects = [], []
    for flight in flights:
        try:
            segmented.append((flight, detect_regimes(flight, params)))
        except AeroampError as e:
            logger.warning(f"Flight {flight.flight_id} rejected: {e}")
            rejects.append((flight.flight_id, str(e)))
    logger.info(f"Segmented {len(segmented)} flights, rejected {len(rejects)}")
    return segmented, rejects
