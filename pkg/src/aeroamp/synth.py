"""Synthetic trapezoid delivery flights with a known power law.

Each flight idles on the ground, climbs vertically to its altitude, cruises
a fixed distance, descends and idles again. Regime power follows
b2 * P_i^2 + b1 * P_i + b0 plus optional per-flight and per-sample noise,
so downstream fits can be checked against ground truth.
"""

import itertools
import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from aeroamp.config import read_json
from aeroamp.errors import InvalidSpec
from aeroamp.logging import get_logger
from aeroamp.physics import DroneConfig, Environment, induced_power
from aeroamp.segmentation import AIRBORNE_ALTITUDE_M, REGIMES, Regime
from aeroamp.telemetry import TIME, FlightRecord


@dataclass(frozen=True)
class PowerLaw:
    b1: float
    b0: float
    b2: float = 0.0

    def __call__(self, p_induced: float) -> float:
        return self.b2 * p_induced**2 + self.b1 * p_induced + self.b0

    def to_dict(self) -> dict:
        data = {"b1": self.b1, "b0": self.b0}
        if self.b2:
            data["b2"] = self.b2
        return data


@dataclass(frozen=True)
class SynthSpec:
    """Generator settings; see from_dict for the JSON field names."""

    n_flights: int = 10
    seed: int = 0
    sample_rate_hz: float = 5.0
    payloads_kg: tuple[float, ...] = (0.0, 0.25, 0.5)
    altitudes_m: tuple[float, ...] = (25.0, 50.0, 75.0, 100.0)
    speeds_ms: tuple[float, ...] = (4.0, 6.0, 8.0, 10.0, 12.0)
    cruise_distance_m: float = 300.0
    takeoff_speed_ms: float = 2.5
    landing_speed_ms: float = 2.0
    ground_s: float = 5.0
    idle_power_w: float | None = None
    voltage_v: float = 24.0
    laws: Mapping[Regime, PowerLaw] = field(
        default_factory=lambda: {
            Regime.TAKEOFF: PowerLaw(1.97, 13.8),
            Regime.CRUISE: PowerLaw(1.69, 16.8),
            Regime.LANDING: PowerLaw(1.62, -4.7),
        }
    )
    flight_noise_w: float = 0.0
    sample_noise_w: float = 0.0
    wind_speed_ms: float = 0.0

    def __post_init__(self):
        if self.n_flights < 1:
            raise InvalidSpec("n_flights must be at least 1")
        if not self.sample_rate_hz > 0:
            raise InvalidSpec("sample_rate_hz must be positive")
        if not (self.payloads_kg and self.altitudes_m and self.speeds_ms):
            raise InvalidSpec("payloads_kg, altitudes_m and speeds_ms need at least one value")
        if min(self.payloads_kg) < 0:
            raise InvalidSpec("payloads must be non-negative")
        if min(self.altitudes_m) <= AIRBORNE_ALTITUDE_M:
            raise InvalidSpec(f"altitudes must exceed {AIRBORNE_ALTITUDE_M} m")
        if min(*self.speeds_ms, self.takeoff_speed_ms, self.landing_speed_ms) <= 0:
            raise InvalidSpec("speeds must be positive")
        if not self.cruise_distance_m > 0:
            raise InvalidSpec("cruise_distance_m must be positive; a flight needs a cruise")
        if self.ground_s < 0 or self.voltage_v <= 0:
            raise InvalidSpec("ground_s must be non-negative and voltage_v positive")
        if min(self.flight_noise_w, self.sample_noise_w, self.wind_speed_ms) < 0:
            raise InvalidSpec("noise and wind levels must be non-negative")
        if set(self.laws) != set(REGIMES):
            raise InvalidSpec("laws need takeoff, cruise and landing")

    @classmethod
    def from_dict(cls, data: Mapping) -> "SynthSpec":
        valid = set(cls.__dataclass_fields__)
        unknown = set(data) - valid
        if unknown:
            raise InvalidSpec(f"unknown fields: {sorted(unknown)}")
        values = dict(data)
        try:
            for key in ("payloads_kg", "altitudes_m", "speeds_ms"):
                if key in values:
                    values[key] = tuple(float(v) for v in values[key])
            if "laws" in values:
                values["laws"] = _parse_laws(values["laws"])
            return cls(**values)
        except (TypeError, ValueError, KeyError) as e:
            raise InvalidSpec(str(e)) from e

    @classmethod
    def from_json(cls, path: str | Path) -> "SynthSpec":
        return cls.from_dict(read_json(path))

    def to_dict(self) -> dict:
        return {
            "n_flights": self.n_flights,
            "seed": self.seed,
            "sample_rate_hz": self.sample_rate_hz,
            "payloads_kg": list(self.payloads_kg),
            "altitudes_m": list(self.altitudes_m),
            "speeds_ms": list(self.speeds_ms),
            "cruise_distance_m": self.cruise_distance_m,
            "takeoff_speed_ms": self.takeoff_speed_ms,
            "landing_speed_ms": self.landing_speed_ms,
            "ground_s": self.ground_s,
            "idle_power_w": self.idle_power_w,
            "voltage_v": self.voltage_v,
            "laws": {str(r): self.laws[r].to_dict() for r in REGIMES},
            "flight_noise_w": self.flight_noise_w,
            "sample_noise_w": self.sample_noise_w,
            "wind_speed_ms": self.wind_speed_ms,
        }


def _parse_laws(data: Mapping) -> dict[Regime, PowerLaw]:
    """Per-regime laws, or one {b1, b0} shared by all regimes."""
    if "b1" in data:
        shared = PowerLaw(**{k: float(v) for k, v in data.items()})
        return {r: shared for r in REGIMES}
    return {Regime(r): PowerLaw(**{k: float(v) for k, v in law.items()}) for r, law in data.items()}


def _trajectory(times: np.ndarray, altitude: float, speed: float, spec: SynthSpec) -> dict[str, np.ndarray]:
    """Kinematics and phase index (0 ground, 1 climb, 2 cruise, 3 descent, 4 ground)."""
    climb = altitude / spec.takeoff_speed_ms
    cruise = spec.cruise_distance_m / speed
    descent = altitude / spec.landing_speed_ms
    edges = np.cumsum([spec.ground_s, climb, cruise, descent])
    phase = np.searchsorted(edges, times, side="right")

    z = np.select(
        [phase == 1, phase == 2, phase == 3],
        [
            spec.takeoff_speed_ms * (times - edges[0]),
            np.full_like(times, altitude),
            altitude - spec.landing_speed_ms * (times - edges[2]),
        ],
        0.0,
    )
    x = np.clip(speed * (times - edges[1]), 0.0, spec.cruise_distance_m)
    vz = np.select([phase == 1, phase == 3], [spec.takeoff_speed_ms, -spec.landing_speed_ms], 0.0)
    vx = np.where(phase == 2, speed, 0.0)
    return {"phase": phase, "z": np.clip(z, 0.0, altitude), "x": x, "vz": vz, "vx": vx}


def generate_flights(
    spec: SynthSpec,
    config: DroneConfig | None = None,
    env: Environment | None = None,
) -> list[FlightRecord]:
    """Build the flights in memory, cycling through the speed x altitude x payload grid.

    Payload varies fastest so any run of consecutive flights spans several
    induced powers.
    """
    config = config or DroneConfig.default()
    env = env or Environment()
    rng = np.random.default_rng(spec.seed)
    grid = list(itertools.product(spec.speeds_ms, spec.altitudes_m, spec.payloads_kg))

    flights = []
    for flight_id in range(1, spec.n_flights + 1):
        speed, altitude, payload = grid[(flight_id - 1) % len(grid)]
        p_i = induced_power(config.empty_mass + payload, env, config)
        level = {r: spec.laws[r](p_i) + rng.normal(0.0, spec.flight_noise_w) for r in REGIMES}

        total = (
            2 * spec.ground_s
            + altitude / spec.takeoff_speed_ms
            + spec.cruise_distance_m / speed
            + altitude / spec.landing_speed_ms
        )
        times = np.arange(int(np.floor(total * spec.sample_rate_hz)) + 1) / spec.sample_rate_hz
        track = _trajectory(times, altitude, speed, spec)

        takeoff, cruise, landing = (level[r] for r in REGIMES)
        ground = spec.idle_power_w
        power = np.choose(
            track["phase"],
            [
                takeoff if ground is None else ground,
                takeoff,
                cruise,
                landing,
                landing if ground is None else ground,
            ],
        ).astype(float)
        power = power + rng.normal(0.0, spec.sample_noise_w, size=len(times))
        wind = rng.uniform(0.0, spec.wind_speed_ms)

        frame = pd.DataFrame({
            TIME: times,
            "voltage_v": spec.voltage_v,
            "current_a": power / spec.voltage_v,
            "pos_x_m": track["x"],
            "pos_y_m": 0.0,
            "pos_z_m": track["z"],
            "vel_x_ms": track["vx"],
            "vel_y_ms": 0.0,
            "vel_z_ms": track["vz"],
            "wind_speed_ms": wind,
            "wind_dir_deg": 0.0,
        })
        flights.append(
            FlightRecord(
                flight_id=flight_id,
                frame=frame,
                payload_mass=payload,
                target_altitude=altitude,
                target_speed=speed,
            )
        )
    get_logger().info(f"Generated {len(flights)} synthetic flights (seed {spec.seed})")
    return flights


def write_flights(flights: list[FlightRecord], out_dir: str | Path) -> list[Path]:
    """Write one CSV per flight plus metadata.json.

    Returns:
        Written paths, metadata.json first.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries, paths = [], []
    for flight in flights:
        name = f"flight_{flight.flight_id}.csv"
        flight.frame.to_csv(out_dir / name, index=False)
        paths.append(out_dir / name)
        entries.append({
            "flight_id": flight.flight_id,
            "payload_kg": flight.payload_mass,
            "altitude_m": flight.target_altitude,
            "speed_ms": flight.target_speed,
            "csv_path": name,
        })
    metadata = out_dir / "metadata.json"
    with open(metadata, "w") as f:
        json.dump(entries, f, indent=2)
    return [metadata, *paths]
