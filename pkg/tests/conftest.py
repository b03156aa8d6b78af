"""Shared fixtures: piecewise flight profiles and synthetic observations."""

import numpy as np
import pandas as pd
import pytest

from aeroamp.estimation import RegimeObservation
from aeroamp.segmentation import REGIMES
from aeroamp.telemetry import FlightRecord


def make_flight(legs, rate=5.0, power=200.0, flight_id=1, payload=0.0, target_altitude=None, voltage=24.0):
    """Flight built from (duration_s, vertical_speed) legs starting on the ground.

    The sample at a leg boundary belongs to the next leg; samples past the
    last leg are on the ground at rest.
    """
    durations = np.array([d for d, _ in legs], dtype=float)
    speeds = np.array([v for _, v in legs], dtype=float)
    starts = np.concatenate(([0.0], np.cumsum(durations)[:-1]))
    total = float(durations.sum())
    times = np.arange(int(round(total * rate)) + 1) / rate

    leg = np.searchsorted(np.cumsum(durations), times, side="right")
    vz = np.where(leg < len(legs), speeds[np.minimum(leg, len(legs) - 1)], 0.0)
    z = sum(v * np.clip(times - s, 0.0, d) for s, d, v in zip(starts, durations, speeds))
    z = np.clip(z, 0.0, None)
    power = np.broadcast_to(np.asarray(power, dtype=float), times.shape)

    frame = pd.DataFrame({
        "time_s": times,
        "voltage_v": voltage,
        "current_a": power / voltage,
        "pos_x_m": 0.0,
        "pos_y_m": 0.0,
        "pos_z_m": z,
        "vel_x_ms": 0.0,
        "vel_y_ms": 0.0,
        "vel_z_ms": vz,
    })
    return FlightRecord(
        flight_id=flight_id,
        frame=frame,
        payload_mass=payload,
        target_altitude=target_altitude,
    )


def make_observations(p_induced, mean_power, durations=None, regimes=REGIMES):
    """One observation per flight and regime from parallel arrays."""
    p_induced = np.asarray(p_induced, dtype=float)
    mean_power = np.asarray(mean_power, dtype=float)
    if durations is None:
        durations = np.full(len(p_induced), 30.0)
    observations = []
    for i, (p, y, t) in enumerate(zip(p_induced, mean_power, durations), start=1):
        for regime in regimes:
            observations.append(
                RegimeObservation(
                    flight_id=i,
                    regime=regime,
                    p_induced=float(p),
                    total_mass=3.0,
                    target_speed=8.0,
                    target_altitude=50.0,
                    duration=float(t),
                    mean_power=float(y),
                )
            )
    return observations


@pytest.fixture
def trapezoid_legs():
    """Climb at 2.5 m/s to 100 m, cruise 60 s, descend at 2.0 m/s."""
    return [(40.0, 2.5), (60.0, 0.0), (50.0, -2.0)]


@pytest.fixture
def isolated_config(tmp_path):
    """Point the config file at a temporary directory."""
    from unittest.mock import patch

    config_dir = tmp_path / "config"
    with patch("aeroamp.config.CONFIG_FILE", config_dir / "config.json"), \
         patch("aeroamp.config.CONFIG_DIR", config_dir):
        yield config_dir
