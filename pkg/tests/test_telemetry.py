"""Tests for telemetry ingestion and energy integration."""

import numpy as np
import pandas as pd
import pytest

from aeroamp.errors import (
    EmptyFlight,
    MissingColumn,
    NoOverlap,
    NonMonotonicTime,
    TooFewSamples,
    TooManyMalformedRows,
)
from aeroamp.telemetry import (
    MANDATORY_COLUMNS,
    ColumnMap,
    FlightMetadata,
    FlightRecord,
    TelemetrySample,
    electrical_power,
    integrate_energy,
    load_dataset,
    load_flight_batch,
    parse_flight_csv,
    summarize,
    summarize_flight,
    synchronize_streams,
)


def _canonical_frame(n=200, rate=5.0, power=240.0):
    times = np.arange(n) / rate
    return pd.DataFrame({
        "time_s": times,
        "voltage_v": 24.0,
        "current_a": power / 24.0,
        "pos_x_m": 0.0,
        "pos_y_m": 0.0,
        "pos_z_m": np.linspace(0.0, 50.0, n),
        "vel_x_ms": 0.0,
        "vel_y_ms": 0.0,
        "vel_z_ms": 1.0,
    })


class TestEnergy:
    """Power and trapezoidal energy."""

    def test_electrical_power(self):
        """Test power is voltage times current."""
        sample = TelemetrySample(
            time=0.0, voltage=24.0, current=10.0, position=(0, 0, 0), velocity=(0, 0, 0)
        )
        assert electrical_power(sample) == 240.0

    def test_negative_current_passes_through(self):
        """Test regenerative current yields negative power."""
        sample = TelemetrySample(
            time=0.0, voltage=24.0, current=-1.0, position=(0, 0, 0), velocity=(0, 0, 0)
        )
        assert electrical_power(sample) == -24.0

    def test_constant_power(self):
        """Test 100 W over 10 s is 1000 J."""
        times = np.linspace(0.0, 10.0, 51)
        assert integrate_energy(np.full(51, 100.0), times) == pytest.approx(1000.0)

    def test_linear_ramp_is_exact(self):
        """Test the trapezoid rule is exact on a linear ramp."""
        times = np.linspace(0.0, 4.0, 9)
        assert integrate_energy(50.0 * times, times) == pytest.approx(400.0)

    def test_linear_in_power(self):
        """Test the integral of a P + b Q is a E(P) + b E(Q)."""
        rng = np.random.default_rng(0)
        times = np.cumsum(rng.uniform(0.1, 0.3, 100))
        p, q = rng.uniform(100.0, 400.0, 100), rng.uniform(-50.0, 50.0, 100)
        combined = integrate_energy(2.5 * p - 0.7 * q, times)
        assert combined == pytest.approx(2.5 * integrate_energy(p, times) - 0.7 * integrate_energy(q, times))

    def test_time_shift_invariant(self):
        """Test moving every timestamp by a constant keeps the energy."""
        rng = np.random.default_rng(1)
        times = np.cumsum(rng.uniform(0.1, 0.3, 100))
        power = rng.uniform(100.0, 400.0, 100)
        assert integrate_energy(power, times + 1000.0) == pytest.approx(integrate_energy(power, times), rel=1e-9)

    def test_single_sample(self):
        """Test one sample cannot be integrated."""
        with pytest.raises(TooFewSamples):
            integrate_energy([100.0], [0.0])

    def test_non_monotonic_time(self):
        """Test decreasing timestamps are rejected."""
        with pytest.raises(NonMonotonicTime):
            integrate_energy([1.0, 1.0, 1.0], [0.0, 2.0, 1.0])

    def test_summary_mean_power(self):
        """Test mean power is energy over duration."""
        times = np.array([0.0, 1.0, 3.0])
        summary = summarize(np.array([100.0, 200.0, 200.0]), times)
        assert summary.duration == 3.0
        assert summary.energy == pytest.approx(550.0)
        assert summary.mean_power == pytest.approx(550.0 / 3.0)

    def test_summarize_flight(self):
        """Test whole-flight summary of a constant-power flight."""
        flight = FlightRecord(flight_id=1, frame=_canonical_frame(n=51, power=240.0))
        summary = summarize_flight(flight)
        assert summary.duration == pytest.approx(10.0)
        assert summary.energy == pytest.approx(2400.0)


class TestFlightRecord:
    """FlightRecord accessors."""

    def test_empty_frame(self):
        """Test a flight needs at least one sample."""
        with pytest.raises(EmptyFlight):
            FlightRecord(flight_id=1, frame=_canonical_frame().iloc[0:0])

    def test_samples_iterate_in_order(self):
        """Test samples() yields TelemetrySample objects."""
        flight = FlightRecord(flight_id=1, frame=_canonical_frame(n=5))
        samples = list(flight.samples())
        assert len(samples) == 5
        assert [s.time for s in samples] == pytest.approx([0.0, 0.2, 0.4, 0.6, 0.8])
        assert samples[0].wind_speed is None

    def test_mean_wind_defaults_to_zero(self):
        """Test flights without a wind channel report zero wind."""
        assert FlightRecord(flight_id=1, frame=_canonical_frame(n=5)).mean_wind == 0.0


class TestParseFlightCsv:
    """Single-flight CSV parsing."""

    def test_parse(self, tmp_path):
        """Test a clean CSV parses with metadata attached."""
        path = tmp_path / "flight.csv"
        _canonical_frame().to_csv(path, index=False)
        flight = parse_flight_csv(path, FlightMetadata(7, payload_mass=0.5, target_altitude=50.0))
        assert flight.flight_id == 7
        assert flight.payload_mass == 0.5
        assert len(flight) == 200
        assert flight.skipped_rows == 0

    def test_missing_column(self, tmp_path):
        """Test a CSV without current is rejected."""
        path = tmp_path / "flight.csv"
        _canonical_frame().drop(columns=["current_a"]).to_csv(path, index=False)
        with pytest.raises(MissingColumn) as exc:
            parse_flight_csv(path, FlightMetadata(1))
        assert exc.value.column == "current_a"

    def test_malformed_row_skipped(self, tmp_path):
        """Test one bad row in 200 is within tolerance."""
        frame = _canonical_frame().astype(object)
        frame.loc[10, "voltage_v"] = "n/a"
        path = tmp_path / "flight.csv"
        frame.to_csv(path, index=False)
        flight = parse_flight_csv(path, FlightMetadata(1))
        assert flight.skipped_rows == 1
        assert len(flight) == 199

    def test_too_many_malformed_rows(self, tmp_path):
        """Test a 5% malformed share exceeds the 1% tolerance."""
        frame = _canonical_frame().astype(object)
        frame.loc[0:9, "current_a"] = "garbage"
        path = tmp_path / "flight.csv"
        frame.to_csv(path, index=False)
        with pytest.raises(TooManyMalformedRows) as exc:
            parse_flight_csv(path, FlightMetadata(1))
        assert exc.value.skipped == 10
        assert exc.value.total == 200

    def test_duplicate_timestamps_dropped(self, tmp_path):
        """Test the first of duplicated timestamps is kept."""
        frame = _canonical_frame(n=10)
        frame = pd.concat([frame, frame.iloc[[3]].assign(current_a=99.0)])
        path = tmp_path / "flight.csv"
        frame.to_csv(path, index=False)
        flight = parse_flight_csv(path, FlightMetadata(1))
        assert len(flight) == 10
        assert np.all(np.diff(flight.times) > 0)
        assert flight.frame["current_a"].iloc[3] == pytest.approx(10.0)

    def test_unsorted_rows_are_sorted(self, tmp_path):
        """Test rows come back in time order."""
        path = tmp_path / "flight.csv"
        _canonical_frame(n=20).iloc[::-1].to_csv(path, index=False)
        flight = parse_flight_csv(path, FlightMetadata(1))
        assert np.all(np.diff(flight.times) > 0)

    def test_column_map_renames(self, tmp_path):
        """Test a column map adapts foreign headers."""
        renames = {c: c.upper() for c in MANDATORY_COLUMNS}
        path = tmp_path / "flight.csv"
        _canonical_frame(n=20).rename(columns=renames).to_csv(path, index=False)
        column_map = ColumnMap(columns={v: k for k, v in renames.items()})
        flight = parse_flight_csv(path, FlightMetadata(1), column_map)
        assert len(flight) == 20


class TestBatchLoading:
    """Metadata batches and combined dataset files."""

    def test_load_flight_batch(self, tmp_path):
        """Test relative csv paths resolve against the given data dir."""
        for flight_id in (1, 2):
            _canonical_frame(n=20).to_csv(tmp_path / f"f{flight_id}.csv", index=False)
        metadata = tmp_path / "metadata.json"
        metadata.write_text(
            '[{"flight_id": 1, "payload_kg": 0.25, "altitude_m": 50, "speed_ms": 8, "csv_path": "f1.csv"},'
            ' {"flight_id": 2, "csv_path": "f2.csv"}]'
        )
        flights = load_flight_batch(metadata, data_dir=tmp_path)
        assert [f.flight_id for f in flights] == [1, 2]
        assert flights[0].payload_mass == 0.25
        assert flights[0].target_speed == 8.0
        assert flights[1].target_altitude is None

    def test_load_published_layout(self, tmp_path):
        """Test the shipped map splits a combined file and converts grams."""
        parts = []
        for flight_id, payload_g in ((1, 0), (2, 250)):
            base = _canonical_frame(n=20)
            parts.append(pd.DataFrame({
                "flight": flight_id,
                "time": base["time_s"],
                "battery_voltage": base["voltage_v"],
                "battery_current": base["current_a"],
                "position_x": 0.0,
                "position_y": 0.0,
                "position_z": base["pos_z_m"],
                "velocity_x": 0.0,
                "velocity_y": 0.0,
                "velocity_z": base["vel_z_ms"],
                "wind_speed": 1.5,
                "wind_angle": 90.0,
                "payload": payload_g,
                "speed": 10,
                "altitude": 50,
            }))
        path = tmp_path / "flights.csv"
        pd.concat(parts).to_csv(path, index=False)

        flights = load_dataset(path, ColumnMap.published_dataset())
        assert [f.flight_id for f in flights] == [1, 2]
        assert flights[1].payload_mass == pytest.approx(0.25)
        assert flights[1].target_altitude == 50.0
        assert flights[1].target_speed == 10.0
        assert flights[1].mean_wind == pytest.approx(1.5)
        assert len(flights[0]) == 20


class TestSynchronizeStreams:
    """Stream alignment onto a uniform timeline."""

    @staticmethod
    def _streams(times_power, times_nav):
        power = pd.DataFrame({
            "time_s": times_power,
            "voltage_v": 24.0,
            "current_a": 2.0 * times_power,
        })
        nav = pd.DataFrame({
            "time_s": times_nav,
            "pos_x_m": 0.0,
            "pos_y_m": 0.0,
            "pos_z_m": times_nav,
            "vel_x_ms": 0.0,
            "vel_y_ms": 0.0,
            "vel_z_ms": 1.0,
        })
        return {"power": power, "nav": nav}

    def test_downsample_keeps_every_other_sample(self):
        """Test a 10 Hz ramp resampled to 5 Hz keeps every other sample."""
        times = np.arange(21) / 10.0
        flight = synchronize_streams(self._streams(times, times), rate=5.0)
        assert len(flight) == 11
        assert flight.frame["current_a"].to_numpy() == pytest.approx(2.0 * times[::2])

    def test_interpolates_between_sparse_samples(self):
        """Test gaps wider than half a period are linearly interpolated."""
        fine = np.arange(21) / 10.0
        sparse = np.array([0.0, 1.0, 2.0])
        flight = synchronize_streams(self._streams(fine, sparse), rate=5.0)
        assert flight.altitude == pytest.approx(np.arange(11) / 5.0)

    def test_common_window(self):
        """Test the timeline covers only the overlap of all streams."""
        flight = synchronize_streams(
            self._streams(np.arange(0, 31) / 10.0, np.arange(10, 41) / 10.0), rate=5.0
        )
        assert flight.times[0] == pytest.approx(1.0)
        assert flight.times[-1] == pytest.approx(3.0)

    def test_disjoint_windows(self):
        """Test non-overlapping streams are rejected."""
        with pytest.raises(NoOverlap):
            synchronize_streams(
                self._streams(np.arange(10) / 10.0, 5.0 + np.arange(10) / 10.0)
            )

    def test_energy_conserved(self):
        """Test resampling a smooth power trace changes energy by under 1%."""
        fine = np.arange(0, 601) / 50.0
        streams = self._streams(fine, fine)
        streams["power"]["current_a"] = 10.0 + 2.0 * np.sin(fine)
        flight = synchronize_streams(streams, rate=5.0)
        analytic = 24.0 * (10.0 * 12.0 + 2.0 * (1.0 - np.cos(12.0)))
        assert summarize_flight(flight).energy == pytest.approx(analytic, rel=0.01)
