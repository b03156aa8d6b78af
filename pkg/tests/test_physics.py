"""Tests for induced power at hover."""

import numpy as np
import pytest

from aeroamp.errors import InvalidProfile, NonPositiveMass
from aeroamp.physics import DroneConfig, Environment, hover_point, induced_power


@pytest.fixture
def unit_rotor():
    return DroneConfig(empty_mass=1.0, rotor_area_total=1.0)


class TestInducedPower:
    """Momentum-theory induced power."""

    def test_one_kilogram_unit_area(self, unit_rotor):
        """Test 1 kg under 1 m^2 of rotor needs about 19.63 W."""
        assert induced_power(1.0, Environment(), unit_rotor) == pytest.approx(19.63, rel=1e-3)

    def test_scales_with_mass_to_one_and_a_half(self, unit_rotor):
        """Test doubling the mass multiplies power by 2^1.5."""
        env = Environment()
        ratio = induced_power(4.0, env, unit_rotor) / induced_power(2.0, env, unit_rotor)
        assert ratio == pytest.approx(2.0**1.5)

    def test_denser_air_needs_less_power(self, unit_rotor):
        """Test power falls as 1/sqrt(rho)."""
        thin = induced_power(2.0, Environment(air_density=1.0), unit_rotor)
        dense = induced_power(2.0, Environment(air_density=4.0), unit_rotor)
        assert thin / dense == pytest.approx(2.0)

    def test_array_input(self, unit_rotor):
        """Test vectorised masses match scalar calls."""
        env = Environment()
        masses = np.array([1.0, 2.5, 4.0])
        expected = [induced_power(m, env, unit_rotor) for m in masses]
        assert induced_power(masses, env, unit_rotor) == pytest.approx(expected)

    @pytest.mark.parametrize("mass", [0.0, -1.0])
    def test_non_positive_mass(self, unit_rotor, mass):
        """Test zero and negative masses are rejected."""
        with pytest.raises(NonPositiveMass):
            induced_power(mass, Environment(), unit_rotor)

    def test_non_positive_mass_in_array(self, unit_rotor):
        """Test one bad mass rejects the whole array."""
        with pytest.raises(NonPositiveMass):
            induced_power(np.array([1.0, 0.0]), Environment(), unit_rotor)


class TestHoverPoint:
    """Thrust, induced velocity and power together."""

    def test_power_is_thrust_times_velocity(self, unit_rotor):
        """Test P_i = T * v_i and matches induced_power."""
        env = Environment()
        point = hover_point(3.0, env, unit_rotor)
        assert point.thrust == pytest.approx(3.0 * 9.81)
        assert point.induced_power == pytest.approx(point.thrust * point.induced_velocity)
        assert point.induced_power == pytest.approx(induced_power(3.0, env, unit_rotor))

    def test_identities_over_random_inputs(self):
        """Test P_i = T v_i = (m g)^1.5 / sqrt(2 rho A) across random drones."""
        rng = np.random.default_rng(3)
        for _ in range(200):
            mass = rng.uniform(0.5, 25.0)
            env = Environment(air_density=rng.uniform(0.9, 1.3), gravity=rng.uniform(9.78, 9.83))
            config = DroneConfig(empty_mass=1.0, rotor_area_total=rng.uniform(0.05, 2.0))
            point = hover_point(mass, env, config)
            closed_form = (mass * env.gravity) ** 1.5 / np.sqrt(2.0 * env.air_density * config.rotor_area_total)
            assert point.induced_power == pytest.approx(closed_form, rel=1e-12)
            assert induced_power(mass, env, config) == pytest.approx(closed_form, rel=1e-12)
            assert point.thrust * point.induced_velocity == pytest.approx(point.induced_power, rel=1e-12)

    def test_as_dict(self, unit_rotor):
        """Test the hover point serialises its three fields."""
        assert set(hover_point(1.0, Environment(), unit_rotor).as_dict()) == {
            "thrust",
            "induced_velocity",
            "induced_power",
        }


class TestDroneConfig:
    """Drone profiles."""

    def test_default_profile(self):
        """Test the shipped profile values."""
        drone = DroneConfig.default()
        assert drone.empty_mass == pytest.approx(3.07)
        assert drone.rotor_area_total == pytest.approx(0.342)
        assert drone.battery_capacity == 130.0

    def test_json_round_trip(self, tmp_path):
        """Test to_json and from_json agree."""
        drone = DroneConfig(empty_mass=2.5, rotor_area_total=0.3, battery_capacity=100.0, name="test")
        drone.to_json(tmp_path / "drone.json")
        assert DroneConfig.from_json(tmp_path / "drone.json") == drone

    def test_missing_field(self):
        """Test a profile without rotor area is rejected."""
        with pytest.raises(InvalidProfile):
            DroneConfig.from_dict({"empty_mass_kg": 3.0})

    def test_non_positive_values(self):
        """Test zero rotor area is rejected."""
        with pytest.raises(InvalidProfile):
            DroneConfig(empty_mass=3.0, rotor_area_total=0.0)

    def test_invalid_environment(self):
        """Test non-positive air density is rejected."""
        with pytest.raises(InvalidProfile):
            Environment(air_density=0.0)
