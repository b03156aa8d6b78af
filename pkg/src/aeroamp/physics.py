"""First-principles induced power at hover without wind.

Thrust balances weight, T = m g; momentum theory gives the induced velocity
v_i = sqrt(T / (2 rho A)) and the induced power P_i = T v_i.
"""

import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from aeroamp.config import read_json
from aeroamp.errors import InvalidProfile, NonPositiveMass


@dataclass(frozen=True)
class Environment:
    """Atmosphere and gravity; constant over the low altitudes flown."""

    air_density: float = 1.225  # kg/m^3
    gravity: float = 9.81  # m/s^2

    def __post_init__(self):
        if self.air_density <= 0 or self.gravity <= 0:
            raise InvalidProfile("air_density and gravity must be positive")


@dataclass(frozen=True)
class DroneConfig:
    """Airframe parameters used by the energy model.

    Attributes:
        empty_mass: Airframe plus battery plus sensors, kg.
        rotor_area_total: Disc area of all four propellers, m^2.
        battery_capacity: Nominal battery energy, Wh.
    """

    empty_mass: float
    rotor_area_total: float
    battery_capacity: float = 130.0
    name: str = "custom"

    def __post_init__(self):
        if self.empty_mass <= 0 or self.rotor_area_total <= 0 or self.battery_capacity <= 0:
            raise InvalidProfile(
                f"Drone profile {self.name!r} needs positive mass, rotor area and capacity"
            )

    @classmethod
    def from_dict(cls, data: dict) -> "DroneConfig":
        try:
            return cls(
                name=str(data.get("name", "custom")),
                empty_mass=float(data["empty_mass_kg"]),
                rotor_area_total=float(data["rotor_area_total_m2"]),
                battery_capacity=float(data.get("battery_capacity_wh", 130.0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidProfile(f"Bad drone profile: {e}") from e

    @classmethod
    def from_json(cls, path: str | Path) -> "DroneConfig":
        return cls.from_dict(read_json(path))

    @classmethod
    def default(cls) -> "DroneConfig":
        """The shipped M100 profile."""
        text = resources.files("aeroamp.data").joinpath("m100.json").read_text()
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "empty_mass_kg": self.empty_mass,
            "rotor_area_total_m2": self.rotor_area_total,
            "battery_capacity_wh": self.battery_capacity,
        }

    def to_json(self, path: str | Path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)


@dataclass(frozen=True)
class HoverPoint:
    """Thrust (N), induced velocity (m/s) and induced power (W) at hover."""

    thrust: float
    induced_velocity: float
    induced_power: float

    def as_dict(self) -> dict:
        return asdict(self)


def hover_point(total_mass: float, env: Environment, config: DroneConfig) -> HoverPoint:
    """Hover state of a drone of the given total mass.

    Args:
        total_mass: Drone plus payload, kg.
        env: Air density and gravity.
        config: Supplies the total rotor area.

    Returns:
        HoverPoint with P_i = T v_i exactly.
    """
    if not total_mass > 0:
        raise NonPositiveMass(f"Total mass must be positive, got {total_mass}")
    thrust = total_mass * env.gravity
    induced_velocity = float(np.sqrt(thrust / (2.0 * env.air_density * config.rotor_area_total)))
    return HoverPoint(
        thrust=thrust,
        induced_velocity=induced_velocity,
        induced_power=thrust * induced_velocity,
    )


def induced_power(total_mass, env: Environment, config: DroneConfig):
    """Induced power (m g)^1.5 / sqrt(2 rho A), in watts.

    Accepts a scalar or an array of masses.
    """
    mass = np.asarray(total_mass, dtype=float)
    if np.any(~(mass > 0)):
        raise NonPositiveMass(f"Total mass must be positive, got {total_mass}")
    power = (mass * env.gravity) ** 1.5 / np.sqrt(
        2.0 * env.air_density * config.rotor_area_total
    )
    return float(power) if power.ndim == 0 else power
