"""Mission energy and two-way range of a delivery flight.

A delivery is takeoff, cruise and landing loaded, then the same three
segments empty on the way back. Each segment's mean power comes from its
regime model evaluated at the leg's induced power.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from aeroamp.errors import InsufficientBattery, InvalidMission, MissingModel, ZeroDistance, ZeroSpeed
from aeroamp.estimation import RegimeModel, predict_mean_power
from aeroamp.fleet import SCENARIOS, EmissionFactors, VehicleProfile, grid_energy
from aeroamp.logging import get_logger
from aeroamp.physics import DroneConfig, Environment, induced_power
from aeroamp.segmentation import REGIMES, Regime

J_PER_WH = 3600.0

# Above this cruise speed the linear model is an extrapolation
MAX_VALIDATED_SPEED = 12.0


@dataclass(frozen=True)
class MissionSpec:
    """One delivery: out loaded, back empty.

    Attributes:
        payload_mass: kg.
        cruise_speed: m/s.
        cruise_altitude: Height climbed at takeoff and descended at landing, m.
        takeoff_speed: Average climb speed, m/s.
        landing_speed: Average descent speed, m/s.
        one_way_distance: Delivery distance, km; the drone flies it twice.
    """

    payload_mass: float
    cruise_speed: float
    cruise_altitude: float
    takeoff_speed: float = 2.5
    landing_speed: float = 2.0
    one_way_distance: float = 0.0

    def __post_init__(self):
        if min(self.cruise_speed, self.takeoff_speed, self.landing_speed) <= 0:
            raise ZeroSpeed("Mission speeds must be positive")
        if self.cruise_altitude < 0 or self.payload_mass < 0 or self.one_way_distance < 0:
            raise InvalidMission("Altitude, payload and distance must be non-negative")

    def at_distance(self, one_way_km: float) -> "MissionSpec":
        return replace(self, one_way_distance=one_way_km)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy of the six mission segments, Wh."""

    takeoff_loaded: float
    cruise_loaded: float
    landing_loaded: float
    takeoff_unloaded: float
    cruise_unloaded: float
    landing_unloaded: float

    @property
    def vertical(self) -> float:
        return self.takeoff_loaded + self.landing_loaded + self.takeoff_unloaded + self.landing_unloaded

    @property
    def cruise(self) -> float:
        return self.cruise_loaded + self.cruise_unloaded

    @property
    def total(self) -> float:
        return self.vertical + self.cruise

    def to_dict(self) -> dict:
        return {
            "takeoff_loaded_wh": self.takeoff_loaded,
            "cruise_loaded_wh": self.cruise_loaded,
            "landing_loaded_wh": self.landing_loaded,
            "takeoff_unloaded_wh": self.takeoff_unloaded,
            "cruise_unloaded_wh": self.cruise_unloaded,
            "landing_unloaded_wh": self.landing_unloaded,
            "vertical_wh": self.vertical,
            "total_wh": self.total,
        }


@dataclass(frozen=True)
class RangeResult:
    two_way_km: float
    delivery_km: float
    vertical_wh: float
    breakdown: EnergyBreakdown
    intensity_mj_km: float

    def to_dict(self) -> dict:
        return {
            "two_way_km": self.two_way_km,
            "delivery_km": self.delivery_km,
            "vertical_wh": self.vertical_wh,
            "intensity_mj_km": self.intensity_mj_km,
            "breakdown": self.breakdown.to_dict(),
        }


def _models(models: Mapping[Regime, RegimeModel]) -> tuple[RegimeModel, RegimeModel, RegimeModel]:
    for regime in REGIMES:
        if regime not in models:
            raise MissingModel(str(regime))
    return models[Regime.TAKEOFF], models[Regime.CRUISE], models[Regime.LANDING]


def _leg_powers(mission: MissionSpec, config: DroneConfig, env: Environment) -> tuple[float, float]:
    """Induced power of the loaded and the empty leg."""
    if mission.cruise_speed > MAX_VALIDATED_SPEED:
        get_logger().warning(
            f"Cruise speed {mission.cruise_speed} m/s is above {MAX_VALIDATED_SPEED} m/s; "
            "the regime models were not fitted there"
        )
    loaded = induced_power(config.empty_mass + mission.payload_mass, env, config)
    unloaded = induced_power(config.empty_mass, env, config)
    return loaded, unloaded


def vertical_segment_energy(model: RegimeModel, p_induced: float, altitude: float, speed: float) -> float:
    """(b1 P_i + b0) * h / V, in Wh."""
    if not speed > 0:
        raise ZeroSpeed(f"Segment speed must be positive, got {speed}")
    return predict_mean_power(model, p_induced) * altitude / speed / J_PER_WH


def _vertical_terms(
    takeoff: RegimeModel,
    landing: RegimeModel,
    mission: MissionSpec,
    loaded: float,
    unloaded: float,
) -> tuple[float, float, float, float]:
    h = mission.cruise_altitude
    return (
        vertical_segment_energy(takeoff, loaded, h, mission.takeoff_speed),
        vertical_segment_energy(landing, loaded, h, mission.landing_speed),
        vertical_segment_energy(takeoff, unloaded, h, mission.takeoff_speed),
        vertical_segment_energy(landing, unloaded, h, mission.landing_speed),
    )


def mission_energy(
    models: Mapping[Regime, RegimeModel],
    mission: MissionSpec,
    config: DroneConfig,
    env: Environment | None = None,
) -> EnergyBreakdown:
    """Energy of the full delivery and return.

    The loaded leg flies at empty_mass + payload, the return at empty_mass.
    Each cruise leg lasts one_way_distance / cruise_speed.
    """
    env = env or Environment()
    takeoff, cruise, landing = _models(models)
    loaded, unloaded = _leg_powers(mission, config, env)
    tk_l, ld_l, tk_u, ld_u = _vertical_terms(takeoff, landing, mission, loaded, unloaded)
    cruise_time = mission.one_way_distance * 1000.0 / mission.cruise_speed
    return EnergyBreakdown(
        takeoff_loaded=tk_l,
        cruise_loaded=predict_mean_power(cruise, loaded) * cruise_time / J_PER_WH,
        landing_loaded=ld_l,
        takeoff_unloaded=tk_u,
        cruise_unloaded=predict_mean_power(cruise, unloaded) * cruise_time / J_PER_WH,
        landing_unloaded=ld_u,
    )


def two_way_range(
    models: Mapping[Regime, RegimeModel],
    mission: MissionSpec,
    config: DroneConfig,
    env: Environment | None = None,
    e_max: float | None = None,
) -> float:
    """Total out-and-back km the battery allows.

    d = 2 V_cr (E_max - E_vertical) / (b1 (P_l + P_u) + 2 b0), so that the
    mission energy at one_way_distance = d / 2 equals E_max.

    Args:
        mission: Only its mass, speeds and altitude are used.
        e_max: Usable battery energy, Wh; the drone's capacity when omitted.
    """
    env = env or Environment()
    e_max = config.battery_capacity if e_max is None else e_max
    takeoff, cruise, landing = _models(models)
    loaded, unloaded = _leg_powers(mission, config, env)
    vertical = sum(_vertical_terms(takeoff, landing, mission, loaded, unloaded))
    if vertical > e_max * (1.0 + 1e-12):
        raise InsufficientBattery(vertical, e_max)

    cruise_power = cruise.b1 * (loaded + unloaded) + 2.0 * cruise.b0
    if not cruise_power > 0:
        raise InvalidMission(f"Cruise model predicts non-positive power {cruise_power:.2f} W")
    metres = 2.0 * mission.cruise_speed * max(0.0, e_max - vertical) * J_PER_WH / cruise_power
    return metres / 1000.0


def per_km_intensity(
    models: Mapping[Regime, RegimeModel],
    mission: MissionSpec,
    config: DroneConfig,
    env: Environment | None = None,
) -> float:
    """Vehicle-side MJ per km flown, over the round trip."""
    if not mission.one_way_distance > 0:
        raise ZeroDistance("Intensity needs a positive delivery distance")
    energy = mission_energy(models, mission, config, env).total * J_PER_WH / 1e6
    return energy / (2.0 * mission.one_way_distance)


def grid_side_intensity(
    models: Mapping[Regime, RegimeModel],
    mission: MissionSpec,
    config: DroneConfig,
    factors: EmissionFactors,
    env: Environment | None = None,
) -> float:
    """MJ per km drawn from the grid, including charging and transmission losses."""
    return grid_energy(per_km_intensity(models, mission, config, env), factors)


def range_report(
    models: Mapping[Regime, RegimeModel],
    mission: MissionSpec,
    config: DroneConfig,
    env: Environment | None = None,
    e_max: float | None = None,
) -> RangeResult:
    """Range plus the breakdown and intensity of the mission flown at that range."""
    d = two_way_range(models, mission, config, env, e_max)
    at_range = mission.at_distance(d / 2.0)
    breakdown = mission_energy(models, at_range, config, env)
    return RangeResult(
        two_way_km=d,
        delivery_km=d / 2.0,
        vertical_wh=breakdown.vertical,
        breakdown=breakdown,
        intensity_mj_km=per_km_intensity(models, at_range, config, env) if d > 0 else float("nan"),
    )


def range_sweep(
    models: Mapping[Regime, RegimeModel],
    payloads: Iterable[float],
    speeds: Iterable[float],
    distances: Iterable[float],
    config: DroneConfig,
    env: Environment | None = None,
    cruise_altitude: float = 100.0,
    takeoff_speed: float = 2.5,
    landing_speed: float = 2.0,
) -> list[dict]:
    """Mission energy over a payload x speed x delivery-distance grid.

    Rows report the total take-off mass and flag missions the battery cannot fly.
    """
    rows = []
    for payload in payloads:
        for speed in speeds:
            for distance in distances:
                mission = MissionSpec(
                    payload_mass=payload,
                    cruise_speed=speed,
                    cruise_altitude=cruise_altitude,
                    takeoff_speed=takeoff_speed,
                    landing_speed=landing_speed,
                    one_way_distance=distance,
                )
                energy = mission_energy(models, mission, config, env).total
                rows.append({
                    "mass": config.empty_mass + payload,
                    "speed": speed,
                    "distance": distance,
                    "energy_wh": energy,
                    "within_battery": energy <= config.battery_capacity,
                })
    return rows


def ghg_distance_sweep(
    models: Mapping[Regime, RegimeModel],
    mission: MissionSpec,
    distances: Iterable[float],
    config: DroneConfig,
    factors: EmissionFactors,
    drone: VehicleProfile,
    env: Environment | None = None,
) -> list[dict]:
    """Grams CO2e of one delivery against delivery distance, per scenario.

    Grid electricity (combustion and upstream) plus battery wear over the
    round trip.
    """
    rows = []
    for distance in distances:
        energy_mj = mission_energy(models, mission.at_distance(distance), config, env).total * J_PER_WH / 1e6
        drawn = grid_energy(energy_mj, factors)
        for scenario in SCENARIOS:
            grams = drawn * (factors.grid_ghg[scenario] + factors.upstream_electricity_ghg)
            grams += drone.battery_ghg[scenario] * 2.0 * distance
            rows.append({"distance_km": distance, "scenario": scenario, "g_co2e_per_package": grams})
    return rows


@dataclass(frozen=True)
class CalibrationAnchors:
    """Worked-example targets the default airframe is fitted to."""

    vertical_wh: float = 19.4
    energy_wh: float = 120.0
    energy_two_way_km: float = 11.0
    range_km: float = 11.0
    battery_wh: float = 130.0
    mission: MissionSpec = MissionSpec(payload_mass=1.0, cruise_speed=12.0, cruise_altitude=100.0)


def calibrate_drone(
    models: Mapping[Regime, RegimeModel],
    rotor_area: float,
    anchors: CalibrationAnchors | None = None,
    env: Environment | None = None,
    bounds: tuple[float, float] = (0.5, 10.0),
) -> DroneConfig:
    """Fit the empty mass that best reproduces the anchors.

    Minimises the summed squared relative errors of the vertical energy,
    the round-trip energy at the anchor distance and the two-way range.
    """
    anchors = anchors or CalibrationAnchors()
    env = env or Environment()
    mission = anchors.mission

    def loss(empty_mass: float) -> float:
        config = DroneConfig(empty_mass, rotor_area, anchors.battery_wh, name="calibrated")
        breakdown = mission_energy(models, mission.at_distance(anchors.energy_two_way_km / 2.0), config, env)
        try:
            d = two_way_range(models, mission, config, env)
        except InsufficientBattery:
            d = 0.0
        errors = np.array([
            breakdown.vertical / anchors.vertical_wh - 1.0,
            breakdown.total / anchors.energy_wh - 1.0,
            d / anchors.range_km - 1.0,
        ])
        return float(np.sum(errors**2))

    result = minimize_scalar(loss, bounds=bounds, method="bounded", options={"xatol": 1e-4})
    get_logger().info(f"Calibrated empty mass {result.x:.3f} kg (loss {result.fun:.4g})")
    return DroneConfig(
        empty_mass=float(result.x),
        rotor_area_total=rotor_area,
        battery_capacity=anchors.battery_wh,
        name="calibrated",
    )
