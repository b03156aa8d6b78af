"""Per-km and per-package energy and GHG across last-mile delivery modes.

E_pack = E_dist / (S_freq * P_freq) and GHG_pack = GHG_dist / (S_freq * P_freq),
with electric modes charged from the grid through charging and
transmission losses.
"""

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field, replace
from enum import StrEnum
from importlib import resources
from pathlib import Path

from aeroamp.config import read_json
from aeroamp.errors import InvalidArgument, InvalidProfile, UnknownVehicle, ZeroDeliveryRate, ZeroPayload
from aeroamp.logging import get_logger

SCENARIOS = ("low", "base", "high")


class Fuel(StrEnum):
    DIESEL = "diesel"
    ELECTRICITY = "electricity"
    NONE = "none"


def _read_data(name: str):
    return json.loads(resources.files("aeroamp.data").joinpath(name).read_text())


def _scenario(value: str) -> str:
    if value not in SCENARIOS:
        raise InvalidArgument(f"Scenario must be one of {SCENARIOS}, got {value!r}")
    return value


@dataclass(frozen=True)
class EmissionFactors:
    """Carbon intensities (g CO2e/MJ) and electricity delivery losses."""

    grid_ghg: Mapping[str, float] = field(
        default_factory=lambda: {"low": 107.0, "base": 182.0, "high": 249.0}
    )
    diesel_combustion_ghg: float = 69.35
    upstream_diesel_ghg: float = 15.3
    upstream_electricity_ghg: float = 22.0
    charging_efficiency: float = 0.88
    transmission_loss: float = 0.05

    def __post_init__(self):
        if not 0 < self.charging_efficiency <= 1 or not 0 <= self.transmission_loss < 1:
            raise InvalidProfile("Efficiencies must lie in (0, 1]")
        values = [
            *self.grid_ghg.values(),
            self.diesel_combustion_ghg,
            self.upstream_diesel_ghg,
            self.upstream_electricity_ghg,
        ]
        if any(v < 0 for v in values):
            raise InvalidProfile("Carbon intensities must be non-negative")
        if set(self.grid_ghg) != set(SCENARIOS):
            raise InvalidProfile(f"grid_ghg needs exactly {SCENARIOS}")

    @property
    def electricity_delivery_efficiency(self) -> float:
        return self.charging_efficiency * (1.0 - self.transmission_loss)

    @classmethod
    def from_dict(cls, data: Mapping) -> "EmissionFactors":
        valid = set(cls.__dataclass_fields__)
        try:
            return cls(**{k: v for k, v in data.items() if k in valid})
        except TypeError as e:
            raise InvalidProfile(f"Bad emission factors: {e}") from e

    @classmethod
    def from_json(cls, path: str | Path | None = None) -> "EmissionFactors":
        """Load factors; without a path, the shipped table-reproducing set."""
        if path is None:
            return cls.from_dict(_read_data("factors.json"))
        return cls.from_dict(read_json(path))

    @classmethod
    def stated(cls) -> "EmissionFactors":
        """Factors exactly as stated in the text: 6.5% transmission loss, 15 g/MJ diesel upstream."""
        return cls(upstream_diesel_ghg=15.0, transmission_loss=0.065)

    def notes(self) -> list[str]:
        """Provenance remarks for output metadata."""
        notes = []
        if self.transmission_loss != 0.065:
            notes.append(
                f"transmission_loss={self.transmission_loss} reproduces the published table; "
                "the stated loss is 6.5%"
            )
        if self.upstream_diesel_ghg != 15.0:
            notes.append(
                f"upstream_diesel_ghg={self.upstream_diesel_ghg} g/MJ reproduces the published "
                "table; the stated factor is 15 g/MJ"
            )
        return notes

    def to_dict(self) -> dict:
        data = asdict(self)
        data["grid_ghg"] = dict(self.grid_ghg)
        return data


@dataclass(frozen=True)
class VehicleProfile:
    """One delivery mode.

    Attributes:
        nominal_energy: Energy delivered to the vehicle, MJ/km.
        stops_per_km: Delivery stops per km (S_freq).
        packages_per_stop: Packages per stop (P_freq).
        battery_ghg: Battery life-cycle g/km per scenario.
        payload_capacity: Tonnes.
    """

    name: str
    fuel: Fuel
    nominal_energy: float
    stops_per_km: float
    packages_per_stop: float = 1.0
    battery_ghg: Mapping[str, float] = field(
        default_factory=lambda: {"low": 0.0, "base": 0.0, "high": 0.0}
    )
    driving_style_spread: float = 0.40
    density_spread: float = 0.25
    payload_capacity: float = 0.0
    label: str = ""
    source: str = ""

    @property
    def delivery_rate(self) -> float:
        """Packages per km, S_freq * P_freq."""
        return self.stops_per_km * self.packages_per_stop

    @classmethod
    def from_dict(cls, data: Mapping) -> "VehicleProfile":
        try:
            if "stops_per_km" in data:
                stops, per_stop = float(data["stops_per_km"]), float(data.get("packages_per_stop", 1.0))
            else:
                stops, per_stop = float(data["delivery_rate_pkg_km"]), 1.0
            battery = data.get("battery_ghg_g_km", {})
            return cls(
                name=str(data["name"]),
                label=str(data.get("label", data["name"])),
                fuel=Fuel(data.get("fuel", "none")),
                nominal_energy=float(data["nominal_energy_mj_km"]),
                stops_per_km=stops,
                packages_per_stop=per_stop,
                battery_ghg={s: float(battery.get(s, 0.0)) for s in SCENARIOS},
                driving_style_spread=float(data.get("driving_style_spread", 0.40)),
                density_spread=float(data.get("density_spread", 0.25)),
                payload_capacity=float(data.get("payload_capacity_t", 0.0)),
                source=str(data.get("source", "")),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidProfile(f"Bad vehicle profile: {e}") from e


def load_vehicles(path: str | Path | None = None) -> list[VehicleProfile]:
    """Vehicle registry; without a path, the six shipped delivery modes."""
    if path is None:
        data = _read_data("vehicles.json")
    else:
        data = read_json(path)
    if not isinstance(data, list):
        raise InvalidProfile(f"{path} must hold a JSON array of vehicles")
    vehicles = [VehicleProfile.from_dict(entry) for entry in data]
    if not vehicles:
        raise InvalidProfile("Vehicle registry is empty")
    return vehicles


def find_vehicle(profiles: Iterable[VehicleProfile], name: str) -> VehicleProfile:
    for profile in profiles:
        if profile.name == name:
            return profile
    raise UnknownVehicle(name)


def grid_energy(nominal: float, factors: EmissionFactors) -> float:
    """Energy drawn from the grid to deliver nominal MJ/km to the battery."""
    if nominal < 0:
        raise InvalidArgument(f"Energy must be non-negative, got {nominal}")
    return nominal / factors.electricity_delivery_efficiency


def scenario_energy(vehicle: VehicleProfile, factors: EmissionFactors, scenario: str = "base") -> float:
    """MJ/km at the energy source: grid-side for electric modes, tank for diesel."""
    spread = {"low": -1.0, "base": 0.0, "high": 1.0}[_scenario(scenario)]
    energy = vehicle.nominal_energy * (1.0 + spread * vehicle.driving_style_spread)
    if vehicle.fuel == Fuel.ELECTRICITY:
        return grid_energy(energy, factors)
    return energy


def scenario_delivery_rate(vehicle: VehicleProfile, scenario: str = "base") -> float:
    """Packages per km; denser delivery in the low-impact scenario."""
    spread = {"low": 1.0, "base": 0.0, "high": -1.0}[_scenario(scenario)]
    return vehicle.delivery_rate * (1.0 + spread * vehicle.density_spread)


def energy_per_package(energy_mj_km: float, delivery_rate: float) -> float:
    """E_pack = E_dist / (S_freq * P_freq)."""
    if not delivery_rate > 0:
        raise ZeroDeliveryRate(f"Delivery rate must be positive, got {delivery_rate}")
    return energy_mj_km / delivery_rate


@dataclass(frozen=True)
class GhgPerKm:
    fuel: float
    upstream: float
    battery: float

    @property
    def total(self) -> float:
        return self.fuel + self.upstream + self.battery


def ghg_per_km(vehicle: VehicleProfile, factors: EmissionFactors, scenario: str = "base") -> GhgPerKm:
    """Fuel (combustion or grid), upstream and battery g CO2e per km."""
    energy = scenario_energy(vehicle, factors, scenario)
    battery = vehicle.battery_ghg[_scenario(scenario)]
    if vehicle.fuel == Fuel.DIESEL:
        return GhgPerKm(
            fuel=energy * factors.diesel_combustion_ghg,
            upstream=energy * factors.upstream_diesel_ghg,
            battery=battery,
        )
    if vehicle.fuel == Fuel.ELECTRICITY:
        return GhgPerKm(
            fuel=energy * factors.grid_ghg[scenario],
            upstream=energy * factors.upstream_electricity_ghg,
            battery=battery,
        )
    return GhgPerKm(fuel=0.0, upstream=0.0, battery=battery)


def ghg_per_package(vehicle: VehicleProfile, factors: EmissionFactors, scenario: str = "base") -> float:
    """Sum of the g/km columns divided by the delivery rate."""
    rate = scenario_delivery_rate(vehicle, scenario)
    if not rate > 0:
        raise ZeroDeliveryRate(f"{vehicle.name}: delivery rate must be positive")
    return ghg_per_km(vehicle, factors, scenario).total / rate


def per_tonne_km(vehicle: VehicleProfile, factors: EmissionFactors) -> float:
    """Source-side MJ per tonne-km of payload capacity."""
    if not vehicle.payload_capacity > 0:
        raise ZeroPayload(f"{vehicle.name}: payload capacity must be positive")
    return scenario_energy(vehicle, factors) / vehicle.payload_capacity


@dataclass(frozen=True)
class ComparisonRow:
    vehicle: str
    energy_mj_km: float
    fuel_g_km: float
    upstream_g_km: float
    battery_g_km: float
    energy_mj_package: float
    ghg_g_package: float
    delivery_rate: float
    label: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ComparisonTable:
    scenario: str
    rows: list[ComparisonRow]
    reductions: dict[str, dict[str, float]] = field(default_factory=dict)
    baseline: str | None = None
    notes: list[str] = field(default_factory=list)

    def row(self, vehicle: str) -> ComparisonRow:
        for row in self.rows:
            if row.vehicle == vehicle:
                return row
        raise UnknownVehicle(vehicle)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "baseline": self.baseline,
            "rows": [r.to_dict() for r in self.rows],
            "reductions": self.reductions,
            "notes": self.notes,
        }


def comparison_row(vehicle: VehicleProfile, factors: EmissionFactors, scenario: str = "base") -> ComparisonRow:
    energy = scenario_energy(vehicle, factors, scenario)
    rate = scenario_delivery_rate(vehicle, scenario)
    ghg = ghg_per_km(vehicle, factors, scenario)
    return ComparisonRow(
        vehicle=vehicle.name,
        label=vehicle.label,
        energy_mj_km=energy,
        fuel_g_km=ghg.fuel,
        upstream_g_km=ghg.upstream,
        battery_g_km=ghg.battery,
        energy_mj_package=energy_per_package(energy, rate),
        ghg_g_package=ghg.total / rate,
        delivery_rate=rate,
    )


def reductions(rows: Sequence[ComparisonRow], baseline: str) -> dict[str, dict[str, float]]:
    """Per-package energy and GHG reduction of every row relative to the baseline.

    Positive values mean the row's vehicle uses less than the baseline.
    """
    reference = next((r for r in rows if r.vehicle == baseline), None)
    if reference is None:
        raise UnknownVehicle(baseline)
    return {
        r.vehicle: {
            "energy": 1.0 - r.energy_mj_package / reference.energy_mj_package,
            "ghg": 1.0 - r.ghg_g_package / reference.ghg_g_package,
        }
        for r in rows
    }


def comparison_table(
    profiles: Sequence[VehicleProfile],
    factors: EmissionFactors,
    scenario: str = "base",
    baseline: str | None = None,
) -> ComparisonTable:
    """One row per vehicle, with reductions against an optional baseline vehicle."""
    if not profiles:
        raise InvalidProfile("No vehicle profiles to compare")
    rows = [comparison_row(v, factors, scenario) for v in profiles]
    table = ComparisonTable(scenario=scenario, rows=rows, baseline=baseline, notes=factors.notes())
    if baseline is not None:
        table.reductions = reductions(rows, baseline)
    for note in table.notes:
        get_logger().info(note)
    return table


def error_bars(
    profiles: Sequence[VehicleProfile],
    factors: EmissionFactors,
) -> tuple[list[dict], list[dict]]:
    """Low/base/high values per vehicle for the energy and GHG figures.

    Returns:
        (energy rows: MJ/km and MJ/package, GHG rows: g/km and g/package)
    """
    tables = {s: comparison_table(profiles, factors, s) for s in SCENARIOS}
    energy, ghg = [], []
    for vehicle in profiles:
        rows = {s: tables[s].row(vehicle.name) for s in SCENARIOS}
        for metric, attr, target in (
            ("mj_per_km", "energy_mj_km", energy),
            ("mj_per_package", "energy_mj_package", energy),
        ):
            target.append({"vehicle": vehicle.name, "metric": metric, **{s: getattr(rows[s], attr) for s in SCENARIOS}})
        ghg.append({
            "vehicle": vehicle.name,
            "metric": "g_per_km",
            **{s: rows[s].fuel_g_km + rows[s].upstream_g_km + rows[s].battery_g_km for s in SCENARIOS},
        })
        ghg.append({
            "vehicle": vehicle.name,
            "metric": "g_per_package",
            **{s: rows[s].ghg_g_package for s in SCENARIOS},
        })
    return energy, ghg


def with_nominal_energy(vehicle: VehicleProfile, nominal_energy: float) -> VehicleProfile:
    """Copy of a profile with a different vehicle-side energy intensity."""
    return replace(vehicle, nominal_energy=nominal_energy)


def cell_matches(computed: float, published: float, decimals: int) -> bool:
    """Whether a computed value agrees with a rounded published table cell.

    Agreement means within 2% or within half a unit of the displayed precision.
    """
    if abs(computed - published) <= 0.5 * 10.0**-decimals + 1e-12:
        return True
    return published != 0 and abs(computed / published - 1.0) <= 0.02
