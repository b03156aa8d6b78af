"""Per-regime linear energy models: mean power = b1 * P_i + b0.

The flight is the unit of observation: each flight contributes one
(P_i, mean power) pair per regime.
"""

import json
from collections import defaultdict
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from aeroamp.config import read_json
from aeroamp.errors import (
    DegenerateDesign,
    InvalidArgument,
    InvalidProfile,
    MalformedInput,
    TrainCountTooLarge,
    ZeroMeasuredEnergy,
)
from aeroamp.logging import get_logger
from aeroamp.physics import DroneConfig, Environment, induced_power
from aeroamp.segmentation import REGIMES, Regime, RegimeSlice
from aeroamp.telemetry import FlightMetadata, FlightRecord

# Bootstrap redraw cap, as a multiple of the requested replications
REDRAW_CAP = 10


@dataclass(frozen=True)
class RegimeObservation:
    """One flight's aggregate for one regime."""

    flight_id: int
    regime: Regime
    p_induced: float  # W
    total_mass: float  # kg
    target_speed: float
    target_altitude: float
    duration: float  # s
    mean_power: float  # W
    mean_wind: float = 0.0

    @property
    def energy(self) -> float:
        return self.mean_power * self.duration


@dataclass
class RegimeModel:
    """Fitted coefficients of one regime with bootstrap standard errors."""

    regime: Regime
    b1: float
    b0: float
    se_b1: float = 0.0
    se_b0: float = 0.0
    n_train: int = 0
    seed: int | None = None
    replications: int = 0
    redraws: int = 0
    p_min: float | None = None
    p_max: float | None = None

    def to_dict(self) -> dict:
        data = asdict(self)
        data["regime"] = str(self.regime)
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "RegimeModel":
        try:
            valid = set(cls.__dataclass_fields__)
            values = {k: v for k, v in data.items() if k in valid}
            values["regime"] = Regime(values["regime"])
            return cls(**values)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidProfile(f"Bad regime model entry: {e}") from e


@dataclass(frozen=True)
class SplitPlan:
    """Disjoint train/test flight ids."""

    train_ids: tuple[int, ...]
    test_ids: tuple[int, ...]
    seed: int

    def to_dict(self) -> dict:
        return {"train_ids": list(self.train_ids), "test_ids": list(self.test_ids), "seed": self.seed}

    @classmethod
    def from_json(cls, path: str | Path) -> "SplitPlan":
        data = read_json(path)
        try:
            return cls(tuple(data["train_ids"]), tuple(data["test_ids"]), int(data["seed"]))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(path, f"bad split plan ({e})") from e


@dataclass
class AreReport:
    """Flight-level absolute relative errors of one method."""

    method: str
    per_flight: dict[int, float] = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return np.array(list(self.per_flight.values()), dtype=float)

    @property
    def mean(self) -> float:
        return float(self.values.mean()) if self.per_flight else float("nan")

    @property
    def median(self) -> float:
        return float(np.median(self.values)) if self.per_flight else float("nan")

    @property
    def max(self) -> float:
        return float(self.values.max()) if self.per_flight else float("nan")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "n_flights": len(self.per_flight),
            "mean": self.mean,
            "median": self.median,
            "max": self.max,
        }


def build_observations(
    flight: FlightRecord,
    slices: Sequence[RegimeSlice],
    config: DroneConfig,
    env: Environment,
) -> list[RegimeObservation]:
    """Turn a segmented flight into one observation per regime."""
    total_mass = config.empty_mass + flight.payload_mass
    p_i = induced_power(total_mass, env, config)
    wind = flight.mean_wind
    return [
        RegimeObservation(
            flight_id=flight.flight_id,
            regime=s.regime,
            p_induced=p_i,
            total_mass=total_mass,
            target_speed=flight.target_speed or 0.0,
            target_altitude=flight.target_altitude or 0.0,
            duration=s.duration,
            mean_power=s.mean_power,
            mean_wind=wind,
        )
        for s in slices
    ]


def stratified_split(
    flight_ids: Iterable[int],
    train_count: int,
    seed: int = 0,
    metadata: Mapping[int, FlightMetadata] | None = None,
) -> SplitPlan:
    """Split flights into train and test folds at flight granularity.

    With metadata, each (payload, speed, altitude) cell gets a train quota
    proportional to its size (largest remainder, ties to the cell holding the
    smallest flight id); flights within a cell are drawn by a seeded shuffle
    of the ascending ids.
    """
    ids = sorted(set(flight_ids))
    if not 0 < train_count < len(ids):
        raise TrainCountTooLarge(
            f"train_count must be in [1, {len(ids) - 1}] for {len(ids)} flights, got {train_count}"
        )

    cells: dict[tuple, list[int]] = defaultdict(list)
    for flight_id in ids:
        if metadata is not None and flight_id in metadata:
            m = metadata[flight_id]
            key = (m.payload_mass, m.target_speed or 0.0, m.target_altitude or 0.0)
        else:
            key = ()
        cells[key].append(flight_id)
    ordered = sorted(cells.values(), key=lambda members: members[0])

    exact = np.array([train_count * len(m) / len(ids) for m in ordered])
    quotas = np.floor(exact).astype(int)
    remainder = train_count - int(quotas.sum())
    # Stable sort keeps cell order (smallest id first) among equal remainders
    for index in np.argsort(-(exact - quotas), kind="stable")[:remainder]:
        quotas[index] += 1

    rng = np.random.default_rng(seed)
    train: list[int] = []
    for members, quota in zip(ordered, quotas):
        shuffled = rng.permutation(members)
        train.extend(int(i) for i in shuffled[:quota])

    train_set = set(train)
    return SplitPlan(
        train_ids=tuple(sorted(train_set)),
        test_ids=tuple(i for i in ids if i not in train_set),
        seed=seed,
    )


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and intercept by least squares; raises on constant x."""
    x_mean = x.mean()
    sxx = float(((x - x_mean) ** 2).sum())
    if sxx <= 1e-12 * max(1.0, float((x**2).sum())):
        raise DegenerateDesign("Induced power has no variance across observations")
    b1 = float(((x - x_mean) * (y - y.mean())).sum() / sxx)
    return b1, float(y.mean() - b1 * x_mean)


def _arrays(observations: Sequence[RegimeObservation]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([o.p_induced for o in observations], dtype=float)
    y = np.array([o.mean_power for o in observations], dtype=float)
    return x, y


def fit_regime_model(observations: Sequence[RegimeObservation], regime: Regime) -> RegimeModel:
    """Ordinary least squares of mean power on induced power for one regime."""
    observations = [o for o in observations if o.regime == regime]
    if len(observations) < 3:
        raise DegenerateDesign(f"{regime}: need at least 3 flights, got {len(observations)}")
    x, y = _arrays(observations)
    b1, b0 = _ols(x, y)
    return RegimeModel(
        regime=regime,
        b1=b1,
        b0=b0,
        n_train=len(observations),
        p_min=float(x.min()),
        p_max=float(x.max()),
    )


def analytic_se(observations: Sequence[RegimeObservation], regime: Regime) -> tuple[float, float]:
    """Classical OLS standard errors (se_b1, se_b0) with estimated residual variance."""
    x, y = _arrays([o for o in observations if o.regime == regime])
    b1, b0 = _ols(x, y)
    n = len(x)
    sigma2 = float(((y - b1 * x - b0) ** 2).sum()) / (n - 2)
    sxx = float(((x - x.mean()) ** 2).sum())
    se_b1 = np.sqrt(sigma2 / sxx)
    se_b0 = np.sqrt(sigma2 * (1.0 / n + x.mean() ** 2 / sxx))
    return float(se_b1), float(se_b0)


def bootstrap_se(
    observations: Sequence[RegimeObservation],
    regime: Regime,
    replications: int = 1000,
    seed: int = 0,
) -> tuple[float, float, int]:
    """Nonparametric bootstrap standard errors of (b1, b0).

    Flights are resampled with replacement and the model refitted per
    replicate. Each replicate draws from its own seeded substream, so the
    result does not depend on evaluation order. Degenerate replicates are
    redrawn from the same substream.

    Returns:
        (se_b1, se_b0, number of redrawn replicates)
    """
    if replications < 2:
        raise InvalidArgument(f"replications must be at least 2, got {replications}")
    x, y = _arrays([o for o in observations if o.regime == regime])
    n = len(x)
    if n < 3:
        raise DegenerateDesign(f"{regime}: need at least 3 flights, got {n}")

    streams = np.random.SeedSequence(seed).spawn(replications)
    coefs = np.empty((replications, 2))
    redraws = 0
    for r, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        while True:
            idx = rng.integers(0, n, size=n)
            try:
                coefs[r] = _ols(x[idx], y[idx])
                break
            except DegenerateDesign:
                redraws += 1
                if redraws > REDRAW_CAP * replications:
                    raise DegenerateDesign(
                        f"{regime}: more than {REDRAW_CAP * replications} degenerate bootstrap draws"
                    )

    if redraws:
        get_logger().info(f"{regime}: redrew {redraws} degenerate bootstrap replicates")
    se = coefs.std(axis=0, ddof=1)
    return float(se[0]), float(se[1]), redraws


def fit_regime_models(
    observations: Sequence[RegimeObservation],
    replications: int = 1000,
    seed: int = 0,
) -> dict[Regime, RegimeModel]:
    """Fit and bootstrap all three regimes."""
    logger = get_logger()
    models = {}
    for regime in REGIMES:
        model = fit_regime_model(observations, regime)
        model.se_b1, model.se_b0, model.redraws = bootstrap_se(
            observations, regime, replications, seed
        )
        model.seed = seed
        model.replications = replications
        logger.info(
            f"{regime}: b1={model.b1:.3f}±{model.se_b1:.3f}, "
            f"b0={model.b0:.2f}±{model.se_b0:.2f} (n={model.n_train})"
        )
        models[regime] = model
    return models


def predict_mean_power(model: RegimeModel, p_induced: float) -> float:
    """b1 * P_i + b0. May be negative for landing at very small P_i."""
    if p_induced < 0:
        raise InvalidArgument(f"Induced power must be non-negative, got {p_induced}")
    return model.b1 * p_induced + model.b0


def flight_energies(
    observations: Iterable[RegimeObservation],
    predictor: Callable[[RegimeObservation], float],
) -> dict[int, tuple[float, float]]:
    """Measured and estimated energy (J) per flight.

    Both sum mean power times regime duration over a flight's regimes, so
    the whole-flight estimate is exactly the sum of the regime estimates.
    """
    totals: dict[int, list[float]] = defaultdict(lambda: [0.0, 0.0])
    for o in observations:
        totals[o.flight_id][0] += o.energy
        totals[o.flight_id][1] += predictor(o) * o.duration
    return {fid: (m, e) for fid, (m, e) in sorted(totals.items())}


def absolute_relative_error(measured: float, estimated: float) -> float:
    """|E_measured - E_estimated| / E_measured."""
    if measured == 0:
        raise ZeroMeasuredEnergy("Measured energy is zero")
    return abs((measured - estimated) / measured)


def are_report(
    observations: Iterable[RegimeObservation],
    predictor: Callable[[RegimeObservation], float],
    method: str,
) -> AreReport:
    """Flight-level ARE of any per-regime mean-power predictor."""
    report = AreReport(method=method)
    for flight_id, (measured, estimated) in flight_energies(observations, predictor).items():
        report.per_flight[flight_id] = absolute_relative_error(measured, estimated)
    return report


def evaluate_are(
    observations: Iterable[RegimeObservation],
    models: Mapping[Regime, RegimeModel],
) -> AreReport:
    """ARE of the linear energy model on test-flight observations."""
    return are_report(
        observations,
        lambda o: predict_mean_power(models[o.regime], o.p_induced),
        method="EnergyModel",
    )


def adequacy(linear: AreReport, boosted: AreReport, threshold: float = 0.02) -> bool:
    """True when the linear model's mean ARE is within threshold of the boosted trees'."""
    return abs(linear.mean - boosted.mean) <= threshold


def save_models(models: Mapping[Regime, RegimeModel], path: str | Path) -> None:
    with open(path, "w") as f:
        json.dump([models[r].to_dict() for r in REGIMES if r in models], f, indent=2)


def load_models(path: str | Path | None = None) -> dict[Regime, RegimeModel]:
    """Read models.json; without a path, the published coefficients."""
    if path is None:
        data = json.loads(
            resources.files("aeroamp.data").joinpath("table1_models.json").read_text()
        )
    else:
        data = read_json(path)
    if not isinstance(data, list):
        raise MalformedInput(path, "expected a JSON array of regime models")
    return {m.regime: m for m in (RegimeModel.from_dict(entry) for entry in data)}


def published_models() -> dict[Regime, RegimeModel]:
    """The published regime coefficients with their bootstrap standard errors."""
    return load_models()
