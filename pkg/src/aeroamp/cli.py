"""aeroamp CLI entry point."""

import json
from pathlib import Path

import click
import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from aeroamp import __version__
from aeroamp.config import Config
from aeroamp.errors import AeroampError
from aeroamp.estimation import (
    AreReport,
    SplitPlan,
    absolute_relative_error,
    adequacy,
    analytic_se,
    build_observations,
    fit_regime_models,
    flight_energies,
    load_models,
    predict_mean_power,
    save_models,
    stratified_split,
)
from aeroamp.fleet import (
    EmissionFactors,
    comparison_table,
    error_bars,
    find_vehicle,
    load_vehicles,
    per_tonne_km,
    with_nominal_energy,
)
from aeroamp.gbt import FEATURES, HyperGrid, cv_grid_search, feature_vector, predict_gbt
from aeroamp.logging import attach_run_log, detach_run_log, get_logger, setup_logging
from aeroamp.manifest import RunManifest
from aeroamp.mission import (
    MissionSpec,
    calibrate_drone,
    ghg_distance_sweep,
    grid_side_intensity,
    range_report,
    range_sweep,
)
from aeroamp.physics import DroneConfig, Environment
from aeroamp.segmentation import REGIMES, SegmentationParams, segment_batch
from aeroamp.synth import SynthSpec, generate_flights, write_flights
from aeroamp.telemetry import ColumnMap, load_dataset, load_flight_batch

console = Console()

EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)


def flight_inputs(command):
    """Attach the --flights / --dataset / --column-map options."""
    command = click.option(
        "--column-map", type=EXISTING_FILE, help="Column adapter JSON for --dataset"
    )(command)
    command = click.option(
        "--dataset", type=EXISTING_FILE, help="Combined multi-flight CSV"
    )(command)
    command = click.option(
        "--flights", type=EXISTING_FILE, help="Flight metadata JSON (one CSV per flight)"
    )(command)
    return command


def _load_flights(cfg: Config, flights: Path | None, dataset: Path | None, column_map: Path | None):
    if (flights is None) == (dataset is None):
        raise click.UsageError("Give exactly one of --flights or --dataset")
    mapping = ColumnMap.from_json(column_map) if column_map else None
    if flights is not None:
        return load_flight_batch(
            flights, column_map=mapping, max_malformed_fraction=cfg.max_malformed_fraction
        )
    return load_dataset(dataset, mapping, max_malformed_fraction=cfg.max_malformed_fraction)


def _drone(cfg: Config, path: Path | None) -> DroneConfig:
    if path is not None:
        return DroneConfig.from_json(path)
    if cfg.drone_profile:
        return DroneConfig.from_json(cfg.drone_profile)
    return DroneConfig.default()


def _out_dir(path: Path) -> Path:
    """Create an output directory and log the rest of the command into its run.log."""
    path.mkdir(parents=True, exist_ok=True)
    handler = attach_run_log(path)
    click.get_current_context().call_on_close(lambda: detach_run_log(handler))
    return path


def _inputs(**paths) -> dict[str, str]:
    return {k: str(v) for k, v in paths.items() if v is not None}


def _segment(cfg, flights, dataset, column_map, params_path):
    params = SegmentationParams.from_json(params_path) if params_path else SegmentationParams()
    records = _load_flights(cfg, flights, dataset, column_map)
    segmented, rejects = segment_batch(records, params)
    return params, segmented, rejects


def _write_rejects(out: Path, rejects, manifest: RunManifest) -> None:
    path = out / "rejects.json"
    with open(path, "w") as f:
        json.dump([{"flight_id": fid, "reason": reason} for fid, reason in rejects], f, indent=2)
    manifest.add_output(path)


def _observations(segmented, drone: DroneConfig, env: Environment):
    observations = []
    for flight, slices in segmented:
        observations.extend(build_observations(flight, slices, drone, env))
    return observations


def _numbers(text: str | None, kind, option: str) -> tuple:
    if not text:
        return ()
    try:
        return tuple(kind(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}", param_hint=option)


def _split(cfg, segmented, train_count, seed, split_path) -> SplitPlan:
    if split_path is not None:
        return SplitPlan.from_json(split_path)
    metadata = {flight.flight_id: flight.metadata for flight, _ in segmented}
    return stratified_split(metadata, train_count or cfg.train_count, seed, metadata)


@click.group()
@click.version_option(version=__version__, prog_name="aeroamp")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose debug output")
@click.pass_context
def main(ctx, verbose):
    """aeroamp - delivery drone energy models and mode comparison."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["config"] = Config.load()
    setup_logging(verbose=verbose)


@main.command()
@flight_inputs
@click.option("--params", "params_path", type=EXISTING_FILE, help="Segmentation thresholds JSON")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def segment(ctx, flights, dataset, column_map, params_path, out):
    """Split flights into takeoff, cruise and landing."""
    cfg = ctx.obj["config"]
    out = _out_dir(out)
    params, segmented, rejects = _segment(cfg, flights, dataset, column_map, params_path)

    manifest = RunManifest(
        "segment",
        parameters={"segmentation": params.to_dict()},
        inputs=_inputs(flights=flights, dataset=dataset, column_map=column_map, params=params_path),
    )
    rows = [
        {"flight_id": flight.flight_id, **s.to_dict()}
        for flight, slices in segmented
        for s in slices
    ]
    columns = ["flight_id", "regime", "start_s", "end_s", "duration_s", "mean_power_w", "energy_j"]
    pd.DataFrame(rows, columns=columns).to_csv(out / "segments.csv", index=False)
    manifest.add_output(out / "segments.csv")
    _write_rejects(out, rejects, manifest)
    manifest.write(out)

    console.print(f"[green]✓[/green] Segmented {len(segmented)} flights, rejected {len(rejects)}")
    for flight_id, reason in rejects:
        console.print(f"[dim]  flight {flight_id}: {reason}[/dim]")


@main.command()
@flight_inputs
@click.option("--train-count", type=int, help="Flights in the training fold")
@click.option("--seed", type=int, help="Seed of the split and bootstrap")
@click.option("--bootstrap", "replications", type=int, help="Bootstrap replications")
@click.option("--drone", "drone_path", type=EXISTING_FILE, help="Drone profile JSON")
@click.option("--params", "params_path", type=EXISTING_FILE, help="Segmentation thresholds JSON")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def fit(ctx, flights, dataset, column_map, train_count, seed, replications, drone_path, params_path, out):
    """Fit the per-regime energy models on a stratified training fold."""
    cfg = ctx.obj["config"]
    seed = cfg.seed if seed is None else seed
    replications = replications or cfg.bootstrap_replications
    out = _out_dir(out)

    drone, env = _drone(cfg, drone_path), Environment()
    params, segmented, rejects = _segment(cfg, flights, dataset, column_map, params_path)
    plan = _split(cfg, segmented, train_count, seed, None)
    observations = _observations(segmented, drone, env)
    train_ids = set(plan.train_ids)
    train = [o for o in observations if o.flight_id in train_ids]
    models = fit_regime_models(train, replications=replications, seed=seed)

    manifest = RunManifest(
        "fit",
        parameters={
            "train_count": len(plan.train_ids),
            "replications": replications,
            "drone": drone.to_dict(),
            "segmentation": params.to_dict(),
        },
        inputs=_inputs(flights=flights, dataset=dataset, column_map=column_map, drone=drone_path),
        seeds={"split": seed, "bootstrap": seed},
    )
    save_models(models, out / "models.json")
    with open(out / "split.json", "w") as f:
        json.dump(plan.to_dict(), f, indent=2)
    pd.DataFrame(
        [
            {
                "regime": str(o.regime),
                "flight_id": o.flight_id,
                "p_induced_w": o.p_induced,
                "mean_power_w": o.mean_power,
                "split": "train" if o.flight_id in train_ids else "test",
            }
            for o in observations
        ],
        columns=["regime", "flight_id", "p_induced_w", "mean_power_w", "split"],
    ).to_csv(out / "fit_observations.csv", index=False)
    for name in ("models.json", "split.json", "fit_observations.csv"):
        manifest.add_output(out / name)
    _write_rejects(out, rejects, manifest)
    manifest.write(out)

    table = Table(title=f"Regime models ({len(plan.train_ids)} training flights)")
    for column in ("Regime", "b1", "b0", "SE b1 (bootstrap)", "SE b0 (bootstrap)", "SE b1 (OLS)"):
        table.add_column(column, style="cyan" if column == "Regime" else "green")
    for regime in REGIMES:
        m = models[regime]
        se_b1, _ = analytic_se(train, regime)
        table.add_row(str(regime), f"{m.b1:.3f}", f"{m.b0:.2f}", f"{m.se_b1:.3f}", f"{m.se_b0:.3f}", f"{se_b1:.3f}")
    console.print(table)


def _report_rows(observations, predictor, method: str) -> tuple[AreReport, list[dict]]:
    report = AreReport(method=method)
    rows = []
    for flight_id, (measured, estimated) in flight_energies(observations, predictor).items():
        are = absolute_relative_error(measured, estimated)
        report.per_flight[flight_id] = are
        rows.append({
            "flight_id": flight_id,
            "method": method,
            "measured_j": measured,
            "estimated_j": estimated,
            "are": are,
        })
    return report, rows


@main.command()
@flight_inputs
@click.option("--models", "models_path", type=EXISTING_FILE, help="models.json; published coefficients when omitted")
@click.option("--split", "split_path", type=EXISTING_FILE, help="split.json from fit")
@click.option("--method", type=click.Choice(["linear", "gbt", "both"]), default="linear", show_default=True)
@click.option("--train-count", type=int, help="Training fold size when no split is given")
@click.option("--seed", type=int, help="Seed of the split, CV folds and tree subsampling")
@click.option("--folds", type=int, help="Cross-validation folds for the tree grid search")
@click.option("--rounds", type=int, help="Boosting rounds")
@click.option("--learning-rates", "learning_rates", help="Comma-separated learning rates of the tree grid")
@click.option("--depths", help="Comma-separated max depths of the tree grid")
@click.option("--gammas", help="Comma-separated split thresholds of the tree grid")
@click.option("--features", default=",".join(FEATURES), show_default=True, help="Comma-separated tree features")
@click.option("--drone", "drone_path", type=EXISTING_FILE, help="Drone profile JSON")
@click.option("--params", "params_path", type=EXISTING_FILE, help="Segmentation thresholds JSON")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def evaluate(
    ctx, flights, dataset, column_map, models_path, split_path, method, train_count,
    seed, folds, rounds, learning_rates, depths, gammas, features, drone_path, params_path, out,
):
    """Flight-level absolute relative error on the test fold.

    The default tree grid (27 points, 5 folds, 200 rounds) grows about 81,000
    trees and takes tens of minutes on the full dataset. Narrow it with
    --learning-rates, --depths, --gammas or fewer --rounds for a quick check.
    """
    cfg = ctx.obj["config"]
    seed = cfg.seed if seed is None else seed
    folds = folds or cfg.cv_folds
    rounds = rounds or cfg.gbt_rounds
    feature_names = tuple(f.strip() for f in features.split(",") if f.strip())
    unknown = set(feature_names) - set(FEATURES)
    if unknown:
        raise click.BadParameter(f"unknown features {sorted(unknown)}", param_hint="--features")
    default_grid = HyperGrid()
    grid = HyperGrid(
        learning_rates=_numbers(learning_rates, float, "--learning-rates") or default_grid.learning_rates,
        max_depths=_numbers(depths, int, "--depths") or default_grid.max_depths,
        gammas=_numbers(gammas, float, "--gammas") or default_grid.gammas,
    )
    out = _out_dir(out)

    drone, env = _drone(cfg, drone_path), Environment()
    params, segmented, rejects = _segment(cfg, flights, dataset, column_map, params_path)
    plan = _split(cfg, segmented, train_count, seed, split_path)
    observations = _observations(segmented, drone, env)
    test_ids, train_ids = set(plan.test_ids), set(plan.train_ids)
    test = [o for o in observations if o.flight_id in test_ids]
    train = [o for o in observations if o.flight_id in train_ids]

    manifest = RunManifest(
        "evaluate",
        parameters={"method": method, "segmentation": params.to_dict()},
        inputs=_inputs(
            flights=flights, dataset=dataset, column_map=column_map,
            models=models_path, split=split_path, drone=drone_path,
        ),
        seeds={"split": plan.seed},
    )
    reports: dict[str, AreReport] = {}
    rows: list[dict] = []

    if method in ("linear", "both"):
        models = load_models(models_path)
        report, method_rows = _report_rows(
            test, lambda o: predict_mean_power(models[o.regime], o.p_induced), "EnergyModel"
        )
        reports["linear"] = report
        rows.extend(method_rows)

    if method in ("gbt", "both"):
        search = cv_grid_search(train, grid, folds=folds, seed=seed, rounds=rounds, feature_names=feature_names)
        trees = search.models
        report, method_rows = _report_rows(
            test,
            lambda o: predict_gbt(trees[o.regime], feature_vector(o, trees[o.regime].features)),
            "BoostedTrees",
        )
        reports["gbt"] = report
        rows.extend(method_rows)
        manifest.seeds["gbt"] = seed
        manifest.parameters.update({
            "folds": folds,
            "rounds": rounds,
            "features": list(feature_names),
            "grid": {
                "learning_rates": list(grid.learning_rates),
                "max_depths": list(grid.max_depths),
                "gammas": list(grid.gammas),
            },
        })
        pd.DataFrame(search.table, columns=["grid_point", "fold", "are"]).to_csv(out / "gbt_cv.csv", index=False)
        with open(out / "gbt_best.json", "w") as f:
            json.dump(search.best.to_dict(), f, indent=2)
        manifest.add_output(out / "gbt_cv.csv")
        manifest.add_output(out / "gbt_best.json")

    summary = {name: r.to_dict() for name, r in reports.items()}
    if method == "both":
        summary["adequate"] = adequacy(reports["linear"], reports["gbt"])
    with open(out / "are_report.json", "w") as f:
        json.dump(summary, f, indent=2)
    pd.DataFrame(rows, columns=["flight_id", "method", "measured_j", "estimated_j", "are"]).to_csv(
        out / "are_per_flight.csv", index=False
    )
    manifest.add_output(out / "are_report.json")
    manifest.add_output(out / "are_per_flight.csv")
    _write_rejects(out, rejects, manifest)
    manifest.write(out)

    table = Table(title=f"ARE on {len({o.flight_id for o in test})} test flights")
    for column in ("Method", "Mean", "Median", "Max"):
        table.add_column(column, style="cyan" if column == "Method" else "green")
    for r in reports.values():
        table.add_row(r.method, f"{r.mean:.4f}", f"{r.median:.4f}", f"{r.max:.4f}")
    console.print(table)
    if method == "both":
        verdict = "[green]adequate[/green]" if summary["adequate"] else "[yellow]not adequate[/yellow]"
        console.print(f"Linear model vs boosted trees: {verdict}")


def mission_options(command):
    """Attach the mission geometry options shared by range and sweep."""
    for name, default, text in reversed((
        ("--cruise-speed", 12.0, "Cruise speed, m/s"),
        ("--altitude", 100.0, "Cruise altitude, m"),
        ("--takeoff-speed", 2.5, "Climb speed, m/s"),
        ("--landing-speed", 2.0, "Descent speed, m/s"),
    )):
        command = click.option(name, type=float, default=default, show_default=True, help=text)(command)
    command = click.option("--drone", "drone_path", type=EXISTING_FILE, help="Drone profile JSON")(command)
    command = click.option("--models", "models_path", type=EXISTING_FILE, help="models.json; published coefficients when omitted")(command)
    return command


@main.command("range")
@mission_options
@click.option("--payload-kg", type=float, default=1.0, show_default=True)
@click.option("--battery-wh", type=float, help="Usable battery energy; the drone's capacity when omitted")
@click.option("--factors", "factors_path", type=EXISTING_FILE, help="Emission factors JSON")
@click.option("--sweep-csv", type=click.Path(dir_okay=False, path_type=Path), help="Also write payload x speed x distance energy rows")
@click.pass_context
def range_cmd(
    ctx, models_path, drone_path, cruise_speed, altitude, takeoff_speed, landing_speed,
    payload_kg, battery_wh, factors_path, sweep_csv,
):
    """Two-way range and energy breakdown of a delivery mission."""
    cfg = ctx.obj["config"]
    models = load_models(models_path)
    drone, env = _drone(cfg, drone_path), Environment()
    factors = EmissionFactors.from_json(factors_path)
    mission = MissionSpec(
        payload_mass=payload_kg,
        cruise_speed=cruise_speed,
        cruise_altitude=altitude,
        takeoff_speed=takeoff_speed,
        landing_speed=landing_speed,
    )
    result = range_report(models, mission, drone, env, battery_wh)
    output = {
        "mission": {
            "payload_kg": payload_kg,
            "cruise_speed_ms": cruise_speed,
            "altitude_m": altitude,
            "takeoff_speed_ms": takeoff_speed,
            "landing_speed_ms": landing_speed,
            "battery_wh": drone.battery_capacity if battery_wh is None else battery_wh,
        },
        "drone": drone.to_dict(),
        **result.to_dict(),
    }
    if result.two_way_km > 0:
        at_range = mission.at_distance(result.delivery_km)
        output["grid_side_intensity_mj_km"] = grid_side_intensity(models, at_range, drone, factors, env)
    click.echo(json.dumps(output, indent=2))

    if sweep_csv is not None:
        rows = range_sweep(
            models,
            payloads=np.arange(0.0, 2.01, 0.25),
            speeds=(4.0, 6.0, 8.0, 10.0, 12.0),
            distances=np.arange(0.5, 10.01, 0.5),
            config=drone,
            env=env,
            cruise_altitude=altitude,
            takeoff_speed=takeoff_speed,
            landing_speed=landing_speed,
        )
        _out_dir(sweep_csv.parent)
        pd.DataFrame(rows).to_csv(sweep_csv, index=False)
        manifest = RunManifest(
            "range",
            parameters=output["mission"] | {"drone": drone.to_dict()},
            inputs=_inputs(models=models_path, drone=drone_path, factors=factors_path),
            notes=factors.notes(),
        )
        manifest.add_output(sweep_csv)
        manifest.write(sweep_csv.parent)
        get_logger().info(f"Wrote {len(rows)} sweep rows to {sweep_csv}")


@main.command()
@click.option("--vehicles", "vehicles_path", type=EXISTING_FILE, help="Vehicle registry JSON")
@click.option("--factors", "factors_path", type=EXISTING_FILE, help="Emission factors JSON")
@click.option("--stated-factors", is_flag=True, help="Use 6.5% transmission loss and 15 g/MJ diesel upstream")
@click.option("--scenario", type=click.Choice(["low", "base", "high"]), default="base", show_default=True)
@click.option("--baseline", help="Vehicle to compute reductions against")
@click.option("--drone-intensity", type=float, help="Override the drone's vehicle-side MJ/km")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def compare(vehicles_path, factors_path, stated_factors, scenario, baseline, drone_intensity, out):
    """Per-km and per-package energy and GHG of each delivery mode."""
    if stated_factors and factors_path:
        raise click.UsageError("--stated-factors and --factors are exclusive")
    out = _out_dir(out)
    vehicles = load_vehicles(vehicles_path)
    factors = EmissionFactors.stated() if stated_factors else EmissionFactors.from_json(factors_path)
    if drone_intensity is not None:
        drone = find_vehicle(vehicles, "drone")
        vehicles = [with_nominal_energy(v, drone_intensity) if v is drone else v for v in vehicles]

    result = comparison_table(vehicles, factors, scenario, baseline)
    manifest = RunManifest(
        "compare",
        parameters={"scenario": scenario, "baseline": baseline, "factors": factors.to_dict()},
        inputs=_inputs(vehicles=vehicles_path, factors=factors_path),
        notes=result.notes,
    )
    if drone_intensity is not None:
        manifest.parameters["drone_intensity_mj_km"] = drone_intensity

    pd.DataFrame([r.to_dict() for r in result.rows]).to_csv(out / "comparison.csv", index=False)
    data = result.to_dict()
    data["per_tonne_km"] = {
        v.name: per_tonne_km(v, factors) for v in vehicles if v.payload_capacity > 0
    }
    with open(out / "comparison.json", "w") as f:
        json.dump(data, f, indent=2)
    energy_bars, ghg_bars = error_bars(vehicles, factors)
    pd.DataFrame(energy_bars).to_csv(out / "figure2.csv", index=False)
    pd.DataFrame(ghg_bars).to_csv(out / "figure3.csv", index=False)
    for name in ("comparison.csv", "comparison.json", "figure2.csv", "figure3.csv"):
        manifest.add_output(out / name)
    manifest.write(out)

    table = Table(title=f"Delivery modes ({scenario} case)")
    for column in ("Vehicle", "MJ/km", "Fuel g/km", "Upstream g/km", "Battery g/km", "MJ/pkg", "g/pkg"):
        table.add_column(column, style="cyan" if column == "Vehicle" else "green")
    for r in result.rows:
        table.add_row(
            r.label or r.vehicle,
            f"{r.energy_mj_km:.3g}",
            f"{r.fuel_g_km:.1f}",
            f"{r.upstream_g_km:.1f}",
            f"{r.battery_g_km:.1f}",
            f"{r.energy_mj_package:.3g}",
            f"{r.ghg_g_package:.1f}",
        )
    console.print(table)
    for name, reduction in result.reductions.items():
        if name != baseline:
            console.print(
                f"  {name}: energy {reduction['energy']:+.1%}, GHG {reduction['ghg']:+.1%} vs {baseline}"
            )
    for note in result.notes:
        console.print(f"[dim]  {note}[/dim]")


@main.command()
@mission_options
@click.option("--payload-kg", type=float, default=1.0, show_default=True, help="Payload of the GHG-distance curve")
@click.option("--vehicles", "vehicles_path", type=EXISTING_FILE, help="Vehicle registry JSON (drone battery factors)")
@click.option("--factors", "factors_path", type=EXISTING_FILE, help="Emission factors JSON")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def sweep(
    ctx, models_path, drone_path, cruise_speed, altitude, takeoff_speed, landing_speed,
    payload_kg, vehicles_path, factors_path, out,
):
    """Energy over mass, speed and distance, and GHG over delivery distance."""
    cfg = ctx.obj["config"]
    out = _out_dir(out)
    models = load_models(models_path)
    drone, env = _drone(cfg, drone_path), Environment()
    factors = EmissionFactors.from_json(factors_path)
    drone_profile = find_vehicle(load_vehicles(vehicles_path), "drone")

    energy_rows = range_sweep(
        models,
        payloads=np.arange(0.0, 2.01, 0.25),
        speeds=(4.0, 6.0, 8.0, 10.0, 12.0),
        distances=np.arange(0.5, 10.01, 0.5),
        config=drone,
        env=env,
        cruise_altitude=altitude,
        takeoff_speed=takeoff_speed,
        landing_speed=landing_speed,
    )
    mission = MissionSpec(payload_kg, cruise_speed, altitude, takeoff_speed, landing_speed)
    ghg_rows = ghg_distance_sweep(
        models, mission, np.arange(0.5, 10.01, 0.5), drone, factors, drone_profile, env
    )
    pd.DataFrame(energy_rows).to_csv(out / "figure1a.csv", index=False)
    pd.DataFrame(ghg_rows).to_csv(out / "figure1b.csv", index=False)

    manifest = RunManifest(
        "sweep",
        parameters={
            "cruise_speed_ms": cruise_speed,
            "altitude_m": altitude,
            "takeoff_speed_ms": takeoff_speed,
            "landing_speed_ms": landing_speed,
            "payload_kg": payload_kg,
            "drone": drone.to_dict(),
        },
        inputs=_inputs(models=models_path, drone=drone_path, vehicles=vehicles_path, factors=factors_path),
        notes=factors.notes(),
    )
    manifest.add_output(out / "figure1a.csv")
    manifest.add_output(out / "figure1b.csv")
    manifest.write(out)
    console.print(f"[green]✓[/green] Wrote {len(energy_rows)} energy rows and {len(ghg_rows)} GHG rows to {out}")


@main.command()
@click.option("--spec", "spec_path", type=EXISTING_FILE, help="Generator spec JSON; defaults when omitted")
@click.option("--seed", type=int, help="Override the synth file's seed")
@click.option("--drone", "drone_path", type=EXISTING_FILE, help="Drone profile JSON")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def synth(ctx, spec_path, seed, drone_path, out):
    """Generate synthetic flights with a known power law."""
    cfg = ctx.obj["config"]
    spec = SynthSpec.from_json(spec_path) if spec_path else SynthSpec()
    if seed is not None:
        spec = SynthSpec.from_dict({**spec.to_dict(), "seed": seed})
    drone = _drone(cfg, drone_path)

    flights = generate_flights(spec, drone)
    paths = write_flights(flights, _out_dir(out))
    manifest = RunManifest(
        "synth",
        parameters={"spec": spec.to_dict(), "drone": drone.to_dict()},
        inputs=_inputs(spec=spec_path, drone=drone_path),
        seeds={"synth": spec.seed},
    )
    for path in paths:
        manifest.add_output(path)
    manifest.write(out)
    console.print(f"[green]✓[/green] Wrote {len(flights)} flights to {out}")


@main.command()
@click.option("--models", "models_path", type=EXISTING_FILE, help="models.json; published coefficients when omitted")
@click.option("--rotor-area", type=float, help="Total rotor disc area, m^2; the shipped profile's when omitted")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), help="Write the fitted drone profile here")
def calibrate(models_path, rotor_area, out_path):
    """Fit the drone's empty mass to the worked delivery example."""
    models = load_models(models_path)
    rotor_area = rotor_area or DroneConfig.default().rotor_area_total
    drone = calibrate_drone(models, rotor_area)
    result = range_report(models, MissionSpec(1.0, 12.0, 100.0), drone)

    console.print(f"[green]✓[/green] Empty mass {drone.empty_mass:.3f} kg (rotor area {rotor_area:.3f} m²)")
    console.print(f"  Two-way range: {result.two_way_km:.2f} km")
    console.print(f"  Vertical energy: {result.vertical_wh:.2f} Wh")
    if out_path is not None:
        _out_dir(out_path.parent)
        drone.to_json(out_path)
        manifest = RunManifest(
            "calibrate",
            parameters={"rotor_area_m2": rotor_area, "empty_mass_kg": drone.empty_mass},
            inputs=_inputs(models=models_path),
        )
        manifest.add_output(out_path)
        manifest.write(out_path.parent)
        console.print(f"  Saved to {out_path}")


@main.group(invoke_without_command=True)
@click.pass_context
def config(ctx):
    """Show or change aeroamp settings."""
    if ctx.invoked_subcommand is None:
        cfg = Config.load()

        table = Table(title="aeroamp Configuration")
        table.add_column("Setting", style="cyan")
        table.add_column("Value", style="green")
        for name in Config.field_names():
            table.add_row(name, str(getattr(cfg, name)))

        console.print(table)


@config.command("set")
@click.argument("key")
@click.argument("value")
def config_set(key: str, value: str):
    """Set a configuration value."""
    cfg = Config.load()

    if key not in Config.field_names():
        console.print(f"[red]✗[/red] Unknown setting: {key}")
        console.print(f"[dim]  Valid settings: {', '.join(Config.field_names())}[/dim]")
        raise click.exceptions.Exit(1)

    current_value = getattr(cfg, key)
    try:
        if isinstance(current_value, int):
            value = int(value)
        elif isinstance(current_value, float):
            value = float(value)
    except ValueError:
        console.print(f"[red]✗[/red] {key} needs a {type(current_value).__name__}, got {value!r}")
        raise click.exceptions.Exit(1)

    setattr(cfg, key, value)
    cfg.save()
    console.print(f"[green]✓[/green] Set {key} = {value}")


@config.command("reset")
def config_reset():
    """Reset configuration to defaults."""
    Config.reset()
    console.print("[green]✓[/green] Configuration reset to defaults")


def run(argv: list[str] | None = None) -> int:
    """Console entry point: 0 on success, 1 on a domain error, 2 on a usage error."""
    try:
        code = main.main(args=argv, prog_name="aeroamp", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 2
    except click.exceptions.Abort:
        console.print("[red]✗[/red] Aborted")
        return 1
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except (AeroampError, OSError) as e:
        console.print(f"[red]✗[/red] {e}")
        return 1
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    raise SystemExit(run())
