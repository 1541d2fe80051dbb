"""
Experiment orchestration: single optimizations, parameter sweeps, the STAR versus
dual-RIS comparison, and the validation battery that checks every closed form
against an independent oracle.

Every run writes its resolved configuration as ``config.toml`` next to its outputs.
Records are hashed without their wall-clock time, so replaying a configuration and
seed reproduces ``record_hash``.
"""

import concurrent.futures
import csv
import dataclasses
import itertools
import json
import logging
import math
import pathlib
import numpy as np
import scipy.optimize
import scipy.stats

from star_covert import montecarlo, sdp_backend
from star_covert._errors import ConfigurationError, DegenerateInputError, InitializationError, SubproblemError
from star_covert._types import CheckReport, RecordRow, ValidationReport
from star_covert.channel_model import ChannelRealization, complex_gaussian, draw_scenario
from star_covert.config import ExperimentConfig, SolverSettings, SystemConfig, ValidationSettings, config_hash
from star_covert.detection import (
    DetectionStats,
    asymptotic_dep_gradient,
    asymptotic_min_dep,
    asymptotic_terms,
    covert_threshold_ratio,
    dep,
    fa_md_probabilities,
    lambda_terms,
    min_dep,
    optimal_threshold,
)
from star_covert.optimizer import (
    DcSurrogate,
    OptimizationTrace,
    build_active,
    build_passive,
    check_constraints,
    complexity_estimate,
    init_feasible,
    passive_reference,
    run_alternating_optimization,
    taylor_active,
    taylor_passive,
)
from star_covert.rates import (
    Beamformers,
    avg_eavesdrop_rate_exact,
    eta_terms,
    evaluate_rates,
    exact_average_secrecy_rates,
    robust_secure_rates,
)
from star_covert.star_ris import Side, StarCoefficients, SurfaceLayout, coefficient_vector, equal_split
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union


_logger = logging.getLogger("star_covert")

PathLike = Union[str, pathlib.Path]

RECORD_FIELDS: Tuple[str, ...] = (
    "config_hash",
    "record_hash",
    "scheme",
    "sweep_parameter",
    "sweep_value",
    "seed",
    "status",
    "error",
    "objective",
    "covert_rate",
    "min_secure_h0",
    "min_secure_h1",
    "covert_component",
    "secure_component",
    "p_e_star",
    "p_ea_star",
    "eta_cs",
    "eta_r",
    "eta_t",
    "outer_iters",
    "inner_i",
    "inner_q",
    "converged",
    "wall_s",
)

TRACE_FIELDS: Tuple[str, ...] = (
    "scheme",
    "sweep_value",
    "outer_iter",
    "objective",
    "covert_rate",
    "min_secure_h0",
    "min_secure_h1",
    "eta_cs",
    "eta_r",
    "eta_t",
    "inner_i",
    "inner_q",
    "wall_s",
)

AGGREGATED: Tuple[str, ...] = (
    "objective",
    "covert_rate",
    "min_secure_h0",
    "min_secure_h1",
    "covert_component",
    "secure_component",
)
"""Record columns averaged per scheme and sweep value."""

MUTATIONS: Tuple[str, ...] = ("lambda",)

ASSUMPTIONS: Dict[str, str] = {
    "noise": "noise powers are taken as configured, not derived from bandwidth and noise figure",
    "carrier": "the carrier frequency is recorded only; path loss depends on distance alone",
    "dual_ris_geometry": "the two conventional surfaces are co-located at the STAR surface position",
}


@dataclasses.dataclass(frozen=True)
class PointResult:
    record: RecordRow
    trace: Optional[OptimizationTrace] = None


def layout_for(scheme: str, m: int) -> SurfaceLayout:
    if scheme == "star":
        return SurfaceLayout.star(m)
    if scheme == "conventional_dual_ris":
        return SurfaceLayout.conventional_dual_ris(m)
    raise ConfigurationError(f"unknown scheme {scheme!r}")


def channel_for(system: SystemConfig, seed: int, point_index: int = 0) -> ChannelRealization:
    """
    The channel of one seed at one sweep point. Angles and gains come from the seed;
    with ``resample_gains`` the gains are redrawn for every sweep point.
    """
    scenario = draw_scenario(system, seed)
    if system.resample_gains:
        scenario = scenario.resample_gains(np.random.default_rng([seed, point_index]))
    return scenario.realize()


def _record(
    digest: str,
    scheme: str,
    parameter: str,
    value: float,
    seed: int,
    trace: Optional[OptimizationTrace] = None,
    status: str = "ok",
    error: str = "",
) -> RecordRow:
    row: Dict[str, Any] = {
        "config_hash": digest,
        "scheme": scheme,
        "sweep_parameter": parameter,
        "sweep_value": value,
        "seed": seed,
        "status": status,
        "error": error,
    }
    if trace is not None:
        last = trace.records[-1]
        p1 = trace.breakdown.p1
        row.update(
            objective=float(trace.objective),
            covert_rate=float(trace.breakdown.covert_rate),
            min_secure_h0=float(trace.breakdown.min_secure_h0),
            min_secure_h1=float(trace.breakdown.min_secure_h1),
            covert_component=float(p1 * trace.breakdown.covert_rate),
            secure_component=float((1.0 - p1) * trace.breakdown.min_secure_h0 + p1 * trace.breakdown.min_secure_h1),
            p_e_star=float(trace.p_e_star),
            p_ea_star=float(trace.p_ea_star),
            eta_cs=float(last.eta_cs),
            eta_r=float(last.eta_r),
            eta_t=float(last.eta_t),
            outer_iters=len(trace.records) - 1,
            inner_i=sum(r.inner_i for r in trace.records),
            inner_q=sum(r.inner_q for r in trace.records),
            converged=bool(trace.converged),
            wall_s=float(last.wall_s),
        )
    # same canonical digest as the configuration, over everything but the timing
    row["record_hash"] = config_hash({key: value for key, value in row.items() if key != "wall_s"})
    return row  # type: ignore[return-value]


def optimize_point(
    config: ExperimentConfig,
    system: SystemConfig,
    seed: int,
    *,
    scheme: str = "star",
    parameter: str = "",
    value: float = math.nan,
    point_index: int = 0,
    start: Optional[Tuple[Beamformers, StarCoefficients]] = None,
) -> PointResult:
    """
    Optimize one (configuration, seed) pair. Failures become records with a
    status of ``infeasible`` or ``failed`` instead of exceptions.

    A warm start that turns out infeasible is dropped in favor of a fresh start.
    """
    digest = config.config_hash
    layout = layout_for(scheme, system.m)
    channel = channel_for(system, seed, point_index)
    rng = np.random.default_rng([seed, point_index, 1])
    try:
        try:
            trace = run_alternating_optimization(
                channel, system, config.solver, rng=rng, layout=layout, start=start
            )
        except InitializationError:
            if start is None:
                raise
            _logger.info("Warm start infeasible at %s=%s (seed %d); starting afresh", parameter, value, seed)
            trace = run_alternating_optimization(channel, system, config.solver, rng=rng, layout=layout)
    except InitializationError as e:
        _logger.warning("No feasible start for seed %d at %s=%s: %s", seed, parameter or "-", value, e)
        return PointResult(_record(digest, scheme, parameter, value, seed, status="infeasible", error=str(e)))
    except (SubproblemError, DegenerateInputError) as e:
        _logger.warning("Optimization failed for seed %d at %s=%s: %s", seed, parameter or "-", value, e)
        return PointResult(_record(digest, scheme, parameter, value, seed, status="failed", error=str(e)))
    _logger.info(
        "%s seed %d %s=%s: objective %.6g after %d outer iterations",
        scheme,
        seed,
        parameter or "-",
        value,
        trace.objective,
        len(trace.records) - 1,
    )
    return PointResult(_record(digest, scheme, parameter, value, seed, trace), trace)


def _sweep_seed(config: ExperimentConfig, seed: int, schemes: Tuple[str, ...]) -> List[PointResult]:
    """All points of one seed; a worker owns one seed so warm starts stay sequential."""
    results: List[PointResult] = []
    if config.sweep is None:
        points: Sequence[Tuple[int, str, float, SystemConfig]] = [(0, "", math.nan, config.system)]
    else:
        points = [(i, config.sweep.parameter, float(v), config.point(v)) for i, v in enumerate(config.sweep.values)]
    warm = config.sweep is not None and config.sweep.nested and not config.system.resample_gains
    previous: Dict[str, Optional[Tuple[Beamformers, StarCoefficients]]] = {scheme: None for scheme in schemes}
    for index, parameter, value, system in points:
        solved: Optional[Tuple[Beamformers, StarCoefficients]] = None
        for scheme in schemes:
            start = previous[scheme] if warm else None
            if scheme == "star" and solved is not None:
                # the dual-RIS solution is a valid STAR point, so STAR starts there
                start = solved
            result = optimize_point(
                config,
                system,
                seed,
                scheme=scheme,
                parameter=parameter,
                value=value,
                point_index=index,
                start=start,
            )
            results.append(result)
            if result.trace is not None:
                previous[scheme] = (result.trace.beams, result.trace.coeffs)
                solved = previous[scheme]
    return results


def _run_seeds(config: ExperimentConfig, schemes: Tuple[str, ...], jobs: int) -> List[PointResult]:
    if jobs <= 1 or len(config.seeds) == 1:
        return [result for seed in config.seeds for result in _sweep_seed(config, seed, schemes)]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = [executor.submit(_sweep_seed, config, seed, schemes) for seed in config.seeds]
        # collect in seed order so outputs do not depend on scheduling
        return [result for future in futures for result in future.result()]


def aggregate(records: Sequence[Mapping[str, Any]]) -> List[Dict[str, Any]]:
    """Mean and standard deviation of the rates per scheme and sweep value, over successful seeds."""
    groups: Dict[Tuple[str, str], List[Mapping[str, Any]]] = {}
    for record in records:
        groups.setdefault((record["scheme"], repr(record["sweep_value"])), []).append(record)
    table = []
    for (scheme, _), rows in groups.items():
        ok = [row for row in rows if row["status"] == "ok"]
        entry: Dict[str, Any] = {
            "scheme": scheme,
            "sweep_value": rows[0]["sweep_value"],
            "runs": len(rows),
            "succeeded": len(ok),
        }
        for key in AGGREGATED:
            values = np.array([row[key] for row in ok], dtype=float)
            entry[f"{key}_mean"] = float(values.mean()) if len(values) else math.nan
            entry[f"{key}_std"] = float(values.std()) if len(values) else math.nan
        table.append(entry)
    return table


def prepare_output(out_dir: PathLike, config: ExperimentConfig) -> pathlib.Path:
    path = pathlib.Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / "config.toml").write_text(config.to_toml(), encoding="utf-8")
    return path


def write_csv(path: pathlib.Path, rows: Sequence[Mapping[str, Any]], fields: Sequence[str]) -> None:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(fields), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_json(path: pathlib.Path, document: Any) -> None:
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_run(
    out: pathlib.Path, config: ExperimentConfig, results: Sequence[PointResult], command: str
) -> Dict[str, Any]:
    records = [result.record for result in results]
    write_csv(out / "records.csv", records, RECORD_FIELDS)
    traces: Dict[int, List[Dict[str, Any]]] = {}
    for result in results:
        if result.trace is None:
            continue
        for row in result.trace.to_rows():
            traces.setdefault(result.record["seed"], []).append(
                {"scheme": result.record["scheme"], "sweep_value": result.record["sweep_value"], **row}
            )
    for seed, rows in traces.items():
        write_csv(out / f"trace_{seed}.csv", rows, TRACE_FIELDS)
    summary = {
        "command": command,
        "config_hash": config.config_hash,
        "sweep": None if config.sweep is None else {"parameter": config.sweep.parameter, "nested": config.sweep.nested},
        "seeds": list(config.seeds),
        "aggregates": aggregate(records),
        "failures": sum(1 for record in records if record["status"] != "ok"),
        "complexity": complexity_estimate(config.system, config.solver),
        "assumptions": ASSUMPTIONS,
    }
    write_json(out / "summary.json", summary)
    return summary


def optimize_seeds(
    config: ExperimentConfig, seeds: Sequence[int], jobs: int = 1, scheme: Optional[str] = None
) -> List[PointResult]:
    """Optimize the configured system once per seed, on ``jobs`` worker processes."""
    scheme = scheme or config.baseline
    if jobs <= 1 or len(seeds) == 1:
        return [optimize_point(config, config.system, seed, scheme=scheme) for seed in seeds]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = [executor.submit(optimize_point, config, config.system, seed, scheme=scheme) for seed in seeds]
        return [future.result() for future in futures]


def run_optimize(
    config: ExperimentConfig, out_dir: PathLike, seeds: Optional[Sequence[int]] = None, jobs: int = 1
) -> List[PointResult]:
    """Optimize the given seeds (the first configured one by default) and write their traces."""
    out = prepare_output(out_dir, config)
    results = optimize_seeds(config, list(seeds or config.seeds[:1]), jobs)
    _write_run(out, config, results, "optimize")
    return results


def _finish_checks(out: pathlib.Path, summary: Dict[str, Any], checks: List[CheckReport]) -> Dict[str, Any]:
    for report in checks:
        _logger.info("Check %s: %s", report["name"], "passed" if report["passed"] else "FAILED")
    summary["checks"] = checks
    write_json(out / "summary.json", summary)
    return summary


def run_sweep(config: ExperimentConfig, out_dir: PathLike, jobs: int = 1, check: bool = False) -> Dict[str, Any]:
    """
    Optimize every seed at every sweep value. Along nested sweeps each point starts
    from the previous converged point of the same seed.

    :param check: Also judge the sweep means against their expected trend and add the
        verdict to ``summary.json`` under ``checks``.
    :raise ConfigurationError: If the configuration has no sweep.
    """
    if config.sweep is None:
        raise ConfigurationError("the sweep command needs a [sweep] block")
    out = prepare_output(out_dir, config)
    results = _run_seeds(config, (config.baseline,), jobs)
    summary = _write_run(out, config, results, "sweep")
    if not check:
        return summary
    tolerance = config.validation.trend_tolerance
    trend = check_trends(summary["aggregates"], config.sweep.parameter, config.baseline, tolerance)
    return _finish_checks(out, summary, [trend])


def run_baseline(config: ExperimentConfig, out_dir: PathLike, jobs: int = 1, check: bool = False) -> Dict[str, Any]:
    """
    Optimize the conventional dual-RIS layout and the STAR surface on the same
    channels. The STAR run starts from the dual-RIS solution.

    :param check: Also require the STAR means to match or beat the dual-RIS means at
        every sweep value, and the STAR sweep to follow its expected trend.
    """
    if config.system.m % 2 or (config.sweep is not None and any(config.point(v).m % 2 for v in config.sweep.values)):
        raise ConfigurationError("the dual-RIS comparison needs even element counts")
    out = prepare_output(out_dir, config)
    results = _run_seeds(config, ("conventional_dual_ris", "star"), jobs)
    summary = _write_run(out, config, results, "baseline")
    if not check:
        return summary
    tolerance = config.validation.trend_tolerance
    checks = [check_star_advantage(summary["aggregates"], tolerance)]
    if config.sweep is not None:
        checks.append(check_trends(summary["aggregates"], config.sweep.parameter, "star", tolerance))
    return _finish_checks(out, summary, checks)


# Validation battery

PAIRINGS: Tuple[Tuple[str, str, str], ...] = (
    ("dep_closed_form", "detection.fa_md_probabilities", "montecarlo.empirical_dep"),
    ("empirical_min_dep", "detection.min_dep", "montecarlo.empirical_dep over a threshold grid"),
    ("min_dep_grid", "detection.min_dep", "bounded minimization of detection.dep"),
    ("exponentiality", "detection.beam_power_mean", "montecarlo.exponentiality_check"),
    ("large_system", "detection.asymptotic_terms", "montecarlo.large_system_convergence"),
    (
        "asymptotic_monotonicity",
        "detection.asymptotic_dep_gradient",
        "finite differences of detection.asymptotic_min_dep",
    ),
    ("covert_ratio", "detection.covert_threshold_ratio", "detection.asymptotic_min_dep"),
    ("gamma_rate", "rates.avg_eavesdrop_rate_exact", "montecarlo.empirical_eavesdrop_rate"),
    ("robust_bound", "rates.robust_secure_rates", "rates.exact_average_secrecy_rates"),
    ("sdp_sanity", "sdp_backend.solve", "Hermitian eigenvalues"),
    ("surrogate_soundness", "optimizer.taylor_active, optimizer.taylor_passive", "optimizer.DcSurrogate.true_value"),
)

OPTIMIZER_PAIRINGS: Tuple[Tuple[str, str, str], ...] = (
    ("convergence", "optimizer.run_alternating_optimization", "optimizer.check_constraints on seeded instances"),
    ("brute_force", "optimizer.run_alternating_optimization", "four-phase STAR grid crossed with random beams"),
)
"""Checks that run the optimizer itself; ``validate --optimizer`` adds them to the battery."""

SWEEP_PAIRINGS: Tuple[Tuple[str, str, str], ...] = (
    ("trends", "experiments.aggregate", "expected direction of the sweep means"),
    ("star_advantage", "scheme star", "scheme conventional_dual_ris at matched settings"),
)
"""Checks over the aggregates of ``sweep --check`` and ``baseline --check``."""


def family_sigmas(sigmas: float, comparisons: int) -> float:
    """
    Band width, in standard errors, that keeps the chance of a false alarm anywhere in
    ``comparisons`` Gaussian comparisons at the two-sided level of one ``sigmas`` band.

    >>> round(family_sigmas(3.0, 1), 9)
    3.0
    """
    level = 2.0 * scipy.stats.norm.sf(sigmas)
    return float(scipy.stats.norm.isf(level / (2.0 * max(comparisons, 1))))


def _report(name: str, passed: bool, **fields: Any) -> CheckReport:
    closed_form, oracle = next((p[1], p[2]) for p in PAIRINGS + OPTIMIZER_PAIRINGS + SWEEP_PAIRINGS if p[0] == name)
    report: Dict[str, Any] = {"name": name, "closed_form": closed_form, "oracle": oracle, "passed": bool(passed)}
    report.update(fields)
    return report  # type: ignore[return-value]


def _small_system(system: SystemConfig, **changes: Any) -> SystemConfig:
    return system.replace(**{"n_t": 4, "m_y": 4, "m_z": 4, "k_users": 2, **changes})


def random_beams(rng: np.random.Generator, n_t: int, k_users: int, power: float) -> Beamformers:
    """Gaussian beamformers scaled to total power ``power``."""
    beams = Beamformers(complex_gaussian(rng, n_t), complex_gaussian(rng, (k_users, n_t)))
    factor = math.sqrt(power / beams.power)
    return beams.scaled(factor, factor)


def _mc(
    settings: ValidationSettings, seed_offset: int = 0, n_samples: Optional[int] = None, workers: int = 1
) -> montecarlo.McSettings:
    return montecarlo.McSettings(
        n_samples=n_samples or settings.n_samples,
        seed=settings.seed + seed_offset,
        confidence_sigmas=settings.confidence_sigmas,
        workers=max(workers, 1),
    )


def _with_retry(
    name: str, run: Callable[[montecarlo.McSettings], CheckReport], mc: montecarlo.McSettings, factor: int
) -> CheckReport:
    """Run a sampling check; on failure run it once more with ``factor`` times the samples on a fresh stream."""
    report = run(mc)
    report["attempts"] = 1
    if report["passed"]:
        return report
    _logger.warning("Check %s failed; retrying with %dx samples", name, factor)
    retry = run(dataclasses.replace(mc.scaled(factor), seed=mc.seed + 7919))
    retry["attempts"] = 2
    return retry


def check_dep_closed_form(
    system: SystemConfig, settings: ValidationSettings, mc: montecarlo.McSettings, lambda_scale: float = 1.0
) -> CheckReport:
    """
    Radiometer false-alarm and missed-detection probabilities against sampling, on
    single-path base-station links where the summed warden power is exactly exponential.
    """
    comparisons = 2 * settings.n_scenarios * settings.n_taus
    band = family_sigmas(mc.confidence_sigmas, comparisons)
    worst = 0.0
    details = []
    for s in range(settings.n_scenarios):
        small = _small_system(system, l_paths=1)
        rng = np.random.default_rng([settings.seed, s])
        channel = draw_scenario(small, settings.seed + s).realize()
        beams = random_beams(rng, small.n_t, small.k_users, small.p_tmax)
        theta_r = coefficient_vector(equal_split(small.m, rng), Side.REFLECT)
        lambda0, lambda1 = lambda_terms(channel, beams, theta_r)
        stats = DetectionStats(lambda0 * lambda_scale, lambda1 * lambda_scale, small.noise_w)
        taus = small.noise_w + np.geomspace(0.1 * lambda0, 3.0 * lambda1, settings.n_taus)
        estimate = montecarlo.empirical_dep(
            channel, beams, theta_r, taus, small.noise_w, dataclasses.replace(mc, seed=mc.seed + s)
        )
        for i, tau in enumerate(taus):
            p_fa, p_md = fa_md_probabilities(tau, stats)
            for est, ref, err in (
                (estimate.p_fa[i], p_fa, estimate.stderr_fa[i]),
                (estimate.p_md[i], p_md, estimate.stderr_md[i]),
            ):
                worst = max(worst, abs(est - ref) / max(err, 1.0 / mc.n_samples))
        details.append(estimate.to_dict())
    return _report(
        "dep_closed_form",
        worst <= band,
        estimate=details,
        detail=f"largest deviation {worst:.2f} standard errors (band {band:.2f})",
    )


def check_empirical_min_dep(
    system: SystemConfig, settings: ValidationSettings, mc: montecarlo.McSettings
) -> CheckReport:
    """The smallest sampled detection error over a threshold grid against ``min_dep``."""
    small = _small_system(system, l_paths=1)
    rng = np.random.default_rng([settings.seed, 101])
    channel = draw_scenario(small, settings.seed).realize()
    beams = random_beams(rng, small.n_t, small.k_users, small.p_tmax)
    theta_r = coefficient_vector(equal_split(small.m, rng), Side.REFLECT)
    lambda0, lambda1 = lambda_terms(channel, beams, theta_r)
    reference = min_dep(lambda0, lambda1)
    tau_star = optimal_threshold(DetectionStats(lambda0, lambda1, small.noise_w))
    excess = tau_star - small.noise_w
    taus = small.noise_w + excess * np.linspace(0.5, 1.5, 41)
    estimate = montecarlo.empirical_dep(channel, beams, theta_r, taus, small.noise_w, mc)
    best = float(estimate.dep.min())
    return _report(
        "empirical_min_dep", abs(best - reference) <= 0.01, estimate=best, reference=reference, stderr=None
    )


def check_min_dep_grid(settings: ValidationSettings, pairs: int = 100) -> CheckReport:
    rng = np.random.default_rng([settings.seed, 202])
    worst = 0.0
    for _ in range(pairs):
        lambda0 = 10.0 ** rng.uniform(-2, 2)
        lambda1 = lambda0 * (1.0 + 10.0 ** rng.uniform(-2, 1))
        stats = DetectionStats(lambda0, lambda1, 1.0)
        grid = 1.0 + np.geomspace(1e-3 * lambda0, 100.0 * lambda1, 4001)
        values = np.array([dep(t, stats) for t in grid])
        i = int(np.argmin(values))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        refined = scipy.optimize.minimize_scalar(
            lambda t: dep(t, stats), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * hi}
        )
        worst = max(worst, abs(min(float(refined.fun), values[i]) - min_dep(lambda0, lambda1)))
    exact = min_dep(1.0, 2.0)
    return _report(
        "min_dep_grid",
        worst <= 1e-6 and math.isclose(exact, 0.75, rel_tol=1e-12),
        estimate=worst,
        reference=0.0,
        detail=f"min_dep(1, 2) = {exact!r}",
    )


def check_exponentiality(system: SystemConfig, settings: ValidationSettings, mc: montecarlo.McSettings) -> CheckReport:
    comparisons = 2 * settings.n_scenarios
    band = family_sigmas(mc.confidence_sigmas, comparisons)
    per_check = dataclasses.replace(mc, confidence_sigmas=band)
    tolerance = max(0.03, band * math.sqrt(8.0 / mc.n_samples))
    reports = []
    for s in range(settings.n_scenarios):
        small = _small_system(system)
        rng = np.random.default_rng([settings.seed, 303, s])
        channel = draw_scenario(small, settings.seed + s).realize()
        beams = random_beams(rng, small.n_t, small.k_users, small.p_tmax)
        theta_r = coefficient_vector(equal_split(small.m, rng), Side.REFLECT)
        for beam in (beams.w_b, beams.w_k[0]):
            reports.append(
                montecarlo.exponentiality_check(
                    channel, beam, theta_r, dataclasses.replace(per_check, seed=mc.seed + len(reports)), tolerance
                )
            )
    return _report(
        "exponentiality", all(r.passed for r in reports), estimate=[r.to_dict() for r in reports]
    )


def check_large_system(system: SystemConfig, settings: ValidationSettings, mc: montecarlo.McSettings) -> CheckReport:
    rng = np.random.default_rng([settings.seed, 404])
    beams = random_beams(rng, system.n_t, system.k_users, system.p_tmax)
    report = montecarlo.large_system_convergence(
        system, beams, settings.large_system_m, mc, settings.seed, scenarios=settings.n_scenarios
    )
    return _report("large_system", report.passed, estimate=report.to_dict())


def check_asymptotic_monotonicity(settings: ValidationSettings, points: int = 100) -> CheckReport:
    rng = np.random.default_rng([settings.seed, 505])
    failures = 0
    for _ in range(points):
        alpha, beta = 10.0 ** rng.uniform(-2, 2, size=2)
        h = 1e-6
        a_hi, a_lo = asymptotic_min_dep(alpha * (1 + h), beta), asymptotic_min_dep(alpha * (1 - h), beta)
        b_hi, b_lo = asymptotic_min_dep(alpha, beta * (1 + h)), asymptotic_min_dep(alpha, beta * (1 - h))
        d_alpha = (a_hi - a_lo) / (2 * alpha * h)
        d_beta = (b_hi - b_lo) / (2 * beta * h)
        g_alpha, g_beta = asymptotic_dep_gradient(alpha, beta)
        signs = d_alpha < 0 < d_beta and g_alpha < 0 < g_beta
        close = math.isclose(d_alpha, g_alpha, rel_tol=1e-3) and math.isclose(d_beta, g_beta, rel_tol=1e-3)
        failures += not (signs and close)
    limits = asymptotic_min_dep(1e6, 1.0) < 0.01 and asymptotic_min_dep(1.0, 1e6) > 0.99
    return _report(
        "asymptotic_monotonicity",
        failures == 0 and limits,
        estimate=failures,
        reference=0,
        detail=f"{failures} of {points} points disagree; limits {'hold' if limits else 'fail'}",
    )


def check_covert_ratio(solver_tolerance: float = 1e-9) -> CheckReport:
    epsilons = (0.05, 0.1, 0.15, 0.25, 0.5)
    errors = [abs(asymptotic_min_dep(1.0, covert_threshold_ratio(eps)) - (1.0 - eps)) for eps in epsilons]
    at_quarter = abs(covert_threshold_ratio(0.25) - 1.0)
    return _report(
        "covert_ratio",
        max(errors) <= 1e-8 and at_quarter <= solver_tolerance,
        estimate=max(errors),
        reference=0.0,
        detail=f"|phi(0.25) - 1| = {at_quarter:.3g}",
    )


def check_gamma_rate(system: SystemConfig, settings: ValidationSettings, mc: montecarlo.McSettings) -> CheckReport:
    """Closed-form average eavesdropping rates against sampling, with single-path eavesdropper links."""
    comparisons = 2 * settings.n_scenarios * 2
    band = family_sigmas(mc.confidence_sigmas, comparisons)
    worst_relative = 0.0
    passed = True
    estimates = []
    for s in range(settings.n_scenarios):
        small = _small_system(system, p_paths=1)
        rng = np.random.default_rng([settings.seed, 606, s])
        channel = draw_scenario(small, settings.seed + s).realize()
        beams = random_beams(rng, small.n_t, small.k_users, small.p_tmax)
        theta_t = coefficient_vector(equal_split(small.m, rng), Side.TRANSMIT)
        estimate = montecarlo.empirical_eavesdrop_rate(
            channel, theta_t, beams, small.noise_e, dataclasses.replace(mc, seed=mc.seed + s)
        )
        for k in range(small.k_users):
            eta = eta_terms(channel, theta_t, beams, k)
            for rate, err, (num, den) in (
                (estimate.rate_h0[k], estimate.stderr_h0[k], (eta.eta0, eta.eta0_hat)),
                (estimate.rate_h1[k], estimate.stderr_h1[k], (eta.eta1, eta.eta1_hat)),
            ):
                exact = avg_eavesdrop_rate_exact(num, den, small.noise_e)
                relative = abs(rate - exact) / exact if exact > 0 else abs(rate)
                worst_relative = max(worst_relative, relative)
                if relative > 0.02 and not montecarlo.within_confidence(rate, exact, err, band, mc.n_samples):
                    passed = False
        estimates.append(estimate.to_dict())
    return _report(
        "gamma_rate", passed, estimate=estimates, detail=f"largest relative deviation {worst_relative:.4f}"
    )


def check_robust_bound(system: SystemConfig, settings: ValidationSettings) -> CheckReport:
    violations = 0
    for seed in range(settings.bound_seeds):
        rng = np.random.default_rng([settings.seed, 707, seed])
        channel = draw_scenario(system, settings.seed + seed).realize()
        beams = random_beams(rng, system.n_t, system.k_users, system.p_tmax)
        theta_t = coefficient_vector(equal_split(system.m, rng), Side.TRANSMIT)
        robust = robust_secure_rates(channel, theta_t, beams, system.noise_k, system.noise_e)
        exact_h0, exact_h1 = exact_average_secrecy_rates(channel, theta_t, beams, system.noise_k, system.noise_e)
        violations += int(np.sum(robust.h0 > exact_h0 + 1e-12) + np.sum(robust.h1 > exact_h1 + 1e-12))
    return _report("robust_bound", violations == 0, estimate=violations, reference=0)


def check_sdp_sanity(settings: ValidationSettings, instances: int = 5, tolerance: float = 1e-6) -> CheckReport:
    """Minimum and maximum eigenvalues of random Hermitian matrices as trace-constrained programs."""
    rng = np.random.default_rng([settings.seed, 808])
    worst = 0.0
    statuses = []
    for _ in range(instances):
        a = complex_gaussian(rng, (4, 4))
        c = (a + a.conj().T) / 2.0
        eigenvalues = np.linalg.eigvalsh(c)
        unit_trace = sdp_backend.Constraint(
            sdp_backend.LinearFunctional({"X": np.eye(4)}), sdp_backend.Relation.EQ, 1.0, "trace"
        )
        problems = [
            (
                sdp_backend.SdpProblem(
                    (sdp_backend.Block("X", 4),),
                    (),
                    sdp_backend.LinearFunctional({"X": c}),
                    sdp_backend.Sense.MINIMIZE,
                    (unit_trace,),
                ),
                eigenvalues[0],
            ),
            (
                sdp_backend.SdpProblem(
                    (sdp_backend.Block("X", 4),),
                    (sdp_backend.ScalarVariable("t"),),
                    sdp_backend.LinearFunctional(scalars={"t": 1.0}),
                    sdp_backend.Sense.MAXIMIZE,
                    (
                        unit_trace,
                        sdp_backend.Constraint(
                            sdp_backend.LinearFunctional({"X": c}, {"t": -1.0}),
                            sdp_backend.Relation.GE,
                            0.0,
                            "epigraph",
                        ),
                    ),
                ),
                eigenvalues[-1],
            ),
        ]
        for problem, expected in problems:
            solution = sdp_backend.solve(problem)
            statuses.append(solution.status.value)
            worst = max(worst, abs(solution.objective_value - expected) / (1.0 + abs(expected)))
    passed = worst <= tolerance and all(status == "optimal" for status in statuses)
    return _report("sdp_sanity", passed, estimate=worst, reference=0.0, detail=", ".join(sorted(set(statuses))))


def _random_psd(rng: np.random.Generator, n: int, trace: float) -> np.ndarray:
    v = complex_gaussian(rng, (n, int(rng.integers(1, 4))))
    x = v @ v.conj().T
    return x * (trace / float(np.real(np.trace(x))))


def _surrogate_violations(
    surrogates: Sequence[DcSurrogate], samples: Sequence[Mapping[str, np.ndarray]], tolerance: float = 1e-9
) -> Tuple[int, int]:
    touch = bound = 0
    for surrogate in surrogates:
        ref = surrogate.reference
        true_ref = surrogate.true_value(ref)
        scale = max(1.0, abs(true_ref))
        gap = max(abs(surrogate.value(ref) - true_ref), abs(surrogate.minorant(ref) - true_ref))
        if gap > tolerance * scale:
            touch += 1
        for values in samples:
            true_value = surrogate.true_value(values)
            slack = tolerance * max(1.0, abs(true_value))
            value = surrogate.value(values)
            if surrogate.minorant(values) > value + slack or value > true_value + slack:
                bound += 1
    return touch, bound


def check_surrogate_soundness(system: SystemConfig, settings: ValidationSettings) -> CheckReport:
    small = _small_system(system)
    rng = np.random.default_rng([settings.seed, 909])
    channel = draw_scenario(small, settings.seed).realize()
    phi_eps = covert_threshold_ratio(small.epsilon)
    try:
        start = init_feasible(channel, small, rng, phi_eps=phi_eps)
    except InitializationError as e:
        return _report("surrogate_soundness", False, detail=f"no reference point: {e}")
    active = build_active(channel, start.coeffs, small, phi_eps)
    vector = start.beams.stack()
    active_set = taylor_active(active, np.outer(vector, vector.conj()))
    n = len(vector)
    active_samples = [
        {"W": _random_psd(rng, n, small.p_tmax * rng.uniform(0.2, 1.0))} for _ in range(settings.surrogate_samples)
    ]
    layout = SurfaceLayout.star(small.m)
    passive = build_passive(channel, start.beams, small, phi_eps, layout)
    passive_set = taylor_passive(passive, passive_reference(start.coeffs, layout))
    passive_samples = [
        {"Q_r": _random_psd(rng, small.m, small.m / 2), "Q_t": _random_psd(rng, small.m, small.m / 2)}
        for _ in range(settings.surrogate_samples)
    ]
    touch_a, bound_a = _surrogate_violations([s for _, _, s in active_set.items()], active_samples)
    touch_p, bound_p = _surrogate_violations([s for _, _, s in passive_set.items()], passive_samples)
    violations = touch_a + bound_a + touch_p + bound_p
    return _report(
        "surrogate_soundness",
        violations == 0,
        estimate=violations,
        reference=0,
        detail=f"active: {touch_a} touch / {bound_a} bound, passive: {touch_p} touch / {bound_p} bound",
    )


# Optimizer and sweep checks

TREND_DIRECTIONS: Dict[str, Tuple[Tuple[str, int], ...]] = {
    "p_tmax_dbw": (("objective", 1),),
    "epsilon": (("objective", 1),),
    "m": (("objective", 1),),
    "n_t": (("objective", 1),),
    "p1": (("covert_component", 1), ("secure_component", -1)),
}
"""Aggregated column and its expected direction (+1 up, -1 down) as each sweep parameter grows."""


def check_trends(
    aggregates: Sequence[Mapping[str, Any]], parameter: str, scheme: str = "star", tolerance: float = 1e-6
) -> CheckReport:
    """
    Check that the means of one scheme move in the expected direction between
    consecutive sweep values. A sweep value without any successful seed fails.
    """
    if parameter not in TREND_DIRECTIONS:
        raise ConfigurationError(f"no expected trend for sweep parameter {parameter!r}")
    rows = sorted((row for row in aggregates if row["scheme"] == scheme), key=lambda row: float(row["sweep_value"]))
    violations = []
    series: Dict[str, List[float]] = {}
    for key, direction in TREND_DIRECTIONS[parameter]:
        means = [float(row[f"{key}_mean"]) for row in rows]
        series[key] = means
        for before, after, a, b in zip(rows, rows[1:], means, means[1:]):
            if math.isnan(a) or math.isnan(b) or direction * (b - a) < -tolerance:
                violations.append(f"{key} {a:.6g} at {before['sweep_value']} -> {b:.6g} at {after['sweep_value']}")
    return _report(
        "trends",
        not violations,
        estimate={"sweep_values": [row["sweep_value"] for row in rows], **series},
        detail="; ".join(violations) or f"{scheme} means follow the expected {parameter} trend",
    )


def check_star_advantage(aggregates: Sequence[Mapping[str, Any]], tolerance: float = 1e-6) -> CheckReport:
    """The mean STAR objective matches or beats the dual-RIS mean at every sweep value."""
    means: Dict[str, Dict[str, float]] = {}
    for row in aggregates:
        means.setdefault(repr(row["sweep_value"]), {})[row["scheme"]] = float(row["objective_mean"])
    shortfalls = []
    for value, by_scheme in means.items():
        star = by_scheme.get("star", math.nan)
        dual = by_scheme.get("conventional_dual_ris", math.nan)
        if math.isnan(star) or math.isnan(dual) or star < dual - tolerance:
            shortfalls.append(f"at {value}: star {star:.6g} vs dual-RIS {dual:.6g}")
    return _report(
        "star_advantage",
        not shortfalls,
        estimate=means,
        detail="; ".join(shortfalls) or "STAR matches or beats the dual-RIS baseline everywhere",
    )


def check_convergence(
    config: ExperimentConfig, seeds: Optional[Sequence[int]] = None, jobs: int = 1
) -> CheckReport:
    """
    Optimize seeded instances of the configured system. Every instance must keep a
    nondecreasing objective, stop on the outer tolerance within the iteration budget,
    end with rank-one residuals within the inner tolerances, and pass the independent
    constraint check.
    """
    solver = config.solver
    seeds = list(range(config.validation.convergence_seeds) if seeds is None else seeds)
    residual_tol = max(solver.active_tol, solver.passive_tol)
    failures, details = [], []
    for seed, result in zip(seeds, optimize_seeds(config, seeds, jobs, scheme="star")):
        trace = result.trace
        if trace is None:
            failures.append(f"seed {seed}: {result.record['status']} ({result.record['error']})")
            continue
        objectives = trace.objectives
        drop = max([a - b for a, b in zip(objectives, objectives[1:])] + [0.0])
        last = trace.records[-1]
        residual = max(last.eta_cs, last.eta_r, last.eta_t)
        channel = channel_for(config.system, seed)
        feasible = check_constraints(
            channel, trace.coeffs, trace.beams, config.system, trace.phi_eps, tolerance=solver.feasibility_tol
        ).passed
        problems = []
        if drop > solver.monotone_tol:
            problems.append(f"objective drops by {drop:.3g}")
        if not trace.converged:
            problems.append(f"still moving after {solver.max_outer} outer iterations")
        if residual > residual_tol:
            problems.append(f"rank-one residual {residual:.3g}")
        if not feasible:
            problems.append("constraint check fails")
        if problems:
            failures.append(f"seed {seed}: " + ", ".join(problems))
        details.append(
            {
                "seed": seed,
                "objective": trace.objective,
                "outer_iters": len(objectives) - 1,
                "largest_drop": drop,
                "residual": residual,
                "feasible": feasible,
            }
        )
    return _report(
        "convergence",
        not failures,
        estimate=details,
        detail="; ".join(failures) or f"{len(seeds)} instances converged cleanly",
    )


GRID_PHASES: Tuple[float, ...] = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)

REFLECT_MARGINS: Tuple[str, ...] = ("power", "covertness", "covert_rate", "layout")


@dataclasses.dataclass(frozen=True)
class GridPoint:
    objective: float
    coeffs: StarCoefficients
    beams: Beamformers


def shrink_covert_beam(
    channel: ChannelRealization, beams: Beamformers, theta_r: np.ndarray, phi_eps: float
) -> Beamformers:
    """Scale the covert beam down, if needed, until the large-system covertness ratio holds at ``theta_r``."""
    terms = asymptotic_terms(channel, beams, theta_r)
    if terms.alpha > 0 and terms.beta < phi_eps * terms.alpha:
        return beams.scaled(math.sqrt(0.999 * terms.beta / (phi_eps * terms.alpha)), 1.0)
    return beams


def best_grid_point(
    channel: ChannelRealization,
    system: SystemConfig,
    phi_eps: float,
    beams: Beamformers,
    phases: Sequence[float] = GRID_PHASES,
    tolerance: float = 1e-6,
) -> Optional[GridPoint]:
    """
    Best feasible point, for fixed beamformers, over every assignment of ``phases`` to
    the reflected and the transmitted coefficient of each element with the energy
    split evenly.

    Reflection only reaches the covert user and the warden and transmission only the
    security users, so each side's phase vector is picked on its own; the winning
    pair is confirmed with the full constraint check.
    """
    split = np.full(channel.geometry.m, 0.5)
    best_reflect: Tuple[float, Optional[Tuple[float, ...]]] = (-math.inf, None)
    best_transmit: Tuple[float, Optional[Tuple[float, ...]]] = (-math.inf, None)
    for grid in itertools.product(phases, repeat=channel.geometry.m):
        coeffs = StarCoefficients.create(split, np.array(grid), np.array(grid))
        margins = check_constraints(channel, coeffs, beams, system, phi_eps, tolerance=tolerance).margins
        breakdown = evaluate_rates(channel, coeffs, beams, system)
        covert = breakdown.p1 * breakdown.covert_rate
        if all(margins[key] >= -tolerance for key in REFLECT_MARGINS) and covert > best_reflect[0]:
            best_reflect = (covert, grid)
        secure_ok = all(margin >= -tolerance for key, margin in margins.items() if key.startswith("secure_"))
        if secure_ok and breakdown.average_sum - covert > best_transmit[0]:
            best_transmit = (breakdown.average_sum - covert, grid)
    if best_reflect[1] is None or best_transmit[1] is None:
        return None
    coeffs = StarCoefficients.create(split, np.array(best_reflect[1]), np.array(best_transmit[1]))
    if not check_constraints(channel, coeffs, beams, system, phi_eps, tolerance=tolerance).passed:
        return None
    return GridPoint(evaluate_rates(channel, coeffs, beams, system).average_sum, coeffs, beams)


def brute_force_search(
    channel: ChannelRealization,
    system: SystemConfig,
    phi_eps: float,
    beam_sets: int,
    rng: np.random.Generator,
    phases: Sequence[float] = GRID_PHASES,
    tolerance: float = 1e-6,
) -> Tuple[Optional[GridPoint], int]:
    """
    Search the phase grid for each of ``beam_sets`` random full-power beamformer
    sets. Each set's covert beam is first shrunk to meet the covertness ratio at one
    randomly drawn grid point.

    :return: The best point found, if any, and how many beamformer sets had a feasible
        grid point.
    """
    m = channel.geometry.m
    best: Optional[GridPoint] = None
    feasible = 0
    for _ in range(beam_sets):
        beams = random_beams(rng, system.n_t, system.k_users, system.p_tmax)
        aim = StarCoefficients.create(np.full(m, 0.5), rng.choice(phases, m), rng.choice(phases, m))
        beams = shrink_covert_beam(channel, beams, coefficient_vector(aim, Side.REFLECT), phi_eps)
        point = best_grid_point(channel, system, phi_eps, beams, phases, tolerance)
        if point is None:
            continue
        feasible += 1
        if best is None or point.objective > best.objective:
            best = point
    return best, feasible


def brute_force_system(system: SystemConfig) -> SystemConfig:
    """
    The instance for the exhaustive comparison: three antennas, a 2x2 surface, two
    security users and two paths per link. With two antennas serving the covert user
    and two security users, no start meets the secrecy targets at the default
    geometry.
    """
    return system.replace(n_t=3, m_y=2, m_z=2, k_users=2, l_paths=2, p_paths=2)


def check_brute_force(
    system: SystemConfig,
    validation: ValidationSettings,
    solver: SolverSettings,
    scenario_seed: Optional[int] = None,
    scenario_tries: int = 10,
    phases: Sequence[float] = GRID_PHASES,
) -> CheckReport:
    """
    The optimizer's converged objective on ``system`` against the best point of an
    exhaustive phase grid crossed with random beamformers. It must reach
    ``validation.brute_force_ratio`` of the grid best.

    Scenarios are drawn from ``scenario_seed`` onward until the optimizer finds a
    feasible start, at most ``scenario_tries`` times.
    """
    first = validation.seed if scenario_seed is None else scenario_seed
    skipped: List[int] = []
    for seed in range(first, first + scenario_tries):
        channel = draw_scenario(system, seed).realize()
        try:
            trace = run_alternating_optimization(channel, system, solver, rng=np.random.default_rng([seed, 0, 1]))
            break
        except InitializationError:
            skipped.append(seed)
        except (SubproblemError, DegenerateInputError) as e:
            return _report("brute_force", False, detail=f"optimizer failed on scenario {seed}: {e}")
    else:
        return _report("brute_force", False, skipped=skipped, detail="no scenario admits a feasible start")
    best, feasible = brute_force_search(
        channel,
        system,
        trace.phi_eps,
        validation.brute_force_beams,
        np.random.default_rng([seed, 1010]),
        phases,
        solver.feasibility_tol,
    )
    if best is None:
        return _report(
            "brute_force",
            False,
            estimate=trace.objective,
            scenario=seed,
            skipped=skipped,
            detail="no feasible grid point",
        )
    return _report(
        "brute_force",
        trace.objective >= validation.brute_force_ratio * best.objective,
        estimate=trace.objective,
        reference=best.objective,
        scenario=seed,
        skipped=skipped,
        detail=(
            f"optimizer {trace.objective:.6g} vs grid best {best.objective:.6g} "
            f"over {feasible} feasible beamformer sets"
        ),
    )


def run_validation(
    config: ExperimentConfig,
    out_dir: Optional[PathLike] = None,
    mutation: Optional[str] = None,
    jobs: int = 1,
    optimizer: bool = False,
) -> ValidationReport:
    """
    Run every check and write ``validation.json`` if ``out_dir`` is given. Sampling
    checks that fail are retried once with more samples.

    :param mutation: ``"lambda"`` inflates the closed-form warden powers by 50%, which
        the detection checks must catch.
    :param jobs: Worker threads for the Monte Carlo chunks and worker processes for the
        optimizer runs.
    :param optimizer: Also run the optimizer convergence and brute-force checks.
    """
    if mutation is not None and mutation not in MUTATIONS:
        raise ConfigurationError(f"unknown mutation {mutation!r}; expected one of {', '.join(MUTATIONS)}")
    system, settings = config.system, config.validation
    lambda_scale = 1.5 if mutation == "lambda" else 1.0
    factor = settings.retry_factor
    large_mc = _mc(settings, 4, settings.large_system_samples, jobs)

    checks: List[Callable[[], CheckReport]] = [
        lambda: _with_retry(
            "dep_closed_form",
            lambda mc: check_dep_closed_form(system, settings, mc, lambda_scale),
            _mc(settings, workers=jobs),
            factor,
        ),
        lambda: _with_retry(
            "empirical_min_dep",
            lambda mc: check_empirical_min_dep(system, settings, mc),
            _mc(settings, 1, workers=jobs),
            factor,
        ),
        lambda: check_min_dep_grid(settings),
        lambda: _with_retry(
            "exponentiality",
            lambda mc: check_exponentiality(system, settings, mc),
            _mc(settings, 2, workers=jobs),
            factor,
        ),
        lambda: _with_retry("large_system", lambda mc: check_large_system(system, settings, mc), large_mc, factor),
        lambda: check_asymptotic_monotonicity(settings),
        lambda: check_covert_ratio(config.solver.bisection_tol),
        lambda: _with_retry(
            "gamma_rate", lambda mc: check_gamma_rate(system, settings, mc), _mc(settings, 3, workers=jobs), factor
        ),
        lambda: check_robust_bound(system, settings),
        lambda: check_sdp_sanity(settings),
        lambda: check_surrogate_soundness(system, settings),
    ]
    pairings = PAIRINGS
    if optimizer:
        checks += [
            lambda: check_convergence(config, jobs=jobs),
            lambda: check_brute_force(brute_force_system(system), settings, config.solver),
        ]
        pairings += OPTIMIZER_PAIRINGS

    reports = []
    for run in checks:
        report = run()
        _logger.info("Check %s: %s", report["name"], "passed" if report["passed"] else "FAILED")
        reports.append(report)
    validation: ValidationReport = {
        "config_hash": config.config_hash,
        "passed": all(report["passed"] for report in reports),
        "mutation": mutation or "",
        "checks": reports,
        "pairings": [list(pairing) for pairing in pairings],
    }
    if out_dir is not None:
        out = prepare_output(out_dir, config)
        write_json(out / "validation.json", validation)
    return validation


__all__ = [
    "AGGREGATED",
    "ASSUMPTIONS",
    "GRID_PHASES",
    "GridPoint",
    "MUTATIONS",
    "OPTIMIZER_PAIRINGS",
    "PAIRINGS",
    "PointResult",
    "RECORD_FIELDS",
    "SWEEP_PAIRINGS",
    "TRACE_FIELDS",
    "TREND_DIRECTIONS",
    "aggregate",
    "best_grid_point",
    "brute_force_search",
    "brute_force_system",
    "channel_for",
    "check_brute_force",
    "check_convergence",
    "check_star_advantage",
    "check_trends",
    "family_sigmas",
    "layout_for",
    "optimize_point",
    "optimize_seeds",
    "random_beams",
    "run_baseline",
    "run_optimize",
    "run_sweep",
    "run_validation",
    "shrink_covert_beam",
]
