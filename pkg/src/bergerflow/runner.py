"""Run, sweep, and oracle-check orchestration with file artifacts.

A run writes three artifacts into its output directory:

  series.csv   one row per snapshot (fixed, documented column set)
  frames.csv   blow-up profiles resampled to the uniform sigma grid at the
               configured tau values
  summary.json machine-readable verdicts, validated against the shipped
               JSON schema

Outputs carry no timestamps or host details, so identical config plus
identical build gives byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import diagnostics as diag
from .config import RunConfig, format_config, parse_config
from .flow import (FlowState, SolverConfig, Trajectory, advance_to, evolve,
                   rhs, select_dt)
from .geometry import PeriodicGrid, Profile, profile_extrema, sectional_curvatures
from .initial_data import (ConstructionError, NeckBumpParams, neck_bump,
                           noise_perturb, perturb, product_data,
                           validate_assumptions)
from .oracle import curvature_gap, riemann_oracle

SERIES_COLUMNS = (
    "t", "mcheck", "g_max", "ecc_max", "ecc_neck", "recip_gap_max", "q_max", "f_grad_max",
    "big_f_min", "omega_components", "diameter", "crit_count", "si_k01", "si_k02", "si_k03",
    "si_k12", "si_k23", "si_k31", "si_vert_gap", "si_mixed_gap",
    "type_one_ratio", "tau", "norm_X", "norm_X_sigma",
)

FRAME_COLUMNS = ("frame_index", "tau_requested", "tau", "t", "t_hat", "sigma",
                 "u", "v", "x", "y", "nonlocal_I", "X")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_RESOLUTION = 4

_ASSUMPTION_CONDITIONS = {
    "assumption1": ("ordering", "scalar"),
    "assumption2": ("ordering", "scalar", "epsilon", "gradient"),
    "assumption3": ("ordering", "scalar", "epsilon", "gradient", "reflection"),
}
_CONDITION_TEXT = {
    "ordering": "ordering f <= g <= h fails",
    "scalar": "(min R)(max g^2) <= -3",
    "epsilon": "2(1-eps)^5 + 4(1-eps)^4 <= 4/3",
    "gradient": "max|f_s| > 1",
    "reflection": "profile is not reflection symmetric",
}


def _fmt(x) -> str:
    """17-significant-digit decimal, round-trip exact for doubles."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def build_initial(cfg: RunConfig) -> FlowState:
    """Construct the configured initial state (may raise ConstructionError)."""
    grid = PeriodicGrid.of_size(cfg.n_points)
    if cfg.kind == "neck_bump":
        params = NeckBumpParams(alpha=cfg.alpha, beta=cfg.beta, eta=cfg.eta,
                                lambda_big=cfg.lambda_big,
                                delta_smooth=cfg.delta_smooth)
        profile = neck_bump(params, grid)
    else:
        profile = product_data(cfg.f0, cfg.g0, cfg.h0, cfg.lambda_big, grid)
    if cfg.perturb:
        profile = perturb(profile, cfg.perturb)
    if cfg.noise_amp > 0.0:
        profile = noise_perturb(profile, cfg.noise_amp,
                                0 if cfg.seed is None else cfg.seed)
    return FlowState(profile=profile, t=0.0, step_index=0)


def solver_config(cfg: RunConfig) -> SolverConfig:
    return SolverConfig(cfl_safety=cfg.cfl_safety, min_f_stop=cfg.min_f_stop,
                        curvature_cap=cfg.curvature_cap, max_steps=cfg.max_steps,
                        snapshot_stride=cfg.snapshot_stride)


def omega_delta(cfg: RunConfig, trajectory: Trajectory) -> float:
    """Neck-region threshold: configured value, else tied to the neck scale.

    Auto policy: min(0.1, half the minimum warp at the first snapshot where
    it has dropped below 10% of its initial value); plain 0.1 if the run
    never gets that deep.
    """
    if cfg.delta is not None:
        return cfg.delta
    mchecks = [profile_extrema(s.profile)[1] for s in trajectory.snapshots]
    m0 = mchecks[0]
    for m in mchecks:
        if m < 0.1 * m0:
            return min(0.1, 0.5 * m)
    return 0.1


def _neck_index(profile: Profile) -> int:
    return int(np.argmin(profile.f))


def compute_series(cfg: RunConfig, trajectory: Trajectory, delta: float):
    """Per-snapshot monitor rows (list of dicts keyed by SERIES_COLUMNS)."""
    t_hat = trajectory.t_hat
    rows = []
    for state in trajectory.snapshots:
        have_that = math.isfinite(t_hat) and t_hat > state.t
        snap = diag.monitor_snapshot(state, t_hat if have_that else None, delta)
        _, mcheck, g_max, _ = profile_extrema(state.profile)
        row = {"mcheck": mcheck, "g_max": g_max}
        row.update(snap.scalars())
        if have_that:
            gap = t_hat - state.t
            row["type_one_ratio"] = mcheck / math.sqrt(gap)
            row["tau"] = -math.log(gap)
            frame = diag.blowup_frame(state, t_hat, _neck_index(state.profile))
            sig, x_cut = diag.cutoff_X(frame, cfg.eps_cutoff, cfg.sigma_max,
                                       cfg.sigma_points)
            row["norm_X"] = diag.gaussian_norm(sig, x_cut)
            row["norm_X_sigma"] = diag.hermite_project(sig, x_cut, 0).norm_G_deriv
        else:
            row.update({"type_one_ratio": float("nan"), "tau": float("nan"),
                        "norm_X": float("nan"), "norm_X_sigma": float("nan")})
        rows.append(row)
    return rows


def _final_decade(trajectory: Trajectory):
    """Snapshot indices in the final resolved decade of t_hat - t."""
    t_hat = trajectory.t_hat
    if not math.isfinite(t_hat):
        return []
    gap_end = t_hat - trajectory.snapshots[-1].t
    return [i for i, s in enumerate(trajectory.snapshots)
            if gap_end <= t_hat - s.t <= 10.0 * gap_end]


def _basin_closure(values: np.ndarray, components) -> np.ndarray:
    """Mask of the watershed basins of the pinching components.

    Each component is expanded outward along the extrapolated profile until
    it has clearly crossed a crest: the value drops below 98% of the running
    maximum, or stops improving for 8 consecutive points (a flat top).  The
    excluded region then covers the whole collapsing collar, so surviving
    bumps anchor the outside minimum.
    """
    n = len(values)
    mask = np.zeros(n, dtype=bool)
    for comp in components:
        mask[comp] = True
        for direction, edge in ((1, comp[-1]), (-1, comp[0])):
            best = values[edge]
            stalled = 0
            i = edge
            for _ in range(n):
                i = (i + direction) % n
                if mask[i]:
                    break
                value = values[i]
                if value > best:
                    best = value
                    stalled = 0
                elif value < 0.98 * best:
                    break
                else:
                    stalled += 1
                    if stalled >= 8:
                        break
                mask[i] = True
    return mask


def classify_locality(cfg: RunConfig, trajectory: Trajectory, delta: float):
    """Local vs global singularity by extrapolating f away from the pinch.

    The pinching region is the watershed closure of the components of the
    neck-like set that actually reach below the threshold delta (the collar
    f <= delta plus its rising walls up to the surrounding crests, mirroring
    the cap-based surviving-radius argument for the bump family).  Local iff
    the extrapolated minimum of f at t_hat over the complement exceeds 5
    times the neck resolution floor.  Returns (label, outside minimum).
    """
    t_hat = trajectory.t_hat
    if not math.isfinite(t_hat):
        return "none", float("nan")
    final = trajectory.snapshots[-1]
    p = final.profile
    df, _, _, _ = rhs(final)
    f2_rate = 2.0 * p.f * df
    extrap = np.sqrt(np.clip(p.f ** 2 + (t_hat - final.t) * f2_rate, 0.0, None))
    pinching = [comp for comp in diag.neck_region(final, delta)
                if np.min(p.f[comp]) < delta]
    floor = cfg.min_f_stop * p.rho[_neck_index(p)] * p.grid.dxi
    if not pinching:
        return ("global", float(np.min(extrap))) if np.min(extrap) <= 5.0 * floor \
            else ("none", float(np.min(extrap)))
    outside = ~_basin_closure(extrap, pinching)
    if not outside.any():
        return "global", 0.0
    outside_min = float(np.min(extrap[outside]))
    label = "local" if outside_min > 5.0 * floor else "global"
    return label, outside_min


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    return value


def build_summary(cfg: RunConfig, trajectory: Trajectory, series, delta: float,
                  report) -> dict:
    decade = _final_decade(trajectory)
    ratios_all = [series[i]["type_one_ratio"] for i in range(len(series))
                  if math.isfinite(series[i]["type_one_ratio"])]
    ratios_win = [series[i]["type_one_ratio"] for i in decade
                  if math.isfinite(series[i]["type_one_ratio"])]
    decay = None
    taus = [series[i]["tau"] for i in decade]
    norms = [series[i]["norm_X"] for i in decade]
    pairs = [(t, n) for t, n in zip(taus, norms)
             if math.isfinite(t) and math.isfinite(n) and n > 0.0]
    if len(pairs) >= 6:
        fit = diag.fit_decay([p[0] for p in pairs], [p[1] for p in pairs])
        decay = {"slope": fit.slope, "stderr": fit.stderr, "n_points": len(pairs)}
    locality, outside_min = classify_locality(cfg, trajectory, delta)
    big_f = [row["big_f_min"] for row in series if math.isfinite(row["big_f_min"])]
    sup_keys = ("ecc_max", "recip_gap_max", "q_max", "f_grad_max", "diameter",
                "si_k01", "si_k02", "si_k03", "si_k12", "si_k23", "si_k31",
                "si_vert_gap", "si_mixed_gap")
    suprema = {}
    for key in sup_keys:
        vals = [row[key] for row in series if math.isfinite(row[key])]
        suprema[key] = max(vals) if vals else float("nan")
    # digest the run-relevant configuration only: where the artifacts land
    # and any sweep axes must not change the bytes a point produces
    canonical = format_config(replace(cfg, out_dir="", sweep=()))
    summary = {
        "schema_version": 1,
        "config_digest": hashlib.sha256(canonical.encode()).hexdigest(),
        "t_hat": trajectory.t_hat,
        "t_hat_stderr": trajectory.t_hat_stderr,
        "fit_slope": trajectory.fit_slope,
        "stop_reason": trajectory.stop_reason.value,
        "steps_total": trajectory.steps_total,
        "n_snapshots": len(trajectory.snapshots),
        "singularity_locality": locality,
        "outside_min_extrapolated": outside_min,
        "type_one_ratio_range": {
            "min": min(ratios_all) if ratios_all else float("nan"),
            "max": max(ratios_all) if ratios_all else float("nan"),
            "decade_min": min(ratios_win) if ratios_win else float("nan"),
            "decade_max": max(ratios_win) if ratios_win else float("nan"),
        },
        "monitor_suprema": suprema,
        "monitors_initial": {
            "ecc_max": series[0]["ecc_max"],
            "diameter": series[0]["diameter"],
            "crit_count": series[0]["crit_count"],
        },
        "monitors_final": {
            "ecc_max": series[-1]["ecc_max"],
            "ecc_neck": series[-1]["ecc_neck"],
            "diameter": series[-1]["diameter"],
            "crit_count": series[-1]["crit_count"],
        },
        "big_f_min_inf": min(big_f) if big_f else float("nan"),
        "decay": decay,
        "omega_delta": delta,
        "eps_cutoff": cfg.eps_cutoff,
        "assumptions": {
            "ordering_ok": report.ordering_ok,
            "scalar_condition_value": report.scalar_condition_value,
            "epsilon_condition_value": report.epsilon_condition_value,
            "grad_ok": report.grad_ok,
            "reflection_ok": report.reflection_ok,
            "eps": report.eps,
            "verdicts": dict(report.verdicts),
        },
    }
    return _jsonable(summary)


def frame_taus(cfg: RunConfig, trajectory: Trajectory):
    if cfg.frame_taus:
        return list(cfg.frame_taus)
    t_hat = trajectory.t_hat
    if not math.isfinite(t_hat):
        return []
    taus = [-math.log(t_hat - s.t) for s in trajectory.snapshots]
    lo, hi = taus[0], taus[-1]
    return [lo + q * (hi - lo) for q in (0.25, 0.5, 0.75, 1.0)]


def compute_frames(cfg: RunConfig, trajectory: Trajectory):
    """Blow-up frames at the configured tau values, resampled in sigma."""
    requested = frame_taus(cfg, trajectory)
    if not requested:
        return []
    t_hat = trajectory.t_hat
    taus = np.array([-math.log(t_hat - s.t) for s in trajectory.snapshots])
    out = []
    for index, tau_req in enumerate(requested):
        best = int(np.argmin(np.abs(taus - tau_req)))
        state = trajectory.snapshots[best]
        frame = diag.blowup_frame(state, t_hat, _neck_index(state.profile))
        sig, fields = diag.resample_frame(frame, cfg.sigma_max, cfg.sigma_points)
        scale = np.exp(-0.5 * cfg.eps_cutoff * frame.tau)
        cut = diag.bump_beta(scale * sig) * fields["x"]
        out.append({"frame_index": index, "tau_requested": tau_req,
                    "tau": frame.tau, "t": state.t, "t_hat": t_hat,
                    "sigma": sig, "fields": fields, "X": cut})
    return out


def write_series(path: str, series) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(SERIES_COLUMNS) + "\n")
        for row in series:
            handle.write(",".join(_fmt(row[c]) for c in SERIES_COLUMNS) + "\n")


def write_frames(path: str, frames) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(FRAME_COLUMNS) + "\n")
        for fr in frames:
            for j in range(len(fr["sigma"])):
                cells = (fr["frame_index"], fr["tau_requested"], fr["tau"],
                         fr["t"], fr["t_hat"], fr["sigma"][j],
                         fr["fields"]["u"][j], fr["fields"]["v"][j],
                         fr["fields"]["x"][j], fr["fields"]["y"][j],
                         fr["fields"]["nonlocal_I"][j], fr["X"][j])
                handle.write(",".join(_fmt(c) for c in cells) + "\n")


def summary_schema() -> dict:
    path = os.path.join(os.path.dirname(__file__), "data", "summary.schema.json")
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def write_summary(path: str, summary: dict) -> None:
    import jsonschema

    jsonschema.validate(summary, summary_schema())
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True, allow_nan=False)
        handle.write("\n")


def run_config(cfg: RunConfig, out_dir: str | None = None):
    """Full pipeline: build, validate, evolve, diagnose, persist.

    Returns (exit_code, message, summary_dict_or_None).
    """
    out_dir = out_dir or cfg.out_dir
    try:
        initial = build_initial(cfg)
    except ConstructionError as err:
        return EXIT_RESOLUTION, f"construction failed: {err}", None
    report = validate_assumptions(initial.profile)
    if cfg.require != "none":
        for condition in _ASSUMPTION_CONDITIONS[cfg.require]:
            if not report.verdicts[condition]:
                return (EXIT_VALIDATION,
                        f"validation failed: {_CONDITION_TEXT[condition]}", None)
    trajectory = evolve(initial, solver_config(cfg), cfg.fit_window)
    delta = omega_delta(cfg, trajectory)
    series = compute_series(cfg, trajectory, delta)
    frames = compute_frames(cfg, trajectory)
    summary = build_summary(cfg, trajectory, series, delta, report)
    os.makedirs(out_dir, exist_ok=True)
    write_series(os.path.join(out_dir, "series.csv"), series)
    write_frames(os.path.join(out_dir, "frames.csv"), frames)
    write_summary(os.path.join(out_dir, "summary.json"), summary)
    if not math.isfinite(trajectory.t_hat) and trajectory.stop_reason.value != "steady":
        return (EXIT_NUMERICAL,
                f"halted ({trajectory.stop_reason.value}) with no singularity indication",
                summary)
    return EXIT_OK, f"stop={trajectory.stop_reason.value} T_hat={trajectory.t_hat}", summary


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def sweep_points(cfg: RunConfig):
    """Expand sweep axes into (name, point_config) pairs, file order."""
    if not cfg.sweep:
        return [("point_0000", cfg)]
    names = [axis for axis, _ in cfg.sweep]
    grids = [values for _, values in cfg.sweep]
    points = []
    for index, combo in enumerate(itertools.product(*grids)):
        override = dict(zip(names, combo))
        points.append((f"point_{index:04d}", replace(cfg, sweep=(), **override)))
    return points


def _sweep_worker(args):
    cfg_text, out_dir = args
    cfg = parse_config(cfg_text)
    code, message, _ = run_config(cfg, out_dir)
    return code, message


def run_sweep(cfg: RunConfig, workers: int, out_dir: str | None = None):
    """Run every sweep point in an isolated directory; write manifest.csv.

    Completed points (an existing summary.json) are not recomputed, so an
    interrupted sweep resumes idempotently.
    """
    out_dir = out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    points = sweep_points(cfg)
    axes = [axis for axis, _ in cfg.sweep]
    jobs = []
    results = {}
    for name, point_cfg in points:
        point_dir = os.path.join(out_dir, name)
        if os.path.exists(os.path.join(point_dir, "summary.json")):
            results[name] = ("cached", None)
        else:
            jobs.append((name, format_config(point_cfg), point_dir))
    if jobs:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for (name, _, _), outcome in zip(
                        jobs, pool.map(_sweep_worker,
                                       [(text, d) for _, text, d in jobs])):
                    results[name] = outcome
        else:
            for name, text, point_dir in jobs:
                results[name] = _sweep_worker((text, point_dir))

    rows = []
    any_ok = False
    for name, point_cfg in points:
        point_dir = os.path.join(out_dir, name)
        summary_path = os.path.join(point_dir, "summary.json")
        row = {"point": name, "dir": name}
        for axis in axes:
            row[axis] = getattr(point_cfg, axis)
        if os.path.exists(summary_path):
            with open(summary_path, "r", encoding="utf-8") as handle:
                summary = json.load(handle)
            # derive the status from the summary so cached points report the
            # same value the original run did
            singular = summary["t_hat"] is not None
            code = EXIT_OK if singular or summary["stop_reason"] == "steady" \
                else EXIT_NUMERICAL
            row.update({
                "exit_status": code,
                "stop_reason": summary["stop_reason"],
                "t_hat": summary["t_hat"] if summary["t_hat"] is not None else float("nan"),
                "singularity_locality": summary["singularity_locality"],
            })
            if code == 0:
                any_ok = True
        else:
            code = results.get(name, (EXIT_NUMERICAL, None))[0]
            row.update({"exit_status": code, "stop_reason": "error",
                        "t_hat": float("nan"), "singularity_locality": "none"})
        rows.append(row)

    columns = ["point", "dir"] + axes + ["exit_status", "stop_reason", "t_hat",
                                         "singularity_locality"]
    with open(os.path.join(out_dir, "manifest.csv"), "w", encoding="utf-8",
              newline="\n") as handle:
        handle.write(",".join(columns) + "\n")
        for row in rows:
            handle.write(",".join(
                row[c] if isinstance(row[c], str) else _fmt(row[c])
                for c in columns) + "\n")
    return (EXIT_OK if any_ok else EXIT_NUMERICAL), rows


# ---------------------------------------------------------------------------
# oracle check
# ---------------------------------------------------------------------------

def _oracle_gap(cfg: RunConfig, n_points: int) -> dict:
    profile = build_initial(replace(cfg, n_points=n_points)).profile
    closed = sectional_curvatures(profile)
    if os.environ.get("BERGER_FLOW_TEST_CORRUPT_KAPPA"):
        # negative-control hook: perturb one closed-form plane
        from .geometry import CurvatureField
        closed = CurvatureField(
            kappa12=closed.kappa12 * (1.0 + 1e-3), kappa23=closed.kappa23,
            kappa31=closed.kappa31, kappa01=closed.kappa01,
            kappa02=closed.kappa02, kappa03=closed.kappa03,
            hat12=closed.hat12, hat23=closed.hat23, hat31=closed.hat31,
            scalar_R=closed.scalar_R)
    gaps = curvature_gap(closed, riemann_oracle(profile))
    gaps["kappa_scale"] = closed.sectional_max_abs()
    return gaps


def _residual_study(cfg: RunConfig, n_points: int, t_star: float,
                    spacing: float) -> dict:
    """Residual max norms at matched physical times t_star -/+ spacing.

    Matching the evaluation time across resolutions makes the centered time
    derivative and the stencils contract together under grid doubling with
    the snapshot spacing quartered.
    """
    initial = build_initial(replace(cfg, n_points=n_points))
    solver = solver_config(cfg)
    before = advance_to(initial, t_star - spacing, solver)
    middle = advance_to(before, t_star, solver)
    after = advance_to(middle, t_star + spacing, solver)
    out = {}
    for quantity in diag.RESIDUAL_QUANTITIES:
        try:
            out[quantity] = diag.evolution_residual((before, middle, after),
                                                    quantity).max_norm
        except diag.AccuracyError:
            out[quantity] = float("nan")
    return out


def oracle_check(cfg: RunConfig, order_floor: float = 3.6):
    """Closed-form vs oracle curvature gaps plus the residual suite.

    Convergence orders are measured on grid doublings; the check passes when
    every measured order meets order_floor or the fine-grid value sits at the
    roundoff floor.  Returns (exit_code, report_text).
    """
    lines = []
    try:
        sizes = [cfg.n_points, 2 * cfg.n_points, 4 * cfg.n_points]
        gaps = [_oracle_gap(cfg, n) for n in sizes]
    except ConstructionError as err:
        return EXIT_RESOLUTION, f"under-resolved profile: {err}"
    ok = True
    lines.append("curvature oracle gaps (max over the six planes):")
    for n, gap in zip(sizes, gaps):
        lines.append(f"  n={n:6d}  max_gap={gap['max']:.3e}")
    floor = 1e-9 * (1.0 + gaps[-1]["kappa_scale"])
    coarse, fine = gaps[-2]["max"], gaps[-1]["max"]
    if fine <= floor:
        lines.append(f"  fine-grid gap at roundoff floor ({fine:.2e} <= {floor:.2e}): pass")
    else:
        order = math.log2(coarse / fine) if fine > 0 else float("inf")
        lines.append(f"  measured order {order:.2f} (floor {order_floor})")
        if order < order_floor:
            ok = False

    # the residual equations involve up to seventh derivatives of the warps,
    # so their asymptotic regime sits a doubling deeper than the curvature
    # comparison; evaluation times are matched across the two grids
    coarse_n = 2 * cfg.n_points
    dt0 = select_dt(build_initial(replace(cfg, n_points=coarse_n)),
                    solver_config(cfg))
    t_star, spacing = 128.0 * dt0, 16.0 * dt0
    res_coarse = _residual_study(cfg, coarse_n, t_star, spacing)
    res_fine = _residual_study(cfg, 2 * coarse_n, t_star, 0.25 * spacing)
    res_floor = 1e-9
    lines.append("evolution residual max norms (coarse -> fine):")
    for quantity in diag.RESIDUAL_QUANTITIES:
        a, b = res_coarse[quantity], res_fine[quantity]
        if math.isnan(a) or math.isnan(b):
            lines.append(f"  {quantity:9s} skipped (accuracy preconditions)")
            continue
        if b <= res_floor:
            lines.append(f"  {quantity:9s} {a:.3e} -> {b:.3e}  (floor: pass)")
            continue
        order = math.log2(a / b) if b > 0 else float("inf")
        status = "pass" if order >= order_floor else "FAIL"
        lines.append(f"  {quantity:9s} {a:.3e} -> {b:.3e}  order {order:.2f} {status}")
        if order < order_floor:
            ok = False
    lines.append("oracle check: " + ("pass" if ok else "FAIL"))
    return (EXIT_OK if ok else EXIT_RESOLUTION), "\n".join(lines)
