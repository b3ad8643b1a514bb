"""Render run artifacts into summary tables, plot-ready CSV, and figures.

Reads series.csv / frames.csv / summary.json from a run directory and writes
report.md, mcheck_fit.csv, and PNG figures alongside them.
"""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _read_csv(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines:
        return {}
    header = lines[0].split(",")
    rows = np.array([[float(cell) for cell in line.split(",")] for line in lines[1:]])
    if rows.size == 0:
        return {name: np.array([]) for name in header}
    return {name: rows[:, j] for j, name in enumerate(header)}


def _finite(x, y):
    mask = np.isfinite(x) & np.isfinite(y)
    return x[mask], y[mask]


def _fig_radius(series, summary, out_dir):
    t = series["t"]
    m2 = series["mcheck"] ** 2
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, m2, lw=1.2, label="min warp squared")
    t_hat, slope = summary.get("t_hat"), summary.get("fit_slope")
    if t_hat is not None and slope is not None:
        ax.plot(t, slope * (t_hat - t), "--", lw=1.0,
                label=f"fit: {slope:.3f} (T^ - t), T^ = {t_hat:.6g}")
    ax.set_xlabel("t")
    ax.set_ylabel("min(f, g, h)^2")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "radius.png"), dpi=130)
    plt.close(fig)


def _fig_monitors(series, out_dir):
    t = series["t"]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    panels = (("ecc_max", axes[0, 0]), ("q_max", axes[0, 1]),
              ("f_grad_max", axes[1, 0]), ("diameter", axes[1, 1]))
    for name, ax in panels:
        x, y = _finite(t, series[name])
        ax.plot(x, y, lw=1.0)
        ax.set_title(name)
    for ax in axes[1]:
        ax.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "monitors.png"), dpi=130)
    plt.close(fig)


def _fig_cylinder(frames, out_dir):
    if not frames or len(frames.get("sigma", [])) == 0:
        return
    last = frames["frame_index"] == np.max(frames["frame_index"])
    sigma = frames["sigma"][last]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sigma, frames["u"][last], lw=1.2, label="u")
    ax.plot(sigma, frames["v"][last], lw=1.2, label="v")
    ax.axhline(1.0, color="k", lw=0.6, ls=":")
    ax.set_xlim(-6, 6)
    ax.set_xlabel("sigma")
    ax.set_ylabel("dilated warp")
    ax.set_title(f"last frame, tau = {frames['tau'][last][0]:.3f}")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "cylinder.png"), dpi=130)
    plt.close(fig)


def _fig_decay(series, summary, out_dir):
    tau, norm = _finite(series["tau"], series["norm_X"])
    keep = norm > 0
    tau, norm = tau[keep], norm[keep]
    if len(tau) < 2:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(tau, norm, ".", ms=3, label="cutoff eccentricity norm")
    decay = summary.get("decay")
    if decay:
        t0 = tau[-min(len(tau), decay["n_points"])]
        ref = np.interp(t0, tau, norm)
        ax.semilogy(tau, ref * np.exp(decay["slope"] * (tau - t0)), "--",
                    lw=1.0, label=f"slope {decay['slope']:.3f}")
    ax.set_xlabel("tau")
    ax.set_ylabel("Gaussian norm of X")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "decay.png"), dpi=130)
    plt.close(fig)


def _table(rows):
    out = ["| quantity | value |", "| --- | --- |"]
    for key, value in rows:
        out.append(f"| {key} | {value} |")
    return "\n".join(out)


def render_report(out_dir: str) -> str:
    """Write report.md, mcheck_fit.csv, and figures; returns the report path."""
    series = _read_csv(os.path.join(out_dir, "series.csv"))
    with open(os.path.join(out_dir, "summary.json"), "r", encoding="utf-8") as handle:
        summary = json.load(handle)
    frames_path = os.path.join(out_dir, "frames.csv")
    frames = _read_csv(frames_path) if os.path.exists(frames_path) else {}

    t_hat = summary.get("t_hat")
    fit_rows = []
    for j in range(len(series["t"])):
        t = series["t"][j]
        model = (summary["fit_slope"] * (t_hat - t)
                 if t_hat is not None and summary.get("fit_slope") else float("nan"))
        fit_rows.append((t, series["mcheck"][j] ** 2, model))
    with open(os.path.join(out_dir, "mcheck_fit.csv"), "w", encoding="utf-8",
              newline="\n") as handle:
        handle.write("t,mcheck_sq,fit\n")
        for t, m2, model in fit_rows:
            handle.write(f"{t:.17g},{m2:.17g},{model:.17g}\n")

    _fig_radius(series, summary, out_dir)
    _fig_monitors(series, out_dir)
    _fig_cylinder(frames, out_dir)
    _fig_decay(series, summary, out_dir)

    ratio = summary["type_one_ratio_range"]
    body = [
        "# Run report",
        "",
        "## Outcome",
        "",
        _table([
            ("stop reason", summary["stop_reason"]),
            ("singular time T^", summary["t_hat"]),
            ("T^ stderr", summary["t_hat_stderr"]),
            ("fit slope of min-warp^2", summary["fit_slope"]),
            ("locality", summary["singularity_locality"]),
            ("steps", summary["steps_total"]),
            ("snapshots", summary["n_snapshots"]),
        ]),
        "",
        "## Type-I window",
        "",
        _table([
            ("ratio min (all)", ratio["min"]),
            ("ratio max (all)", ratio["max"]),
            ("ratio min (final decade)", ratio["decade_min"]),
            ("ratio max (final decade)", ratio["decade_max"]),
        ]),
        "",
        "## Monitor suprema",
        "",
        _table(sorted(summary["monitor_suprema"].items())),
        "",
        "## Assumption checks",
        "",
        _table(sorted((k, v) for k, v in summary["assumptions"].items()
                      if k != "verdicts")),
        "",
        _table(sorted(summary["assumptions"]["verdicts"].items())),
        "",
        "## Decay",
        "",
        _table([("decay", summary["decay"])]),
        "",
        "Figures: radius.png, monitors.png, plus cylinder.png and decay.png",
        "when frames and a positive cutoff norm exist; plot-ready data:",
        "mcheck_fit.csv, series.csv, frames.csv.",
        "",
    ]
    report_path = os.path.join(out_dir, "report.md")
    with open(report_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(body))
    return report_path
