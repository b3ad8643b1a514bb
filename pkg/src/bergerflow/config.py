"""Flat key-value run configuration with dotted section keys.

The format is one `section.key = value` pair per line, `#` comments, blank
lines ignored.  It round-trips losslessly: floats are written with 17
significant digits and parse back to the identical double.  Sweep axes are
`sweep.<field> = v1, v2, ...` lists over the initial-data fields.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

_FLOAT_KEYS = {
    "initial_data.alpha": "alpha",
    "initial_data.beta": "beta",
    "initial_data.eta": "eta",
    "initial_data.lambda_big": "lambda_big",
    "initial_data.delta_smooth": "delta_smooth",
    "initial_data.f0": "f0",
    "initial_data.g0": "g0",
    "initial_data.h0": "h0",
    "initial_data.noise_amp": "noise_amp",
    "solver.cfl_safety": "cfl_safety",
    "solver.min_f_stop": "min_f_stop",
    "solver.curvature_cap": "curvature_cap",
    "diagnostics.eps_cutoff": "eps_cutoff",
    "diagnostics.sigma_max": "sigma_max",
    "diagnostics.fit_window": "fit_window",
}
_INT_KEYS = {
    "grid.n_points": "n_points",
    "solver.max_steps": "max_steps",
    "solver.snapshot_stride": "snapshot_stride",
    "diagnostics.hermite_kmax": "hermite_kmax",
    "diagnostics.sigma_points": "sigma_points",
}
_SWEEPABLE = ("alpha", "beta", "eta", "lambda_big", "delta_smooth", "f0", "g0", "h0")


class ConfigError(ValueError):
    """Malformed configuration; message carries the offending line number."""

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if line_no else message)


@dataclass(frozen=True)
class RunConfig:
    """Everything one run needs; defaults give a resolvable neck-bump run."""

    kind: str = "neck_bump"            # neck_bump | product
    alpha: float = 0.01
    beta: float = 0.05
    eta: float = 0.9
    lambda_big: float = 4.0
    delta_smooth: float = 0.2
    f0: float = 1.0
    g0: float = 1.0
    h0: float = 1.0
    perturb: tuple = ()                # ((wavenumber, amplitude, target), ...)
    noise_amp: float = 0.0
    seed: int | None = None
    require: str = "assumption1"       # none | assumption1 | assumption2 | assumption3
    n_points: int = 512
    cfl_safety: float = 0.5
    min_f_stop: float = 2.0
    curvature_cap: float = 1e9
    max_steps: int = 500_000
    snapshot_stride: int = 20
    delta: float | None = None         # None = auto neck-scale policy
    eps_cutoff: float = 0.5
    hermite_kmax: int = 8
    sigma_max: float = 12.0
    sigma_points: int = 4097
    fit_window: float = 0.25
    frame_taus: tuple = ()             # empty = auto quartiles
    out_dir: str = "runs/out"
    sweep: tuple = ()                  # ((field, (v1, v2, ...)), ...)


def _format_float(x: float) -> str:
    return f"{x:.17g}"


def _parse_float(raw: str, line_no: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(line_no, f"expected a number, got {raw!r}") from None


def _parse_int(raw: str, line_no: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(line_no, f"expected an integer, got {raw!r}") from None


def _parse_perturb(raw: str, line_no: int) -> tuple:
    if raw.strip() in ("", "none"):
        return ()
    modes = []
    for part in raw.split(";"):
        bits = part.strip().split(":")
        if len(bits) != 3 or bits[2].strip() not in ("f", "g", "h"):
            raise ConfigError(line_no, f"perturb entry must be k:amp:target, got {part.strip()!r}")
        modes.append((_parse_int(bits[0].strip(), line_no),
                      _parse_float(bits[1].strip(), line_no), bits[2].strip()))
    return tuple(modes)


def parse_config(text: str) -> RunConfig:
    """Parse config text; raises ConfigError with the offending line number."""
    cfg = RunConfig()
    sweep = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line_no, "expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in _FLOAT_KEYS:
            cfg = replace(cfg, **{_FLOAT_KEYS[key]: _parse_float(raw, line_no)})
        elif key in _INT_KEYS:
            cfg = replace(cfg, **{_INT_KEYS[key]: _parse_int(raw, line_no)})
        elif key == "initial_data.kind":
            if raw not in ("neck_bump", "product"):
                raise ConfigError(line_no, f"kind must be neck_bump or product, got {raw!r}")
            cfg = replace(cfg, kind=raw)
        elif key == "initial_data.perturb":
            cfg = replace(cfg, perturb=_parse_perturb(raw, line_no))
        elif key == "initial_data.require":
            if raw not in ("none", "assumption1", "assumption2", "assumption3"):
                raise ConfigError(line_no, f"unknown validation level {raw!r}")
            cfg = replace(cfg, require=raw)
        elif key == "seed":
            cfg = replace(cfg, seed=None if raw == "none" else _parse_int(raw, line_no))
        elif key == "diagnostics.delta":
            cfg = replace(cfg, delta=None if raw == "auto" else _parse_float(raw, line_no))
        elif key == "diagnostics.frame_taus":
            if raw == "auto":
                cfg = replace(cfg, frame_taus=())
            else:
                cfg = replace(cfg, frame_taus=tuple(
                    _parse_float(p.strip(), line_no) for p in raw.split(",")))
        elif key == "output.dir":
            cfg = replace(cfg, out_dir=raw)
        elif key.startswith("sweep."):
            name = key[len("sweep."):]
            if name not in _SWEEPABLE:
                raise ConfigError(line_no, f"cannot sweep over {name!r}")
            values = tuple(_parse_float(p.strip(), line_no) for p in raw.split(","))
            if not values:
                raise ConfigError(line_no, "sweep list is empty")
            sweep.append((name, values))
        else:
            raise ConfigError(line_no, f"unknown key {key!r}")
    return replace(cfg, sweep=tuple(sweep))


def format_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(format_config(c)) == c."""
    lines = [f"initial_data.kind = {cfg.kind}"]
    for key, attr in _FLOAT_KEYS.items():
        lines.append(f"{key} = {_format_float(getattr(cfg, attr))}")
    if cfg.perturb:
        body = "; ".join(f"{k}:{_format_float(a)}:{t}" for k, a, t in cfg.perturb)
    else:
        body = "none"
    lines.append(f"initial_data.perturb = {body}")
    lines.append(f"initial_data.require = {cfg.require}")
    lines.append(f"seed = {'none' if cfg.seed is None else cfg.seed}")
    for key, attr in _INT_KEYS.items():
        lines.append(f"{key} = {getattr(cfg, attr)}")
    lines.append("diagnostics.delta = "
                 + ("auto" if cfg.delta is None else _format_float(cfg.delta)))
    lines.append("diagnostics.frame_taus = "
                 + ("auto" if not cfg.frame_taus
                    else ", ".join(_format_float(v) for v in cfg.frame_taus)))
    lines.append(f"output.dir = {cfg.out_dir}")
    for name, values in cfg.sweep:
        lines.append(f"sweep.{name} = " + ", ".join(_format_float(v) for v in values))
    return "\n".join(lines) + "\n"


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())
