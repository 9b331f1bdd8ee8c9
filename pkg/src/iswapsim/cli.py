"""Command-line front end: run named sweeps, validate configs, render SVG.

Config files are line-oriented ``key = value`` under ``[section]`` headers
(sections: system, noise, integrator, sweep, output).  Keys carry their unit
in the suffix (MHz, GHz, us, ps, kHz); internally everything is angular
frequency in rad/s and seconds.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._svg import render_heatmap, render_line
from .dynamics import IntegratorConfig, NoiseAveragingConfig
from .errors import NumericalFailureError, ParseError, SimulationError, ValidationError
from .experiments import (
    _EXPERIMENT_AXES,
    EXPERIMENT_IDS,
    ResultGrid,
    SweepSpec,
    make_sweep_spec,
    run_sweep,
)
from .model import TWO_PI, ExchangeVoltageModel, SystemParams

_AXIS_NAMES = sorted({name for axes in _EXPERIMENT_AXES.values() for name, *_ in axes})

# (type, default); type "optfloat"/"optint"/"optstr" admit empty = unset
_SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "system": {
        "e_avg_ghz": ("float", 17.0),
        "delta_ez_ghz": ("float", 0.3),
        "j_max_mhz": ("float", 15.0),
        "t2_echo_us": ("float", 20.0),
        "j0_khz": ("float", 10.0),
        "alpha_per_volt": ("float", 1.0),
    },
    "noise": {
        "method": ("str", "gauss_hermite"),
        "gh_order": ("int", 9),
        "mc_samples": ("int", 2000),
        "grid_points": ("int", 21),
        "seed": ("int", 12345),
        "sigma_delta_mhz": ("optfloat", None),
        "sigma_j_mhz": ("float", 0.0),
    },
    "integrator": {
        "mode": ("str", "auto"),
        "substeps_per_fastest_period": ("int", 40),
        "step_ps": ("optfloat", None),
    },
    "sweep": {
        "experiment": ("optstr", None),
        "scheme": ("optstr", None),
        "preset": ("str", "desk"),
        "n": ("int", 2),
        "omega_mhz": ("optfloat", None),
        "spot_check": ("bool", False),
        **{
            f"{axis}_{suffix}": ("optfloat" if suffix != "points" else "optint", None)
            for axis in _AXIS_NAMES
            for suffix in ("min", "max", "points")
        },
    },
    "output": {
        "path": ("str", "result.csv"),
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration, all sections resolved against the schema."""

    values: dict = field(default_factory=dict)

    def get(self, section: str, key: str):
        return self.values[section][key]

    def with_override(self, section: str, key: str, raw: str) -> "RunConfig":
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ParseError(f"unknown config key {section}.{key}")
        kind, _ = _SCHEMA[section][key]
        new = {s: dict(kv) for s, kv in self.values.items()}
        new[section][key] = _convert(kind, raw, line=None, key=f"{section}.{key}")
        return RunConfig(new)


def default_config() -> RunConfig:
    return RunConfig({s: {k: d for k, (_, d) in kv.items()} for s, kv in _SCHEMA.items()})


def _convert(kind: str, raw: str, line, key):
    raw = raw.strip()
    if kind.startswith("opt") and raw == "":
        return None
    try:
        if kind in ("float", "optfloat"):
            return float(raw)
        if kind in ("int", "optint"):
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        return raw
    except ValueError:
        raise ParseError(f"malformed value for {key}: {raw!r}", line=line) from None


def parse_config(text: str) -> RunConfig:
    """Parse config text; duplicate keys warn and last-one-wins."""
    cfg = default_config()
    values = {s: dict(kv) for s, kv in cfg.values.items()}
    seen: set[tuple[str, str]] = set()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ParseError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in line:
            raise ParseError(f"expected key = value, got {line!r}", line=lineno)
        if section is None:
            raise ParseError("key outside any [section]", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _SCHEMA[section]:
            raise ParseError(f"unknown key {section}.{key}", line=lineno)
        if (section, key) in seen:
            warnings.warn(f"duplicate key {section}.{key} at line {lineno}; last value wins")
        seen.add((section, key))
        kind, _ = _SCHEMA[section][key]
        values[section][key] = _convert(kind, value, lineno, f"{section}.{key}")
    return RunConfig(values)


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for section, keys in _SCHEMA.items():
        lines.append(f"[{section}]")
        for key in keys:
            v = cfg.get(section, key)
            if v is None:
                v = ""
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{key} = {v}")
        lines.append("")
    return "\n".join(lines)


def _system_params(cfg: RunConfig) -> SystemParams:
    e_avg = TWO_PI * 1e9 * cfg.get("system", "e_avg_ghz")
    dez = TWO_PI * 1e9 * cfg.get("system", "delta_ez_ghz")
    model = ExchangeVoltageModel(
        j0=TWO_PI * 1e3 * cfg.get("system", "j0_khz"),
        alpha=cfg.get("system", "alpha_per_volt"),
    )
    return SystemParams(
        bz1=e_avg + dez / 2,
        bz2=e_avg - dez / 2,
        j_max=TWO_PI * 1e6 * cfg.get("system", "j_max_mhz"),
        t2_echo=1e-6 * cfg.get("system", "t2_echo_us"),
        exchange_model=model,
    )


def _experiment_default_sigma(experiment: str) -> float:
    return TWO_PI * 0.1e6 if experiment in ("fig2", "fig6") else 0.0


def sweep_spec_from_config(cfg: RunConfig) -> SweepSpec:
    experiment = cfg.get("sweep", "experiment")
    if not experiment:
        raise ValidationError("no experiment selected (set sweep.experiment)")
    if experiment not in EXPERIMENT_IDS:
        raise ValidationError(
            f"unknown experiment {experiment!r}; known: {', '.join(EXPERIMENT_IDS)}"
        )
    params = _system_params(cfg)
    sd = cfg.get("noise", "sigma_delta_mhz")
    noise = NoiseAveragingConfig(
        method=cfg.get("noise", "method"),
        order=cfg.get("noise", "gh_order"),
        samples=cfg.get("noise", "mc_samples"),
        grid_points=cfg.get("noise", "grid_points"),
        seed=cfg.get("noise", "seed"),
        sigma_delta=TWO_PI * 1e6 * sd if sd is not None else _experiment_default_sigma(experiment),
        sigma_j=TWO_PI * 1e6 * cfg.get("noise", "sigma_j_mhz"),
    )
    mode = cfg.get("integrator", "mode")
    step_ps = cfg.get("integrator", "step_ps")
    integrator = None
    if mode != "auto" or step_ps is not None or (
        cfg.get("integrator", "substeps_per_fastest_period") != 40
    ):
        from .experiments import _DEFAULT_MODE

        integrator = IntegratorConfig(
            mode=_DEFAULT_MODE[experiment] if mode == "auto" else mode,
            step=step_ps * 1e-12 if step_ps is not None else None,
            substeps_per_fastest_period=cfg.get("integrator", "substeps_per_fastest_period"),
        )
    preset = cfg.get("sweep", "preset")
    axes = {}
    for name, lo, hi in _EXPERIMENT_AXES[experiment]:
        amin = cfg.get("sweep", f"{name}_min")
        amax = cfg.get("sweep", f"{name}_max")
        apts = cfg.get("sweep", f"{name}_points")
        if amin is None and amax is None and apts is None:
            continue
        lo = lo if amin is None else amin
        hi = hi if amax is None else amax
        pts = apts if apts is not None else (11 if preset == "desk" else 41)
        axes[name] = np.linspace(lo, hi, pts)
    scheme = cfg.get("sweep", "scheme")
    schemes = None
    if scheme:
        schemes = tuple(s.strip() for s in scheme.split(",") if s.strip())
    omega_mhz = cfg.get("sweep", "omega_mhz")
    return make_sweep_spec(
        experiment,
        preset=preset,
        schemes=schemes,
        axes=axes,
        params=params,
        noise=noise,
        integrator=integrator,
        n=cfg.get("sweep", "n"),
        omega=TWO_PI * 1e6 * omega_mhz if omega_mhz is not None else None,
        spot_check_full=cfg.get("sweep", "spot_check"),
        seed=cfg.get("noise", "seed"),
    )


def _load_config(args) -> RunConfig:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = default_config()
    for setting in getattr(args, "set", None) or []:
        if "=" not in setting:
            raise ParseError(f"--set expects section.key=value, got {setting!r}")
        target, _, value = setting.partition("=")
        if "." not in target:
            raise ParseError(f"--set expects section.key=value, got {setting!r}")
        section, _, key = target.partition(".")
        cfg = cfg.with_override(section.strip(), key.strip(), value)
    if getattr(args, "experiment", None):
        cfg = cfg.with_override("sweep", "experiment", args.experiment)
    if getattr(args, "preset", None):
        cfg = cfg.with_override("sweep", "preset", args.preset)
    if getattr(args, "out", None):
        cfg = cfg.with_override("output", "path", args.out)
    return cfg


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    spec = sweep_spec_from_config(cfg)
    grid = run_sweep(spec, workers=args.workers)
    path = cfg.get("output", "path")
    grid.write_csv(path)
    print(f"wrote {path} ({int(np.prod(spec.shape))} grid points)")
    return 0


def _cmd_validate(args) -> int:
    cfg = _load_config(args)
    spec = sweep_spec_from_config(cfg)
    print(f"experiment: {spec.experiment}")
    print(f"schemes:    {','.join(spec.schemes)}")
    print(f"axes:       " + "; ".join(f"{n}[{len(v)}]" for n, v in spec.axes))
    print(f"integrator: {spec.integrator.mode}")
    print("config OK")
    return 0


def _cmd_render(args) -> int:
    with open(args.csv) as fh:
        grid = ResultGrid.from_csv(fh.read())
    if args.kind == "heatmap":
        svg = render_heatmap(grid, column=args.column)
    else:
        svg = render_line(grid, log_y=args.log_y)
    with open(args.out, "w") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


def _cmd_list(_args) -> int:
    for name in EXPERIMENT_IDS:
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iswapsim",
        description="Simulate robust microwave-driven iSWAP gates and reproduce the study sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a named experiment sweep and write CSV")
    run.add_argument("--experiment", help="experiment id (see list-experiments)")
    run.add_argument("--config", help="config file path")
    run.add_argument("--out", help="output CSV path")
    run.add_argument("--preset", choices=["desk", "full"], help="grid resolution preset")
    run.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                     help="override a config value (repeatable)")
    run.add_argument("--workers", type=int, default=None,
                     help="worker processes (default: ISWAPSIM_WORKERS or 1)")
    run.set_defaults(func=_cmd_run)

    val = sub.add_parser("validate", help="parse and resolve a config without running")
    val.add_argument("--experiment")
    val.add_argument("--config")
    val.add_argument("--preset", choices=["desk", "full"])
    val.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    val.set_defaults(func=_cmd_validate)

    ren = sub.add_parser("render", help="render a result CSV to SVG")
    ren.add_argument("--csv", required=True)
    ren.add_argument("--kind", choices=["line", "heatmap"], required=True)
    ren.add_argument("--out", required=True)
    ren.add_argument("--log-y", action="store_true", help="log-scale y axis (line plots)")
    ren.add_argument("--column", default=None, help="value column for heatmaps")
    ren.set_defaults(func=_cmd_render)

    lst = sub.add_parser("list-experiments", help="print registered experiment ids")
    lst.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (SimulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
