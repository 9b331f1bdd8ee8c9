"""Named sweeps producing fidelity grids, serializable to CSV.

Seven registered experiments:

* ``fig2`` -- conventional-scheme sensitivity to a relative voltage error
  (max exchange error and gate infidelity vs eps_v).
* ``fig4`` -- fidelity over a deterministic (delta1, delta2) Zeeman-shift grid.
* ``fig5`` -- fidelity vs noise strength sigma and symmetric amplitude error.
* ``fig6`` -- fidelity vs independent amplitude errors (eps1, eps2).
* ``fig7`` -- corrected-scheme fidelity vs relative timing errors, no
  decoherence, full counter-rotating mode.
* ``fig8`` -- infidelity vs relative drive-strength deviation for all
  driven schemes, no decoherence, full counter-rotating mode.
* ``fig9`` -- fidelity vs quasi-static exchange-noise strength for all
  driven schemes, no decoherence.

Grid points are independent tasks; chunks are evaluated in a fixed order (a
process pool is used when ``workers`` > 1) and every numerical knob that
could depend on batch composition is pinned from the whole grid, so results
are identical regardless of worker count.
"""

from __future__ import annotations

import concurrent.futures
import io
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .dynamics import (
    DecoherenceParams,
    IntegratorConfig,
    NoiseAveragingConfig,
    full_step_counts,
    lindblad_full_batch,
    lindblad_rwa_batch,
    lindblad_step_depth,
    propagate_full_batch,
    propagate_rwa_batch,
    sample_noise,
    stack_sequences,
)
from .errors import ValidationError
from .metrics import default_ensemble
from .model import TWO_PI, ErrorRealization, SystemParams
from .schemes import (
    CONVENTIONAL_AC,
    SchemeSpec,
    compile_scheme,
    ideal_target,
    inject_errors,
    omega_for_direct,
)

WORKERS_ENV_VAR = "ISWAPSIM_WORKERS"

_SCHEME_ALIASES = {
    "a": "direct",
    "b": "composite",
    "c": "dcg",
    "direct": "direct",
    "composite": "composite",
    "dcg": "dcg",
    "conventional": "conventional",
}

# axis name -> (lo, hi); full/desk point counts are per experiment below
_EXPERIMENT_AXES = {
    "fig2": (("eps_v", -0.02, 0.02),),
    "fig4": (("delta1_mhz", -0.5, 0.5), ("delta2_mhz", -0.5, 0.5)),
    "fig5": (("sigma_mhz", 0.0, 0.3), ("eps", -0.05, 0.05)),
    "fig6": (("eps1", -0.05, 0.05), ("eps2", -0.05, 0.05)),
    "fig7": (("dtau1", -0.02, 0.02), ("dtau2", -0.02, 0.02)),
    "fig8": (("eps_omega", -0.05, 0.05),),
    "fig9": (("sigma_j_mhz", 0.0, 0.4),),
}
# fig5's sigma axis uses 31 full-grid points so the 0.1 MHz marker lies on-grid
_FULL_POINTS = {"fig5": {"sigma_mhz": 31}}
_DEFAULT_SCHEMES = {
    "fig2": ("conventional",),
    "fig4": ("direct",),
    "fig5": ("direct",),
    "fig6": ("dcg",),
    "fig7": ("dcg",),
    "fig8": ("direct", "composite", "dcg"),
    "fig9": ("direct", "composite", "dcg"),
}
_DEFAULT_MODE = {
    "fig2": "full",
    "fig4": "rwa",
    "fig5": "rwa",
    "fig6": "rwa",
    "fig7": "full",
    "fig8": "full",
    "fig9": "full",
}
_DECOHERENCE_ON = {"fig2", "fig4", "fig5", "fig6"}

EXPERIMENT_IDS = tuple(sorted(_EXPERIMENT_AXES))

# raise the quadrature order for wide Gaussians
_SIGMA_ORDER_BUMP = TWO_PI * 0.3e6
_CHUNK_CAP = 4096  # batch elements (points x realizations) per chunk


@dataclass(frozen=True)
class SweepSpec:
    """Fully resolved description of one sweep run."""

    experiment: str
    schemes: tuple[str, ...]
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    params: SystemParams
    noise: NoiseAveragingConfig
    integrator: IntegratorConfig
    decoherence: DecoherenceParams
    preset: str = "desk"
    n: int = 2
    omega: float | None = None
    spot_check_full: bool = False

    def __post_init__(self):
        if self.experiment not in _EXPERIMENT_AXES:
            raise ValidationError(f"unknown experiment {self.experiment!r}")
        expected = tuple(name for name, *_ in _EXPERIMENT_AXES[self.experiment])
        got = tuple(name for name, _ in self.axes)
        if got != expected:
            raise ValidationError(f"{self.experiment} expects axes {expected}, got {got}")
        for name, values in self.axes:
            if len(values) < 2:
                raise ValidationError(f"axis {name} needs at least 2 points")
        for s in self.schemes:
            if s not in ("direct", "composite", "dcg", "conventional"):
                raise ValidationError(f"unknown scheme {s!r}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(v) for _, v in self.axes)

    def axis_values(self) -> list[np.ndarray]:
        return [np.array(v, dtype=float) for _, v in self.axes]

    def drive_amplitude(self) -> float:
        return self.omega if self.omega is not None else omega_for_direct(self.n, self.params.j_max)


def resolve_scheme(name: str) -> str:
    key = name.strip().lower()
    if key not in _SCHEME_ALIASES:
        raise ValidationError(f"unknown scheme {name!r}")
    return _SCHEME_ALIASES[key]


def make_sweep_spec(
    experiment: str,
    *,
    preset: str = "desk",
    schemes: tuple[str, ...] | str | None = None,
    axes: dict[str, np.ndarray] | None = None,
    params: SystemParams | None = None,
    noise: NoiseAveragingConfig | None = None,
    integrator: IntegratorConfig | None = None,
    n: int = 2,
    omega: float | None = None,
    spot_check_full: bool = False,
    seed: int = 12345,
) -> SweepSpec:
    """Resolve defaults into a concrete SweepSpec."""
    if experiment not in _EXPERIMENT_AXES:
        raise ValidationError(f"unknown experiment {experiment!r}")
    if preset not in ("desk", "full"):
        raise ValidationError("preset must be 'desk' or 'full'")
    params = params if params is not None else SystemParams.default()
    if schemes is None:
        schemes = _DEFAULT_SCHEMES[experiment]
    elif isinstance(schemes, str):
        schemes = (resolve_scheme(schemes),)
    else:
        schemes = tuple(resolve_scheme(s) for s in schemes)
    axes = axes or {}
    resolved = []
    for name, lo, hi in _EXPERIMENT_AXES[experiment]:
        if axes.get(name) is not None:
            values = tuple(float(x) for x in np.asarray(axes[name], dtype=float))
        else:
            pts = 11 if preset == "desk" else _FULL_POINTS.get(experiment, {}).get(name, 41)
            values = tuple(np.linspace(lo, hi, pts))
        resolved.append((name, values))
    if noise is None:
        sigma = TWO_PI * 0.1e6 if experiment in ("fig2", "fig6") else 0.0
        noise = NoiseAveragingConfig(sigma_delta=sigma, seed=seed)
    if integrator is None:
        integrator = IntegratorConfig(mode=_DEFAULT_MODE[experiment])
    dec = (
        DecoherenceParams.from_t2_echo(params.t2_echo)
        if experiment in _DECOHERENCE_ON
        else DecoherenceParams()
    )
    return SweepSpec(
        experiment=experiment,
        schemes=schemes,
        axes=tuple(resolved),
        params=params,
        noise=noise,
        integrator=integrator,
        decoherence=dec,
        preset=preset,
        n=n,
        omega=omega,
        spot_check_full=spot_check_full,
    )


@dataclass(frozen=True)
class ResultGrid:
    """Axes, per-point value columns (flat, row-major), and run metadata."""

    axes: tuple[tuple[str, tuple[float, ...]], ...]
    columns: dict[str, np.ndarray]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        npts = int(np.prod([len(v) for _, v in self.axes]))
        for name, col in self.columns.items():
            if col.shape != (npts,):
                raise ValidationError(f"column {name} has {col.shape}, expected ({npts},)")
            if name.startswith("fidelity"):
                finite = col[np.isfinite(col)]
                if finite.size and (finite.min() < -1e-9 or finite.max() > 1.0 + 1e-9):
                    raise ValidationError(f"column {name} outside [0, 1]")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(v) for _, v in self.axes)

    def axis_values(self, i: int) -> np.ndarray:
        return np.array(self.axes[i][1])

    def column_grid(self, name: str) -> np.ndarray:
        return self.columns[name].reshape(self.shape)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}={v}\n")
        for name, values in self.axes:
            buf.write(f"# axis:{name}=" + ";".join(_fmt(v) for v in values) + "\n")
        names = [n for n, _ in self.axes] + list(self.columns)
        buf.write(",".join(names) + "\n")
        grids = np.meshgrid(*[np.array(v) for _, v in self.axes], indexing="ij")
        coords = [g.reshape(-1) for g in grids]
        cols = coords + [self.columns[n] for n in self.columns]
        for row in zip(*cols):
            buf.write(",".join(_fmt(x) for x in row) + "\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "ResultGrid":
        metadata, axes = {}, []
        lines = text.splitlines()
        i = 0
        for i, line in enumerate(lines):
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            key, _, value = body.partition("=")
            if key.startswith("axis:"):
                axes.append(
                    (key[5:], tuple(float(x) for x in value.split(";") if x != ""))
                )
            else:
                metadata[key] = value
        if i >= len(lines):
            raise ValidationError("CSV has no header row")
        header = lines[i].split(",")
        rows = [ln for ln in lines[i + 1 :] if ln.strip()]
        if not rows:
            raise ValidationError("CSV has no data rows")
        data = np.array([[float(x) for x in ln.split(",")] for ln in rows])
        if not axes:
            raise ValidationError("CSV is missing axis metadata")
        n_axes = len(axes)
        npts = int(np.prod([len(v) for _, v in axes]))
        if data.shape != (npts, len(header)):
            raise ValidationError("CSV data shape does not match axes")
        columns = {name: data[:, n_axes + j] for j, name in enumerate(header[n_axes:])}
        return cls(axes=tuple(axes), columns=columns, metadata=metadata)


def _fmt(x) -> str:
    return format(float(x), ".12g")


# ---------------------------------------------------------------------------
# shared evaluation helpers


def _scheme_spec(spec: SweepSpec, scheme: str) -> SchemeSpec:
    j = spec.params.j_max
    if scheme == "conventional":
        voltage = spec.experiment == "fig2"
        return SchemeSpec.conventional(j / 2, j / 2, voltage_mode=voltage)
    if scheme == "direct":
        return SchemeSpec.direct(spec.n, j)
    omega = spec.drive_amplitude()
    return SchemeSpec.composite(j, omega) if scheme == "composite" else SchemeSpec.dcg(j, omega)


def _effective_noise(spec: SweepSpec, sigma_delta=None, sigma_j=None) -> NoiseAveragingConfig:
    cfg = spec.noise
    if sigma_delta is not None:
        cfg = replace(cfg, sigma_delta=float(sigma_delta))
    if sigma_j is not None:
        cfg = replace(cfg, sigma_j=float(sigma_j))
    if cfg.method == "gauss_hermite" and max(cfg.sigma_delta, cfg.sigma_j) > _SIGMA_ORDER_BUMP:
        cfg = replace(cfg, order=max(cfg.order, 15))
    return cfg


def _segment_norm_bound(seg, max_delta: float) -> float:
    if seg.kind == CONVENTIONAL_AC:
        d = seg.exchange
        return d.j_dc / 4 + d.j_ac / 2 + max_delta
    return (abs(seg.omega1) + abs(seg.omega2)) / 2 + abs(seg.exchange) / 4 + max_delta


def _lindblad_depths(spec: SweepSpec, seq, max_delta: float, max_scale: float = 1.0):
    """Per-segment squaring depths from the sweep-wide worst case."""
    gamma = 2.0 * (spec.decoherence.gamma1 + spec.decoherence.gamma2)
    out = []
    for seg in seq.segments:
        z = (2.0 * max_scale * _segment_norm_bound(seg, max_delta) + gamma) * seg.duration
        out.append(lindblad_step_depth(z))
    return tuple(out)


def _max_noise_delta(spec: SweepSpec, sigma: float) -> float:
    if sigma == 0.0:
        return 0.0
    reals = sample_noise(_effective_noise(spec, sigma_delta=sigma))
    return max(max(abs(r.delta1), abs(r.delta2)) for r in reals)


def _unit_noise(spec: SweepSpec, axis_sigma_max: float, dim: str):
    """Noise realizations at unit sigma, for linear per-point rescaling.

    Keeps the realization count uniform across grid points (including
    sigma = 0 rows); all three averaging methods scale linearly in sigma.
    The quadrature order is bumped from the sweep-wide maximum sigma.
    """
    if dim == "delta":
        cfg = _effective_noise(spec, sigma_delta=axis_sigma_max)
        cfg = replace(cfg, sigma_delta=1.0)
    else:
        cfg = _effective_noise(spec, sigma_j=axis_sigma_max)
        cfg = replace(cfg, sigma_j=1.0)
    reals = sample_noise(cfg)
    return reals, np.array([r.weight for r in reals])


def _fidelities_lindblad(spec, seqs, d1, d2, weights, npts, target, depths=None):
    plan = stack_sequences(seqs)
    nreal = len(weights)
    if spec.integrator.mode == "rwa":
        phi = lindblad_rwa_batch(plan, d1, d2, spec.decoherence, depths=depths)
    else:
        phi = lindblad_full_batch(plan, spec.params, d1, d2, spec.decoherence, spec.integrator)
    phi = phi.reshape(npts, nreal, 16, 16)
    phi_avg = np.einsum("r,prab->pab", weights, phi)
    ens = default_ensemble()
    ideal = ens.pure_kets @ target.T                       # (36, 4)
    rho_vec = ens.states.reshape(-1, 16)                   # (36, 16)
    out = np.einsum("pab,nb->pna", phi_avg, rho_vec).reshape(npts, 36, 4, 4)
    overlaps = np.einsum("ni,pnij,nj->pn", ideal.conj(), out, ideal)
    f = np.sqrt(np.clip(overlaps.real, 0.0, None)).mean(axis=1)
    return np.minimum(f, 1.0)


def _fidelities_unitary(spec, seqs, d1, d2, weights, npts, target, steps=None):
    plan = stack_sequences(seqs)
    nreal = len(weights)
    if spec.integrator.mode == "rwa":
        u = propagate_rwa_batch(plan, d1, d2)
    else:
        u = propagate_full_batch(
            plan, spec.params, d1, d2, spec.integrator, steps_per_segment=steps
        )
    ens = default_ensemble()
    ideal = ens.pure_kets @ target.T                       # (36, 4)
    out = np.einsum("bij,nj->bni", u, ens.pure_kets)       # (B, 36, 4)
    probs = np.abs(np.einsum("ni,bni->bn", ideal.conj(), out)) ** 2
    probs = probs.reshape(npts, nreal, 36)
    f = np.sqrt(np.einsum("r,prn->pn", weights, probs)).mean(axis=1)
    return np.minimum(f, 1.0)


def _full_steps_for_sweep(spec, base_seq, max_dtau1=0.0, max_dtau2=0.0):
    """Pin full-mode step counts from the largest possible segment durations."""
    plan = stack_sequences([base_seq])
    max_durs = []
    for seg in base_seq.segments:
        scale = 1.0
        if seg.role == "tau1":
            scale = 1.0 + max_dtau1
        elif seg.role == "tau2":
            scale = 1.0 + max_dtau2
        max_durs.append(seg.duration * scale)
    return full_step_counts(plan, spec.params, spec.integrator, max_durations=max_durs)


# ---------------------------------------------------------------------------
# per-experiment chunk runners: (spec, flat indices) -> {column: values}


def _coords(spec: SweepSpec, idx: np.ndarray) -> list[np.ndarray]:
    unravel = np.unravel_index(idx, spec.shape)
    return [vals[u] for vals, u in zip(spec.axis_values(), unravel)]


def _run_fig2(spec: SweepSpec, idx: np.ndarray) -> dict[str, np.ndarray]:
    from .model import max_relative_exchange_error

    (eps_v,) = _coords(spec, idx)
    sspec = _scheme_spec(spec, "conventional")
    base = compile_scheme(sspec, spec.params)
    target = ideal_target(sspec)
    reals = sample_noise(_effective_noise(spec))
    weights = np.array([r.weight for r in reals])
    seqs = [inject_errors(base, ErrorRealization(eps_v=e)) for e in eps_v for _ in reals]
    d1 = np.array([r.delta1 for _ in eps_v for r in reals])
    d2 = np.array([r.delta2 for _ in eps_v for r in reals])
    f = _fidelities_lindblad(spec, seqs, d1, d2, weights, len(eps_v), target)
    mdl = spec.params.exchange_model
    jd = spec.params.j_max / 2
    max_ej = np.array([max_relative_exchange_error(mdl, jd, jd, e) for e in eps_v])
    return {"max_eps_j": max_ej, "infidelity": 1.0 - f}


def _run_fig4(spec: SweepSpec, idx: np.ndarray) -> dict[str, np.ndarray]:
    d1_mhz, d2_mhz = _coords(spec, idx)
    scheme = spec.schemes[0]
    sspec = _scheme_spec(spec, scheme)
    seq = compile_scheme(sspec, spec.params)
    target = ideal_target(sspec)
    max_delta = TWO_PI * 1e6 * max(
        np.max(np.abs(spec.axis_values()[0])), np.max(np.abs(spec.axis_values()[1]))
    )
    depths = _lindblad_depths(spec, seq, max_delta)
    seqs = [seq] * len(idx)
    weights = np.array([1.0])
    f = _fidelities_lindblad(
        spec, seqs, TWO_PI * 1e6 * d1_mhz, TWO_PI * 1e6 * d2_mhz, weights, len(idx),
        target, depths=depths,
    )
    return {"fidelity": f}


def _run_fig5(spec: SweepSpec, idx: np.ndarray) -> dict[str, np.ndarray]:
    sigma_mhz, eps = _coords(spec, idx)
    scheme = spec.schemes[0]
    sspec = _scheme_spec(spec, scheme)
    base = compile_scheme(sspec, spec.params)
    target = ideal_target(sspec)
    sigma_max = TWO_PI * 1e6 * float(np.max(spec.axis_values()[0]))
    eps_max = float(np.max(np.abs(spec.axis_values()[1])))
    depths = _lindblad_depths(
        spec, base, _max_noise_delta(spec, sigma_max), max_scale=1.0 + eps_max
    )
    unit, weights = _unit_noise(spec, sigma_max, "delta")
    seqs, d1, d2 = [], [], []
    for s_mhz, e in zip(sigma_mhz, eps):
        sigma = TWO_PI * 1e6 * s_mhz
        seq = inject_errors(base, ErrorRealization(eps1=e, eps2=e))
        seqs.extend([seq] * len(unit))
        d1.extend(sigma * r.delta1 for r in unit)
        d2.extend(sigma * r.delta2 for r in unit)
    f = _fidelities_lindblad(
        spec, seqs, np.array(d1), np.array(d2), weights, len(idx), target, depths=depths
    )
    return {"fidelity": f}


def _run_fig6(spec: SweepSpec, idx: np.ndarray) -> dict[str, np.ndarray]:
    eps1, eps2 = _coords(spec, idx)
    scheme = spec.schemes[0]
    sspec = _scheme_spec(spec, scheme)
    base = compile_scheme(sspec, spec.params)
    target = ideal_target(sspec)
    reals = sample_noise(_effective_noise(spec))
    weights = np.array([r.weight for r in reals])
    eps_max = max(
        float(np.max(np.abs(spec.axis_values()[0]))),
        float(np.max(np.abs(spec.axis_values()[1]))),
    )
    depths = _lindblad_depths(
        spec, base, _max_noise_delta(spec, spec.noise.sigma_delta), max_scale=1.0 + eps_max
    )
    seqs = [
        inject_errors(base, ErrorRealization(eps1=e1, eps2=e2))
        for e1, e2 in zip(eps1, eps2)
        for _ in reals
    ]
    d1 = np.array([r.delta1 for _ in idx for r in reals])
    d2 = np.array([r.delta2 for _ in idx for r in reals])
    f = _fidelities_lindblad(spec, seqs, d1, d2, weights, len(idx), target, depths=depths)
    return {"fidelity": f}


def _run_fig7(spec: SweepSpec, idx: np.ndarray) -> dict[str, np.ndarray]:
    dtau1, dtau2 = _coords(spec, idx)
    sspec = _scheme_spec(spec, spec.schemes[0])
    base = compile_scheme(sspec, spec.params)
    target = ideal_target(sspec)
    steps = None
    if spec.integrator.mode == "full":
        steps = _full_steps_for_sweep(
            spec,
            base,
            max_dtau1=float(np.max(np.abs(spec.axis_values()[0]))),
            max_dtau2=float(np.max(np.abs(spec.axis_values()[1]))),
        )
    seqs = [
        inject_errors(base, ErrorRealization(dtau1=t1, dtau2=t2))
        for t1, t2 in zip(dtau1, dtau2)
    ]
    zeros = np.zeros(len(idx))
    weights = np.array([1.0])
    f = _fidelities_unitary(spec, seqs, zeros, zeros, weights, len(idx), target, steps=steps)
    return {"fidelity": f}


def _run_fig8(spec: SweepSpec, idx: np.ndarray) -> dict[str, np.ndarray]:
    (eps_omega,) = _coords(spec, idx)
    out = {}
    zeros = np.zeros(len(idx))
    weights = np.array([1.0])
    for scheme in spec.schemes:
        sspec = _scheme_spec(spec, scheme)
        base = compile_scheme(sspec, spec.params)
        target = ideal_target(sspec)
        steps = _full_steps_for_sweep(spec, base) if spec.integrator.mode == "full" else None
        # actual amplitude (1 - eps_omega) * omega at calibrated durations
        seqs = [inject_errors(base, ErrorRealization(eps1=-e, eps2=-e)) for e in eps_omega]
        f = _fidelities_unitary(spec, seqs, zeros, zeros, weights, len(idx), target, steps=steps)
        out[f"infidelity_{scheme}"] = 1.0 - f
    return out


def _run_fig9(spec: SweepSpec, idx: np.ndarray) -> dict[str, np.ndarray]:
    (sigma_j_mhz,) = _coords(spec, idx)
    sigma_max = TWO_PI * 1e6 * float(np.max(spec.axis_values()[0]))
    unit, weights = _unit_noise(spec, sigma_max, "j")
    out = {}
    for scheme in spec.schemes:
        sspec = _scheme_spec(spec, scheme)
        base = compile_scheme(sspec, spec.params)
        target = ideal_target(sspec)
        steps = _full_steps_for_sweep(spec, base) if spec.integrator.mode == "full" else None
        seqs = [
            inject_errors(base, ErrorRealization(delta_j=TWO_PI * 1e6 * s_mhz * r.delta_j))
            for s_mhz in sigma_j_mhz
            for r in unit
        ]
        zeros = np.zeros(len(seqs))
        f = _fidelities_unitary(spec, seqs, zeros, zeros, weights, len(idx), target, steps=steps)
        out[f"fidelity_{scheme}"] = f
    return out


_POINT_RUNNERS = {
    "fig2": _run_fig2,
    "fig4": _run_fig4,
    "fig5": _run_fig5,
    "fig6": _run_fig6,
    "fig7": _run_fig7,
    "fig8": _run_fig8,
    "fig9": _run_fig9,
}


def _realizations_per_point(spec: SweepSpec) -> int:
    if spec.experiment in ("fig2", "fig6"):
        return len(sample_noise(_effective_noise(spec)))
    if spec.experiment == "fig5":
        sigma = TWO_PI * 1e6 * float(np.max(spec.axis_values()[0]))
        return len(_unit_noise(spec, sigma, "delta")[0])
    if spec.experiment == "fig9":
        sigma = TWO_PI * 1e6 * float(np.max(spec.axis_values()[0]))
        return len(_unit_noise(spec, sigma, "j")[0])
    return 1


def _chunks(spec: SweepSpec) -> list[np.ndarray]:
    npts = int(np.prod(spec.shape))
    per = max(1, _CHUNK_CAP // max(1, _realizations_per_point(spec)))
    flat = np.arange(npts)
    return [flat[i : i + per] for i in range(0, npts, per)]


def _eval_chunk(args):
    spec, idx = args
    return _POINT_RUNNERS[spec.experiment](spec, idx)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> ResultGrid:
    """Execute a sweep and assemble its ResultGrid."""
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV_VAR, "1"))
    chunks = _chunks(spec)
    payloads = [(spec, idx) for idx in chunks]
    if workers > 1 and len(chunks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_eval_chunk, payloads))
    else:
        results = [_eval_chunk(p) for p in payloads]
    npts = int(np.prod(spec.shape))
    columns: dict[str, np.ndarray] = {}
    for idx, res in zip(chunks, results):
        for name, values in res.items():
            columns.setdefault(name, np.full(npts, np.nan))[idx] = values
    if spec.spot_check_full and spec.experiment in ("fig4", "fig5", "fig6"):
        mid = spec.shape[0] // 2
        sub = np.arange(npts).reshape(spec.shape)[mid].reshape(-1)
        full_spec = replace(spec, integrator=IntegratorConfig(mode="full"))
        res = _POINT_RUNNERS[spec.experiment](full_spec, sub)
        col = np.full(npts, np.nan)
        col[sub] = res["fidelity"]
        columns["fidelity_full"] = col
    return ResultGrid(axes=spec.axes, columns=columns, metadata=_metadata(spec))


def _metadata(spec: SweepSpec) -> dict[str, str]:
    p = spec.params
    md = {
        "experiment": spec.experiment,
        "schemes": ",".join(spec.schemes),
        "preset": spec.preset,
        "version": __version__,
        "e_avg_ghz": _fmt(p.e_avg / TWO_PI / 1e9),
        "delta_ez_ghz": _fmt(p.delta_ez / TWO_PI / 1e9),
        "j_max_mhz": _fmt(p.j_max / TWO_PI / 1e6),
        "t2_echo_us": _fmt(p.t2_echo * 1e6),
        "j0_khz": _fmt(p.exchange_model.j0 / TWO_PI / 1e3),
        "alpha_per_volt": _fmt(p.exchange_model.alpha),
        "omega_mhz": _fmt(spec.drive_amplitude() / TWO_PI / 1e6),
        "n": str(spec.n),
        "noise_method": spec.noise.method,
        "gh_order": str(spec.noise.order),
        "mc_samples": str(spec.noise.samples),
        "seed": str(spec.noise.seed),
        "sigma_delta_mhz": _fmt(spec.noise.sigma_delta / TWO_PI / 1e6),
        "sigma_j_mhz": _fmt(spec.noise.sigma_j / TWO_PI / 1e6),
        "integrator_mode": spec.integrator.mode,
        "substeps_per_fastest_period": str(spec.integrator.substeps_per_fastest_period),
        "gamma1_per_s": _fmt(spec.decoherence.gamma1),
        "gamma2_per_s": _fmt(spec.decoherence.gamma2),
        "spot_check_full": str(spec.spot_check_full).lower(),
    }
    return md


# ---------------------------------------------------------------------------
# spec'd experiment entry points


def _axes_dict(**kwargs):
    return {k: v for k, v in kwargs.items() if v is not None}


def run_fig2_voltage_error(eps_v=None, **kw) -> ResultGrid:
    """Conventional-scheme max exchange error and infidelity vs voltage error."""
    workers = kw.pop("workers", None)
    spec = make_sweep_spec("fig2", axes=_axes_dict(eps_v=eps_v), **kw)
    return run_sweep(spec, workers=workers)


def run_fig4_zeeman_grid(scheme="direct", delta1_mhz=None, delta2_mhz=None, **kw) -> ResultGrid:
    """Fidelity over a deterministic grid of quasi-static Zeeman shifts."""
    workers = kw.pop("workers", None)
    spec = make_sweep_spec(
        "fig4", schemes=scheme,
        axes=_axes_dict(delta1_mhz=delta1_mhz, delta2_mhz=delta2_mhz), **kw,
    )
    return run_sweep(spec, workers=workers)


def run_fig5_sigma_vs_symmetric_eps(scheme="direct", sigma_mhz=None, eps=None, **kw) -> ResultGrid:
    """Fidelity vs Gaussian noise strength and symmetric amplitude error."""
    workers = kw.pop("workers", None)
    spec = make_sweep_spec(
        "fig5", schemes=scheme, axes=_axes_dict(sigma_mhz=sigma_mhz, eps=eps), **kw
    )
    return run_sweep(spec, workers=workers)


def run_fig6_asymmetric_eps(scheme="dcg", eps1=None, eps2=None, **kw) -> ResultGrid:
    """Fidelity vs independent drive-amplitude errors at fixed noise."""
    workers = kw.pop("workers", None)
    spec = make_sweep_spec("fig6", schemes=scheme, axes=_axes_dict(eps1=eps1, eps2=eps2), **kw)
    return run_sweep(spec, workers=workers)


def run_fig7_timing(dtau1=None, dtau2=None, **kw) -> ResultGrid:
    """Corrected-scheme fidelity vs relative timing errors (decoherence-free)."""
    workers = kw.pop("workers", None)
    spec = make_sweep_spec("fig7", axes=_axes_dict(dtau1=dtau1, dtau2=dtau2), **kw)
    return run_sweep(spec, workers=workers)


def run_fig8_drive_ratio(eps_omega=None, schemes=("a", "b", "c"), **kw) -> ResultGrid:
    """Infidelity vs relative drive-strength deviation (decoherence-free)."""
    workers = kw.pop("workers", None)
    spec = make_sweep_spec("fig8", schemes=schemes, axes=_axes_dict(eps_omega=eps_omega), **kw)
    return run_sweep(spec, workers=workers)


def run_fig9_jnoise(sigma_j_mhz=None, schemes=("a", "b", "c"), **kw) -> ResultGrid:
    """Fidelity vs quasi-static exchange-noise strength (decoherence-free)."""
    workers = kw.pop("workers", None)
    spec = make_sweep_spec("fig9", schemes=schemes, axes=_axes_dict(sigma_j_mhz=sigma_j_mhz), **kw)
    return run_sweep(spec, workers=workers)


EXPERIMENTS = {
    "fig2": run_fig2_voltage_error,
    "fig4": run_fig4_zeeman_grid,
    "fig5": run_fig5_sigma_vs_symmetric_eps,
    "fig6": run_fig6_asymmetric_eps,
    "fig7": run_fig7_timing,
    "fig8": run_fig8_drive_ratio,
    "fig9": run_fig9_jnoise,
}
