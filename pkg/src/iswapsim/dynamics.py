"""Propagation of compiled pulse sequences.

Three engines share one batched core so that sweeps evaluate many grid points
or noise realizations in a single numpy pass:

* exact piecewise-constant rotating-frame unitaries (eigendecomposition per
  segment),
* fixed-step 4th-order integration of the interaction-picture Hamiltonian
  with all counter-rotating terms,
* Lindblad density-matrix evolution on the 16-dimensional vectorized state
  (pure dephasing, trace-preserving by construction).

Driven-scheme sequences are compiled in the dressed frame; their propagators
and channels are conjugated by the constant dressing transform after
integration, which is where the swap targets are defined.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ModeError, NumericalFailureError, ValidationError
from .linalg import dagger, hermiticity_defect
from .model import (
    COLLAPSE_Z1,
    COLLAPSE_Z2,
    IDENTITY4,
    SX1,
    SX2,
    SY1,
    SY2,
    SZ1,
    SZ2,
    TWO_PI,
    XX_PLUS_YY,
    XY_MINUS_YX,
    ZZ,
    ErrorRealization,
    SystemParams,
    dressed_transform,
    ideal_conventional_waveform,
    voltage_conventional_waveform,
)
from .schemes import (
    BARE,
    CONVENTIONAL_AC,
    DRESSED,
    LOCAL_Z,
    TWO_QUBIT,
    ConventionalDescriptor,
    PulseSequence,
)

# Micro-step accuracy target and floor for constant-generator Lindblad steps:
# each segment is split into 2^k equal steps with ||L||*dt <= Z_TARGET and at
# least 64 steps.
LINDBLAD_Z_TARGET = 0.01
LINDBLAD_MIN_STEPS = 64

_S_DRESS = dressed_transform()
_OSC_STACK = np.stack([SX1, SY1, SX2, SY2, XX_PLUS_YY, XY_MINUS_YX])
_CONV_STACK = np.stack([ZZ, XX_PLUS_YY, XY_MINUS_YX])


@dataclass(frozen=True)
class IntegratorConfig:
    """How to step time-dependent propagation.

    ``mode`` is 'rwa' (piecewise-constant exact exponentials) or 'full'
    (counter-rotating terms resolved by fixed-step RK4).  In full mode the
    step is 1/(substeps_per_fastest_period * f_max) unless an explicit
    ``step`` (seconds) is given; explicit steps coarser than 1/(20 * f_max)
    are rejected.
    """

    mode: str = "rwa"
    step: float | None = None
    substeps_per_fastest_period: int = 40

    def __post_init__(self):
        if self.mode not in ("rwa", "full"):
            raise ConfigurationError(f"unknown integrator mode {self.mode!r}")
        if self.step is not None and not (self.step > 0):
            raise ConfigurationError("step must be positive")
        if self.substeps_per_fastest_period < 20:
            raise ConfigurationError("substeps_per_fastest_period must be >= 20")

    def resolved_step(self, f_max_hz: float) -> float:
        if f_max_hz <= 0:
            return self.step if self.step is not None else math.inf
        default = 1.0 / (self.substeps_per_fastest_period * f_max_hz)
        if self.step is None:
            return default
        if self.step > 1.0 / (20.0 * f_max_hz):
            raise ConfigurationError(
                f"step {self.step:.3e}s too coarse for fastest frequency {f_max_hz:.3e}Hz"
            )
        return self.step


@dataclass(frozen=True)
class DecoherenceParams:
    """Pure dephasing rates (1/s) entering as (gamma_k/2) D[sigma_z^k]."""

    gamma1: float = 0.0
    gamma2: float = 0.0

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValidationError("dephasing rates must be non-negative")

    @classmethod
    def from_t2_echo(cls, t2_echo: float) -> "DecoherenceParams":
        # Coherences decay as exp(-gamma t) with gamma = 1/T2_echo.
        return cls(gamma1=1.0 / t2_echo, gamma2=1.0 / t2_echo)


NO_DECOHERENCE = DecoherenceParams()


@dataclass(frozen=True)
class NoiseAveragingConfig:
    """Quasi-static noise distribution and how to average over it.

    Gaussian with standard deviation ``sigma_delta`` independently on each
    qubit's Zeeman shift and ``sigma_j`` on the exchange.  ``method`` is
    'gauss_hermite' (deterministic quadrature, default), 'monte_carlo'
    (counter-based PRNG, reproducible by seed), or 'grid' (uniform grid over
    +-4 sigma with Gaussian weights).
    """

    method: str = "gauss_hermite"
    order: int = 9
    samples: int = 2000
    seed: int = 12345
    grid_points: int = 21
    sigma_delta: float = 0.0
    sigma_j: float = 0.0

    def __post_init__(self):
        if self.method not in ("gauss_hermite", "monte_carlo", "grid"):
            raise ValidationError(f"unknown noise averaging method {self.method!r}")
        if self.method == "gauss_hermite" and (
            self.order < 3 or self.order > 21 or self.order % 2 == 0
        ):
            raise ValidationError("gauss_hermite order must be odd and in [3, 21]")
        if self.samples < 1:
            raise ValidationError("monte_carlo needs samples >= 1")
        if self.grid_points < 3:
            raise ValidationError("grid needs at least 3 points")
        if self.sigma_delta < 0 or self.sigma_j < 0:
            raise ValidationError("sigmas must be non-negative")


def t2_star_from_sigma(sigma: float) -> float:
    """Free-induction dephasing time of Gaussian quasi-static noise."""
    return math.sqrt(2.0) / sigma


def sigma_from_t2_star(t2_star: float) -> float:
    return math.sqrt(2.0) / t2_star


def _dimension_nodes(cfg: NoiseAveragingConfig, sigma: float, rng) -> tuple[np.ndarray, np.ndarray]:
    if sigma == 0.0:
        return np.array([0.0]), np.array([1.0])
    if cfg.method == "gauss_hermite":
        x, w = np.polynomial.hermite.hermgauss(cfg.order)
        return math.sqrt(2.0) * sigma * x, w / math.sqrt(math.pi)
    if cfg.method == "grid":
        x = np.linspace(-4.0 * sigma, 4.0 * sigma, cfg.grid_points)
        w = np.exp(-0.5 * (x / sigma) ** 2)
        return x, w / w.sum()
    # monte_carlo: one stream per dimension, drawn in call order
    return sigma * rng.standard_normal(cfg.samples), np.full(cfg.samples, 1.0 / cfg.samples)


def sample_noise(
    cfg: NoiseAveragingConfig, base: ErrorRealization | None = None
) -> list[ErrorRealization]:
    """Realizations of the quasi-static noise, weights summing to one.

    Dimensions are independent: delta1 and delta2 when sigma_delta > 0,
    delta_j when sigma_j > 0.  ``base`` supplies the fixed (control-error)
    fields copied into every realization.
    """
    base = base if base is not None else ErrorRealization()
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    d1, w1 = _dimension_nodes(cfg, cfg.sigma_delta, rng)
    d2, w2 = _dimension_nodes(cfg, cfg.sigma_delta, rng)
    dj, wj = _dimension_nodes(cfg, cfg.sigma_j, rng)
    if cfg.method == "monte_carlo" and (cfg.sigma_delta > 0 or cfg.sigma_j > 0):
        # Joint draws, not a product grid.
        n = max(len(d1), len(d2), len(dj))
        d1 = d1 if len(d1) == n else np.zeros(n)
        d2 = d2 if len(d2) == n else np.zeros(n)
        dj = dj if len(dj) == n else np.zeros(n)
        w = np.full(n, 1.0 / n)
        return [
            base.with_noise(delta1=a, delta2=b, delta_j=c, weight=x)
            for a, b, c, x in zip(d1, d2, dj, w)
        ]
    out = []
    total = 0.0
    for a, wa in zip(d1, w1):
        for b, wb in zip(d2, w2):
            for c, wc in zip(dj, wj):
                w = wa * wb * wc
                total += w
                out.append(base.with_noise(delta1=a, delta2=b, delta_j=c, weight=w))
    # kill quadrature roundoff so weights sum to exactly 1
    return [r.with_noise(weight=r.weight / total) for r in out]


# ---------------------------------------------------------------------------
# batched sequence plans


@dataclass(frozen=True)
class _SegmentBatch:
    kind: str
    durations: np.ndarray  # (B,)
    omega1: np.ndarray
    omega2: np.ndarray
    exchange: np.ndarray | None  # (B,) for constant-exchange kinds
    descriptor: ConventionalDescriptor | None  # template, eps_v varies below
    eps_v: np.ndarray | None
    role: str | None


@dataclass(frozen=True)
class SequencePlan:
    """Structurally identical sequences stacked along a batch axis."""

    frame: str
    label: str
    segments: tuple[_SegmentBatch, ...]
    batch: int


def stack_sequences(seqs: list[PulseSequence]) -> SequencePlan:
    """Stack same-structure sequences (same kinds/roles in order) for batching."""
    first = seqs[0]
    b = len(seqs)
    segs = []
    for i, ref in enumerate(first.segments):
        kinds = {s.segments[i].kind for s in seqs}
        if len(kinds) != 1:
            raise ValidationError("sequences in a batch must share segment structure")
        durations = np.array([s.segments[i].duration for s in seqs])
        o1 = np.array([s.segments[i].omega1 for s in seqs])
        o2 = np.array([s.segments[i].omega2 for s in seqs])
        if ref.kind == CONVENTIONAL_AC:
            descs = [s.segments[i].exchange for s in seqs]
            modes = {(d.j_dc, d.j_ac, d.omega_mod, d.voltage_mode) for d in descs}
            if len(modes) != 1:
                raise ValidationError("conventional segments in a batch must share a waveform")
            segs.append(
                _SegmentBatch(
                    ref.kind, durations, o1, o2, None, descs[0],
                    np.array([d.eps_v for d in descs]), ref.role,
                )
            )
        else:
            ex = np.array([s.segments[i].exchange for s in seqs])
            segs.append(_SegmentBatch(ref.kind, durations, o1, o2, ex, None, None, ref.role))
    if any(s.frame != first.frame for s in seqs):
        raise ValidationError("sequences in a batch must share a frame")
    return SequencePlan(first.frame, first.label, tuple(segs), b)


def _fastest_frequency_hz(plan: SequencePlan, params: SystemParams) -> float:
    """Fastest oscillation retained by the interaction-picture Hamiltonian.

    Driven segments oscillate at twice the Zeeman energies; the transverse
    exchange at the Zeeman difference (appearing up to 2*dEz once modulated).
    Voltage-waveform harmonics above that are sub-1e-8 effects at these
    parameters and need no extra resolution.
    """
    f = 0.0
    dez_hz = abs(params.delta_ez) / TWO_PI
    for seg in plan.segments:
        if seg.kind == CONVENTIONAL_AC:
            f = max(f, 2.0 * dez_hz)
        else:
            if np.any(seg.omega1 != 0.0) or np.any(seg.omega2 != 0.0):
                f = max(f, 2.0 * max(params.bz1, params.bz2) / TWO_PI)
            if np.any(seg.exchange != 0.0):
                f = max(f, 2.0 * dez_hz)
    return f


def _exchange_waveform(seg: _SegmentBatch, params: SystemParams):
    d = seg.descriptor
    if d.voltage_mode:
        # batched form of model.voltage_conventional_waveform:
        # j0 * (max(j_ideal, j0)/j0)^(1+eps_v), vectorized over (t, eps_v)
        j0 = params.exchange_model.j0
        expo = 1.0 + seg.eps_v

        def j_batch(t):  # t (B,) -> (B,)
            ideal = d.j_dc + d.j_ac * np.cos(d.omega_mod * t)
            return j0 * (np.maximum(ideal, j0) / j0) ** expo

        return j_batch
    f = ideal_conventional_waveform(d.j_dc, d.j_ac, d.omega_mod)
    return lambda t: f(t)


# ---------------------------------------------------------------------------
# rotating-frame (piecewise-constant) engines


def _rwa_segment_hamiltonians(
    plan: SequencePlan, delta1: np.ndarray, delta2: np.ndarray
) -> list[np.ndarray]:
    out = []
    noise = np.multiply.outer(delta1, SZ1) + np.multiply.outer(delta2, SZ2)
    for seg in plan.segments:
        if seg.kind == CONVENTIONAL_AC:
            if seg.descriptor.voltage_mode:
                raise ModeError(
                    "voltage-mode conventional segments are time dependent; use full mode"
                )
            h = (
                seg.descriptor.j_dc * ZZ
                + 0.5 * seg.descriptor.j_ac * XX_PLUS_YY
                + noise
            )
            out.append(np.broadcast_to(h, (plan.batch, 4, 4)).copy() if h.ndim == 2 else h)
        else:
            h = (
                np.multiply.outer(seg.omega1, SX1)
                + np.multiply.outer(seg.omega2, SX2)
                + np.multiply.outer(seg.exchange, ZZ)
                + noise
            )
            out.append(h)
    return out


def _expi_batch(h: np.ndarray, t: np.ndarray) -> np.ndarray:
    """exp(-i h t) for a batch of Hermitian h (B,4,4) and times t (B,)."""
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * t[:, None])
    return np.einsum("bik,bk,bjk->bij", v, phases, v.conj())


def propagate_rwa_batch(
    plan: SequencePlan, delta1: np.ndarray, delta2: np.ndarray
) -> np.ndarray:
    u = np.broadcast_to(IDENTITY4, (plan.batch, 4, 4)).copy()
    for seg, h in zip(plan.segments, _rwa_segment_hamiltonians(plan, delta1, delta2)):
        u = _expi_batch(h, seg.durations) @ u
    if plan.frame == DRESSED:
        u = dagger(_S_DRESS) @ u @ _S_DRESS
    return u


# ---------------------------------------------------------------------------
# full counter-rotating engine


def _full_segment_assembler(seg: _SegmentBatch, params: SystemParams):
    """Return h(t_b) -> (B, 4, 4) for one segment at absolute times t_b."""
    if seg.kind == CONVENTIONAL_AC:
        j_batch = _exchange_waveform(seg, params)
        dez = params.delta_ez

        def h_conv(t, _static=None):
            j = j_batch(t)
            theta = dez * t
            coeff = np.stack([j, j * np.cos(theta), j * np.sin(theta)], axis=1)
            return np.einsum("bm,mij->bij", coeff, _CONV_STACK)

        return h_conv

    static = (
        np.multiply.outer(seg.omega1, SX1)
        + np.multiply.outer(seg.omega2, SX2)
        + np.multiply.outer(seg.exchange, ZZ)
    )
    o1, o2, j = seg.omega1, seg.omega2, seg.exchange
    wb1, wb2, dez = 2.0 * params.bz1, 2.0 * params.bz2, params.delta_ez

    def h_drive(t, _static=static):
        coeff = np.stack(
            [
                o1 * np.cos(wb1 * t),
                o1 * np.sin(wb1 * t),
                o2 * np.cos(wb2 * t),
                o2 * np.sin(wb2 * t),
                j * np.cos(dez * t),
                j * np.sin(dez * t),
            ],
            axis=1,
        )
        return _static + np.einsum("bm,mij->bij", coeff, _OSC_STACK)

    return h_drive


@dataclass
class IntegratorDiagnostics:
    """Mutable accumulator for re-unitarization events."""

    projections: int = 0
    max_drift: float = 0.0
    events: list = field(default_factory=list)


def _check_unitarity(u, label, diag):
    drift = float(np.max(np.abs(np.einsum("bij,bik->bjk", u.conj(), u) - IDENTITY4)))
    if diag is not None:
        diag.max_drift = max(diag.max_drift, drift)
    if drift > 1e-2:
        raise NumericalFailureError(
            f"unitarity drift {drift:.2e} after segment {label}; re-unitarization overflow"
        )
    if drift > 1e-8:
        # polar projection via SVD, logged, never silent
        w, _, vt = np.linalg.svd(u)
        u = w @ vt
        warnings.warn(
            f"re-unitarized propagator after segment {label} (drift {drift:.2e})",
            stacklevel=3,
        )
        if diag is not None:
            diag.projections += 1
            diag.events.append((label, drift))
    return u


def full_step_counts(
    plan: SequencePlan,
    params: SystemParams,
    cfg: IntegratorConfig,
    max_durations: list[float] | None = None,
) -> tuple[int, ...]:
    """Per-segment RK4 step counts.

    ``max_durations`` lets sweep drivers pin the counts from the worst case
    over a whole grid, so results do not depend on how points are chunked
    across workers.
    """
    dt_max = cfg.resolved_step(_fastest_frequency_hz(plan, params))
    out = []
    for i, seg in enumerate(plan.segments):
        dur = np.max(seg.durations) if max_durations is None else max_durations[i]
        out.append(max(1, int(np.ceil(dur / dt_max))))
    return tuple(out)


def propagate_full_batch(
    plan: SequencePlan,
    params: SystemParams,
    delta1: np.ndarray,
    delta2: np.ndarray,
    cfg: IntegratorConfig,
    diag: IntegratorDiagnostics | None = None,
    steps_per_segment: tuple[int, ...] | None = None,
) -> np.ndarray:
    """RK4 integration of dU/dt = -i H(t) U over the stacked sequences.

    Carrier phases use absolute time from the start of each sequence, so the
    microwave source stays phase-coherent across segment boundaries.
    """
    if cfg.mode != "full":
        raise ConfigurationError("propagate_full requires a full-mode IntegratorConfig")
    if steps_per_segment is None:
        steps_per_segment = full_step_counts(plan, params, cfg)
    noise = np.multiply.outer(delta1, SZ1) + np.multiply.outer(delta2, SZ2)
    u = np.broadcast_to(IDENTITY4, (plan.batch, 4, 4)).copy()
    t = np.zeros(plan.batch)
    for idx, seg in enumerate(plan.segments):
        h_of_t = _full_segment_assembler(seg, params)
        n = steps_per_segment[idx]
        dt = seg.durations / n  # per-point step, <= dt_max everywhere
        dtc = dt[:, None, None]
        h_lo = h_of_t(t) + noise
        for _ in range(n):
            h_mid = h_of_t(t + 0.5 * dt) + noise
            h_hi = h_of_t(t + dt) + noise
            k1 = -1j * (h_lo @ u)
            k2 = -1j * (h_mid @ (u + 0.5 * dtc * k1))
            k3 = -1j * (h_mid @ (u + 0.5 * dtc * k2))
            k4 = -1j * (h_hi @ (u + dtc * k3))
            u = u + (dtc / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t + dt
            h_lo = h_hi
        u = _check_unitarity(u, f"{idx}:{seg.kind}", diag)
    if plan.frame == DRESSED:
        u = dagger(_S_DRESS) @ u @ _S_DRESS
    return u


# ---------------------------------------------------------------------------
# Lindblad engines (vectorized density matrices, row-major vec)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(rho.shape[:-2] + (16,))

def unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(v.shape[:-1] + (4, 4))


def apply_channel(phi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return unvec(vec(rho) @ phi.T)


def _hamiltonian_superop_batch(h: np.ndarray) -> np.ndarray:
    """-i (H x I - I x H^T) for h of shape (B, 4, 4), row-major vec."""
    left = np.einsum("bik,jl->bijkl", h, IDENTITY4)
    right = np.einsum("ik,blj->bijkl", IDENTITY4, h)
    return (-1j) * (left - right).reshape(h.shape[0], 16, 16)


def _dephasing_superop(dec: DecoherenceParams) -> np.ndarray:
    d = np.zeros((16, 16), dtype=complex)
    for gamma, c in ((dec.gamma1, COLLAPSE_Z1), (dec.gamma2, COLLAPSE_Z2)):
        if gamma == 0.0:
            continue
        d += 0.5 * gamma * (np.kron(c, c.conj()) - np.eye(16))
    return d


def _norm_bound(h: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(h))))


def lindblad_step_depth(z_total: float) -> int:
    """Squaring depth k such that 2^k steps meet the micro-step target."""
    return max(
        int(math.ceil(math.log2(LINDBLAD_MIN_STEPS))),
        int(math.ceil(math.log2(max(z_total / LINDBLAD_Z_TARGET, 1.0)))),
    )


def _expstep_superop(l: np.ndarray, durations: np.ndarray, depth: int) -> np.ndarray:
    """Propagator of a constant Lindblad generator over per-point durations.

    Equivalent to 2^depth fixed RK4 steps of the linear constant-coefficient
    system (one 4th-order Taylor micro-step, then repeated squaring); the
    depth is chosen so the micro-step satisfies ||L dt|| <= LINDBLAD_Z_TARGET
    with at least LINDBLAD_MIN_STEPS steps per segment.
    """
    k = depth
    dt = (durations / 2.0**k)[:, None, None]
    z = l * dt
    m = np.broadcast_to(np.eye(16, dtype=complex), z.shape).copy()
    for j in (4.0, 3.0, 2.0, 1.0):
        m = np.broadcast_to(np.eye(16, dtype=complex), z.shape) + (z / j) @ m
    for _ in range(k):
        m = m @ m
    return m


def lindblad_rwa_batch(
    plan: SequencePlan,
    delta1: np.ndarray,
    delta2: np.ndarray,
    dec: DecoherenceParams,
    depths: tuple[int, ...] | None = None,
) -> np.ndarray:
    """Channel superoperators (B, 16, 16) for piecewise-constant sequences.

    ``depths`` optionally pins the per-segment squaring depth (sweep drivers
    derive it from the whole grid's worst case for chunk-order independence).
    """
    d_super = _dephasing_superop(dec)
    gamma_scale = 2.0 * (dec.gamma1 + dec.gamma2)
    phi = np.broadcast_to(np.eye(16, dtype=complex), (plan.batch, 16, 16)).copy()
    for i, (seg, h) in enumerate(
        zip(plan.segments, _rwa_segment_hamiltonians(plan, delta1, delta2))
    ):
        l = _hamiltonian_superop_batch(h) + d_super
        if depths is None:
            z_total = (2.0 * _norm_bound(h) + gamma_scale) * float(np.max(seg.durations))
            depth = lindblad_step_depth(z_total)
        else:
            depth = depths[i]
        phi = _expstep_superop(l, seg.durations, depth) @ phi
    if plan.frame == DRESSED:
        w = np.kron(dagger(_S_DRESS), _S_DRESS.T)
        phi = w @ phi @ dagger(w)
    return phi


def lindblad_full_batch(
    plan: SequencePlan,
    params: SystemParams,
    delta1: np.ndarray,
    delta2: np.ndarray,
    dec: DecoherenceParams,
    cfg: IntegratorConfig,
) -> np.ndarray:
    """Full counter-rotating Lindblad channel by batched RK4 on superoperators."""
    if cfg.mode != "full":
        raise ConfigurationError("lindblad_full_batch requires a full-mode config")
    dt_max = cfg.resolved_step(_fastest_frequency_hz(plan, params))
    d_super = _dephasing_superop(dec)
    noise = np.multiply.outer(delta1, SZ1) + np.multiply.outer(delta2, SZ2)
    phi = np.broadcast_to(np.eye(16, dtype=complex), (plan.batch, 16, 16)).copy()
    t = np.zeros(plan.batch)
    for seg in plan.segments:
        h_of_t = _full_segment_assembler(seg, params)
        n = max(1, int(np.ceil(np.max(seg.durations) / dt_max)))
        dt = seg.durations / n
        dtc = dt[:, None, None]
        l_lo = _hamiltonian_superop_batch(h_of_t(t) + noise) + d_super
        for _ in range(n):
            l_mid = _hamiltonian_superop_batch(h_of_t(t + 0.5 * dt) + noise) + d_super
            l_hi = _hamiltonian_superop_batch(h_of_t(t + dt) + noise) + d_super
            k1 = l_lo @ phi
            k2 = l_mid @ (phi + 0.5 * dtc * k1)
            k3 = l_mid @ (phi + 0.5 * dtc * k2)
            k4 = l_hi @ (phi + dtc * k3)
            phi = phi + (dtc / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t + dt
            l_lo = l_hi
    if plan.frame == DRESSED:
        w = np.kron(dagger(_S_DRESS), _S_DRESS.T)
        phi = w @ phi @ dagger(w)
    return phi


# ---------------------------------------------------------------------------
# public single-sequence API


def _noise_arrays(err: ErrorRealization) -> tuple[np.ndarray, np.ndarray]:
    return np.array([err.delta1]), np.array([err.delta2])


def propagate_rwa(seq: PulseSequence, err: ErrorRealization = ErrorRealization()) -> np.ndarray:
    """Exact rotating-frame propagator of a compiled sequence.

    Only the quasi-static Zeeman shifts of ``err`` act here; control errors
    (amplitudes, timing, voltage) must already be injected into the sequence.
    Dressed-frame sequences return the dressed-basis propagator.
    """
    d1, d2 = _noise_arrays(err)
    return propagate_rwa_batch(stack_sequences([seq]), d1, d2)[0]


def propagate_full(
    seq: PulseSequence,
    params: SystemParams,
    err: ErrorRealization = ErrorRealization(),
    cfg: IntegratorConfig | None = None,
    diag: IntegratorDiagnostics | None = None,
) -> np.ndarray:
    """Propagator including all counter-rotating terms (fixed-step RK4)."""
    cfg = cfg if cfg is not None else IntegratorConfig(mode="full")
    d1, d2 = _noise_arrays(err)
    return propagate_full_batch(stack_sequences([seq]), params, d1, d2, cfg, diag)[0]


def lindblad_channel(
    seq: PulseSequence,
    params: SystemParams,
    err: ErrorRealization = ErrorRealization(),
    dec: DecoherenceParams = NO_DECOHERENCE,
    cfg: IntegratorConfig | None = None,
) -> np.ndarray:
    """16x16 superoperator of the dephasing-embedded gate channel."""
    cfg = cfg if cfg is not None else IntegratorConfig(mode="rwa")
    d1, d2 = _noise_arrays(err)
    plan = stack_sequences([seq])
    if cfg.mode == "rwa":
        return lindblad_rwa_batch(plan, d1, d2, dec)[0]
    return lindblad_full_batch(plan, params, d1, d2, dec, cfg)[0]


def _validate_density_matrix(rho: np.ndarray):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError(f"density matrix must be 4x4, got {rho.shape}")
    if hermiticity_defect(rho) > 1e-10:
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValidationError("density matrix trace must be 1")
    if np.linalg.eigvalsh(0.5 * (rho + dagger(rho))).min() < -1e-10:
        raise ValidationError("density matrix is not positive semidefinite")
    return rho


def lindblad_propagate(
    seq: PulseSequence,
    params: SystemParams,
    err: ErrorRealization,
    dec: DecoherenceParams,
    rho0: np.ndarray,
    cfg: IntegratorConfig | None = None,
) -> np.ndarray:
    """Evolve a density matrix through the sequence under pure dephasing."""
    rho0 = _validate_density_matrix(rho0)
    phi = lindblad_channel(seq, params, err, dec, cfg)
    return apply_channel(phi, rho0)
