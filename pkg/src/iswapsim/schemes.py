"""Gate protocols compiled to piecewise-constant pulse sequences.

Four variants:

* ``conventional`` -- resonant ac modulation of the exchange, no drives.
* ``direct``       -- single continuously driven segment; needs the
                      drive-exchange ratio omega/j = sqrt(4n^2-1)/4.
* ``composite``    -- two half-segments with opposite drive sign separated by
                      dressed Z_{+-pi/2} pairs; works for any drive strength.
* ``dcg``          -- composite with each half split into tau1 = pi/(3j) and
                      tau2 = 2pi/(3j) pieces of alternating drive sign, giving
                      first-order immunity to drive-amplitude errors.

Driven-scheme sequences are compiled in the dressed frame (``frame ==
'dressed'``): propagators are compared against targets after conjugation by
the dressing transform.  The conventional sequence stays in the bare rotating
frame.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConstraintError, ModeError, ValidationError
from .linalg import expm_hermitian_prop
from .model import (
    S1_INDICES,
    S2_INDICES,
    TWO_PI,
    SystemParams,
    ErrorRealization,
    h_conventional_rwa,
)

TWO_QUBIT = "two_qubit"
LOCAL_Z = "local_z"
CONVENTIONAL_AC = "conventional_ac"

DRESSED = "dressed"
BARE = "bare"


@dataclass(frozen=True)
class ConventionalDescriptor:
    """Exchange waveform of a conventional segment.

    ``voltage_mode`` selects the waveform synthesized through the exponential
    voltage model (with relative voltage error ``eps_v``) instead of the ideal
    sinusoid.
    """

    j_dc: float
    j_ac: float
    omega_mod: float
    voltage_mode: bool = False
    eps_v: float = 0.0


@dataclass(frozen=True)
class Segment:
    """One piecewise-constant control interval.

    ``exchange`` is a constant (rad/s) for two_qubit/local_z segments and a
    ConventionalDescriptor for conventional_ac segments.  ``role`` tags the
    corrected-sequence pieces ('tau1'/'tau2') so timing errors know where to
    apply.
    """

    kind: str
    duration: float
    omega1: float
    omega2: float
    exchange: float | ConventionalDescriptor
    role: str | None = None

    def __post_init__(self):
        if not (self.duration > 0):
            raise ValidationError("segment duration must be positive")


@dataclass(frozen=True)
class PulseSequence:
    """Immutable compiled form of a gate protocol."""

    segments: tuple[Segment, ...]
    frame: str
    label: str

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)


@dataclass(frozen=True)
class GateTiming:
    two_qubit_time: float
    local_time: float
    total: float


def timing(seq: PulseSequence) -> GateTiming:
    """Split the sequence duration into entangling and local-rotation time."""
    tq = sum(s.duration for s in seq.segments if s.kind in (TWO_QUBIT, CONVENTIONAL_AC))
    lz = sum(s.duration for s in seq.segments if s.kind == LOCAL_Z)
    return GateTiming(two_qubit_time=tq, local_time=lz, total=tq + lz)


def omega_for_direct(n: int, j: float) -> float:
    """Drive amplitude satisfying the phase-matching ratio for the direct scheme."""
    if n < 1 or int(n) != n:
        raise ConstraintError("n must be a positive integer")
    return j * math.sqrt(4.0 * n * n - 1.0) / 4.0


@dataclass(frozen=True)
class SchemeSpec:
    """Which protocol to compile, with its exchange and drive strength."""

    variant: str
    j: float
    omega: float | None = None
    n: int | None = None
    j_dc: float | None = None
    j_ac: float | None = None
    voltage_mode: bool = False

    @classmethod
    def direct(cls, n: int, j: float, omega: float | None = None) -> "SchemeSpec":
        required = omega_for_direct(n, j)
        if omega is not None and not math.isclose(omega, required, rel_tol=1e-12):
            raise ConstraintError(
                f"direct scheme requires omega = j*sqrt(4n^2-1)/4 = {required:.6e}, got {omega:.6e}"
            )
        return cls(variant="direct", j=j, omega=required, n=n)

    @classmethod
    def composite(cls, j: float, omega: float) -> "SchemeSpec":
        return cls(variant="composite", j=j, omega=omega)

    @classmethod
    def dcg(cls, j: float, omega: float) -> "SchemeSpec":
        return cls(variant="dcg", j=j, omega=omega)

    @classmethod
    def conventional(
        cls, j_dc: float, j_ac: float, voltage_mode: bool = False
    ) -> "SchemeSpec":
        if j_dc < 0 or j_ac <= 0:
            raise ConstraintError("conventional scheme needs j_ac > 0 and j_dc >= 0")
        return cls(
            variant="conventional", j=j_ac, j_dc=j_dc, j_ac=j_ac, voltage_mode=voltage_mode
        )

    @property
    def tau1(self) -> float:
        """Short corrected-sequence piece, pi/(3 j)."""
        return math.pi / (3.0 * self.j)

    @property
    def tau2(self) -> float:
        """Long corrected-sequence piece, 2 pi/(3 j)."""
        return 2.0 * math.pi / (3.0 * self.j)


def compile_scheme(
    spec: SchemeSpec,
    params: SystemParams,
    residual_exchange: float | None = None,
) -> PulseSequence:
    """Compile a scheme into its ordered segment list (evolution order).

    ``residual_exchange`` is the exchange left on during local Z rotations;
    None uses the device residual j0, 0.0 gives the idealized switch-off.
    """
    if residual_exchange is None:
        residual_exchange = params.exchange_model.j0

    if spec.variant == "conventional":
        desc = ConventionalDescriptor(
            j_dc=spec.j_dc,
            j_ac=spec.j_ac,
            omega_mod=abs(params.delta_ez),
            voltage_mode=spec.voltage_mode,
        )
        seg = Segment(CONVENTIONAL_AC, TWO_PI / spec.j_ac, 0.0, 0.0, desc)
        return PulseSequence((seg,), frame=BARE, label="conventional")

    omega = spec.omega
    if omega is None or omega <= 0:
        raise ConstraintError("driven schemes need a positive drive amplitude")
    t_z = (math.pi / 2.0) / omega  # dressed Z_{pi/2} as a rotating-frame x rotation

    def drive(sign, duration, j, role=None):
        return Segment(TWO_QUBIT, duration, sign * omega, sign * omega, j, role)

    def z_pair(sign):
        return Segment(LOCAL_Z, t_z, sign * omega, sign * omega, residual_exchange)

    if spec.variant == "direct":
        segs = (drive(+1, TWO_PI / spec.j, spec.j),)
    elif spec.variant == "composite":
        half = math.pi / spec.j
        segs = (
            drive(+1, half, spec.j),
            z_pair(+1),
            drive(-1, half, spec.j),
            z_pair(-1),
        )
    elif spec.variant == "dcg":
        t1, t2 = spec.tau1, spec.tau2
        segs = (
            drive(+1, t1, spec.j, "tau1"),
            drive(-1, t2, spec.j, "tau2"),
            z_pair(+1),
            drive(+1, t2, spec.j, "tau2"),
            drive(-1, t1, spec.j, "tau1"),
            z_pair(-1),
        )
    else:
        raise ModeError(f"unknown scheme variant {spec.variant!r}")
    return PulseSequence(segs, frame=DRESSED, label=spec.variant)


def inject_errors(seq: PulseSequence, err: ErrorRealization) -> PulseSequence:
    """Apply control errors to a compiled sequence.

    Amplitude errors scale the drives of every microwave-driven segment
    (local Z rotations included); timing errors scale the tagged tau1/tau2
    durations; eps_v switches conventional segments to the voltage-synthesized
    waveform; delta_j shifts the exchange of actively coupled (two_qubit)
    segments only -- the residual exchange during local rotations is
    exponentially less noise-sensitive.  Quasi-static Zeeman shifts delta1/2
    are not segment properties; they enter at propagation time.
    """
    out = []
    for seg in seq.segments:
        if seg.kind == CONVENTIONAL_AC:
            desc = seg.exchange
            if err.eps_v != 0.0:
                desc = replace(desc, voltage_mode=True, eps_v=err.eps_v)
            out.append(replace(seg, exchange=desc))
            continue
        duration = seg.duration
        if seg.role == "tau1":
            duration = duration * (1.0 + err.dtau1)
        elif seg.role == "tau2":
            duration = duration * (1.0 + err.dtau2)
        exchange = seg.exchange
        if seg.kind == TWO_QUBIT:
            exchange = exchange + err.delta_j
        out.append(
            replace(
                seg,
                duration=duration,
                omega1=(1.0 + err.eps1) * seg.omega1,
                omega2=(1.0 + err.eps2) * seg.omega2,
                exchange=exchange,
            )
        )
    return PulseSequence(tuple(out), frame=seq.frame, label=seq.label)


def ideal_target(spec: SchemeSpec) -> np.ndarray:
    """Noiseless target unitary of a scheme.

    Driven schemes are expressed in the dressed basis: the swap subspace gets
    the off-diagonal -i block; the gapped subspace keeps +1 phases for the
    composite/corrected sequences and (-1)^n for the direct scheme.  The
    conventional target is the error-free rotating-frame propagator at one
    full swap period (no hand-written phase convention).
    """
    if spec.variant == "conventional":
        h = h_conventional_rwa(spec.j_dc, spec.j_ac)
        return expm_hermitian_prop(h, TWO_PI / spec.j_ac)
    u = np.zeros((4, 4), dtype=complex)
    par = (-1.0) ** spec.n if spec.variant == "direct" else 1.0
    for i in S1_INDICES:
        u[i, i] = par
    a, b = S2_INDICES
    u[a, b] = -1j
    u[b, a] = -1j
    return u


def dcg_error_amplitude(tau1: float, tau2: float, j: float) -> float:
    """First-order amplitude-error coefficient of the corrected swap sequence.

    cos(j*tau2/2) - cos(j*(tau1+tau2)/4)^2; zero at tau1 = pi/(3j),
    tau2 = 2pi/(3j).
    """
    if not (tau1 > 0) or not (tau2 > 0):
        raise ValidationError("tau1 and tau2 must be positive")
    tau = tau1 + tau2
    return math.cos(0.5 * j * tau2) - math.cos(0.25 * j * tau) ** 2


def s1_block(m: np.ndarray) -> np.ndarray:
    """2x2 block on the drive-gapped dressed subspace span{|++>, |-->}."""
    return m[np.ix_(S1_INDICES, S1_INDICES)]


def s2_block(m: np.ndarray) -> np.ndarray:
    """2x2 block on the swap-hosting dressed subspace span{|-+>, |+->}."""
    return m[np.ix_(S2_INDICES, S2_INDICES)]


def sequence_to_csv(seq: PulseSequence) -> str:
    """Debug/golden dump: one CSV row per segment.

    Columns: kind, duration_ns, omega1_MHz, omega2_MHz, exchange descriptor.
    """
    buf = io.StringIO()
    buf.write("kind,duration_ns,omega1_MHz,omega2_MHz,exchange\n")
    for seg in seq.segments:
        if isinstance(seg.exchange, ConventionalDescriptor):
            d = seg.exchange
            ex = (
                f"ac(j_dc_MHz={d.j_dc / TWO_PI / 1e6:.6g};"
                f"j_ac_MHz={d.j_ac / TWO_PI / 1e6:.6g};"
                f"omega_mod_MHz={d.omega_mod / TWO_PI / 1e6:.6g};"
                f"voltage={'1' if d.voltage_mode else '0'};eps_v={d.eps_v:.6g})"
            )
        else:
            ex = f"const(j_MHz={seg.exchange / TWO_PI / 1e6:.6g})"
        buf.write(
            f"{seg.kind},{seg.duration * 1e9:.6f},"
            f"{seg.omega1 / TWO_PI / 1e6:.6f},{seg.omega2 / TWO_PI / 1e6:.6f},{ex}\n"
        )
    return buf.getvalue()
