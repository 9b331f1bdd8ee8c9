"""System parameters, Hamiltonian builders, and the exchange-voltage model.

Units: angular frequency (rad/s) for every energy-like quantity, seconds for
time, volts for gate voltages.  hbar = 1 throughout.

Basis convention: the two-qubit computational basis is ordered
{|uu>, |du>, |ud>, |dd>} where the first arrow is qubit 1 and u/d denote spin
up/down.  Qubit 1 is therefore the fast-varying index, so single-qubit
operators embed as ``kron(I, a)`` for qubit 1 and ``kron(a, I)`` for qubit 2.
Spin operators are sigma/2 (eigenvalues +-1/2); dephasing collapse operators
use the full sigma_z.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, ValidationError
from .linalg import kron

TWO_PI = 2.0 * math.pi

# Pauli matrices and single-qubit identity.
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
IDENTITY4 = np.eye(4, dtype=complex)


def qubit1_op(a: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator acting on qubit 1 (fast index)."""
    return kron(IDENTITY2, a)


def qubit2_op(a: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator acting on qubit 2 (slow index)."""
    return kron(a, IDENTITY2)


# Spin operators S = sigma/2 embedded in the two-qubit space.
SX1 = qubit1_op(SIGMA_X / 2)
SY1 = qubit1_op(SIGMA_Y / 2)
SZ1 = qubit1_op(SIGMA_Z / 2)
SX2 = qubit2_op(SIGMA_X / 2)
SY2 = qubit2_op(SIGMA_Y / 2)
SZ2 = qubit2_op(SIGMA_Z / 2)

ZZ = SZ1 @ SZ2
XX_PLUS_YY = SX1 @ SX2 + SY1 @ SY2
XY_MINUS_YX = SX1 @ SY2 - SY1 @ SX2

# Full-sigma_z dephasing collapse operators.
COLLAPSE_Z1 = qubit1_op(SIGMA_Z)
COLLAPSE_Z2 = qubit2_op(SIGMA_Z)


@dataclass(frozen=True)
class ExchangeVoltageModel:
    """Exponential barrier-voltage dependence J(v) = j0 * exp(2 * alpha * v).

    j0 is the residual exchange at v = 0 (rad/s) and alpha the lever arm
    (1/volt).
    """

    j0: float
    alpha: float

    def __post_init__(self):
        if not (self.j0 > 0):
            raise ValidationError("residual exchange j0 must be positive")
        if not (self.alpha > 0):
            raise ValidationError("lever arm alpha must be positive")


def exchange_from_voltage(model: ExchangeVoltageModel, v) -> float | np.ndarray:
    """Exchange strength at barrier voltage ``v``."""
    return model.j0 * np.exp(2.0 * model.alpha * np.asarray(v, dtype=float))


def voltage_for_exchange(model: ExchangeVoltageModel, j) -> float | np.ndarray:
    """Voltage producing exchange ``j``; values below j0 clamp to v = 0."""
    j = np.asarray(j, dtype=float)
    if np.any(j <= 0):
        raise DomainError("exchange must be positive to invert J(v)")
    v = np.log(np.maximum(j, model.j0) / model.j0) / (2.0 * model.alpha)
    return float(v) if v.ndim == 0 else v


@dataclass(frozen=True)
class SystemParams:
    """Device constants for the exchange-coupled two-qubit system.

    bz1, bz2: qubit Zeeman energies (rad/s); j_max: maximum exchange (rad/s);
    t2_echo: echo-limited dephasing time (s).
    """

    bz1: float
    bz2: float
    j_max: float
    t2_echo: float
    exchange_model: ExchangeVoltageModel = field(
        default_factory=lambda: ExchangeVoltageModel(j0=TWO_PI * 10e3, alpha=1.0)
    )

    def __post_init__(self):
        if self.bz1 == self.bz2:
            raise ValidationError("qubits must have distinct Zeeman energies")
        if not (self.t2_echo > 0):
            raise ValidationError("t2_echo must be positive")
        if self.j_max > 0.2 * abs(self.delta_ez):
            warnings.warn(
                "j_max exceeds 0.2*|delta_ez|; weak-exchange assumptions degrade",
                stacklevel=2,
            )

    @property
    def delta_ez(self) -> float:
        """Zeeman energy difference bz1 - bz2 (rad/s)."""
        return self.bz1 - self.bz2

    @property
    def e_avg(self) -> float:
        """Average Zeeman energy (rad/s)."""
        return 0.5 * (self.bz1 + self.bz2)

    @classmethod
    def default(cls) -> "SystemParams":
        """Realistic device defaults: E_avg/2pi = 17 GHz, dEz/2pi = 0.3 GHz,
        J_max/2pi = 15 MHz, T2_echo = 20 us, J0/2pi = 10 kHz."""
        e_avg = TWO_PI * 17e9
        dez = TWO_PI * 0.3e9
        return cls(
            bz1=e_avg + dez / 2,
            bz2=e_avg - dez / 2,
            j_max=TWO_PI * 15e6,
            t2_echo=20e-6,
        )


@dataclass(frozen=True)
class DriveSettings:
    """Microwave drive amplitudes, phases, and carrier frequencies.

    Amplitudes are signed (composite segments flip the sign).  Phases default
    to -pi/2 and carriers to exact resonance (freq_k = bz_k); pass None to keep
    the resonant default.
    """

    omega1: float
    omega2: float
    phase1: float = -math.pi / 2
    phase2: float = -math.pi / 2
    freq1: float | None = None
    freq2: float | None = None

    def resolved_freqs(self, params: SystemParams) -> tuple[float, float]:
        f1 = params.bz1 if self.freq1 is None else self.freq1
        f2 = params.bz2 if self.freq2 is None else self.freq2
        return f1, f2


@dataclass(frozen=True)
class ErrorRealization:
    """One concrete draw of all quasi-static errors.

    delta1/delta2: Zeeman shifts (rad/s); delta_j: exchange shift (rad/s);
    eps1/eps2: relative drive-amplitude errors; eps_v: relative voltage error;
    dtau1/dtau2: relative timing errors on the corrected-sequence durations;
    weight: quadrature or Monte-Carlo averaging weight.
    """

    delta1: float = 0.0
    delta2: float = 0.0
    delta_j: float = 0.0
    eps1: float = 0.0
    eps2: float = 0.0
    eps_v: float = 0.0
    dtau1: float = 0.0
    dtau2: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        fields = (self.delta1, self.delta2, self.delta_j, self.eps1, self.eps2,
                  self.eps_v, self.dtau1, self.dtau2, self.weight)
        if not all(math.isfinite(x) for x in fields):
            raise ValidationError("error realization fields must be finite")
        if self.weight < 0:
            raise ValidationError("weight must be non-negative")

    def with_noise(self, delta1=None, delta2=None, delta_j=None, weight=None):
        """Copy with the quasi-static noise fields replaced."""
        return replace(
            self,
            delta1=self.delta1 if delta1 is None else delta1,
            delta2=self.delta2 if delta2 is None else delta2,
            delta_j=self.delta_j if delta_j is None else delta_j,
            weight=self.weight if weight is None else weight,
        )


NO_ERRORS = ErrorRealization()


def _drive_axis_angle(phase: float) -> float:
    # Rotating-frame drive axis: phase -pi/2 drives along +x.
    return phase + math.pi / 2


def h_rwa_total(
    params: SystemParams,
    drives: DriveSettings,
    j: float,
    err: ErrorRealization = NO_ERRORS,
) -> np.ndarray:
    """Rotating-frame Hamiltonian: Zeeman noise + resonant drives + ZZ exchange.

    Amplitude errors scale the drives as (1 + eps_k) * omega_k and delta_j
    shifts the exchange.  Only exactly resonant carriers are supported here;
    detuned drives make the rotating-frame Hamiltonian time dependent and are
    handled by h_interaction_full.
    """
    f1, f2 = drives.resolved_freqs(params)
    if f1 != params.bz1 or f2 != params.bz2:
        raise ValidationError("h_rwa_total requires resonant carriers")
    o1 = (1.0 + err.eps1) * drives.omega1
    o2 = (1.0 + err.eps2) * drives.omega2
    xi1 = _drive_axis_angle(drives.phase1)
    xi2 = _drive_axis_angle(drives.phase2)
    h = (
        err.delta1 * SZ1
        + err.delta2 * SZ2
        + o1 * (math.cos(xi1) * SX1 + math.sin(xi1) * SY1)
        + o2 * (math.cos(xi2) * SX2 + math.sin(xi2) * SY2)
        + (j + err.delta_j) * ZZ
    )
    return h


def h_conventional_rwa(
    j_dc: float, j_ac: float, err: ErrorRealization = NO_ERRORS
) -> np.ndarray:
    """Rotating-frame Hamiltonian of the resonant ac-exchange scheme.

    The dc bias keeps the ZZ part; the resonant ac component survives as the
    flip-flop coupling (j_ac / 2)(SxSx + SySy).
    """
    if j_dc < 0 or j_ac < 0:
        raise ValidationError("j_dc and j_ac must be non-negative")
    return (
        err.delta1 * SZ1
        + err.delta2 * SZ2
        + j_dc * ZZ
        + 0.5 * j_ac * XX_PLUS_YY
    )


def dressed_transform() -> np.ndarray:
    """Unitary mapping the computational basis to the dressed basis.

    S = exp[-i pi (Sy1 + Sy2) / 2]; per qubit |u> -> (|u> + |d>)/sqrt(2).
    Conjugating as S† H S sends sigma_x -> sigma_z, sigma_z -> -sigma_x.
    """
    s = np.array([[1, -1], [1, 1]], dtype=complex) / math.sqrt(2)
    return kron(s, s)


def h_dressed_ideal(
    omega: float, j: float, z_conjugated: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Ideal dressed-frame blocks for symmetric driving and zero noise.

    Returns the 2x2 blocks acting on the even subspace span{|++>, |-->}
    (gapped by the drive) and the odd subspace span{|-+>, |+->} (hosting the
    swap transition).  ``z_conjugated`` flips the sign of the even-block
    coupling, which is what the dressed Z_{+-pi/2} pair accomplishes.
    """
    sign = -1.0 if z_conjugated else 1.0
    s1 = np.array([[omega, sign * j / 4], [sign * j / 4, -omega]], dtype=complex)
    s2 = np.array([[0.0, j / 4], [j / 4, 0.0]], dtype=complex)
    return s1, s2


# Dressed-basis index layout: the even (drive-gapped) subspace occupies
# indices {0, 3} and the odd (swap) subspace indices {1, 2}.
S1_INDICES = (0, 3)
S2_INDICES = (1, 2)


def dressed_direct_sum(s1_block: np.ndarray, s2_block: np.ndarray) -> np.ndarray:
    """Assemble a 4x4 dressed-frame matrix from its subspace blocks."""
    h = np.zeros((4, 4), dtype=complex)
    for a, ia in enumerate(S1_INDICES):
        for b, ib in enumerate(S1_INDICES):
            h[ia, ib] = s1_block[a, b]
    for a, ia in enumerate(S2_INDICES):
        for b, ib in enumerate(S2_INDICES):
            h[ia, ib] = s2_block[a, b]
    return h


def h_interaction_full(
    t: float,
    params: SystemParams,
    drives: DriveSettings,
    j_of_t,
    err: ErrorRealization = NO_ERRORS,
) -> np.ndarray:
    """Interaction-picture Hamiltonian retaining all counter-rotating terms.

    ``j_of_t`` is either a constant (rad/s) or a callable t -> J(t).  The
    drive on qubit k contributes a co-rotating part at detuning freq_k - bz_k
    and a counter-rotating part at freq_k + bz_k; at resonance with the
    default phase the two are in phase at t = 0.  The exchange keeps its ZZ
    part plus the flip-flop term oscillating at exactly delta_ez.
    """
    if t < 0:
        raise ValidationError("time must be non-negative")
    jt = float(j_of_t(t)) if callable(j_of_t) else float(j_of_t)
    jt += err.delta_j
    f1, f2 = drives.resolved_freqs(params)
    h = err.delta1 * SZ1 + err.delta2 * SZ2 + jt * ZZ
    theta = params.delta_ez * t
    h = h + jt * (math.cos(theta) * XX_PLUS_YY + math.sin(theta) * XY_MINUS_YX)
    for omega, phase, freq, bz, sxk, syk in (
        ((1 + err.eps1) * drives.omega1, drives.phase1, f1, params.bz1, SX1, SY1),
        ((1 + err.eps2) * drives.omega2, drives.phase2, f2, params.bz2, SX2, SY2),
    ):
        if omega == 0.0:
            continue
        xi = _drive_axis_angle(phase)
        co = (freq - bz) * t + xi
        counter = (freq + bz) * t + xi
        h = h + omega * (
            math.cos(co) * sxk + math.sin(co) * syk
            + math.cos(counter) * sxk - math.sin(counter) * syk
        )
    return h


def bessel_i(k: int, x: float) -> float:
    """Modified Bessel function of the first kind I_k(x) by power series.

    Valid for |x| <= 30 (series convergence budget at double precision).
    """
    if k < 0 or int(k) != k:
        raise DomainError("order k must be a non-negative integer")
    if abs(x) > 30.0:
        raise DomainError("bessel_i series supports |x| <= 30")
    k = int(k)
    half = 0.5 * x
    # term_m = (x/2)^(2m+k) / (m! (m+k)!), built by recurrence.
    term = half**k / math.factorial(k)
    total = term
    m = 1
    while True:
        term *= half * half / (m * (m + k))
        total += term
        if abs(term) <= 1e-17 * max(abs(total), 1e-300) or m > 200:
            break
        m += 1
    return total


def harmonic_decomposition(
    model: ExchangeVoltageModel, v0: float, v1: float, k_max: int
) -> list[tuple[int, float]]:
    """Harmonics of J(t) under sinusoidal voltage drive v(t) = v0 + v1 cos(wt).

    Returns (k, coefficient) for k in [-k_max, k_max]; coefficient(k) =
    j0 * exp(2 alpha v0) * I_k(2 alpha v1), an even real spectrum.
    """
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    base = model.j0 * math.exp(2.0 * model.alpha * v0)
    z = 2.0 * model.alpha * v1
    out = []
    for k in range(-k_max, k_max + 1):
        out.append((k, base * bessel_i(abs(k), z)))
    return out


def ideal_conventional_waveform(j_dc: float, j_ac: float, omega_mod: float):
    """Target sinusoidal exchange waveform J(t) = j_dc + j_ac cos(omega t)."""

    def j_of_t(t):
        return j_dc + j_ac * np.cos(omega_mod * np.asarray(t, dtype=float))

    return j_of_t


def voltage_conventional_waveform(
    model: ExchangeVoltageModel,
    j_dc: float,
    j_ac: float,
    omega_mod: float,
    eps_v: float,
):
    """Exchange waveform actually produced through the voltage model.

    The target waveform is inverted to a voltage profile (clamped at v >= 0,
    i.e. J >= j0, where the target dips below the residual exchange), the
    voltage is scaled by (1 + eps_v), and mapped back through J(v).  The
    result is j0 * (J_clamped(t)/j0)^(1+eps_v), independent of the lever arm.
    """

    def j_of_t(t):
        ideal = j_dc + j_ac * np.cos(omega_mod * np.asarray(t, dtype=float))
        clamped = np.maximum(ideal, model.j0)
        return model.j0 * (clamped / model.j0) ** (1.0 + eps_v)

    return j_of_t


def max_relative_exchange_error(
    model: ExchangeVoltageModel,
    j_dc: float,
    j_ac: float,
    eps_v: float,
    samples: int = 4096,
) -> float:
    """max over one period of |J_actual - J_target| / J_target.

    J_target is the clamped ideal waveform (the error vanishes at the clamp
    point v = 0 and peaks where the voltage excursion is largest).
    """
    theta = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    target = np.maximum(j_dc + j_ac * np.cos(theta), model.j0)
    actual = model.j0 * (target / model.j0) ** (1.0 + eps_v)
    return float(np.max(np.abs(actual - target) / target))
