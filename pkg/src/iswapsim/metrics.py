"""State fidelity and ensemble-averaged gate fidelity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .linalg import dagger, hermiticity_defect, psd_sqrt

_KET0 = np.array([1.0, 0.0], dtype=complex)
_KET1 = np.array([0.0, 1.0], dtype=complex)
_SINGLE_QUBIT_STABILIZERS = [
    _KET0,
    _KET1,
    (_KET0 + _KET1) / np.sqrt(2),
    (_KET0 - _KET1) / np.sqrt(2),
    (_KET0 + 1j * _KET1) / np.sqrt(2),
    (_KET0 - 1j * _KET1) / np.sqrt(2),
]


@dataclass(frozen=True)
class InputEnsemble:
    """Equal-weight input states for gate-fidelity averaging.

    ``states`` stacks density matrices (N, 4, 4); ``pure_kets`` carries the
    state vectors (N, 4) when every member is pure, enabling the fast path
    sqrt(<psi| rho |psi>).
    """

    states: np.ndarray
    pure_kets: np.ndarray | None = None

    def __len__(self):
        return self.states.shape[0]


def stabilizer_product_ensemble() -> InputEnsemble:
    """The 36 two-qubit products of the six single-qubit stabilizer states.

    This set is closed under the dressing transform, so averaged fidelities
    agree between the dressed and bare frames.
    """
    kets = []
    for k1 in _SINGLE_QUBIT_STABILIZERS:
        for k2 in _SINGLE_QUBIT_STABILIZERS:
            kets.append(np.kron(k2, k1))  # qubit 1 is the fast index
    kets = np.array(kets)
    states = np.einsum("ni,nj->nij", kets, kets.conj())
    return InputEnsemble(states=states, pure_kets=kets)


_DEFAULT_ENSEMBLE = stabilizer_product_ensemble()


def default_ensemble() -> InputEnsemble:
    return _DEFAULT_ENSEMBLE


def _check_density(rho: np.ndarray, name: str) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-1] != rho.shape[-2]:
        raise ValidationError(f"{name} must be square")
    if hermiticity_defect(rho) > 1e-8:
        raise ValidationError(f"{name} is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValidationError(f"{name} must have unit trace")
    if np.linalg.eigvalsh(0.5 * (rho + dagger(rho))).min() < -1e-8:
        raise ValidationError(f"{name} is not positive semidefinite")
    return 0.5 * (rho + dagger(rho))


def state_fidelity(rho_t: np.ndarray, rho_ideal: np.ndarray) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho_t) rho_ideal sqrt(rho_t)).

    Symmetric in its arguments; reduces to |<psi|phi>| for pure states.
    """
    rho_t = _check_density(rho_t, "rho_t")
    rho_ideal = _check_density(rho_ideal, "rho_ideal")
    root = psd_sqrt(rho_t, neg_tol=1e-8)
    inner = root @ rho_ideal @ root
    w = np.linalg.eigvalsh(0.5 * (inner + dagger(inner)))
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    return min(f, 1.0)


def infidelity(f: float) -> float:
    """1 - f for a fidelity in [0, 1]."""
    if not (0.0 <= f <= 1.0):
        raise DomainError(f"fidelity must lie in [0, 1], got {f}")
    return 1.0 - f


def average_gate_fidelity(
    apply,
    target: np.ndarray,
    ensemble: InputEnsemble | None = None,
) -> float:
    """Mean state fidelity of a channel against a target unitary.

    ``apply`` maps an input density matrix to the channel output; the target's
    global phase is irrelevant.  For pure ensemble members the per-state
    fidelity is evaluated as sqrt(<psi_ideal| rho_out |psi_ideal>), which
    equals the Uhlmann fidelity when one argument is pure.
    """
    ensemble = ensemble if ensemble is not None else default_ensemble()
    target = np.asarray(target, dtype=complex)
    defect = float(np.max(np.abs(dagger(target) @ target - np.eye(target.shape[0]))))
    if defect > 1e-8:
        raise ValidationError(f"target is not unitary (defect {defect:.2e})")
    if ensemble.pure_kets is not None:
        ideal = ensemble.pure_kets @ target.T
        total = 0.0
        for psi, rho0 in zip(ideal, ensemble.states):
            rho_out = apply(rho0)
            total += np.sqrt(max(float(np.real(psi.conj() @ rho_out @ psi)), 0.0))
        return min(total / len(ensemble), 1.0)
    total = 0.0
    for rho0 in ensemble.states:
        rho_ideal = target @ rho0 @ dagger(target)
        total += state_fidelity(apply(rho0), rho_ideal)
    return min(total / len(ensemble), 1.0)


def unitary_channel(u: np.ndarray):
    """Channel evaluator rho -> U rho U†."""
    ud = dagger(u)
    return lambda rho: u @ rho @ ud


def superop_channel(phi: np.ndarray):
    """Channel evaluator for a 16x16 superoperator in row-major vec."""

    def apply(rho):
        return (phi @ np.asarray(rho, dtype=complex).reshape(16)).reshape(4, 4)

    return apply
