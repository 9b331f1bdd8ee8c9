"""Dense complex linear algebra for small (d <= 16) operator matrices.

Everything works on plain ``complex128`` numpy arrays.  Propagated generators
are Hermitian and tiny, so matrix exponentials go through an eigendecomposition
(exact and unitary by construction) rather than scaling-and-squaring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotPSDError, ValidationError

# Relative Frobenius tolerance accepted before an input counts as non-Hermitian.
HERMITICITY_TOL = 1e-10


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValidationError(f"{name} contains non-finite entries")
    return m


def hermiticity_defect(m: np.ndarray) -> float:
    """Relative Frobenius distance of ``m`` from its Hermitian part."""
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(m - dagger(m)) / scale)


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (m + m†)/2."""
    return 0.5 * (m + dagger(m))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices (standard ordering)."""
    a = require_square(a, "a")
    b = require_square(b, "b")
    return np.kron(a, b)


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` ascend; ``eigenvectors`` holds the matching orthonormal
    eigenvectors as columns, so V diag(w) V† reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eig_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> HermitianEig:
    """Eigendecomposition after validating and symmetrizing the input."""
    m = require_square(m)
    if hermiticity_defect(m) > tol:
        raise ValidationError(
            f"matrix is not Hermitian (relative defect {hermiticity_defect(m):.3e} > {tol:.0e})"
        )
    w, v = np.linalg.eigh(symmetrize(m))
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def expm_hermitian_prop(h: np.ndarray, t: float) -> np.ndarray:
    """Propagator exp(-i h t) of a Hermitian generator ``h`` over time ``t``.

    Unitary by construction: U = V exp(-i w t) V†.
    """
    if not np.isfinite(t):
        raise ValidationError("propagation time must be finite")
    eig = eig_hermitian(h)
    phases = np.exp(-1j * eig.eigenvalues * t)
    v = eig.eigenvectors
    return (v * phases) @ dagger(v)


def psd_sqrt(m: np.ndarray, neg_tol: float = 1e-10) -> np.ndarray:
    """Square root of a Hermitian PSD matrix.

    Eigenvalues in [-neg_tol, 0) are clamped to zero; anything below raises.
    """
    eig = eig_hermitian(m)
    w = eig.eigenvalues.copy()
    if w.min() < -neg_tol:
        raise NotPSDError(f"matrix is not PSD (min eigenvalue {w.min():.3e})")
    np.clip(w, 0.0, None, out=w)
    v = eig.eigenvectors
    return (v * np.sqrt(w)) @ dagger(v)


def phase_min_distance(u: np.ndarray, v: np.ndarray) -> float:
    """min over phi of ||u - e^{i phi} v||_F for same-shape square matrices."""
    u = require_square(u, "u")
    v = require_square(v, "v")
    if u.shape != v.shape:
        raise DimensionError(f"shape mismatch {u.shape} vs {v.shape}")
    overlap = abs(np.trace(dagger(v) @ u))
    d2 = np.linalg.norm(u) ** 2 + np.linalg.norm(v) ** 2 - 2.0 * overlap
    return float(np.sqrt(max(d2, 0.0)))
