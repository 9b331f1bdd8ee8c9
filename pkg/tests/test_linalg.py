import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from iswapsim import linalg
from iswapsim.errors import DimensionError, NotPSDError, ValidationError

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng, n):
    m = random_complex(rng, n)
    return 0.5 * (m + m.conj().T)


# --- kron -------------------------------------------------------------------

def test_kron_identity():
    assert np.array_equal(linalg.kron(I2, I2), I4)


def test_kron_sz_product_diagonal():
    got = linalg.kron(SZ / 2, SZ / 2)
    assert np.allclose(got, np.diag([0.25, -0.25, -0.25, 0.25]))


def test_kron_bit_flip_action():
    up_up = np.array([1, 0, 0, 0], dtype=complex)
    down_down = np.array([0, 0, 0, 1], dtype=complex)
    assert np.allclose(linalg.kron(SX, SX) @ up_up, down_down)


def test_kron_rejects_non_square():
    with pytest.raises(DimensionError):
        linalg.kron(np.ones((2, 3)), I2)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_kron_mixed_product_property(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = (random_complex(rng, 2) for _ in range(4))
    lhs = linalg.kron(a, b) @ linalg.kron(c, d)
    rhs = linalg.kron(a @ c, b @ d)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * max(np.linalg.norm(lhs), 1.0)


# --- Hermitian eigendecomposition ------------------------------------------

@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
@settings(max_examples=25, deadline=None)
def test_eig_hermitian_reconstruction(seed, n):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, n)
    eig = linalg.eig_hermitian(h)
    v, w = eig.eigenvectors, eig.eigenvalues
    assert np.all(np.diff(w) >= -1e-12)
    scale = max(np.linalg.norm(h), 1.0)
    assert np.linalg.norm((v * w) @ v.conj().T - h) <= 1e-12 * scale
    assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-12


def test_eig_hermitian_rejects_non_hermitian():
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(ValidationError):
        linalg.eig_hermitian(m)


# --- matrix exponential ------------------------------------------------------

def test_expm_zero_generator():
    assert np.allclose(linalg.expm_hermitian_prop(np.zeros((4, 4)), 1e-6), I4)


def test_expm_pi_rotation_about_x():
    omega = 2 * np.pi * 10e6
    u = linalg.expm_hermitian_prop(omega * SX / 2, np.pi / omega)
    assert np.linalg.norm(u - (-1j) * SX) <= 1e-12


def test_expm_swap_block_quarter_period():
    # the coupled two-level block produces the off-diagonal -i swap after a
    # full period 2*pi/J of the J/4 coupling
    j = 2 * np.pi * 15e6
    block = np.array([[0, j / 4], [j / 4, 0]], dtype=complex)
    u = linalg.expm_hermitian_prop(block, 2 * np.pi / j)
    assert np.linalg.norm(u - np.array([[0, -1j], [-1j, 0]])) <= 1e-11


@given(st.integers(0, 2**32 - 1), st.floats(-1e-6, 1e-6))
@settings(max_examples=30, deadline=None)
def test_expm_unitarity_and_spectrum(seed, t):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, 4) * 1e7
    u = linalg.expm_hermitian_prop(h, t)
    assert np.linalg.norm(u.conj().T @ u - I4) <= 1e-11
    assert np.max(np.abs(np.abs(np.linalg.eigvals(u)) - 1.0)) <= 1e-11


def test_expm_rejects_infinite_time():
    with pytest.raises(ValidationError):
        linalg.expm_hermitian_prop(np.eye(2), np.inf)


# --- psd sqrt ----------------------------------------------------------------

def test_psd_sqrt_identity():
    assert np.allclose(linalg.psd_sqrt(I4), I4)


def test_psd_sqrt_diagonal():
    assert np.allclose(linalg.psd_sqrt(np.diag([4.0, 1.0, 0.0, 0.0])), np.diag([2.0, 1.0, 0.0, 0.0]))


def test_psd_sqrt_maximally_mixed():
    assert np.allclose(linalg.psd_sqrt(I4 / 4), I4 / 2)


def test_psd_sqrt_clamps_tiny_negative():
    m = np.diag([1.0, -5e-11, 0.5, 0.0])
    r = linalg.psd_sqrt(m)
    assert r[1, 1] == 0.0


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPSDError):
        linalg.psd_sqrt(np.diag([1.0, -1e-6, 1.0, 1.0]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_psd_sqrt_squares_back(seed):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, 4)
    m = a @ a.conj().T
    r = linalg.psd_sqrt(m)
    assert np.linalg.norm(r @ r - m) <= 1e-9 * max(np.linalg.norm(m), 1.0)


# --- phase-minimized distance -------------------------------------------------

def test_phase_min_distance_global_phase():
    rng = np.random.default_rng(7)
    h = random_hermitian(rng, 4)
    u = linalg.expm_hermitian_prop(h, 1.0)
    assert linalg.phase_min_distance(u, np.exp(0.37j) * u) <= 1e-12


def test_phase_min_distance_orthogonal():
    d = linalg.phase_min_distance(I2, SX)
    assert d == pytest.approx(2.0)
