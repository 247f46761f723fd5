import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import haar, random_density
from luequiv.errors import DimensionMismatch, LengthMismatch, NonFiniteEntries, NotHermitian, NotPositive, ZeroTrace
from luequiv.state import (
    degeneracy_profile,
    partial_trace,
    spectra_match,
    spectral_decompose,
    validate_density,
)
from luequiv.verdict import edge_matrix


def test_maximally_mixed_is_valid():
    rho = validate_density(np.eye(4) / 4, 2, 2)
    np.testing.assert_allclose(spectral_decompose(rho).eigenvalues, [0.25] * 4, atol=1e-15)


def test_edge_matrix_normalizes():
    a, b, c = 0.3, 0.7, 1.9
    m = edge_matrix(a, b, c)
    # direct evaluation: PSD and the raw trace
    assert np.linalg.eigvalsh(m).min() > -1e-12
    rho = validate_density(m, 2, 4)
    assert rho.original_trace == pytest.approx(2 + a + b + c + 1 / a + 1 / b + 1 / c, rel=1e-14)
    assert np.trace(rho.mat).real == pytest.approx(1.0, abs=1e-14)


def test_asymmetric_matrix_rejected():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 1.0
    with pytest.raises(NotHermitian):
        validate_density(m, 2, 2)


def test_negative_eigenvalue_reported():
    with pytest.raises(NotPositive) as exc:
        validate_density(np.diag([1.0, 0.5, 0.2, -0.1]), 2, 2)
    assert exc.value.min_eigenvalue == pytest.approx(-0.1)


def test_zero_trace_and_shape_errors():
    with pytest.raises(ZeroTrace):
        validate_density(np.zeros((4, 4)), 2, 2)
    with pytest.raises(DimensionMismatch):
        validate_density(np.eye(6) / 6, 2, 2)
    with pytest.raises(DimensionMismatch):
        validate_density(np.eye(2) / 2, 1, 2)
    bad = np.eye(4) / 4
    bad[0, 0] = np.nan
    with pytest.raises(NonFiniteEntries):
        validate_density(bad, 2, 2)


def test_diagonal_state_decomposes_trivially():
    rho = validate_density(np.diag([0.5, 0.3, 0.15, 0.05]), 2, 2)
    sd = spectral_decompose(rho)
    np.testing.assert_allclose(sd.eigenvalues, [0.5, 0.3, 0.15, 0.05], atol=1e-15)
    np.testing.assert_allclose(sd.basis, np.eye(4), atol=1e-15)


def test_edge_spectrum_matches_closed_form():
    a, b, c = 0.3, 0.7, 1.9
    rho = validate_density(edge_matrix(a, b, c), 2, 4)
    expected = np.sort([2, 0, a, 1 / a, b, 1 / b, c, 1 / c])[::-1] / rho.original_trace
    np.testing.assert_allclose(spectral_decompose(rho).eigenvalues, expected, atol=1e-14)
    assert degeneracy_profile(expected).is_nondegenerate


@pytest.mark.parametrize("K,dims", [(4, (2, 2)), (6, (2, 3)), (9, (3, 3)), (16, (4, 4))])
def test_reconstruction_and_unitarity(K, dims, rng):
    rho = validate_density(random_density(K, rng), *dims)
    sd = spectral_decompose(rho)
    X = sd.basis
    recon = X @ np.diag(sd.eigenvalues) @ X.conj().T
    assert np.linalg.norm(rho.mat - recon) <= 1e-10 * np.linalg.norm(rho.mat)
    assert np.linalg.norm(X.conj().T @ X - np.eye(K)) <= 1e-10 * K
    assert np.all(np.diff(sd.eigenvalues) <= 0)
    # phase convention: largest-modulus entry of each column is real and >= 0
    lead = X[np.argmax(np.abs(X), axis=0), np.arange(K)]
    assert np.all(np.abs(lead.imag) < 1e-15) and np.all(lead.real >= 0)


def test_decomposition_is_deterministic(rng):
    rho = validate_density(random_density(6, rng), 2, 3)
    a, b = spectral_decompose(rho), spectral_decompose(rho)
    assert np.array_equal(a.basis, b.basis) and np.array_equal(a.eigenvalues, b.eigenvalues)


def test_tie_break_orders_degenerate_block():
    rho = validate_density(np.diag([0.4, 0.2, 0.2, 0.2]), 2, 2)
    lex = spectral_decompose(rho).basis
    rev = spectral_decompose(rho, tie_break="reverse").basis
    np.testing.assert_array_equal(lex[:, 0], rev[:, 0])
    np.testing.assert_array_equal(lex[:, 1:], rev[:, :0:-1])
    for X in (lex, rev):
        recon = X @ np.diag([0.4, 0.2, 0.2, 0.2]) @ X.conj().T
        assert np.linalg.norm(recon - rho.mat) < 1e-14


def test_spectra_match_examples():
    assert spectra_match([0.5, 0.5], [0.5, 0.5])
    assert not spectra_match([0.6, 0.4], [0.5, 0.5])
    with pytest.raises(LengthMismatch):
        spectra_match([1.0], [0.5, 0.5])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), M=st.integers(2, 3), N=st.integers(2, 4))
def test_local_conjugation_preserves_spectrum(seed, M, N):
    rng = np.random.default_rng(seed)
    rho = validate_density(random_density(M * N, rng), M, N)
    W = np.kron(haar(M, rng), haar(N, rng))
    rho_p = validate_density(W @ rho.mat @ W.conj().T, M, N)
    assert spectra_match(spectral_decompose(rho).eigenvalues, spectral_decompose(rho_p).eigenvalues, 1e-9)


def test_degeneracy_profile_examples():
    p = degeneracy_profile([0.5, 0.3, 0.2], 1e-8)
    assert p.counts == (1, 1, 1) and p.is_nondegenerate
    p = degeneracy_profile([0.4, 0.4, 0.2])
    assert p.counts == (2, 1) and not p.is_nondegenerate
    assert sum(degeneracy_profile([0.25] * 4).counts) == 4


def test_partial_trace_of_product_state(rng):
    ra = random_density(2, rng)
    rb = random_density(3, rng)
    rho = validate_density(np.kron(ra, rb), 2, 3)
    np.testing.assert_allclose(partial_trace(rho, "A"), ra, atol=1e-15)
    np.testing.assert_allclose(partial_trace(rho, "B"), rb, atol=1e-15)


def test_partial_trace_of_maximally_mixed():
    rho = validate_density(np.eye(6) / 6, 2, 3)
    np.testing.assert_allclose(partial_trace(rho, "B"), np.eye(3) / 3, atol=1e-16)
    with pytest.raises(ValueError):
        partial_trace(rho, "C")


def test_partial_trace_brute_force(rng):
    M, N = 3, 2
    rho = validate_density(random_density(M * N, rng), M, N)
    # explicit sums over the traced index
    ra = np.zeros((M, M), complex)
    rb = np.zeros((N, N), complex)
    for i in range(M):
        for j in range(M):
            ra[i, j] = sum(rho.mat[i * N + r, j * N + r] for r in range(N))
    for r in range(N):
        for s in range(N):
            rb[r, s] = sum(rho.mat[i * N + r, i * N + s] for i in range(M))
    np.testing.assert_allclose(partial_trace(rho, "A"), ra, atol=1e-15)
    np.testing.assert_allclose(partial_trace(rho, "B"), rb, atol=1e-15)
    for red in (ra, rb):
        assert abs(np.trace(red) - 1) < 1e-12
        assert np.linalg.eigvalsh(red).min() > -1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(0, 1), beta=st.floats(0, 1))
def test_partial_trace_is_linear(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    s1, s2 = random_density(6, rng), random_density(6, rng)
    for keep in "AB":
        lhs = partial_trace(alpha * s1 + beta * s2, keep, dims=(2, 3))
        rhs = alpha * partial_trace(s1, keep, dims=(2, 3)) + beta * partial_trace(s2, keep, dims=(2, 3))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12
