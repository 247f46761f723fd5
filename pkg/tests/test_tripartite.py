import numpy as np
import pytest

from conftest import haar
from luequiv.errors import DimensionMismatch
from luequiv.state import partial_trace
from luequiv.tripartite import (
    PureTripartite,
    apply_local,
    cut,
    decide_pure_tripartite,
    marginal,
    random_pure_tripartite,
    reduced_bc,
    triple_residual,
)
from luequiv.verdict import Equivalent, NotEquivalent, ReducedSpectrumMismatch

GHZ = PureTripartite.normalized([1, 0, 0, 0, 0, 0, 0, 1], (2, 2, 2))
W_STATE = PureTripartite.normalized([0, 1, 1, 0, 1, 0, 0, 0], (2, 2, 2))


def test_product_state_cut_is_pure_product():
    e0 = np.zeros(8, complex)
    e0[0] = 1
    rho = cut(PureTripartite(e0, (2, 2, 2)), "A|BC")
    assert rho.dims == (2, 4)
    np.testing.assert_allclose(partial_trace(rho, "A"), np.diag([1, 0]), atol=1e-15)


def test_ghz_cut_has_maximally_mixed_marginal():
    for which in ("A|BC", "AB|C", "AC|B"):
        rho = cut(GHZ, which)
        assert np.linalg.matrix_rank(rho.mat, tol=1e-12) == 1
        small = "A" if rho.dim_a == 2 else "B"
        lam = np.linalg.eigvalsh(partial_trace(rho, small))
        np.testing.assert_allclose(sorted(lam)[-2:], [0.5, 0.5], atol=1e-14)


def test_ac_b_cut_reindexes_amplitudes(rng):
    psi = random_pure_tripartite((2, 3, 2), rng)
    rho = cut(psi, "AC|B")
    assert rho.dims == (4, 3)
    t = psi.tensor()
    vec = np.array([t[a, b, c] for a in range(2) for c in range(2) for b in range(3)])
    np.testing.assert_allclose(rho.mat, np.outer(vec, vec.conj()), atol=1e-15)
    with pytest.raises(ValueError):
        cut(psi, "B|AC")


def test_marginals_agree_with_partial_traces(rng):
    psi = random_pure_tripartite((2, 3, 2), rng)
    np.testing.assert_allclose(marginal(psi, "A"), partial_trace(cut(psi, "A|BC"), "A"), atol=1e-14)
    np.testing.assert_allclose(marginal(psi, "C"), partial_trace(cut(psi, "AB|C"), "B"), atol=1e-14)
    np.testing.assert_allclose(marginal(psi, "B"), partial_trace(cut(psi, "AC|B"), "B"), atol=1e-14)
    np.testing.assert_allclose(reduced_bc(psi).mat, partial_trace(cut(psi, "A|BC"), "B"), atol=1e-14)


def test_state_validation():
    with pytest.raises(DimensionMismatch):
        PureTripartite(np.ones(6) / np.sqrt(6), (2, 2, 2))
    with pytest.raises(ValueError):
        PureTripartite(np.ones(8), (2, 2, 2))


@pytest.mark.parametrize("dims", [(2, 2, 2), (2, 2, 3), (3, 2, 2)])
def test_locally_rotated_state_is_equivalent(dims, rng):
    psi = random_pure_tripartite(dims, rng)
    us = [haar(d, rng) for d in dims]
    psi_p = apply_local(psi, *us)
    assert triple_residual(psi, psi_p, *us) <= 1e-12
    v = decide_pure_tripartite(psi, psi_p)
    assert isinstance(v, Equivalent)
    w = v.witness
    assert triple_residual(psi, psi_p, w.u_a, w.u_b, w.u_c) <= 1e-7
    for u in (w.u_a, w.u_b, w.u_c):
        np.testing.assert_allclose(u @ u.conj().T, np.eye(len(u)), atol=1e-9)


def test_ghz_and_w_are_not_equivalent():
    v = decide_pure_tripartite(GHZ, W_STATE)
    assert isinstance(v, NotEquivalent)
    assert isinstance(v.certificate, ReducedSpectrumMismatch)


def test_ghz_is_self_equivalent_up_to_local_rotation(rng):
    # degenerate marginals: any verdict but NotEquivalent is acceptable
    psi_p = apply_local(GHZ, haar(2, rng), haar(2, rng), haar(2, rng))
    assert not isinstance(decide_pure_tripartite(GHZ, psi_p), NotEquivalent)


def test_different_dims_raise(rng):
    with pytest.raises(DimensionMismatch):
        decide_pure_tripartite(random_pure_tripartite((2, 2, 2), rng), random_pure_tripartite((2, 2, 3), rng))
