"""End-to-end decision of local unitary equivalence for bipartite states."""
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
from scipy.stats import unitary_group

from .config import SearchConfig, Tolerances
from .errors import DimensionMismatch, NonPositiveParameter
from .phase import (
    build_coset_tensor,
    classify_entries,
    polish,
    search_phases,
    structural_check,
)
from .realign import FactorPair, extract_factors
from .state import (
    BipartiteDensity,
    degeneracy_profile,
    first_spectral_mismatch,
    reduced_spectra,
    spectral_decompose,
    validate_density,
)

DEGENERATE = "degenerate"
SEARCH_EXHAUSTED = "search_exhausted"


@dataclass(frozen=True)
class SpectrumMismatch:
    index: int
    value: float
    value_prime: float
    kind = "spectrum_mismatch"


@dataclass(frozen=True)
class ReducedSpectrumMismatch:
    subsystem: str  # the subsystem whose reduced state is compared
    index: int
    values: tuple  # (lambda_i, lambda'_i)
    kind = "reduced_spectrum_mismatch"


@dataclass(frozen=True)
class StructuralInfeasibility:
    entry: tuple  # (row, col) in the realigned coset
    kind = "structural_infeasibility"


Certificate = Union[SpectrumMismatch, ReducedSpectrumMismatch, StructuralInfeasibility]


@dataclass(frozen=True, eq=False)
class Equivalent:
    witness: object  # FactorPair, or TripleWitness for tripartite inputs
    verification_residual: float
    f_best: float = 0.0
    theta: Optional[np.ndarray] = None
    degenerate: bool = False
    kind = "equivalent"


@dataclass(frozen=True)
class NotEquivalent:
    certificate: Certificate
    kind = "not_equivalent"


@dataclass(frozen=True, eq=False)
class Inconclusive:
    reason: str  # DEGENERATE or SEARCH_EXHAUSTED
    best_f: float
    theta: Optional[np.ndarray] = None
    kind = "inconclusive"


Verdict = Union[Equivalent, NotEquivalent, Inconclusive]


def conjugate(rho, u1, u2):
    W = np.kron(u1, u2)
    mat = rho.mat if isinstance(rho, BipartiteDensity) else np.asarray(rho)
    return W @ mat @ W.conj().T


def verify_witness(rho, rho_p, pair):
    """||rho' - (U1 (x) U2) rho (U1 (x) U2)^H||_F."""
    if isinstance(pair, FactorPair):
        u1, u2 = pair.u1, pair.u2
    else:
        u1, u2 = pair
    mat_p = rho_p.mat if isinstance(rho_p, BipartiteDensity) else np.asarray(rho_p)
    return float(np.linalg.norm(mat_p - conjugate(rho, u1, u2)))


def _reduced_mismatch(rho, rho_p, tol):
    ra, rb = reduced_spectra(rho)
    pa, pb = reduced_spectra(rho_p)
    for sub, x, y in (("A", ra, pa), ("B", rb, pb)):
        i = first_spectral_mismatch(x, y, tol)
        if i is not None:
            return ReducedSpectrumMismatch(sub, i, (float(x[i]), float(y[i])))
    return None


def decide(rho, rho_p, cfg: Optional[SearchConfig] = None, tie_break="lex") -> Verdict:
    """Decide whether rho' = (U1 (x) U2) rho (U1 (x) U2)^H for some unitaries.

    Only exact arguments refute: a spectrum or reduced-spectrum mismatch, or
    a structural obstruction in the phase coset of a non-degenerate pair. A
    phase search that finds a product element yields a verified witness; a
    failed search is reported as Inconclusive, never as NotEquivalent.
    """
    cfg = cfg or SearchConfig()
    tol = cfg.tol
    if rho.dims != rho_p.dims:
        raise DimensionMismatch(f"dims differ: {rho.dims} vs {rho_p.dims}")
    M, N = rho.dims

    sd = spectral_decompose(rho, tie_break=tie_break, tol=tol)
    sd_p = spectral_decompose(rho_p, tie_break=tie_break, tol=tol)
    i = first_spectral_mismatch(sd.eigenvalues, sd_p.eigenvalues, tol.spectra)
    if i is not None:
        return NotEquivalent(
            SpectrumMismatch(i, float(sd.eigenvalues[i]), float(sd_p.eigenvalues[i]))
        )

    degenerate = not degeneracy_profile(sd.eigenvalues, tol.gap).is_nondegenerate
    ct = build_coset_tensor(sd.basis, sd_p.basis, M, N)
    report = structural_check(ct, tol)
    if not report.feasible and not degenerate:
        return NotEquivalent(StructuralInfeasibility(report.certificate))
    cert = _reduced_mismatch(rho, rho_p, tol.spectra)
    if cert is not None:
        return NotEquivalent(cert)
    if not report.feasible:
        # only the diagonal slice is refuted; the degenerate coset is larger
        return Inconclusive(DEGENERATE, float("nan"))

    res = search_phases(ct, cfg)
    if res.f_best <= cfg.rank_tol:
        theta, f = polish(ct, res.theta, cfg)
        pair = witness_from_coset(ct.evaluate(theta), M, N)
        resid = verify_witness(rho, rho_p, pair)
        if resid <= tol.verify:
            return Equivalent(pair, resid, f, theta, degenerate)
    return Inconclusive(DEGENERATE if degenerate else SEARCH_EXHAUSTED, res.f_best, res.theta)


def witness_from_coset(R, M, N):
    """Witness (U1, U2) with rho' = (U1 (x) U2) rho (U1 (x) U2)^H.

    V = X D Y^H carries rho' back onto rho, so the witness is the adjoint of
    the factors read off the realigned coset element ``R``.
    """
    pair = extract_factors(R, M, N)
    return FactorPair(
        pair.u1.conj().T, pair.u2.conj().T,
        pair.decomposition_residual, pair.unitarity_defect,
    )


def revalidate(cert, rho, rho_p, tol: Optional[Tolerances] = None, tie_break="lex"):
    """Re-check a NotEquivalent certificate without the code path that produced it.

    Spectra are recomputed with eigvalsh; structural entries are recomputed
    straight from the eigenvector matrices by their index formula
    ``T_k[j*M+i, s*N+r] = X[i*N+r, k] * conj(Y[j*N+s, k])``.
    """
    tol = tol or Tolerances()
    if isinstance(cert, SpectrumMismatch):
        lam = np.sort(np.linalg.eigvalsh(rho.mat))[::-1]
        lam_p = np.sort(np.linalg.eigvalsh(rho_p.mat))[::-1]
        return bool(abs(lam[cert.index] - lam_p[cert.index]) > tol.spectra)
    if isinstance(cert, ReducedSpectrumMismatch):
        M, N = rho.dims
        if cert.subsystem == "A":
            red = lambda m: np.einsum("irjr->ij", m.reshape(M, N, M, N))  # noqa: E731
        else:
            red = lambda m: np.einsum("iris->rs", m.reshape(M, N, M, N))  # noqa: E731
        a = np.sort(np.linalg.eigvalsh(red(rho.mat)))[::-1]
        b = np.sort(np.linalg.eigvalsh(red(rho_p.mat)))[::-1]
        return bool(abs(a[cert.index] - b[cert.index]) > tol.spectra)
    if isinstance(cert, StructuralInfeasibility):
        M, N = rho.dims
        X = spectral_decompose(rho, tie_break=tie_break, tol=tol).basis
        Y = spectral_decompose(rho_p, tie_break=tie_break, tol=tol).basis
        p, q = cert.entry

        def coeffs(pp, qq):
            j, i = divmod(pp, M)
            s, r = divmod(qq, N)
            return X[i * N + r, :] * Y[j * N + s, :].conj()

        row = np.stack([coeffs(p, qq) for qq in range(N * N)], axis=1)
        col = np.stack([coeffs(pp, q) for pp in range(M * M)], axis=1)
        zero, _ = classify_entries(coeffs(p, q)[:, None, None], tol.struct_zero, tol.struct_margin)
        _, row_nz = classify_entries(row[:, None, :], tol.struct_zero, tol.struct_margin)
        _, col_nz = classify_entries(col[:, :, None], tol.struct_zero, tol.struct_margin)
        return bool(zero.all() and row_nz.any() and col_nz.any())
    raise TypeError(f"unknown certificate {cert!r}")


def haar_unitary(n, rng):
    return unitary_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1), complex)


def gen_lu_pair(M, N, seed, spectrum="simplex", tol: Optional[Tolerances] = None):
    """Random non-degenerate rho, random local unitaries and rho' by conjugation.

    ``spectrum`` is "simplex" (uniform on the probability simplex, redrawn
    until every gap exceeds ten times the degeneracy threshold) or an explicit
    eigenvalue vector. Deterministic in ``seed``.
    """
    tol = tol or Tolerances()
    K = M * N
    if K > 64:
        raise DimensionMismatch("gen_lu_pair supports MN <= 64")
    rng = np.random.default_rng(seed)
    if isinstance(spectrum, str):
        if spectrum != "simplex":
            raise ValueError(f"unknown spectrum policy {spectrum!r}")
        while True:
            lam = np.sort(rng.dirichlet(np.ones(K)))[::-1]
            if np.min(-np.diff(lam)) > 10 * tol.gap:
                break
    else:
        lam = np.asarray(spectrum, dtype=float)
        lam = lam / lam.sum()
    Q = haar_unitary(K, rng)
    mat = (Q * lam[None, :]) @ Q.conj().T
    mat = 0.5 * (mat + mat.conj().T)
    u1 = haar_unitary(M, rng)
    u2 = haar_unitary(N, rng)
    mat_p = conjugate(mat, u1, u2)
    mat_p = 0.5 * (mat_p + mat_p.conj().T)
    return validate_density(mat, M, N, tol), validate_density(mat_p, M, N, tol), u1, u2


def edge_matrix(a, b, c):
    """Unnormalized 8x8 edge-state matrix on C^2 (x) C^4."""
    if min(a, b, c) <= 0:
        raise NonPositiveParameter(f"a, b, c must be positive, got ({a}, {b}, {c})")
    m = np.diag([1.0, a, b, c, 1 / c, 1 / b, 1 / a, 1.0]).astype(complex)
    m[0, 7] = m[7, 0] = 1.0
    return m


def edge_state(a, b, c, tol: Optional[Tolerances] = None):
    tol = tol or Tolerances()
    rho = validate_density(edge_matrix(a, b, c), 2, 4, tol)
    lam = np.linalg.eigvalsh(rho.mat)[::-1]
    prof = degeneracy_profile(lam, tol.gap)
    meta = dict(params=(a, b, c), nondegenerate=prof.is_nondegenerate)
    return replace(rho, metadata=meta)
