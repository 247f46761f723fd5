"""Density matrices on H_A (x) H_B and their spectral data.

Matrices are plain ``complex128`` numpy arrays. Row/column index of a
bipartite operator is ``i * N + r`` for ``i`` in H_A (dim M) and ``r`` in H_B
(dim N), i.e. the ordinary Kronecker layout.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import Tolerances
from .errors import (
    DimensionMismatch,
    EigSolverFailure,
    LengthMismatch,
    NonFiniteEntries,
    NotHermitian,
    NotPositive,
    ZeroTrace,
)

_DEFAULT_TOL = Tolerances()


def as_complex_matrix(m, name="matrix"):
    """Coerce to a finite 2-D complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntries(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class BipartiteDensity:
    """Validated, unit-trace density matrix tagged with subsystem dims."""

    mat: np.ndarray
    dim_a: int
    dim_b: int
    original_trace: float = 1.0
    metadata: dict = field(default_factory=dict)

    @property
    def dims(self):
        return (self.dim_a, self.dim_b)

    @property
    def size(self):
        return self.dim_a * self.dim_b


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # descending
    basis: np.ndarray  # columns are eigenvectors


@dataclass(frozen=True)
class DegeneracyProfile:
    multiplicities: tuple  # ((representative eigenvalue, n_i), ...)
    is_nondegenerate: bool

    @property
    def counts(self):
        return tuple(n for _, n in self.multiplicities)


def validate_density(m, M, N, tol: Optional[Tolerances] = None) -> BipartiteDensity:
    """Check that ``m`` is a Hermitian PSD operator on C^M (x) C^N and normalize it.

    Any positive trace is accepted; the returned matrix has unit trace and the
    raw trace is kept in ``original_trace``.
    """
    tol = tol or _DEFAULT_TOL
    M, N = int(M), int(N)
    if M < 2 or N < 2:
        raise DimensionMismatch(f"subsystem dimensions must be >= 2, got ({M}, {N})")
    a = as_complex_matrix(m, "density matrix")
    if a.shape != (M * N, M * N):
        raise DimensionMismatch(
            f"expected a {M * N}x{M * N} matrix for dims ({M}, {N}), got {a.shape}"
        )
    norm = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.conj().T)
    if asym > tol.herm * norm:
        raise NotHermitian(
            f"||m - m^H||_F = {asym:.3e} exceeds {tol.herm:.1e} * ||m||_F"
        )
    h = 0.5 * (a + a.conj().T)
    try:
        min_eig = np.linalg.eigvalsh(h)[0]
    except np.linalg.LinAlgError as exc:
        raise EigSolverFailure(str(exc)) from exc
    if min_eig < -tol.psd * norm:
        raise NotPositive(min_eig, tol.psd * norm)
    tr = float(np.trace(h).real)
    if not tr > tol.psd * max(norm, 1.0):
        raise ZeroTrace(f"trace {tr:.3e} is not positive")
    rho = h / tr
    if abs(np.trace(rho).real - 1.0) > tol.trace:
        raise ZeroTrace("trace normalization failed")
    rho.setflags(write=False)
    return BipartiteDensity(rho, M, N, original_trace=tr)


def _fix_phases(X):
    # largest-modulus entry of every column made real nonnegative
    idx = np.argmax(np.abs(X), axis=0)
    lead = X[idx, np.arange(X.shape[1])]
    mod = np.abs(lead)
    phase = np.ones_like(lead)
    nz = mod > 0
    phase[nz] = lead[nz] / mod[nz]
    return X * phase.conj()[None, :]


def _lex_key(col):
    return tuple(np.column_stack([np.round(col.real, 12), np.round(col.imag, 12)]).ravel())


def spectral_decompose(rho, tie_break="lex", tol: Optional[Tolerances] = None):
    """Eigen-decomposition rho = X diag(lam) X^H with lam descending.

    Each eigenvector is phase-fixed so its largest-modulus entry is real and
    nonnegative. Columns whose eigenvalues agree within ``tol.tie`` are ordered
    lexicographically by entries (``tie_break="reverse"`` flips that order; it
    exists so tests can confirm verdicts do not depend on it).
    """
    tol = tol or _DEFAULT_TOL
    mat = rho.mat if isinstance(rho, BipartiteDensity) else as_complex_matrix(rho)
    try:
        w, X = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise EigSolverFailure(str(exc)) from exc
    w = w[::-1].copy()
    X = _fix_phases(X[:, ::-1])

    order = np.arange(len(w))
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k - 1] - w[k] > tol.tie:
            if k - start > 1:
                block = list(range(start, k))
                block.sort(key=lambda j: _lex_key(X[:, j]))
                if tie_break == "reverse":
                    block.reverse()
                elif tie_break != "lex":
                    raise ValueError(f"unknown tie_break {tie_break!r}")
                order[start:k] = block
            start = k
    X = np.ascontiguousarray(X[:, order])
    w.setflags(write=False)
    X.setflags(write=False)
    return SpectralDecomposition(w, X)


def spectra_match(lam, lam_p, tol=1e-9):
    lam = np.asarray(lam, dtype=float)
    lam_p = np.asarray(lam_p, dtype=float)
    if lam.shape != lam_p.shape:
        raise LengthMismatch(f"spectra lengths differ: {lam.shape} vs {lam_p.shape}")
    return bool(np.max(np.abs(lam - lam_p), initial=0.0) <= tol)


def first_spectral_mismatch(lam, lam_p, tol):
    """Index of the first eigenvalue pair differing by more than ``tol``, or None."""
    diff = np.abs(np.asarray(lam) - np.asarray(lam_p))
    bad = np.flatnonzero(diff > tol)
    return int(bad[0]) if len(bad) else None


def degeneracy_profile(lam, gap_tol=1e-8):
    lam = np.asarray(lam, dtype=float)
    groups = []
    for x in lam:
        if groups and groups[-1][-1] - x < gap_tol:
            groups[-1].append(x)
        else:
            groups.append([x])
    mult = tuple((float(g[0]), len(g)) for g in groups)
    return DegeneracyProfile(mult, all(n == 1 for _, n in mult))


def partial_trace(rho, keep="A", dims=None):
    """Reduced state on the kept subsystem ("A" traces out B and vice versa)."""
    if isinstance(rho, BipartiteDensity):
        mat, (M, N) = rho.mat, rho.dims
    else:
        if dims is None:
            raise DimensionMismatch("dims are required for a bare matrix")
        mat, (M, N) = as_complex_matrix(rho), dims
    t = mat.reshape(M, N, M, N)
    if keep == "A":
        return np.einsum("irjr->ij", t)
    if keep == "B":
        return np.einsum("iris->rs", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def reduced_spectra(rho):
    """Descending spectra of (Tr_B rho, Tr_A rho)."""
    out = []
    for keep in ("A", "B"):
        out.append(np.linalg.eigvalsh(partial_trace(rho, keep))[::-1])
    return tuple(out)
