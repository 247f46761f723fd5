"""Column-stacking, block realignment and Kronecker factor extraction.

Conventions (fixed, tests rely on them bit-for-bit):

* ``vec(A)`` stacks columns: ``vec(A)[c * rows + r] = A[r, c]``.
* ``Z`` of size MN x MN is an M x M grid of N x N blocks, block ``(i, j)``
  at rows ``i*N:(i+1)*N`` and columns ``j*N:(j+1)*N``.
* Row ``j * M + i`` of the realigned matrix is ``vec(Z_ij)``, i.e. blocks
  are listed (1,1), (2,1), ..., (M,1), (1,2), ...  With this ordering
  ``realign(A (x) B) == outer(vec(A), vec(B))``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, RankDeficient, SvdFailure


def vec(A):
    A = np.asarray(A)
    return A.reshape(-1, order="F")


def unvec(v, rows, cols):
    v = np.asarray(v)
    if v.size != rows * cols:
        raise DimensionMismatch(f"cannot reshape length {v.size} to {rows}x{cols}")
    return v.reshape(rows, cols, order="F")


def kron(A, B):
    return np.kron(A, B)


def _check_square(Z, M, N):
    Z = np.asarray(Z)
    if Z.shape != (M * N, M * N):
        raise DimensionMismatch(
            f"expected a {M * N}x{M * N} matrix for dims ({M}, {N}), got {Z.shape}"
        )
    return Z


def realign(Z, M, N):
    """M^2 x N^2 realigned matrix of an MN x MN matrix."""
    Z = _check_square(Z, M, N)
    # axes of Z4: (i, r, j, s) with Z[i*N + r, j*N + s]
    Z4 = Z.reshape(M, N, M, N)
    return Z4.transpose(2, 0, 3, 1).reshape(M * M, N * N)


def unrealign(R, M, N):
    R = np.asarray(R)
    if R.shape != (M * M, N * N):
        raise DimensionMismatch(f"expected a {M * M}x{N * N} matrix, got {R.shape}")
    return R.reshape(M, M, N, N).transpose(1, 3, 0, 2).reshape(M * N, M * N)


def top_singular_pair(R):
    """(sigma1, sigma2, u, v) with R ~= sigma1 * u v^H + smaller terms."""
    R = np.asarray(R, dtype=np.complex128)
    try:
        U, s, Vh = np.linalg.svd(R)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
    s2 = s[1] if len(s) > 1 else 0.0
    return float(s[0]), float(s2), U[:, 0], Vh[0].conj()


@dataclass(frozen=True, eq=False)
class FactorPair:
    u1: np.ndarray
    u2: np.ndarray
    decomposition_residual: float
    unitarity_defect: float

    def kron(self):
        return np.kron(self.u1, self.u2)


def gauge_phase(u1, tie_tol=1e-12):
    """Unit phase that makes the leading largest-modulus entry of u1 real >= 0.

    Entries within ``tie_tol`` of the maximum modulus count as ties; the
    first in row-major order wins.
    """
    flat = np.asarray(u1).ravel()
    mod = np.abs(flat)
    k = int(np.flatnonzero(mod >= mod.max() - tie_tol)[0])
    if mod[k] == 0:
        return 1.0 + 0j
    return flat[k].conj() / mod[k]


def unitarity_defect(u1, u2):
    M, N = u1.shape[0], u2.shape[0]
    d1 = np.linalg.norm(u1.conj().T @ u1 - np.eye(M))
    d2 = np.linalg.norm(u2.conj().T @ u2 - np.eye(N))
    return float(max(d1, d2))


def extract_factors(R, M, N):
    """Balanced Kronecker factors from the top singular triple of a realigned matrix.

    ``u1 = unvec(sqrt(M) u)`` and ``u2 = unvec(sigma1/sqrt(M) conj(v))`` with the
    U(1) freedom fixed by :func:`gauge_phase`, so ``||u1||_F^2 = M``. For an
    exactly decomposable unitary both factors come out unitary. The
    decomposition residual is evaluated on ``R`` (realignment is an isometry,
    so it equals ``||V - u1 (x) u2||_F``).
    """
    R = np.asarray(R, dtype=np.complex128)
    if R.shape != (M * M, N * N):
        raise DimensionMismatch(f"expected a {M * M}x{N * N} matrix, got {R.shape}")
    s1, _, u, v = top_singular_pair(R)
    if s1 < 1e-12:
        raise RankDeficient(f"top singular value {s1:.3e} is zero")
    u1 = unvec(np.sqrt(M) * u, M, M)
    ph = gauge_phase(u1)
    u1 = u1 * ph
    u2 = unvec((s1 / np.sqrt(M)) * v.conj() * ph.conjugate(), N, N)
    resid = np.linalg.norm(R - np.outer(vec(u1), vec(u2)))
    return FactorPair(u1, u2, float(resid), unitarity_defect(u1, u2))
