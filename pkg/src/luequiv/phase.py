"""Search of the phase coset V(theta) = X diag(exp(i theta)) Y^H.

Realignment is linear, so the realigned coset element is
``sum_k exp(i theta_k) T_k`` with ``T_k = realign(X E_kk Y^H)``. ``V(theta)``
is unitary, hence the squared singular values of its realignment sum to MN
and ``f(theta) = MN - sigma1^2`` vanishes exactly when V(theta) is a tensor
product of (balanced) unitaries.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .config import SearchConfig, Tolerances
from .errors import DegenerateSingularValue, DimensionMismatch, NotUnitary
from .realign import realign

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class CosetTensor:
    terms: np.ndarray  # (MN, M^2, N^2), C-contiguous
    dim_a: int
    dim_b: int

    @property
    def size(self):
        return self.dim_a * self.dim_b

    def evaluate(self, theta):
        """Realigned coset element at ``theta``."""
        return np.tensordot(np.exp(1j * np.asarray(theta, dtype=float)), self.terms, axes=1)


@dataclass(frozen=True)
class StructuralReport:
    feasible: bool
    certificate: Optional[tuple] = None  # (row, col) of the realigned matrix


@dataclass(frozen=True, eq=False)
class SearchResult:
    theta: np.ndarray
    f_best: float
    evaluations: int
    restart: int  # index of the restart that produced theta
    restarts_run: int


def gauge_fix(theta):
    """Shift so theta[0] == 0 and wrap into [0, 2pi)."""
    theta = np.asarray(theta, dtype=float)
    out = np.mod(theta - theta[0], TWO_PI)
    out[0] = 0.0
    return out


def build_coset_tensor(X, Y, M, N, unitary_tol=1e-9):
    X = np.asarray(X, dtype=np.complex128)
    Y = np.asarray(Y, dtype=np.complex128)
    K = M * N
    if X.shape != (K, K) or Y.shape != (K, K):
        raise DimensionMismatch(f"X and Y must be {K}x{K}")
    eye = np.eye(K)
    for name, A in (("X", X), ("Y", Y)):
        defect = np.linalg.norm(A.conj().T @ A - eye)
        if defect > unitary_tol * K:
            raise NotUnitary(f"{name} is not unitary (defect {defect:.2e})")
    terms = np.stack([realign(np.outer(X[:, k], Y[:, k].conj()), M, N) for k in range(K)])
    return CosetTensor(np.ascontiguousarray(terms), M, N)


def coset_element(X, Y, theta):
    """V(theta) = X diag(exp(i theta)) Y^H."""
    return (X * np.exp(1j * np.asarray(theta))[None, :]) @ Y.conj().T


def objective(ct, theta):
    return kernels.objective_gradient(ct.terms, np.asarray(theta, dtype=float))[0]


def gradient(ct, theta, gap_tol=1e-12):
    """Analytic derivative of f with respect to every phase (including theta[0]).

    Raises DegenerateSingularValue when sigma1 is not separated from sigma2;
    callers then fall back to the heuristic step of the search.
    """
    _, s1, s2, g = kernels.objective_gradient(ct.terms, np.asarray(theta, dtype=float))
    if s1 - s2 <= gap_tol:
        raise DegenerateSingularValue(s1 - s2)
    return g


def classify_entries(terms, zero_tol=1e-12, margin=1e-9):
    """Entry classes of the realigned coset over all phases.

    Returns boolean arrays ``(zero, nonzero)``: ``zero`` marks entries whose
    coefficients all vanish; ``nonzero`` those where one coefficient's modulus
    beats the sum of the others (so the entry is nonzero for every theta).
    """
    mod = np.abs(terms)
    total = mod.sum(axis=0)
    top = mod.max(axis=0)
    zero = total <= zero_tol
    nonzero = top - (total - top) > margin
    return zero, nonzero


def structural_check(ct, tol: Optional[Tolerances] = None):
    """Refute rank one combinatorially.

    A rank-one matrix is supported on a rectangle supp(u) x supp(v). If a row
    and a column each hold an entry that is nonzero for all theta, their
    crossing must be nonzero too; an identically-zero crossing refutes every
    theta at once.
    """
    tol = tol or Tolerances()
    zero, nonzero = classify_entries(ct.terms, tol.struct_zero, tol.struct_margin)
    rows = nonzero.any(axis=1)
    cols = nonzero.any(axis=0)
    hits = np.argwhere(zero & rows[:, None] & cols[None, :])
    if len(hits):
        p, q = hits[0]
        return StructuralReport(False, (int(p), int(q)))
    return StructuralReport(True)


def _start_points(K, cfg):
    """Restart 0 is theta = 0; restart r > 0 draws from its own spawned stream."""
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    for r in range(cfg.restarts):
        if r == 0:
            yield r, np.zeros(K)
        else:
            rng = np.random.default_rng(seqs[r])
            th = rng.uniform(0.0, TWO_PI, K)
            th[0] = 0.0
            yield r, th


def _run(ct, th0, cfg):
    return kernels.descend(
        ct.terms, th0,
        max_iters=cfg.max_iters, step0=cfg.step0, step_max=cfg.step_max,
        grow=cfg.grow, shrink=cfg.shrink, armijo=cfg.armijo,
        min_step=cfg.min_step, f_stop=cfg.f_stop,
    )


def search_phases(ct, cfg: Optional[SearchConfig] = None, start=None):
    """Multistart descent on the torus, theta[0] fixed at 0.

    Restarts are processed in index order (in batches of ``cfg.workers``) and
    the search stops after the first restart reaching ``rank_tol``; the
    answer is the lowest f among the restarts up to that point, ties to the
    lower index. Serial and threaded runs therefore agree exactly.
    """
    cfg = cfg or SearchConfig()
    K = ct.size
    starts = list(_start_points(K, cfg))
    if start is not None:
        starts[0] = (0, gauge_fix(start))
    results = []
    evals = 0
    workers = max(1, int(cfg.workers))
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for b in range(0, len(starts), workers):
            batch = starts[b:b + workers]
            if pool is None:
                outs = [_run(ct, th0, cfg) for _, th0 in batch]
            else:
                outs = list(pool.map(lambda s: _run(ct, s[1], cfg), batch))
            done = False
            for (r, _), (th, f, n, _) in zip(batch, outs):
                evals += n
                results.append((f, r, th))
                if f <= cfg.rank_tol:
                    done = True
                    break
            if done:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    f, r, th = min(results, key=lambda x: (x[0], x[1]))
    return SearchResult(gauge_fix(th), float(f), evals, r, len(results))


def polish(ct, theta, cfg: Optional[SearchConfig] = None, rounds=3):
    """Continue descent from ``theta`` to push f to the numerical floor."""
    cfg = cfg or SearchConfig()
    th = np.asarray(theta, dtype=float)
    f = objective(ct, th)
    for _ in range(rounds):
        th_n, f_n, _, _ = _run(ct, th, cfg)
        if f_n >= f:
            break
        th, f = th_n, f_n
        if f <= cfg.f_stop:
            break
    return gauge_fix(th), float(f)
