"""Pure tripartite states through bipartite cuts and reduced states.

Amplitude ordering is ``((i_A * d_B) + i_B) * d_C + i_C``.

Every candidate triple (U_A, U_B, U_C) is checked against the full state
before an Equivalent verdict is returned. Candidates come from, in order:

1. local phase cosets: when the single-party marginals are non-degenerate,
   each U_s is confined to Y_s diag(phases) X_s^H and the phases follow
   from the coefficient tensor in the local eigenbases;
2. the bipartite engine on the reduced pair (Tr_A rho, Tr_A rho'), which
   yields (U_B, U_C), completed with a Procrustes fit for U_A;
3. the bipartite engine on the pure A|BC cut in witness-finding mode, with
   U_BC split by realignment.
"""
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .config import SearchConfig, Tolerances
from .errors import DimensionMismatch, LUError, NonFiniteEntries
from .realign import extract_factors, realign
from .state import BipartiteDensity, degeneracy_profile, first_spectral_mismatch, spectral_decompose
from .verdict import (
    DEGENERATE,
    SEARCH_EXHAUSTED,
    Equivalent,
    Inconclusive,
    NotEquivalent,
    ReducedSpectrumMismatch,
    decide,
)

CUTS = ("A|BC", "AB|C", "AC|B")
TRIPARTITE_VERIFY = 1e-7


@dataclass(frozen=True, eq=False)
class PureTripartite:
    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise DimensionMismatch(f"need three positive dims, got {self.dims}")
        if a.size != dims[0] * dims[1] * dims[2]:
            raise DimensionMismatch(f"{a.size} amplitudes do not fit dims {dims}")
        if not np.all(np.isfinite(a)):
            raise NonFiniteEntries("amplitudes must be finite")
        if abs(np.linalg.norm(a) - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized (norm {np.linalg.norm(a):.12f})")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims):
        a = np.asarray(amplitudes, dtype=np.complex128).ravel()
        return cls(a / np.linalg.norm(a), dims)

    def tensor(self):
        return self.amplitudes.reshape(self.dims)

    def density(self):
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class TripleWitness:
    u_a: np.ndarray
    u_b: np.ndarray
    u_c: np.ndarray
    residual: float
    source: str

    def kron(self):
        return np.kron(np.kron(self.u_a, self.u_b), self.u_c)


def cut(psi: PureTripartite, which="A|BC") -> BipartiteDensity:
    """|psi><psi| as a bipartite density for the chosen cut.

    For AC|B the amplitudes are reindexed to ``((i_A * d_C) + i_C) * d_B + i_B``.
    """
    dA, dB, dC = psi.dims
    t = psi.tensor()
    if which == "A|BC":
        vec, dims = t.ravel(), (dA, dB * dC)
    elif which == "AB|C":
        vec, dims = t.ravel(), (dA * dB, dC)
    elif which == "AC|B":
        vec, dims = t.transpose(0, 2, 1).ravel(), (dA * dC, dB)
    else:
        raise ValueError(f"unknown cut {which!r}; expected one of {CUTS}")
    return BipartiteDensity(np.outer(vec, vec.conj()), dims[0], dims[1])


def marginal(psi: PureTripartite, party):
    """Single-party reduced state."""
    t = psi.tensor()
    if party == "A":
        m = t.reshape(t.shape[0], -1)
    elif party == "B":
        m = t.transpose(1, 0, 2).reshape(t.shape[1], -1)
    elif party == "C":
        m = t.transpose(2, 0, 1).reshape(t.shape[2], -1)
    else:
        raise ValueError(f"unknown party {party!r}")
    return m @ m.conj().T


def reduced_bc(psi: PureTripartite):
    """Tr_A |psi><psi| as a bipartite density on B (x) C."""
    dA, dB, dC = psi.dims
    m = psi.tensor().reshape(dA, dB * dC)
    return BipartiteDensity(m.T @ m.conj(), dB, dC)


def triple_residual(psi, psi_p, u_a, u_b, u_c):
    """||rho' - W rho W^H||_F on the full tripartite density."""
    W = np.kron(np.kron(u_a, u_b), u_c)
    return float(np.linalg.norm(psi_p.density() - W @ psi.density() @ W.conj().T))


def _procrustes(target, source):
    """Unitary U minimizing ||target - U source||_F (rows are the A index)."""
    P, _, Qh = np.linalg.svd(target @ source.conj().T)
    return P @ Qh


def _complete_a(psi, psi_p, u_b, u_c):
    dA = psi.dims[0]
    moved = np.einsum("bj,ck,ijk->ibc", u_b, u_c, psi.tensor()).reshape(dA, -1)
    return _procrustes(psi_p.tensor().reshape(dA, -1), moved)


def _solve_phases(coef, coef_p, rel_tol=1e-8):
    """Phases (alpha, beta, gamma) with coef_p[i,j,k] = e^{i(a_i+b_j+c_k)} coef[i,j,k].

    Propagates through the support in decreasing modulus order; returns None
    if some phase is not pinned by the support.
    """
    dims = coef.shape
    mod = np.abs(coef)
    support = mod > rel_tol * mod.max()
    delta = np.angle(coef_p * coef.conj())
    known = [np.full(d, np.nan) for d in dims]
    p0 = np.unravel_index(np.argmax(mod), dims)
    known[1][p0[1]] = 0.0
    known[2][p0[2]] = 0.0
    entries = sorted(zip(*np.nonzero(support)), key=lambda e: -mod[e])
    changed = True
    while changed:
        changed = False
        for e in entries:
            missing = [ax for ax in range(3) if np.isnan(known[ax][e[ax]])]
            if len(missing) != 1:
                continue
            ax = missing[0]
            rest = sum(known[b][e[b]] for b in range(3) if b != ax)
            known[ax][e[ax]] = delta[e] - rest
            changed = True
    if any(np.isnan(k).any() for k in known):
        return None
    return known


def _local_coset_candidate(psi, psi_p, tol):
    Xs, Ys = [], []
    for party in "ABC":
        sd = spectral_decompose(marginal(psi, party), tol=tol)
        sd_p = spectral_decompose(marginal(psi_p, party), tol=tol)
        if not degeneracy_profile(sd.eigenvalues, tol.gap).is_nondegenerate:
            return None
        Xs.append(sd.basis)
        Ys.append(sd_p.basis)
    coef = np.einsum("ai,bj,ck,abc->ijk", Xs[0].conj(), Xs[1].conj(), Xs[2].conj(), psi.tensor())
    coef_p = np.einsum("ai,bj,ck,abc->ijk", Ys[0].conj(), Ys[1].conj(), Ys[2].conj(), psi_p.tensor())
    if np.max(np.abs(np.abs(coef) - np.abs(coef_p))) > 1e-6:
        return None
    phases = _solve_phases(coef, coef_p)
    if phases is None:
        return None
    us = [(Y * np.exp(1j * ph)[None, :]) @ X.conj().T for X, Y, ph in zip(Xs, Ys, phases)]
    return us


def decide_pure_tripartite(psi, psi_p, cfg: Optional[SearchConfig] = None):
    cfg = cfg or SearchConfig()
    tol = cfg.tol
    if psi.dims != psi_p.dims:
        raise DimensionMismatch(f"dims differ: {psi.dims} vs {psi_p.dims}")

    # every single-party spectrum is an LU invariant (Schmidt coefficients of each cut)
    for party in "ABC":
        lam = np.linalg.eigvalsh(marginal(psi, party))[::-1]
        lam_p = np.linalg.eigvalsh(marginal(psi_p, party))[::-1]
        i = first_spectral_mismatch(lam, lam_p, tol.spectra)
        if i is not None:
            return NotEquivalent(ReducedSpectrumMismatch(party, i, (float(lam[i]), float(lam_p[i]))))

    best = np.inf

    def accept(us, source):
        nonlocal best
        r = triple_residual(psi, psi_p, *us)
        best = min(best, r)
        if r <= TRIPARTITE_VERIFY:
            return Equivalent(TripleWitness(*us, r, source), r)
        return None

    us = _local_coset_candidate(psi, psi_p, tol)
    if us is not None:
        v = accept(us, "local-phase-coset")
        if v is not None:
            return v

    dA, dB, dC = psi.dims
    if dB >= 2 and dC >= 2:
        v_bc = decide(reduced_bc(psi), reduced_bc(psi_p), cfg)
        if isinstance(v_bc, NotEquivalent):
            return v_bc
        if isinstance(v_bc, Equivalent):
            u_b, u_c = v_bc.witness.u1, v_bc.witness.u2
            v = accept((_complete_a(psi, psi_p, u_b, u_c), u_b, u_c), "reduced-bc")
            if v is not None:
                return v

    if dA >= 2 and dB * dC >= 2:
        # pure cut: spectrum {1, 0, ...}, used only to look for a witness
        quick = replace(cfg, restarts=min(cfg.restarts, 4))
        v_cut = decide(cut(psi, "A|BC"), cut(psi_p, "A|BC"), quick)
        if isinstance(v_cut, Equivalent) and dB >= 2 and dC >= 2:
            u_bc = v_cut.witness.u2
            try:
                split = extract_factors(realign(u_bc, dB, dC), dB, dC)
            except LUError:
                split = None
            if split is not None:
                v = accept((v_cut.witness.u1, split.u1, split.u2), "cut-A|BC")
                if v is not None:
                    return v

    degenerate = any(
        not degeneracy_profile(np.linalg.eigvalsh(marginal(psi, p))[::-1], tol.gap).is_nondegenerate
        for p in "ABC"
    )
    return Inconclusive(DEGENERATE if degenerate else SEARCH_EXHAUSTED, best)


def random_pure_tripartite(dims, rng):
    a = rng.normal(size=np.prod(dims)) + 1j * rng.normal(size=np.prod(dims))
    return PureTripartite.normalized(a, dims)


def apply_local(psi, u_a, u_b, u_c):
    t = np.einsum("ai,bj,ck,ijk->abc", u_a, u_b, u_c, psi.tensor())
    return PureTripartite(t.ravel(), psi.dims)
