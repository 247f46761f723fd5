"""Tolerances and search settings, collected so the CLI can surface them."""
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10  # relative, ||m - m^H||_F <= herm * ||m||_F
    psd: float = 1e-9  # scaled by ||m||_F
    trace: float = 1e-9
    gap: float = 1e-8  # absolute, on unit-trace spectra
    tie: float = 1e-12  # eigenvalues this close get the deterministic tie-break
    spectra: float = 1e-9
    verify: float = 1e-8
    struct_zero: float = 1e-12
    struct_margin: float = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 32
    max_iters: int = 500
    rank_tol: float = 1e-7
    seed: int = 0
    # step policy for the backtracking descent
    step0: float = 1.0
    step_max: float = 10.0
    grow: float = 2.0
    shrink: float = 0.5
    armijo: float = 1e-4
    min_step: float = 1e-14
    f_stop: float = 1e-26
    workers: int = 1
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0, 1)")
