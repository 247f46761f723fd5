"""Local unitary equivalence of bipartite mixed states.

Two density matrices with a common non-degenerate spectrum are equivalent
under U1 (x) U2 exactly when the phase family X diag(e^{i theta}) Y^H contains
a tensor-product unitary, which is tested through the rank of its realigned
matrix.
"""
from .config import SearchConfig, Tolerances
from .errors import LUError
from .kernels import BACKEND
from .phase import (
    CosetTensor,
    build_coset_tensor,
    gradient,
    objective,
    search_phases,
    structural_check,
)
from .realign import FactorPair, extract_factors, kron, realign, top_singular_pair, unrealign, unvec, vec
from .state import (
    BipartiteDensity,
    SpectralDecomposition,
    degeneracy_profile,
    partial_trace,
    spectra_match,
    spectral_decompose,
    validate_density,
)
from .tripartite import PureTripartite, cut, decide_pure_tripartite
from .verdict import (
    Equivalent,
    Inconclusive,
    NotEquivalent,
    ReducedSpectrumMismatch,
    SpectrumMismatch,
    StructuralInfeasibility,
    decide,
    edge_state,
    gen_lu_pair,
    revalidate,
    verify_witness,
)

__version__ = "0.1.0"
