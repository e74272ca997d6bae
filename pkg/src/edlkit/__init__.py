"""Tools for entanglement witnesses supported on small particle subsets."""

import os as _os

# Cap linear-algebra thread pools before numpy ever loads.  Effective when
# this package is imported first (the CLI entry point guarantees that); a
# numpy already imported by the host process keeps its own settings.
_threads = _os.environ.get("EDLKIT_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .pauli import (
    bipartitions,
    hermitian_eigen,
    kron_all,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    pauli_matrix,
    to_pauli_coords,
    from_pauli_coords,
)
from .states import (
    STATE_NAMES,
    density,
    fidelity,
    make_state,
    schmidt_lambda_max,
    white_noise,
)
from .witness import (
    ObservableExpr,
    Witness,
    evaluate,
    load_catalog,
    load_paper_witness,
    p_noise,
    projector_witness,
    sample_biseparable_min,
    support,
)
from .sdp import (
    SdpSolution,
    SolverError,
    SolverTolerances,
    SynthesisResult,
    decomposition_margins,
    edl_scan,
    edl_search,
    synthesize,
    verify_witness,
)

__version__ = "0.1.0"

__all__ = [
    "ObservableExpr",
    "STATE_NAMES",
    "SdpSolution",
    "SolverError",
    "SolverTolerances",
    "SynthesisResult",
    "Witness",
    "bipartitions",
    "decomposition_margins",
    "density",
    "edl_scan",
    "edl_search",
    "evaluate",
    "fidelity",
    "from_pauli_coords",
    "hermitian_eigen",
    "kron_all",
    "load_catalog",
    "load_paper_witness",
    "make_state",
    "min_eigenvalue",
    "p_noise",
    "partial_trace",
    "partial_transpose",
    "pauli_matrix",
    "projector_witness",
    "sample_biseparable_min",
    "schmidt_lambda_max",
    "support",
    "synthesize",
    "to_pauli_coords",
    "verify_witness",
    "white_noise",
]
