"""Quantum measurement retrodiction under the minimum-change principle.

Core objects: the quantum Bayesian inverse, the symmetric retrodictive joint
distribution and mutual retrodictability, a family of quantum divergences,
three entropic uncertainty bounds, and a reproducible Monte-Carlo benchmark
harness with a numerical oracle for the minimization theorems.
"""

from .bench import BenchConfig, GapCounts, run_bench, run_mub_scan, single_report
from .divergences import (
    belavkin_staszewski,
    cq_divergence,
    geometric_renyi,
    pair_divergence,
    parse_divergence,
    petz_renyi,
    sandwiched_renyi,
    shannon_entropy,
    trace_distance,
    umegaki,
    von_neumann_entropy,
)
from .errors import (
    ConsistencyError,
    DegenerateSuperpositionError,
    DomainError,
    SchemaError,
    ValidationError,
    ZeroProbabilityOutcomeError,
)
from .eur import (
    EurRecord,
    berta_overlap,
    eur1,
    eur2,
    eur3,
    eur_record,
    go_information_gain,
    instrument_state_mn,
    instrument_state_nm,
    rank_one_condition,
)
from .linalg import (
    EigenDecomposition,
    dag,
    eig_hermitian,
    matrix_function,
    matrix_sqrt,
    polar_unitary,
    schatten_norm,
)
from .quantum import (
    DensityMatrix,
    Povm,
    RngStream,
    counterexample_state,
    fourier_basis,
    ginibre,
    haar_unitary,
    mub_pair,
    random_density_matrix,
    random_full_rank_povm,
    random_pvm,
    random_rank_one_povm,
)
from .retrodiction import (
    CqState,
    RetroJoint,
    bayesian_inverse,
    forward_state,
    mutual_retrodictability,
    retro_joint,
)
from .verify import (
    BackwardCandidate,
    VerifyReport,
    candidate_to_cq,
    classical_divergence,
    draw_tau,
    minimizer_candidate,
    verify_theorem1,
    verify_theorem2,
)

__version__ = "0.1.0"
