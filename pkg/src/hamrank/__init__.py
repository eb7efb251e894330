"""Exact construction and verification of support-rank and sign-rank
representations of Hamming-distance matrices and their generalizations."""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    HamrankError,
    InconsistentFingerprintError,
    MissingFeatureError,
    NonSquareError,
    PatternViolationError,
    RetriesExhaustedError,
    SizeMismatchError,
    ZeroValueError,
)
from .exact import Mat, block_diag, det_exact, minor, rank_exact, repeat_diag
from .compression import (
    Compressor,
    MatFamily,
    fit_compressor,
    vandermonde_compressor,
    verify_compressor,
)
from .veronese import (
    MinorIndex,
    MonomialForm,
    det_sum_terms,
    hypercube_unit_embed,
    minor_embed,
    poly_to_vectors,
    unit_distance_form,
    unit_point_features,
)
from .hamming import (
    SupportRep,
    build_hd_supp,
    dist,
    identity_certificate,
    load_supp,
    verify_support_rep,
)
from .signcompile import (
    Combine,
    ConstLeaf,
    Leaf,
    Node,
    build_hd_sign,
    choose_gamma,
    compile_tree,
    eval_sign,
    eval_value,
    materialize,
    tree_eval,
)
from .rankprob import (
    CompositionSpec,
    MonotonePiece,
    RankProblem,
    bool_combine,
    compose_semantics,
    distance_r_compose,
    example_cc_hd,
    hd_rank_problem,
    monotone_decompose,
    multiset_decode,
    negate,
    strict_cc_hd,
    symmetric_problem,
    to_sign_rep,
)
from .harness import Report, RunConfig, run
