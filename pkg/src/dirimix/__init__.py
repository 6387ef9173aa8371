"""Identifiability of finite Dirichlet mixtures: non-identifiability witnesses and exact equality decisions."""

from .equivalence import (
    BoxRegion,
    FewAtoms,
    FixedTotalSlice,
    IdentifiabilityCertificate,
    RelationCertificate,
    certify,
    decide_equality,
    gram_matrix,
    inner_product,
    l2_distance,
    mc_discrepancy,
    numerical_null_space,
)
from .errors import AmbiguityError, DomainError, FeasibilityError
from .exactpoly import (
    CongruencePartition,
    ElevatedForm,
    MonomialRelation,
    congruence_partition,
    degree_elevate,
    is_null_relation,
    null_relation_basis,
    relation_from_measures,
    residue_decompose,
    shift_relation,
    sign_counts,
)
from .kernels import (
    BetaLiouville,
    Dirichlet,
    DirichletMultinomial,
    GeneralizedDirichlet,
    InvertedBetaLiouville,
    InvertedDirichlet,
    LDAMarginal,
    SimplexPoint,
    kernel_log_density,
    mixture_log_density,
)
from .numeric_core import dirichlet_moment, log_normalizer, rising_factorial
from .series import coefficient_extract, h_series_coeff, h_series_eval, separating_direction
from .transports import (
    alr_density,
    alr_inverse,
    alr_jacobian_det,
    alr_transform,
    chart_inverse,
    chart_jacobian_det,
    chart_transform,
)
from .witnesses import (
    MixingMeasure,
    WitnessPair,
    dm_shift_residual,
    dm_witness,
    embed,
    embed_witness,
    expand_atom,
    lda_shift_residual,
    lda_witness,
    shift_residual,
    shift_witness,
)

__version__ = "0.1.0"
