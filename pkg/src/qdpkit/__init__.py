"""Differential-privacy analysis of quantum state pairs, classical distributions and channels."""

from .classical import (
    ClassicalDist,
    MarkovKernel,
    hockey_stick_c,
    kl_bound_ldp,
    kl_c,
    kl_c_integral,
    np_beta_c,
    randomized_response,
    renyi_c,
    truncate_pair,
    truncation_report,
)
from .contraction import (
    QuantumChannel,
    apply,
    certify_ldp,
    empirical_contraction,
    eta_bounds,
    eta_weakest_closed_form,
)
from .divergence import (
    FWeight,
    StatePair,
    dmax,
    f_divergence,
    hockey_stick_q,
    hyp_test_div,
    measured_renyi_half,
    mixture_kl_bound,
    relative_entropy,
    relative_entropy_integral,
    renyi_hockey,
    reversed_pinsker_check,
    smooth_truncate,
    type2_error,
)
from .dpcert import (
    PrivacyParams,
    Region,
    alt_pair,
    certify_dp,
    dominance_audit,
    dominates,
    f_tradeoff,
    make_dp,
    region,
    region_contains,
    weakest_pair,
    weakest_pure_pair,
)
from .inference import TradeoffCurve, fisher_max, mix, privatized_beta_curve, sld_fisher
from .linop import DensityOperator, eig_hermitian, matrix_log_on_support, positive_part_trace
from .stability import (
    CQEnsemble,
    Dataset,
    g_k,
    holevo,
    neighbor_distance,
    stability_bound,
    stability_report,
    type_census,
)

__version__ = "0.1.0"
