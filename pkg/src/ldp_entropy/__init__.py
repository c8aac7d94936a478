"""Locally differentially private estimation of Shannon, Gini and collision entropy."""

from .distributions import (
    CategoricalDistribution,
    JointTable,
    TreeModel,
    brute_force_joint,
    collision_entropy,
    collision_probability,
    conditional_mutual_information,
    copy_model,
    exponential_distribution,
    gini_entropy,
    maximum_spanning_tree,
    mutual_information,
    random_tree_model,
    sample_full,
    shannon_entropy,
    symmetric_tree_model,
    tree_true_entropy,
)
from .ldp import (
    HashChannelParams,
    IdentityChannel,
    KRandomizedResponse,
    PrivacyBudget,
    hash_channel,
    hash_lambda,
    hash_response,
    k_randomized_response,
    keyed_hash,
    rr_invert_frequencies,
    verify_ldp_ratio,
)
from .protocol import (
    NON_INTERACTIVE,
    SEQUENTIAL,
    EstimateReport,
    InsufficientUsers,
    ProtocolError,
    UserPool,
    load_pool,
    pool_from_distribution,
    pool_from_tree,
    save_pool,
)
from .plugin import (
    GoodEstimateSpec,
    InvalidEpsilon,
    good_cmi_estimate,
    good_entropy_estimate,
    good_mi_estimate,
)
from .shannon_tree import estimate_tree_entropy, mst_weight_identity_check, sample_threshold
from .chain_star import (
    ChainAssumptionViolated,
    CmiTestConfig,
    cmi_exceeds,
    estimate_chain_entropy,
    estimate_star_entropy,
    identify_star_center,
    recover_chain,
    ternary_search,
)
from .gini_collision import bias_correction_roundtrip, run_gini_collision, skorski_baseline

__version__ = "0.1.0"
