"""Quantum conditional entropy toolkit.

Numerics for bipartite channels that cannot create conditional order
(conditionally unital, semi-causal maps), the conditional entropies they
leave monotone, conditional majorization of classical joints, and the
gambling games whose rewards certify all of the above.
"""

from .channel_games import (
    ChannelGameSpec,
    ChannelOpts,
    ChannelRewardReport,
    analytic_reward,
    bell_game,
    channel_reward,
    channel_reward_fixed,
    compare_channels,
    degrade,
    max_output_purity,
    purity_game,
    zero_game,
)
from .channels import (
    QuantumChannel,
    amplitude_damping,
    apply,
    channel,
    choi,
    classical_identity,
    compose,
    compress,
    dephasing,
    depolarizing,
    from_choi,
    identity_channel,
    make,
    povm_channel,
    random_channel,
    randomizing,
    replacement,
    tensor,
    unitary_channel,
)
from .classical import (
    ClassicalJoint,
    HostMatrix,
    LpSolverError,
    apply_cds_classical,
    cond_majorizes_classical,
    embed_classical,
    fixed_w_value,
    prob_t,
)
from .cusc import (
    CuscVerdict,
    bell_scrambler,
    cds_channel,
    is_conditionally_unital,
    is_cusc,
    is_semicausal,
    nonneg_witness_channel,
    nonneg_witness_composite,
    random_cusc,
    semicausal_from_parts,
    separable_prep_channel,
    teleport_cusc,
)
from .entropy import (
    DMAX,
    UMEGAKI,
    coherent_information,
    cond_entropy_down,
    divergence,
    dual_cond_entropy,
    vn_cond_entropy,
    vn_entropy,
)
from .linalg import (
    DensityOperator,
    density,
    eig_desc,
    embed_alice,
    haar_unitary,
    kyfan,
    majorizes,
    max_entangled,
    maximally_mixed,
    partial_trace,
    permute_systems,
    pure,
    purify,
    random_density,
    random_pmf,
)
from .mc_sim import SimResult, simulate_channel_game, simulate_state_game
from .optim import OptOpts
from .state_games import (
    Adversary,
    ComparisonVerdict,
    RewardReport,
    StateGameSpec,
    StateStrategy,
    compare_states,
    reward,
    reward_adv,
    reward_given_bob,
    reward_noadv,
    scramble,
)

__version__ = "0.1.0"
