"""cebound: lower bounds for the relative entropy of coherence via the BKM kernel."""

from .bkm import (
    ChannelWeights,
    bkm_apply,
    bkm_form,
    bkm_hessian,
    bkm_quadrature,
    channel_weights,
    log_mean_kernel,
    midpoint_margin,
    petz_form,
    petz_midpoint_margin,
)
from .bounds import (
    BoundReport,
    bound_report,
    fidelity,
    fidelity_bound,
    find_separation_eps,
    log_boundary_bound,
    operator_bound,
    pinsker_bound,
    separation_family,
    sharpness_family,
    trace_norm,
)
from .dephasing import (
    OrbitConfig,
    entropy_production,
    log_enhanced_bound,
    orbit_state,
    orbit_trace,
    write_orbit_csv,
)
from .errors import (
    CeboundError,
    DomainError,
    InfeasibleError,
    NumericError,
    PositivityError,
    SamplingError,
    ValidationError,
)
from .linalg import (
    BlockState,
    SpectralDecomposition,
    block_decompose,
    coherence_entropy,
    eigh,
    pinch,
    pythagorean_residual,
    random_block_state,
    read_state_json,
    relative_entropy,
    two_level_pure,
    validate_density,
    validate_hermitian,
    write_state_json,
)
from .twolevel import (
    TwoLevelParams,
    binary_entropy,
    phi,
    phi_chain_check,
    phi_dx,
    phi_dxx,
)
from .variational import (
    KrausChannel,
    MergeSpec,
    PinchedData,
    equality_state,
    merge_channel,
    modulus_curve,
    optimizer,
    pipeline_values,
    polygon_phases,
    sample_feasible,
    svd_pinch,
    variational_check,
)

__version__ = "0.1.0"
