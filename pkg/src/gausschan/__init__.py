"""Single-mode Gaussian channels: fiducial decomposition, capacities and optical realizations."""

from .capacity import (
    INV_LN2,
    CapacityReport,
    capacity_of_channel,
    g,
    gaussian_capacity_closed_form,
    holevo_chi_g,
    n_threshold,
    numerical_one_shot,
    region_rows,
    supplementary_bound,
    upper_bound_cbar,
    y_threshold_curve,
)
from .channel import (
    CanonicalClass,
    GaussianChannel,
    GaussianState,
    classify,
    compose,
    is_entanglement_breaking,
    new_channel,
    new_state,
    thermal_channel,
)
from .decompose import (
    FiducialDecomposition,
    FiducialParams,
    decompose_canonical,
    decompose_fiducial,
    fiducial_channel,
    reconstruct,
    reconstruction_residual,
)
from .errors import (
    BelowThreshold,
    DomainError,
    GaussChanError,
    ModeIndexOutOfRange,
    NotAffine,
    NotAState,
    NotPhysical,
    NotPositive,
    ParseError,
    RankDeficient,
)
from .realize import (
    OpticalNetwork,
    build_classical_signal,
    build_fiducial,
    build_single_quadrature_noise,
    build_thermal,
    extract_channel,
    run,
)

__version__ = "0.1.0"
