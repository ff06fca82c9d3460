"""Pseudospectral construction and verification of modified scattering
for the one-dimensional cubic Schrodinger equation.

The package builds a solution backward from prescribed final data via a
contraction fixed point, evolves it forward with a split-step solver, and
quantifies how well the prescribed long-time profile is realized.
"""

from .campaigns import CAMPAIGNS, CampaignResult, run_campaign
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .evolve import (
    EvolutionState,
    asymptotic_error,
    dispersive_ratio,
    evolve,
    extract_profile,
    scattering_deviation,
    state_from_field,
    strang_step,
)
from .fitting import DecayFit, fit_decay
from .fixedpoint import (
    PicardReport,
    ProfileTrajectory,
    TimeGrid,
    apply_phi,
    backward_integral,
    contraction_probe,
    phi_eps,
    picard_iterate,
    xt_norm,
)
from .profile import (
    FINAL_DATA_KINDS,
    FinalData,
    SolverParams,
    approximate_solution,
    asymptotic_profile,
    make_final_data,
    profile_time_derivative,
    read_final_data_csv,
    write_final_data_csv,
)
from .spectral import (
    FrequencyField,
    NormBundle,
    PhysicalField,
    SpectralGrid,
    forward_transform,
    free_propagate,
    inverse_transform,
    norms,
    physical_l2,
    physical_linf,
    xi_derivative,
    xt_weight,
)
from .trilinear import (
    TrilinearSplit,
    cubic,
    cubic_difference,
    forcing,
    forcing_identity_residual,
    oracle_calibration,
    pulled_back_cubic,
    pulled_back_forcing,
    remainder_oracle,
    trilinear_split,
)

__version__ = "0.1.0"
