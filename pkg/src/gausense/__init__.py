"""Distributed Gaussian quantum phase sensing.

Phase-space Gaussian state algebra, quantum and classical Fisher information
for multimode phase estimation, optimal probe states and measurements, lossy
error bounds, and a Monte Carlo harness demonstrating Cramér-Rao saturation.
"""

__version__ = "0.1.0"

from .core import (
    DEFAULT_POLICY,
    GaussianState,
    LossChannel,
    NumericError,
    NumericPolicy,
    SymplecticOp,
    apply_loss,
    apply_symplectic,
    beam_splitter_symplectic,
    coherent_state,
    is_pure,
    mean_photon_number,
    phase_shift_symplectic,
    photon_number_variance,
    product_state,
    single_mode_squeezer,
    squeezed_vacuum,
    symplectic_eigenvalues,
    symplectic_form,
    vacuum_state,
)
from .fisher import (
    FisherMatrix,
    SensingScenario,
    UltimateBounds,
    WeightVector,
    crb_linear,
    crb_trace,
    generator_variance,
    qfim_general,
    qfim_isothermal,
    qfim_pure,
    ultimate_bounds,
)
from .probes import (
    EnergyAllocation,
    SymmetricParams,
    coherent_product_probe,
    oegs_params,
    oegs_state,
    opgs_allocation,
    opgs_probe,
    optimize_symmetric,
    reduced_entropy,
    symmetric_family,
    symmetric_to_state,
    synthesize_oegs_bsn,
)
from .measurements import (
    EnhancementRatios,
    GaussianMeasurement,
    HomodyneConfig,
    LossyBounds,
    enhancement_ratios,
    general_dyne_fim,
    hd_gd_boundary,
    homodyne_covariance,
    homodyne_fim,
    lossy_bounds,
    optimal_gd_bound,
    optimal_homodyne_angle,
    optimal_homodyne_config,
    optimize_homodyne_angle,
)
from .montecarlo import (
    EstimationReport,
    SampleBatch,
    StudyRow,
    crb_saturation_study,
    empirical_score_fim,
    mle_phi_star,
    reference_homodyne_setup,
    sample_homodyne,
)

__all__ = [name for name in dir() if not name.startswith("_")]
