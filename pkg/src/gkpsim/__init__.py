"""Numerical simulator for adaptive heralded generation of grid (GKP) qubits.

The pipeline, bottom to top:

- specfun: stable Hermite-Gauss evaluation and envelope shapes
- wavefield: grid-sampled pure states and Gaussian operations
- targets: reference comb states and the effective-squeezing metric
- gps: one generalized-photon-subtraction unit (heralded states, counts,
  parameter solving, per-count adaptive mapping)
- breeding: beam-splitter chain with homodyne conditioning and the output
  Gaussian correction
- factory: the multiplexed Monte Carlo experiment and its statistics
- cli: command line front end emitting tables and plot data
"""

__version__ = "0.1.0"

from .errors import (
    CapabilityError,
    ConfigurationError,
    DegenerateConditioningError,
    DegenerateStateError,
    GkpSimError,
    GridOverflowError,
    MetricUndefinedError,
)
from .specfun import (
    HermiteTable,
    comb_wavenumber,
    gaussian_power,
    hermite_phi,
    hermite_table,
)
from .wavefield import (
    GridSpec,
    GridWavefunction,
    displace_p,
    displace_x,
    eval_at,
    fidelity,
    from_samples,
    inner_product,
    normalize,
    squeeze,
    to_momentum,
    to_position,
)
from .targets import (
    EffectiveSqueezing,
    SensorParams,
    breeding_target,
    effective_squeezing,
    from_decibels,
    imaginary_fraction,
    phase_reference_offset,
    sensor_state,
    to_decibels,
)
from .gps import (
    GpsOutcome,
    GpsParams,
    adaptive_breeding_input,
    heralded_state_approx,
    heralded_state_exact,
    p_ngs,
    photon_distribution,
    solve_params,
    two_mode_conditional,
)
from .breeding import (
    BreedingPlan,
    GaussianCorrection,
    HomodyneRecord,
    breed,
    bs_condition,
    homodyne_density,
    optimize_correction,
    sample_outcome,
)
from .factory import (
    FactoryConfig,
    ProbabilityReport,
    TrialRecord,
    analytic_total,
    cat_baseline_config,
    estimate,
    run_conditioned_trial,
    run_trial,
    scatter_metrics,
    simulate,
    solve_for_config,
    sweep_m,
)
