"""Tunnelling through a barrier under a time-dependent measurement
perturbation: analytic two-state model, tunnelling-time estimators and a
Crank-Nicolson reference propagator."""

__version__ = "0.1.0"

from .core_model import (
    HBAR,
    BarrierSpec,
    EnergyPair,
    Particle,
    PerturbationSpec,
    perturbation_at,
    perturbation_phase_integral,
    potential_at,
)
from .coupling import (
    CouplingSolution,
    OverlapMatrix,
    RabiParameters,
    TransitionMatrix,
    amplitude_coefficients,
    ode_residual_profile,
    overlap_matrix,
    rabi_frequencies,
    solve_coupling,
    transition_matrix,
)
from .density import (
    DensityGrid,
    DensitySolution,
    density_grid,
    envelope,
    rho_general,
    rho_rectangular,
    rho_spatial_derivative,
)
from .stationary import (
    MatchingCoefficients,
    WaveVectors,
    evanescent_kappa,
    evanescent_waves,
    exact_rectangular_transmission,
    incident_wavevector,
    match_boundaries,
)
from .tunnelling_time import (
    DispersionProfile,
    TunnellingTimes,
    hartman_scan,
    measured_time_bound,
    stop_time_exact,
    stop_time_simplified,
    traversal_time_transfer_matrix,
)
