"""Numerical lab for scalar conservation laws with nonlinear viscosity.

Modules
-------
flux_laws       convective and viscous fluxes, Godunov interface flux
wave_profiles   rarefaction fan, smoothed rarefaction, heat-kernel contact wave
pde_solver      conservative finite-volume solver with SSP-RK2 stepping
decay_analysis  norms, deviations and decay-exponent verdicts
harness         experiment configs, run directories, reports and plots
"""

__version__ = "0.1.0"

from .flux_laws import (
    ConvexFlux, FluxKind, FluxRangeError, ViscosityKind, ViscosityLaw,
    flux_eval, flux_prime, flux_prime_inv, godunov_flux, sigma_eval, sigma_prime,
)
from .fitting import DecayDataError, DecayFit, fit_decay
from .wave_profiles import (
    CharacteristicMap, ProfileDomainError, ProfileKind, WaveProfile,
    characteristic_foot, contact_wave, kq_constant, profile_dt, profile_dx, profile_dxx,
    profile_envelopes, profile_value, rarefaction, riemann_data, smooth_w, smooth_w_dt,
    smooth_w_dx, smoothed_rarefaction, speed_field_checks,
)
from .pde_solver import (
    ConfigError, GridSolution, InitialData, InitialKind, NumericalBlowupError, RunMonitor,
    SolverConfig, build_initial, solve, stable_dt, step,
)
from .decay_analysis import (
    DecayReport, Deviation, InsufficientSpanError, derivative_norms, deviation, interpolation_check,
    linf_norm, lq_norm, norm_series, theorem_check, theorem_line, weighted_dissipation,
)
