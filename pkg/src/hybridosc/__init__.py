"""Coupled stochastic oscillators: steady states, correlators, CQ mapping.

A numerical library and CLI for a pair of harmonically coupled oscillators,
one damped and stochastically driven, treated as a 4-dimensional
Ornstein-Uhlenbeck process.  Provides stability certificates, stationary
covariances by three independent routes, frequency-domain Green's functions
with residue-based time-domain correlators, small-coupling expansions,
mutual-information diagnostics, and the classical-quantum layer built on the
exact harmonic mapping.
"""

from .cq import (
    CQParams,
    HybridCorrelators,
    Occupation,
    ThermalReport,
    gibbs_covariances,
    hybrid_correlators,
    hybrid_equal_time,
    map_to_classical,
    occupation_from_keldysh,
    occupation_number,
    thermal_limit,
)
from .errors import (
    ClassificationFailure,
    CouplingZero,
    DegeneratePoles,
    HybridOscError,
    NotStable,
    NumericalOverflow,
    OverdampedUnsupported,
    PerfectCorrelation,
    PoleOnAxis,
    SingularSystem,
    TradeoffViolation,
)
from .model import (
    STATE_ORDER,
    DriftNoise,
    OscillatorParams,
    SystemParams,
    assemble_drift_noise,
    characteristic_polynomial,
)
from .sde import (
    EnsembleStats,
    SimConfig,
    energy_drift,
    sample_trajectory,
    simulate_ensemble,
    total_energy,
)
from .spectral import (
    CorrelatorTable,
    GreensFrequency,
    PoleSet,
    correlation_coefficient,
    correlators_exact,
    correlators_small_lambda,
    exact_equal_time,
    find_poles,
    greens,
    greens_inverse,
    mutual_information,
    perturbative_poles,
    sigma_ratio,
)
from .stability import StabilityReport, routh_hurwitz
from .steadystate import (
    closed_form_covariances,
    evolve_moments,
    lyapunov_residual,
    solve_lyapunov,
)

__version__ = "0.1.0"

__all__ = [
    "CQParams",
    "ClassificationFailure",
    "CorrelatorTable",
    "CouplingZero",
    "DegeneratePoles",
    "DriftNoise",
    "EnsembleStats",
    "GreensFrequency",
    "HybridCorrelators",
    "HybridOscError",
    "NotStable",
    "NumericalOverflow",
    "Occupation",
    "OscillatorParams",
    "OverdampedUnsupported",
    "PerfectCorrelation",
    "PoleOnAxis",
    "PoleSet",
    "STATE_ORDER",
    "SimConfig",
    "SingularSystem",
    "StabilityReport",
    "SystemParams",
    "ThermalReport",
    "TradeoffViolation",
    "assemble_drift_noise",
    "characteristic_polynomial",
    "closed_form_covariances",
    "correlation_coefficient",
    "correlators_exact",
    "correlators_small_lambda",
    "energy_drift",
    "evolve_moments",
    "exact_equal_time",
    "find_poles",
    "gibbs_covariances",
    "greens",
    "greens_inverse",
    "hybrid_correlators",
    "hybrid_equal_time",
    "lyapunov_residual",
    "map_to_classical",
    "mutual_information",
    "occupation_from_keldysh",
    "occupation_number",
    "perturbative_poles",
    "routh_hurwitz",
    "sample_trajectory",
    "sigma_ratio",
    "simulate_ensemble",
    "solve_lyapunov",
    "thermal_limit",
    "total_energy",
]
