"""Pseudo-spectral laboratory for doubly damped σ-evolution equations.

    u_tt + (-Δ)^σ u + (-Δ)^σ1 u_t + (-Δ)^σ2 u_t = |u|^p

Linear modes are propagated exactly; the power nonlinearity enters through
an exponential trapezoid (Duhamel) step.
"""
from .model import (CriticalityError, ModelParams, ParameterError, RegionVerdict, Verdict, classify,
                    decay_exponents, gamma_m, lifespan_slope, m_threshold, p_crit, testfn_exponent, validate)
from .spectral import Field, FieldState, SpectralGrid, make_grid, make_initial_data
from .propagator import (ModeCoeffs, ModePropagator, NonFiniteError, SimulationTrace, SolverOptions,
                         StepUnderflow, build_propagator, mode_coeffs, solve, step)
from .estimators import SigmaEvolutionSolver
from .diagnostics import PowerLawDecayRegressor, fit_decay, lifespan_sweep

__version__ = "0.1.0"

__all__ = [
    "CriticalityError", "ModelParams", "ParameterError", "RegionVerdict", "Verdict", "classify",
    "decay_exponents", "gamma_m", "lifespan_slope", "m_threshold", "p_crit", "testfn_exponent", "validate",
    "Field", "FieldState", "SpectralGrid", "make_grid", "make_initial_data",
    "ModeCoeffs", "ModePropagator", "NonFiniteError", "SimulationTrace", "SolverOptions", "StepUnderflow",
    "build_propagator", "mode_coeffs", "solve", "step",
    "SigmaEvolutionSolver", "PowerLawDecayRegressor", "fit_decay", "lifespan_sweep",
]
