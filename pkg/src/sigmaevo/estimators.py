"""Estimator-style wrapper around :func:`sigmaevo.propagator.solve`."""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .model import ModelParams
from .propagator import SolverOptions, solve
from .spectral import FieldState


class SigmaEvolutionSolver(BaseEstimator):
    """Integrate one initial state; hyperparameters are the model and solver settings.

    ``fit(state)`` runs the simulation and stores ``trace_``, ``final_state_``
    and ``blowup_``. ``get_params`` / ``set_params`` round-trip every setting,
    so solvers can be cloned for sweeps.
    """

    def __init__(self, sigma=1.0, sigma1=0.0, sigma2=1.0, p=2.0, eps=1.0, t_end=1.0, h=0.05,
                 adaptive=False, tol=1e-6, nonlinear=True, sample_times=None):
        self.sigma = sigma
        self.sigma1 = sigma1
        self.sigma2 = sigma2
        self.p = p
        self.eps = eps
        self.t_end = t_end
        self.h = h
        self.adaptive = adaptive
        self.tol = tol
        self.nonlinear = nonlinear
        self.sample_times = sample_times

    def _params(self, n: int) -> ModelParams:
        return ModelParams(n, self.sigma, self.sigma1, self.sigma2, self.p, self.eps)

    def fit(self, X: FieldState, y=None):
        if not isinstance(X, FieldState):
            raise TypeError("fit expects a FieldState as initial data")
        params = self._params(X.grid.n)
        opts = SolverOptions(h=self.h, adaptive=self.adaptive, tol=self.tol, nonlinear=self.nonlinear,
                             sample_times=self.sample_times)
        self.params_ = params
        self.trace_ = solve(X, X.time + self.t_end, params, opts)
        self.final_state_ = self.trace_.final_state
        self.blowup_ = self.trace_.blowup
        return self

    def transform(self, X: FieldState) -> FieldState:
        """Final state reached from ``X`` (refits on ``X``)."""
        return self.fit(X).final_state_

    def norms(self, kind: str = "L2"):
        check_is_fitted(self, "trace_")
        return self.trace_.column("t"), self.trace_.column(kind)
