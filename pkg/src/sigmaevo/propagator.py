"""Exact per-mode linear propagation and an exponential trapezoid integrator.

Each Fourier mode obeys ``w'' + a w' + b w = N̂`` with damping symbol
``a = |ξ|^{2σ1} + |ξ|^{2σ2}`` and dispersion symbol ``b = |ξ|^{2σ}``.
The homogeneous flow over a step ``h`` is the matrix
``[[K0, K1], [dK0, dK1]]`` built from the characteristic roots; the
nonlinearity enters through the Duhamel moments ``M0`` and ``M1``.
"""
from __future__ import annotations

import enum
import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from ._phi import GAP_SWITCH, exp_divdiff, phi_divdiff
from .model import ModelParams
from .spectral import Field, FieldState, SpectralGrid, nonzero_mode_norm, power_symbol, zero_mode_norm

DOUBLE_ROOT_TOL = 1e-12


class Regime(enum.IntEnum):
    OVERDAMPED = 0
    OSCILLATORY = 1
    DOUBLE_ROOT = 2


class NonFiniteError(ArithmeticError):
    """A spectral coefficient became NaN or infinite (numerical blow-up)."""


class StepUnderflow(RuntimeError):
    """The adaptive controller hit ``h_min`` with the error estimate still above tolerance."""


@dataclass
class ModeCoeffs:
    """Symbols and characteristic roots for an array of ``|ξ|`` values."""

    a: np.ndarray
    b: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    regime: np.ndarray

    @property
    def shape(self):
        return self.a.shape


def mode_coeffs(xi_abs, params: ModelParams) -> ModeCoeffs:
    """Symbols ``a``, ``b`` and roots of ``λ² + aλ + b = 0`` for every ``|ξ|``.

    ``lambda1`` is the root with ``+√`` (slow branch), ``lambda2`` the ``-√`` one.
    Real roots are formed without cancellation via ``λ1 = b/λ2``.
    """
    r = np.atleast_1d(np.asarray(xi_abs, dtype=float))
    s, s1, s2 = float(params.sigma), float(params.sigma1), float(params.sigma2)
    a = power_symbol(r, 2 * s1) + power_symbol(r, 2 * s2)
    b = power_symbol(r, 2 * s)
    disc = a * a - 4 * b
    double = np.abs(disc) <= DOUBLE_ROOT_TOL * np.maximum(np.maximum(a * a, 4 * b), 1e-300)
    osc = (disc < 0) & ~double
    real = (disc > 0) & ~double

    lam1 = np.empty(r.shape, dtype=complex)
    lam2 = np.empty(r.shape, dtype=complex)
    sq = np.sqrt(np.abs(disc))
    l2 = -0.5 * (a + sq)
    lam2[real] = l2[real]
    with np.errstate(divide="ignore", invalid="ignore"):
        lam1[real] = np.where(l2[real] != 0, b[real] / l2[real], 0.0)
    lam1[osc] = -0.5 * a[osc] + 0.5j * sq[osc]
    lam2[osc] = -0.5 * a[osc] - 0.5j * sq[osc]
    lam1[double] = lam2[double] = -0.5 * a[double]

    regime = np.full(r.shape, Regime.OVERDAMPED, dtype=np.int8)
    regime[osc] = Regime.OSCILLATORY
    regime[double] = Regime.DOUBLE_ROOT
    return ModeCoeffs(a, b, lam1, lam2, regime)


def asymptotic_check(params: ModelParams, small=(1e-3, 1e-4), large=(1e3, 1e4)) -> dict:
    """Compare the roots with their small- and large-frequency power laws.

    Ratios ``λ1/(-|ξ|^{2(σ-σ1)})``, ``λ2/(-|ξ|^{2σ1})`` at small ``|ξ|`` and
    ``λ1/(-|ξ|^{2(σ-σ2)})``, ``λ2/(-|ξ|^{2σ2})`` at large ``|ξ|``. The report
    is ``ok`` when every ratio lies in [0.9, 1.1] and moves toward 1 along
    each probe sequence.
    """
    s, s1, s2 = float(params.sigma), float(params.sigma1), float(params.sigma2)
    probes = {
        "small": (np.asarray(small, dtype=float), 2 * (s - s1), 2 * s1),
        "large": (np.asarray(large, dtype=float), 2 * (s - s2), 2 * s2),
    }
    report = {"ok": True, "warnings": [], "ratios": {}}
    for name, (xi, e1, e2) in probes.items():
        c = mode_coeffs(xi, params)
        if np.any(c.regime == Regime.OSCILLATORY):
            report["warnings"].append(f"{name}-frequency probe lies in the oscillatory set")
        r1 = (c.lambda1 / -(xi ** e1)).real
        r2 = (c.lambda2 / -(xi ** e2)).real
        report["ratios"][name] = {"xi": xi.tolist(), "lambda1": r1.tolist(), "lambda2": r2.tolist()}
        for r in (r1, r2):
            inside = bool(np.all((r >= 0.9) & (r <= 1.1)))
            dev = np.abs(r - 1.0)
            monotone = bool(np.all(np.diff(dev) <= 1e-15))
            report["ok"] &= inside and monotone
    return report


@dataclass
class ModePropagator:
    """Homogeneous flow and Duhamel weights for one step ``h``.

    ``M0 = ∫_0^h K1(h-s) ds`` and ``M1 = ∫_0^h (s/h) K1(h-s) ds``; the matching
    velocity weights are ``dM0 = K1`` and ``dM1 = M0/h``.
    """

    coeffs: ModeCoeffs
    step: float
    K0: np.ndarray
    K1: np.ndarray
    dK0: np.ndarray
    dK1: np.ndarray
    M0: np.ndarray
    M1: np.ndarray

    @property
    def dM0(self):
        return self.K1

    @property
    def dM1(self):
        return self.M0 / self.step


def build_propagator(coeffs: ModeCoeffs, h: float) -> ModePropagator:
    if not h > 0:
        raise ValueError("step must be positive")
    a, b = coeffs.a, coeffs.b
    z1 = coeffs.lambda1 * h
    z2 = coeffs.lambda2 * h
    z1 = np.where(coeffs.regime == Regime.DOUBLE_ROOT, -0.5 * a * h, z1)
    z2 = np.where(coeffs.regime == Regime.DOUBLE_ROOT, -0.5 * a * h, z2)

    E0 = exp_divdiff(z1, z2)
    K1 = h * E0
    e1, e2 = np.exp(z1), np.exp(z2)
    mid = 0.5 * (z1 + z2)
    close = np.abs(z1 - z2) <= GAP_SWITCH * np.maximum(1.0, np.abs(mid))

    # midpoint form near coincident roots, printed two-root formulas elsewhere
    avg = 0.5 * (e1 + e2)
    K0 = avg + 0.5 * a * h * E0
    dK1 = avg - 0.5 * a * h * E0
    far = ~close
    if far.any():
        l1, l2 = coeffs.lambda1[far], coeffs.lambda2[far]
        gap = l1 - l2
        K0[far] = (l1 * e2[far] - l2 * e1[far]) / gap
        dK1[far] = (l1 * e1[far] - l2 * e2[far]) / gap
    M0 = h * h * phi_divdiff(1, z1, z2)
    M1 = h * h * phi_divdiff(2, z1, z2)
    dK0 = -b * K1
    return ModePropagator(coeffs, float(h), K0.real, K1.real, dK0.real, dK1.real, M0.real, M1.real)


def build_propagator_from_symbols(a, b, h) -> ModePropagator:
    """Propagator for raw symbol values ``(a, b)``, bypassing the frequency map."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    disc = a * a - 4 * b
    double = np.abs(disc) <= DOUBLE_ROOT_TOL * np.maximum(np.maximum(a * a, 4 * b), 1e-300)
    osc = (disc < 0) & ~double
    real = (disc > 0) & ~double
    sq = np.sqrt(np.abs(disc))
    lam1 = np.empty(a.shape, dtype=complex)
    lam2 = np.empty(a.shape, dtype=complex)
    l2 = -0.5 * (a + sq)
    lam2[real] = l2[real]
    with np.errstate(divide="ignore", invalid="ignore"):
        lam1[real] = np.where(l2[real] != 0, b[real] / l2[real], 0.0)
    lam1[osc] = -0.5 * a[osc] + 0.5j * sq[osc]
    lam2[osc] = -0.5 * a[osc] - 0.5j * sq[osc]
    lam1[double] = lam2[double] = -0.5 * a[double]
    regime = np.full(a.shape, Regime.OVERDAMPED, dtype=np.int8)
    regime[osc] = Regime.OSCILLATORY
    regime[double] = Regime.DOUBLE_ROOT
    return build_propagator(ModeCoeffs(a, b, lam1, lam2, regime), h)


# ---------------------------------------------------------------------------
# nonlinearity

def _pad_axis(c: np.ndarray, axis: int, M: int) -> np.ndarray:
    N = c.shape[axis]
    h = N // 2
    shape = list(c.shape)
    shape[axis] = M
    out = np.zeros(shape, dtype=complex)
    take = lambda arr, sl: arr[(slice(None),) * axis + (sl,)]
    put = lambda sl: (slice(None),) * axis + (sl,)
    out[put(slice(0, h))] = take(c, slice(0, h))
    out[put(slice(M - h + 1, M))] = take(c, slice(h + 1, N))
    nyq = 0.5 * take(c, slice(h, h + 1))
    out[put(slice(h, h + 1))] = nyq
    out[put(slice(M - h, M - h + 1))] = nyq
    return out


def _truncate_axis(c: np.ndarray, axis: int, N: int) -> np.ndarray:
    M = c.shape[axis]
    h = N // 2
    take = lambda sl: c[(slice(None),) * axis + (sl,)]
    nyq = take(slice(h, h + 1)) + take(slice(M - h, M - h + 1))
    return np.concatenate([take(slice(0, h)), nyq, take(slice(M - h + 1, M))], axis=axis)


def power_nonlinearity(u_hat: np.ndarray, grid: SpectralGrid, p: float, dealias: bool = True) -> np.ndarray:
    """FFT coefficients of ``|u|^p``, evaluated on a 2x refined grid when ``dealias``."""
    import scipy.fft as sfft

    if not dealias:
        u = sfft.ifftn(u_hat).real
        return sfft.fftn(np.abs(u) ** p)
    N = grid.points
    M = 2 * N
    c = u_hat
    for ax in range(grid.n):
        c = _pad_axis(c, ax, M)
    scale = (M / N) ** grid.n
    u = sfft.ifftn(c).real * scale
    w = sfft.fftn(np.abs(u) ** p) / scale
    for ax in range(grid.n):
        w = _truncate_axis(w, ax, N)
    return w


# ---------------------------------------------------------------------------
# time stepping

@dataclass
class SolverOptions:
    """Integrator settings. ``blowup_threshold=None`` means ``1e8·max‖(u, u_t)(0)‖_∞ + 1``."""

    h: float = 0.05
    adaptive: bool = False
    tol: float = 1e-6
    h_min: float = 1e-12
    h_max: float = 1.0
    max_step: float = math.inf
    nonlinear: bool = True
    dealias: bool = True
    blowup_threshold: float | None = None
    sample_times: tuple | list | None = None
    snapshot_times: tuple | list | None = None
    record_steps: bool = False
    max_steps: int = 10_000_000


class Stepper:
    """Caches propagators per step size for one grid and parameter set."""

    def __init__(self, grid: SpectralGrid, params: ModelParams, options: SolverOptions | None = None,
                 cache_size: int = 64):
        self.grid = grid
        self.params = params
        self.options = options or SolverOptions()
        self.coeffs = mode_coeffs(grid.xi_abs.ravel(), params)
        self._cache: OrderedDict[float, ModePropagator] = OrderedDict()
        self._cache_size = cache_size
        self._sym_sigma = grid.symbol(float(params.sigma) / 2)

    def propagator(self, h: float) -> ModePropagator:
        key = float(h)
        prop = self._cache.get(key)
        if prop is None:
            prop = build_propagator(self.coeffs, key)
            shape = self.grid.shape
            for name in ("K0", "K1", "dK0", "dK1", "M0", "M1"):
                setattr(prop, name, getattr(prop, name).reshape(shape))
            self._cache[key] = prop
            if len(self._cache) > self._cache_size:
                self._cache.popitem(last=False)
        else:
            self._cache.move_to_end(key)
        return prop

    def nonlinear(self, u_hat):
        return power_nonlinearity(u_hat, self.grid, float(self.params.p), self.options.dealias)

    def step(self, state: FieldState, h: float):
        """Advance one step; returns ``(new_state, discrepancy)``.

        The discrepancy is the relative L² gap between predictor and corrector,
        zero for linear runs.
        """
        P = self.propagator(h)
        u, v = state.u.coeffs, state.v.coeffs
        lin_u = P.K0 * u + P.K1 * v
        lin_v = P.dK0 * u + P.dK1 * v
        if self.options.nonlinear:
            N0 = self.nonlinear(u)
            u_pred = lin_u + P.M0 * N0
            N1 = self.nonlinear(u_pred)
            dM1 = P.M0 / h
            u_new = lin_u + (P.M0 - P.M1) * N0 + P.M1 * N1
            v_new = lin_v + (P.K1 - dM1) * N0 + dM1 * N1
            top = np.sqrt(np.sum(np.abs(u_new) ** 2))
            diff = np.sqrt(np.sum(np.abs(u_new - u_pred) ** 2))
            disc = float(diff / top) if top > 0 else float(diff)
        else:
            u_new, v_new, disc = lin_u, lin_v, 0.0
        if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(v_new))):
            raise NonFiniteError(f"non-finite coefficients after step h={h} at t={state.time}")
        new = FieldState(Field(self.grid, u_new), Field(self.grid, v_new), state.time + h, state.meta)
        return new, disc

    def energy(self, state: FieldState) -> float:
        g = self.grid
        scale = g.cell_volume / g.points ** g.n
        return float(scale * (np.sum(self._sym_sigma ** 2 * np.abs(state.u.coeffs) ** 2)
                              + np.sum(np.abs(state.v.coeffs) ** 2)))


def step(state: FieldState, h: float, params: ModelParams, options: SolverOptions | None = None):
    """Single exponential-trapezoid step; see :meth:`Stepper.step`."""
    options = options or SolverOptions()
    if h > options.max_step:
        raise ValueError(f"h={h} exceeds max_step={options.max_step}")
    new, _ = Stepper(state.grid, params, options).step(state, h)
    return new


@dataclass
class SimulationTrace:
    """Sampled norms and solver events of one run."""

    t: list = field(default_factory=list)
    L2: list = field(default_factory=list)
    Hsigma_dot: list = field(default_factory=list)
    Linf: list = field(default_factory=list)
    Lq_m1: list = field(default_factory=list)
    zero_mode: list = field(default_factory=list)
    L2_nonzero: list = field(default_factory=list)
    h_used: list = field(default_factory=list)
    nl_norms: dict = field(default_factory=dict)
    energy: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    blowup: bool = False
    blowup_time: float | None = None
    status: str = "running"
    zero_mode_flag: bool = False
    meta: dict = field(default_factory=dict)
    params: ModelParams | None = None
    grid: SpectralGrid | None = None
    final_state: FieldState | None = None

    def column(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name), dtype=float)

    CSV_COLUMNS = ("t", "L2", "Hsigma_dot", "Linf", "Lq_m1", "zero_mode", "h_used", "blowup_flag")

    def rows(self):
        for i in range(len(self.t)):
            flag = int(self.blowup and i == len(self.t) - 1)
            yield (self.t[i], self.L2[i], self.Hsigma_dot[i], self.Linf[i], self.Lq_m1[i],
                   self.zero_mode[i], self.h_used[i], flag)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(self.CSV_COLUMNS) + "\n")
            for row in self.rows():
                fh.write(",".join(f"{x:.17g}" if isinstance(x, float) else str(x) for x in row) + "\n")


def nonlinear_betas(params: ModelParams) -> tuple[float, float, float]:
    m1 = float(params.m1)
    return (m1, 0.5 * (m1 + 2.0), 2.0)


def _record(trace: SimulationTrace, state: FieldState, stepper: Stepper, h_used: float):
    from .spectral import norm_Lq, norm_sobolev

    p = float(stepper.params.p)
    u = state.u
    vals = u.values
    trace.t.append(float(state.time))
    trace.L2.append(norm_Lq(u, 2))
    trace.Hsigma_dot.append(norm_sobolev(u, float(stepper.params.sigma)))
    trace.Linf.append(float(np.max(np.abs(vals))))
    for beta in nonlinear_betas(stepper.params):
        val = norm_Lq(vals, p * beta, stepper.grid) ** p
        trace.nl_norms.setdefault(beta, []).append(val)
    trace.Lq_m1.append(trace.nl_norms[nonlinear_betas(stepper.params)[0]][-1])
    zm = zero_mode_norm(u)
    trace.zero_mode.append(zm)
    trace.L2_nonzero.append(nonzero_mode_norm(u))
    trace.h_used.append(float(h_used))
    trace.energy.append(stepper.energy(state))
    if float(stepper.params.sigma1) > 0 and trace.L2[-1] > 0 and zm > 0.01 * trace.L2[-1]:
        trace.zero_mode_flag = True


def solve(initial: FieldState, t_end: float, params: ModelParams,
          options: SolverOptions | None = None) -> SimulationTrace:
    """Integrate from ``initial.time`` to ``t_end``.

    Stops early with ``blowup=True`` when the max norm exceeds the threshold,
    a coefficient turns non-finite, or the adaptive controller underflows.
    """
    options = options or SolverOptions()
    if not t_end > initial.time:
        raise ValueError("t_end must exceed the initial time")
    if options.h > options.max_step:
        raise ValueError(f"h={options.h} exceeds max_step={options.max_step}")
    stepper = Stepper(initial.grid, params, options)
    t0 = float(initial.time)
    samples = sorted(float(s) for s in (() if options.sample_times is None else options.sample_times) if t0 < s <= t_end)
    if not samples or samples[-1] < t_end:
        samples.append(float(t_end))
    snap_times = sorted(float(s) for s in (() if options.snapshot_times is None else options.snapshot_times) if t0 <= s <= t_end)
    stops = sorted(set(samples) | set(s for s in snap_times if s > t0))
    sample_set, snap_set = set(samples), set(snap_times)

    ref = max(float(np.max(np.abs(initial.u.values))), float(np.max(np.abs(initial.v.values))))
    threshold = options.blowup_threshold if options.blowup_threshold is not None else 1e8 * ref + 1.0

    trace = SimulationTrace(params=params, grid=initial.grid, meta=dict(initial.meta))
    trace.meta["blowup_threshold"] = threshold
    _record(trace, initial, stepper, 0.0)
    if t0 in snap_set:
        trace.snapshots.append((t0, initial.u.values.copy(), initial.v.values.copy()))

    state = initial
    h = min(options.h, options.max_step, options.h_max if options.adaptive else math.inf)
    stop_idx = 0
    n_steps = 0
    last_h = 0.0
    trace.status = "completed"
    while stop_idx < len(stops):
        target = stops[stop_idx]
        remaining = target - state.time
        if remaining <= 1e-13 * max(1.0, abs(target)):
            state = FieldState(state.u, state.v, target, state.meta)
            if target in sample_set:
                _record(trace, state, stepper, last_h)
            if target in snap_set:
                trace.snapshots.append((target, state.u.values.copy(), state.v.values.copy()))
            stop_idx += 1
            continue
        h_try = min(h, remaining)
        try:
            new, disc = stepper.step(state, h_try)
        except NonFiniteError:
            if options.adaptive and h_try > options.h_min:
                h = max(h_try / 2, options.h_min)
                continue
            trace.blowup, trace.status, trace.blowup_time = True, "nonfinite", state.time
            break
        if options.adaptive and disc > options.tol:
            if h_try <= options.h_min * (1 + 1e-12):
                trace.blowup, trace.status, trace.blowup_time = True, "step_underflow", state.time
                break
            h = max(h_try / 2, options.h_min)
            continue
        n_steps += 1
        last_h = h_try
        linf = float(np.max(np.abs(new.u.values)))
        if options.record_steps:
            trace.steps.append((new.time, h_try, disc, stepper.energy(new)))
        if linf > threshold or not math.isfinite(linf):
            # one bisection pass to refine the crossing time
            t_cross = new.time
            try:
                half, _ = stepper.step(state, h_try / 2)
                if float(np.max(np.abs(half.u.values))) > threshold:
                    t_cross = half.time
            except NonFiniteError:
                t_cross = state.time + h_try / 2
            state = new
            _record(trace, state, stepper, h_try)
            trace.blowup, trace.status, trace.blowup_time = True, "blowup", t_cross
            break
        state = new
        if options.adaptive and disc < options.tol / 10 and h_try == h:
            h = min(2 * h, options.h_max, options.max_step)
        if n_steps >= options.max_steps:
            trace.status = "max_steps"
            break
    trace.final_state = state
    trace.meta["n_steps"] = n_steps
    return trace
