"""Invariant suite run by ``sigmaevo check``.

Every check is a zero-argument callable returning ``(passed, detail)``;
:func:`run_all` collects them into :class:`CheckResult` rows. The suite is
sized to finish in well under a minute on one core.
"""
from __future__ import annotations

import itertools
import math
import tempfile
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import model
from .model import ModelParams
from .propagator import (SolverOptions, Stepper, build_propagator, build_propagator_from_symbols,
                         asymptotic_check, mode_coeffs, solve, Regime)
from .spectral import (Field, FieldState, frac_laplacian, gn_l2_slack, make_grid, make_initial_data,
                       random_smooth_field, scaling_defect)

CANONICAL = [(1, 0, 1), (1, 0.25, 0.75), (2, 0.5, 1.5)]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


_REGISTRY: list = []


def check(name):
    def deco(fn):
        _REGISTRY.append((name, fn))
        return fn
    return deco


def _rel(a, b, floor=1e-300):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)))


# --- model ------------------------------------------------------------------

@check("model.validate_examples")
def _validate():
    ok = True
    for args, good in [((1, 1, 0, 1, 2, 1), True), ((1, 1, 0.6, 1, 2, 1), False), ((2, 2, 0.5, 1.5, 2, 0.1), True)]:
        try:
            ModelParams(*args)
            ok &= good
        except model.ParameterError:
            ok &= not good
    return ok, "canonical tuples accepted, σ1 ≥ σ/2 rejected"


@check("model.fujita_consistency")
def _fujita():
    got = [model.p_crit(ModelParams(n, 1, 0, 1, 2), 1) for n in range(1, 7)]
    want = [1 + Fraction(2, n) for n in range(1, 7)]
    return got == want, f"p_crit = {[str(g) for g in got]}"


@check("model.m_threshold_equals_one_iff")
def _mthr():
    bad = []
    for n, s, s1 in itertools.product(range(1, 9), [1, 1.5, 2, 3], [0, 0.25, 0.4]):
        if not s1 < s / 2:
            continue
        thr = float(model.m_threshold(ModelParams(n, s, s1, s, 2)))
        if (abs(thr - 1) < 1e-12 or thr < 1) != (n <= 2 * (s + s1)):
            bad.append((n, s, s1, thr))
    return not bad, f"mismatches: {bad[:3]}"


@check("model.gamma_vanishes_at_p_crit")
def _gamma():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        s = rng.uniform(1, 3)
        s1 = rng.uniform(0, 0.49 * s)
        mm = rng.uniform(1, 2)
        n = int(rng.integers(1, 5))
        if n <= 2 * mm * s1:
            continue
        pc = float(model.p_crit(ModelParams(n, s, s1, s, 2), mm))
        g = float(model.gamma_m(ModelParams(n, s, s1, s, pc), mm))
        worst = max(worst, abs(g))
    return worst < 1e-12, f"max |γ(p_crit)| = {worst:.2e}"


@check("model.verdict_exclusive_and_split_by_p_crit")
def _split():
    P = ModelParams(2, 1, 0, 1, 2)
    bad = 0
    for mm in [Fraction(11, 10), Fraction(3, 2), Fraction(19, 10)]:
        pc = model.p_crit(P, mm)
        for dp in [Fraction(-1, 2), Fraction(-1, 10), 0, Fraction(1, 10), Fraction(1, 2)]:
            v = model.classify(P.replace(p=pc + dp), mm)
            bad += int(v.global_ok and v.blowup)
            bad += int(v.global_ok != (dp >= 0))
            bad += int(v.blowup != (dp < 0))
    return bad == 0, f"{bad} violations"


@check("model.decay_gap_identity")
def _gap():
    worst = 0.0
    for s, s1 in [(1, 0), (2, 0.5), (1.5, 0.7), (3, 1.2)]:
        au, ag = model.decay_exponents(ModelParams(1, s, s1, s, 2), 1.3)
        worst = max(worst, abs(float(ag) - float(au) - s / (2 * (s - s1))))
    return worst < 1e-12, f"max deviation {worst:.1e}"


# --- spectral ---------------------------------------------------------------

@check("spectral.round_trip")
def _roundtrip():
    g = make_grid(1, 10.0, 256)
    rng = np.random.default_rng(1)
    x = rng.standard_normal(g.shape)
    err = np.max(np.abs(g.inverse(g.forward(x)) - x)) / np.max(np.abs(x))
    return err < 1e-12, f"relative error {err:.1e}"


@check("spectral.semigroup")
def _semigroup():
    g = make_grid(2, 5.0, 32)
    f = random_smooth_field(g, np.random.default_rng(2))
    lhs = frac_laplacian(frac_laplacian(f, 0.3), 0.45).coeffs
    rhs = frac_laplacian(f, 0.75).coeffs
    err = _rel(lhs, rhs, 1e-200)
    return err < 1e-12, f"relative error {err:.1e}"


@check("spectral.scaling_identity")
def _scaling():
    worst = max(scaling_defect(s, R) for s in (0.3, 0.5, 0.9) for R in (2, 4))
    return worst < 1e-6, f"max relative defect {worst:.1e}"


@check("spectral.gagliardo_nirenberg_l2")
def _gn():
    g = make_grid(1, 10.0, 256)
    rng = np.random.default_rng(3)
    worst = -1.0
    for _ in range(30):
        f = random_smooth_field(g, rng)
        for r in (0.25, 0.5, 0.75):
            worst = max(worst, gn_l2_slack(f, r * 2.0, 2.0))
    return worst <= 1e-12, f"max slack {worst:.1e}"


@check("spectral.real_data_stays_real")
def _real():
    g = make_grid(1, 10.0, 128)
    f = random_smooth_field(g, np.random.default_rng(4))
    res = f.imag_residue()
    return res < 1e-10, f"imag residue {res:.1e}"


# --- propagator -------------------------------------------------------------

def _canon_coeffs(trip, xi):
    return mode_coeffs(xi, ModelParams(1, *trip, 2))


@check("propagator.vieta")
def _vieta():
    xi = np.geomspace(1e-4, 1e4, 400)
    worst = 0.0
    for trip in CANONICAL:
        c = _canon_coeffs(trip, xi)
        worst = max(worst, _rel(c.lambda1 + c.lambda2, -c.a), _rel(c.lambda1 * c.lambda2, c.b))
    return worst < 1e-12, f"max relative error {worst:.1e}"


@check("propagator.roots_in_left_half_plane")
def _lhp():
    xi = np.geomspace(1e-4, 1e4, 400)
    ok = all(np.all(c.lambda1.real <= 0) and np.all(c.lambda2.real <= 0)
             for c in (_canon_coeffs(t, xi) for t in CANONICAL + [(2, 0.1, 1.9)]))
    return ok, "Re λ ≤ 0"


@check("propagator.regime_matches_discriminant")
def _regime():
    xi = np.geomspace(1e-3, 1e3, 2000)
    bad = 0
    for trip in CANONICAL + [(2, 0.1, 1.9), (3, 0.2, 2.0)]:
        s, s1, s2 = trip
        c = _canon_coeffs(trip, xi)
        osc = xi ** (2 * s1) + xi ** (2 * s2) < 2 * xi ** s
        bad += int(np.sum((c.regime == Regime.OSCILLATORY) & ~osc))
        bad += int(np.sum(osc & (c.regime == Regime.OVERDAMPED)))
    return bad == 0, f"{bad} mislabelled modes"


@check("propagator.asymptotic_regimes")
def _asym():
    reps = [asymptotic_check(ModelParams(1, *t, 2)) for t in CANONICAL]
    return all(r["ok"] for r in reps), "ratios within 10% and converging"


@check("propagator.kernel_identity")
def _kernel():
    g = make_grid(1, 50.0, 4096)
    worst = 0.0
    for trip in CANONICAL:
        c = _canon_coeffs(trip, g.xi_abs)
        for h in (0.01, 0.5, 3.0):
            P = build_propagator(c, h)
            scale = np.maximum(np.abs(P.K0), np.abs(c.a * P.K1) + np.abs(P.dK1))
            worst = max(worst, float(np.max(np.abs(P.K0 - c.a * P.K1 - P.dK1) / scale)))
    return worst < 1e-10, f"max relative defect {worst:.1e}"


@check("propagator.dK0_equals_minus_b_K1")
def _dk0():
    g = make_grid(1, 50.0, 4096)
    worst = 0.0
    for trip in CANONICAL:
        c = _canon_coeffs(trip, g.xi_abs)
        P = build_propagator(c, 0.7)
        worst = max(worst, _rel(P.dK0, -c.b * P.K1))
    return worst < 1e-10, f"max relative error {worst:.1e}"


@check("propagator.small_step_limits")
def _small_h():
    c = _canon_coeffs((1, 0, 1), np.array([0.0, 0.5, 1.0, 3.0]))
    h = 1e-9
    P = build_propagator(c, h)
    ok = (np.allclose(P.K0, 1, atol=1e-7) and np.allclose(P.K1 / h, 1, atol=1e-7)
          and np.allclose(P.dK1, 1, atol=1e-7))
    return ok, "K0 → 1, K1/h → 1, dK1 → 1"


@check("propagator.mode_ode_oracle")
def _oracle():
    from scipy.integrate import solve_ivp

    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(40):
        a, b, h = rng.uniform(0, 4), rng.uniform(0, 4), rng.uniform(0.01, 3)

        def rhs(t, y):
            return [y[1], -a * y[1] - b * y[0], y[3], -a * y[3] - b * y[2],
                    y[5], -a * y[5] - b * y[4] + 1, y[7], -a * y[7] - b * y[6] + t / h]

        y = solve_ivp(rhs, (0, h), [1, 0, 0, 1, 0, 0, 0, 0], method="DOP853", rtol=1e-13, atol=1e-15).y[:, -1]
        P = build_propagator_from_symbols(a, b, h)
        got = [P.K0[0], P.dK0[0], P.K1[0], P.dK1[0], P.M0[0], P.M1[0]]
        want = [y[0], y[1], y[2], y[3], y[4], y[6]]
        scale = max(1.0, max(abs(w) for w in want))
        worst = max(worst, max(abs(gv - w) / scale for gv, w in zip(got, want)))
    return worst < 1e-9, f"max scaled error {worst:.1e}"


@check("propagator.linear_energy_dissipation")
def _energy():
    P = ModelParams(1, 1, 0, 1, 2)
    g = make_grid(1, 40.0, 512)
    st = Stepper(g, P, SolverOptions(nonlinear=False))
    s = make_initial_data("gaussian", g, P)
    E = [st.energy(s)]
    for _ in range(100):
        s, _d = st.step(s, 0.1)
        E.append(st.energy(s))
    rise = float(np.max(np.diff(E) / np.array(E[:-1])))
    return rise <= 1e-10, f"max relative increase {rise:.1e}"


@check("propagator.zero_state_stays_zero")
def _zero():
    P = ModelParams(1, 1, 0, 1, 3)
    g = make_grid(1, 10.0, 64)
    s = FieldState(Field.zeros(g), Field.zeros(g), 0.0, {})
    tr = solve(s, 1.0, P, SolverOptions(h=0.1))
    return float(np.max(np.abs(tr.final_state.u.coeffs))) == 0.0, "u ≡ 0"


@check("propagator.second_order_convergence")
def _order():
    P = ModelParams(1, 1, 0, 1, 3)
    g = make_grid(1, 20.0, 64)
    x = g.coords

    def run(h):
        s = FieldState(Field.from_values(g, np.exp(-x ** 2)), Field.from_values(g, np.exp(-x ** 2 / 2)), 0.0, {})
        return solve(s, 1.0, P, SolverOptions(h=h)).final_state.u.values

    u = [run(h) for h in (0.0125, 0.00625, 0.003125)]
    ratio = float(np.linalg.norm(u[0] - u[1]) / np.linalg.norm(u[1] - u[2]))
    return 3.4 <= ratio <= 4.6, f"Richardson ratio {ratio:.3f}"


@check("propagator.nonlinear_run_stays_real")
def _real_run():
    P = ModelParams(1, 1, 0, 1, 2, eps=0.5)
    g = make_grid(1, 20.0, 128)
    s = make_initial_data("gaussian", g, P)
    tr = solve(s, 2.0, P, SolverOptions(h=0.05))
    res = tr.final_state.u.imag_residue()
    return res < 1e-10, f"imag residue {res:.1e}"


# --- diagnostics ------------------------------------------------------------

@check("diagnostics.synthetic_decay_recovery")
def _synth():
    from .diagnostics import PowerLawDecayRegressor

    rng = np.random.default_rng(6)
    t = np.geomspace(10, 1000, 60)
    worst = 0.0
    for alpha in (0.25, 0.5, 1.0):
        y = 3.0 * (1 + t) ** (-alpha) * (1 + 1e-4 * rng.standard_normal(t.size))
        worst = max(worst, abs(PowerLawDecayRegressor().fit(t, y).exponent_ - alpha))
    return worst <= 0.01, f"max exponent error {worst:.1e}"


@check("diagnostics.testfn_critical_exponent")
def _kappa():
    k = float(model.testfn_exponent(ModelParams(1, 1, 0, 1, 3)))
    return abs(k) <= 1e-12, f"exponent {k}"


@check("diagnostics.eta_profile")
def _eta():
    from .diagnostics import eta

    s = np.linspace(0, 1.2, 2401)
    e = eta(s)
    ok = np.all(e[s <= 0.5] == 1) and np.all(e[s >= 1] == 0) and np.all(np.diff(e) <= 0)
    mid = (s > 0.6) & (s < 0.9)
    smooth = np.isfinite(eta(s, 2)).all() and np.all(np.diff(e[mid]) < 0)
    return bool(ok and smooth), "1 on [0,1/2], decreasing, 0 from 1"


@check("cli.store_resume")
def _store():
    from .store import SweepStore

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "s.jsonl")
        st = SweepStore(path)
        st.put({"a": 1}, {"x": 1.0})
        with open(path, "a") as fh:
            fh.write('{"key": "torn')
        st2 = SweepStore(path)
        wrote = st2.put({"a": 1}, {"x": 2.0})
        st2.put({"a": 2}, {"x": 3.0})
        n = len(SweepStore(path))
    return (not wrote) and n == 2, f"{n} records after resume"


def run_all(names=None) -> list[CheckResult]:
    out = []
    for name, fn in _REGISTRY:
        if names and name not in names:
            continue
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out


def names() -> list[str]:
    return [n for n, _ in _REGISTRY]
