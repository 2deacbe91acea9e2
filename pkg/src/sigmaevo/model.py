"""Model parameters, exponent formulas and the theorem-hypothesis classifier.

Every exponent used elsewhere in the package (critical exponent, decay
rates, lifespan deficiency) is computed here from a :class:`ModelParams`
and a data-regularity index ``m``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, float, Fraction]

#: relative half-width of the equality band used when inputs are not rational
BAND = 1e-12


class ParameterError(ValueError):
    """Raised when a parameter tuple violates the model's standing assumptions."""


class CriticalityError(ValueError):
    """Raised when a subcritical-only quantity is requested at or above p_crit."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of ``u_tt + (-Δ)^σ u + (-Δ)^σ1 u_t + (-Δ)^σ2 u_t = |u|^p``.

    Data are ``u(0) = eps*u0``, ``u_t(0) = eps*u1``.
    """

    n: int
    sigma: Number
    sigma1: Number
    sigma2: Number
    p: Number
    eps: Number = 1.0

    def __post_init__(self):
        validate(self)

    @property
    def conjugate_p(self):
        return self.p / (self.p - 1)

    @property
    def m1(self):
        """Integrability index of the nonlinearity, ``max(1, 2/p)``."""
        (p,) = _num(self.p)
        return max(1 + 0 * p, 2 / p)

    def replace(self, **changes) -> "ModelParams":
        d = asdict(self)
        d.update(changes)
        return ModelParams(**d)

    def to_dict(self) -> dict:
        return {k: _jsonable(v) for k, v in asdict(self).items()}


def validate(params: ModelParams) -> None:
    """Check the standing assumptions; raise :class:`ParameterError` naming the failed inequality."""
    n, s, s1, s2, p, eps = (params.n, params.sigma, params.sigma1,
                            params.sigma2, params.p, params.eps)
    problems = []
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        problems.append(f"n must be a positive integer (got {n!r})")
    for name, v in (("sigma", s), ("sigma1", s1), ("sigma2", s2), ("p", p), ("eps", eps)):
        if not isinstance(v, (int, float, Fraction)) or isinstance(v, bool) or not math.isfinite(float(v)):
            problems.append(f"{name} must be a finite real number (got {v!r})")
    if problems:
        raise ParameterError("; ".join(problems))
    if s < 1:
        problems.append(f"σ ≥ 1 violated (σ={s})")
    if s1 < 0:
        problems.append(f"σ1 ≥ 0 violated (σ1={s1})")
    if not s1 < s / 2:
        problems.append(f"σ1 < σ/2 violated: σ1 ≥ σ/2 (σ1={s1}, σ/2={s / 2})")
    if not s / 2 < s2:
        problems.append(f"σ/2 < σ2 violated: σ2 ≤ σ/2 (σ2={s2}, σ/2={s / 2})")
    if s2 > s:
        problems.append(f"σ2 ≤ σ violated (σ2={s2}, σ={s})")
    if not p > 1:
        problems.append(f"p > 1 violated (p={p})")
    if not eps > 0:
        problems.append(f"ε > 0 violated (ε={eps})")
    if problems:
        raise ParameterError("; ".join(problems))


def check_m(m: Number) -> Number:
    if isinstance(m, bool) or not isinstance(m, (int, float, Fraction)) or not 1 <= m <= 2:
        raise ParameterError(f"regularity index must satisfy 1 ≤ m ≤ 2 (got {m!r})")
    return m


# ---------------------------------------------------------------------------
# exact-or-banded arithmetic

def _is_exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def _num(*values):
    """Promote to Fraction when every input is rational, else to float."""
    if _is_exact(*values):
        return tuple(Fraction(v) for v in values)
    return tuple(float(v) for v in values)


def one_half(x):
    return Fraction(1, 2) if isinstance(x, Fraction) else 0.5


def _jsonable(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    return v


@dataclass(frozen=True)
class Comparison:
    """Outcome of comparing two quantities; ``in_band`` marks a tolerance-band tie."""

    sign: int
    in_band: bool = False


def compare(x, y) -> Comparison:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return Comparison((x > y) - (x < y))
    if math.isinf(float(x)) or math.isinf(float(y)):
        fx, fy = float(x), float(y)
        return Comparison((fx > fy) - (fx < fy))
    fx, fy = float(x), float(y)
    scale = max(abs(fx), abs(fy), 1.0)
    if abs(fx - fy) <= BAND * scale:
        return Comparison(0, in_band=fx != fy)
    return Comparison(1 if fx > fy else -1)


# ---------------------------------------------------------------------------
# exponent formulas

def p_crit(params: ModelParams, m: Number = 1):
    """Critical exponent ``1 + 2mσ/(n - 2mσ1)``.

    Raises
    ------
    CriticalityError
        If ``n <= 2mσ1`` (no finite critical exponent; every p > 1 blows up).
    """
    check_m(m)
    n, s, s1, m = _num(params.n, params.sigma, params.sigma1, m)
    denom = n - 2 * m * s1
    if compare(denom, 0 * denom).sign <= 0:
        raise CriticalityError(f"no finite critical exponent: n ≤ 2mσ1 (n={params.n}, 2mσ1={2 * m * s1})")
    return 1 + 2 * m * s / denom


def decay_exponents(params: ModelParams, m: Number = 1):
    """Signed decay rates ``(alpha_u, alpha_grad)`` of ``‖u‖_{L²}`` and ``‖|D|^σ u‖_{L²}``.

    The estimates read ``‖·‖ ≲ (1+t)^(-alpha)``; ``alpha_u`` may be negative
    (growth) for strong parabolic damping and small ``m``.
    """
    check_m(m)
    n, s, s1, m = _num(params.n, params.sigma, params.sigma1, m)
    base = n / (2 * (s - s1)) * (1 / m - one_half(m))
    alpha_u = base - s1 / (s - s1)
    alpha_grad = base + (s - 2 * s1) / (2 * (s - s1))
    return alpha_u, alpha_grad


def gamma_m(params: ModelParams, m: Number = 1):
    """Lifespan deficiency ``1 - n(p-1)/(2m(σ-σ1)) + pσ1/(σ-σ1)``; vanishes at ``p = p_crit(m)``."""
    check_m(m)
    n, s, s1, p, m = _num(params.n, params.sigma, params.sigma1, params.p, m)
    return 1 - n * (p - 1) / (2 * m * (s - s1)) + p * s1 / (s - s1)


def lifespan_slope(params: ModelParams, m: Number = 1):
    """Exponent of the lifespan power law ``T ~ eps^slope`` with ``slope = -(p-1)/gamma_m``."""
    g = gamma_m(params, m)
    if compare(g, 0 * g).sign <= 0:
        raise CriticalityError(f"critical or supercritical: γ_m ≤ 0 (γ_m={float(g):.17g})")
    return -(_num(params.p)[0] - 1) / g


def m_threshold(params: ModelParams):
    """Lower bound on m required by the global-existence theorem (before taking max with 1)."""
    n, s, s1 = (float(params.n), float(params.sigma), float(params.sigma1))
    return (math.sqrt((n + 4 * s1) ** 2 + 16 * n * (s - s1)) - n - 4 * s1) / (4 * (s - s1))


def testfn_exponent(params: ModelParams):
    """Exponent ``-2σp' + n + 2(σ-σ1)`` of R in the test-function bound (m = 1 data)."""
    n, s, s1, p = _num(params.n, params.sigma, params.sigma1, params.p)
    return -2 * s * p / (p - 1) + n + 2 * (s - s1)


# ---------------------------------------------------------------------------
# classification

class Verdict(str, enum.Enum):
    GLOBAL = "GlobalTheorem"
    BLOWUP = "BlowupTheorem"
    LOCAL = "LocalOnly"
    OUTSIDE = "OutsideAllTheorems"


@dataclass
class RegionVerdict:
    local_ok: bool
    local_reason: str
    global_ok: bool
    global_reason: str
    blowup: bool
    blowup_reason: str
    p_crit: float | None
    verdict: Verdict
    failed_conditions: list[str] = field(default_factory=list)
    band_conditions: list[str] = field(default_factory=list)
    alpha_u: float | None = None
    alpha_grad: float | None = None
    gamma_m: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        for k in ("p_crit", "alpha_u", "alpha_grad", "gamma_m"):
            if d[k] is not None:
                d[k] = float(d[k])
        return d


class _Checker:
    """Collects condition outcomes with identifiers."""

    def __init__(self):
        self.failed: list[str] = []
        self.band: list[str] = []

    def check(self, ident: str, x, op: str, y) -> bool:
        c = compare(x, y)
        if c.in_band:
            self.band.append(ident)
        ok = {"<": c.sign < 0, "<=": c.sign <= 0, ">": c.sign > 0, ">=": c.sign >= 0}[op]
        if not ok:
            self.failed.append(ident)
        return ok


def _m_upper(ch: _Checker, prefix: str, n, s1, m) -> bool:
    if s1 == 0:
        return ch.check(f"{prefix}:m<=2", m, "<=", 2 + 0 * m)
    return ch.check(f"{prefix}:m<2n/(n+4σ1)", m, "<", 2 * n / (n + 4 * s1))


def _p_upper(ch: _Checker, prefix: str, n, s, m, p) -> bool:
    if compare(n, 2 * s).sign <= 0:
        return True
    # 2σ < n < 4σ/(2-m); m = 2 puts the right end at +∞
    if compare(m, 2 + 0 * m).sign < 0 and not ch.check(f"{prefix}:n<4σ/(2-m)", n, "<", 4 * s / (2 - m)):
        return False
    return ch.check(f"{prefix}:p<=n/(n-2σ)", p, "<=", n / (n - 2 * s))


def classify(params: ModelParams, m: Number = 1) -> RegionVerdict:
    """Evaluate the local, global and blow-up hypothesis sets for ``(params, m)``."""
    check_m(m)
    n, s, s1, p, m = _num(params.n, params.sigma, params.sigma1, params.p, m)
    one = 1 + 0 * m

    # local existence
    lc = _Checker()
    local_ok = lc.check("local:m>1", m, ">", one)
    local_ok &= _m_upper(lc, "local", n, s1, m)
    local_ok &= lc.check("local:p>2/m", p, ">", 2 / m)
    local_ok &= _p_upper(lc, "local", n, s, m, p)

    # global existence
    gc = _Checker()
    thr = max(1.0, m_threshold(params))
    global_ok = gc.check("global:m>max(1,threshold)", m, ">", thr if thr > 1.0 else one)
    global_ok &= _m_upper(gc, "global", n, s1, m)
    try:
        pc = p_crit(params, m)
    except CriticalityError:
        pc = None
    if pc is None:
        gc.failed.append("global:n>2mσ1")
        global_ok = False
    else:
        global_ok &= gc.check("global:p>=p_crit", p, ">=", pc)
    global_ok &= _p_upper(gc, "global", n, s, m, p)

    # blow-up
    bc = _Checker()
    if compare(n, 2 * m * s1).sign <= 0:
        blowup = bc.check("blowup:p>1", p, ">", one)
        blowup_reason = "n ≤ 2mσ1: every p > 1"
    elif m == 1:
        blowup = bc.check("blowup:p<=1+2σ/(n-2σ1)", p, "<=", 1 + 2 * s / (n - 2 * s1))
        blowup_reason = "m = 1, n > 2σ1: p ≤ 1+2σ/(n-2σ1)"
    else:
        blowup = bc.check("blowup:p<p_crit", p, "<", pc)
        blowup_reason = "m > 1, n > 2mσ1: p < p_crit(m)"

    if global_ok:
        verdict = Verdict.GLOBAL
    elif blowup:
        verdict = Verdict.BLOWUP
    elif local_ok:
        verdict = Verdict.LOCAL
    else:
        verdict = Verdict.OUTSIDE

    au, ag = decay_exponents(params, m)
    return RegionVerdict(
        local_ok=bool(local_ok),
        local_reason="all local conditions hold" if local_ok else "failed: " + ", ".join(lc.failed),
        global_ok=bool(global_ok),
        global_reason="all global conditions hold" if global_ok else "failed: " + ", ".join(gc.failed),
        blowup=bool(blowup),
        blowup_reason=blowup_reason if blowup else "failed: " + ", ".join(bc.failed),
        p_crit=None if pc is None else float(pc),
        verdict=verdict,
        failed_conditions=lc.failed + gc.failed + bc.failed,
        band_conditions=lc.band + gc.band + bc.band,
        alpha_u=float(au),
        alpha_grad=float(ag),
        gamma_m=float(gamma_m(params, m)),
    )


def oscillatory_band(params: ModelParams, r_lo: float = 1e-8, r_hi: float = 1e8):
    """Endpoints of the set where ``r^{2σ1} + r^{2σ2} < 2 r^σ`` (complex characteristic roots).

    Returns a list of ``(r_start, r_end)`` intervals, found by sign changes of
    the log-scale discriminant on a dense grid refined with brentq.
    """
    import numpy as np
    from scipy.optimize import brentq

    s, s1, s2 = float(params.sigma), float(params.sigma1), float(params.sigma2)

    def g(logr):
        r = math.exp(logr)
        return (r ** (2 * s1) + r ** (2 * s2)) / (2 * r ** s) - 1.0

    grid = np.linspace(math.log(r_lo), math.log(r_hi), 4001)
    vals = np.array([g(x) for x in grid])
    intervals = []
    start = None
    for i in range(len(grid) - 1):
        if vals[i] >= 0 > vals[i + 1]:
            start = math.exp(brentq(g, grid[i], grid[i + 1], xtol=1e-14))
        elif vals[i] < 0 <= vals[i + 1] and start is not None:
            intervals.append((start, math.exp(brentq(g, grid[i], grid[i + 1], xtol=1e-14))))
            start = None
    return intervals
