"""Periodic-grid spectral infrastructure.

The whole space is replaced by the torus ``[-L, L)^n`` sampled on ``N``
points per dimension. Fields are stored as unnormalised FFT coefficients
(``scipy.fft.fftn`` of the physical samples) in standard FFT ordering, so
wavenumber ``k`` sits at index ``k mod N`` and carries frequency ``πk/L``.
"""
from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft
from scipy.optimize import brentq

from .model import ModelParams, check_m

_MAGIC = b"SGEF"


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on ``[-L, L)^n`` with ``N`` points per axis."""

    n: int
    half_length: float
    points: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2 (got {self.n})")
        if not self.half_length > 0:
            raise ValueError(f"half_length must be positive (got {self.half_length})")
        if self.points < 8 or self.points % 2:
            raise ValueError(f"points per dimension must be even and ≥ 8 (got {self.points})")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.points

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.n

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """1-D frequencies ``πk/L`` in FFT order (k = 0..N/2-1, -N/2..-1)."""
        k = np.fft.fftfreq(self.points, d=1.0 / self.points)
        return np.pi * k / self.half_length

    @cached_property
    def coords(self) -> np.ndarray:
        return -self.half_length + self.spacing * np.arange(self.points)

    @cached_property
    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.coords] * self.n), indexing="ij"))

    @cached_property
    def radius(self) -> np.ndarray:
        """``|x|`` at every grid point."""
        return np.sqrt(sum(c * c for c in self.mesh))

    @cached_property
    def xi_abs(self) -> np.ndarray:
        """``|ξ|`` at every mode, in FFT order."""
        ks = np.meshgrid(*([self.wavenumbers] * self.n), indexing="ij")
        return np.sqrt(sum(k * k for k in ks))

    @property
    def xi_min(self) -> float:
        return math.pi / self.half_length

    def forward(self, values: np.ndarray) -> np.ndarray:
        return sfft.fftn(values)

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return sfft.ifftn(coeffs)

    def symbol(self, theta: float) -> np.ndarray:
        """``|ξ|^{2θ}`` on the grid with the convention ``|0|^0 = 1``."""
        return power_symbol(self.xi_abs, 2.0 * theta)


def make_grid(n: int, L: float, N: int) -> SpectralGrid:
    return SpectralGrid(int(n), float(L), int(N))


def power_symbol(r: np.ndarray, exponent: float) -> np.ndarray:
    """``r**exponent`` with ``0**0 = 1`` and ``0**e = 0`` for ``e > 0``."""
    r = np.asarray(r, dtype=float)
    if exponent == 0:
        return np.ones_like(r)
    out = np.zeros_like(r)
    nz = r > 0
    out[nz] = r[nz] ** exponent
    return out


@dataclass
class Field:
    """A scalar field on a :class:`SpectralGrid`, held as FFT coefficients."""

    grid: SpectralGrid
    coeffs: np.ndarray

    @classmethod
    def from_values(cls, grid: SpectralGrid, values) -> "Field":
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {grid.shape}")
        return cls(grid, grid.forward(values))

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "Field":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def physical(self) -> np.ndarray:
        return self.grid.inverse(self.coeffs)

    @property
    def values(self) -> np.ndarray:
        """Real part of the physical samples."""
        return self.physical().real

    def imag_residue(self) -> float:
        """Largest imaginary part of the physical samples relative to the L² norm."""
        phys = self.physical()
        scale = norm_Lq(self, 2)
        return float(np.max(np.abs(phys.imag)) / scale) if scale > 0 else 0.0

    def copy(self) -> "Field":
        return Field(self.grid, self.coeffs.copy())


@dataclass
class FieldState:
    """The pair ``(u, u_t)`` at time ``time``."""

    u: Field
    v: Field
    time: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValueError("u and v must share one grid")
        if self.time < 0:
            raise ValueError("time must be non-negative")

    @property
    def grid(self) -> SpectralGrid:
        return self.u.grid


# ---------------------------------------------------------------------------
# operators and norms

def frac_laplacian(f: Field, theta: float) -> Field:
    """Apply ``(-Δ)^θ`` (Fourier multiplier ``|ξ|^{2θ}``)."""
    if theta < 0:
        raise ValueError("theta must be non-negative")
    return Field(f.grid, f.coeffs * f.grid.symbol(theta))


def norm_Lq(f: Field | np.ndarray, q: float, grid: SpectralGrid | None = None) -> float:
    """Rectangle-rule ``L^q`` norm over the torus; ``q = inf`` gives the max norm.

    Accepts either a :class:`Field` or physical samples together with their grid.
    """
    if isinstance(f, Field):
        grid, vals = f.grid, f.values
    else:
        vals = np.asarray(f)
    if q == math.inf:
        return float(np.max(np.abs(vals)))
    if q < 1:
        raise ValueError("q must be ≥ 1")
    a = np.abs(vals)
    top = a.max()
    if top == 0:
        return 0.0
    return float(top * (grid.cell_volume * np.sum((a / top) ** q)) ** (1.0 / q))


def norm_sobolev(f: Field, s: float, homogeneous: bool = True) -> float:
    """Plancherel ``Ḣ^s`` (weights ``|ξ|^s``) or ``H^s`` (weights ``⟨ξ⟩^s``) norm."""
    if s < 0:
        raise ValueError("s must be non-negative")
    g = f.grid
    if homogeneous:
        w = power_symbol(g.xi_abs, s)
    else:
        w = (1.0 + g.xi_abs ** 2) ** (s / 2)
    total = np.sum((w * np.abs(f.coeffs)) ** 2)
    return float(math.sqrt(g.cell_volume * total / g.points ** g.n))


def zero_mode_norm(f: Field) -> float:
    """L² norm of the spatial-mean component."""
    g = f.grid
    mean = abs(f.coeffs.flat[0]) / g.points ** g.n
    return float(mean * (2 * g.half_length) ** (g.n / 2))


def nonzero_mode_norm(f: Field) -> float:
    """L² norm of ``f`` minus its spatial mean, summed directly over the nonzero modes."""
    g = f.grid
    c = f.coeffs.copy()
    c.flat[0] = 0.0
    return float(np.sqrt(g.cell_volume / g.points ** g.n * np.sum(np.abs(c) ** 2)))


def integrate(grid: SpectralGrid, values: np.ndarray) -> float:
    return float(grid.cell_volume * np.sum(values))


def evaluate_at(f: Field, points: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of a 1-D field at arbitrary points."""
    g = f.grid
    if g.n != 1:
        raise NotImplementedError("off-grid evaluation is only provided in 1-D")
    c = f.coeffs / g.points
    k = g.wavenumbers.copy()
    nyq = g.points // 2
    x = np.asarray(points, dtype=float)[:, None] + g.half_length
    phases = np.exp(1j * x * k[None, :])
    out = phases @ c
    # the Nyquist term is split symmetrically so a real field interpolates to real values
    out += c[nyq] * (np.cos(k[nyq] * x[:, 0]) - np.exp(1j * k[nyq] * x[:, 0]))
    return out


# ---------------------------------------------------------------------------
# initial data

class DataKind(str, enum.Enum):
    BLOWUP_M1 = "blowup_m1"
    BLOWUP_M_GT_1 = "blowup_m_gt_1"
    GAUSSIAN = "gaussian"
    SINGLE_MODE = "single_mode"


def bump_profile(r: np.ndarray, n: int = 1, mass: float = 1.0) -> np.ndarray:
    """Gaussian bump with integral ``mass`` (unit mass by default), the m = 1 ``u1``."""
    return mass * (2 * math.pi) ** (-0.5 * n) * np.exp(-0.5 * r * r)


def heavy_tail_profile(r: np.ndarray, n: int, m: float) -> np.ndarray:
    """``⟨x⟩^{-n/m} (log(e+|x|))^{-1}``."""
    return (1.0 + r * r) ** (-n / (2.0 * m)) / np.log(math.e + r)


def make_initial_data(kind: str | DataKind, grid: SpectralGrid, params: ModelParams,
                      m: float = 1.0, xi0: float | None = None, mass: float = 1.0) -> FieldState:
    """Build ``(u, u_t)(0) = eps*(u0, u1)`` for one of the supported data kinds.

    ``single_mode`` needs ``xi0`` to be a grid wavenumber (a multiple of π/L).
    ``mass`` is the integral of the m = 1 bump before the ``eps`` scaling.
    """
    kind = DataKind(kind)
    check_m(m)
    if grid.n != params.n:
        raise ValueError(f"grid dimension {grid.n} differs from model dimension {params.n}")
    eps = float(params.eps)
    r = grid.radius
    meta = {"kind": kind.value, "m": float(m)}
    zero = np.zeros(grid.shape)
    if kind is DataKind.BLOWUP_M1:
        if not mass > 0:
            raise ValueError("bump mass must be positive")
        u0, u1 = zero, bump_profile(r, grid.n, mass)
        meta["mass"] = float(mass)
    elif kind is DataKind.BLOWUP_M_GT_1:
        if not m > 1:
            raise ValueError("blowup_m_gt_1 data requires m > 1")
        u0, u1 = zero, heavy_tail_profile(r, grid.n, m)
        edge = float(heavy_tail_profile(np.array(grid.half_length), grid.n, m))
        meta["tail_at_boundary"] = edge
        meta["truncated_tail"] = True
    elif kind is DataKind.GAUSSIAN:
        u0 = u1 = np.exp(-0.5 * r * r)
    else:
        if xi0 is None:
            raise ValueError("single_mode data needs xi0")
        k = xi0 * grid.half_length / math.pi
        if abs(k - round(k)) > 1e-9 or abs(round(k)) >= grid.points // 2:
            raise ValueError(f"xi0={xi0} is not a resolved grid wavenumber")
        u0, u1 = np.cos(xi0 * grid.mesh[0]), zero
        meta["xi0"] = float(xi0)
    state = FieldState(Field.from_values(grid, eps * u0), Field.from_values(grid, eps * u1), 0.0, meta)
    return state


def default_half_length(kind: str | DataKind, n: int = 1, m: float = 1.0) -> float:
    """Smallest L where the data profile has fallen to the truncation level.

    Gaussian kinds use 1e-12 of the peak, heavy-tailed blow-up data 1e-4.
    """
    kind = DataKind(kind)
    if kind in (DataKind.GAUSSIAN, DataKind.BLOWUP_M1):
        return math.sqrt(2 * math.log(1e12))
    if kind is DataKind.BLOWUP_M_GT_1:
        # root in log r: the tail is too flat for a linear bracket
        f = lambda lx: math.log(heavy_tail_profile(np.array(math.exp(lx)), n, m)) - math.log(1e-4)
        return math.exp(brentq(f, 0.0, 300.0))
    return math.pi


# ---------------------------------------------------------------------------
# export

def write_field_binary(path, f: Field) -> None:
    """Physical values as row-major little-endian float64 behind a small header.

    Header: magic ``SGEF``, int64 n, n × int64 points, float64 L.
    """
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<q", g.n))
        fh.write(struct.pack("<" + "q" * g.n, *g.shape))
        fh.write(struct.pack("<d", g.half_length))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes(order="C"))


def read_field_binary(path) -> Field:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a field file")
        (n,) = struct.unpack("<q", fh.read(8))
        shape = struct.unpack("<" + "q" * n, fh.read(8 * n))
        (L,) = struct.unpack("<d", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(shape)
    if len(set(shape)) != 1:
        raise ValueError("only square grids are supported")
    return Field.from_values(SpectralGrid(n, L, shape[0]), data.astype(float))


def write_field_csv(path, f: Field) -> None:
    if f.grid.n != 1:
        raise ValueError("CSV export is 1-D only")
    with open(path, "w") as fh:
        fh.write("x,value\n")
        for x, v in zip(f.grid.coords, f.values):
            fh.write(f"{x:.17g},{v:.17g}\n")


# ---------------------------------------------------------------------------
# property probes

def scaling_defect(s: float, R: float, *, base_half_length: float = 20.0, points: int = 512,
                   probe=None) -> float:
    """Relative mismatch in ``(-Δ)^s ψ_R (x) = R^{-2s} ((-Δ)^s ψ)(x/R)`` for a Gaussian ψ.

    ψ lives on ``[-L0, L0)`` and ψ_R on the dilated torus ``[-R L0, R L0)`` at
    twice the resolution; both sides are compared at off-grid points through
    trigonometric interpolation.
    """
    g0 = make_grid(1, base_half_length, points)
    gR = make_grid(1, R * base_half_length, 2 * points)
    psi = Field.from_values(g0, np.exp(-0.5 * g0.coords ** 2))
    psiR = Field.from_values(gR, np.exp(-0.5 * (gR.coords / R) ** 2))
    lhs_f = frac_laplacian(psiR, s)
    rhs_f = frac_laplacian(psi, s)
    if probe is None:
        probe = np.linspace(-3.0, 3.0, 41) + 0.0371
    probe = np.asarray(probe, dtype=float) * R
    lhs = evaluate_at(lhs_f, probe).real
    rhs = R ** (-2 * s) * evaluate_at(rhs_f, probe / R).real
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))


def gn_l2_slack(f: Field, theta: float, a: float) -> float:
    """``‖f‖_{Ḣ^θ} / (‖f‖_{L²}^{1-θ/a} ‖f‖_{Ḣ^a}^{θ/a}) - 1``; non-positive when the inequality holds."""
    if not 0 <= theta < a:
        raise ValueError("need 0 ≤ theta < a")
    r = theta / a
    lhs = norm_sobolev(f, theta)
    rhs = norm_sobolev(f, 0.0) ** (1 - r) * norm_sobolev(f, a) ** r
    return float(lhs / rhs - 1.0) if rhs > 0 else 0.0


def random_smooth_field(grid: SpectralGrid, rng: np.random.Generator, bandwidth: float | None = None) -> Field:
    """Real field with random Fourier coefficients under a Gaussian envelope."""
    bw = bandwidth if bandwidth is not None else 0.25 * float(np.max(grid.xi_abs))
    noise = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    coeffs = noise * np.exp(-0.5 * (grid.xi_abs / bw) ** 2)
    vals = np.real(grid.inverse(coeffs))
    return Field.from_values(grid, vals)
