"""Stable φ-functions and their two-point divided differences.

``φ_0 = exp``, ``φ_{k+1}(z) = (φ_k(z) - 1/k!)/z``. All routines are
vectorised over complex arrays.
"""
from __future__ import annotations

import math

import numpy as np

_SERIES_RADIUS = 1.0
_SERIES_TERMS = 30
_DSERIES_RADIUS = 4.0
_DSERIES_TERMS = 70
# relative gap below which the difference quotient is replaced by quadrature
GAP_SWITCH = 0.1

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _taylor(z, coeffs):
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def phi(k: int, z) -> np.ndarray:
    """``φ_k(z)`` for ``k`` in 0..3."""
    z = np.asarray(z, dtype=complex)
    if k == 0:
        return np.exp(z)
    small = np.abs(z) < _SERIES_RADIUS
    out = np.empty_like(z)
    zs = z[small]
    out[small] = _taylor(zs, [1.0 / math.factorial(l + k) for l in range(_SERIES_TERMS)])
    zb = z[~small]
    val = np.expm1(zb) / zb
    for j in range(1, k):
        val = (val - 1.0 / math.factorial(j)) / zb
    out[~small] = val
    return out


def dphi(k: int, z) -> np.ndarray:
    """Derivative ``φ_k'(z) = φ_k(z) - k φ_{k+1}(z)``."""
    z = np.asarray(z, dtype=complex)
    if k == 0:
        return np.exp(z)
    small = np.abs(z) < _DSERIES_RADIUS
    out = np.empty_like(z)
    out[small] = _taylor(z[small], [(l + 1) / math.factorial(l + 1 + k) for l in range(_DSERIES_TERMS)])
    zb = z[~small]
    out[~small] = phi(k, zb) - k * phi(k + 1, zb)
    return out


def exp_divdiff(z1, z2) -> np.ndarray:
    """``(e^{z1} - e^{z2})/(z1 - z2)`` in midpoint form ``e^m sinh(d)/d``."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    m = 0.5 * (z1 + z2)
    d = 0.5 * (z1 - z2)
    out = np.empty(np.broadcast(z1, z2).shape, dtype=complex)
    z1, z2, m, d = np.broadcast_arrays(z1, z2, m, d)
    tiny = np.abs(d) < 1e-5
    dt = d[tiny]
    out[tiny] = np.exp(m[tiny]) * (1.0 + dt * dt / 6.0 * (1.0 + dt * dt / 20.0))
    mid = (~tiny) & (np.abs(d) <= 1.0)
    out[mid] = np.exp(m[mid]) * np.sinh(d[mid]) / d[mid]
    far = np.abs(d) > 1.0
    out[far] = (np.exp(z1[far]) - np.exp(z2[far])) / (z1[far] - z2[far])
    return out


def phi_divdiff(k: int, z1, z2) -> np.ndarray:
    """Divided difference ``φ_k[z1, z2]`` (confluent limit ``φ_k'(z)`` when z1 = z2).

    Well-separated points use the difference quotient. Close points (gap
    below ``GAP_SWITCH * max(1, |midpoint|)``) integrate ``φ_k'`` along the
    segment with 16-point Gauss-Legendre centred on the midpoint, which
    avoids the cancellation of the quotient.
    """
    if k == 0:
        return exp_divdiff(z1, z2)
    z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    m = 0.5 * (z1 + z2)
    d = 0.5 * (z1 - z2)
    close = np.abs(d) <= 0.5 * GAP_SWITCH * np.maximum(1.0, np.abs(m))
    out = np.empty(z1.shape, dtype=complex)
    far = ~close
    if far.any():
        a, b = z1[far], z2[far]
        out[far] = (phi(k, a) - phi(k, b)) / (a - b)
    if close.any():
        mc, dc = m[close], d[close]
        pts = mc[:, None] + dc[:, None] * _GL_NODES[None, :]
        out[close] = 0.5 * (dphi(k, pts) @ _GL_WEIGHTS)
    return out
