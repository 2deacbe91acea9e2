"""φ-functions and their divided differences against high-precision references."""
import math

import mpmath as mp
import numpy as np
import pytest

from sigmaevo._phi import GAP_SWITCH, dphi, exp_divdiff, phi, phi_divdiff

# φ_k(z) = (e^z - Σ_{j<k} z^j/j!) / z^k evaluated with mpmath at 50 digits, frozen
FROZEN = {
    (1, -1e-8): 0.99999999500000001667,
    (1, -0.37): 0.8358531604395820012,
    (1, -20.0): 0.049999999896942318878,
    (1, complex(-0.5, 3)): complex(0.11427148495118084638, 0.51444168653267825397),
    (2, -1e-8): 0.4999999983333333375,
    (2, -0.37): 0.4436401069200486454,
    (2, -20.0): 0.047500000005152884056,
    (2, complex(-0.5, 3)): complex(0.21472316941864263121, 0.25945564344649927934),
    (3, -1e-8): 0.16666666625000000083,
    (3, -0.37): 0.1523240353512198773,
    (3, -20.0): 0.022624999999742355797,
    (3, complex(-0.5, 3)): complex(0.099568145473532597017, 0.078497585948197023427),
}


def mp_phi(k, z):
    with mp.workdps(150):
        z = mp.mpc(z)
        if z == 0:
            return complex(1 / mp.factorial(k))
        s = mp.exp(z) - sum(z ** j / mp.factorial(j) for j in range(k))
        return complex(s / z ** k)


def mp_phi_divdiff(k, z1, z2):
    with mp.workdps(150):
        a, b = mp.mpc(z1), mp.mpc(z2)
        f = lambda z: mp.exp(z) if k == 0 else (mp.exp(z) - sum(z ** j / mp.factorial(j) for j in range(k))) / z ** k
        if a == b:
            return complex(mp.diff(f, a))
        return complex((f(a) - f(b)) / (a - b))


@pytest.mark.parametrize("key", sorted(FROZEN, key=str))
def test_phi_frozen_values(key):
    k, z = key
    got = complex(phi(k, np.array([z]))[0])
    assert abs(got - FROZEN[key]) <= 1e-14 * abs(FROZEN[key])


def test_phi_at_zero():
    for k in (1, 2, 3):
        assert phi(k, np.array([0.0]))[0] == pytest.approx(1 / math.factorial(k), rel=1e-15)


def test_phi_against_mpmath_over_scales():
    zs = np.concatenate([-np.geomspace(1e-10, 200, 60), np.geomspace(1e-10, 5, 20),
                         -0.4 + 1j * np.geomspace(1e-6, 50, 20)])
    for k in (1, 2, 3):
        got = phi(k, zs)
        want = np.array([mp_phi(k, z) for z in zs])
        assert np.max(np.abs(got - want) / np.abs(want)) < 1e-13


def test_dphi_matches_recurrence_and_mpmath():
    zs = np.array([-1e-7, -1e-3, -0.2, -3.0, -40.0, 0.5 + 2j])
    for k in (1, 2):
        got = dphi(k, zs)
        want = np.array([mp_phi_divdiff(k, z, z) for z in zs])
        assert np.max(np.abs(got - want) / np.abs(want)) < 1e-12


def test_exp_divdiff_confluent_and_separated():
    pairs = [(-1.0, -1.0), (-1.0, -1.0 + 1e-9), (-0.01, -1.0), (-3 + 2j, -3 - 2j), (-500.0, -0.5)]
    for z1, z2 in pairs:
        got = complex(exp_divdiff(np.array([z1]), np.array([z2]))[0])
        want = mp_phi_divdiff(0, z1, z2)
        assert abs(got - want) <= 1e-13 * abs(want)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_phi_divdiff_across_the_gap_switch(k):
    # gaps on both sides of the switch between quadrature and difference quotient
    rng = np.random.default_rng(k)
    worst = 0.0
    for _ in range(60):
        mid = -rng.uniform(0.0, 30.0) + 1j * rng.uniform(-5, 5) * rng.integers(0, 2)
        gap = 10 ** rng.uniform(-9, 1) * GAP_SWITCH
        z1, z2 = mid + gap / 2, mid - gap / 2
        got = complex(phi_divdiff(k, np.array([z1]), np.array([z2]))[0])
        want = mp_phi_divdiff(k, z1, z2)
        worst = max(worst, abs(got - want) / abs(want))
    assert worst < 1e-11
