import math

import numpy as np
import pytest
from scipy.integrate import quad

from sigmaevo.model import ModelParams
from sigmaevo.spectral import (Field, default_half_length, evaluate_at, frac_laplacian, gn_l2_slack, integrate,
                               make_grid, make_initial_data, norm_Lq, norm_sobolev, random_smooth_field,
                               read_field_binary, scaling_defect, write_field_binary, write_field_csv,
                               zero_mode_norm)

P1 = ModelParams(1, 1, 0, 1, 2)


def test_integer_wavenumbers():
    g = make_grid(1, math.pi, 8)
    assert sorted(np.asarray(g.wavenumbers).ravel().tolist()) == list(range(-4, 4))


def test_spacing_and_shapes():
    assert make_grid(1, 100.0, 4096).spacing == pytest.approx(0.048828125)
    assert make_grid(2, 50.0, 256).shape == (256, 256)


@pytest.mark.parametrize("bad", [(0, 1.0, 8), (3, 1.0, 8), (1, -1.0, 8), (1, 1.0, 7)])
def test_grid_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        make_grid(*bad)


def test_round_trip_random():
    rng = np.random.default_rng(0)
    for n, N in ((1, 512), (2, 64)):
        g = make_grid(n, 7.0, N)
        x = rng.standard_normal(g.shape)
        assert np.max(np.abs(g.inverse(g.forward(x)) - x)) <= 1e-12 * np.max(np.abs(x))


def test_theta_zero_is_identity():
    g = make_grid(1, 10.0, 128)
    f = random_smooth_field(g, np.random.default_rng(1))
    assert np.array_equal(frac_laplacian(f, 0.0).coeffs, f.coeffs)


def test_single_mode_laplacian():
    g = make_grid(1, math.pi, 64)
    f = Field.from_values(g, np.cos(5 * g.coords))
    assert np.allclose(frac_laplacian(f, 1.0).values, 25 * np.cos(5 * g.coords), atol=1e-12)


def test_semigroup():
    g = make_grid(2, 5.0, 32)
    f = random_smooth_field(g, np.random.default_rng(2))
    lhs = frac_laplacian(frac_laplacian(f, 0.35), 0.4).coeffs
    rhs = frac_laplacian(f, 0.75).coeffs
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def _half_laplacian_at_zero_by_quadrature():
    # f = 1/(1+x²); f̂(ξ) = 2∫₀^∞ cos(ξx)/(1+x²) dx by oscillatory quadrature,
    # then (-Δ)^{1/2} f(0) = (1/π) ∫₀^∞ ξ f̂(ξ) dξ
    def fhat(xi):
        return 2 * quad(lambda x: 1 / (1 + x * x), 0, np.inf, weight="cos", wvar=xi)[0]

    return quad(lambda xi: xi * fhat(xi), 0, 60, limit=200)[0] / math.pi


def test_fractional_laplacian_against_quadrature():
    ref = _half_laplacian_at_zero_by_quadrature()
    assert ref == pytest.approx(1.0, rel=1e-6)  # the closed form is exactly 1
    g = make_grid(1, 1000.0, 32768)
    f = Field.from_values(g, 1 / (1 + g.coords ** 2))
    got = float(evaluate_at(frac_laplacian(f, 0.5), np.array([0.0]))[0].real)
    assert got == pytest.approx(ref, rel=1e-4)


def test_norms():
    g = make_grid(1, 20.0, 512)
    f = Field.from_values(g, np.exp(-0.5 * g.coords ** 2))
    assert norm_Lq(f, 2) == pytest.approx(math.pi ** 0.25, rel=1e-12)
    assert norm_Lq(f, 1) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)
    assert norm_sobolev(f, 0.0) == pytest.approx(norm_Lq(f, 2), rel=1e-12)
    s = Field.from_values(make_grid(1, math.pi, 256), np.sin(make_grid(1, math.pi, 256).coords))
    assert norm_Lq(s, np.inf) == pytest.approx(1.0, abs=1e-3)


def test_single_mode_sobolev():
    g = make_grid(1, math.pi, 64)
    f = Field.from_values(g, np.cos(3 * g.coords))
    assert norm_sobolev(f, 1.5) == pytest.approx(3 ** 1.5 * math.sqrt(math.pi), rel=1e-12)


def test_zero_mode_and_integrate():
    g = make_grid(1, 5.0, 64)
    f = Field.from_values(g, np.full(g.shape, 2.0))
    assert integrate(g, f.values) == pytest.approx(20.0)
    assert zero_mode_norm(f) == pytest.approx(norm_Lq(f, 2))


def test_real_field_has_no_imaginary_residue():
    g = make_grid(2, 4.0, 32)
    assert random_smooth_field(g, np.random.default_rng(3)).imag_residue() < 1e-12


@pytest.mark.parametrize("s", [0.3, 0.5, 0.9])
@pytest.mark.parametrize("R", [2, 4])
def test_scaling_identity(s, R):
    assert scaling_defect(s, R) < 1e-6


def test_gn_l2_subfamily():
    g = make_grid(1, 10.0, 256)
    rng = np.random.default_rng(4)
    for _ in range(20):
        f = random_smooth_field(g, rng)
        for r in (0.25, 0.5, 0.75):
            assert gn_l2_slack(f, 1.3 * r, 1.3) <= 1e-12


def test_initial_data_kinds():
    g = make_grid(1, 30.0, 512)
    s = make_initial_data("blowup_m1", g, P1.replace(eps=0.5))
    assert np.max(np.abs(s.u.values)) == 0
    assert integrate(g, s.v.values) == pytest.approx(0.5, rel=1e-10)

    s = make_initial_data("blowup_m_gt_1", g, P1.replace(eps=0.7), m=1.5)
    assert float(evaluate_at(s.v, np.array([0.0]))[0].real) == pytest.approx(0.7, rel=1e-12)
    assert s.meta["truncated_tail"]

    xi0 = 4 * math.pi / 30.0
    s = make_initial_data("single_mode", g, P1, xi0=xi0)
    assert np.allclose(s.u.values, np.cos(xi0 * g.coords), atol=1e-14)
    assert np.max(np.abs(s.v.values)) == 0


def test_initial_data_errors():
    g = make_grid(1, 30.0, 512)
    with pytest.raises(ValueError):
        make_initial_data("single_mode", g, P1, xi0=0.1234)
    with pytest.raises(ValueError):
        make_initial_data("blowup_m_gt_1", g, P1, m=1)
    with pytest.raises(ValueError):
        make_initial_data("nope", g, P1)
    with pytest.raises(ValueError):
        make_initial_data("gaussian", make_grid(2, 5.0, 16), P1)


def test_default_half_length():
    L = default_half_length("gaussian")
    assert math.exp(-0.5 * L * L) == pytest.approx(1e-12, rel=1e-9)
    L = default_half_length("blowup_m_gt_1", 1, 1.5)
    assert (1 + L * L) ** (-1 / 3) / math.log(math.e + L) == pytest.approx(1e-4, rel=1e-6)


def test_binary_and_csv_export(tmp_path):
    g = make_grid(2, 3.0, 16)
    f = random_smooth_field(g, np.random.default_rng(5))
    write_field_binary(tmp_path / "f.bin", f)
    back = read_field_binary(tmp_path / "f.bin")
    assert back.grid.half_length == 3.0 and back.grid.shape == (16, 16)
    assert np.allclose(back.values, f.values, rtol=0, atol=1e-15)
    raw = (tmp_path / "f.bin").read_bytes()
    assert len(raw) == 4 + 8 + 16 + 8 + 8 * 256
    assert raw[-8 * 256:] == np.ascontiguousarray(f.values, dtype="<f8").tobytes()

    g1 = make_grid(1, 3.0, 8)
    f1 = Field.from_values(g1, np.arange(8.0))
    write_field_csv(tmp_path / "f.csv", f1)
    data = np.loadtxt(tmp_path / "f.csv", delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 0], g1.coords)
    assert np.allclose(data[:, 1], np.arange(8.0), atol=1e-14)
    with pytest.raises(ValueError):
        write_field_csv(tmp_path / "g.csv", f)
