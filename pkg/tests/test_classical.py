"""Classical equilibrium states: Gibbs closed forms, CMF quadrature,
weak and ultrastrong limits, and the Monte-Carlo oracle."""

import math

import numpy as np
import pytest

from meanforce.classical import (
    QuadratureNotConverged,
    SphericalPoint,
    cl_gibbs_stats,
    cl_us_expectations,
    cmf_expectations,
    cmf_logweight,
    cmf_sample,
    cmf_wk_expectations,
)
from meanforce.model import LorentzianBath, ModelParams


def make_params(theta=math.pi / 4, zeta_val=1.0, beta=2.0, n=1,
                omega_l=1.0, omega_0=7.0, gamma_w=5.0):
    s0 = n / 2.0
    q = zeta_val * omega_l / s0
    bath = LorentzianBath.from_q(q, omega_0, gamma_w)
    return ModelParams(n=n, omega_l=omega_l, theta=theta, bath=bath, beta=beta)


# ---------------------------------------------------------------------------
# Gibbs closed forms


def test_gibbs_langevin_values():
    m = cl_gibbs_stats(2.0)
    assert m.sz == pytest.approx(1.0 / math.tanh(2.0) - 0.5, rel=1e-14)
    assert m.z_part == pytest.approx(math.sinh(2.0) / 2.0, rel=1e-14)
    assert m.sx == 0.0


def test_gibbs_limits():
    m0 = cl_gibbs_stats(0.0)
    assert m0.sz == 0.0
    assert m0.sz2 == pytest.approx(1.0 / 3.0)
    minf = cl_gibbs_stats(math.inf)
    assert minf.sz == 1.0 and minf.sz2 == 1.0


def test_gibbs_series_matches_closed_form():
    # the small-x series branch has to join the closed forms smoothly
    for x in (0.049, 0.051):
        coth = 1.0 / math.tanh(x)
        assert cl_gibbs_stats(x).sz == pytest.approx(coth - 1.0 / x, abs=1e-12)
        assert cl_gibbs_stats(x).sz2 == pytest.approx(
            1.0 - 2.0 * coth / x + 2.0 / x**2, abs=1e-10)


def test_gibbs_moments_vs_quadrature():
    from scipy.integrate import quad

    x = 1.7
    z = quad(lambda u: 0.5 * math.exp(x * u), -1, 1)[0]
    sz = quad(lambda u: 0.5 * u * math.exp(x * u), -1, 1)[0] / z
    sz3 = quad(lambda u: 0.5 * u**3 * math.exp(x * u), -1, 1)[0] / z
    m = cl_gibbs_stats(x)
    assert m.sz == pytest.approx(sz, rel=1e-10)
    assert m.sz3 == pytest.approx(sz3, rel=1e-10)
    with pytest.raises(ValueError):
        cl_gibbs_stats(-0.1)


# ---------------------------------------------------------------------------
# CMF quadrature


def test_cmf_reduces_to_gibbs_at_zero_coupling():
    p = make_params(zeta_val=1e-14, beta=2.0)
    m = cmf_expectations(p)
    g = cl_gibbs_stats(2.0 * 1.0 * 0.5)
    assert m.sz == pytest.approx(g.sz, abs=1e-10)
    assert m.sx == pytest.approx(0.0, abs=1e-10)


def test_cmf_reference_point():
    # theta = pi/4, zeta = 1, beta'*omega_l = 1; frozen from a converged run
    # validated against the independent Monte-Carlo oracle
    m = cmf_expectations(make_params())
    assert m.sz == pytest.approx(0.33265089668747555, abs=1e-9)
    assert m.sx == pytest.approx(-0.065059840590689297, abs=1e-9)
    assert m.quad_err < 1e-10


def test_cmf_matches_monte_carlo():
    p = make_params()
    mc = cmf_sample(p, seed=20260826, count=10**6)
    m = cmf_expectations(p)
    assert abs(m.sz - mc.sz) < 4.0 * mc.sz_err
    assert abs(m.sx - mc.sx) < 4.0 * mc.sx_err


def test_cmf_theta_zero_keeps_sx_zero():
    m = cmf_expectations(make_params(theta=0.0, zeta_val=3.0))
    assert m.sx == pytest.approx(0.0, abs=1e-12)


def test_cmf_scaling_invariance_is_exact():
    # (S0, beta, Q) -> (k S0, beta/k, Q/k) leaves the state untouched
    base = make_params(zeta_val=2.0, beta=1.4, n=1)
    m1 = cmf_expectations(base)
    scaled = make_params(zeta_val=2.0, beta=1.4 / 4.0, n=4)
    m2 = cmf_expectations(scaled)
    assert m2.sz == m1.sz
    assert m2.sx == m1.sx


def test_cmf_zero_temperature_closed_form():
    # at T = 0 and theta = pi/4 the optimal orientation solves
    # 2 zeta s^2 + s - zeta = 0 with s = -sx
    for zv in (0.1, 1.0, 8.0):
        m = cmf_expectations(make_params(zeta_val=zv, beta=math.inf))
        s = (-1.0 + math.sqrt(1.0 + 8.0 * zv**2)) / (4.0 * zv)
        assert m.sx == pytest.approx(-s, abs=1e-8)
        assert m.sz == pytest.approx(math.sqrt(1.0 - s * s), abs=1e-8)
    # zeta = 1 lands exactly at the polar angle pi/6
    m = cmf_expectations(make_params(zeta_val=1.0, beta=math.inf))
    assert m.sz == pytest.approx(math.sqrt(3.0) / 2.0, abs=1e-8)
    assert m.sx == pytest.approx(-0.5, abs=1e-8)


def test_cmf_zero_temperature_degenerate_pair():
    # theta = pi/2, zeta = 2: two symmetric minima at cos(v) = 1/(2 zeta),
    # the observable average keeps sz and kills sx
    m = cmf_expectations(make_params(theta=math.pi / 2, zeta_val=2.0,
                                     beta=math.inf))
    assert m.sz == pytest.approx(0.25, abs=1e-8)
    assert m.sx == pytest.approx(0.0, abs=1e-8)


def test_cmf_extreme_arguments_converge():
    # very cold and very strongly coupled points stress the graded panels
    m = cmf_expectations(make_params(zeta_val=50.0, beta=40.0))
    assert m.quad_err < 1e-10
    assert -1.0 <= m.sz <= 1.0 and -1.0 <= m.sx <= 1.0


def test_cmf_logweight():
    p = make_params(zeta_val=1.0, beta=2.0)
    # north pole: H_eff = -wL S0 - Q S0^2 cos^2(theta)
    lw = cmf_logweight(SphericalPoint(0.0, 0.0), p)
    h = -1.0 * 0.5 - 2.0 * 0.25 * math.cos(math.pi / 4) ** 2
    assert lw == pytest.approx(-2.0 * h, rel=1e-12)
    # at T = 0 the raw -H_eff comes back instead
    lw0 = cmf_logweight(SphericalPoint(0.0, 0.0), p.with_beta(math.inf))
    assert lw0 == pytest.approx(-h, rel=1e-12)


def test_spherical_point_validation():
    SphericalPoint(0.0, 2.0 * math.pi)  # closed interval ends are legal
    with pytest.raises(ValueError):
        SphericalPoint(-0.1, 0.0)
    with pytest.raises(ValueError):
        SphericalPoint(0.5, 7.0)


# ---------------------------------------------------------------------------
# Weak and ultrastrong closed forms


def test_wk_limit_slope():
    # the weak form is the tangent of the exact curve at zeta = 0
    beta = 2.0
    devs = []
    for zv in (0.04, 0.02):
        p = make_params(zeta_val=zv, beta=beta)
        exact = cmf_expectations(p)
        wk = cmf_wk_expectations(p)
        devs.append(max(abs(exact.sz - wk.sz), abs(exact.sx - wk.sx)))
    # second-order accuracy: halving zeta cuts the residual ~4x
    assert devs[1] < devs[0] / 3.0
    assert devs[0] < 1e-3


def test_wk_zero_coupling_is_gibbs():
    p = make_params(zeta_val=0.0, beta=2.0)
    wk = cmf_wk_expectations(p)
    assert wk.sz == pytest.approx(cl_gibbs_stats(1.0).sz, rel=1e-12)
    assert wk.sx == 0.0


def test_us_closed_form():
    p = make_params(zeta_val=1.0, beta=2.0)
    t = math.tanh(2.0 * 1.0 * 0.5 * math.cos(math.pi / 4))
    us = cl_us_expectations(p)
    assert us.sz == pytest.approx(math.cos(math.pi / 4) * t, rel=1e-14)
    assert us.sx == pytest.approx(-math.sin(math.pi / 4) * t, rel=1e-14)


def test_us_is_strong_coupling_limit():
    beta = 2.0
    devs = []
    for zv in (30.0, 120.0):
        p = make_params(zeta_val=zv, beta=beta)
        exact = cmf_expectations(p)
        us = cl_us_expectations(p)
        devs.append(max(abs(exact.sz - us.sz), abs(exact.sx - us.sx)))
    assert devs[1] < devs[0]
    assert devs[1] < 1e-2


# ---------------------------------------------------------------------------
# Monte-Carlo oracle


def test_sampler_determinism():
    p = make_params()
    a = cmf_sample(p, seed=7, count=5000)
    b = cmf_sample(p, seed=7, count=5000)
    assert a.sz == b.sz and a.sx == b.sx
    c = cmf_sample(p, seed=8, count=5000)
    assert c.sz != a.sz


def test_sampler_rejects_bad_input():
    p = make_params()
    with pytest.raises(ValueError):
        cmf_sample(p, seed=1, count=0)
    with pytest.raises(ValueError):
        cmf_sample(p.with_beta(math.inf), seed=1, count=100)
