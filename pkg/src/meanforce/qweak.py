"""Second-order (weak-coupling) quantum mean-force state.

Principal-value reservoir integrals A_beta(omega_n) for the Lorentzian
spectral density, their symmetric and antisymmetric combinations, and the
second-order corrected density matrix and spin expectation values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .model import LorentzianBath, ModelParams
from .qspin import qu_gibbs_stats, spin_operators, thermal_state
from .results import SpinExpectation

__all__ = [
    "BathIntegrals",
    "bath_a",
    "bath_combos",
    "qmf_wk_expectations",
    "qmf_wk_state",
]

_QUAD_OPTS = dict(limit=400, epsabs=1e-12, epsrel=1e-11)


@dataclass(frozen=True)
class BathIntegrals:
    a_plus: float      # A_beta(omega_l)
    a_minus: float     # A_beta(-omega_l)
    sigma: float       # A(+) + A(-)
    delta_b: float     # A(+) - A(-)
    delta_b_prime: float  # A'(+) + A'(-)
    sigma_prime: float    # A'(+) - A'(-)
    q: float           # A_beta(0)


def _n_bose(omega: float, beta: float) -> float:
    """Bose occupation 1/(e^{beta*omega} - 1) for omega > 0."""
    x = beta * omega
    if x < 1e-8:
        # Laurent series, keeps J(w)*n finite as w -> 0
        return 1.0 / x - 0.5 + x / 12.0
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


def bath_a(bath: LorentzianBath, beta: float, omega_n: float) -> float:
    """Principal-value integral
    A_beta(wn) = PV int_0^inf J(w)[(n(w)+1)/(w-wn) - n(w)/(w+wn)] dw.

    wn = 0 returns Q exactly; beta = inf drops the occupation terms.  The
    pole (at w = wn for wn > 0, at w = -wn for wn < 0 and finite beta) is
    handled by subtracting the residue numerator over a symmetric window.
    """
    if not isinstance(bath, LorentzianBath):
        raise TypeError("bath integrals require a Lorentzian bath")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        raise ValueError("A_beta diverges at beta = 0")
    if omega_n == 0.0:
        return bath.q

    j = bath.j
    cold = math.isinf(beta)

    def occ(w):
        return 0.0 if cold else _n_bose(w, beta)

    if cold:
        def integrand(w):
            return j(w) / (w - omega_n)
    else:
        def integrand(w):
            return j(w) * ((occ(w) + 1.0) / (w - omega_n)
                           - occ(w) / (w + omega_n))

    if omega_n > 0:
        pole = omega_n

        def numerator(w):
            return j(w) * (occ(w) + 1.0)

        def regular(w):
            return -j(w) * occ(w) / (w + omega_n)

    elif cold:
        # integrand J(w)/(w - wn) is smooth on [0, inf) for wn < 0
        return _quad_to_inf(integrand, 0.0, bath, abs(omega_n))
    else:
        pole = -omega_n

        def numerator(w):
            return -j(w) * occ(w)

        def regular(w):
            return j(w) * (occ(w) + 1.0) / (w - omega_n)

    delta = min(pole, bath.gamma_w) / 4.0
    lo, hi = pole - delta, pole + delta
    f_pole = numerator(pole)

    # PV over the window: the constant part integrates to zero by symmetry,
    # the remainder has a removable singularity at the pole
    def window(w):
        if w == pole:
            # derivative of the numerator via a tiny central difference
            h = 1e-7 * max(pole, 1.0)
            return (numerator(w + h) - numerator(w - h)) / (2.0 * h)
        return (numerator(w) - f_pole) / (w - pole)

    val = quad(window, lo, hi, points=[pole], **_QUAD_OPTS)[0]
    val += quad(regular, lo, hi, **_QUAD_OPTS)[0]
    val += quad(integrand, 0.0, lo, points=_interior(0.0, lo, bath), **_QUAD_OPTS)[0]
    val += _quad_to_inf(integrand, hi, bath, pole)
    return val


def _interior(a, b, bath):
    pts = [w for w in (bath.omega_0, bath.omega_0 - bath.gamma_w,
                       bath.omega_0 + bath.gamma_w) if a < w < b]
    return pts or None


def _quad_to_inf(f, a, bath, pole_scale):
    cut = max(4.0 * bath.omega_0, 2.0 * pole_scale + 10.0 * bath.gamma_w, a + 1.0)
    val = quad(f, a, cut, points=_interior(a, cut, bath), **_QUAD_OPTS)[0]
    val += quad(f, cut, np.inf, **_QUAD_OPTS)[0]
    return val


def _a_prime(bath: LorentzianBath, beta: float, omega_n: float,
             h_rel: float = 1e-3) -> float:
    """dA_beta/d(omega_n) by Richardson-extrapolated central differences."""
    h = h_rel * abs(omega_n)

    def central(step):
        return (bath_a(bath, beta, omega_n + step)
                - bath_a(bath, beta, omega_n - step)) / (2.0 * step)

    d1 = central(h)
    d2 = central(0.5 * h)
    return (4.0 * d2 - d1) / 3.0


def bath_combos(bath: LorentzianBath, beta: float, omega_l: float) -> BathIntegrals:
    """Symmetric/antisymmetric combinations of A_beta and its derivative
    evaluated at the spin gap omega_l.

    The derivative combinations are formed from finite differences of the
    principal-value integral itself; the squared-denominator kernels are
    never integrated directly.
    """
    ap = bath_a(bath, beta, omega_l)
    am = bath_a(bath, beta, -omega_l)
    app = _a_prime(bath, beta, omega_l)
    # A'(-wn) is the derivative wrt the argument, evaluated at -wn
    apm = _a_prime(bath, beta, -omega_l)
    return BathIntegrals(
        a_plus=ap,
        a_minus=am,
        sigma=ap + am,
        delta_b=ap - am,
        delta_b_prime=app + apm,
        sigma_prime=app - apm,
        q=bath.q,
    )


def _require_lorentzian(params: ModelParams) -> LorentzianBath:
    if not isinstance(params.bath, LorentzianBath):
        raise TypeError("weak-coupling quantum corrections require a "
                        "Lorentzian bath")
    return params.bath


def qmf_wk_expectations(params: ModelParams) -> SpinExpectation:
    """Spin expectations of the second-order mean-force state, normalized
    by S0.

    <Sz> gains a coherent-shift piece (Sigma', Delta'_beta) plus a thermal
    piece linear in beta built from connected Sz moments; <Sx> is the
    static coherence proportional to sin(2 theta).  At beta = 0 the
    corrections vanish identically and at beta = inf the thermal piece
    drops (connected moments vanish faster than 1/beta).
    """
    bath = _require_lorentzian(params)
    beta, theta, wl, s0 = params.beta, params.theta, params.omega_l, params.s0
    if beta == 0.0:
        return SpinExpectation(sz=0.0, sx=0.0, method="qmf_wk")
    g = qu_gibbs_stats(beta, params.n, wl)
    bi = bath_combos(bath, beta, wl)
    cas = s0 * (s0 + 1.0)
    sin2 = math.sin(theta) ** 2
    s2t = math.sin(2.0 * theta)

    sz_val = g.m1 + 0.25 * sin2 * ((cas - g.m2) * bi.sigma_prime
                                   - g.m1 * bi.delta_b_prime)
    if not math.isinf(beta):
        c2 = g.m2 - g.m1**2
        c3 = g.m3 - g.m1 * g.m2
        sz_val -= beta * (0.25 * sin2 * (c2 * bi.delta_b + c3 * bi.sigma)
                          - math.cos(theta) ** 2 * c3 * bi.q)
    sx_val = (s2t / (4.0 * wl)) * ((cas - g.m2) * bi.sigma
                                   - g.m1 * bi.delta_b - 4.0 * g.m2 * bi.q)
    return SpinExpectation(sz=sz_val / s0, sx=sx_val / s0, method="qmf_wk")


def qmf_wk_state(params: ModelParams) -> np.ndarray:
    """Second-order mean-force density matrix.

    Assembled from the energy eigenoperators of the coupling direction,
    X(-1) = -(1/2)sin(theta) S-, X(0) = cos(theta) Sz,
    X(+1) = -(1/2)sin(theta) S+, with Bohr frequencies +wl, 0, -wl.  The
    normalization follows the Taylor-expansion route, so the correction is
    traceless by construction.  Trace is 1 and Hermiticity holds to machine
    precision; strict positivity is not guaranteed for a truncated
    expansion.
    """
    bath = _require_lorentzian(params)
    beta, theta, wl = params.beta, params.theta, params.omega_l
    so = spin_operators(params.n)
    sp_, sm_, sz_ = so.s_plus, so.s_minus, so.sz
    tau = thermal_state(-wl * sz_, beta)
    if beta == 0.0:
        return tau
    bi = bath_combos(bath, beta, wl)
    app = 0.5 * (bi.delta_b_prime + bi.sigma_prime)
    apm = 0.5 * (bi.delta_b_prime - bi.sigma_prime)
    sin2 = math.sin(theta) ** 2
    sc = math.sin(theta) * math.cos(theta)

    def comm(a, b):
        return a @ b - b @ a

    rho = tau.copy()
    rho += 0.25 * sin2 * comm(sp_, tau @ sm_) * app
    rho += 0.25 * sin2 * comm(sm_, tau @ sp_) * apm
    if not math.isinf(beta):
        # thermal pieces: beta * tau * (X X^dag - <X X^dag>), traceless
        def thermal(op, a_val):
            mean = float(np.trace(tau @ op).real)
            return beta * (tau @ op - mean * tau) * a_val

        rho += 0.25 * sin2 * thermal(sm_ @ sp_, bi.a_plus)
        rho += 0.25 * sin2 * thermal(sp_ @ sm_, bi.a_minus)
        rho += math.cos(theta) ** 2 * thermal(sz_ @ sz_, bi.q)
    # cross terms between distinct Bohr frequencies
    rho += (sc / (2.0 * wl)) * (comm(sz_, sp_ @ tau) + comm(tau @ sm_, sz_)) * bi.a_plus
    rho -= (sin2 / (8.0 * wl)) * (comm(sp_, sp_ @ tau) + comm(tau @ sm_, sm_)) * bi.a_plus
    rho -= (sc / (2.0 * wl)) * (comm(sm_, sz_ @ tau) + comm(tau @ sz_, sp_)) * bi.q
    rho += (sc / (2.0 * wl)) * (comm(sp_, sz_ @ tau) + comm(tau @ sz_, sm_)) * bi.q
    rho += (sin2 / (8.0 * wl)) * (comm(sm_, sm_ @ tau) + comm(tau @ sp_, sp_)) * bi.a_minus
    rho -= (sc / (2.0 * wl)) * (comm(sz_, sm_ @ tau) + comm(tau @ sp_, sz_)) * bi.a_minus
    return rho
