"""Classical spin equilibrium states.

Exact classical mean-force (CMF) expectation values at arbitrary coupling via
two-dimensional quadrature on the sphere, classical Gibbs closed forms, weak
and ultrastrong closed forms, and a Monte-Carlo sampling oracle.

The effective spin Hamiltonian after tracing out the reservoir is

    H_eff(v, phi) = -omega_l*S0*cos(v) - Q*S0^2*(cos(theta)cos(v)
                                                 - sin(theta)sin(v)cos(phi))^2

with v the polar and phi the azimuthal angle.  Everything below works with
the two dimensionless combinations x1 = beta*omega_l*S0 and
x2 = beta*Q*S0^2, which makes the scaling invariance
(S0, beta, Q) -> (k*S0, beta/k, Q/k) exact to the bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize, minimize_scalar

from .model import ModelParams

__all__ = [
    "ClassicalMoments",
    "SphericalPoint",
    "QuadratureNotConverged",
    "cl_gibbs_stats",
    "cmf_logweight",
    "cmf_expectations",
    "cmf_wk_expectations",
    "cl_us_expectations",
    "cmf_sample",
]


class QuadratureNotConverged(RuntimeError):
    pass


@dataclass(frozen=True)
class ClassicalMoments:
    """Partition function and normalized spin moments of a classical state."""

    z_part: float
    sz: float
    sx: float
    sz2: Optional[float] = None
    sz3: Optional[float] = None
    quad_err: float = 0.0
    sz_err: float = 0.0
    sx_err: float = 0.0


@dataclass(frozen=True)
class SphericalPoint:
    v_theta: float  # polar angle in [0, pi]
    phi: float      # azimuth in [0, 2*pi]

    def __post_init__(self):
        if not 0.0 <= self.v_theta <= math.pi:
            raise ValueError("v_theta must lie in [0, pi]")
        if not 0.0 <= self.phi <= 2.0 * math.pi:
            raise ValueError("phi must lie in [0, 2*pi]")


# ---------------------------------------------------------------------------
# Gibbs closed forms


def _langevin(x: float) -> float:
    # L(x) = coth x - 1/x with series fallback
    if x < 0.05:
        return x / 3.0 - x**3 / 45.0 + 2.0 * x**5 / 945.0
    return 1.0 / math.tanh(x) - 1.0 / x


def cl_gibbs_stats(x: float) -> ClassicalMoments:
    """Classical Gibbs spin moments at x = beta*omega_l*S0.

    Z = sinh(x)/x, <sz> = coth(x) - 1/x, plus the second and third
    normalized moments.  Series are used near x = 0 and the aligned limit
    at x = inf.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    if math.isinf(x):
        return ClassicalMoments(z_part=math.inf, sz=1.0, sx=0.0, sz2=1.0, sz3=1.0)
    if x < 0.05:
        z = 1.0 + x**2 / 6.0 + x**4 / 120.0
        sz = _langevin(x)
        sz2 = 1.0 / 3.0 + 2.0 * x**2 / 45.0 - 4.0 * x**4 / 945.0
        sz3 = x / 5.0 - x**3 / 105.0
    else:
        coth = 1.0 / math.tanh(x)
        z = math.sinh(x) / x if x < 700 else math.inf
        sz = coth - 1.0 / x
        sz2 = 1.0 - 2.0 * coth / x + 2.0 / x**2
        sz3 = coth - 3.0 / x + 6.0 * coth / x**2 - 6.0 / x**3
    return ClassicalMoments(z_part=z, sz=sz, sx=0.0, sz2=sz2, sz3=sz3)


# ---------------------------------------------------------------------------
# CMF state


def _s_theta_unit(theta: float, v: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.cos(theta) * np.cos(v) - np.sin(theta) * np.sin(v) * np.cos(phi)


def _logweight_scaled(theta, x1, x2, v, phi):
    # log of exp(-beta*H_eff) in terms of x1 = beta*wL*S0, x2 = beta*Q*S0^2
    return x1 * np.cos(v) + x2 * _s_theta_unit(theta, v, phi) ** 2


def cmf_logweight(p: SphericalPoint, params: ModelParams) -> float:
    """-beta*H_eff at a spherical point; at beta = inf returns -H_eff itself
    (caller distinguishes via math.isinf(params.beta))."""
    s0 = params.s0
    st = _s_theta_unit(params.theta, np.float64(p.v_theta), np.float64(p.phi))
    h_eff = -params.omega_l * s0 * math.cos(p.v_theta) - params.q * s0**2 * st**2
    if math.isinf(params.beta):
        return -float(h_eff)
    return -params.beta * float(h_eff)


def _polar_peaks(theta: float, x1: float, x2: float):
    """Polar angles maximizing the log-weight along the phi = pi and
    phi = 0 ridges (where the azimuthal maxima always sit)."""
    peaks = []
    for phi0 in (math.pi, 0.0):
        res = minimize_scalar(
            lambda v: -_logweight_scaled(theta, x1, x2, np.float64(v), np.float64(phi0)),
            bounds=(0.0, math.pi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        peaks.append(float(res.x))
    # the poles themselves can be maxima when the bounded search stops short
    peaks.extend([0.0, math.pi])
    return peaks


def _graded_breaks(a: float, b: float, centers, width: float, coarse: int = 8):
    """Panel breakpoints on [a, b]: geometric ladders around each center at
    the given width, merged with a uniform coarse partition."""
    pts = set(np.linspace(a, b, coarse + 1))
    width = max(width, 1e-9)
    for c in centers:
        off = width
        while off < (b - a):
            for x in (c - off, c + off):
                if a < x < b:
                    pts.add(x)
            off *= 2.0
        if a < c < b:
            pts.add(c)
    return np.array(sorted(pts))


def _panel_nodes(breaks: np.ndarray, order: int):
    x, w = leggauss(order)
    lo = breaks[:-1][:, None]
    hi = breaks[1:][:, None]
    nodes = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
    wts = 0.5 * (hi - lo) * w[None, :]
    return nodes.ravel(), wts.ravel()


def _cmf_quad_once(theta, x1, x2, vb, pb, order, shift):
    nv, wv = _panel_nodes(vb, order)
    np_, wp = _panel_nodes(pb, order)
    v = nv[:, None]
    phi = np_[None, :]
    logw = _logweight_scaled(theta, x1, x2, v, phi)
    wgt = np.exp(logw - shift) * np.sin(v)
    wmat = wv[:, None] * wp[None, :]
    zi = float(np.sum(wgt * wmat))
    szi = float(np.sum(wgt * np.cos(v) * wmat))
    sxi = float(np.sum(wgt * np.sin(v) * np.cos(phi) * wmat))
    return zi, szi, sxi


def _cmf_zero_temperature(theta: float, zeta: float) -> ClassicalMoments:
    """T = 0 limit: average observables over the global minima of H_eff."""

    def h(u):
        v, phi = u
        return -float(_logweight_scaled(theta, 1.0, zeta, np.float64(v), np.float64(phi)))

    # dense scan, then local polish of every near-optimal grid-local minimum
    v = np.linspace(0.0, math.pi, 361)
    phi = np.linspace(0.0, 2.0 * math.pi, 721)
    hv = -_logweight_scaled(theta, 1.0, zeta, v[:, None], phi[None, :])
    span = float(hv.max() - hv.min()) or 1.0
    pad = np.pad(hv, 1, mode="edge")
    local = np.ones_like(hv, dtype=bool)
    for dv, dp in ((0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (1, -1),
                   (-1, 1), (-1, -1)):
        local &= hv <= pad[1 + dv:pad.shape[0] - 1 + dv,
                           1 + dp:pad.shape[1] - 1 + dp]
    cand = np.argwhere(local & (hv <= hv.min() + 1e-3 * span))
    if len(cand) > 64:
        order = np.argsort(hv[cand[:, 0], cand[:, 1]])
        cand = cand[order[:64]]
    minima = []
    for iv, ip in cand:
        res = minimize(
            h,
            x0=[v[iv], phi[ip]],
            method="Nelder-Mead",
            options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 2000},
        )
        # keep the raw angles: the polisher may wander to an equivalent
        # point with v outside [0, pi], where the direction cosines below
        # are still correct
        vv, pp = float(res.x[0]), float(res.x[1])
        vec = (math.sin(vv) * math.cos(pp), math.sin(vv) * math.sin(pp),
               math.cos(vv))
        minima.append((float(res.fun), vec))
    fmin = min(m[0] for m in minima)
    tol = 1e-9 * span
    kept = []
    for f, vec in sorted(minima):
        if f > fmin + tol:
            continue
        if any(max(abs(a - b) for a, b in zip(vec, v2)) < 1e-6
               for _, v2 in kept):
            continue
        kept.append((f, vec))
    sz = float(np.mean([vec[2] for _, vec in kept]))
    sx = float(np.mean([vec[0] for _, vec in kept]))
    return ClassicalMoments(z_part=math.inf, sz=sz, sx=sx, quad_err=0.0)


def cmf_expectations(params: ModelParams, tol: float = 1e-10,
                     max_rounds: int = 4) -> ClassicalMoments:
    """Exact CMF partition function and (sz, sx) by graded Gauss-Legendre
    quadrature over the sphere (phi folded onto [0, pi] and doubled).

    Valid for any Q >= 0 and any beta including 0 and inf; at beta = inf the
    arg-min orientation average is returned instead.
    """
    theta = params.theta
    if math.isinf(params.beta):
        return _cmf_zero_temperature(theta, params.zeta)
    x1 = params.beta * params.omega_l * params.s0
    x2 = params.beta * params.q * params.s0**2

    width = 1.0 / math.sqrt(1.0 + x1 + 4.0 * x2)
    peaks = _polar_peaks(theta, x1, x2)
    vb = _graded_breaks(0.0, math.pi, peaks, width)
    pb = _graded_breaks(0.0, math.pi, [0.0, math.pi], width)

    phis = (math.pi, 0.0)
    shift = max(
        float(_logweight_scaled(theta, x1, x2, np.float64(v0), np.float64(p0)))
        for v0 in peaks for p0 in phis
    )

    prev = None
    for round_ in range(max_rounds):
        zi_a, szi_a, sxi_a = _cmf_quad_once(theta, x1, x2, vb, pb, 12, shift)
        zi_b, szi_b, sxi_b = _cmf_quad_once(theta, x1, x2, vb, pb, 20, shift)
        sz = szi_b / zi_b
        sx = sxi_b / zi_b
        err = max(abs(sz - szi_a / zi_a), abs(sx - sxi_a / zi_a),
                  abs(zi_b - zi_a) / abs(zi_b))
        if err < tol:
            # the 1/(4pi) normalization plus the factor 2 from phi folding
            z = math.exp(shift) * zi_b * 2.0 / (4.0 * math.pi) \
                if shift < 700 else math.inf
            return ClassicalMoments(z_part=z, sz=sz, sx=sx, quad_err=err)
        prev = (sz, sx, err)
        vb = _split_panels(vb)
        pb = _split_panels(pb)
    raise QuadratureNotConverged(
        f"sphere quadrature not converged: err={prev[2]:.3e} after "
        f"{max_rounds} refinement rounds"
    )


def _split_panels(breaks: np.ndarray) -> np.ndarray:
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    return np.sort(np.concatenate([breaks, mids]))


# ---------------------------------------------------------------------------
# Closed-form limits


def cmf_wk_expectations(params: ModelParams) -> ClassicalMoments:
    """Second-order (weak-coupling) CMF closed forms in scaled temperature.

    sz = L(x) + (zeta/2)(1+3cos2theta)[csch^2 x + coth(x)/x - 2/x^2]
    sx = -zeta sin2theta [1 - 3coth(x)/x + 3/x^2],  x = beta'*omega_l.
    """
    zt = params.zeta
    theta = params.theta
    x = params.beta * params.s0 * params.omega_l
    if math.isinf(x):
        b1, b2 = 0.0, 1.0
        lang = 1.0
    elif x < 0.05:
        b1 = 2.0 * x**2 / 45.0 - 8.0 * x**4 / 945.0
        b2 = x**2 / 15.0 - 2.0 * x**4 / 315.0
        lang = _langevin(x)
    else:
        coth = 1.0 / math.tanh(x)
        csch2 = coth**2 - 1.0
        b1 = csch2 + coth / x - 2.0 / x**2
        b2 = 1.0 - 3.0 * coth / x + 3.0 / x**2
        lang = coth - 1.0 / x
    sz = lang + 0.5 * zt * (1.0 + 3.0 * math.cos(2.0 * theta)) * b1
    sx = -zt * math.sin(2.0 * theta) * b2
    gibbs = cl_gibbs_stats(x)
    return ClassicalMoments(z_part=gibbs.z_part, sz=sz, sx=sx)


def cl_us_expectations(params: ModelParams) -> ClassicalMoments:
    """Ultrastrong (Q -> inf) closed forms.

    sz = cos(theta) tanh(x cos(theta)), sx = -sin(theta) tanh(x cos(theta)),
    x = beta*omega_l*S0.  The sign of sx follows the minus-x alignment of
    the mean-force distribution.
    """
    theta = params.theta
    x = params.beta * params.omega_l * params.s0
    ct = math.cos(theta)
    if abs(ct) < 1e-12:
        t = 0.0
    elif math.isinf(x):
        t = 1.0 if ct > 0 else 0.0
    else:
        t = math.tanh(x * ct)
    return ClassicalMoments(
        z_part=math.nan,
        sz=math.cos(theta) * t,
        sx=-math.sin(theta) * t,
    )


# ---------------------------------------------------------------------------
# Monte-Carlo oracle


def cmf_sample(params: ModelParams, seed: int, count: int) -> ClassicalMoments:
    """Self-normalized importance sampling of the CMF density on the sphere.

    Uniform sphere proposals reweighted by exp(-beta*H_eff); returns sz, sx
    with standard errors.  Deterministic for a fixed seed; rejects T = 0.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if math.isinf(params.beta):
        raise ValueError("sampling undefined at T = 0")
    rng = np.random.default_rng(seed)
    x1 = params.beta * params.omega_l * params.s0
    x2 = params.beta * params.q * params.s0**2

    cos_v = rng.uniform(-1.0, 1.0, size=count)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=count)
    sin_v = np.sqrt(1.0 - cos_v**2)
    st = math.cos(params.theta) * cos_v - math.sin(params.theta) * sin_v * np.cos(phi)
    logw = x1 * cos_v + x2 * st**2
    shift = float(logw.max())
    w = np.exp(logw - shift)
    wsum = float(w.sum())

    def ratio_estimate(f):
        fhat = float(np.sum(w * f)) / wsum
        # delta-method standard error of the self-normalized estimator
        se = math.sqrt(float(np.sum((w * (f - fhat)) ** 2))) / wsum
        return fhat, se

    sz, sz_err = ratio_estimate(cos_v)
    sx, sx_err = ratio_estimate(sin_v * np.cos(phi))
    z = math.exp(shift) * wsum / count if shift < 700 else math.inf
    return ClassicalMoments(
        z_part=z, sz=sz, sx=sx, quad_err=0.0, sz_err=sz_err, sx_err=sx_err
    )
