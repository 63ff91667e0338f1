"""Coupling-regime classification and boundary finding.

A point (zeta, T) is labeled by which approximation reproduces the exact
mean-force expectations within tolerance: UW (bare Gibbs), WK (second-order),
US (infinite-coupling projection), otherwise IM.  Precedence UW > WK > US
when several pass.  The exact backend is the reaction-coordinate solver for
the quantum flavor and sphere quadrature for the classical one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classical import cl_gibbs_stats, cmf_expectations, cmf_wk_expectations, \
    cl_us_expectations
from .limits import us_expectations
from .model import LorentzianBath, ModelParams, beta_from_t_half
from .qrc import rc_expectations, rc_mf_state
from .qspin import qu_gibbs_stats
from .qweak import qmf_wk_expectations
from .results import SpinExpectation, SweepTable

__all__ = [
    "RegimePoint",
    "approx_error",
    "classify_point",
    "find_boundary",
    "regime_atlas",
]

DEFAULT_TOL = 4e-3
DEFAULT_FLOOR = 0.1
# classification uses an absolute-difference metric (floor 1.0 swamps the
# normalized components, which never exceed 1); this choice, together with
# the narrow default Lorentzian below, is what places the T = 0 boundaries
# at the documented locations
CLASSIFY_FLOOR = 1.0
DEFAULT_OMEGA_0 = 7.0
DEFAULT_GAMMA_W = 0.2
_SCAN_LO, _SCAN_HI = 1e-3, 1e4
_POINTS_PER_DECADE = 12


@dataclass(frozen=True)
class RegimePoint:
    zeta: float
    t_half: float
    err_uw: float
    err_wk: float
    err_us: float
    label: str
    n_rc_used: int = 0
    backend: str = ""


def approx_error(exact: SpinExpectation, approx: SpinExpectation,
                 floor: float = DEFAULT_FLOOR) -> float:
    """max over components of |approx - exact| / max(|exact|, floor).

    The denominator floor keeps the metric finite where a component crosses
    zero.
    """
    ez = abs(approx.sz - exact.sz) / max(abs(exact.sz), floor)
    ex = abs(approx.sx - exact.sx) / max(abs(exact.sx), floor)
    return max(ez, ex)


def _gibbs_expectation(params: ModelParams, flavor: str) -> SpinExpectation:
    if flavor == "quantum":
        g = qu_gibbs_stats(params.beta, params.n, params.omega_l)
        return SpinExpectation(sz=g.m1 / params.s0, sx=0.0, method="qgibbs")
    g = cl_gibbs_stats(params.beta * params.omega_l * params.s0)
    return SpinExpectation(sz=g.sz, sx=0.0, method="cgibbs")


def _wk_expectation(params: ModelParams, flavor: str) -> SpinExpectation:
    if flavor == "quantum":
        return qmf_wk_expectations(params)
    m = cmf_wk_expectations(params)
    return SpinExpectation(sz=m.sz, sx=m.sx, method="cmf_wk")


def _exact_expectation(params: ModelParams, flavor: str):
    """Returns (SpinExpectation, n_rc_used, backend_name)."""
    if flavor == "quantum":
        res = rc_mf_state(params)
        return rc_expectations(res), res.n_used, "rc"
    m = cmf_expectations(params)
    return SpinExpectation(sz=m.sz, sx=m.sx, method="cmf"), 0, "cmf"


def classify_point(params: ModelParams, flavor: str = "quantum",
                   tol: float = DEFAULT_TOL,
                   floor: float = CLASSIFY_FLOOR) -> RegimePoint:
    if flavor not in ("quantum", "classical"):
        raise ValueError("flavor must be quantum or classical")
    exact, n_rc, backend = _exact_expectation(params, flavor)
    err_uw = approx_error(exact, _gibbs_expectation(params, flavor), floor)
    err_wk = approx_error(exact, _wk_expectation(params, flavor), floor)
    us = us_expectations(params)
    err_us = approx_error(exact, us, floor)
    if err_uw < tol:
        label = "UW"
    elif err_wk < tol:
        label = "WK"
    elif err_us < tol:
        label = "US"
    else:
        label = "IM"
    t_half = 2.0 / (params.beta * params.omega_l) if params.beta > 0 else math.inf
    if math.isinf(params.beta):
        t_half = 0.0
    return RegimePoint(zeta=params.zeta, t_half=t_half, err_uw=err_uw,
                       err_wk=err_wk, err_us=err_us, label=label,
                       n_rc_used=n_rc, backend=backend)


def _params_at(zeta_val: float, t_half: float, theta: float, n: int,
               omega_l: float, omega_0: float, gamma_w: float) -> ModelParams:
    s0 = n / 2.0
    q = zeta_val * omega_l / s0
    bath = LorentzianBath.from_q(q, omega_0, gamma_w)
    beta = beta_from_t_half(t_half, omega_l)
    return ModelParams(n=n, omega_l=omega_l, theta=theta, bath=bath, beta=beta)


def _boundary_error(zeta_val, t_half, theta, n, flavor, approx,
                    omega_l, omega_0, gamma_w, floor):
    p = _params_at(zeta_val, t_half, theta, n, omega_l, omega_0, gamma_w)
    exact, _, _ = _exact_expectation(p, flavor)
    if approx == "UW":
        a = _gibbs_expectation(p, flavor)
    elif approx == "WK":
        a = _wk_expectation(p, flavor)
    elif approx == "US":
        a = us_expectations(p)
    else:
        raise ValueError("approx must be UW, WK or US")
    return approx_error(exact, a, floor)


def find_boundary(t_half: float, theta: float, approx: str,
                  flavor: str = "quantum", tol: float = DEFAULT_TOL,
                  n: int = 1, omega_l: float = 1.0,
                  omega_0: float = DEFAULT_OMEGA_0,
                  gamma_w: float = DEFAULT_GAMMA_W,
                  floor: float = CLASSIFY_FLOOR,
                  rel_precision: float = 0.02,
                  scan_lo: float = _SCAN_LO,
                  scan_hi: float = _SCAN_HI) -> float:
    """Coupling strength zeta* where the given approximation's error first
    crosses tol.

    Coarse log scan (12 points per decade over [scan_lo, scan_hi], default
    [1e-3, 1e4]) brackets the first crossing; bisection in log(zeta) then
    narrows it to 2% relative.  For the US approximation the error crosses
    from above, so the scan looks for the first sign change either way.
    A tighter scan window cuts the cost a lot at high temperature, where
    each exact solve needs a large oscillator cutoff.
    """

    def err(z):
        return _boundary_error(z, t_half, theta, n, flavor, approx,
                               omega_l, omega_0, gamma_w, floor) - tol

    n_pts = int(round(_POINTS_PER_DECADE
                      * math.log10(scan_hi / scan_lo))) + 1
    grid = np.geomspace(scan_lo, scan_hi, n_pts)
    prev_z, prev_e = grid[0], err(grid[0])
    bracket = None
    for z in grid[1:]:
        e = err(z)
        if prev_e == 0.0 or prev_e * e < 0:
            bracket = (prev_z, z)
            break
        prev_z, prev_e = z, e
    if bracket is None:
        raise RuntimeError(
            f"no {approx} boundary crossing in scan range "
            f"[{scan_lo}, {scan_hi}]"
        )
    lo, hi = bracket
    e_lo = err(lo)
    while hi / lo > 1.0 + rel_precision:
        mid = math.sqrt(lo * hi)
        e_mid = err(mid)
        if e_lo * e_mid <= 0:
            hi = mid
        else:
            lo, e_lo = mid, e_mid
    return math.sqrt(lo * hi)


def regime_atlas(theta: float, zeta_grid: Sequence[float],
                 t_grid: Sequence[float], flavor: str = "quantum",
                 n: int = 1, tol: float = DEFAULT_TOL,
                 floor: float = CLASSIFY_FLOOR,
                 omega_l: float = 1.0, omega_0: float = DEFAULT_OMEGA_0,
                 gamma_w: float = DEFAULT_GAMMA_W) -> SweepTable:
    """Classify every (zeta, t_half) grid cell; solver failures are recorded
    in-row with label ERR rather than aborting the sweep."""
    table = SweepTable(
        columns=("zeta", "t_half", "err_uw", "err_wk", "err_us", "label",
                 "n_rc_used", "backend"),
        metadata={"theta": theta, "flavor": flavor, "n": n, "tol": tol,
                  "metric": f"max_component|diff|/max(|exact|,{floor})",
                  "omega_0": omega_0, "gamma_w": gamma_w},
    )
    for zv in zeta_grid:
        for tv in t_grid:
            p = _params_at(zv, tv, theta, n, omega_l, omega_0, gamma_w)
            try:
                pt = classify_point(p, flavor=flavor, tol=tol, floor=floor)
            except Exception as exc:  # recorded per-cell, sweep continues
                table.append(zv, tv, math.nan, math.nan, math.nan,
                             f"ERR:{type(exc).__name__}", 0, "none")
                continue
            table.append(pt.zeta, pt.t_half, pt.err_uw, pt.err_wk,
                         pt.err_us, pt.label, pt.n_rc_used, pt.backend)
    return table
