"""Work, power, efficiency, EMP, affinity, entropy production and the TUR ratio.

Work per emitted photon:

    W = (ea - eb) - ln((1 + n_l)/n_l) * (1/t_p) int_0^{t_p} T_c(t) dt

Note the minus sign on the temperature term.  The source expression is
printed with a plus, but that choice gives eta > 1 at the baseline
parameters and a TUR ratio far below 1 in the undriven engine, while the
minus sign yields W -> 0 as t_l -> T_c (no work from a cavity at the cold
temperature), efficiencies matching the reported EMP scale, and an exact
gamma/eta = 1 identity at zero driving amplitude, around which the driven
corrections live.  The minus sign is therefore taken as the intended form.

Efficiency eta = W/(ea - e1); EMP maximises P = W*j over the cavity-coupled
level eb.  The affinity is the log ratio of cycle-integrated forward and
backward rate products, and gamma = eta_c P / (P + T_c A j).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import fcs, model
from ._linalg import LD, gauss_legendre

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ThermoError(RuntimeError):
    pass


@dataclass
class ThermoReport:
    """All thermodynamic outputs for one parameter point."""

    work: float
    power: float
    eta: float
    eta_carnot: float
    affinity: float
    entropy_rate: float
    gamma: float
    tur_ratio: float
    flux: float


@dataclass
class EmpResult:
    """Power maximum over eb with the efficiency at the maximiser."""

    eb_star: float
    eta_star: float
    p_star: float
    on_boundary: bool
    n_evals: int


def _cycle_quadrature(spec, f, rtol=1e-9, atol=1e-14, n_start=33, n_cap=4097):
    """(1/t_p) int_0^{t_p} f(t) dt with node doubling, in long double."""
    t0, t1 = spec.cycle_window()
    t_p = LD(t1 - t0)
    prev = None
    n = n_start
    while True:
        x, w = gauss_legendre(n)
        t = LD(t0) + LD(0.5) * t_p * (x + 1)
        val = ((LD(0.5) * t_p * w) @ f(t)) / t_p
        if prev is not None and abs(val - prev) <= rtol * abs(val) + atol:
            return val
        if 2 * (n - 1) + 1 > n_cap:
            raise fcs.QuadratureError(f"period quadrature stuck at N={n}")
        prev = val
        n = 2 * (n - 1) + 1


def mean_cold_temperature(params, spec) -> float:
    """Cycle average of T_c(t); equals tc0 whenever the envelope is centred."""
    def f(t):
        tc, _, _, _ = model._temperatures_and_slopes(spec, t, LD)
        return tc
    return float(_cycle_quadrature(spec, f))


def work(params: model.EngineParams, spec: model.DrivingSpec) -> float:
    """Work per photon event (see module docstring for the sign choice)."""
    nl = params.nl
    tc_avg = _cycle_quadrature(spec, lambda t: model._temperatures_and_slopes(spec, t, LD)[0])
    return float(LD(params.ea - params.eb) - LD(math.log1p(1.0 / nl)) * tc_avg)


def power(params, spec, variant="fix_diagonal", contribution="total",
          cums: fcs.CumulantSet | None = None) -> float:
    """P = W * j with j the total (or dynamic-only) photon flux."""
    if cums is None:
        cums = fcs.cumulants(params, spec, order=1, variant=variant)
    j = cums.j if contribution == "total" else cums.jd
    return work(params, spec) * j


def efficiency(params, spec) -> float:
    """eta = W / (ea - e1)."""
    gap = params.ea - params.e1
    if gap == 0:
        raise ThermoError("ea = e1: efficiency undefined")
    return work(params, spec) / gap


def carnot_efficiency(spec) -> float:
    """eta_c = 1 - tc0/th0 from the base temperatures."""
    return 1.0 - spec.tc0 / spec.th0


def affinity(params, spec) -> float:
    """Thermodynamic affinity from cycle-integrated rate products.

    A = ln[ (1+n_l) int (1+n_c) n_h dt / ( n_l int n_c (1+n_h) dt ) ]
    """
    def occ(t):
        tc, th, _, _ = model._temperatures_and_slopes(spec, t, LD)
        nc = 1 / np.expm1(LD(params.eb - params.e1) / tc)
        nh = 1 / np.expm1(LD(params.ea - params.e1) / th)
        return nc, nh

    def fwd_rate(t):
        nc, nh = occ(t)
        return (nc + 1) * nh

    def bwd_rate(t):
        nc, nh = occ(t)
        return nc * (nh + 1)

    fwd = _cycle_quadrature(spec, fwd_rate)
    bwd = _cycle_quadrature(spec, bwd_rate)
    nl = LD(params.nl)
    ratio = (nl + 1) * fwd / (nl * bwd)
    if not ratio > 0:
        raise ThermoError(f"nonpositive affinity ratio {ratio}: invalid regime")
    return float(np.log(ratio))


def tur_ratio(params, spec, variant="fix_diagonal", tc_mode="period_average",
              cums: fcs.CumulantSet | None = None) -> tuple[float, float]:
    """(gamma, gamma/eta) with gamma = eta_c P / (P + T_c A j).

    ``tc_mode`` selects the cold temperature entering gamma: the cycle
    average of T_c(t) (default) or the base value tc0.
    """
    if cums is None:
        cums = fcs.cumulants(params, spec, order=1, variant=variant)
    j = cums.j
    w = work(params, spec)
    p = w * j
    aff = affinity(params, spec)
    tc = spec.tc0 if tc_mode == "base" else mean_cold_temperature(params, spec)
    denom = p + tc * aff * j
    if denom == 0:
        raise ThermoError("P + T_c A j = 0: TUR ratio singular")
    gamma = carnot_efficiency(spec) * p / denom
    return gamma, gamma / efficiency(params, spec)


def thermo_report(params, spec, variant="fix_diagonal",
                  tc_mode="period_average") -> ThermoReport:
    """Full thermodynamic characterisation of one parameter point."""
    cums = fcs.cumulants(params, spec, order=1, variant=variant)
    w = work(params, spec)
    j = cums.j
    p = w * j
    aff = affinity(params, spec)
    eta = efficiency(params, spec)
    eta_c = carnot_efficiency(spec)
    tc = spec.tc0 if tc_mode == "base" else mean_cold_temperature(params, spec)
    denom = p + tc * aff * j
    if denom == 0:
        raise ThermoError("P + T_c A j = 0: TUR ratio singular")
    gamma = eta_c * p / denom
    return ThermoReport(work=w, power=p, eta=eta, eta_carnot=eta_c,
                        affinity=aff, entropy_rate=j * aff, gamma=gamma,
                        tur_ratio=gamma / eta, flux=j)


_EB_MARGIN = 1e-3


def emp(params, spec, eb_range=None, variant="fix_diagonal",
        contribution="total", n_coarse=64, xtol=1e-6) -> EmpResult:
    """Efficiency at maximum power: maximise P over eb, return eta there.

    Coarse scan (64 nodes) followed by golden-section refinement to
    |d eb| < 1e-6.  A maximum on the range boundary is flagged.
    """
    if eb_range is None:
        # e2 < eb is a model invariant; coincides with e1 + margin for the
        # degenerate pair
        eb_range = (max(params.e1, params.e2) + _EB_MARGIN, params.ea - _EB_MARGIN)
    lo, hi = eb_range
    if not (params.e2 <= lo < hi < params.ea):
        raise ThermoError(f"eb range {eb_range} not inside (e2, ea)")

    evals = 0

    def p_of(eb):
        nonlocal evals
        evals += 1
        return power(params.with_eb(float(eb)), spec, variant, contribution)

    grid = np.linspace(lo, hi, n_coarse)
    vals = [p_of(eb) for eb in grid]
    k = int(np.argmax(vals))
    on_boundary = k in (0, n_coarse - 1)
    if on_boundary:
        warnings.warn(f"power maximum at the eb range boundary eb={grid[k]:.6f}",
                      stacklevel=2)
        eb_star = float(grid[k])
    else:
        a, b = float(grid[k - 1]), float(grid[k + 1])
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        fc, fd = p_of(c), p_of(d)
        while abs(b - a) > xtol:
            if fc > fd:
                b, d, fd = d, c, fc
                c = b - _GOLDEN * (b - a)
                fc = p_of(c)
            else:
                a, c, fc = c, d, fd
                d = a + _GOLDEN * (b - a)
                fd = p_of(d)
        eb_star = 0.5 * (a + b)
    pstar = p_of(eb_star)
    eta_star = efficiency(params.with_eb(eb_star), spec)
    return EmpResult(eb_star=eb_star, eta_star=eta_star, p_star=pstar,
                     on_boundary=on_boundary, n_evals=evals)


def carnot_sweep(params, spec, eta_c_values, variant="fix_diagonal",
                 contribution="total", eb_range=None):
    """eta* for each eta_c (th0 = tc0/(1 - eta_c), tc0 fixed) plus a linear fit.

    Returns (rows, fit) where rows = [(eta_c, eta_star, eb_star), ...] and
    fit = {slope, intercept, slope_se, intercept_se}.
    """
    rows = []
    for eta_c in eta_c_values:
        if not 0.0 < eta_c < 1.0:
            raise ThermoError(f"eta_c must lie in (0, 1), got {eta_c}")
        driven = replace(spec, th0=spec.tc0 / (1.0 - eta_c))
        res = emp(params, driven, eb_range, variant, contribution)
        rows.append((float(eta_c), res.eta_star, res.eb_star))
    x = np.array([r[0] for r in rows])
    y = np.array([r[1] for r in rows])
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    dof = max(len(x) - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(a.T @ a)
    fit = {"slope": float(coef[0]), "intercept": float(coef[1]),
           "slope_se": float(math.sqrt(cov[0, 0])),
           "intercept_se": float(math.sqrt(cov[1, 1]))}
    return rows, fit
