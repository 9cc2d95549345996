"""Dynamic and geometric scaled cumulant generating functions and cumulants.

Over one driving cycle [0, t_p],

    S_d(lam) = (1/t_p) int_0^{t_p} zeta(lam, t) dt
    S_g(lam) = -(1/t_p) int_0^{t_p} <L(lam,t) | dR(lam,t)/dt> dt

with zeta the dominant eigenvalue of the counting-field generator and
(L, R) its biorthonormal left/right eigenvectors.  Photon flux and noise are
the first and second lambda-derivatives at lam = 0, split into dynamic and
geometric parts.

Quadrature is composite Gauss-Legendre with node doubling until the relative
change drops below 1e-9; the geometric integrand comes from first-order
perturbation theory with the analytic dM/dt (see spectral), which is
pointwise gauge-invariant and accurate to the long-double noise floor.
Lambda-derivatives use a 5-point central stencil validated by re-running at
half step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import model, spectral
from ._linalg import LD, gauss_legendre

_N_START = 33
_N_CAP = 4097
_QUAD_RTOL = 1e-9
_QUAD_ATOL = 1e-12
_LOOP_TOL = 1e-8

#: absolute noise floors for the stencil validation; values below these are
#: numerically zero (phi = 0 geometric quantities land around 1e-13/1e-10)
_FLUX_ATOL = 1e-12
_NOISE_ATOL = 1e-9


class QuadratureError(RuntimeError):
    """Cycle quadrature failed to converge below the node cap."""


class OpenLoopError(RuntimeError):
    """The driving cycle does not close in parameter space, so the
    geometric loop integral is not defined."""


class DerivativeError(RuntimeError):
    """Lambda-stencil failed its half-step validation down to the floor."""


@dataclass
class CgfResult:
    """Scaled CGF values at one lambda with quadrature metadata."""

    lam: float
    sd: float
    sg: float | None
    n_nodes: int
    err_sd: float
    err_sg: float | None
    loop_overlap: float | None = None
    # extended-precision values, used internally by the stencils
    sd_ext: np.longdouble = field(default=LD(0), repr=False)
    sg_ext: np.longdouble | None = field(default=None, repr=False)


@dataclass
class CumulantSet:
    """First and second photon cumulants, dynamic and geometric parts."""

    jd: float
    jg: float
    nd: float
    ng: float
    lambda_step: float
    validation: dict[str, float]

    @property
    def j(self) -> float:
        return self.jd + self.jg

    @property
    def n(self) -> float:
        return self.nd + self.ng


def _cycle_nodes(spec, n):
    x, w = gauss_legendre(n)
    t0, t1 = spec.cycle_window()
    half = LD(0.5) * LD(t1 - t0)
    return LD(t0) + half * (x + 1), half * w


def _loop_overlap(params, spec, lam, variant) -> float:
    """Overlap of the dominant eigenvector at the two window ends."""
    t0, t1 = spec.cycle_window()
    a = spectral.dominant_triple(model.assemble_liouvillian(params, spec, lam, t0, variant))
    b = spectral.dominant_triple(model.assemble_liouvillian(params, spec, lam, t1, variant),
                                 hint=a)
    return abs(a.overlap(b))


def _cgf_pair(params, spec, lam, variant="fix_diagonal", geometric=True,
              n_start=_N_START, n_cap=_N_CAP,
              gauge_jitter=None) -> CgfResult:
    """S_d (and optionally S_g) with adaptive node doubling."""
    if n_start < _N_START:
        raise ValueError(f"quadrature resolution must be >= {_N_START}")
    t_p = LD(spec.t_p)
    prev_sd = prev_sg = None
    err_sd = err_sg = math.inf
    loop_overlap = None
    if geometric:
        loop_overlap = _loop_overlap(params, spec, lam, variant)
        if loop_overlap < 1.0 - _LOOP_TOL:
            raise OpenLoopError(
                f"cycle endpoints overlap only {loop_overlap:.12f} < 1 - 1e-8; "
                "the envelope must be centred in the cycle window "
                "(DrivingSpec default) for a closed loop")
    n = n_start
    while True:
        t, w = _cycle_nodes(spec, n)
        data = spectral.cycle_spectral_data(params, spec, lam, t, variant)
        sd = (w @ data.zeta) / t_p
        sg = None
        if geometric:
            d = data.geometric_integrand(gauge_jitter=gauge_jitter)
            sg = -(w @ d) / t_p
        if prev_sd is not None:
            # numerical zeros bottom out at eps_longdouble * ||M||/gap
            atol = _QUAD_ATOL + 200.0 * float(np.finfo(LD).eps) * data.noise_scale()
            err_sd = float(abs(sd - prev_sd))
            ok = err_sd <= _QUAD_RTOL * float(abs(sd)) + atol
            if geometric:
                err_sg = float(abs(sg - prev_sg))
                ok = ok and err_sg <= _QUAD_RTOL * float(abs(sg)) + atol
            if ok:
                break
        if 2 * (n - 1) + 1 > n_cap:
            raise QuadratureError(
                f"no convergence at N={n}: last estimates "
                f"sd=({prev_sd}, {sd}), sg=({prev_sg}, {sg})")
        prev_sd, prev_sg = sd, sg
        n = 2 * (n - 1) + 1
    return CgfResult(
        lam=float(lam), sd=float(sd),
        sg=None if sg is None else float(sg),
        n_nodes=n, err_sd=err_sd,
        err_sg=None if sg is None else err_sg,
        loop_overlap=loop_overlap,
        sd_ext=sd, sg_ext=sg)


def dynamic_cgf(params, spec, lam, variant="fix_diagonal", **kw) -> CgfResult:
    """S_d(lam): cycle average of the dominant eigenvalue."""
    return _cgf_pair(params, spec, lam, variant, geometric=False, **kw)


def geometric_cgf(params, spec, lam, variant="fix_diagonal",
                  gauge_jitter=None, verify_nodes=0, rng=None, **kw) -> CgfResult:
    """S_g(lam): the geometric loop integral -(1/t_p) oint <L|Rdot> dt.

    Requires a closed cycle (endpoint eigenvector overlap > 1 - 1e-8).
    ``gauge_jitter`` rescales eigenvectors randomly per node to exercise
    gauge invariance.  ``verify_nodes`` > 0 cross-checks the perturbative
    integrand against finite-difference <L|Rdot> and -<Ldot|R> at that many
    random nodes.
    """
    res = _cgf_pair(params, spec, lam, variant, geometric=True,
                    gauge_jitter=gauge_jitter, **kw)
    if verify_nodes:
        check_integrand_consistency(params, spec, lam, variant,
                                    n_nodes=verify_nodes, rng=rng)
    return res


def check_integrand_consistency(params, spec, lam, variant="fix_diagonal",
                                n_nodes=16, rng=None, rtol=2e-3):
    """Compare the perturbative <L|Rdot> against both finite-difference forms.

    Differentiating <L|R> = 1 gives <L|Rdot> = -<Ldot|R>; both are formed by
    Richardson-refined central differences and compared to the perturbative
    integrand at random cycle nodes.  Tolerance is set by the
    double-precision FD noise floor.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    t0, t1 = spec.cycle_window()
    times = rng.uniform(t0, t1, size=n_nodes)
    data = spectral.cycle_spectral_data(params, spec, lam, times, variant)
    d_pert = data.geometric_integrand()
    scale = float(np.max(np.abs(d_pert))) + 1e-9
    for i, t in enumerate(times):
        rdot, ldot, base = spectral.triple_derivative_t(params, spec, lam, float(t),
                                                        variant=variant)
        d_fd = float(base.l @ rdot)
        d_fd_alt = -float(ldot @ base.r)
        for val, label in ((d_fd, "<L|Rdot>"), (d_fd_alt, "-<Ldot|R>")):
            if abs(val - float(d_pert[i])) > rtol * scale:
                raise spectral.SpectralError(
                    f"FD {label}={val:.6e} disagrees with perturbative "
                    f"{float(d_pert[i]):.6e} at t={t:.6e} (scale {scale:.2e})")
    return True


_STENCIL_FIRST = np.array([1, -8, 0, 8, -1], dtype=LD)
_STENCIL_SECOND = np.array([-1, 16, -30, 16, -1], dtype=LD)


def _stencil_cumulants(values, h):
    """5-point first/second derivatives at 0 from values at {0,+-h,+-2h}."""
    c1 = _STENCIL_FIRST / (12 * h)
    c2 = _STENCIL_SECOND / (12 * h * h)
    return c1 @ values, c2 @ values


def cumulants(params, spec, order=2, scheme="stencil", variant="fix_diagonal",
              lambda_step=1e-3, verify=False, **kw) -> CumulantSet:
    """Photon flux (order 1) and noise (order 2) cumulants at lam = 0.

    The default scheme evaluates S_d and S_g on the 5-point stencil
    lam in {0, +-h, +-2h} and validates against the half-step result,
    shrinking h (floor 1e-5) until both agree to 1e-5 relative (with
    absolute floors 1e-12 / 1e-9 for flux / noise, the numerical-zero
    scale of the vanishing geometric quantities).  ``scheme="cubic_fit"``
    instead fits a cubic over 7 nodes, used as an independent cross-check.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if scheme not in ("stencil", "cubic_fit"):
        raise ValueError(f"unknown scheme {scheme!r}")

    cache: dict[float, CgfResult] = {}

    def value(l):
        key = float(l)
        if key not in cache:
            cache[key] = _cgf_pair(params, spec, key, variant, geometric=True, **kw)
        return cache[key]

    if verify:
        check_integrand_consistency(params, spec, 0.0, variant)

    if scheme == "cubic_fit":
        h = LD(lambda_step)
        lams = np.array([-3, -2, -1, 0, 1, 2, 3], dtype=LD) * h
        sd = np.array([value(l).sd_ext for l in lams], dtype=LD)
        sg = np.array([value(l).sg_ext for l in lams], dtype=LD)
        cd = np.polyfit(lams.astype(float), sd.astype(float), 3)
        cg = np.polyfit(lams.astype(float), sg.astype(float), 3)
        return CumulantSet(jd=float(cd[2]), jg=float(cg[2]),
                           nd=float(2 * cd[1]), ng=float(2 * cg[1]),
                           lambda_step=float(h), validation={})

    h = LD(lambda_step)
    floor = LD(1e-5)
    rtol = 1e-5

    def stencil_at(step):
        lams = np.array([-2, -1, 0, 1, 2], dtype=LD) * step
        sd = np.array([value(l).sd_ext for l in lams], dtype=LD)
        sg = np.array([value(l).sg_ext for l in lams], dtype=LD)
        jd, nd = _stencil_cumulants(sd, step)
        jg, ng = _stencil_cumulants(sg, step)
        return jd, jg, nd, ng

    while True:
        coarse = stencil_at(h)
        fine = stencil_at(h / 2)
        deltas = {}
        ok = True
        names = ("jd", "jg", "nd", "ng")
        atols = (_FLUX_ATOL, _FLUX_ATOL, _NOISE_ATOL, _NOISE_ATOL)
        active = names[:2] if order == 1 else names
        # dynamic/geometric pairs validate against their common scale: a
        # geometric part that is a numerical zero only matters relative to
        # its dynamic partner
        scale_j = max(abs(float(v)) for v in (*coarse[:2], *fine[:2]))
        scale_n = max(abs(float(v)) for v in (*coarse[2:], *fine[2:]))
        scales = (scale_j, scale_j, scale_n, scale_n)
        for name, a, b, atol, scale in zip(names, coarse, fine, atols, scales):
            delta = float(abs(a - b))
            deltas[name] = delta
            if name in active and delta > rtol * scale + atol:
                ok = False
        if ok:
            jd, jg, nd, ng = (float(v) for v in fine)
            if order == 2 and nd <= 0:
                warnings.warn(f"dynamic noise nd={nd:.3e} <= 0: outside the "
                              "engine operating regime", stacklevel=2)
            return CumulantSet(jd=jd, jg=jg, nd=nd, ng=ng,
                               lambda_step=float(h / 2), validation=deltas)
        if h / 2 <= floor:
            raise DerivativeError(
                f"stencil validation failed at the step floor: deltas {deltas}")
        h = h / 2
