"""Engine parameters, driving protocols and the 5x5 counting-field generator.

The engine has two degenerate lower states |1>, |2> coupled to an upper pair
|b>, |a> through a cold and a hot thermal bath; the a->b transition feeds a
single cavity mode.  The reduced state is the real vector

    rho = {rho_11, rho_22, rho_aa, rho_bb, Re rho_12}

and evolves under a 5x5 generator whose (2,3)/(3,2) entries carry the photon
counting field: exp(-lam) dresses cavity absorption, exp(+lam) dresses
emission.  Bath temperatures are driven periodically with an amplitude
envelope (constant, Gaussian or Lorentzian); all temperature dependence
enters through the Bose factors n_c(t), n_h(t).

Units: k_B = hbar = 1 throughout.

The generator as commonly printed is not trace conserving: the population-
weighted sums of columns 3 and 4 come out as -r_h*(n_h+1) and -r_c*(n_c+1)
instead of zero.  Three variants are provided; ``fix_diagonal`` (drop the
factor 2 in the bath decay on the diagonal) is the default and the minimal
repair, ``fix_gain`` doubles the gain entries instead, ``as_printed`` keeps
the defect for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

LD = np.longdouble

ENVELOPES = ("constant", "gaussian", "lorentzian")
VARIANTS = ("as_printed", "fix_diagonal", "fix_gain")

#: weights of the population trace over the state vector
TRACE_VECTOR = np.array([1.0, 1.0, 1.0, 1.0, 0.0])

FOUR_LN2 = 4.0 * math.log(2.0)


class ModelError(ValueError):
    """Invalid parameters or an invalid variant/envelope tag."""


@dataclass(frozen=True)
class EngineParams:
    """Static engine constants (atomic units).

    ``e1 <= e2 < eb < ea``; only ``e1`` enters the bath occupations, ``e2``
    is retained for completeness of the degenerate pair.
    """

    e1: float = 0.1
    e2: float = 0.1
    eb: float = 0.4
    ea: float = 1.5
    r1h: float = 0.1
    r2h: float = 0.1
    r1c: float = 0.1
    r2c: float = 0.1
    g: float = 40.0
    tau: float = 0.01
    ph: float = 0.3
    pc: float = 0.3
    tl: float = 2.0

    def __post_init__(self):
        if not (self.e1 <= self.e2 < self.eb < self.ea):
            raise ModelError(
                f"energies must satisfy e1 <= e2 < eb < ea, got "
                f"({self.e1}, {self.e2}, {self.eb}, {self.ea})")
        for name in ("r1h", "r2h", "r1c", "r2c", "g", "tau"):
            if getattr(self, name) < 0:
                raise ModelError(f"{name} must be >= 0")
        for name in ("ph", "pc"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ModelError(f"{name} must lie in [0, 1], got {v}")
        if self.tl <= 0:
            raise ModelError(f"tl must be > 0, got {self.tl}")

    @classmethod
    def equal_coupling(cls, r: float = 0.1, **kwargs) -> "EngineParams":
        """Equal system-reservoir coupling r for all four channels."""
        return cls(r1h=r, r2h=r, r1c=r, r2c=r, **kwargs)

    @property
    def rh(self) -> float:
        return self.r1h + self.r2h

    @property
    def rc(self) -> float:
        return self.r1c + self.r2c

    @property
    def nl(self) -> float:
        """Cavity Bose occupation 1/(exp((ea-eb)/tl) - 1)."""
        return 1.0 / math.expm1((self.ea - self.eb) / self.tl)

    def with_eb(self, eb: float) -> "EngineParams":
        return replace(self, eb=eb)


@dataclass(frozen=True)
class DrivingSpec:
    """Temperature driving protocol.

    T_c(t) = tc0 + A(t) sin(omega t),  T_h(t) = th0 + A(t) sin(omega t + phi)

    where A(t) is the amplitude envelope with FWHM ``te`` centred at
    ``center``.  One driving cycle is the window [0, t_p], t_p = 2 pi/omega.
    The default ``center = t_p/2`` puts the envelope peak mid-window so the
    cycle is a closed loop in (T_c, T_h) space, which the geometric CGF
    requires; ``center = 0`` reproduces the peak-at-window-edge convention
    (open loop for short envelopes).
    """

    tc0: float = 1.0
    th0: float = 1.67
    a0: float = 0.01
    omega: float = 2500.0
    phi: float = math.pi / 2
    envelope: str = "gaussian"
    te: float | None = None
    center: float | None = None

    def __post_init__(self):
        if not self.th0 > self.tc0 > 0:
            raise ModelError(f"need th0 > tc0 > 0, got ({self.tc0}, {self.th0})")
        if self.a0 < 0:
            raise ModelError("a0 must be >= 0")
        if self.omega <= 0:
            raise ModelError("omega must be > 0")
        env = self.envelope.lower()
        if env not in ENVELOPES:
            raise ModelError(f"unknown envelope {self.envelope!r}, expected one of {ENVELOPES}")
        object.__setattr__(self, "envelope", env)
        if self.te is None:
            object.__setattr__(self, "te", self.t_p)
        if self.te <= 0 and env != "constant":
            raise ModelError("te must be > 0 for non-constant envelopes")
        if self.center is None:
            object.__setattr__(self, "center", 0.5 * self.t_p)

    @property
    def t_p(self) -> float:
        """Driving period 2 pi / omega."""
        return 2.0 * math.pi / self.omega

    def cycle_window(self) -> tuple[float, float]:
        """Time window of one driving cycle."""
        return 0.0, self.t_p


def fig2_defaults() -> tuple[EngineParams, DrivingSpec]:
    """The baseline parameter point used throughout (equal coupling r=0.1)."""
    return EngineParams(), DrivingSpec()


# ---------------------------------------------------------------------------
# driving protocol evaluation
# ---------------------------------------------------------------------------

def envelope_value(spec: DrivingSpec, t):
    """Amplitude envelope A(t); total function of time, vectorised."""
    t = np.asarray(t, dtype=float)
    if spec.envelope == "constant":
        return np.full(t.shape, spec.a0)
    s = t - spec.center
    if spec.envelope == "gaussian":
        return spec.a0 * np.exp(-FOUR_LN2 * s * s / (spec.te * spec.te))
    half = 0.5 * spec.te
    return spec.a0 * half * half / (s * s + half * half)


def _envelope_and_slope(spec, t, dtype=float):
    """A(t) and dA/dt in the requested dtype (float64 or longdouble)."""
    t = np.asarray(t, dtype=dtype)
    a0 = dtype(spec.a0)
    if spec.envelope == "constant":
        return np.full(t.shape, a0), np.zeros(t.shape, dtype=dtype)
    s = t - dtype(spec.center)
    te = dtype(spec.te)
    if spec.envelope == "gaussian":
        c = dtype(4) * np.log(dtype(2)) / (te * te)
        a = a0 * np.exp(-c * s * s)
        return a, a * (-2 * c * s)
    half = te / 2
    den = s * s + half * half
    a = a0 * half * half / den
    return a, -a * 2 * s / den


def bath_temperatures(spec: DrivingSpec, t, check: bool = True):
    """(T_c(t), T_h(t)); reports a violation if T_h <= T_c at any queried t."""
    t = np.asarray(t, dtype=float)
    a = envelope_value(spec, t)
    tc = spec.tc0 + a * np.sin(spec.omega * t)
    th = spec.th0 + a * np.sin(spec.omega * t + spec.phi)
    if check and np.any(th <= tc):
        bad = t[np.atleast_1d(th <= tc)][:3]
        raise ModelError(f"T_h <= T_c at t={bad}; driving amplitude too large")
    return tc, th


def _temperatures_and_slopes(spec, t, dtype=float):
    t = np.asarray(t, dtype=dtype)
    a, adot = _envelope_and_slope(spec, t, dtype)
    om = dtype(spec.omega)
    phi = dtype(spec.phi)
    sc, cc = np.sin(om * t), np.cos(om * t)
    sh, ch = np.sin(om * t + phi), np.cos(om * t + phi)
    tc = dtype(spec.tc0) + a * sc
    th = dtype(spec.th0) + a * sh
    tcdot = adot * sc + a * om * cc
    thdot = adot * sh + a * om * ch
    return tc, th, tcdot, thdot


@dataclass(frozen=True)
class Occupations:
    """Bose factors of the three bosonic environments and their +1 partners."""

    nc: float
    nh: float
    nl: float

    @property
    def ntc(self):
        return self.nc + 1.0

    @property
    def nth(self):
        return self.nh + 1.0

    @property
    def ntl(self):
        return self.nl + 1.0


def occupations(params: EngineParams, tc, th) -> Occupations:
    """Bath/cavity Bose factors at given instantaneous temperatures.

    n_c = 1/(exp((eb-e1)/T_c) - 1), n_h = 1/(exp((ea-e1)/T_h) - 1),
    n_l = 1/(exp((ea-eb)/tl) - 1).
    """
    if np.any(np.asarray(tc) <= 0) or np.any(np.asarray(th) <= 0):
        raise ModelError("temperatures must be positive")
    for lo, hi, label in ((params.e1, params.eb, "eb-e1"),
                          (params.e1, params.ea, "ea-e1"),
                          (params.eb, params.ea, "ea-eb")):
        if hi == lo:
            raise ModelError(f"degenerate energies: {label} = 0")
    nc = 1.0 / np.expm1((params.eb - params.e1) / np.asarray(tc))
    nh = 1.0 / np.expm1((params.ea - params.e1) / np.asarray(th))
    return Occupations(nc=nc, nh=nh, nl=params.nl)


# ---------------------------------------------------------------------------
# generator assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiouvillianMatrix:
    """5x5 counting-field generator at one (lam, t) with its variant tag."""

    matrix: np.ndarray
    lam: float
    t: float
    variant: str

    def weighted_column_sums(self) -> np.ndarray:
        """Population-weighted column sums; zero for conserving variants at lam=0."""
        return TRACE_VECTOR @ self.matrix


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ModelError(f"unknown variant {variant!r}, expected one of {VARIANTS}")


def _generator_batch(params, spec, lam, t, variant, dtype=float, with_tderiv=False):
    """Generator matrices (..., 5, 5) at times t; optionally also dM/dt.

    The time derivative is analytic, entering through dn_c/dt and dn_h/dt.
    """
    _check_variant(variant)
    tc, th, tcdot, thdot = _temperatures_and_slopes(spec, t, dtype)
    if np.any(th <= tc):
        raise ModelError("T_h <= T_c inside the driving window")
    xc = dtype(params.eb - params.e1) / tc
    xh = dtype(params.ea - params.e1) / th
    nc = 1 / np.expm1(xc)
    nh = 1 / np.expm1(xh)
    nl = 1 / np.expm1(dtype(params.ea - params.eb) / dtype(params.tl))
    ntc, nth, ntl = nc + 1, nh + 1, nl + 1
    g2 = dtype(params.g) ** 2
    r1h, r2h = dtype(params.r1h), dtype(params.r2h)
    r1c, r2c = dtype(params.r1c), dtype(params.r2c)
    rh, rc = r1h + r2h, r1c + r2c
    ph, pc = dtype(params.ph), dtype(params.pc)
    y = -rc * nc * pc - rh * nh * ph
    n = rh * nh / 2 + rc * nc / 2 + dtype(params.tau)
    kdiag = dtype(1) if variant == "fix_diagonal" else dtype(2)
    kgain = dtype(2) if variant == "fix_gain" else dtype(1)
    eplus = np.exp(dtype(lam))
    eminus = np.exp(dtype(-lam))

    shape = np.asarray(t).shape
    m = np.zeros(shape + (5, 5), dtype=dtype)
    m[..., 0, 0] = -(r1c * nc + r1h * nh)
    m[..., 0, 2] = kgain * r1h * nth
    m[..., 0, 3] = kgain * r1c * ntc
    m[..., 0, 4] = y
    m[..., 1, 1] = -(r2c * nc + r2h * nh)
    m[..., 1, 2] = kgain * r2h * nth
    m[..., 1, 3] = kgain * r2c * ntc
    m[..., 1, 4] = y
    m[..., 2, 0] = r1h * nh
    m[..., 2, 1] = r2h * nh
    m[..., 2, 2] = -g2 * ntl - kdiag * rh * nth
    m[..., 2, 3] = g2 * nl * eminus
    m[..., 2, 4] = 2 * rh * ph * nh
    m[..., 3, 0] = r1c * nc
    m[..., 3, 1] = r2c * nc
    m[..., 3, 2] = g2 * ntl * eplus
    m[..., 3, 3] = -g2 * nl - kdiag * rc * ntc
    m[..., 3, 4] = 2 * rc * pc * nc
    m[..., 4, 0] = y / 2
    m[..., 4, 1] = y / 2
    m[..., 4, 2] = rh * ph * nth
    m[..., 4, 3] = rc * pc * ntc
    m[..., 4, 4] = -n
    if not with_tderiv:
        return m

    # dn/dT = n (n+1) x / T with x the exponent argument
    ncdot = nc * ntc * xc / tc * tcdot
    nhdot = nh * nth * xh / th * thdot
    ydot = -rc * ncdot * pc - rh * nhdot * ph
    md = np.zeros_like(m)
    md[..., 0, 0] = -(r1c * ncdot + r1h * nhdot)
    md[..., 0, 2] = kgain * r1h * nhdot
    md[..., 0, 3] = kgain * r1c * ncdot
    md[..., 0, 4] = ydot
    md[..., 1, 1] = -(r2c * ncdot + r2h * nhdot)
    md[..., 1, 2] = kgain * r2h * nhdot
    md[..., 1, 3] = kgain * r2c * ncdot
    md[..., 1, 4] = ydot
    md[..., 2, 0] = r1h * nhdot
    md[..., 2, 1] = r2h * nhdot
    md[..., 2, 2] = -kdiag * rh * nhdot
    md[..., 2, 4] = 2 * rh * ph * nhdot
    md[..., 3, 0] = r1c * ncdot
    md[..., 3, 1] = r2c * ncdot
    md[..., 3, 3] = -kdiag * rc * ncdot
    md[..., 3, 4] = 2 * rc * pc * ncdot
    md[..., 4, 0] = ydot / 2
    md[..., 4, 1] = ydot / 2
    md[..., 4, 2] = rh * ph * nhdot
    md[..., 4, 3] = rc * pc * ncdot
    md[..., 4, 4] = -(rh * nhdot + rc * ncdot) / 2
    return m, md


def assemble_liouvillian(params: EngineParams, spec: DrivingSpec, lam: float,
                         t: float, variant: str = "fix_diagonal") -> LiouvillianMatrix:
    """Counting-field generator at a single (lam, t)."""
    m = _generator_batch(params, spec, lam, np.asarray(float(t)), variant)
    return LiouvillianMatrix(matrix=m, lam=lam, t=float(t), variant=variant)
