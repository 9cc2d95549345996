"""Dominant eigenvalue and biorthonormal eigenvectors of the generator.

The long-time statistics are governed by the eigenvalue of largest real
part, zeta(lam, t), with right/left eigenvectors normalised to <L|R> = 1.
Along a driving cycle the dominant branch is tracked by eigenvector overlap
with the previous node rather than by re-sorting real parts, which avoids
branch swaps near avoided crossings; consistency with the largest real part
is asserted.

Gauge convention: ||R||_2 = 1 with the sign fixed by the largest-magnitude
component (first node) or by positive overlap with the tracking hint.
Closed-loop geometric integrals are invariant under per-node rescalings
R -> c R, L -> L/c, which tests exercise explicitly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import model
from ._linalg import CLD, LD, batched_inverse, polish_eigensystem


class SpectralError(RuntimeError):
    """Eigen-decomposition violated its contract (complex dominant pair,
    residuals out of bounds, or an untrackable branch)."""


@dataclass
class SpectralTriple:
    """Dominant eigenvalue with gauge-fixed right/left eigenvectors."""

    zeta: float
    r: np.ndarray
    l: np.ndarray
    residuals: tuple[float, float]
    gap: float

    def overlap(self, other: "SpectralTriple") -> float:
        """Cosine overlap of the right eigenvectors."""
        num = float(np.dot(self.r, other.r))
        den = float(np.linalg.norm(self.r) * np.linalg.norm(other.r))
        return num / den


_RESIDUAL_BOUND = 1e-10
_GAP_WARN = 1e-8


def _select_dominant(w, v_columns, hint_vec=None, norm=None):
    """Index of the dominant eigenvalue among w (1-D complex array).

    Without a hint: largest real part, which must belong to an (effectively)
    real eigenvalue.  With a hint vector: maximal |overlap| with the hint,
    asserted to coincide with the largest real part.
    """
    scale = norm if norm is not None else float(np.max(np.abs(w)))
    imag_tol = 1e-10 * scale + 1e-13
    k_max = int(np.argmax(w.real))
    if abs(w[k_max].imag) > imag_tol:
        order = np.argsort(-w.real)
        raise SpectralError(
            "dominant eigenvalue is part of a complex pair: "
            f"leading eigenvalues {w[order[:3]]}")
    if hint_vec is None:
        return k_max
    overlaps = np.abs(hint_vec @ v_columns) / np.linalg.norm(v_columns, axis=0)
    k_hint = int(np.argmax(overlaps))
    if k_hint != k_max and abs(w[k_hint].real - w[k_max].real) > imag_tol:
        raise SpectralError(
            f"overlap tracking selected eigenvalue {w[k_hint]} but the "
            f"largest real part is {w[k_max]}")
    return k_hint


def dominant_triple(m, hint: SpectralTriple | None = None) -> SpectralTriple:
    """Dominant triple of a single 5x5 generator (double precision).

    The left eigenvector comes from the inverse of the right-eigenvector
    matrix, which is biorthonormal to the right set by construction.
    """
    if isinstance(m, model.LiouvillianMatrix):
        m = m.matrix
    m = np.asarray(m, dtype=float)
    w, v = np.linalg.eig(m)
    vinv = np.linalg.inv(v)
    norm = float(np.linalg.norm(m, np.inf))
    k = _select_dominant(w, v, None if hint is None else hint.r, norm=norm)

    gaps = np.abs(w - w[k])
    gaps[k] = np.inf
    gap = float(np.min(gaps))
    if gap < _GAP_WARN * norm:
        warnings.warn(
            f"near-degenerate dominant eigenvalue: gap {gap:.3e} "
            f"< 1e-8 * ||M|| = {_GAP_WARN * norm:.3e}", stacklevel=2)

    r = np.real(v[:, k]).copy()
    l = np.real(vinv[k, :]).copy()
    scale = np.linalg.norm(r)
    r /= scale
    l *= scale
    if hint is None:
        if r[int(np.argmax(np.abs(r)))] < 0:
            r, l = -r, -l
    elif float(hint.r @ r) < 0:
        r, l = -r, -l
    zeta = float(np.real(w[k]))
    # one biorthogonal Rayleigh step tightens the eigenvalue
    zeta = float(l @ (m @ r))
    res_r = float(np.linalg.norm(m @ r - zeta * r))
    res_l = float(np.linalg.norm(l @ m - zeta * l))
    bound = _RESIDUAL_BOUND * norm
    if max(res_r, res_l) > bound:
        raise SpectralError(
            f"eigenpair residuals ({res_r:.2e}, {res_l:.2e}) exceed 1e-10*||M||={bound:.2e}")
    return SpectralTriple(zeta=zeta, r=r, l=l, residuals=(res_r, res_l), gap=gap)


# ---------------------------------------------------------------------------
# batched cycle evaluation (extended precision)
# ---------------------------------------------------------------------------

@dataclass
class CycleSpectralData:
    """Polished full eigensystems along a set of cycle nodes.

    All arrays are complex long double: w (N,5), v (N,5,5) unit-norm columns,
    vinv (N,5,5) biorthogonal rows, dominant index per node, and the
    generator plus its analytic time derivative.
    """

    times: np.ndarray
    w: np.ndarray
    v: np.ndarray
    vinv: np.ndarray
    dominant: np.ndarray
    m: np.ndarray
    mdot: np.ndarray

    @property
    def zeta(self):
        """Dominant eigenvalue per node (long double, real)."""
        idx = np.arange(len(self.times))
        z = self.w[idx, self.dominant]
        return z.real.astype(LD)

    def noise_scale(self) -> float:
        """||M|| / gap, the amplification factor of eigenvector round-off.

        Numerical zeros of cycle integrals sit near eps * noise_scale().
        """
        idx = np.arange(len(self.times))
        zo = self.w[idx, self.dominant]
        dz = np.abs(self.w - zo[:, None]).astype(float)
        dz[idx, self.dominant] = np.inf
        min_gap = float(np.min(dz))
        norm = float(np.max(np.abs(self.m.astype(float))))
        return norm / max(min_gap, 1e-300)

    def geometric_integrand(self, gauge_jitter: np.random.Generator | None = None):
        """<L_o | dR_o/dt> per node from first-order perturbation theory.

        In the unit-norm gauge, <L|Rdot> = -(R_o . P)/(R_o . R_o) with
        P = sum_{k != o} R_k (L_k Mdot R_o)/(zeta_o - zeta_k).  The value is
        invariant under per-mode rescalings of the eigenvectors; an optional
        jitter generator applies random scalings to make tests of that
        property explicit.
        """
        n = len(self.times)
        idx = np.arange(n)
        v, vinv = self.v, self.vinv
        if gauge_jitter is not None:
            scales = gauge_jitter.uniform(0.2, 5.0, size=(n, 5))
            signs = gauge_jitter.choice([-1.0, 1.0], size=(n, 5))
            c = (scales * signs).astype(LD)
            v = v * c[:, None, :]
            vinv = vinv / c[:, :, None]
        o = self.dominant
        ro = v[idx, :, o]
        zo = self.w[idx, o]
        b = np.einsum("nkj,nj->nk", np.einsum("nki,nij->nkj", vinv, self.mdot.astype(CLD)), ro)
        a = np.einsum("njk,nj->nk", v, ro)
        dz = zo[:, None] - self.w
        mask = np.ones(dz.shape, dtype=bool)
        mask[idx, o] = False
        d = -(np.where(mask, a * b, 0) / np.where(mask, dz, 1)).sum(axis=1)
        d = d / np.einsum("nj,nj->n", ro, ro)
        imag = float(np.max(np.abs(d.imag)))
        real_scale = float(np.max(np.abs(d.real))) + 1e-30
        if imag > 1e-6 * real_scale + 1e-20:
            raise SpectralError(f"geometric integrand has imaginary residue {imag:.2e}")
        return d.real.astype(LD)


def cycle_spectral_data(params, spec, lam, times, variant="fix_diagonal",
                        hint: SpectralTriple | None = None) -> CycleSpectralData:
    """Polished eigensystems at all cycle nodes with dominant-branch tracking."""
    times = np.asarray(times, dtype=float)
    m_ext, mdot_ext = model._generator_batch(
        params, spec, lam, times.astype(LD), variant, dtype=LD, with_tderiv=True)
    m64 = m_ext.astype(float)
    w64, v64 = np.linalg.eig(m64)
    w, v, vinv = polish_eigensystem(m_ext, w64, v64)

    n = len(times)
    norm = float(np.max(np.abs(m64)))
    dominant = np.empty(n, dtype=int)
    prev = None if hint is None else hint.r.astype(float)
    for i in range(n):
        dominant[i] = _select_dominant(w[i].astype(complex),
                                       v[i].astype(complex), prev, norm=norm)
        prev = v[i, :, dominant[i]].real.astype(float)
    return CycleSpectralData(times=times, w=w, v=v, vinv=vinv,
                             dominant=dominant, m=m_ext, mdot=mdot_ext)


# ---------------------------------------------------------------------------
# finite-difference time derivative of the tracked triple
# ---------------------------------------------------------------------------

def _matched_triple(params, spec, lam, t, variant, ref: SpectralTriple) -> SpectralTriple:
    """Triple at time t, branch- and gauge-matched to a reference triple.

    The scale is fixed projectively, R -> R * (ref.r . ref.r)/(ref.r . R),
    so finite differences against the reference gauge are well defined and
    insensitive to how the eigensolver scales its output.
    """
    trip = dominant_triple(model.assemble_liouvillian(params, spec, lam, t, variant), hint=ref)
    c = float(ref.r @ ref.r) / float(ref.r @ trip.r)
    return SpectralTriple(zeta=trip.zeta, r=trip.r * c, l=trip.l / c,
                          residuals=trip.residuals, gap=trip.gap)


def triple_derivative_t(params, spec, lam, t, h: float | None = None,
                        variant: str = "fix_diagonal"):
    """d|R>/dt and d<L|/dt by Richardson-refined central differences.

    Step defaults to t_p * 1e-5.  Returns (rdot, ldot, triple-at-t).  The
    endpoints at t +- h and t +- h/2 are gauge-matched to the central triple
    before differencing.
    """
    if h is None:
        h = spec.t_p * 1e-5
    base = dominant_triple(model.assemble_liouvillian(params, spec, lam, t, variant))
    rdot = np.zeros(5)
    ldot = np.zeros(5)
    for step, coef in ((h, -1.0 / 3.0), (0.5 * h, 4.0 / 3.0)):
        plus = _matched_triple(params, spec, lam, t + step, variant, base)
        minus = _matched_triple(params, spec, lam, t - step, variant, base)
        rdot += coef * (plus.r - minus.r) / (2.0 * step)
        ldot += coef * (plus.l - minus.l) / (2.0 * step)
    return rdot, ldot, base
