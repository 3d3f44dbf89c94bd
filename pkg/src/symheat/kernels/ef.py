"""Eigenfunction (spectral) heat-kernel series restricted to the maximal torus.

Every space reduces to a one- or two-dimensional series in the radial
coordinate h:

* circle/torus: Fourier modes, decay exp(-k^2 t) per coordinate;
* sphere S^n:   degeneracy-weighted Gegenbauer polynomials in cos h,
                evaluated by a normalized three-term recurrence whose
                values are bounded by the h = 0 term, decay exp(-l(l+n-1)t);
* SO(3):        odd Chebyshev characters sin((2l+1)h/2)/sin(h/2) with
                degeneracy 2l+1, decay exp(-l(l+1)t);
* SU(3):        Weyl characters as alternant ratios over the (p,q) grid
                with dimension pq(p+q)/2, decay exp(-(2/3)(p^2+pq+q^2-3)t).

All series are summed with per-term exponent shifting (subtract the max
log magnitude) so the only way to overflow is for the kernel value itself
to overflow.  Each evaluation carries diagnostics; ``SeriesOverflowError``
is raised when a term would exceed 1e300 before cancellation or when the
kept tail visibly has not converged, signalling that t is below the
representation's validity and a small-time formula must be used instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, pi

import numpy as np

from ..errors import SeriesOverflowError
from ..geometry import Manifold, ProductLattice, SO3, SU3, Sphere, Torus

LOG_OVERFLOW = log(1e300)
CONV_TOL = 1e-5  # kept tail must be below this fraction of the term mass


@dataclass
class SeriesDiag:
    """Health report of one truncated series evaluation."""
    log_max_term: float
    last_term_ratio: float
    cancellation: float  # max |term| / |sum|, digits lost ~ log10 of this
    converged: bool
    overflowed: bool

    @property
    def valid(self) -> bool:
        return self.converged and not self.overflowed


def _check(diag: SeriesDiag, where: str, raise_invalid: bool):
    if raise_invalid and not diag.valid:
        raise SeriesOverflowError(
            f"{where}: series invalid (converged={diag.converged}, "
            f"overflowed={diag.overflowed}, last_term_ratio={diag.last_term_ratio:.2e})")


# ---------------------------------------------------------------------------
# circle / torus
# ---------------------------------------------------------------------------

def torus_ef(man: Torus, h, t: float, n_e: int, grad: bool = False,
             raise_invalid: bool = True):
    """Product of per-coordinate Fourier sums.

    Returns (K, dlogK/dh or None, diag).  h may be (..., n).
    """
    h = np.asarray(h, dtype=float)
    k = np.arange(1, n_e)
    w = np.exp(-k * k * t)  # (n_e-1,)
    c = np.cos(np.multiply.outer(h, k))
    s_per = 1.0 + 2.0 * (c * w).sum(axis=-1)  # per-coordinate sum, >0 for valid t
    K = np.prod(s_per, axis=-1) / (2.0 * pi) ** man.n
    g = None
    if grad:
        sn = np.sin(np.multiply.outer(h, k))
        ds = -2.0 * (sn * (k * w)).sum(axis=-1)
        g = ds / s_per
    last_ratio = 2.0 * w[-1] / max(float(np.min(np.abs(s_per))), 1e-300) if n_e > 1 else 0.0
    diag = SeriesDiag(0.0, last_ratio, float(2.0 * w.sum() + 1.0) / max(float(np.min(np.abs(s_per))), 1e-300),
                      last_ratio < CONV_TOL, False)
    _check(diag, f"torus EF (n_e={n_e}, t={t:g})", raise_invalid)
    return K, g, diag


# ---------------------------------------------------------------------------
# spheres
# ---------------------------------------------------------------------------

def _sphere_log_degeneracy(n: int, l: np.ndarray) -> np.ndarray:
    """log dim of the degree-l spherical-harmonic space on S^n."""
    from scipy.special import gammaln
    l = np.asarray(l, dtype=float)
    out = np.log(2 * l + n - 1) - log(n - 1) \
        + gammaln(l + n - 1) - gammaln(l + 1) - lgamma(n - 1)
    out[np.asarray(l) == 0] = 0.0
    return out


def sphere_ef(man: Sphere, h, t: float, n_e: int, grad: bool = False,
              raise_invalid: bool = True, dtype=np.float64):
    """Gegenbauer series; h scalar or (m,) array of radial angles."""
    n = man.n
    h_arr = np.atleast_1d(np.asarray(h, dtype=float)).reshape(-1)
    u = np.cos(h_arr).astype(dtype)
    lam = (n - 1) / 2.0
    logV = log(2.0) + 0.5 * (n + 1) * log(pi) - lgamma(0.5 * (n + 1))

    ls = np.arange(n_e)
    log_w = _sphere_log_degeneracy(n, ls) - ls * (ls + n - 1) * t  # log(D_l e^{-lam_l t})
    shift = float(np.max(log_w))
    w = np.exp((log_w - shift).astype(dtype))

    tot = np.zeros_like(u)
    dtot = np.zeros_like(u)
    sum_abs = np.zeros_like(u)
    c0 = np.ones_like(u)
    c1 = u.copy()
    d0 = np.zeros_like(u)
    d1 = np.ones_like(u)
    last = np.zeros_like(u)
    for l in range(n_e):
        if l == 0:
            ch, dch = c0, d0
        elif l == 1:
            ch, dch = c1, d1
        else:
            a = 2 * (l + lam - 1)
            b = l - 1
            c = l + 2 * lam - 1
            ch = (a * u * c1 - b * c0) / c
            dch = (a * (c1 + u * d1) - b * d0) / c
            c0, c1, d0, d1 = c1, ch, d1, dch
        term = w[l] * ch
        tot += term
        sum_abs += np.abs(term)
        last = np.abs(term)
        if grad:
            dtot += w[l] * dch
    # K = e^{shift - logV} * tot; evaluate through logs to avoid spurious overflow
    sgn = np.sign(tot)
    mag = np.abs(tot)
    with np.errstate(divide="ignore"):
        logK = shift - logV + np.log(np.where(mag > 0, mag, 1e-300))
    K = (sgn * np.exp(logK.astype(np.float64))).astype(np.float64)
    g = None
    if grad:
        # dK/dh = e^{shift-logV} * (-sin h) * sum w dch ; dlogK = that / K
        g = (-np.sin(h_arr) * dtot / np.where(mag > 0, tot, 1.0)).astype(np.float64)

    last_ratio = float(np.max(last / np.maximum(sum_abs, 1e-300)))
    canc = float(np.max(np.max(w) / np.maximum(mag, 1e-300)))
    overflow = (shift - logV) > LOG_OVERFLOW
    converged = last_ratio < CONV_TOL
    diag = SeriesDiag(shift - logV, last_ratio, canc, converged, bool(overflow))
    _check(diag, f"{man.name} EF (n_e={n_e}, t={t:g})", raise_invalid)
    if np.ndim(h) == 0:
        return float(K[0]), (float(g[0]) if g is not None else None), diag
    return K, g, diag


# ---------------------------------------------------------------------------
# SO(3)
# ---------------------------------------------------------------------------

def so3_ef(man: SO3, h, t: float, n_e: int, grad: bool = False,
           raise_invalid: bool = True):
    """Character series using Chebyshev U_{2l}(cos h/2), bounded by 2l+1."""
    h_arr = np.atleast_1d(np.asarray(h, dtype=float)).reshape(-1)
    x = np.cos(h_arr / 2.0)
    dx = -0.5 * np.sin(h_arr / 2.0)  # dx/dh
    vol = 8.0 * pi ** 2
    tot = np.zeros_like(x)
    dtot = np.zeros_like(x)
    sum_abs = np.zeros_like(x)
    U0 = np.ones_like(x)
    U1 = 2.0 * x
    dU0 = np.zeros_like(x)
    dU1 = 2.0 * np.ones_like(x)
    last = np.zeros_like(x)
    max_term = 0.0
    for m in range(0, 2 * n_e + 1):
        if m == 0:
            U, dU = U0, dU0
        elif m == 1:
            U, dU = U1, dU1
        else:
            U = 2.0 * x * U1 - U0
            dU = 2.0 * U1 + 2.0 * x * dU1 - dU0
            U0, U1, dU0, dU1 = U1, U, dU1, dU
        if m % 2 == 0:
            l = m // 2
            w = (2 * l + 1) * np.exp(-l * (l + 1) * t)
            term = w * U
            tot += term
            sum_abs += np.abs(term)
            last = np.abs(term)
            max_term = max(max_term, float(w * (2 * l + 1)))
            if grad:
                dtot += w * dU
    K = tot / vol
    g = (dx * dtot / np.where(tot != 0, tot, 1.0)) if grad else None
    last_ratio = float(np.max(last / np.maximum(sum_abs, 1e-300)))
    diag = SeriesDiag(log(max(max_term, 1e-300)) - log(vol), last_ratio,
                      float(max_term / max(np.min(np.abs(tot)), 1e-300)),
                      last_ratio < CONV_TOL, False)
    _check(diag, f"so3 EF (n_e={n_e}, t={t:g})", raise_invalid)
    if np.ndim(h) == 0:
        return float(K[0]), (float(g[0]) if g is not None else None), diag
    return K, g, diag


# ---------------------------------------------------------------------------
# SU(3)
# ---------------------------------------------------------------------------

_PERM_PAIRS = [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0),
               (0, 2, -1.0), (1, 0, -1.0), (2, 1, -1.0)]


def _su3_alternants(theta3: np.ndarray, n_e: int, grad: bool):
    """Numerator alternants A[p,q] = det(z_j^{l_k}), l = (p+q, q, 0), plus
    optional theta-gradients.  theta3: (m, 3) sum-zero phase vectors.

    Returns (A (m, n_e, n_e), dA (3, m, n_e, n_e) or None, Arho (m,), dArho).
    """
    m = theta3.shape[0]
    M = 2 * n_e + 1
    powers = np.arange(M)
    E = np.exp(1j * theta3[:, :, None] * powers[None, None, :])  # (m, 3, M)
    p = np.arange(1, n_e + 1)
    q = np.arange(1, n_e + 1)
    pq = p[:, None] + q[None, :]          # (n_e, n_e) exponent l1 = p+q
    qi = np.broadcast_to(q[None, :], (n_e, n_e))
    A = np.zeros((m, n_e, n_e), dtype=complex)
    dA = np.zeros((3, m, n_e, n_e), dtype=complex) if grad else None
    for a, b, sgn in _PERM_PAIRS:
        Ma = E[:, a, :][:, pq] * E[:, b, :][:, qi]  # (m, n_e, n_e)
        A += sgn * Ma
        if grad:
            dA[a] += sgn * 1j * pq * Ma
            dA[b] += sgn * 1j * qi * Ma
    # Weyl denominator = alternant at (p, q) = (1, 1)
    Arho = A[:, 0, 0].copy()
    dArho = dA[:, :, 0, 0].copy() if grad else None
    return A, dA, Arho, dArho


def su3_ef(man: SU3, h, t: float, n_e: int, grad: bool = False,
           raise_invalid: bool = True):
    """Character series over the (p, q) grid.

    h: (m, 3) or (3,) sum-zero phase vectors (full triple).  Returns
    (K (m,), grad3 (m, 3) traceless or None, diag).  Near chamber walls the
    alternant ratio is stabilized by averaging two +-delta evaluations.
    """
    theta = np.atleast_2d(np.asarray(h, dtype=float))
    single = np.ndim(h) == 1
    # wall guard: any phase pair congruent mod 2pi collapses the Weyl denominator
    wall = np.full(theta.shape[0], np.inf)
    for (i, j) in [(0, 1), (1, 2), (0, 2)]:
        d = theta[:, i] - theta[:, j]
        wall = np.minimum(wall, np.abs(np.pi - np.mod(np.pi - d, 2.0 * np.pi)))
    near = wall < 1e-6
    if np.any(near):
        delta = 2e-5 * np.array([1.0, 0.0, -1.0])
        Kp, gp, diag = su3_ef(man, theta[near] + delta, t, n_e, grad, raise_invalid)
        Km, gm, _ = su3_ef(man, theta[near] - delta, t, n_e, grad, raise_invalid)
        Kfix = 0.5 * (Kp + Km)
        gfix = 0.5 * (gp + gm) if grad else None
        if np.all(near):
            if single:
                return float(Kfix[0]), (gfix[0] if grad else None), diag
            return Kfix, gfix, diag
    p = np.arange(1, n_e + 1, dtype=float)
    dims = p[:, None] * p[None, :] * (p[:, None] + p[None, :]) / 2.0
    lam = (2.0 / 3.0) * (p[:, None] ** 2 + p[:, None] * p[None, :] + p[None, :] ** 2 - 3.0)
    w = dims * np.exp(-lam * t)  # (n_e, n_e)

    A, dA, Arho, dArho = _su3_alternants(theta, n_e, grad)
    num = np.einsum("pq,mpq->m", w, A)
    ratio = num / Arho
    K = np.real(ratio) / man.volume
    g3 = None
    if grad:
        dnum = np.einsum("pq,ampq->am", w, dA)  # (3, m)
        dratio = (dnum - ratio[None, :] * dArho) / Arho[None, :]
        denom = np.where(np.abs(np.real(ratio)) > 1e-300, np.real(ratio), 1e-300)
        g3 = np.moveaxis(np.real(dratio) / denom[None, :], 0, -1)
        g3 = g3 - g3.mean(axis=-1, keepdims=True)  # traceless projection

    # diagnostics from the largest character bound |chi| <= dim
    log_max = float(np.log(np.max(w) + 1e-300))
    edge = max(float(np.max(w[-1, :])), float(np.max(w[:, -1])))
    last_ratio = edge / float(np.max(w))
    converged = last_ratio < CONV_TOL
    diag = SeriesDiag(log_max - log(man.volume), last_ratio, 1.0, converged, False)
    _check(diag, f"su3 EF (n_e={n_e}, t={t:g})", raise_invalid)
    if np.any(near):
        K = np.array(K, copy=True)
        K[near] = Kfix
        if grad:
            g3 = np.array(g3, copy=True)
            g3[near] = gfix
    if single:
        return float(K[0]), (g3[0] if grad else None), diag
    return K, g3, diag


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def ef_kernel_radial(man: Manifold, h, t: float, n_e: int, grad: bool = False,
                     raise_invalid: bool = True, dtype=np.float64):
    """Spectral kernel (and optional radial log-gradient) at radial coordinate h.

    h uses each space's natural radial layout: (n,) angles on the torus,
    scalar angle on spheres/SO(3), sum-zero phase triple on SU(3).
    """
    if isinstance(man, Torus):
        return torus_ef(man, h, t, n_e, grad, raise_invalid)
    if isinstance(man, Sphere):
        return sphere_ef(man, h, t, n_e, grad, raise_invalid, dtype)
    if isinstance(man, SO3):
        return so3_ef(man, h, t, n_e, grad, raise_invalid)
    if isinstance(man, SU3):
        return su3_ef(man, h, t, n_e, grad, raise_invalid)
    if isinstance(man, ProductLattice):
        hs = np.asarray(h, dtype=float).reshape(man.n_sites, 3)
        K = 1.0
        gs = []
        diag = None
        for s in range(man.n_sites):
            Ks, gsite, diag = ef_kernel_radial(man.base, hs[s], t, n_e, grad, raise_invalid)
            K *= Ks
            gs.append(gsite)
        return K, (np.stack(gs) if grad else None), diag
    raise TypeError(f"no spectral series for {man.name}")
