"""Small-time heat-kernel representations.

Three families, all in the library's convention dK/dt = Lap K:

* ``sd_kernel``: the curvature-corrected Gaussian (Schwinger-DeWitt)
      delta_bar(h)^{1/2} exp(-dist^2/4t + t R/6) / (4 pi t)^{dim/2},
  an asymptotic approximation valid on every space;

* winding sums (``sop_kernel``): exact lattice sums over geodesic windings,
  available on the torus, S^3, SO(3), SU(3) (and site-wise products):

      circle      (4 pi t)^{-1/2}  sum_k exp(-(h+2pi k)^2/4t)
      S^3         e^{t}   (4 pi t)^{-3/2} sum_k (h+2pi k)/sin h  e^{-(h+2pi k)^2/4t}
      SO(3)       e^{t/4} (4 pi t)^{-3/2} sum_k (-1)^k (h+2pi k)/(2 sin h/2) e^{-(...)^2/4t}
      SU(3)       e^{2t}  (4 pi t)^{-4}   sum_{winding} prod_{i<j} D_ij(h+w) /
                                           (8 prod sin(D_ij(h)/2)) e^{-|h+w|^2/4t}

  with D_ij the phase differences and windings 2 pi (l, m, -l-m).  The SO(3)
  sign alternation reflects its two-sheeted cover; the S^3 form is one
  application of -(1/sin h) d/dh to the circle winding sum.

* ``wrapped_density``: the exact density of exp_{x0}(v), v ~ N(0, 2t I),
  i.e. the Gaussian winding sum weighted by the inverse exponential-map
  Jacobian (1/|det D exp|, which diverges at conjugate points rather than
  vanishing - this is what makes it a valid rejection envelope).

All sums shift by the maximum exponent before exponentiating.
"""

from __future__ import annotations

from math import log, pi

import numpy as np

from ..errors import SingularError
from ..geometry import Manifold, ProductLattice, SO3, SU3, Sphere, Torus
from ..geometry.base import volume_change_delta

TWO_PI = 2.0 * pi


def radial_to_natural(man: Manifold, h):
    """Convert a public radial coordinate (length rank) to the layout the
    kernel backends use (full phase triple on SU(3), scalar on rank-1)."""
    h = np.asarray(h, dtype=float)
    if isinstance(man, Torus):
        return np.atleast_1d(h)
    if isinstance(man, (Sphere, SO3)):
        return float(np.ravel(h)[0]) if h.ndim <= 1 else h[..., 0]
    if isinstance(man, SU3):
        if h.shape[-1] == 3:
            return h
        t1, t2 = h[..., 0], h[..., 1]
        return np.stack([t1, t2, -t1 - t2], axis=-1)
    if isinstance(man, ProductLattice):
        r = man.base.rank
        hs = h.reshape(h.shape[:-1] + (man.n_sites, r))
        return np.stack([radial_to_natural(man.base, hs[..., s, :])
                         for s in range(man.n_sites)], axis=-2)
    raise TypeError(man.name)


def geodesic_dist_sq(man: Manifold, h) -> float:
    """Squared geodesic distance from the natural radial coordinate."""
    if isinstance(man, (Sphere, SO3)):
        return float(h) ** 2
    h = np.asarray(h, dtype=float)
    return float(np.sum(h * h, axis=-1))


# ---------------------------------------------------------------------------
# Schwinger-DeWitt
# ---------------------------------------------------------------------------

def _x_over_sin_log(x: float) -> float:
    """log(x / sin x) with the continuous limit 0 at x = 0."""
    if abs(x) < 1e-8:
        return x * x / 6.0
    s = np.sin(x)
    if abs(s) < 1e-12:
        raise SingularError(f"root pairing {x!r} on a chamber wall")
    return float(np.log(abs(x / s)))


def _dlog_x_over_sin(x: float) -> float:
    """d/dx log(x/sin x) = 1/x - cot x, with the x -> 0 limit x/3."""
    if abs(x) < 1e-6:
        return x / 3.0
    return 1.0 / x - 1.0 / np.tan(x)


def sd_kernel(man: Manifold, h, t: float, grad: bool = False):
    """Curvature-corrected Gaussian; h in natural radial layout.

    Returns (K, grad or None).  grad is d log K / dh (scalar for rank-1,
    traceless phase-triple for SU(3), per-coordinate for tori).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if isinstance(man, ProductLattice):
        hs = np.asarray(h, dtype=float).reshape(man.n_sites, -1)
        K, gs = 1.0, []
        for s in range(man.n_sites):
            Ks, gsite = sd_kernel(man.base, radial_to_natural(man.base, hs[s]), t, grad)
            K *= Ks
            gs.append(gsite)
        return K, (np.stack(gs) if grad else None)

    base = t * man.scalar_curvature / 6.0 - 0.5 * man.dim * log(4.0 * pi * t)
    if isinstance(man, Torus):
        hv = np.asarray(radial_to_natural(man, h), dtype=float)
        logK = base - float(np.sum(hv * hv)) / (4.0 * t)
        with np.errstate(over="ignore"):
            return float(np.exp(logK)), (-hv / (2.0 * t) if grad else None)
    if isinstance(man, (Sphere, SO3)):
        hh = float(np.ravel(h)[0]) if np.ndim(h) else float(h)
        if isinstance(man, Sphere):
            pairs_roots = [(hh, 1.0, man.n - 1)]
        else:
            pairs_roots = [(hh / 2.0, 0.5, 1), (-hh / 2.0, -0.5, 1)]
        logK = base - hh * hh / (4.0 * t)
        g = -hh / (2.0 * t)
        for x, a, m in pairs_roots:
            logK += 0.5 * m * _x_over_sin_log(x)
            g += 0.5 * m * _dlog_x_over_sin(x) * a
        with np.errstate(over="ignore"):
            return float(np.exp(logK)), (float(g) if grad else None)
    if isinstance(man, SU3):
        th = np.asarray(radial_to_natural(man, h), dtype=float).ravel()
        logK = base - float(np.sum(th * th)) / (4.0 * t)
        g = -th / (2.0 * t)
        for (i, j) in _SU3_PAIRS:
            x = (th[i] - th[j]) / 2.0
            logK += _x_over_sin_log(x)  # multiplicity-2 pair, exponent 2 * 1/2
            c = 0.5 * _dlog_x_over_sin(x)
            g[i] += c
            g[j] -= c
        with np.errstate(over="ignore"):
            K = float(np.exp(logK))
        if grad:
            g = g - g.mean()
        return K, (g if grad else None)
    raise TypeError(f"no small-time Gaussian for {man.name}")


def varadhan_density(man: Manifold, dist: float, t: float) -> float:
    """Plain flat-Gaussian surrogate (4 pi t)^{-d/2} exp(-dist^2/4t)."""
    logp = -dist * dist / (4.0 * t) - 0.5 * man.dim * log(4.0 * pi * t)
    with np.errstate(over="ignore"):
        return float(np.exp(logp))


def varadhan_score(man: Manifold, x0, x, t: float):
    """Small-time score surrogate log_x(x0) / (2t) as an ambient tangent."""
    v, _ = man.log(x, x0)
    return v / (2.0 * t)


# ---------------------------------------------------------------------------
# winding sums
# ---------------------------------------------------------------------------

def _windings(n_p: int) -> np.ndarray:
    return TWO_PI * np.arange(-n_p, n_p + 1, dtype=float)


def torus_windings_1d(h, t: float, n_p: int, grad: bool = False):
    """S = sum_k exp(-(h+2pi k)^2/4t) per coordinate, with d log S / dh.

    h: any shape; windings broadcast on a new trailing axis.
    Returns (S, dlogS) where S carries the (4 pi t)^{-1/2} prefactor.
    """
    h = np.asarray(h, dtype=float)
    r = h[..., None] + _windings(n_p)
    e = -r * r / (4.0 * t)
    m = np.max(e, axis=-1, keepdims=True)
    w = np.exp(e - m)
    S = w.sum(axis=-1)
    dlog = None
    if grad:
        dlog = (w * (-r / (2.0 * t))).sum(axis=-1) / S
    val = np.exp(m[..., 0]) * S / np.sqrt(4.0 * pi * t)
    return val, dlog


def _rank1_winding_core(h: float, t: float, n_p: int, signs: bool):
    """G = sum_k s_k (h+2pi k) e^{-(h+2pi k)^2/4t} and G'/G, shift-stable."""
    r = float(h) + _windings(n_p)
    s = (-1.0) ** np.arange(-n_p, n_p + 1) if signs else np.ones_like(r)
    e = -r * r / (4.0 * t)
    m = float(np.max(e))
    w = np.exp(e - m)
    G = float((s * r * w).sum())
    dG = float((s * (1.0 - r * r / (2.0 * t)) * w).sum())
    return G, dG, m


def sphere3_sop(man: Sphere, h: float, t: float, n_p: int, grad: bool = False):
    """S^3 winding sum: exact, equals the spectral series at all t."""
    h = float(h)
    sin_h = np.sin(h)
    G, dG, m = _rank1_winding_core(h, t, n_p, signs=False)
    pref = np.exp(t + m) * (4.0 * pi * t) ** (-1.5)
    if abs(sin_h) < 1e-6:
        # l'Hopital across the walls h = 0 and h = pi
        K = pref * dG / np.cos(h)
        return float(K), (0.0 if grad else None)
    K = pref * G / sin_h
    g = (dG / G - np.cos(h) / sin_h) if grad else None
    return float(K), (float(g) if grad else None)


def so3_sop(man: SO3, h: float, t: float, n_p: int, grad: bool = False):
    """SO(3) winding sum with the sign alternation of the double cover."""
    h = float(h)
    sin_h2 = np.sin(h / 2.0)
    G, dG, m = _rank1_winding_core(h, t, n_p, signs=True)
    pref = np.exp(t / 4.0 + m) * (4.0 * pi * t) ** (-1.5)
    if abs(sin_h2) < 1e-6:
        K = pref * dG / np.cos(h / 2.0)
        return float(K), (0.0 if grad else None)
    K = pref * G / (2.0 * sin_h2)
    g = (dG / G - 0.5 / np.tan(h / 2.0)) if grad else None
    return float(K), (float(g) if grad else None)


_SU3_PAIRS = [(0, 1), (1, 2), (0, 2)]


def su3_winding_lattice(n_p: int) -> np.ndarray:
    """2 pi (l, m, -l-m) windings of the SU(3) torus, shape (w, 3)."""
    l, m = np.meshgrid(np.arange(-n_p, n_p + 1), np.arange(-n_p, n_p + 1), indexing="ij")
    return TWO_PI * np.stack([l, m, -l - m], axis=-1).reshape(-1, 3).astype(float)


def su3_sop(man: SU3, theta, t: float, n_p: int, grad: bool = False):
    """SU(3) winding sum; theta: (m, 3) or (3,) sum-zero phase vectors.

    Returns (K, grad3 traceless or None).  Vectorized over the batch.
    """
    th = np.atleast_2d(np.asarray(theta, dtype=float))
    single = np.ndim(theta) == 1
    wall = np.full(th.shape[0], np.inf)
    for (i, j) in _SU3_PAIRS:
        d = th[:, i] - th[:, j]
        wall = np.minimum(wall, np.abs(pi - np.mod(pi - d, TWO_PI)))
    near = wall < 1e-6
    if np.any(near):
        delta = 2e-5 * np.array([1.0, 0.0, -1.0])
        Kp, gp = su3_sop(man, th[near] + delta, t, n_p, grad)
        Km, gm = su3_sop(man, th[near] - delta, t, n_p, grad)
        Kfix = 0.5 * (Kp + Km)
        gfix = 0.5 * (gp + gm) if grad else None
        if np.all(near):
            if single:
                return float(np.ravel(Kfix)[0]), (np.asarray(gfix)[0] if grad else None)
            return Kfix, gfix

    gam = su3_winding_lattice(n_p)            # (w, 3)
    v = th[:, None, :] + gam[None, :, :]      # (m, w, 3)
    diffs = np.stack([v[..., i] - v[..., j] for (i, j) in _SU3_PAIRS], axis=-1)  # (m, w, 3)
    poly = np.prod(diffs, axis=-1)
    e = -np.sum(v * v, axis=-1) / (4.0 * t)
    mshift = np.max(e, axis=-1, keepdims=True)
    wexp = np.exp(e - mshift)
    G = (poly * wexp).sum(axis=-1)            # (m,)

    dsin = np.stack([np.sin((th[:, i] - th[:, j]) / 2.0) for (i, j) in _SU3_PAIRS], axis=-1)
    denom = 8.0 * np.prod(dsin, axis=-1)
    log_pref = 2.0 * t + mshift[:, 0] - 4.0 * log(4.0 * pi * t)
    K = np.exp(log_pref) * G / denom

    g3 = None
    if grad:
        # dG: product rule on poly, Gaussian factor pulls -(v)/2t
        dpoly = np.zeros_like(v)
        for k, (i, j) in enumerate(_SU3_PAIRS):
            others = poly / np.where(np.abs(diffs[..., k]) > 1e-300, diffs[..., k], 1e-300)
            dpoly[..., i] += others
            dpoly[..., j] -= others
        integrand = dpoly + poly[..., None] * (-v / (2.0 * t))
        dG = (integrand * wexp[..., None]).sum(axis=-2)  # (m, 3)
        dlog_den = np.zeros_like(th)
        for k, (i, j) in enumerate(_SU3_PAIRS):
            c = 0.5 / np.tan((th[:, i] - th[:, j]) / 2.0)
            dlog_den[:, i] += c
            dlog_den[:, j] -= c
        g3 = dG / G[:, None] - dlog_den
        g3 = g3 - g3.mean(axis=-1, keepdims=True)

    if np.any(near):
        K = np.array(K, copy=True)
        K[near] = Kfix
        if grad:
            g3[near] = gfix
    if single:
        return float(K[0]), (g3[0] if grad else None)
    return K, g3


def sop_kernel_radial(man: Manifold, h, t: float, n_p: int, grad: bool = False):
    """Winding-sum kernel at natural radial coordinate h.

    Raises TypeError for spaces with no convergent winding representation
    (even spheres and odd spheres other than S^3).
    """
    if isinstance(man, Torus):
        vals, dlog = torus_windings_1d(np.asarray(h, dtype=float), t, n_p, grad)
        K = np.prod(vals, axis=-1)
        return (float(K) if np.ndim(K) == 0 else K), (dlog if grad else None)
    if isinstance(man, Sphere) and man.n == 3:
        return sphere3_sop(man, float(np.ravel(h)[0]) if np.ndim(h) else float(h), t, n_p, grad)
    if isinstance(man, SO3):
        return so3_sop(man, float(np.ravel(h)[0]) if np.ndim(h) else float(h), t, n_p, grad)
    if isinstance(man, SU3):
        return su3_sop(man, h, t, n_p, grad)
    if isinstance(man, ProductLattice):
        hs = np.asarray(h, dtype=float).reshape(man.n_sites, -1)
        K, gs = 1.0, []
        for s in range(man.n_sites):
            Ks, gsite = sop_kernel_radial(man.base, hs[s], t, n_p, grad)
            K *= Ks
            gs.append(gsite)
        return K, (np.stack(gs) if grad else None)
    raise TypeError(f"{man.name} has no exact winding-sum representation")


# ---------------------------------------------------------------------------
# wrapped Gaussian density
# ---------------------------------------------------------------------------

def wrapped_density_radial(man: Manifold, h, t: float, n_p: int = 8):
    """Density (w.r.t. the Riemannian volume) of exp_{x0}(v), v ~ N(0, 2t I),
    at radial coordinate h: Gaussian winding sum weighted by 1/|det D exp|."""
    if isinstance(man, Torus):
        vals, _ = torus_windings_1d(np.asarray(h, dtype=float), t, n_p, False)
        K = np.prod(vals, axis=-1)
        return float(K) if np.ndim(K) == 0 else K
    if isinstance(man, Sphere):
        hh = float(np.ravel(h)[0]) if np.ndim(h) else float(h)
        r = hh + _windings(n_p)
        sin_h = abs(np.sin(hh))
        if sin_h < 1e-12:
            sin_h = 1e-12  # integrable focusing singularity at the poles
        jac = (np.abs(r) / sin_h) ** (man.n - 1)
        e = -r * r / (4.0 * t)
        m = float(np.max(e))
        return float(np.exp(m) * (jac * np.exp(e - m)).sum() / (4.0 * pi * t) ** (man.n / 2.0))
    if isinstance(man, SO3):
        hh = float(np.ravel(h)[0]) if np.ndim(h) else float(h)
        r = hh + _windings(n_p)
        s2 = max(abs(np.sin(hh / 2.0)), 1e-12)
        jac = (np.abs(r) / (2.0 * s2)) ** 2
        e = -r * r / (4.0 * t)
        m = float(np.max(e))
        return float(np.exp(m) * (jac * np.exp(e - m)).sum() / (4.0 * pi * t) ** 1.5)
    if isinstance(man, SU3):
        th = np.atleast_2d(radial_to_natural(man, np.asarray(h, dtype=float)))
        single = np.ndim(h) == 1
        gam = su3_winding_lattice(n_p)
        v = th[:, None, :] + gam[None, :, :]
        jac = np.ones(v.shape[:2])
        for (i, j) in _SU3_PAIRS:
            dv = (v[..., i] - v[..., j]) / 2.0
            s = np.maximum(np.abs(np.sin((th[:, i] - th[:, j]) / 2.0)), 1e-12)
            jac *= (np.abs(dv) / s[:, None]) ** 2
        e = -np.sum(v * v, axis=-1) / (4.0 * t)
        m = np.max(e, axis=-1, keepdims=True)
        p = np.exp(m[:, 0]) * (jac * np.exp(e - m)).sum(axis=-1) / (4.0 * pi * t) ** 4
        return float(p[0]) if single else p
    if isinstance(man, ProductLattice):
        hs = np.asarray(h, dtype=float).reshape(man.n_sites, -1)
        p = 1.0
        for s in range(man.n_sites):
            p *= wrapped_density_radial(man.base, hs[s], t, n_p)
        return p
    raise TypeError(f"no wrapped density for {man.name}")
