"""Radial quadrature against the Weyl volume density.

For a conjugation/rotation-invariant integrand f(h),

    int_M f dvol = int f(h) J(h) dh

with J the radial volume density: Vol(S^{n-1}) sin^{n-1}(h) on S^n,
16 pi sin^2(h/2) on SO(3), and the squared Weyl denominator
c prod_{i<j} 4 sin^2((t_i - t_j)/2) on the SU(3) torus square [0, 2pi)^2
(c fixed by total mass = group volume; the 6-fold Weyl redundancy is part
of the density, so integrands may be evaluated at unsorted phases).
"""

from __future__ import annotations

from math import pi

import numpy as np

from ..geometry import Manifold, SO3, SU3, Sphere, Torus
from ..geometry.sphere import sphere_volume


def radial_nodes(man: Manifold, n: int = 512):
    """Nodes (natural radial layout, shape (m, ...)) and weights w with
    sum_i w_i f(h_i) ~= int_M f(radial) dvol."""
    if isinstance(man, Torus):
        axes = [np.linspace(0.0, 2.0 * pi, n, endpoint=False)] * man.n
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        # integrand sees radial |wrap|; weight is the flat cell volume
        h = np.abs(np.pi - np.mod(np.pi - pts, 2.0 * np.pi))
        w = np.full(len(pts), (2.0 * pi / n) ** man.n)
        return h, w
    if isinstance(man, Sphere):
        x, gw = np.polynomial.legendre.leggauss(n)
        h = 0.5 * pi * (x + 1.0)
        w = gw * 0.5 * pi * sphere_volume(man.n - 1) * np.sin(h) ** (man.n - 1)
        return h[:, None], w
    if isinstance(man, SO3):
        x, gw = np.polynomial.legendre.leggauss(n)
        h = 0.5 * pi * (x + 1.0)
        w = gw * 0.5 * pi * 16.0 * pi * np.sin(h / 2.0) ** 2
        return h[:, None], w
    if isinstance(man, SU3):
        g = (np.arange(n) + 0.5) * 2.0 * pi / n
        T1, T2 = np.meshgrid(g, g, indexing="ij")
        t1, t2 = T1.ravel(), T2.ravel()
        t3 = -t1 - t2
        dens = np.ones_like(t1)
        for a, b in [(t1, t2), (t2, t3), (t1, t3)]:
            dens = dens * 4.0 * np.sin((a - b) / 2.0) ** 2
        # c = Vol / (6 (2 pi)^2): Haar expectation of the squared Weyl
        # denominator equals |W| = 6
        c = man.volume / (6.0 * (2.0 * pi) ** 2)
        w = c * dens * (2.0 * pi / n) ** 2
        th = np.stack([t1, t2, t3], axis=-1)
        # wrap to the sum-zero minimal representative used by the kernels
        from ..geometry.su3 import wrap_sum_zero
        th = np.array([wrap_sum_zero(row) for row in th])
        return th, w
    raise TypeError(f"no radial quadrature for {man.name}")


def normalization(man: Manifold, t: float, cfg=None, n: int = 512) -> float:
    """int_M K(x | x0, t) dvol(x) via radial quadrature (should be 1)."""
    from .unified import unified_kernel_radial
    h, w = radial_nodes(man, n)
    if isinstance(man, (Sphere, SO3)):
        vals = np.array([unified_kernel_radial(man, float(x[0]), t, cfg)[0] for x in h])
    elif isinstance(man, SU3):
        vals = unified_kernel_radial(man, h, t, cfg)[0]
    else:
        vals = unified_kernel_radial(man, h, t, cfg)[0]
    return float(np.dot(w, np.ravel(vals)))


def radial_moment(man: Manifold, t: float, f, cfg=None, n: int = 512) -> float:
    """E_K[f(h)] for a radial statistic f (vectorized over nodes)."""
    from .unified import unified_kernel_radial
    h, w = radial_nodes(man, n)
    if isinstance(man, (Sphere, SO3)):
        vals = np.array([unified_kernel_radial(man, float(x[0]), t, cfg)[0] for x in h])
    else:
        vals = np.ravel(unified_kernel_radial(man, h, t, cfg)[0])
    fw = np.ravel(f(h))
    return float(np.dot(w, vals * fw))


def mc_normalization(man: Manifold, t: float, rng, n_samples: int = 200_000,
                     cfg=None) -> tuple[float, float]:
    """Monte-Carlo check of int K dvol = 1 on spheres: Vol * E_uniform[K].

    Returns (estimate, standard error).  Radial angles are drawn exactly:
    cos(h) = 2 Beta(n/2, n/2) - 1 under the uniform law.
    """
    from .unified import unified_kernel_radial
    if not isinstance(man, Sphere):
        raise TypeError("mc_normalization targets spheres")
    u = 2.0 * rng.beta(man.n / 2.0, man.n / 2.0, size=n_samples) - 1.0
    h = np.arccos(u)
    vals = np.empty(n_samples)
    # evaluate in chunks through the vectorized spectral path when possible
    from .ef import sphere_ef
    from .config import default_config
    cfg = cfg or default_config(man)
    done = False
    if t >= cfg.tau:
        try:
            vals, _, _ = sphere_ef(man, h, t, cfg.n_e, grad=False)
            done = True
        except Exception:
            done = False
    if not done:
        for i in range(n_samples):
            vals[i] = unified_kernel_radial(man, float(h[i]), t, cfg)[0]
    est = man.volume * vals
    return float(est.mean()), float(est.std() / np.sqrt(n_samples))
