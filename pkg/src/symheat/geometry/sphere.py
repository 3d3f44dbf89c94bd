"""Unit hyperspheres S^n embedded in R^{n+1}."""

from __future__ import annotations

from math import lgamma, log, pi

import numpy as np

from ..errors import CutLocusError
from .base import CUT_LOCUS_TOL, Manifold, RootSystem


def sphere_volume(n: int) -> float:
    return float(np.exp(log(2.0) + 0.5 * (n + 1) * log(pi) - lgamma(0.5 * (n + 1))))


class Sphere(Manifold):
    """S^n with the round metric of curvature one; rank-1 with radial angle
    h = arccos <x, x0> in [0, pi] and a single root of multiplicity n-1."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("use Circle() for n = 1")
        self.n = n
        self.name = f"sphere:{n}"
        self.dim = n
        self.rank = 1
        self.volume = sphere_volume(n)
        self.scalar_curvature = float(n * (n - 1))
        self.rho_sq = ((n - 1) / 2.0) ** 2
        self.roots = RootSystem(np.array([[1.0]]), np.array([n - 1]))
        self.injectivity_radius = np.pi
        self.point_shape = (n + 1,)
        # odd spheres inherit a convergent winding sum; only S^3 is wired up
        self.has_exact_windings = n == 3

    def uniform(self, rng, size=None):
        shape = (self.n + 1,) if size is None else (size, self.n + 1)
        x = rng.standard_normal(shape)
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v, axis=-1, keepdims=True)
        small = nv < 1e-14
        safe = np.where(small, 1.0, nv)
        y = np.cos(nv) * x + np.sin(nv) * (v / safe)
        y = np.where(small, x + v, y)
        return y / np.linalg.norm(y, axis=-1, keepdims=True)

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        c = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
        theta = np.arccos(c)
        if np.any(theta > np.pi - CUT_LOCUS_TOL):
            raise CutLocusError("antipodal points on the sphere")
        w = y - c[..., None] * x
        nw = np.linalg.norm(w, axis=-1)
        scale = np.where(nw > 1e-14, theta / np.where(nw > 1e-14, nw, 1.0), 1.0)
        return scale[..., None] * w, theta

    def dist(self, x, y):
        c = np.clip(np.sum(np.asarray(x) * np.asarray(y), axis=-1), -1.0, 1.0)
        return np.arccos(c)

    def radial(self, x0, x):
        return self.dist(x0, x)[..., None]

    def project(self, x):
        x = np.asarray(x, dtype=float)
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    def project_tangent(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        return v - np.sum(x * v, axis=-1, keepdims=True) * x

    def tangent_frame(self, x):
        x = np.asarray(x, dtype=float)
        # rows 1.. of the SVD right factor span the orthogonal complement of x
        _, _, vh = np.linalg.svd(x[None, :])
        return vh[1:]

    def randn_tangent(self, rng, x, size=None):
        x = np.asarray(x, dtype=float)
        shape = x.shape if size is None else (size,) + x.shape[-1:]
        z = rng.standard_normal(shape)
        return self.project_tangent(np.broadcast_to(x, shape), z)

    def check_point(self, x, tol: float = 1e-10):
        r = np.abs(np.linalg.norm(np.asarray(x), axis=-1) - 1.0)
        if np.any(r > tol):
            raise ValueError(f"point off the unit sphere by {float(np.max(r)):.3e}")

    def radial_decompose(self, x0, x):
        # single-point form used by the radial ODE sampler
        v, theta = self.log(x0, x)
        u = v / max(float(theta), 1e-12)
        return np.array([float(theta)]), u

    def point_from_radial(self, x0, h, aux):
        h = float(np.ravel(h)[0])
        return np.cos(h) * np.asarray(x0, dtype=float) + np.sin(h) * aux
