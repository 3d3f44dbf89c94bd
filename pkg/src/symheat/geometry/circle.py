"""Flat circle and torus: angles in [0, 2pi)^n with the product metric."""

from __future__ import annotations

import numpy as np

from ..errors import CutLocusError
from .base import CUT_LOCUS_TOL, Manifold, RootSystem

TWO_PI = 2.0 * np.pi


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a, dtype=float), TWO_PI)


class Torus(Manifold):
    """(S^1)^n as the flat cube [0, 2pi)^n, each coordinate an angle."""

    has_exact_windings = True

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("torus dimension must be >= 1")
        self.n = n
        self.name = "circle" if n == 1 else f"torus:{n}"
        self.dim = n
        self.rank = n
        self.volume = TWO_PI ** n
        self.scalar_curvature = 0.0
        self.rho_sq = 0.0
        self.roots = RootSystem(np.zeros((0, n)), np.zeros((0,), dtype=int))
        self.injectivity_radius = np.pi
        self.point_shape = (n,)

    def uniform(self, rng, size=None):
        shape = (self.n,) if size is None else (size, self.n)
        return rng.uniform(0.0, TWO_PI, size=shape)

    def exp(self, x, v):
        return np.mod(np.asarray(x, dtype=float) + np.asarray(v, dtype=float), TWO_PI)

    def log(self, x, y):
        v = wrap_angle(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))
        if np.any(np.abs(v) > np.pi - CUT_LOCUS_TOL):
            raise CutLocusError("antipodal coordinate on the torus")
        return v, np.sqrt(np.sum(v * v, axis=-1))

    def dist(self, x, y):
        v = wrap_angle(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))
        return np.sqrt(np.sum(v * v, axis=-1))

    def radial(self, x0, x):
        return np.abs(wrap_angle(np.asarray(x, dtype=float) - np.asarray(x0, dtype=float)))

    def project(self, x):
        return np.mod(np.asarray(x, dtype=float), TWO_PI)

    def project_tangent(self, x, v):
        return np.asarray(v, dtype=float)

    def tangent_frame(self, x):
        return np.eye(self.n)

    def randn_tangent(self, rng, x, size=None):
        shape = np.shape(x) if size is None else (size,) + np.shape(x)[-1:]
        if size is None and np.ndim(x) == 1:
            shape = (self.n,)
        return rng.standard_normal(shape)

    def check_point(self, x, tol: float = 1e-10):
        x = np.asarray(x)
        if x.shape[-1] != self.n:
            raise ValueError(f"expected angle vector of length {self.n}")
        if np.any(x < -tol) or np.any(x >= TWO_PI + tol):
            raise ValueError("angles must lie in [0, 2pi)")

    def radial_decompose(self, x0, x):
        d = wrap_angle(np.asarray(x, dtype=float) - np.asarray(x0, dtype=float))
        signs = np.where(d >= 0, 1.0, -1.0)
        return np.abs(d), signs

    def point_from_radial(self, x0, h, aux):
        return np.mod(np.asarray(x0, dtype=float) + aux * np.asarray(h, dtype=float), TWO_PI)


def Circle() -> Torus:
    return Torus(1)
