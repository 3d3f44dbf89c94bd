"""Direct products of a base group over lattice sites.

Points are arrays of shape (n_sites, *base.point_shape); every geometric
operation applies site-wise, and the heat kernel / score factorize over
sites.  Used for SU(3) fields on a periodic L x L grid.
"""

from __future__ import annotations

import numpy as np

from ..errors import CutLocusError
from .base import Manifold, RootSystem


class ProductLattice(Manifold):
    def __init__(self, base: Manifold, shape: tuple[int, int]):
        self.base = base
        self.lattice_shape = tuple(shape)
        self.n_sites = int(np.prod(shape))
        L = shape[0]
        self.name = f"{base.name}-lattice:{L}x{shape[1]}"
        self.dim = base.dim * self.n_sites
        self.rank = base.rank * self.n_sites
        self.volume = float(base.volume) ** self.n_sites
        self.scalar_curvature = base.scalar_curvature * self.n_sites
        self.rho_sq = base.rho_sq * self.n_sites
        k = len(base.roots.multiplicities)
        roots = np.zeros((k * self.n_sites, self.rank))
        for s in range(self.n_sites):
            roots[s * k:(s + 1) * k, s * base.rank:(s + 1) * base.rank] = base.roots.positive_roots
        self.roots = RootSystem(roots, np.tile(base.roots.multiplicities, self.n_sites))
        self.injectivity_radius = base.injectivity_radius
        self.point_shape = (self.n_sites,) + base.point_shape

    def site_index(self, ix: int, iy: int) -> int:
        L, M = self.lattice_shape
        return (ix % L) * M + (iy % M)

    def uniform(self, rng, size=None):
        n = 1 if size is None else size
        x = self.base.uniform(rng, size=n * self.n_sites)
        x = x.reshape((n,) + self.point_shape)
        return x[0] if size is None else x

    def exp(self, x, v):
        return self.base.exp(x, v)

    def log(self, x, y):
        vs, ds = [], 0.0
        for s in range(self.n_sites):
            v, d = self.base.log(np.asarray(x)[s], np.asarray(y)[s])
            vs.append(v)
            ds += d * d
        return np.stack(vs), float(np.sqrt(ds))

    def dist(self, x, y):
        d2 = 0.0
        for s in range(self.n_sites):
            d2 += float(self.base.dist(np.asarray(x)[s], np.asarray(y)[s])) ** 2
        return float(np.sqrt(d2))

    def radial(self, x0, x):
        hs = [self.base.radial(np.asarray(x0)[..., s, :, :], np.asarray(x)[..., s, :, :])
              for s in range(self.n_sites)]
        return np.concatenate(hs, axis=-1)

    def inner(self, x, u, v):
        return self.base.inner(x, u, v).sum(axis=-1)

    def project(self, x):
        return self.base.project(x)

    def project_tangent(self, x, v):
        return self.base.project_tangent(x, v)

    def tangent_frame(self, x):
        frames = np.zeros((self.dim,) + self.point_shape, dtype=complex)
        for s in range(self.n_sites):
            f = self.base.tangent_frame(np.asarray(x)[s])
            frames[s * self.base.dim:(s + 1) * self.base.dim, s] = f
        return frames

    def randn_tangent(self, rng, x, size=None):
        # base methods broadcast over the site axis already
        if size is None:
            return self.base.randn_tangent(rng, np.asarray(x))
        draws = [self.base.randn_tangent(rng, np.asarray(x)) for _ in range(size)]
        return np.stack(draws)

    def check_point(self, x, tol: float = 1e-10):
        self.base.check_point(np.asarray(x), tol)

    def radial_decompose(self, x0, x):
        hs, auxs = [], []
        for s in range(self.n_sites):
            h, a = self.base.radial_decompose(np.asarray(x0)[s], np.asarray(x)[s])
            hs.append(h)
            auxs.append(a)
        return np.concatenate(hs), auxs

    def point_from_radial(self, x0, h, aux):
        r = self.base.rank
        pts = [self.base.point_from_radial(np.asarray(x0)[s], h[s * r:(s + 1) * r], aux[s])
               for s in range(self.n_sites)]
        return np.stack(pts)
