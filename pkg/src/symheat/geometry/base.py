"""Shared structure for the supported symmetric spaces.

Every manifold here is compact, isometrically embedded, and carries a
maximal torus whose flat coordinate ``h`` (one angle per torus dimension)
indexes point pairs up to isometry.  All kernel formulas in
:mod:`symheat.kernels` are functions of ``h`` alone, so the geometry layer
is responsible for exp/log maps, radial coordinates, uniform (Haar)
sampling, and tangent-space plumbing.

Conventions pinned for the whole library:

* The metric on each space is normalized so that the radial coordinate is
  a geodesic arc length: on spheres ``h = arccos <x, x0>``, on SO(3) the
  rotation angle of ``x0^T x``, on SU(3) the eigenvalue phases of
  ``x0^H x`` (Euclidean norm of the phase vector = distance).
* Brownian motion is scaled so the transition density solves
  ``dK/dt = Lap K`` (full Laplace-Beltrami generator).  Concretely the
  geodesic random walk steps by ``exp_x(sqrt(2 dt) z)`` with ``z`` a
  standard normal in the tangent space, and the time-t transition of the
  walk matches the kernels module at the same ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingularError, TangencyError

# Distances within this fraction of the injectivity radius count as cut locus.
CUT_LOCUS_TOL = 1e-9


@dataclass(frozen=True)
class RootSystem:
    """Positive restricted roots as covectors on the flat torus coordinate.

    ``positive_roots`` has shape (k, rank); ``multiplicities`` has shape (k,).
    The roots are normalized so that the volume-change factor of the
    exponential map is exactly

        delta_bar(h) = prod_a ( (a.h) / sin(a.h) )**m_a

    For the group manifolds each root pair (+a, -a) of the algebra is listed
    separately with multiplicity 1, which keeps ``dim = rank + sum(m_a)``
    while matching the half-angle Jacobian of the group exponential.
    """

    positive_roots: np.ndarray
    multiplicities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "positive_roots",
                           np.atleast_2d(np.asarray(self.positive_roots, dtype=float)))
        object.__setattr__(self, "multiplicities",
                           np.asarray(self.multiplicities, dtype=int))
        if self.positive_roots.size and len(self.positive_roots) != len(self.multiplicities):
            raise ValueError("roots and multiplicities must align")

    @property
    def total_multiplicity(self) -> int:
        return int(self.multiplicities.sum())

    def pairings(self, h: np.ndarray) -> np.ndarray:
        """All root pairings a.h, shape (..., k)."""
        h = np.asarray(h, dtype=float)
        if self.positive_roots.size == 0:
            return np.zeros(h.shape[:-1] + (0,))
        return h @ self.positive_roots.T


def volume_change_delta(manifold: "Manifold", h) -> float:
    """Jacobian factor of the exponential map in radial coordinates.

    Returns delta_bar(h) = prod_a ((a.h)/sin(a.h))**m_a, which is >= 1 on
    the chamber interior of a compact space and -> 1 as h -> 0.

    Raises:
        SingularError: if some |sin(a.h)| < 1e-12 while a.h != 0 (chamber
            wall at a nonzero winding, where the factor blows up).
    """
    h = np.atleast_1d(np.asarray(h, dtype=float))
    pair = manifold.roots.pairings(h)
    if pair.size == 0:
        return 1.0
    out = 1.0
    for x, m in zip(np.ravel(pair), manifold.roots.multiplicities):
        if abs(x) < 1e-8:
            continue  # x/sin(x) -> 1
        s = np.sin(x)
        if abs(s) < 1e-12:
            raise SingularError(f"root pairing {x!r} sits on a chamber wall")
        out *= (x / s) ** m
    return float(out)


class Manifold:
    """Base class; concrete spaces fill in the geometric primitives.

    Subclasses define: name, dim, rank, volume, scalar_curvature, rho_sq,
    roots, injectivity_radius, point_shape, has_exact_windings (True when a
    convergent winding-sum kernel representation exists).
    """

    name: str
    dim: int
    rank: int
    volume: float
    scalar_curvature: float
    rho_sq: float
    roots: RootSystem
    injectivity_radius: float
    point_shape: tuple
    has_exact_windings: bool = False

    # -- primitives supplied by subclasses ---------------------------------
    def uniform(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def exp(self, x, v):
        raise NotImplementedError

    def log(self, x, y):
        """Return (v, dist) with exp_x(v) = y.  Raises CutLocusError near the cut locus."""
        raise NotImplementedError

    def radial(self, x0, x) -> np.ndarray:
        """Flat torus coordinate of the pair, shape (..., rank), canonical chamber."""
        raise NotImplementedError

    def project(self, x):
        """Re-project a drifted point back onto the manifold."""
        raise NotImplementedError

    def project_tangent(self, x, v):
        raise NotImplementedError

    def tangent_frame(self, x) -> np.ndarray:
        """Orthonormal basis of T_x (intrinsic metric), shape (dim, *point_shape)."""
        raise NotImplementedError

    def radial_decompose(self, x0, x):
        """Split x into (h, aux) relative to x0 so that point_from_radial inverts it."""
        raise NotImplementedError

    def point_from_radial(self, x0, h, aux):
        raise NotImplementedError

    # -- shared derived operations ------------------------------------------
    def dist(self, x, y):
        return self.log(x, y)[1]

    def inner(self, x, u, v):
        """Intrinsic Riemannian inner product of tangent vectors at x."""
        u = np.asarray(u)
        v = np.asarray(v)
        axes = tuple(range(-len(self.point_shape), 0))
        return np.real(np.sum(u * np.conj(v), axis=axes))

    def norm(self, x, v):
        return np.sqrt(self.inner(x, v, v))

    def randn_tangent(self, rng: np.random.Generator, x, size=None):
        """Standard normal in T_x with respect to the intrinsic metric."""
        frame = self.tangent_frame(x)
        shape = (self.dim,) if size is None else (size, self.dim)
        z = rng.standard_normal(shape)
        return np.tensordot(z, frame, axes=(-1, 0))

    def check_point(self, x, tol: float = 1e-10):
        raise NotImplementedError

    def check_tangent(self, x, v, tol: float = 1e-8):
        w = self.project_tangent(x, v)
        resid = np.max(np.abs(np.asarray(w) - np.asarray(v)))
        if resid > tol:
            raise TangencyError(f"tangency residual {resid:.3e} exceeds {tol:g}")

    def wall_distance(self, h) -> float:
        """Distance from the radial coordinate to the nearest chamber wall."""
        h = np.atleast_1d(np.asarray(h, dtype=float))
        pair = self.roots.pairings(h)
        if pair.size == 0:
            return np.inf
        # walls sit where sin(a.h) = 0, i.e. a.h in pi Z
        frac = np.abs(np.ravel(pair)) % np.pi
        return float(np.min(np.minimum(frac, np.pi - frac)))


def geodesic_random_walk(manifold: Manifold, x0, t: float, n_steps: int,
                         rng: np.random.Generator):
    """Simulate Brownian motion by exponential-map steps.

    Each step is ``x <- exp_x(sqrt(2 dt) z)`` with z standard normal in
    T_x M; the sqrt(2) makes the n_steps -> inf limit the transition
    density of the kernels module at the same t.  Points are re-projected
    after every step to stop numerical drift.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    t = max(float(t), 1e-12)
    dt = t / n_steps
    x = np.array(x0, copy=True)
    for _ in range(n_steps):
        z = manifold.randn_tangent(rng, x)
        x = manifold.exp(x, np.sqrt(2.0 * dt) * z)
        x = manifold.project(x)
    return x
