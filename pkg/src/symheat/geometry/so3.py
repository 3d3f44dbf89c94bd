"""SO(3): real 3x3 special orthogonal matrices.

Metric normalization: <u, v> = tr(u^T v) / 2 on the algebra, so that the
geodesic distance between x0 and x equals the rotation angle of x0^T x.
The single restricted root is listed as the pair (+1/2, -1/2) with unit
multiplicities, giving the half-angle volume factor
delta_bar(h) = ((h/2)/sin(h/2))^2 of the group exponential.
"""

from __future__ import annotations

import numpy as np

from ..errors import CutLocusError
from .base import CUT_LOCUS_TOL, Manifold, RootSystem


def hat(w):
    """so(3) matrix of the axis vector w (vectorized over leading dims)."""
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape[:-1] + (3, 3))
    out[..., 0, 1] = -w[..., 2]
    out[..., 0, 2] = w[..., 1]
    out[..., 1, 0] = w[..., 2]
    out[..., 1, 2] = -w[..., 0]
    out[..., 2, 0] = -w[..., 1]
    out[..., 2, 1] = w[..., 0]
    return out


def unhat(A):
    A = np.asarray(A, dtype=float)
    return np.stack([A[..., 2, 1], A[..., 0, 2], A[..., 1, 0]], axis=-1)


def rodrigues(w):
    """exp(hat(w)) by the Rodrigues formula, stable near zero."""
    w = np.asarray(w, dtype=float)
    th = np.linalg.norm(w, axis=-1)
    th_safe = np.where(th < 1e-12, 1.0, th)
    A = hat(w / th_safe[..., None])
    s = np.sin(th)[..., None, None]
    c = (1.0 - np.cos(th))[..., None, None]
    R = np.eye(3) + s * A + c * (A @ A)
    small = (th < 1e-12)[..., None, None]
    return np.where(small, np.eye(3) + hat(w), R)


def rotation_angle(R):
    tr = np.trace(np.asarray(R), axis1=-2, axis2=-1)
    return np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0))


def rotation_log(R):
    """Axis-angle vector of R, robust near angle pi (vectorized)."""
    R = np.asarray(R, dtype=float)
    th = rotation_angle(R)
    w_skew = unhat((R - np.swapaxes(R, -1, -2)) / 2.0)  # = sin(th) * axis
    sin_th = np.sin(th)
    generic = sin_th > 1e-6
    scale = np.where(generic, th / np.where(generic, sin_th, 1.0), 1.0)
    w = scale[..., None] * w_skew
    # near pi: axis from the diagonal of (R + I)/2, signs from the skew part
    near_pi = th > np.pi - 1e-6
    if np.any(near_pi):
        B = (R + np.eye(3)) / 2.0
        ax = np.sqrt(np.clip(np.stack([B[..., 0, 0], B[..., 1, 1], B[..., 2, 2]], axis=-1), 0.0, None))
        # choose signs consistent with the largest off-diagonal products
        sgn = np.ones_like(ax)
        sgn[..., 1] = np.where(B[..., 0, 1] < 0, -1.0, 1.0)
        sgn[..., 2] = np.where(B[..., 0, 2] < 0, -1.0, 1.0)
        # ambiguity if ax[...,0] ~ 0; fall back to component 1 as reference
        fix = ax[..., 0] < 1e-8
        if np.any(fix):
            s2 = np.where(B[..., 1, 2] < 0, -1.0, 1.0)
            sgn[..., 2] = np.where(fix, s2, sgn[..., 2])
            sgn[..., 1] = np.where(fix, 1.0, sgn[..., 1])
        w_pi = sgn * ax * th[..., None]
        w = np.where(near_pi[..., None], w_pi, w)
    small = th < 1e-8
    if np.any(small):
        w = np.where(small[..., None], w_skew, w)
    return w


class SO3(Manifold):
    def __init__(self):
        self.name = "so3"
        self.dim = 3
        self.rank = 1
        self.volume = 8.0 * np.pi ** 2
        self.scalar_curvature = 1.5
        self.rho_sq = 0.25
        self.roots = RootSystem(np.array([[0.5], [-0.5]]), np.array([1, 1]))
        self.injectivity_radius = np.pi
        self.point_shape = (3, 3)

    def uniform(self, rng, size=None):
        n = 1 if size is None else size
        q = rng.standard_normal((n, 4))
        q /= np.linalg.norm(q, axis=-1, keepdims=True)
        a, b, c, d = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
        R = np.empty((n, 3, 3))
        R[:, 0, 0] = a * a + b * b - c * c - d * d
        R[:, 0, 1] = 2 * (b * c - a * d)
        R[:, 0, 2] = 2 * (b * d + a * c)
        R[:, 1, 0] = 2 * (b * c + a * d)
        R[:, 1, 1] = a * a - b * b + c * c - d * d
        R[:, 1, 2] = 2 * (c * d - a * b)
        R[:, 2, 0] = 2 * (b * d - a * c)
        R[:, 2, 1] = 2 * (c * d + a * b)
        R[:, 2, 2] = a * a - b * b - c * c + d * d
        return R[0] if size is None else R

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        A = np.swapaxes(x, -1, -2) @ np.asarray(v, dtype=float)
        A = (A - np.swapaxes(A, -1, -2)) / 2.0
        return x @ rodrigues(unhat(A))

    def log(self, x, y):
        R = np.swapaxes(np.asarray(x, dtype=float), -1, -2) @ np.asarray(y, dtype=float)
        th = rotation_angle(R)
        if np.any(th > np.pi - CUT_LOCUS_TOL):
            raise CutLocusError("pi-rotations are on the cut locus of SO(3)")
        w = rotation_log(R)
        return np.asarray(x) @ hat(w), th

    def dist(self, x, y):
        return rotation_angle(np.swapaxes(np.asarray(x), -1, -2) @ np.asarray(y))

    def radial(self, x0, x):
        return self.dist(x0, x)[..., None]

    def inner(self, x, u, v):
        return 0.5 * np.sum(np.asarray(u) * np.asarray(v), axis=(-2, -1))

    def project(self, x):
        u, _, vh = np.linalg.svd(np.asarray(x, dtype=float))
        R = u @ vh
        det = np.linalg.det(R)
        # flip the last singular direction if reflection crept in
        if np.any(det < 0):
            u = np.array(u, copy=True)
            u[..., :, 2] = np.where(det[..., None] < 0, -u[..., :, 2], u[..., :, 2])
            R = u @ vh
        return R

    def project_tangent(self, x, v):
        x = np.asarray(x, dtype=float)
        A = np.swapaxes(x, -1, -2) @ np.asarray(v, dtype=float)
        A = (A - np.swapaxes(A, -1, -2)) / 2.0
        return x @ A

    def tangent_frame(self, x):
        return np.asarray(x, dtype=float) @ hat(np.eye(3))

    def randn_tangent(self, rng, x, size=None):
        x = np.asarray(x, dtype=float)
        shape = x.shape[:-2] + (3,) if size is None else (size, 3)
        return x @ hat(rng.standard_normal(shape))

    def check_point(self, x, tol: float = 1e-10):
        x = np.asarray(x, dtype=float)
        r1 = np.max(np.abs(np.swapaxes(x, -1, -2) @ x - np.eye(3)))
        r2 = np.max(np.abs(np.linalg.det(x) - 1.0))
        if max(r1, r2) > tol:
            raise ValueError(f"not special orthogonal within {tol:g}: {max(r1, r2):.3e}")

    def radial_decompose(self, x0, x):
        R = np.asarray(x0).T @ np.asarray(x)
        th = float(rotation_angle(R))
        w = rotation_log(R)
        axis = w / max(th, 1e-12)
        return np.array([th]), axis

    def point_from_radial(self, x0, h, aux):
        return np.asarray(x0) @ rodrigues(aux * float(np.ravel(h)[0]))
