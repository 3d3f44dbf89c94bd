"""SU(3): complex 3x3 special unitary matrices.

Metric normalization: <u, v> = Re tr(u^H v) on the algebra (ambient complex
Frobenius inner product), so the distance from the identity to the torus
element diag(exp(i theta_k)) is the Euclidean norm of the phase vector.

Radial coordinate: the eigenvalue phases of x0^H x, wrapped to (-pi, pi],
corrected to sum exactly to zero, and sorted descending.  The canonical
chamber is {t1 >= t2 >= t3, sum = 0, t1 - t3 <= 2 pi}; the cut locus is the
far wall t1 - t3 = 2 pi.  Restricted roots are listed as the six ordered
pairs (t_i - t_j)/2 with unit multiplicities, giving the half-angle group
Jacobian delta_bar = prod_{i<j} (((t_i-t_j)/2)/sin((t_i-t_j)/2))^2.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import schur

from ..errors import CutLocusError
from .base import CUT_LOCUS_TOL, Manifold, RootSystem

# roots on the reduced coordinate (t1, t2); t3 = -t1 - t2 is implied
_ROOTS = np.array([
    [0.5, -0.5], [-0.5, 0.5],   # (t1 - t2)/2
    [1.0, 0.5], [-1.0, -0.5],   # (t1 - t3)/2
    [0.5, 1.0], [-0.5, -1.0],   # (t2 - t3)/2
])


def wrap_sum_zero(phases):
    """Wrap phases to (-pi, pi] and shift one entry so they sum to 0 exactly.

    det = 1 guarantees the raw sum is a multiple of 2 pi; the minimal-norm
    representative subtracts the surplus winding from the largest phase
    (or adds it to the smallest).
    """
    th = np.pi - np.mod(np.pi - np.asarray(phases, dtype=float), 2.0 * np.pi)
    k = int(np.round(th.sum() / (2.0 * np.pi)))
    if k > 0:
        th[np.argmax(th)] -= 2.0 * np.pi * k
    elif k < 0:
        th[np.argmin(th)] += 2.0 * np.pi * (-k)
    # remove the tiny leftover so downstream formulas see an exact zero sum
    th -= th.sum() / 3.0
    return th


class SU3(Manifold):
    def __init__(self):
        self.name = "su3"
        self.dim = 8
        self.rank = 2
        self.volume = np.sqrt(3.0) * (2.0 * np.pi) ** 5 / 2.0
        self.scalar_curvature = 12.0
        self.rho_sq = 2.0
        self.roots = RootSystem(_ROOTS, np.ones(6, dtype=int))
        self.injectivity_radius = np.pi * np.sqrt(2.0)
        self.point_shape = (3, 3)

    # -- algebra helpers ----------------------------------------------------
    @staticmethod
    def _alg_project(A):
        """Project an arbitrary complex matrix onto su(3)."""
        A = (A - np.swapaxes(A.conj(), -1, -2)) / 2.0
        tr = np.trace(A, axis1=-2, axis2=-1) / 3.0
        return A - tr[..., None, None] * np.eye(3)

    @staticmethod
    def _alg_exp(A):
        """exp of a su(3) matrix via the Hermitian eigendecomposition of iA."""
        w, U = np.linalg.eigh(1j * A)
        phase = np.exp(-1j * w)
        return (U * phase[..., None, :]) @ np.swapaxes(U.conj(), -1, -2)

    def torus_log(self, M):
        """Eigen-decompose a unitary M: returns (phases desc, frame Q) with
        M = Q diag(exp(i phases)) Q^H."""
        T, Q = schur(np.asarray(M, dtype=complex), output="complex")
        th = wrap_sum_zero(np.angle(np.diagonal(T)))
        order = np.argsort(-th)
        return th[order], Q[:, order]

    # -- manifold interface --------------------------------------------------
    def uniform(self, rng, size=None):
        n = 1 if size is None else size
        z = (rng.standard_normal((n, 3, 3)) + 1j * rng.standard_normal((n, 3, 3))) / np.sqrt(2.0)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r, axis1=-2, axis2=-1)
        q = q * (d / np.abs(d))[..., None, :]
        det = np.linalg.det(q)
        q = q * (det ** (-1.0 / 3.0))[..., None, None]
        return q[0] if size is None else q

    def exp(self, x, v):
        x = np.asarray(x, dtype=complex)
        A = self._alg_project(np.swapaxes(x.conj(), -1, -2) @ np.asarray(v, dtype=complex))
        return x @ self._alg_exp(A)

    def log(self, x, y):
        x = np.asarray(x, dtype=complex)
        M = np.swapaxes(x.conj(), -1, -2) @ np.asarray(y, dtype=complex)
        if M.ndim != 2:
            raise ValueError("SU3.log is single-point; batch via a loop")
        th, Q = self.torus_log(M)
        if th[0] - th[2] > 2.0 * np.pi - CUT_LOCUS_TOL:
            raise CutLocusError("phase spread 2 pi: point on the SU(3) cut locus")
        A = (Q * (1j * th)[None, :]) @ Q.conj().T
        return x @ A, float(np.linalg.norm(th))

    def dist(self, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        M = np.swapaxes(x.conj(), -1, -2) @ y
        w = np.linalg.eigvals(M)
        if M.ndim == 2:
            return float(np.linalg.norm(wrap_sum_zero(np.angle(w))))
        out = np.empty(M.shape[:-2])
        flat = w.reshape(-1, 3)
        for i, row in enumerate(flat):
            out.reshape(-1)[i] = np.linalg.norm(wrap_sum_zero(np.angle(row)))
        return out

    def radial(self, x0, x):
        """Sorted phase pair (t1, t2) of x0^H x; t3 = -t1 - t2."""
        x0 = np.asarray(x0, dtype=complex)
        x = np.asarray(x, dtype=complex)
        M = np.swapaxes(x0.conj(), -1, -2) @ x
        w = np.linalg.eigvals(M)
        if M.ndim == 2:
            th = np.sort(wrap_sum_zero(np.angle(w)))[::-1]
            return th[:2]
        flat = w.reshape(-1, 3)
        out = np.empty((len(flat), 2))
        for i, row in enumerate(flat):
            th = np.sort(wrap_sum_zero(np.angle(row)))[::-1]
            out[i] = th[:2]
        return out.reshape(M.shape[:-2] + (2,))

    def project(self, x):
        u, _, vh = np.linalg.svd(np.asarray(x, dtype=complex))
        q = u @ vh
        det = np.linalg.det(q)
        return q * (det ** (-1.0 / 3.0))[..., None, None]

    def project_tangent(self, x, v):
        x = np.asarray(x, dtype=complex)
        A = self._alg_project(np.swapaxes(x.conj(), -1, -2) @ np.asarray(v, dtype=complex))
        return x @ A

    def tangent_frame(self, x):
        # Gell-Mann style orthonormal basis of su(3) under Re tr(u^H v)
        basis = []
        s = 1.0 / np.sqrt(2.0)
        for (i, j) in [(0, 1), (0, 2), (1, 2)]:
            E = np.zeros((3, 3), dtype=complex)
            E[i, j] = s
            E[j, i] = -s
            basis.append(E)
            F = np.zeros((3, 3), dtype=complex)
            F[i, j] = 1j * s
            F[j, i] = 1j * s
            basis.append(F)
        basis.append(1j * np.diag([1.0, -1.0, 0.0]) / np.sqrt(2.0))
        basis.append(1j * np.diag([1.0, 1.0, -2.0]) / np.sqrt(6.0))
        return np.asarray(x, dtype=complex) @ np.stack(basis)

    def randn_tangent(self, rng, x, size=None):
        x = np.asarray(x, dtype=complex)
        shape = x.shape[:-2] + (3, 3) if size is None else (size, 3, 3)
        Z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return x @ self._alg_project(Z)

    def check_point(self, x, tol: float = 1e-10):
        x = np.asarray(x, dtype=complex)
        r1 = np.max(np.abs(np.swapaxes(x.conj(), -1, -2) @ x - np.eye(3)))
        r2 = np.max(np.abs(np.linalg.det(x) - 1.0))
        if max(r1, r2) > tol:
            raise ValueError(f"not special unitary within {tol:g}: {max(r1, r2):.3e}")

    def radial_decompose(self, x0, x):
        M = np.asarray(x0, dtype=complex).conj().T @ np.asarray(x, dtype=complex)
        th, Q = self.torus_log(M)
        return th[:2].copy(), Q

    def point_from_radial(self, x0, h, aux):
        h = np.asarray(h, dtype=float).ravel()
        th = np.array([h[0], h[1], -h[0] - h[1]])
        Q = aux
        M = (Q * np.exp(1j * th)[None, :]) @ Q.conj().T
        return np.asarray(x0, dtype=complex) @ M
