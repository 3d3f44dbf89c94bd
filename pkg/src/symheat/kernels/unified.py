"""Time-split heat-kernel estimator, its score, and reference oracles.

Dispatch rule: below the cutoff tau use the exact winding sum where one
exists (torus, S^3, SO(3), SU(3), lattices) and the curvature-corrected
Gaussian otherwise; at or above tau use the truncated spectral series.
The score is the analytic radial derivative of the active branch lifted to
an ambient tangent vector through the gradient of the radial coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SeriesOverflowError
from ..geometry import Manifold, ProductLattice, SO3, SU3, Sphere, Torus
from .config import KernelConfig, default_config
from .ef import SeriesDiag, ef_kernel_radial
from .small_time import (radial_to_natural, sd_kernel, sop_kernel_radial,
                         wrapped_density_radial)

SCORE_WALL_EPS = 1e-6  # below this radial distance the score is linearized to 0


def has_winding_sum(man: Manifold) -> bool:
    if isinstance(man, ProductLattice):
        return has_winding_sum(man.base)
    return bool(getattr(man, "has_exact_windings", False)) or isinstance(man, (Torus, SO3, SU3))


def unified_kernel_radial(man: Manifold, h, t: float, cfg: KernelConfig | None = None,
                          grad: bool = False):
    """Kernel value (and optional radial log-gradient) at natural radial h."""
    if t <= 0:
        raise ValueError("t must be positive")
    if cfg is None:
        cfg = default_config(man)
    if t < cfg.tau:
        if has_winding_sum(man):
            return sop_kernel_radial(man, h, t, cfg.n_p, grad)
        return sd_kernel(man, h, t, grad)
    K, g, _ = ef_kernel_radial(man, h, t, cfg.n_e, grad=grad, raise_invalid=True)
    return K, g


def unified_kernel(man: Manifold, x0, x, t: float, cfg: KernelConfig | None = None) -> float:
    h = man.radial(x0, x)
    hn = radial_to_natural(man, h)
    K, _ = unified_kernel_radial(man, hn, t, cfg, grad=False)
    return float(np.ravel(K)[0]) if np.ndim(K) else float(K)


# ---------------------------------------------------------------------------
# score: radial derivative lifted to the ambient tangent space
# ---------------------------------------------------------------------------

def _lift_rank1(man, x0, x, g: float):
    v, d = man.log(x, x0)  # points from x toward x0, length d
    if d < SCORE_WALL_EPS:
        return np.zeros_like(np.asarray(v))
    # gradient of the radial angle at x is the unit vector away from x0
    return (-g / d) * v


def kernel_score(man: Manifold, x0, x, t: float, cfg: KernelConfig | None = None):
    """Gradient of log K(x | x0, t) in x, as an ambient tangent vector at x.

    Exactly differentiates the branch the estimator dispatches to.  Within
    1e-6 of a chamber wall the even symmetry of the kernel makes the score
    vanish linearly; zero is returned there instead of a 0/0 derivative.
    """
    if isinstance(man, ProductLattice):
        outs = [kernel_score(man.base, np.asarray(x0)[s], np.asarray(x)[s], t, cfg)
                for s in range(man.n_sites)]
        return np.stack(outs)
    if cfg is None:
        cfg = default_config(man)
    if isinstance(man, Torus):
        d = np.asarray(x, dtype=float) - np.asarray(x0, dtype=float)
        d = np.pi - np.mod(np.pi - d, 2.0 * np.pi)  # signed wrap
        h = np.abs(d)
        _, g = unified_kernel_radial(man, h, t, cfg, grad=True)
        return np.sign(d) * g
    if isinstance(man, (Sphere, SO3)):
        h = float(man.radial(x0, x)[0])
        if h < SCORE_WALL_EPS or h > man.injectivity_radius - SCORE_WALL_EPS:
            return np.zeros(man.point_shape)
        _, g = unified_kernel_radial(man, h, t, cfg, grad=True)
        return _lift_rank1(man, x0, x, float(g))
    if isinstance(man, SU3):
        M = np.asarray(x0, dtype=complex).conj().T @ np.asarray(x, dtype=complex)
        th, Q = man.torus_log(M)
        _, g3 = unified_kernel_radial(man, th, t, cfg, grad=True)
        if g3 is None or not np.all(np.isfinite(g3)):
            return np.zeros(man.point_shape, dtype=complex)
        A = (Q * (1j * np.asarray(g3))[None, :]) @ Q.conj().T
        return np.asarray(x, dtype=complex) @ A
    raise TypeError(man.name)


def score_batch_group(man: SU3, thetas: np.ndarray, t: float,
                      cfg: KernelConfig | None = None) -> np.ndarray:
    """Vectorized radial log-gradients for a batch of SU(3) phase triples."""
    if cfg is None:
        cfg = default_config(man)
    if t < cfg.tau:
        _, g3 = sop_kernel_radial(man, thetas, t, cfg.n_p, grad=True)
    else:
        _, g3, _ = ef_kernel_radial(man, thetas, t, cfg.n_e, grad=True)
    return g3


# ---------------------------------------------------------------------------
# spec-surface wrappers and oracles
# ---------------------------------------------------------------------------

def ef_kernel(man: Manifold, h, t: float, n_e: int | None = None,
              precision: str = "standard", raise_invalid: bool = True):
    """Truncated spectral series at radial coordinate h (natural layout
    accepted; public length-rank layout converted automatically)."""
    if n_e is None:
        n_e = default_config(man, precision).n_e
    dtype = np.longdouble if precision == "oracle" else np.float64
    hn = radial_to_natural(man, h)
    K, _, _ = ef_kernel_radial(man, hn, t, n_e, grad=False,
                               raise_invalid=raise_invalid, dtype=dtype)
    return K


def sop_kernel(man: Manifold, h, t: float, n_p: int | None = None):
    if not has_winding_sum(man):
        raise TypeError(f"{man.name} has no exact winding-sum representation")
    if n_p is None:
        n_p = default_config(man).n_p
    K, _ = sop_kernel_radial(man, radial_to_natural(man, h), t, n_p, grad=False)
    return K


def wrapped_density_from_radial(man: Manifold, h, t: float, n_p: int = 8):
    return wrapped_density_radial(man, radial_to_natural(man, h), t, n_p)


@dataclass
class OracleResult:
    value: float
    stable: bool
    est_digits: float
    diag: SeriesDiag | None


def oracle_kernel(man: Manifold, h, t: float, precision: str = "double") -> OracleResult:
    """High-term-count reference value with an honest stability verdict.

    ``double`` uses float64 with exponent shifting and reports the digits
    surviving cancellation; ``extended`` accumulates in 80-bit floats.  On
    winding-sum manifolds the oracle cross-checks against the exact sum and
    uses it below t = 0.05 where the spectral series needs many terms.
    """
    hn = radial_to_natural(man, h)
    n_e = default_config(man, "oracle").n_e
    if has_winding_sum(man) and t < 0.05:
        K, _ = sop_kernel_radial(man, hn, t, 16, grad=False)
        return OracleResult(float(np.ravel(K)[0]), True, 15.0, None)
    dtype = np.longdouble if precision == "extended" else np.float64
    try:
        K, _, diag = ef_kernel_radial(man, hn, t, n_e, grad=False,
                                      raise_invalid=False, dtype=dtype)
    except SeriesOverflowError as exc:  # pragma: no cover - raise_invalid False
        raise RuntimeError(str(exc))
    digits_total = 18.6 if precision == "extended" else 15.95
    est_digits = digits_total - np.log10(max(diag.cancellation, 1.0))
    stable = diag.converged and not diag.overflowed and est_digits >= 5.0
    return OracleResult(float(np.ravel(K)[0]), bool(stable), float(est_digits), diag)
