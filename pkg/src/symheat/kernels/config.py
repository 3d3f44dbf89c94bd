"""Estimator configuration: term counts and the time cutoff tau.

The unified estimator evaluates a winding sum (or the curvature-corrected
Gaussian where no winding sum exists) below tau and the spectral series
above.  tau is found per manifold by a grid search: the smallest time at
which the two branches agree to 1e-4 at kernel-typical radial probes; if
they never agree that well (high-dimensional spheres, where the Gaussian
approximation and a fixed-length series leave a gap), the time of minimum
disagreement is used.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import SeriesOverflowError
from ..geometry import Manifold, ProductLattice, SO3, SU3, Sphere, Torus


@dataclass(frozen=True)
class KernelConfig:
    tau: float
    n_e: int
    n_p: int
    precision: str = "standard"  # "standard" | "oracle"

    def __post_init__(self):
        if self.tau <= 0 or self.n_e < 1 or self.n_p < 0:
            raise ValueError("require tau > 0, n_e >= 1, n_p >= 0")
        if self.precision not in ("standard", "oracle"):
            raise ValueError("precision must be 'standard' or 'oracle'")


# default / oracle term counts per manifold family
def _counts(man: Manifold) -> tuple[int, int, int]:
    """(n_e, n_p, oracle_n_e)."""
    if isinstance(man, Torus):
        return 40, 8, 400
    if isinstance(man, Sphere):
        if man.n == 2:
            return 10, 0, 10000
        if man.n == 3:
            return 50, 8, 2000
        if man.n >= 64:
            # a 100-term series leaves an accuracy hole between the Gaussian
            # regime and its own convergence range on very high spheres
            return 600, 0, 50000
        return 60, 0, 4000
    if isinstance(man, SO3):
        return 50, 10, 10000
    if isinstance(man, SU3):
        return 50, 5, 160
    if isinstance(man, ProductLattice):
        return _counts(man.base)
    raise TypeError(man.name)


def typical_radii(man: Manifold, t: float) -> list[np.ndarray]:
    """Kernel-typical radial probes (natural layout) used for tau search
    and calibration grids."""
    if isinstance(man, ProductLattice):
        return [np.tile(p, (man.n_sites, 1)) for p in typical_radii(man.base, t)]
    scale = np.sqrt(2.0 * man.dim * t)
    if isinstance(man, Torus):
        cap = 0.9 * np.pi
        return [np.full(man.n, min(f * scale / np.sqrt(man.n), cap)) for f in (0.5, 1.0, 1.5)]
    if isinstance(man, (Sphere, SO3)):
        cap = 0.9 * np.pi
        return [np.array([min(f * scale, cap)]) for f in (0.5, 1.0, 1.5)]
    if isinstance(man, SU3):
        dirs = [np.array([1.2, 0.4, -1.6]), np.array([1.0, -0.2, -0.8]),
                np.array([0.6, 0.5, -1.1])]
        out = []
        for f in (0.5, 1.0, 1.5):
            for d in dirs[:2]:
                u = d / np.linalg.norm(d)
                out.append(np.clip(f * scale, 0.05, 2.8) * u)
        return out
    raise TypeError(man.name)


def _branch_small(man, h, t, n_p):
    from .small_time import sd_kernel, sop_kernel_radial
    has_sop = getattr(man, "has_exact_windings", False) or \
        (isinstance(man, ProductLattice) and man.base.has_exact_windings) or \
        isinstance(man, (SO3, SU3)) or (isinstance(man, Sphere) and man.n == 3) or \
        isinstance(man, Torus)
    if has_sop:
        return sop_kernel_radial(man, h, t, n_p, grad=False)[0]
    return sd_kernel(man, h, t, grad=False)[0]


def find_tau(man: Manifold, n_e: int, n_p: int, target: float = 1e-4) -> float:
    """Grid search for the dispatch cutoff."""
    from .ef import ef_kernel_radial
    from .small_time import radial_to_natural
    grid = np.geomspace(5e-4, 1.0, 26)
    best_t, best_d = None, np.inf
    first_hit = None
    for t in grid:
        worst = 0.0
        try:
            for h in typical_radii(man, t):
                hn = radial_to_natural(man, h) if not isinstance(man, (Torus, ProductLattice)) else h
                if isinstance(man, (Sphere, SO3)):
                    hn = float(np.ravel(h)[0])
                if isinstance(man, ProductLattice):
                    hn = h
                ef = ef_kernel_radial(man, hn, t, n_e, raise_invalid=True)[0]
                small = _branch_small(man, hn, t, n_p)
                ref = max(abs(float(np.ravel(ef)[0])), 1e-300)
                worst = max(worst, abs(float(np.ravel(ef)[0]) - float(np.ravel(small)[0])) / ref)
        except SeriesOverflowError:
            continue
        if worst < best_d:
            best_d, best_t = worst, t
        if worst <= target and first_hit is None:
            first_hit = t
    if first_hit is not None:
        return float(first_hit)
    if best_t is None:
        raise RuntimeError(f"tau search failed on {man.name}")
    return float(best_t)


_CFG_CACHE: dict[tuple, KernelConfig] = {}


def default_config(man: Manifold, precision: str = "standard") -> KernelConfig:
    """Per-manifold defaults with the auto-tuned tau (cached)."""
    key = (man.name, precision)
    if key not in _CFG_CACHE:
        n_e, n_p, oracle_n_e = _counts(man)
        if precision == "oracle":
            n_e = oracle_n_e
            n_p = max(n_p, 12)
        tau = find_tau(man.base if isinstance(man, ProductLattice) else man,
                       n_e, n_p)
        _CFG_CACHE[key] = KernelConfig(tau=tau, n_e=n_e, n_p=n_p, precision=precision)
    return _CFG_CACHE[key]


def with_overrides(cfg: KernelConfig, **kw) -> KernelConfig:
    return replace(cfg, **kw)
