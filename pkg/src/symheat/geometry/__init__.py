"""Symmetric-space geometry: manifolds, radial coordinates, random walks."""

from __future__ import annotations

import re

from .base import (CUT_LOCUS_TOL, Manifold, RootSystem, geodesic_random_walk,
                   volume_change_delta)
from .circle import Circle, Torus
from .lattice import ProductLattice
from .so3 import SO3
from .sphere import Sphere
from .su3 import SU3

_CACHE: dict[str, Manifold] = {}


def manifold_from_string(name: str) -> Manifold:
    """Resolve canonical manifold names used by the CLI and config files.

    Supported: "circle", "torus:N", "sphere:N" (N >= 2), "so3", "su3",
    "su3-lattice:LxM".
    """
    key = name.strip().lower()
    if key in _CACHE:
        return _CACHE[key]
    if key == "circle":
        man = Circle()
    elif key == "so3":
        man = SO3()
    elif key == "su3":
        man = SU3()
    elif m := re.fullmatch(r"torus:(\d+)", key):
        man = Torus(int(m.group(1)))
    elif m := re.fullmatch(r"sphere:(\d+)", key):
        n = int(m.group(1))
        man = Torus(1) if n == 1 else Sphere(n)
    elif m := re.fullmatch(r"su3-lattice:(\d+)x(\d+)", key):
        man = ProductLattice(SU3(), (int(m.group(1)), int(m.group(2))))
    else:
        raise ValueError(f"unknown manifold {name!r}")
    _CACHE[key] = man
    return man


__all__ = [
    "CUT_LOCUS_TOL", "Manifold", "RootSystem", "Circle", "Torus", "Sphere",
    "SO3", "SU3", "ProductLattice", "geodesic_random_walk",
    "volume_change_delta", "manifold_from_string",
]
