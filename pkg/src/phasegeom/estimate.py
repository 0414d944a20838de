"""Monte Carlo area estimates by 2D hit counting.

These deliberately avoid the determinant formulas in
:mod:`phasegeom.ellipsoid`: sections test membership of lifted points with an
explicitly inverted shape matrix, shadows test membership against the support
function of the projection sampled on a fine grid of directions.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .core import PlaneSpec, orthonormalize_plane
from .ellipsoid import CenteredEllipsoid


def mc_section_area(e: CenteredEllipsoid, plane: PlaneSpec, samples: int = 10**6, seed=0) -> float:
    g = orthonormalize_plane(plane)
    Einv = np.linalg.inv(e.shape)
    q00 = float(g.u @ Einv @ g.u)
    q01 = float(g.u @ Einv @ g.v)
    q11 = float(g.v @ Einv @ g.v)
    # the section lies in the disc of radius R / sqrt(lambda_min) of the 2x2 form
    lam_min = 0.5 * (q00 + q11) - np.hypot(0.5 * (q00 - q11), q01)
    half = 1.0001 * e.radius / np.sqrt(lam_min)
    rng = np.random.default_rng(seed)
    a = rng.uniform(-half, half, samples)
    b = rng.uniform(-half, half, samples)
    hits = _kernels.count_in_quadratic(a, b, q00, q01, q11, e.radius**2)
    return (2.0 * half) ** 2 * hits / samples


def mc_shadow_area(e: CenteredEllipsoid, plane: PlaneSpec, samples: int = 10**6, seed=0, directions: int = 720) -> float:
    g = orthonormalize_plane(plane)
    theta = np.linspace(0.0, 2.0 * np.pi, directions, endpoint=False)
    c, s = np.cos(theta), np.sin(theta)
    # support of the ellipsoid in direction d is R sqrt(d^T E d); d = c u + s v
    D = np.outer(c, g.u) + np.outer(s, g.v)
    support = e.radius * np.sqrt(np.einsum("ki,ij,kj->k", D, e.shape, D))
    half = 1.0001 * float(np.max(support))
    rng = np.random.default_rng(seed)
    a = rng.uniform(-half, half, samples)
    b = rng.uniform(-half, half, samples)
    hits = _kernels.count_in_support(a, b, c, s, support)
    return (2.0 * half) ** 2 * hits / samples
