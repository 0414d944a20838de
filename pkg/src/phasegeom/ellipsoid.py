"""Centered ellipsoids, symplectic eggs, and areas of their planar sections and shadows.

An ellipsoid is stored as ``{z : z^T E^{-1} z <= R^2}``.  For the egg
``S(B_R)`` the shape is ``E = S S^T``; every area depends on ``E`` alone.

For an egg and a conjugate plane ``x_j, p_j`` the areas bracket the disc:
``section <= pi R^2 <= shadow``.  Both are equalities when the egg does not
mix that mode with the others, and ``n = 1`` is always of that kind.  The
slice can shrink otherwise, because the action of its boundary is the
symplectic area of a tilted great disc of ``B_R``, not its Euclidean area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .core import PlaneSpec, as_square, dof, max_abs, orthonormalize_plane, standard_symplectic_matrix
from .symplectic import NotSymplecticError, SymplecticMatrix


class DegenerateSectionError(ValueError):
    """The plane is degenerate or the restricted quadratic form is not positive."""


@dataclass(frozen=True)
class CenteredEllipsoid:
    shape: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        E = as_square(self.shape, "shape").copy()
        dof(E)
        if max_abs(E - E.T) > 1e-12 * max(1.0, max_abs(E)):
            raise ValueError("ellipsoid shape matrix is not symmetric")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        E = 0.5 * (E + E.T)
        try:
            factor = cho_factor(E, lower=True)
        except np.linalg.LinAlgError as exc:
            raise ValueError("ellipsoid shape matrix is not positive definite") from exc
        E.flags.writeable = False
        object.__setattr__(self, "shape", E)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "_factor", factor)

    @property
    def n(self) -> int:
        return self.shape.shape[0] // 2

    def solve(self, X) -> np.ndarray:
        """``E^{-1} X`` through the cached Cholesky factor."""
        return cho_solve(self._factor, X)

    def contains(self, z) -> bool:
        z = np.asarray(z, dtype=float)
        return float(z @ self.solve(z)) <= self.radius**2

    @classmethod
    def ball(cls, n: int, radius: float = 1.0) -> CenteredEllipsoid:
        return cls(np.eye(2 * n), radius)


def egg(S, R: float = 1.0) -> CenteredEllipsoid:
    """The symplectic egg ``S(B_R)``; ``S`` must validate as symplectic."""
    if not isinstance(S, SymplecticMatrix):
        S = SymplecticMatrix(S)
    return CenteredEllipsoid(S.matrix @ S.matrix.T, R)


def linear_image(M, R: float = 1.0) -> CenteredEllipsoid:
    """``M(B_R)`` for any invertible ``M``; used for the non-symplectic counterexamples."""
    M = as_square(M)
    return CenteredEllipsoid(M @ M.T, R)


@dataclass(frozen=True)
class SectionResult:
    plane: PlaneSpec
    area: float
    kind: str  # "section" or "shadow"


def _frame(e: CenteredEllipsoid, plane: PlaneSpec) -> np.ndarray:
    if plane.u.shape[0] != e.shape.shape[0]:
        raise DegenerateSectionError(f"plane lives in dimension {plane.u.shape[0]}, ellipsoid in {e.shape.shape[0]}")
    try:
        g = plane if plane.normalized else orthonormalize_plane(plane)
    except ValueError as exc:
        raise DegenerateSectionError(str(exc)) from exc
    return g.frame


def _det2(Q) -> float:
    return float(Q[0, 0] * Q[1, 1] - Q[0, 1] * Q[1, 0])


def restricted_inverse_form(e: CenteredEllipsoid, plane: PlaneSpec) -> np.ndarray:
    """``G^T E^{-1} G`` for the orthonormal frame ``G`` of ``plane``."""
    G = _frame(e, plane)
    Q = G.T @ e.solve(G)
    return 0.5 * (Q + Q.T)


def section_area(e: CenteredEllipsoid, plane: PlaneSpec) -> SectionResult:
    """Area of ``e`` intersected with ``plane``: ``pi R^2 / sqrt(det(G^T E^{-1} G))``."""
    d = _det2(restricted_inverse_form(e, plane))
    if not d > 0:
        raise DegenerateSectionError("restricted quadratic form is not positive definite")
    return SectionResult(plane, np.pi * e.radius**2 / np.sqrt(d), "section")


def shadow_area(e: CenteredEllipsoid, plane: PlaneSpec) -> SectionResult:
    """Area of the orthogonal projection of ``e`` on ``plane``: ``pi R^2 sqrt(det(G^T E G))``."""
    G = _frame(e, plane)
    d = _det2(G.T @ e.shape @ G)
    if not d > 0:
        raise DegenerateSectionError("projected shape is degenerate")
    return SectionResult(plane, np.pi * e.radius**2 * np.sqrt(d), "shadow")


def image_shadow_area(M, plane: PlaneSpec, R: float = 1.0) -> SectionResult:
    """Shadow of ``M(B_R)`` on ``plane`` without forming ``M M^T``.

    The area is ``pi R^2`` times the product of the singular values of ``M^T G``.
    This stays accurate for badly conditioned ``M``, e.g. long hyperbolic flows,
    where ``M M^T`` is numerically singular.
    """
    M = as_square(np.asarray(M), "matrix")
    dof(M)
    if plane.u.shape[0] != M.shape[0]:
        raise DegenerateSectionError(f"plane lives in dimension {plane.u.shape[0]}, matrix in {M.shape[0]}")
    G = (plane if plane.normalized else orthonormalize_plane(plane)).frame
    sv = np.linalg.svd(M.T @ G, compute_uv=False)
    if not sv[1] > 0:
        raise DegenerateSectionError("projected shape is degenerate")
    return SectionResult(plane, np.pi * R**2 * float(sv[0] * sv[1]), "shadow")


def conjugate_section_areas(e: CenteredEllipsoid) -> list[SectionResult]:
    return [section_area(e, PlaneSpec.conjugate(e.n, j)) for j in range(e.n)]


def conjugate_shadow_areas(e: CenteredEllipsoid) -> list[SectionResult]:
    return [shadow_area(e, PlaneSpec.conjugate(e.n, j)) for j in range(e.n)]


def symplectic_eigenvalues(E) -> np.ndarray:
    """Ascending ``nu_j > 0`` with ``+-i nu_j`` the eigenvalues of ``J E``.

    Computed as the positive eigenvalues of the Hermitian ``i L^T J L`` where
    ``E = L L^T``; that matrix is similar to ``i J E``.
    """
    E = as_square(E)
    n = dof(E)
    L = np.linalg.cholesky(0.5 * (E + E.T))
    lam = np.linalg.eigvalsh(1j * (L.T @ standard_symplectic_matrix(n) @ L))
    return lam[n:]


def symplectic_capacity(e: CenteredEllipsoid) -> float:
    """Linear symplectic capacity ``pi R^2 nu_min``; equals ``pi R^2`` for every egg."""
    return float(np.pi * e.radius**2 * symplectic_eigenvalues(e.shape)[0])


@dataclass(frozen=True)
class SqueezeVerdict:
    passable: bool
    capacity: float
    section_area: float
    shadow_area: float
    hole_area: float
    mode: int


def squeeze_check(e: CenteredEllipsoid, hole_radius: float, j: int = 0, rtol: float = 1e-12) -> SqueezeVerdict:
    """Can some symplectic image of ``e`` pass a disc of radius ``hole_radius`` in conjugate plane ``j``?

    Linear non-squeezing: passable iff the capacity does not exceed the hole
    area; for an egg ``S(B_R)`` that is ``R <= r``.  Equal areas pass, with
    ``rtol`` absorbing rounding at the boundary.  The conjugate section and
    shadow of ``e`` as placed are reported alongside; the section never
    exceeds the capacity and the shadow is never below it.
    """
    if not hole_radius > 0:
        raise ValueError("hole radius must be positive")
    plane = PlaneSpec.conjugate(e.n, j)
    cap = symplectic_capacity(e)
    hole = np.pi * hole_radius**2
    return SqueezeVerdict(
        passable=cap <= hole * (1.0 + rtol),
        capacity=cap,
        section_area=section_area(e, plane).area,
        shadow_area=shadow_area(e, plane).area,
        hole_area=hole,
        mode=j,
    )


__all__ = [
    "CenteredEllipsoid",
    "DegenerateSectionError",
    "NotSymplecticError",
    "SectionResult",
    "SqueezeVerdict",
    "conjugate_section_areas",
    "conjugate_shadow_areas",
    "egg",
    "image_shadow_area",
    "linear_image",
    "restricted_inverse_form",
    "section_area",
    "shadow_area",
    "squeeze_check",
    "symplectic_capacity",
    "symplectic_eigenvalues",
]
