"""Symplectic matrices: predicates, block diagnostics, group operations, sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DimensionError,
    PlaneSpec,
    as_square,
    dof,
    matrix_exponential,
    max_abs,
    orthonormalize_plane,
    standard_symplectic_matrix,
)

DEFAULT_TOL = 1e-9


class NotSymplecticError(ValueError):
    """Raised when a matrix fails symplectic validation."""


def _even_square(M) -> tuple[np.ndarray, int]:
    A = as_square(M)
    return A, dof(A)


def symplectic_residual(M) -> float:
    """``max|M^T J M - J|``."""
    A, n = _even_square(M)
    J = standard_symplectic_matrix(n)
    return max_abs(A.T @ J @ A - J)


def is_symplectic(M, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Test ``M^T J M = J``.

    Returns:
        ``(verdict, residual)`` with ``residual = max|M^T J M - J|``.

    Raises:
        DimensionError: for odd or non-square input.
    """
    if isinstance(M, SymplecticMatrix):
        M = M.matrix
    r = symplectic_residual(M)
    return r <= tol, r


@dataclass(frozen=True)
class SymplecticMatrix:
    """A ``2n x 2n`` matrix validated against ``S^T J S = J`` and ``det S = 1``.

    Downstream code relies on ``validation_tol`` as the single notion of
    "symplectic enough".
    """

    matrix: np.ndarray
    validation_tol: float = DEFAULT_TOL
    n: int = field(init=False)

    def __post_init__(self):
        A, n = _even_square(self.matrix)
        A = A.copy()
        ok, r = is_symplectic(A, self.validation_tol)
        if not ok:
            raise NotSymplecticError(f"S^T J S - J has max entry {r:.3e} > {self.validation_tol:.1e}")
        d = np.linalg.det(A)
        if abs(d - 1.0) > self.validation_tol:
            raise NotSymplecticError(f"det S = {d!r} differs from 1")
        A.flags.writeable = False
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "n", n)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)

    @property
    def T(self) -> SymplecticMatrix:
        return SymplecticMatrix(self.matrix.T, self.validation_tol)

    @classmethod
    def identity(cls, n: int) -> SymplecticMatrix:
        return cls(np.eye(2 * n))


@dataclass(frozen=True)
class BlockDecomposition:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @classmethod
    def of(cls, M) -> BlockDecomposition:
        M, n = _even_square(M)
        return cls(M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:])

    def assemble(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])


@dataclass(frozen=True)
class BlockReport:
    """Residuals of the block-form characterisations of symplecticity.

    ``residuals`` maps a condition label to ``max|lhs - rhs|``.  The first three
    come from ``S^T J S = J``, the last three from ``S J S^T = J``.
    """

    residuals: dict
    stjs: float
    sjst: float
    tol: float

    @property
    def transpose_form(self) -> float:
        """Worst residual among the ``S^T J S = J`` block conditions."""
        return max(self.residuals[k] for k in ("A^T C = C^T A", "B^T D = D^T B", "A^T D - C^T B = I"))

    @property
    def direct_form(self) -> float:
        """Worst residual among the ``S J S^T = J`` block conditions."""
        return max(self.residuals[k] for k in ("A B^T = B A^T", "C D^T = D C^T", "A D^T - B C^T = I"))

    @property
    def failing(self) -> list[str]:
        return [k for k, r in self.residuals.items() if r > self.tol]

    @property
    def symplectic(self) -> bool:
        return self.stjs <= self.tol


def block_conditions_report(M, tol: float = DEFAULT_TOL) -> BlockReport:
    M, n = _even_square(M)
    b = BlockDecomposition.of(M)
    A, B, C, D = b.A, b.B, b.C, b.D
    eye = np.eye(n)
    J = standard_symplectic_matrix(n)
    residuals = {
        "A^T C = C^T A": max_abs(A.T @ C - C.T @ A),
        "B^T D = D^T B": max_abs(B.T @ D - D.T @ B),
        "A^T D - C^T B = I": max_abs(A.T @ D - C.T @ B - eye),
        "A B^T = B A^T": max_abs(A @ B.T - B @ A.T),
        "C D^T = D C^T": max_abs(C @ D.T - D @ C.T),
        "A D^T - B C^T = I": max_abs(A @ D.T - B @ C.T - eye),
    }
    return BlockReport(
        residuals=residuals,
        stjs=max_abs(M.T @ J @ M - J),
        sjst=max_abs(M @ J @ M.T - J),
        tol=tol,
    )


def symplectic_inverse(S: SymplecticMatrix) -> SymplecticMatrix:
    """Inverse from blocks: ``[[D^T, -B^T], [-C^T, A^T]]``, no linear solve."""
    if not isinstance(S, SymplecticMatrix):
        S = SymplecticMatrix(S)
    b = BlockDecomposition.of(S.matrix)
    inv = np.block([[b.D.T, -b.B.T], [-b.C.T, b.A.T]])
    return SymplecticMatrix(inv, S.validation_tol)


def compose(S1: SymplecticMatrix, S2: SymplecticMatrix) -> SymplecticMatrix:
    """``S1 @ S2``, revalidated at the looser of the two tolerances."""
    if not isinstance(S1, SymplecticMatrix):
        S1 = SymplecticMatrix(S1)
    if not isinstance(S2, SymplecticMatrix):
        S2 = SymplecticMatrix(S2)
    if S1.n != S2.n:
        raise DimensionError(f"cannot compose n={S1.n} with n={S2.n}")
    return SymplecticMatrix(S1.matrix @ S2.matrix, max(S1.validation_tol, S2.validation_tol))


def random_hamiltonian_generator(n: int, rng: np.random.Generator, spread: float) -> np.ndarray:
    """Symmetric ``2n x 2n`` matrix with entries uniform in ``[-spread, spread]``."""
    U = rng.uniform(-1.0, 1.0, size=(2 * n, 2 * n))
    return spread * np.triu(U) + spread * np.triu(U, 1).T


def random_symplectic(n: int, seed=None, spread: float = 1.0, tol: float = DEFAULT_TOL) -> SymplecticMatrix:
    """``exp(J M)`` for a seeded random symmetric ``M``.

    ``J M`` is Hamiltonian, so the exponential is symplectic with ``det = +1``.
    ``seed`` may be an int or a ``numpy.random.Generator`` (consumed in place).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if spread < 0:
        raise ValueError("spread must be nonnegative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    M = random_hamiltonian_generator(n, rng, spread)
    return SymplecticMatrix(matrix_exponential(standard_symplectic_matrix(n) @ M), tol)


def symplectic_form(u, v) -> float:
    """``u^T J v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = dof(u)
    return float(u @ standard_symplectic_matrix(n) @ v)


def is_symplectic_plane(plane: PlaneSpec, n: int | None = None, tol: float = 1e-12) -> bool:
    """Whether the symplectic form is nondegenerate on ``plane``.

    The test uses an orthonormal frame, so ``|u^T J v|`` lies in ``[0, 1]`` and
    ``tol`` is scale free.
    """
    if n is not None and plane.u.shape[0] != 2 * n:
        raise DimensionError(f"plane vectors have length {plane.u.shape[0]}, expected {2 * n}")
    g = orthonormalize_plane(plane)
    return abs(symplectic_form(g.u, g.v)) > tol


def transform_plane(S, plane: PlaneSpec) -> PlaneSpec:
    M = np.asarray(S, dtype=float)
    return PlaneSpec(M @ plane.u, M @ plane.v)


# Named test matrices.


def scaled_pairs_matrix(a: float) -> np.ndarray:
    """``diag(a, 1/a, a, 1/a)``: determinant one, symplectic only for ``a = +-1``."""
    return np.diag([a, 1.0 / a, a, 1.0 / a])


def conjugate_squeeze(l1: float, l2: float) -> np.ndarray:
    """``diag(l1, l2, 1/l1, 1/l2)``: symplectic for any positive ``l1, l2``."""
    return np.diag([l1, l2, 1.0 / l1, 1.0 / l2])


def crossed_squeeze(l1: float, l2: float) -> np.ndarray:
    """``diag(l1, l2, 1/l2, 1/l1)``: determinant one, not symplectic unless ``l1 = l2``."""
    return np.diag([l1, l2, 1.0 / l2, 1.0 / l1])


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def block_rotation(alpha: float, beta: float) -> np.ndarray:
    """``diag(R(alpha), R(beta))`` acting on ``(x1, x2)`` and ``(p1, p2)``."""
    Z = np.zeros((2, 2))
    return np.block([[rotation(alpha), Z], [Z, rotation(beta)]])
