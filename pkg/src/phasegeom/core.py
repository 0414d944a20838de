"""Dense linear-algebra primitives and the standard symplectic structure.

Phase vectors are ordered ``(x_1, ..., x_n, p_1, ..., p_n)``; the conjugate
plane of mode ``j`` (zero-based here) is spanned by ``e_j`` and ``e_{n+j}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ATOL = 1e-9
RTOL = 1e-9


class DimensionError(ValueError):
    """Raised when array shapes do not fit the phase-space dimension."""


def as_square(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a finite float64 square matrix, or raise."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def dof(M) -> int:
    """Degrees of freedom of an even-sized square matrix or phase vector."""
    size = np.shape(M)[0]
    if size % 2 or size == 0:
        raise DimensionError(f"phase-space objects have even size, got {size}")
    return size // 2


def max_abs(A) -> float:
    """Largest absolute entry (the ``inf``-norm used throughout)."""
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def close(a: float, b: float, atol: float = ATOL, rtol: float = RTOL) -> bool:
    return abs(a - b) <= atol + rtol * abs(b)


def standard_symplectic_matrix(n: int) -> np.ndarray:
    """The ``2n x 2n`` matrix ``J = [[0, I], [-I, 0]]``.

    >>> standard_symplectic_matrix(1)
    array([[ 0.,  1.],
           [-1.,  0.]])
    """
    if int(n) != n or n < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {n!r}")
    n = int(n)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def phase_vector(x, p) -> np.ndarray:
    """Stack positions and momenta into one phase vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if x.shape != p.shape or x.ndim != 1:
        raise DimensionError("x and p must be 1-D arrays of equal length")
    return np.concatenate([x, p])


def hermitian_eigenvalues(M_real, M_imag, tol: float = 1e-12) -> np.ndarray:
    """Ascending eigenvalues of the Hermitian matrix ``M_real + i M_imag``.

    Raises:
        ValueError: if ``M_real`` is not symmetric or ``M_imag`` not antisymmetric.
    """
    Re = as_square(M_real, "real part")
    Im = as_square(M_imag, "imaginary part")
    if Re.shape != Im.shape:
        raise DimensionError("real and imaginary parts differ in shape")
    scale = 1.0 + max(max_abs(Re), max_abs(Im))
    if max_abs(Re - Re.T) > tol * scale:
        raise ValueError("real part is not symmetric; matrix is not Hermitian")
    if max_abs(Im + Im.T) > tol * scale:
        raise ValueError("imaginary part is not antisymmetric; matrix is not Hermitian")
    return np.linalg.eigvalsh(Re + 1j * Im)


# Pade [13/13] coefficients and the 1-norm bound on the scaled argument
# below which that approximant is accurate to double precision (Higham 2005).
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def matrix_exponential(M) -> np.ndarray:
    """``exp(M)`` by scaling and squaring around a fixed Pade [13/13] kernel."""
    A = as_square(M)
    size = A.shape[0]
    eye = np.eye(size)
    norm1 = float(np.max(np.sum(np.abs(A), axis=0)))
    if norm1 == 0.0:
        return eye
    s = int(np.ceil(np.log2(norm1 / _THETA13))) if norm1 > _THETA13 else 0
    A = A / 2.0**s
    b = _PADE13
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye
    with np.errstate(over="raise", invalid="raise"):
        try:
            E = np.linalg.solve(V - U, V + U)
            for _ in range(s):
                E = E @ E
        except FloatingPointError as exc:
            raise OverflowError("matrix exponential overflowed") from exc
    if not np.all(np.isfinite(E)):
        raise OverflowError("matrix exponential overflowed")
    return E


@dataclass(frozen=True)
class PlaneSpec:
    """A 2-plane through the origin spanned by ``u`` and ``v``."""

    u: np.ndarray
    v: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).copy()
        v = np.asarray(self.v, dtype=float).copy()
        if u.ndim != 1 or u.shape != v.shape:
            raise DimensionError("plane vectors must be 1-D and of equal length")
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def frame(self) -> np.ndarray:
        """The ``(2n, 2)`` matrix with columns ``u`` and ``v``."""
        return np.column_stack([self.u, self.v])

    @classmethod
    def conjugate(cls, n: int, j: int) -> PlaneSpec:
        """The ``x_j, p_j`` plane (``j`` zero-based)."""
        if not 0 <= j < n:
            raise IndexError(f"mode index {j} out of range for n={n}")
        e = np.eye(2 * n)
        return cls(e[j], e[n + j], normalized=True)

    @classmethod
    def coordinate(cls, n: int, i: int, k: int) -> PlaneSpec:
        """The plane of coordinate axes ``i`` and ``k`` (zero-based, 0..2n-1)."""
        if i == k or not (0 <= i < 2 * n and 0 <= k < 2 * n):
            raise IndexError(f"invalid coordinate pair ({i}, {k}) for n={n}")
        e = np.eye(2 * n)
        return cls(e[i], e[k], normalized=True)


def orthonormalize_plane(plane: PlaneSpec, min_sine: float = 1e-12) -> PlaneSpec:
    """Gram-Schmidt frame spanning the same plane as ``plane``.

    Raises:
        ValueError: when the sine of the angle between ``u`` and ``v`` is below
            ``min_sine`` (including zero vectors).
    """
    u, v = plane.u, plane.v
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("plane spanned by a zero vector is degenerate")
    e1 = u / nu
    w = v - (e1 @ v) * e1
    # classical GS loses orthogonality for nearly parallel input; one re-projection fixes it
    w = w - (e1 @ w) * e1
    nw = np.linalg.norm(w)
    if nw / nv < min_sine:
        raise ValueError(f"plane vectors are (nearly) parallel: sin(angle) = {nw / nv:.3e}")
    return PlaneSpec(e1, w / nw, normalized=True)
