"""Closed phase-space loops and the action integral ``I = oint p dx``.

A loop is stored as ``N`` samples at ``t_k = 2 pi k / N`` (the endpoint
``t = 2 pi`` is the first sample again).  Orientation convention: loops that
wind so that ``x = sin t, p = cos t`` (clockwise with ``x`` to the right and
``p`` up) have positive action equal to the enclosed area.  Reversing a loop
flips the sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionError, PlaneSpec, dof
from .ellipsoid import CenteredEllipsoid, DegenerateSectionError, restricted_inverse_form

MIN_SAMPLES = 16


class OpenLoopError(ValueError):
    """Sample data does not close up."""


@dataclass(frozen=True)
class Loop:
    samples: np.ndarray
    velocity: np.ndarray | None = None

    def __post_init__(self):
        z = np.array(self.samples, dtype=float)
        if z.ndim != 2:
            raise DimensionError("loop samples must be a (N, 2n) array")
        dof(z[0])
        if z.shape[0] < MIN_SAMPLES:
            raise ValueError(f"a loop needs at least {MIN_SAMPLES} samples, got {z.shape[0]}")
        if not np.all(np.isfinite(z)):
            raise ValueError("loop samples must be finite")
        z.flags.writeable = False
        object.__setattr__(self, "samples", z)
        if self.velocity is not None:
            v = np.array(self.velocity, dtype=float)
            if v.shape != z.shape:
                raise DimensionError("velocity array must match samples")
            v.flags.writeable = False
            object.__setattr__(self, "velocity", v)

    @property
    def n(self) -> int:
        return self.samples.shape[1] // 2

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def times(self) -> np.ndarray:
        return grid(self.N)

    @classmethod
    def from_closed_samples(cls, points, atol: float = 1e-9) -> Loop:
        """Build from ``N + 1`` samples on ``[0, 2 pi]`` whose last row repeats the first."""
        z = np.asarray(points, dtype=float)
        if z.ndim != 2 or z.shape[0] < 2:
            raise DimensionError("expected a (N+1, 2n) array of samples")
        gap = float(np.max(np.abs(z[-1] - z[0])))
        if gap > atol * (1.0 + float(np.max(np.abs(z[0])))):
            raise OpenLoopError(f"loop does not close: |z(2pi) - z(0)| = {gap:.3e}")
        return cls(z[:-1])

    @classmethod
    def from_callable(cls, func, N: int = 1024, derivative=None) -> Loop:
        """Sample ``func(t) -> (len(t), 2n)`` (vectorised over ``t``); ``func`` must be side-effect free."""
        t = grid(N)
        z = np.asarray(func(t), dtype=float)
        v = None if derivative is None else np.asarray(derivative(t), dtype=float)
        return cls(z, v)

    @classmethod
    def from_fourier(cls, cos_coeffs, sin_coeffs, N: int = 1024) -> Loop:
        """``z(t) = sum_k cos_coeffs[k] cos(k t) + sin_coeffs[k] sin(k t)`` with exact velocity.

        Both coefficient arrays have shape ``(K + 1, 2n)``; ``sin_coeffs[0]`` is
        ignored.
        """
        a = np.atleast_2d(np.asarray(cos_coeffs, dtype=float))
        b = np.atleast_2d(np.asarray(sin_coeffs, dtype=float))
        if a.shape != b.shape:
            raise DimensionError("cos and sin coefficient arrays must have the same shape")
        t = grid(N)
        k = np.arange(a.shape[0])
        C = np.cos(np.outer(t, k))
        S = np.sin(np.outer(t, k))
        z = C @ a + S @ b
        v = (-S * k) @ a + (C * k) @ b
        return cls(z, v)

    def reversed(self) -> Loop:
        """Same curve traversed backwards, ``t -> -t``."""
        idx = (-np.arange(self.N)) % self.N
        v = None if self.velocity is None else -self.velocity[idx]
        return Loop(self.samples[idx], v)


def grid(N: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(N) / N


def periodic_derivative(z: np.ndarray, method: str = "spectral") -> np.ndarray:
    """d/dt of samples on the periodic grid of ``grid(N)``, column by column."""
    N = z.shape[0]
    if method == "spectral":
        Z = np.fft.rfft(z, axis=0)
        k = np.arange(Z.shape[0], dtype=float)
        if N % 2 == 0:
            k[-1] = 0.0  # the Nyquist mode has no well-defined real derivative
        return np.fft.irfft(1j * k[:, None] * Z, n=N, axis=0)
    if method == "centered":
        h = 2.0 * np.pi / N
        return (np.roll(z, -1, axis=0) - np.roll(z, 1, axis=0)) / (2.0 * h)
    raise ValueError(f"unknown derivative method {method!r}")


def poincare_invariant(loop: Loop, method: str = "spectral") -> float:
    """``I = int_0^{2 pi} p(t) . x'(t) dt`` by the periodic trapezoid rule.

    Exact velocities are used when the loop carries them; otherwise ``x'`` comes
    from ``periodic_derivative(.., method)``.  Both derivative operators are
    antisymmetric on the grid, which makes the discrete value exactly invariant
    (up to rounding) under symplectic maps.
    """
    n = loop.n
    x = loop.samples[:, :n]
    p = loop.samples[:, n:]
    if loop.velocity is not None:
        xdot = loop.velocity[:, :n]
    else:
        xdot = periodic_derivative(x, method)
    return float(2.0 * np.pi / loop.N * np.sum(p * xdot))


def transform_loop(S, loop: Loop) -> Loop:
    """Pointwise image ``S gamma(t)``.  ``S`` may be any square matrix of matching size."""
    M = np.asarray(S, dtype=float)
    if M.shape != (2 * loop.n, 2 * loop.n):
        raise DimensionError(f"matrix of shape {M.shape} cannot act on a loop with n={loop.n}")
    v = None if loop.velocity is None else loop.velocity @ M.T
    return Loop(loop.samples @ M.T, v)


def section_boundary_loop(e: CenteredEllipsoid, j: int = 0, N: int = 1024) -> Loop:
    """Positively oriented boundary of ``e`` cut by the conjugate plane ``j``.

    Coordinates outside ``(x_j, p_j)`` are identically zero.
    """
    Q = restricted_inverse_form(e, PlaneSpec.conjugate(e.n, j))
    try:
        L = np.linalg.cholesky(Q)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSectionError("section quadratic form is not positive definite") from exc
    # w = R L^{-T} u with u on the unit circle satisfies w^T Q w = R^2;
    # L^{-T} has positive determinant, so the orientation of u is kept
    Linv_T = np.linalg.inv(L).T
    t = grid(N)
    u = np.column_stack([np.sin(t), np.cos(t)])
    du = np.column_stack([np.cos(t), -np.sin(t)])
    w = e.radius * u @ Linv_T.T
    dw = e.radius * du @ Linv_T.T
    z = np.zeros((N, 2 * e.n))
    v = np.zeros((N, 2 * e.n))
    z[:, [j, e.n + j]] = w
    v[:, [j, e.n + j]] = dw
    return Loop(z, v)


def random_trigonometric_loop(n: int, degree: int, rng: np.random.Generator, N: int = 1024, exact_velocity: bool = False) -> Loop:
    """Loop with Fourier content up to ``degree``, coefficients ~ N(0, 1/k)."""
    a = rng.normal(size=(degree + 1, 2 * n))
    b = rng.normal(size=(degree + 1, 2 * n))
    k = np.arange(degree + 1)
    scale = 1.0 / np.maximum(k, 1)
    a *= scale[:, None]
    b *= scale[:, None]
    b[0] = 0.0
    loop = Loop.from_fourier(a, b, N)
    return loop if exact_velocity else Loop(loop.samples)
