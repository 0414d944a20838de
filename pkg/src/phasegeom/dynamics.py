"""Hamiltonian flows as canonical maps.

Quadratic Hamiltonians ``H = z^T M z / 2`` have the exact flow
``exp(t J M)``; with ``x' = dH/dp`` and ``p' = -dH/dx`` in (x, p) ordering the
unit oscillator gives ``x(t) = x cos t + p sin t``, ``p(t) = -x sin t + p cos t``.
One-degree-of-freedom potentials are integrated with classical RK4 together
with their variational equations, so every trajectory point carries its
Jacobian.  RK4 is not symplectic; canonicality holds only to integration
accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .core import PlaneSpec, as_square, dof, matrix_exponential, max_abs, standard_symplectic_matrix
from .ellipsoid import image_shadow_area
from .symplectic import DEFAULT_TOL, SymplecticMatrix, is_symplectic


class FlowDivergence(ArithmeticError):
    """The integrated state became non-finite."""

    def __init__(self, time: float):
        super().__init__(f"trajectory diverged at t = {time:.6g}")
        self.time = time


@dataclass(frozen=True)
class QuadraticHamiltonian:
    M: np.ndarray

    def __post_init__(self):
        M = as_square(self.M, "Hamiltonian matrix").copy()
        dof(M)
        if max_abs(M - M.T) > 1e-12 * max(1.0, max_abs(M)):
            raise ValueError("Hamiltonian matrix must be symmetric")
        M = 0.5 * (M + M.T)
        M.flags.writeable = False
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return self.M.shape[0] // 2

    def energy(self, z) -> float:
        z = np.asarray(z, dtype=float)
        return 0.5 * float(z @ self.M @ z)

    def vector_field(self, z) -> np.ndarray:
        return standard_symplectic_matrix(self.n) @ self.M @ np.asarray(z, dtype=float)

    @classmethod
    def oscillator(cls, masses, frequencies) -> QuadraticHamiltonian:
        """``sum_j p_j^2 / 2 m_j + m_j w_j^2 x_j^2 / 2``."""
        m = np.atleast_1d(np.asarray(masses, dtype=float))
        w = np.atleast_1d(np.asarray(frequencies, dtype=float))
        return cls(np.diag(np.concatenate([m * w**2, 1.0 / m])))


def flow_tolerance(phi, tol: float = DEFAULT_TOL) -> float:
    """Validation tolerance for a computed flow matrix.

    Rounding leaves ``S^T J S - J`` at about ``eps |S|^2``, so strongly
    hyperbolic flows cannot meet a fixed absolute tolerance.  The floor used is
    ``32 * 2n * eps * max|S|^2``.
    """
    phi = np.asarray(phi)
    return max(tol, 32.0 * phi.shape[0] * np.finfo(float).eps * max_abs(phi) ** 2)


def linear_flow(h: QuadraticHamiltonian, t: float, tol: float | None = None) -> SymplecticMatrix:
    """Exact flow matrix ``exp(t J M)``.

    Validated at ``tol`` when given, otherwise at :func:`flow_tolerance`.
    """
    if not math.isfinite(t):
        raise ValueError("flow time must be finite")
    J = standard_symplectic_matrix(h.n)
    phi = matrix_exponential(t * (J @ h.M))
    return SymplecticMatrix(phi, flow_tolerance(phi) if tol is None else tol)


_CATALOG = {"free": _kernels.FREE, "harmonic": _kernels.HARMONIC, "pendulum": _kernels.PENDULUM, "quartic": _kernels.QUARTIC}


@dataclass(frozen=True)
class ScalarPotentialSystem:
    """``H = p^2 / 2m + V(x)`` in one degree of freedom.

    ``force`` must be ``-V'``; it is spot-checked against central differences
    of ``potential`` on construction.  ``curvature`` (``V''``) feeds the
    variational equations; when omitted it is approximated by differencing
    ``force``.  Systems built with :meth:`catalog` run in the compiled kernel.
    """

    mass: float
    potential: Callable[[float], float]
    force: Callable[[float], float]
    curvature: Callable[[float], float] | None = None
    kind: str | None = None
    params: tuple = field(default=(0.0, 0.0))

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        h = 1e-5
        for x in (-1.3, -0.2, 0.4, 1.7):
            fd = -(self.potential(x + h) - self.potential(x - h)) / (2 * h)
            f = self.force(x)
            if abs(fd - f) > 1e-6 * (1.0 + abs(f)):
                raise ValueError(f"force is not -dV/dx at x={x}: {f} vs {fd}")

    def energy(self, x: float, p: float) -> float:
        return p * p / (2.0 * self.mass) + self.potential(x)

    @classmethod
    def catalog(cls, kind: str, params: dict | None = None, mass: float = 1.0) -> ScalarPotentialSystem:
        """Named potentials.

        ``free``; ``harmonic`` (``k``): ``k x^2/2``; ``pendulum`` (``strength``):
        ``-w cos x``; ``quartic`` (``a``, ``b``): ``a x^4/4 + b x^2/2``.
        """
        params = dict(params or {})
        if kind == "free":
            vals = (0.0, 0.0)
            V, F, C = (lambda x: 0.0), (lambda x: 0.0), (lambda x: 0.0)
        elif kind == "harmonic":
            k = float(params.pop("k", 1.0))
            vals = (k, 0.0)
            V, F, C = (lambda x: 0.5 * k * x * x), (lambda x: -k * x), (lambda x: k)
        elif kind == "pendulum":
            w = float(params.pop("strength", 1.0))
            vals = (w, 0.0)
            V, F, C = (lambda x: -w * math.cos(x)), (lambda x: -w * math.sin(x)), (lambda x: w * math.cos(x))
        elif kind == "quartic":
            a = float(params.pop("a", 1.0))
            b = float(params.pop("b", 0.0))
            vals = (a, b)
            V = lambda x: 0.25 * a * x**4 + 0.5 * b * x * x  # noqa: E731
            F = lambda x: -a * x**3 - b * x  # noqa: E731
            C = lambda x: 3.0 * a * x * x + b  # noqa: E731
        else:
            raise ValueError(f"unknown potential kind {kind!r}; expected one of {sorted(_CATALOG)}")
        if params:
            raise ValueError(f"unexpected parameters for {kind}: {sorted(params)}")
        return cls(float(mass), V, F, C, kind, vals)


@dataclass(frozen=True)
class FlowMap:
    t: float
    state: np.ndarray
    jacobian: np.ndarray

    @property
    def symplectic_residual(self) -> float:
        return is_symplectic(self.jacobian)[1]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    jacobians: np.ndarray

    def __len__(self):
        return self.times.shape[0]

    def __getitem__(self, i) -> FlowMap:
        return FlowMap(float(self.times[i]), self.states[i], self.jacobians[i])

    @property
    def final(self) -> FlowMap:
        return self[-1]


def _step_sizes(t: float, dt: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t >= 0:
        raise ValueError("t must be nonnegative")
    full = int(math.floor(t / dt + 1e-9))
    rest = t - full * dt
    steps = np.full(full, dt)
    if rest > 1e-12 * max(1.0, t):
        steps = np.append(steps, rest)
    return steps


def _rk4_generic(system: ScalarPotentialSystem, x0: float, p0: float, steps: np.ndarray):
    force = system.force
    if system.curvature is not None:
        curv = system.curvature
    else:

        def curv(x, h=1e-6):
            return -(force(x + h) - force(x - h)) / (2 * h)

    im = 1.0 / system.mass

    def rhs(y):
        x, p, a, b, c, d = y
        k = curv(x)
        return np.array([p * im, force(x), c * im, d * im, -k * a, -k * b])

    y = np.array([x0, p0, 1.0, 0.0, 0.0, 1.0])
    out = np.empty((steps.shape[0] + 1, 6))
    out[0] = y
    for s, h in enumerate(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[s + 1] = y
        if not np.all(np.isfinite(y)):
            return out[: s + 2, :2], out[: s + 2, 2:].reshape(-1, 2, 2), s + 1
    return out[:, :2], out[:, 2:].reshape(-1, 2, 2), -1


def integrate_flow(system: ScalarPotentialSystem, z0, t: float, dt: float = 1e-3) -> Trajectory:
    """RK4 trajectory of ``(x' = p/m, p' = -V'(x))`` with variational Jacobians.

    Steps are ``dt`` with one shorter final step if ``t`` is not a multiple.

    Raises:
        FlowDivergence: when the state stops being finite; ``.time`` is the
            end of the first non-finite step.
    """
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (2,):
        raise ValueError("scalar potential systems have phase vectors of length 2")
    steps = _step_sizes(float(t), float(dt))
    # blow-up is detected from the states, so overflow warnings are noise here
    with np.errstate(over="ignore", invalid="ignore"):
        if system.kind in _CATALOG:
            states, jacs, stop = _kernels.rk4_catalog(
                _CATALOG[system.kind], np.asarray(system.params, dtype=float), system.mass, z0[0], z0[1], steps
            )
        else:
            states, jacs, stop = _rk4_generic(system, z0[0], z0[1], steps)
    times = np.concatenate([[0.0], np.cumsum(steps)])
    if stop >= 0:
        raise FlowDivergence(float(times[stop]))
    return Trajectory(times, states, jacs)


def finite_difference_jacobian(f, z, step: float = 1e-6) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    cols = []
    for i in range(z.shape[0]):
        e = np.zeros_like(z)
        e[i] = step
        cols.append((np.asarray(f(z + e), dtype=float) - np.asarray(f(z - e), dtype=float)) / (2 * step))
    return np.column_stack(cols)


@dataclass(frozen=True)
class CanonicalityVerdict:
    canonical: bool
    residuals: list  # max|F^T J F - J| per sample point
    determinants: list

    @property
    def worst(self) -> float:
        return max(self.residuals)


def is_canonical(f: Callable, sample_points: Sequence, tol: float = 1e-6, step: float = 1e-6) -> CanonicalityVerdict:
    """Check that central-difference Jacobians of ``f`` are symplectic at every sample.

    Raises:
        ValueError: if ``f`` raises or returns non-finite values at a sample.
    """
    residuals, dets = [], []
    for z in sample_points:
        z = np.asarray(z, dtype=float)
        try:
            F = finite_difference_jacobian(f, z, step)
        except Exception as exc:  # noqa: BLE001 - any failure means "not evaluable"
            raise ValueError(f"map is not evaluable near {z.tolist()}: {exc}") from exc
        if not np.all(np.isfinite(F)):
            raise ValueError(f"map is not evaluable near {z.tolist()}")
        residuals.append(is_symplectic(F)[1])
        dets.append(float(np.linalg.det(F)))
    return CanonicalityVerdict(all(r <= tol for r in residuals), residuals, dets)


def symplectic_polar(r: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """``(x, p) = (sqrt(2r) cos phi, sqrt(2r) sin phi)`` and its Jacobian.

    The Jacobian has rows ``(x, p)`` and columns ``(r, phi)``; its determinant
    is 1 everywhere on ``r > 0``.
    """
    if not r > 0:
        raise ValueError("symplectic polar coordinates need r > 0")
    q = math.sqrt(2.0 * r)
    c, s = math.cos(phi), math.sin(phi)
    z = np.array([q * c, q * s])
    jac = np.array([[c / q, -q * s], [s / q, q * c]])
    return z, jac


def ordinary_polar(r: float, phi: float) -> np.ndarray:
    """``(r cos phi, r sin phi)``: area-distorting, Jacobian determinant ``r``."""
    return np.array([r * math.cos(phi), r * math.sin(phi)])


def shadow_history(h: QuadraticHamiltonian, R: float, times: Sequence[float], j: int = 0) -> list[tuple[float, float]]:
    """Shadow area of the evolved ball ``phi_t(B_R)`` on the conjugate plane ``j``."""
    plane = PlaneSpec.conjugate(h.n, j)
    return [(float(t), image_shadow_area(linear_flow(h, t).matrix, plane, R).area) for t in times]


@dataclass(frozen=True)
class MinimalEllipse:
    """``p^2/(m hbar w) + x^2/(hbar/(m w)) = 1`` in the plane of one mode."""

    mode: int
    x_semi_axis: float
    p_semi_axis: float

    @property
    def area(self) -> float:
        return math.pi * self.x_semi_axis * self.p_semi_axis


@dataclass(frozen=True)
class GroundState:
    energy: float
    ellipses: list


def oscillator_ground_energy(masses, frequencies, hbar: float = 1.0) -> GroundState:
    """Lowest energy ``sum_j hbar w_j / 2`` and the per-mode minimal-action ellipses."""
    m = np.atleast_1d(np.asarray(masses, dtype=float))
    w = np.atleast_1d(np.asarray(frequencies, dtype=float))
    if m.shape != w.shape:
        raise ValueError("masses and frequencies must have the same length")
    if not (hbar > 0 and np.all(m > 0) and np.all(w > 0)):
        raise ValueError("masses, frequencies and hbar must be positive")
    energy = math.fsum(0.5 * hbar * wj for wj in w)
    ellipses = [
        MinimalEllipse(j, math.sqrt(hbar / (mj * wj)), math.sqrt(mj * hbar * wj)) for j, (mj, wj) in enumerate(zip(m, w))
    ]
    return GroundState(energy, ellipses)
