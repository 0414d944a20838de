"""Inner loops: RK4 with variational equations, and 2D hit counting.

Each public kernel exists twice: a scalar-loop version compiled by numba and a
numpy version used when numba is unavailable or disabled (see
:mod:`phasegeom._accel`).  The RK4 stepper has no vectorised form, so its
numpy path is the same scalar source run by the interpreter.  Both variants
stay importable (``*_numba`` / ``*_numpy``) for the tests and the benchmark.
"""

import math

import numpy as np

from ._accel import HAS_NUMBA, jit

# catalog codes for the 1-dof potentials understood by the compiled kernel
FREE = 0
HARMONIC = 1  # V = k x^2 / 2                params: (k, _)
PENDULUM = 2  # V = -w cos x                  params: (w, _)
QUARTIC = 3  # V = a x^4 / 4 + b x^2 / 2    params: (a, b)


def _force_and_curvature(kind, params, x):
    """Return (-V'(x), V''(x)) for a catalog potential."""
    if kind == HARMONIC:
        k = params[0]
        return -k * x, k
    if kind == PENDULUM:
        w = params[0]
        return -w * math.sin(x), w * math.cos(x)
    if kind == QUARTIC:
        a = params[0]
        b = params[1]
        return -a * x * x * x - b * x, 3.0 * a * x * x + b
    return 0.0, 0.0


def _build_rk4(wrap):
    force_curv = wrap(_force_and_curvature)

    @wrap
    def rhs(kind, params, inv_mass, y, out):
        # y = (x, p, j00, j01, j10, j11); Jacobian obeys dJ/dt = [[0, 1/m], [-V'', 0]] J
        f, c = force_curv(kind, params, y[0])
        out[0] = y[1] * inv_mass
        out[1] = f
        out[2] = y[4] * inv_mass
        out[3] = y[5] * inv_mass
        out[4] = -c * y[2]
        out[5] = -c * y[3]

    @wrap
    def rk4_catalog(kind, params, mass, x0, p0, steps):
        """Classical RK4 on state plus 2x2 variational system.

        Args:
            kind: catalog code.
            params: float64 array of length 2.
            mass: particle mass.
            x0, p0: initial state.
            steps: float64 array of step sizes.

        Returns:
            (states, jacobians, stop) where ``states`` has shape (len(steps)+1, 2),
            ``jacobians`` shape (len(steps)+1, 2, 2) and ``stop`` is the index of
            the first non-finite row, or -1.
        """
        nsteps = steps.shape[0]
        states = np.empty((nsteps + 1, 2))
        jacs = np.empty((nsteps + 1, 2, 2))
        inv_mass = 1.0 / mass
        y = np.array([x0, p0, 1.0, 0.0, 0.0, 1.0])
        k1 = np.empty(6)
        k2 = np.empty(6)
        k3 = np.empty(6)
        k4 = np.empty(6)
        tmp = np.empty(6)
        states[0, 0] = x0
        states[0, 1] = p0
        jacs[0, 0, 0] = 1.0
        jacs[0, 0, 1] = 0.0
        jacs[0, 1, 0] = 0.0
        jacs[0, 1, 1] = 1.0
        for s in range(nsteps):
            h = steps[s]
            rhs(kind, params, inv_mass, y, k1)
            for i in range(6):
                tmp[i] = y[i] + 0.5 * h * k1[i]
            rhs(kind, params, inv_mass, tmp, k2)
            for i in range(6):
                tmp[i] = y[i] + 0.5 * h * k2[i]
            rhs(kind, params, inv_mass, tmp, k3)
            for i in range(6):
                tmp[i] = y[i] + h * k3[i]
            rhs(kind, params, inv_mass, tmp, k4)
            finite = True
            for i in range(6):
                y[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if not math.isfinite(y[i]):
                    finite = False
            states[s + 1, 0] = y[0]
            states[s + 1, 1] = y[1]
            jacs[s + 1, 0, 0] = y[2]
            jacs[s + 1, 0, 1] = y[3]
            jacs[s + 1, 1, 0] = y[4]
            jacs[s + 1, 1, 1] = y[5]
            if not finite:
                return states[: s + 2], jacs[: s + 2], s + 1
        return states, jacs, -1

    return rk4_catalog


def _count_in_quadratic(a, b, q00, q01, q11, r2):
    """Count points (a_i, b_i) with q00 a^2 + 2 q01 a b + q11 b^2 <= r2."""
    hits = 0
    for i in range(a.shape[0]):
        ai = a[i]
        bi = b[i]
        if q00 * ai * ai + 2.0 * q01 * ai * bi + q11 * bi * bi <= r2:
            hits += 1
    return hits


def _count_in_support(a, b, cos_t, sin_t, support):
    """Count points lying inside the convex set with the given support values.

    A point is inside when ``a cos(t_k) + b sin(t_k) <= support[k]`` for every
    sampled direction k.
    """
    hits = 0
    m = cos_t.shape[0]
    for i in range(a.shape[0]):
        ai = a[i]
        bi = b[i]
        inside = True
        for k in range(m):
            if ai * cos_t[k] + bi * sin_t[k] > support[k]:
                inside = False
                break
        if inside:
            hits += 1
    return hits


def _count_in_quadratic_np(a, b, q00, q01, q11, r2):
    return int(np.count_nonzero(q00 * a * a + 2.0 * q01 * a * b + q11 * b * b <= r2))


def _count_in_support_np(a, b, cos_t, sin_t, support, chunk=8192):
    hits = 0
    for lo in range(0, a.shape[0], chunk):
        proj = np.outer(a[lo : lo + chunk], cos_t) + np.outer(b[lo : lo + chunk], sin_t)
        hits += int(np.count_nonzero(np.all(proj <= support, axis=1)))
    return hits


rk4_catalog_numpy = _build_rk4(lambda f: f)
count_in_quadratic_numpy = _count_in_quadratic_np
count_in_support_numpy = _count_in_support_np

if HAS_NUMBA:
    rk4_catalog_numba = _build_rk4(jit)
    count_in_quadratic_numba = jit(_count_in_quadratic)
    count_in_support_numba = jit(_count_in_support)
    rk4_catalog = rk4_catalog_numba
    count_in_quadratic = count_in_quadratic_numba
    count_in_support = count_in_support_numba
else:
    rk4_catalog = rk4_catalog_numpy
    count_in_quadratic = count_in_quadratic_numpy
    count_in_support = count_in_support_numpy
