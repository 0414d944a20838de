import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasegeom.core import standard_symplectic_matrix
from phasegeom.dynamics import (
    FlowDivergence,
    QuadraticHamiltonian,
    ScalarPotentialSystem,
    finite_difference_jacobian,
    integrate_flow,
    is_canonical,
    linear_flow,
    ordinary_polar,
    oscillator_ground_energy,
    shadow_history,
    symplectic_polar,
)
from phasegeom.symplectic import is_symplectic, random_hamiltonian_generator


def random_quadratic(rng, n):
    return QuadraticHamiltonian(random_hamiltonian_generator(n, rng, 1.0))


class TestQuadraticHamiltonian:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            QuadraticHamiltonian([[1.0, 0.5], [0.0, 1.0]])

    def test_oscillator_matrix(self):
        h = QuadraticHamiltonian.oscillator([2.0], [3.0])
        assert np.allclose(h.M, np.diag([18.0, 0.5]))
        # H = p^2/2m + m w^2 x^2 / 2
        assert h.energy([1.0, 2.0]) == pytest.approx(4.0 / 4.0 + 9.0)

    def test_vector_field_matches_hamilton(self, rng):
        # x' = dH/dp, p' = -dH/dx, derivatives by central differences
        h = random_quadratic(rng, 2)
        z = rng.normal(size=4)
        g = np.array([(h.energy(z + 1e-6 * e) - h.energy(z - 1e-6 * e)) / 2e-6 for e in np.eye(4)])
        expected = np.concatenate([g[2:], -g[:2]])
        assert np.allclose(h.vector_field(z), expected, atol=1e-7)


class TestLinearFlow:
    def test_zero_time(self, rng):
        assert np.array_equal(linear_flow(random_quadratic(rng, 2), 0.0).matrix, np.eye(4))

    @pytest.mark.parametrize("t", [0.3, 1.0, 2.5])
    def test_isotropic_oscillator(self, t):
        # x' = p, p' = -x: x(t) = x0 cos t + p0 sin t
        phi = linear_flow(QuadraticHamiltonian(np.eye(2)), t).matrix
        assert np.allclose(phi, [[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]], atol=1e-14)

    def test_full_period(self):
        phi = linear_flow(QuadraticHamiltonian(np.eye(4)), 2 * np.pi).matrix
        assert np.max(np.abs(phi - np.eye(4))) <= 1e-13

    @pytest.mark.parametrize("m", [1.0, 0.25, 3.0])
    def test_free_particle(self, m):
        phi = linear_flow(QuadraticHamiltonian(np.diag([0.0, 1.0 / m])), 1.7).matrix
        assert np.allclose(phi, [[1.0, 1.7 / m], [0.0, 1.0]], atol=1e-14)

    def test_group_law(self, rng):
        for _ in range(30):
            h = random_quadratic(rng, int(rng.integers(1, 4)))
            s, t = rng.uniform(-2, 2, size=2)
            lhs = linear_flow(h, s + t).matrix
            rhs = linear_flow(h, s).matrix @ linear_flow(h, t).matrix
            assert np.max(np.abs(lhs - rhs)) <= 1e-9

    @given(st.integers(0, 2**31), st.integers(1, 3), st.floats(-3, 3))
    def test_symplectic_and_volume_preserving(self, seed, n, t):
        phi = linear_flow(random_quadratic(np.random.default_rng(seed), n), t).matrix
        assert is_symplectic(phi, 1e-9)[0]
        assert abs(np.linalg.det(phi) - 1.0) <= 1e-9

    def test_matches_vector_field(self, rng):
        h = random_quadratic(rng, 2)
        z = rng.normal(size=4)
        eps = 1e-6
        deriv = (linear_flow(h, eps).matrix @ z - linear_flow(h, -eps).matrix @ z) / (2 * eps)
        assert np.allclose(deriv, h.vector_field(z), atol=1e-8)

    def test_hyperbolic_flow_validates(self):
        # e^{5 sqrt(3)} growth: rounding alone leaves a residual near 1e-10
        h = QuadraticHamiltonian(np.array([[-3.0, 0.0], [0.0, 1.0]]))
        phi = linear_flow(h, 5.0)
        assert np.abs(phi.matrix).max() > 4e3
        assert phi.validation_tol > 1e-9
        with pytest.raises(ValueError):
            linear_flow(h, 5.0, tol=1e-12)

    def test_nonfinite_time(self):
        with pytest.raises(ValueError):
            linear_flow(QuadraticHamiltonian(np.eye(2)), math.inf)

    def test_overflow(self):
        with pytest.raises(OverflowError):
            linear_flow(QuadraticHamiltonian(np.array([[-1.0, 0.0], [0.0, 1.0]])), 800.0)


class TestScalarPotentialSystem:
    def test_bad_force_rejected(self):
        with pytest.raises(ValueError, match="-dV/dx"):
            ScalarPotentialSystem(1.0, lambda x: x * x, lambda x: 2 * x)

    def test_mass(self):
        with pytest.raises(ValueError):
            ScalarPotentialSystem.catalog("free", mass=0.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown"):
            ScalarPotentialSystem.catalog("morse")

    def test_unexpected_param(self):
        with pytest.raises(ValueError, match="unexpected"):
            ScalarPotentialSystem.catalog("pendulum", {"k": 1.0})

    @pytest.mark.parametrize("kind,params", [("harmonic", {"k": 2.0}), ("pendulum", {"strength": 0.5}), ("quartic", {"a": 1.0, "b": -0.5})])
    def test_catalog_curvature(self, kind, params):
        s = ScalarPotentialSystem.catalog(kind, params)
        for x in (-0.7, 0.1, 1.3):
            fd = -(s.force(x + 1e-5) - s.force(x - 1e-5)) / 2e-5
            assert s.curvature(x) == pytest.approx(fd, rel=1e-8, abs=1e-9)


class TestIntegrateFlow:
    def test_free_exact(self):
        traj = integrate_flow(ScalarPotentialSystem.catalog("free", mass=2.0), [0.5, 3.0], 1.0, 0.1)
        assert traj.final.state == pytest.approx([0.5 + 1.5, 3.0], abs=1e-14)
        assert np.allclose(traj.final.jacobian, [[1.0, 0.5], [0.0, 1.0]], atol=1e-14)

    def test_harmonic_vs_exponential(self):
        sys_ = ScalarPotentialSystem.catalog("harmonic", {"k": 4.0}, mass=0.5)
        h = QuadraticHamiltonian(np.diag([4.0, 2.0]))
        z0 = np.array([0.3, -1.1])
        for dt, bound in ((1e-2, 5e-8), (1e-3, 5e-12)):
            traj = integrate_flow(sys_, z0, 1.0, dt)
            exact = linear_flow(h, 1.0).matrix
            assert np.max(np.abs(traj.final.state - exact @ z0)) <= bound
            assert np.max(np.abs(traj.final.jacobian - exact)) <= bound

    def test_fourth_order_state_error(self):
        sys_ = ScalarPotentialSystem.catalog("harmonic")
        exact = linear_flow(QuadraticHamiltonian(np.eye(2)), 2.0).matrix @ [1.0, 0.0]
        err = [np.max(np.abs(integrate_flow(sys_, [1.0, 0.0], 2.0, dt).final.state - exact)) for dt in (0.1, 0.05)]
        assert 14 <= err[0] / err[1] <= 18

    def test_partial_final_step(self):
        traj = integrate_flow(ScalarPotentialSystem.catalog("free"), [0.0, 1.0], 0.25, 0.1)
        assert np.allclose(traj.times, [0.0, 0.1, 0.2, 0.25])
        assert traj.final.state[0] == pytest.approx(0.25, abs=1e-15)

    def test_pendulum_canonical(self):
        traj = integrate_flow(ScalarPotentialSystem.catalog("pendulum"), [1.0, 0.0], 1.0, 1e-3)
        assert traj.final.symplectic_residual <= 1e-6
        assert abs(np.linalg.det(traj.final.jacobian) - 1.0) <= 1e-6

    def test_pendulum_energy(self):
        s = ScalarPotentialSystem.catalog("pendulum")
        traj = integrate_flow(s, [1.0, 0.0], 1.0, 1e-3)
        assert abs(s.energy(*traj.final.state) - s.energy(1.0, 0.0)) <= 1e-8

    def test_residual_fourth_order_scaling(self):
        # truncation dominates only at coarse steps; at dt = 1e-3 rounding does
        s = ScalarPotentialSystem.catalog("pendulum", {"strength": 4.0})
        res = [integrate_flow(s, [2.5, 0.0], 1.0, dt).final.symplectic_residual for dt in (2e-2, 1e-2, 5e-3)]
        assert res[0] / res[1] >= 8
        assert res[1] / res[2] >= 8

    def test_variational_vs_finite_difference(self):
        s = ScalarPotentialSystem.catalog("pendulum")
        z0 = np.array([0.8, 0.3])
        F = finite_difference_jacobian(lambda z: integrate_flow(s, z, 1.0, 1e-3).final.state, z0, 1e-5)
        assert np.max(np.abs(F - integrate_flow(s, z0, 1.0, 1e-3).final.jacobian)) <= 1e-5

    def test_generic_callable_path(self):
        # same pendulum without the catalog tag runs the python integrator
        cat = ScalarPotentialSystem.catalog("pendulum")
        gen = ScalarPotentialSystem(1.0, cat.potential, cat.force, cat.curvature)
        a = integrate_flow(cat, [1.0, 0.2], 0.5, 1e-2)
        b = integrate_flow(gen, [1.0, 0.2], 0.5, 1e-2)
        assert np.allclose(a.states, b.states, atol=1e-14)
        assert np.allclose(a.jacobians, b.jacobians, atol=1e-14)

    def test_generic_without_curvature(self):
        cat = ScalarPotentialSystem.catalog("pendulum")
        gen = ScalarPotentialSystem(1.0, cat.potential, cat.force)
        a = integrate_flow(cat, [1.0, 0.2], 0.5, 1e-2)
        b = integrate_flow(gen, [1.0, 0.2], 0.5, 1e-2)
        assert np.allclose(a.jacobians, b.jacobians, atol=1e-8)

    def test_divergence(self):
        s = ScalarPotentialSystem.catalog("quartic", {"a": -1.0, "b": 0.0})
        with pytest.raises(FlowDivergence) as info:
            integrate_flow(s, [2.0, 0.0], 5.0, 1e-2)
        # x'' = x^3 from rest at x0 blows up at T = int_x0^inf dx / sqrt((x^4 - x0^4)/2)
        assert 0.5 < info.value.time < 1.5

    def test_bad_arguments(self):
        s = ScalarPotentialSystem.catalog("free")
        with pytest.raises(ValueError):
            integrate_flow(s, [0.0, 0.0], 1.0, 0.0)
        with pytest.raises(ValueError):
            integrate_flow(s, [0.0, 0.0, 1.0], 1.0)

    def test_trajectory_access(self):
        traj = integrate_flow(ScalarPotentialSystem.catalog("harmonic"), [1.0, 0.0], 0.1, 0.01)
        assert len(traj) == 11
        assert traj[0].t == 0.0 and np.array_equal(traj[0].jacobian, np.eye(2))


class TestCanonicality:
    def test_translation(self, rng):
        z0 = rng.normal(size=4)
        v = is_canonical(lambda z: z + z0, rng.normal(size=(5, 4)))
        assert v.canonical and v.worst <= 1e-9
        assert np.allclose(v.determinants, 1.0)

    def test_symplectic_polar(self, rng):
        pts = np.column_stack([rng.uniform(0.1, 4.0, 20), rng.uniform(-np.pi, np.pi, 20)])
        assert is_canonical(lambda w: symplectic_polar(*w)[0], pts).canonical

    def test_ordinary_polar_witness(self):
        v = is_canonical(lambda w: ordinary_polar(*w), [[2.0, 0.3]])
        assert not v.canonical
        assert v.determinants[0] == pytest.approx(2.0, rel=1e-8)

    def test_linear_flow_canonical(self, rng):
        h = random_quadratic(rng, 2)
        v = is_canonical(lambda z: linear_flow(h, 0.7).matrix @ z, rng.normal(size=(4, 4)))
        assert v.canonical

    def test_not_evaluable(self):
        with pytest.raises(ValueError, match="evaluable"):
            is_canonical(lambda w: symplectic_polar(*w)[0], [[0.0, 1.0]])


class TestSymplecticPolar:
    def test_value_at_zero_angle(self):
        z, _ = symplectic_polar(2.0, 0.0)
        assert np.allclose(z, [2.0, 0.0])

    def test_determinant(self):
        _, jac = symplectic_polar(2.0, 0.7)
        assert np.linalg.det(jac) == pytest.approx(1.0, abs=1e-15)

    @given(st.floats(0.01, 10.0), st.floats(-4.0, 4.0))
    def test_jacobian_matches_differences(self, r, phi):
        _, jac = symplectic_polar(r, phi)
        fd = finite_difference_jacobian(lambda w: symplectic_polar(*w)[0], [r, phi], 1e-6 * min(1.0, r))
        assert np.allclose(jac, fd, atol=1e-5 * (1 + np.abs(jac).max()))

    @given(st.floats(0.01, 10.0), st.floats(-4.0, 4.0))
    def test_oscillator_pulls_back(self, r, phi):
        z, _ = symplectic_polar(r, phi)
        assert QuadraticHamiltonian(np.eye(2)).energy(z) == pytest.approx(r, rel=1e-13)

    def test_nonpositive_radius(self):
        with pytest.raises(ValueError):
            symplectic_polar(0.0, 1.0)


class TestShadowHistory:
    def test_isotropic_constant(self):
        hist = shadow_history(QuadraticHamiltonian(np.eye(4)), 1.5, np.linspace(0, 5, 11))
        assert all(a == pytest.approx(np.pi * 2.25, rel=1e-12) for _, a in hist)

    def test_initial(self, rng):
        (t, a), = shadow_history(random_quadratic(rng, 3), 2.0, [0.0], 2)
        assert t == 0.0 and a == pytest.approx(4 * np.pi, rel=1e-14)

    def test_never_below(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 4))
            h = random_quadratic(rng, n)
            for _, a in shadow_history(h, 1.0, np.linspace(0, 5, 20), int(rng.integers(n))):
                assert a >= np.pi * (1 - 1e-9)


class TestGroundEnergy:
    def test_unit(self):
        g = oscillator_ground_energy([1.0], [1.0], 1.0)
        assert g.energy == 0.5

    def test_three_modes(self):
        assert oscillator_ground_energy([1.0] * 3, [1.0, 2.0, 3.0]).energy == pytest.approx(3.0, abs=1e-15)

    def test_ellipse_area_and_energy_level(self, rng):
        for _ in range(20):
            m, w, hbar = rng.uniform(0.1, 5.0, 3)
            g = oscillator_ground_energy([m], [w], hbar)
            e = g.ellipses[0]
            assert e.area == pytest.approx(np.pi * hbar, rel=1e-12)
            # the ellipse is the energy level H = hbar w / 2 ... times two
            h = QuadraticHamiltonian.oscillator([m], [w])
            assert h.energy([e.x_semi_axis, 0.0]) == pytest.approx(0.5 * hbar * w, rel=1e-12)
            assert h.energy([0.0, e.p_semi_axis]) == pytest.approx(0.5 * hbar * w, rel=1e-12)

    def test_rejects(self):
        with pytest.raises(ValueError):
            oscillator_ground_energy([1.0], [0.0])
        with pytest.raises(ValueError):
            oscillator_ground_energy([1.0, 2.0], [1.0])
