"""Tests for Newtonian gravity fields and diagnostics."""

import math

import numpy as np
import pytest

from dynbundle_cli.calculus.dynamics import check_f_related, flip_defect, integrate_rk4
from dynbundle_cli.calculus.errors import ContractError, DomainError, SingularityError
from dynbundle_cli.calculus.smoothmap import evaluate, evaluate_array, jacobian
from dynbundle_cli.calculus.newton import (
    ConfigState,
    GravityParams,
    PhaseState,
    angular_momentum,
    config_to_phase,
    force_map,
    gravity_force,
    hamiltonian_field,
    kinetic_pairing,
    lagrangian_field,
    pairwise_forces,
    phase_to_config,
    potential,
    potential_energy_map,
    potential_map,
    total_energy,
    total_momentum,
    two_body_energy,
    two_body_field,
)

CIRCULAR = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0]


@pytest.fixture
def unit():
    return GravityParams()


class TestParams:
    """Tests for GravityParams and the state types."""

    def test_defaults(self, unit):
        assert (unit.G, unit.m1, unit.m2) == (1.0, 1.0, 1.0)
        assert unit.rho_min == 1e-9

    def test_zero_gravity_allowed(self):
        assert GravityParams(G=0.0).G == 0.0

    @pytest.mark.parametrize("kwargs", [{"G": -1.0}, {"m1": 0.0}, {"m2": -2.0}, {"rho_min": 0.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ContractError):
            GravityParams(**kwargs)

    def test_state_on_source(self):
        with pytest.raises(SingularityError):
            ConfigState.of([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        with pytest.raises(SingularityError):
            PhaseState.of([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])

    def test_state_dimension(self):
        with pytest.raises(ContractError):
            ConfigState.of([1.0, 0.0], [1.0, 0.0])

    def test_flat_layout(self):
        cs = ConfigState.from_flat(CIRCULAR)
        assert cs.r.tolist() == [1.0, 0.0, 0.0]
        assert cs.v.tolist() == [0.0, 1.0, 0.0]
        assert cs.flat().tolist() == CIRCULAR


class TestPotentialAndForce:
    """Tests for the potential and the force law."""

    def test_unit_values(self, unit):
        assert potential(unit, [1.0, 0.0, 0.0]) == 1.0
        assert gravity_force(unit, [1.0, 0.0, 0.0]).tolist() == [-1.0, 0.0, 0.0]

    def test_maps_match_closed_forms(self, unit, rng):
        for _ in range(10):
            r = rng.standard_normal(3) + np.array([2.0, 0.0, 0.0])
            assert evaluate(potential_map(unit), r)[0] == pytest.approx(potential(unit, r), rel=1e-14)
            np.testing.assert_allclose(evaluate_array(force_map(unit), r), gravity_force(unit, r).coords, rtol=1e-13)

    def test_inverse_square(self):
        gp = GravityParams(G=2.0, m1=3.0, m2=0.5)
        near = np.linalg.norm(gravity_force(gp, [0.0, 1.0, 1.0]).coords)
        far = np.linalg.norm(gravity_force(gp, [0.0, 2.0, 2.0]).coords)
        assert near / far == pytest.approx(4.0, rel=1e-12)

    def test_potential_decays_to_zero(self, unit):
        values = [potential(unit, [d, 0.0, 0.0]) for d in (10.0, 100.0, 1000.0)]
        assert values == pytest.approx([0.1, 0.01, 0.001], rel=1e-12)
        assert values[0] > values[1] > values[2] > 0.0

    def test_force_is_minus_energy_gradient(self, rng):
        gp = GravityParams(G=1.5, m1=2.0, m2=0.7)
        for _ in range(10):
            r = rng.uniform(0.5, 2.0, size=3) * rng.choice([-1.0, 1.0], size=3)
            grad = jacobian(potential_energy_map(gp), r)[0]
            np.testing.assert_allclose(-grad, evaluate_array(force_map(gp), r), atol=1e-10)

    def test_singularity(self, unit):
        with pytest.raises(SingularityError):
            potential(unit, [0.0, 0.0, 0.0])
        with pytest.raises(SingularityError):
            gravity_force(unit, [1e-12, 0.0, 0.0])
        with pytest.raises(DomainError):
            evaluate(force_map(unit), [0.0, 0.0, 0.0])


class TestEquationsOfMotion:
    """Tests for the Lagrangian and Hamiltonian fields."""

    def test_lagrangian_direction(self, unit):
        d = lagrangian_field(unit).direction(CIRCULAR)
        assert d.tolist() == [0.0, 1.0, 0.0, -1.0, 0.0, 0.0]

    def test_hamiltonian_direction(self):
        gp = GravityParams(m2=2.0)
        d = hamiltonian_field(gp).direction([1.0, 0.0, 0.0, 0.0, 2.0, 0.0])
        assert d.tolist() == [0.0, 1.0, 0.0, -2.0, 0.0, 0.0]

    def test_lagrangian_field_is_second_order(self, unit, rng):
        X = lagrangian_field(unit)
        for _ in range(5):
            state = np.concatenate([rng.uniform(1.0, 2.0, 3), rng.standard_normal(3)])
            assert flip_defect(X, state) == 0.0

    def test_fields_refuse_the_source(self, unit):
        with pytest.raises(DomainError):
            lagrangian_field(unit).direction([0.0, 0.0, 0.0, 1.0, 0.0, 0.0])

    def test_legendre_relates_fields(self, rng):
        gp = GravityParams(m2=2.0)
        samples = [np.concatenate([rng.uniform(0.5, 2.0, 3), rng.standard_normal(3)]) for _ in range(10)]
        residual = check_f_related(config_to_phase(gp.m2), lagrangian_field(gp), hamiltonian_field(gp), samples)
        assert residual <= 1e-12

    def test_phase_and_config_maps_are_inverse(self):
        state = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        there = evaluate_array(config_to_phase(4.0), state)
        assert there.tolist() == [1.0, 2.0, 3.0, 16.0, 20.0, 24.0]
        assert evaluate_array(phase_to_config(4.0), there).tolist() == state.tolist()
        with pytest.raises(ContractError):
            phase_to_config(0.0)


class TestNewtonsLaws:
    """Tests for inertia, F = m a and action-reaction."""

    def test_inertia_without_gravity(self):
        X = lagrangian_field(GravityParams(G=0.0))
        tr = integrate_rk4(X, [1.0, 2.0, 3.0, 0.5, -0.25, 1.0], 2.0, 0.01)
        expected = np.array([1.0, 2.0, 3.0]) + 2.0 * np.array([0.5, -0.25, 1.0])
        np.testing.assert_allclose(tr.final_state.coords[:3], expected, atol=1e-9)
        np.testing.assert_allclose(tr.final_state.coords[3:], [0.5, -0.25, 1.0], atol=1e-12)

    def test_force_is_mass_times_acceleration(self, rng):
        gp = GravityParams(G=1.0, m1=3.0, m2=2.5)
        X = lagrangian_field(gp)
        for _ in range(10):
            state = np.concatenate([rng.uniform(0.5, 2.0, 3), rng.standard_normal(3)])
            accel = X.direction(state)[3:]
            np.testing.assert_allclose(gp.m2 * accel, gravity_force(gp, state[:3]).coords, rtol=1e-12)

    def test_action_reaction(self, rng):
        for _ in range(10):
            r1, r2 = rng.standard_normal((2, 3))
            f12, f21 = pairwise_forces(1.0, 2.0, 3.0, r1, r2)
            assert np.linalg.norm(f12.coords + f21.coords) <= 1e-9

    def test_two_body_accelerations_balance(self, rng):
        m1, m2 = 2.0, 0.5
        X = two_body_field(1.0, m1, m2)
        state = rng.standard_normal(12)
        d = X.direction(state)
        np.testing.assert_allclose(m1 * d[3:6] + m2 * d[9:12], 0.0, atol=1e-9)

    def test_pairwise_forces_coincident(self):
        with pytest.raises(SingularityError):
            pairwise_forces(1.0, 1.0, 1.0, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0])


class TestDiagnostics:
    """Tests for energy, momentum and the kinetic pairing."""

    def test_circular_values(self, unit):
        cs = ConfigState.from_flat(CIRCULAR)
        ps = PhaseState.of([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        assert kinetic_pairing(ps, cs, 1.0) == 0.5
        assert total_energy(unit, cs) == -0.5
        assert angular_momentum(cs, 1.0).tolist() == [0.0, 0.0, 1.0]

    def test_pairing_needs_matching_momentum(self):
        cs = ConfigState.from_flat(CIRCULAR)
        with pytest.raises(ContractError):
            kinetic_pairing(PhaseState.of([1.0, 0.0, 0.0], [0.0, 2.0, 0.0]), cs, 1.0)
        with pytest.raises(ContractError):
            kinetic_pairing(PhaseState.of([2.0, 0.0, 0.0], [0.0, 1.0, 0.0]), cs, 1.0)

    def test_circular_orbit_closes(self, unit):
        tr = integrate_rk4(lagrangian_field(unit), CIRCULAR, 2 * math.pi, 1e-3)
        np.testing.assert_allclose(tr.final_state.coords, CIRCULAR, atol=1e-8)
        energies = [total_energy(unit, ConfigState.from_flat(s)) for s in tr.states[::100]]
        assert max(energies) - min(energies) <= 1e-9

    def test_elliptic_orbit_conserves_invariants(self, unit):
        start = [1.0, 0.0, 0.0, 0.0, 0.8, 0.0]
        tr = integrate_rk4(lagrangian_field(unit), start, 4.0, 1e-3)
        first, last = ConfigState.from_flat(start), ConfigState.from_flat(tr.states[-1])
        assert abs(total_energy(unit, last) - total_energy(unit, first)) <= 1e-8
        lz = angular_momentum(last, 1.0).coords - angular_momentum(first, 1.0).coords
        assert np.linalg.norm(lz) <= 1e-8

    def test_two_body_conservation(self):
        G, m1, m2 = 1.0, 1.0, 1.0
        start = [-0.5, 0.0, 0.0, 0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0]
        tr = integrate_rk4(two_body_field(G, m1, m2), start, 1.0, 1e-3)
        drift = total_momentum(m1, m2, tr.states[-1]).coords - total_momentum(m1, m2, start).coords
        assert np.linalg.norm(drift) <= 1e-12
        assert two_body_energy(G, m1, m2, tr.states[-1]) == pytest.approx(two_body_energy(G, m1, m2, start), abs=1e-8)

    def test_heavy_primary_matches_one_body(self, unit):
        start = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]
        pair = integrate_rk4(two_body_field(1.0, 1.0, 1e-6), start, 2 * math.pi, 1e-3)
        single = integrate_rk4(lagrangian_field(unit), CIRCULAR, 2 * math.pi, 1e-3)
        relative = np.hstack([pair.states[:, 6:9] - pair.states[:, 0:3], pair.states[:, 9:12] - pair.states[:, 3:6]])
        assert relative.shape == single.states.shape
        assert np.max(np.abs(relative - single.states)) <= 1e-3

    def test_two_body_state_size(self):
        with pytest.raises(ContractError):
            total_momentum(1.0, 1.0, np.zeros(6))
