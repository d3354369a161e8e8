import math

import numpy as np
import pytest

from backflow import divergences as dv
from backflow.states import (
    BipartiteState,
    QuantumChannel,
    apply_channel,
    bloch_vector,
    depolarizing_qubit,
    identity_channel,
    is_density,
    make_rng,
    pure_state,
    purity,
    qubit_from_bloch,
    random_cptp,
    random_density,
    thermal_oscillator,
    validate_density,
)


class TestPureState:
    def test_up(self):
        np.testing.assert_array_equal(pure_state([1, 0]), np.diag([1, 0]))

    def test_plus(self):
        np.testing.assert_allclose(pure_state([1, 1]), np.full((2, 2), 0.5), atol=1e-16)

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            pure_state([0, 0])

    def test_purity_one(self, rng):
        for dim in (2, 3, 7):
            psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            rho = pure_state(psi)
            assert abs(purity(rho) - 1) <= 1e-12
            assert np.linalg.matrix_rank(rho, tol=1e-10) == 1


class TestBloch:
    def test_center(self):
        np.testing.assert_allclose(qubit_from_bloch([0, 0, 0]), np.eye(2) / 2)

    def test_north(self):
        np.testing.assert_allclose(qubit_from_bloch([0, 0, 1]), np.diag([1, 0]))

    def test_outside_ball(self):
        with pytest.raises(ValueError):
            qubit_from_bloch([0, 0.8, 0.8])

    def test_antipodal_distance(self, rng):
        r = rng.standard_normal(3)
        r /= np.linalg.norm(r)
        assert dv.trace_distance(qubit_from_bloch(r), qubit_from_bloch(-r)) == pytest.approx(1.0, abs=1e-12)

    def test_distance_is_half_bloch_separation(self, rng):
        r1, r2 = (x / (1.5 * np.linalg.norm(x)) for x in rng.standard_normal((2, 3)))
        d = dv.trace_distance(qubit_from_bloch(r1), qubit_from_bloch(r2))
        assert d == pytest.approx(np.linalg.norm(r1 - r2) / 2, abs=1e-12)

    def test_round_trip(self):
        r = np.array([0.1, -0.3, 0.5])
        np.testing.assert_allclose(bloch_vector(qubit_from_bloch(r)), r, atol=1e-15)


class TestThermal:
    def test_zero_temperature(self):
        rho = thermal_oscillator(700.0, 5)
        np.testing.assert_allclose(rho, np.diag([1.0, 0, 0, 0, 0]), atol=1e-300)

    def test_ground_population(self):
        # geometric series: p0 = 1 - exp(-beta omega) in the untruncated limit
        rho = thermal_oscillator(1.0, 60)
        assert rho[0, 0].real == pytest.approx(1 - math.exp(-1), abs=1e-15)

    def test_monotone(self):
        p = np.diag(thermal_oscillator(0.3, 20)).real
        assert np.all(np.diff(p) < 0)

    @pytest.mark.parametrize("beta_omega,n", [(1.0, 30), (0.5, 40), (2.0, 10)])
    def test_truncation_tail(self, beta_omega, n):
        untruncated = (1 - math.exp(-beta_omega)) * np.exp(-beta_omega * np.arange(n))
        tail = 1 - untruncated.sum()
        assert tail <= math.exp(-beta_omega * n) / (1 - math.exp(-beta_omega)) + 1e-15

    def test_valid(self):
        assert is_density(thermal_oscillator(1.0, 30))

    def test_small_truncation(self):
        with pytest.raises(ValueError):
            thermal_oscillator(1.0, 1)


class TestRandomDensity:
    def test_dim_one(self):
        np.testing.assert_allclose(random_density(1, 3), [[1.0]])

    def test_reproducible(self):
        np.testing.assert_array_equal(random_density(4, 12345), random_density(4, 12345))

    def test_seeds_differ(self):
        assert not np.allclose(random_density(3, 1), random_density(3, 2))

    @pytest.mark.parametrize("dim", [1, 2, 3, 4, 8])
    def test_valid(self, dim, rng):
        for _ in range(20):
            assert is_density(random_density(dim, rng))

    def test_mean_bloch_vector(self):
        rng = make_rng(7)
        mean = np.mean([bloch_vector(random_density(2, rng)) for _ in range(10_000)], axis=0)
        assert np.linalg.norm(mean) <= 0.05


class TestValidate:
    def test_clips_roundoff(self):
        rho = np.diag([1.0 + 5e-11, -5e-11])
        out = validate_density(rho)
        assert np.linalg.eigvalsh(out).min() >= 0
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-15)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            validate_density(np.diag([1.1, -0.1]))

    def test_rejects_trace(self):
        with pytest.raises(ValueError):
            validate_density(np.diag([0.7, 0.2]))


class TestChannels:
    def test_env_dim_one_is_unitary(self):
        phi = random_cptp(3, 1, 5)
        assert len(phi.kraus_operators) == 1
        u = phi.kraus_operators[0]
        np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)

    @pytest.mark.parametrize("dim,env_dim", [(2, 1), (2, 4), (3, 2), (4, 3)])
    def test_trace_preserving(self, dim, env_dim):
        phi = random_cptp(dim, env_dim, dim * 100 + env_dim)
        assert np.max(np.abs(phi.completeness() - np.eye(dim))) <= 1e-10

    def test_output_is_state(self, rng):
        for dim in (2, 3, 4):
            phi = random_cptp(dim, 3, rng)
            rho = random_density(dim, rng)
            out = apply_channel(phi, rho)
            assert is_density(out)
            assert abs(np.trace(out) - 1) <= 1e-12

    def test_identity_channel(self, rng):
        rho = random_density(3, rng)
        np.testing.assert_allclose(apply_channel(identity_channel(3), rho), rho, atol=1e-16)

    def test_depolarizing(self, rng):
        out = apply_channel(depolarizing_qubit(), random_density(2, rng))
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_channel(identity_channel(2), np.eye(3) / 3)

    def test_rejects_non_trace_preserving(self):
        with pytest.raises(ValueError):
            QuantumChannel((2 * np.eye(2),))

    def test_contracts_trace_distance(self, rng):
        for _ in range(200):
            dim = int(rng.integers(2, 5))
            phi = random_cptp(dim, int(rng.integers(1, 4)), rng)
            rho, sigma = random_density(dim, rng), random_density(dim, rng)
            before = dv.trace_distance(rho, sigma)
            after = dv.trace_distance(phi(rho), phi(sigma))
            assert after <= before + 1e-10


class TestBipartite:
    def test_marginals(self, rng):
        rs, re = random_density(2, rng), random_density(3, rng)
        state = BipartiteState(2, 3, np.kron(rs, re))
        np.testing.assert_allclose(state.system, rs, atol=1e-15)
        np.testing.assert_allclose(state.environment, re, atol=1e-15)
        np.testing.assert_allclose(state.product_of_marginals(), state.state, atol=1e-15)

    def test_shape_check(self):
        with pytest.raises(ValueError):
            BipartiteState(2, 3, np.eye(5))


def test_seed_range():
    with pytest.raises(ValueError):
        make_rng(-1)
    make_rng(2**64 - 1)
