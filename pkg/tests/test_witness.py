import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incompatlab.errors import DomainError, NumericError
from incompatlab.feasibility import FeasStatus
from incompatlab.jointmeas import jm_feasible
from incompatlab.matcore import partial_trace, tensor, trace_norm
from incompatlab.observables import clifford_generators, pauli, unsharp_povm
from incompatlab.witness import (boundary_eta, concavity_bound, correlation,
                                 maximally_entangled, omega_factors,
                                 optimize_bob, quantum_optimum,
                                 sign_pattern_probs, sign_strings, sos_gap,
                                 witness_value)
from conftest import random_density, random_dichotomic

SX, SY, SZ = pauli("x"), pauli("y"), pauli("z")
PAULIS = [SX, SY, SZ]


class TestSignStrings:
    def test_n2(self):
        table = sign_strings(2)
        assert table.rows.tolist() == [[0, 0], [0, 1]]
        assert table.signs().tolist() == [[1.0, 1.0], [1.0, -1.0]]

    def test_n3_pattern_set(self):
        table = sign_strings(3)
        patterns = {tuple(row) for row in table.signs().astype(int).tolist()}
        assert patterns == {(1, 1, 1), (1, -1, 1), (1, 1, -1), (1, -1, -1)}

    @pytest.mark.parametrize("n", range(2, 8))
    def test_column_balance(self, n):
        table = sign_strings(n)
        table.validate()
        # every column beyond the first has equal counts of 0 and 1
        for x in range(1, n):
            assert table.rows[:, x].sum() == 2 ** (n - 2)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            sign_strings(1)
        with pytest.raises(DomainError):
            sign_strings(10)


class TestCorrelation:
    def test_zz_on_max_entangled(self):
        assert correlation(maximally_entangled(2), SZ, SZ) == pytest.approx(1.0)

    def test_yy_on_max_entangled(self):
        assert correlation(maximally_entangled(2), SY, SY) == pytest.approx(-1.0)

    def test_product_state_uncorrelated(self):
        ket0 = np.diag([1.0, 0.0]).astype(complex)
        rho = tensor(ket0, ket0)
        assert correlation(rho, SX, SZ) == pytest.approx(0.0)

    def test_bounded(self, rng):
        rho = random_density(rng, 4)
        for _ in range(10):
            val = correlation(rho, random_dichotomic(rng, 2),
                              random_dichotomic(rng, 2))
            assert -1.0 - 1e-9 <= val <= 1.0 + 1e-9

    def test_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            correlation(np.eye(4, dtype=complex), SZ, SZ)


class TestWitnessValue:
    def test_n3_sharp_optimum(self):
        rho = maximally_entangled(2)
        bob, _ = optimize_bob(rho, PAULIS, eta=1.0)
        report = witness_value(rho, PAULIS, bob, delta=0.0, eta=1.0)
        assert report.value == pytest.approx(4 * np.sqrt(3), abs=1e-9)
        assert report.violation
        assert report.bound_local == 4.0
        assert sum(report.per_y_terms) == pytest.approx(report.value, abs=1e-9)

    def test_n2_sharp_optimum(self):
        alice = clifford_generators(2)
        rho = maximally_entangled(2)
        bob, _ = optimize_bob(rho, alice, eta=1.0)
        report = witness_value(rho, alice, bob, delta=0.0, eta=1.0)
        assert report.value == pytest.approx(2 * np.sqrt(2), abs=1e-9)

    def test_maximally_mixed_gives_zero(self):
        rho = np.eye(4, dtype=complex) / 4.0
        bob = [SZ, SZ]
        report = witness_value(rho, clifford_generators(2), bob, delta=0.0, eta=1.0)
        assert report.value == pytest.approx(0.0, abs=1e-12)
        assert not report.violation

    def test_per_y_delta_list(self):
        rho = maximally_entangled(2)
        bob, _ = optimize_bob(rho, PAULIS)
        report = witness_value(rho, PAULIS, bob, delta=[0.1, 0.0, 0.0, 0.0], eta=1.0)
        assert len(report.delta_used) == 4
        assert report.delta_used[0] == 0.1

    def test_bob_count_checked(self):
        rho = maximally_entangled(2)
        with pytest.raises(DomainError):
            witness_value(rho, PAULIS, [SZ, SZ], delta=0.0)

    def test_eta_scaled_alice(self):
        eta = 0.5
        rho = maximally_entangled(2)
        bob, _ = optimize_bob(rho, PAULIS, eta=eta)
        report = witness_value(rho, [eta * a for a in PAULIS], bob, delta=0.0)
        assert report.value == pytest.approx(eta * 4 * np.sqrt(3), abs=1e-9)
        # eta inferred from the scaled operators
        assert report.bound_quantum == pytest.approx(
            quantum_optimum(3, eta), abs=1e-9)


class TestOptimizeBob:
    @pytest.mark.parametrize("n", (2, 3, 4, 5))
    def test_clifford_optimum(self, n):
        alice = clifford_generators(n)
        rho = maximally_entangled(alice[0].shape[0])
        for eta in (0.5, 1.0):
            _, value = optimize_bob(rho, alice, eta=eta)
            assert value == pytest.approx(quantum_optimum(n, eta), rel=1e-10)

    def test_n5_value_from_anticommutation(self):
        # derived oracle: S_y^2 = 5 I for anticommuting generators, so each
        # |chi_y| has trace norm sqrt(5) and the 16 patterns sum to 16 sqrt(5)
        alice = clifford_generators(5)
        rho = maximally_entangled(4)
        table = sign_strings(5)
        for row in table.signs():
            s = sum(sgn * a for sgn, a in zip(row, alice))
            assert np.abs(s @ s - 5 * np.eye(4)).max() <= 1e-12
            chi = partial_trace(tensor(s, np.eye(4)) @ rho, 4, 4, keep="B")
            assert trace_norm((chi + chi.conj().T) / 2) == pytest.approx(
                np.sqrt(5), abs=1e-9)
        _, value = optimize_bob(rho, alice, eta=1.0)
        assert value == pytest.approx(16 * np.sqrt(5), rel=1e-10)

    def test_maximally_mixed_zero(self):
        rho = np.eye(4, dtype=complex) / 4.0
        _, value = optimize_bob(rho, clifford_generators(2), eta=1.0)
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_returned_bob_is_dichotomic(self):
        rho = maximally_entangled(2)
        bobs, _ = optimize_bob(rho, PAULIS)
        for b in bobs:
            assert np.abs(b @ b - np.eye(2)).max() <= 1e-10

    def test_optimizer_matches_witness_value(self, rng):
        rho = random_density(rng, 4)
        alice = [random_dichotomic(rng, 2) for _ in range(2)]
        bob, value = optimize_bob(rho, alice, eta=1.0)
        report = witness_value(rho, alice, bob, delta=0.0, eta=1.0)
        assert value == pytest.approx(report.value, abs=1e-9)

    def test_per_pattern_optimality(self, rng):
        # no random dichotomic Bob beats the trace-norm bound per pattern
        rho = random_density(rng, 4)
        alice = [random_dichotomic(rng, 2) for _ in range(2)]
        table = sign_strings(2)
        for row in table.signs():
            s = sum(sgn * a for sgn, a in zip(row, alice))
            chi = partial_trace(tensor(s, np.eye(2)) @ rho, 2, 2, keep="B")
            chi = (chi + chi.conj().T) / 2
            cap = trace_norm(chi)
            for _ in range(50):
                b = random_dichotomic(rng, 2)
                assert abs(np.trace(chi @ b).real) <= cap + 1e-9


class TestOmegaFactors:
    def test_paulis(self):
        assert omega_factors(PAULIS) == pytest.approx([np.sqrt(3)] * 4)

    def test_repeated_observable(self):
        assert omega_factors([SZ, SZ]) == pytest.approx([2.0, 0.0])

    def test_clifford4_all_two(self):
        assert omega_factors(clifford_generators(4)) == pytest.approx([2.0] * 8)


def reference_certificate_gap(rho, alice, bob):
    """Independent construction of the certificate operator expectation."""
    n = len(alice)
    table = sign_strings(n)
    d_a, d_b = alice[0].shape[0], bob[0].shape[0]
    gamma = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    for row, b in zip(table.signs(), bob):
        s = sum(sgn * a for sgn, a in zip(row, alice))
        om = float(np.abs(np.linalg.eigvalsh(s)).max())
        if om <= 1e-12:
            continue
        corr = np.trace(rho @ np.kron(s, b)).real
        flip = 1.0 if corr >= 0 else -1.0
        ell = np.kron(s, np.eye(d_b)) / om - np.kron(np.eye(d_a), flip * b)
        gamma += (om / 2.0) * (ell.conj().T @ ell)
        gamma += np.kron(om * np.eye(d_a) / 2.0 - s @ s / (2.0 * om), np.eye(d_b))
    return np.trace(gamma @ rho).real, gamma


class TestSosGap:
    def test_optimum_configuration_gap_zero(self):
        rho = maximally_entangled(2)
        bob, _ = optimize_bob(rho, PAULIS)
        assert abs(sos_gap(rho, PAULIS, bob)) <= 1e-8

    def test_maximally_mixed_full_gap(self):
        rho = np.eye(4, dtype=complex) / 4.0
        bob = [SZ] * 4
        assert sos_gap(rho, PAULIS, bob) == pytest.approx(4 * np.sqrt(3), abs=1e-9)

    def test_random_instances_nonnegative_and_bounded(self, rng):
        for _ in range(40):
            d = 2 if rng.integers(2) else 4
            n = 2
            alice = [random_dichotomic(rng, d) for _ in range(n)]
            bob = [random_dichotomic(rng, d) for _ in range(2 ** (n - 1))]
            rho = random_density(rng, d * d)
            gap = sos_gap(rho, alice, bob)
            assert gap >= -1e-8
            report = witness_value(rho, alice, bob, delta=0.0, eta=1.0)
            assert report.value <= sum(omega_factors(alice)) + 1e-8

    def test_matches_independent_operator_form(self, rng):
        for _ in range(20):
            alice = [random_dichotomic(rng, 2) for _ in range(2)]
            bob = [random_dichotomic(rng, 2) for _ in range(2)]
            rho = random_density(rng, 4)
            gap = sos_gap(rho, alice, bob)
            ref, gamma = reference_certificate_gap(rho, alice, bob)
            assert gap == pytest.approx(ref, abs=1e-8)
            # the certificate operator is PSD
            assert np.linalg.eigvalsh((gamma + gamma.conj().T) / 2).min() >= -1e-9

    def test_degenerate_omega_skipped(self):
        rho = maximally_entangled(2)
        bob = [SZ, SX]
        gap = sos_gap(rho, [SZ, SZ], bob)  # omega = (2, 0)
        assert np.isfinite(gap)
        assert gap >= -1e-9


class TestBounds:
    def test_concavity_equal_entries(self):
        assert concavity_bound([np.sqrt(3)] * 4) == pytest.approx(4 * np.sqrt(3))

    def test_concavity_pair(self):
        assert concavity_bound([2.0, 0.0]) == pytest.approx(2 * np.sqrt(2))
        assert concavity_bound([2.0, 0.0]) >= 2.0

    def test_concavity_arithmetic(self):
        assert concavity_bound([1.0, 1.0, 1.0, 0.0]) == pytest.approx(2 * np.sqrt(3))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=1, max_size=8))
    def test_concavity_dominates_sum(self, omegas):
        assert concavity_bound(omegas) >= sum(omegas) - 1e-9

    def test_concavity_rejects_negative(self):
        with pytest.raises(DomainError):
            concavity_bound([1.0, -0.5])

    def test_quantum_optimum_values(self):
        assert quantum_optimum(3, 1.0) == pytest.approx(4 * np.sqrt(3))
        assert quantum_optimum(2, 1.0) == pytest.approx(2 * np.sqrt(2))
        assert quantum_optimum(3, 1 / np.sqrt(3)) == pytest.approx(4.0)

    def test_chain_of_bounds_at_anticommuting_alice(self):
        for n in (2, 3, 4):
            alice = clifford_generators(n)
            rho = maximally_entangled(alice[0].shape[0])
            bob, value = optimize_bob(rho, alice, eta=1.0)
            omegas = omega_factors(alice)
            assert value <= sum(omegas) + 1e-8
            assert sum(omegas) == pytest.approx(concavity_bound(omegas), abs=1e-8)
            assert concavity_bound(omegas) == pytest.approx(
                quantum_optimum(n, 1.0), abs=1e-8)

    @pytest.mark.parametrize("n", (2, 3, 4, 5))
    def test_boundary_eta_is_inverse_sqrt(self, n):
        alice = clifford_generators(n)
        rho = maximally_entangled(alice[0].shape[0])
        assert boundary_eta(rho, alice) == pytest.approx(n ** -0.5, abs=1e-6)


class TestSignPatternProbs:
    def test_certificate_normalization(self, rng):
        verdict = jm_feasible([unsharp_povm(SX, 0.5), unsharp_povm(SZ, 0.5)])
        assert verdict.status is FeasStatus.FEASIBLE
        for _ in range(5):
            state = random_density(rng, 2)
            probs = sign_pattern_probs(verdict.certificate, state)
            assert probs.sum() == pytest.approx(1.0, abs=1e-9)
            assert (probs >= -1e-9).all()

    def test_triple_certificate(self):
        verdict = jm_feasible([unsharp_povm(a, 0.5) for a in PAULIS])
        probs = sign_pattern_probs(verdict.certificate, np.eye(2) / 2)
        assert probs.shape == (4,)
        assert probs.sum() == pytest.approx(1.0, abs=1e-9)
