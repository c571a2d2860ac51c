"""Attack strategies: the parity wiretap, baselines, and exact leakage.

The wiretap's defining truth table (signal state unchanged, ancilla picks up
the bit parity) is checked against hand-expanded amplitudes; everything
statistical is cross-checked against exhaustive branch enumeration.
"""

import numpy as np
import pytest

from orthoqkd.quantum import QubitId, StateVector, apply_cnot, basis_state, tensor_product
from orthoqkd.protocol import (
    cabello_ensemble,
    enumerate_round_branches,
    nonmax_ensemble,
    run_round,
)
from orthoqkd.eavesdrop import (
    ATTACK_NAMES,
    EveKnowledge,
    attack_by_name,
    double_cnot_attack,
    eve_mutual_information,
    intercept_resend_attack,
    mutual_information_bits,
    no_attack,
    perfectly_distinguishes,
)

Q1, Q2, EVE = QubitId.QUBIT1, QubitId.QUBIT2, QubitId.EVE_ANCILLA


def wiretap_pipeline(pair_state):
    """Both wiretap CNOTs applied to pair x |0>e, no measurement."""
    full = tensor_product(pair_state, basis_state((EVE,), 0))
    full = apply_cnot(full, Q1, EVE)
    return apply_cnot(full, Q2, EVE)


def mixed_decode_distribution(ensemble, attack, symbol):
    """Bob's exact decode distribution, averaged over all attack branches."""
    dist = np.zeros(ensemble.num_symbols)
    for branch in enumerate_round_branches(ensemble, attack, symbol):
        dist += branch.probability * np.array(branch.decode_probs)
    return dist


class TestEveKnowledge:
    def test_exact_singleton(self):
        knowledge = EveKnowledge.exact(3)
        assert knowledge.exact_symbol == 3
        assert knowledge.consistent_with(3)
        assert not knowledge.consistent_with(0)

    def test_partition_membership(self):
        knowledge = EveKnowledge.partition({1, 2})
        assert knowledge.consistent_with(1)
        assert not knowledge.consistent_with(3)

    def test_none_claims_nothing(self):
        assert EveKnowledge.none().consistent_with(0)

    def test_rejects_single_element_partition(self):
        with pytest.raises(ValueError, match="at least two"):
            EveKnowledge.partition({1})

    def test_labels(self):
        assert EveKnowledge.none().label() == "none"
        assert EveKnowledge.exact(2).label() == "exact:2"
        assert EveKnowledge.partition({2, 1}).label() == "partition:1,2"

    def test_equality_and_hashing(self):
        assert EveKnowledge.partition({1, 2}) == EveKnowledge.partition({2, 1})
        assert len({EveKnowledge.exact(0), EveKnowledge.exact(0)}) == 1


class TestParityTruthTable:
    """The wiretap maps signal x |0>e to signal x |parity>e, exactly."""

    @pytest.mark.parametrize("symbol,parity", [(0, 0), (1, 1), (2, 1), (3, 0)])
    def test_four_state_ensemble(self, symbol, parity):
        pair = cabello_ensemble().states[symbol]
        out = wiretap_pipeline(pair)
        expected = tensor_product(pair, basis_state((EVE,), parity))
        np.testing.assert_allclose(out.amplitudes, expected.amplitudes, atol=1e-12)

    @pytest.mark.parametrize("alpha,beta", [(np.pi / 6, np.pi / 3), (0.2, 1.3), (1.1, 0.15)])
    def test_nonmax_ensemble(self, alpha, beta):
        """Odd-parity signal flags the ancilla; even-parity leaves it alone."""
        psi, phi = nonmax_ensemble(alpha, beta).states
        out_psi = wiretap_pipeline(psi)
        np.testing.assert_allclose(
            out_psi.amplitudes,
            tensor_product(psi, basis_state((EVE,), 1)).amplitudes, atol=1e-12)
        out_phi = wiretap_pipeline(phi)
        np.testing.assert_allclose(
            out_phi.amplitudes,
            tensor_product(phi, basis_state((EVE,), 0)).amplitudes, atol=1e-12)


class TestDoubleCnotAttack:
    def test_product_symbol_read_exactly(self):
        """Symbol 0: ancilla reads 0, qubit 2 reads 0, knowledge exact."""
        branches = enumerate_round_branches(cabello_ensemble(), double_cnot_attack(), 0)
        assert len(branches) == 1
        branch = branches[0]
        assert branch.probability == pytest.approx(1.0, abs=1e-12)
        assert branch.eve_knowledge == EveKnowledge.exact(0)
        assert branch.bob_fidelity == pytest.approx(1.0, abs=1e-12)

    def test_superposition_symbol_untouched(self):
        """Symbol 2: ancilla reads 1, qubit 2 is never measured."""
        branches = enumerate_round_branches(cabello_ensemble(), double_cnot_attack(), 2)
        assert len(branches) == 1
        branch = branches[0]
        assert branch.eve_knowledge == EveKnowledge.partition({1, 2})
        encoded = cabello_ensemble().states[2]
        expected = tensor_product(encoded, basis_state((EVE,), 1))
        np.testing.assert_allclose(branch.delivered.amplitudes, expected.amplitudes,
                                   atol=1e-12)

    @pytest.mark.parametrize("alpha,beta", [(np.pi / 6, np.pi / 3), (0.3, 1.2)])
    def test_nonmax_distinguished_without_disturbance(self, alpha, beta):
        """Each signal yields a deterministic ancilla bit and exact knowledge,
        and the delivered pair equals the encoded pair exactly."""
        ensemble = nonmax_ensemble(alpha, beta)
        for symbol in range(2):
            branches = enumerate_round_branches(ensemble, double_cnot_attack(), symbol)
            assert len(branches) == 1
            branch = branches[0]
            assert branch.probability == pytest.approx(1.0, abs=1e-12)
            assert branch.eve_knowledge == EveKnowledge.exact(symbol)
            assert branch.bob_fidelity == pytest.approx(1.0, abs=1e-12)

    def test_knowledge_soundness_exhaustive(self):
        """Exact claims name Alice's symbol; partition cells contain it."""
        ensemble = cabello_ensemble()
        for symbol in range(4):
            for branch in enumerate_round_branches(ensemble, double_cnot_attack(), symbol):
                assert branch.eve_knowledge.consistent_with(symbol)
                if branch.eve_knowledge.kind == "partition":
                    cell = branch.eve_knowledge.symbols
                    assert 2 <= len(cell) < ensemble.num_symbols

    def test_undetectable(self):
        """Bob's decode distribution and fidelity match the idle channel."""
        ensemble = cabello_ensemble()
        for symbol in range(4):
            idle = mixed_decode_distribution(ensemble, no_attack(), symbol)
            tapped = mixed_decode_distribution(ensemble, double_cnot_attack(), symbol)
            np.testing.assert_allclose(tapped, idle, atol=1e-12)
            for branch in enumerate_round_branches(ensemble, double_cnot_attack(), symbol):
                assert branch.bob_fidelity == pytest.approx(1.0, abs=1e-12)


class TestNoAttack:
    def test_identity_hooks(self):
        transcript = run_round(cabello_ensemble(), no_attack(), 3,
                               np.random.default_rng(0))
        assert transcript.bob_fidelity == pytest.approx(1.0, abs=1e-12)
        assert transcript.eve_knowledge == EveKnowledge.none()

    def test_never_learns_anything(self):
        for symbol in range(4):
            for branch in enumerate_round_branches(cabello_ensemble(), no_attack(), symbol):
                assert branch.eve_knowledge == EveKnowledge.none()


class TestInterceptResend:
    def test_product_symbols_pass_clean(self):
        """|00> and |11> are computational products: measuring them is free."""
        ensemble = cabello_ensemble()
        for symbol, expected in ((0, EveKnowledge.exact(0)), (3, EveKnowledge.exact(3))):
            branches = enumerate_round_branches(ensemble, intercept_resend_attack(), symbol)
            assert len(branches) == 1
            assert branches[0].eve_knowledge == expected
            assert branches[0].bob_fidelity == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("symbol", [1, 2])
    def test_superposition_symbols_decode_half_half(self, symbol):
        dist = mixed_decode_distribution(cabello_ensemble(), intercept_resend_attack(),
                                         symbol)
        np.testing.assert_allclose(dist, [0, 0.5, 0.5, 0], atol=1e-12)

    @pytest.mark.parametrize("symbol", [1, 2])
    def test_superposition_symbols_are_disturbed(self, symbol):
        """Collapsing a superposition signal drops Bob's fidelity to one half."""
        for branch in enumerate_round_branches(cabello_ensemble(),
                                               intercept_resend_attack(), symbol):
            assert branch.bob_fidelity == pytest.approx(0.5, abs=1e-12)

    def test_rejects_two_state_ensemble(self):
        with pytest.raises(ValueError, match="cabello ensemble"):
            run_round(nonmax_ensemble(0.3, 0.6), intercept_resend_attack(), 0,
                      np.random.default_rng(0))

    def test_error_rate_over_sampled_rounds(self):
        """Uniform symbols: Bob errs on one quarter of rounds, 3 sigma bound."""
        ensemble = cabello_ensemble()
        attack = intercept_resend_attack()
        n = 4000
        rng = np.random.default_rng(77)
        errors = 0
        for _ in range(n):
            symbol = int(rng.integers(4))
            errors += run_round(ensemble, attack, symbol, rng).bob_symbol != symbol
        assert abs(errors / n - 0.25) < 3 * np.sqrt(0.25 * 0.75 / n)


class TestDetectabilityContrast:
    def test_intercept_errs_where_wiretap_does_not(self):
        ensemble = cabello_ensemble()
        for symbol in (1, 2):
            tapped = mixed_decode_distribution(ensemble, double_cnot_attack(), symbol)
            assert tapped[symbol] == pytest.approx(1.0, abs=1e-12)
            resent = mixed_decode_distribution(ensemble, intercept_resend_attack(), symbol)
            assert 1.0 - resent[symbol] > 0.4


class TestMutualInformation:
    def test_wiretap_on_four_states(self):
        """Half the rounds pin the symbol, half leave one bit: 1.5 bits."""
        assert eve_mutual_information(cabello_ensemble(), double_cnot_attack()) == \
            pytest.approx(1.5, abs=1e-12)

    def test_idle_channel_leaks_nothing(self):
        assert eve_mutual_information(cabello_ensemble(), no_attack()) == \
            pytest.approx(0.0, abs=1e-12)

    def test_wiretap_on_nonmax_pair(self):
        """A uniform binary symbol read with certainty is exactly one bit."""
        assert eve_mutual_information(nonmax_ensemble(np.pi / 6, np.pi / 3),
                                      double_cnot_attack()) == pytest.approx(1.0, abs=1e-12)

    def test_intercept_resend_leakage(self):
        # guesses on readings 10/01 cost one bit on half the rounds
        assert eve_mutual_information(cabello_ensemble(), intercept_resend_attack()) == \
            pytest.approx(1.5, abs=1e-12)

    def test_plug_in_estimator_on_counts(self):
        joint = {("a", "x"): 50, ("b", "y"): 50}
        assert mutual_information_bits(joint) == pytest.approx(1.0, abs=1e-12)
        flat = {("a", "x"): 25, ("a", "y"): 25, ("b", "x"): 25, ("b", "y"): 25}
        assert mutual_information_bits(flat) == pytest.approx(0.0, abs=1e-12)

    def test_rejects_empty_joint(self):
        with pytest.raises(ValueError, match="no mass"):
            mutual_information_bits({})


class TestDistinguishability:
    def test_nonmax_pair_is_perfectly_distinguished(self):
        assert perfectly_distinguishes(nonmax_ensemble(np.pi / 6, np.pi / 3),
                                       double_cnot_attack())

    def test_four_states_are_only_partitioned(self):
        assert not perfectly_distinguishes(cabello_ensemble(), double_cnot_attack())

    def test_idle_channel_distinguishes_nothing(self):
        assert not perfectly_distinguishes(nonmax_ensemble(0.5, 1.0), no_attack())


class TestRegistry:
    def test_names_round_trip(self):
        for name in ATTACK_NAMES:
            assert attack_by_name(name).name == name

    def test_unknown_name_is_rejected(self):
        with pytest.raises(ValueError, match="unknown attack 'bogus'"):
            attack_by_name("bogus")
