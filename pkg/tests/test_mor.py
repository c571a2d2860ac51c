"""No-cloning criterion audit: verdicts, witnesses, and the attack contrast.

Witness oracles are the closed forms of the diagonal reduced matrices:
tr(rho1_a rho1_b) = cos^2(a)cos^2(b) + sin^2(a)sin^2(b) and
tr(rho2_a rho2_b) = sin^2(a)cos^2(b) + cos^2(a)sin^2(b).
"""

import numpy as np
import pytest

from orthoqkd.quantum import QubitId, StateVector, basis_state
from orthoqkd.protocol import nonmax_ensemble
from orthoqkd.eavesdrop import double_cnot_attack, perfectly_distinguishes
from orthoqkd.mor import MorReport, make_nonmax_pair, mor_check

Q1, Q2 = QubitId.QUBIT1, QubitId.QUBIT2
S2 = 1.0 / np.sqrt(2.0)


def angle_ladder():
    """Nine-step angle ladder with the maximally entangled point removed."""
    return [k * np.pi / 20 for k in range(1, 10) if k != 5]


def admitted_pairs(angles):
    return [(a, b) for a in angles for b in angles if abs(a - b) > 1e-9]


class TestMakeNonmaxPair:
    def test_reference_angles(self):
        psi, phi = make_nonmax_pair(np.pi / 6, np.pi / 3)
        np.testing.assert_allclose(psi.amplitudes, [0, np.sqrt(3) / 2, 0.5, 0], atol=1e-15)
        np.testing.assert_allclose(phi.amplitudes, [0.5, 0, 0, np.sqrt(3) / 2], atol=1e-15)

    def test_rejects_quarter_pi(self):
        with pytest.raises(ValueError, match="alpha != pi/4"):
            make_nonmax_pair(np.pi / 4, np.pi / 3)

    def test_rejects_equal_angles(self):
        with pytest.raises(ValueError, match="alpha != beta"):
            make_nonmax_pair(0.3, 0.3)

    @pytest.mark.parametrize("alpha,beta", admitted_pairs(angle_ladder())[::7])
    def test_pairs_exactly_orthogonal(self, alpha, beta):
        psi, phi = make_nonmax_pair(alpha, beta)
        assert np.vdot(psi.amplitudes, phi.amplitudes) == 0


class TestMorCheckVerdicts:
    def test_reference_pair(self):
        """pi/6 vs pi/3: witnesses 3/8, 1/2, 5/8; criterion satisfied."""
        report = mor_check(*make_nonmax_pair(np.pi / 6, np.pi / 3))
        assert not report.rho1_orthogonal
        assert not report.rho1_identical
        assert not report.rho2_orthogonal
        assert report.criterion_satisfied
        assert report.tr_rho1_product == pytest.approx(3 / 8, abs=1e-10)
        assert report.rho1_distance == pytest.approx(0.5, abs=1e-10)
        assert report.tr_rho2_product == pytest.approx(5 / 8, abs=1e-10)

    def test_orthogonal_product_states_fail_the_criterion(self):
        report = mor_check(basis_state((Q1, Q2), 0b00), basis_state((Q1, Q2), 0b11))
        assert report.rho1_orthogonal
        assert report.tr_rho1_product == pytest.approx(0.0, abs=1e-12)
        assert not report.criterion_satisfied

    def test_identical_reductions_fail_the_criterion(self):
        """Both maximally entangled signal states reduce to I/2 on qubit 1."""
        a = StateVector((Q1, Q2), np.array([0, S2, S2, 0], dtype=complex))
        b = StateVector((Q1, Q2), np.array([0, -S2, S2, 0], dtype=complex))
        report = mor_check(a, b)
        assert report.rho1_identical
        assert report.rho1_distance == pytest.approx(0.0, abs=1e-12)
        assert not report.criterion_satisfied

    def test_rejects_non_orthogonal_inputs(self):
        psi_a, _ = make_nonmax_pair(0.3, 0.9)
        psi_b, _ = make_nonmax_pair(0.4, 0.9)
        with pytest.raises(ValueError, match=r"not orthogonal: \|<a\|b>\|"):
            mor_check(psi_a, psi_b)

    def test_rejects_wrong_subsystems(self):
        odd = basis_state((Q1, QubitId.EVE_ANCILLA), 0)
        with pytest.raises(ValueError, match="must be over"):
            mor_check(odd, odd)

    def test_witnesses_property_mirrors_fields(self):
        report = mor_check(*make_nonmax_pair(0.3, 0.9))
        assert report.witnesses == {
            "tr_rho1_product": report.tr_rho1_product,
            "rho1_distance": report.rho1_distance,
            "tr_rho2_product": report.tr_rho2_product,
        }


class TestMorCheckAcrossGrid:
    def test_criterion_holds_on_every_admitted_pair(self):
        for alpha, beta in admitted_pairs(angle_ladder()):
            report = mor_check(*make_nonmax_pair(alpha, beta))
            assert report.criterion_satisfied, (alpha, beta)

    def test_witnesses_match_closed_forms(self):
        for alpha, beta in admitted_pairs(angle_ladder()):
            report = mor_check(*make_nonmax_pair(alpha, beta))
            ca, sa = np.cos(alpha) ** 2, np.sin(alpha) ** 2
            cb, sb = np.cos(beta) ** 2, np.sin(beta) ** 2
            assert report.tr_rho1_product == pytest.approx(ca * cb + sa * sb, abs=1e-10)
            assert report.tr_rho2_product == pytest.approx(sa * cb + ca * sb, abs=1e-10)

    def test_symmetry(self):
        for alpha, beta in admitted_pairs(angle_ladder())[::5]:
            psi, phi = make_nonmax_pair(alpha, beta)
            forward, backward = mor_check(psi, phi), mor_check(phi, psi)
            assert forward == backward

    def test_uncopyable_yet_attackable(self):
        """The criterion forbids cloning, yet the parity wiretap still reads
        every admitted pair with certainty and zero disturbance."""
        for alpha, beta in admitted_pairs(angle_ladder())[::3]:
            assert mor_check(*make_nonmax_pair(alpha, beta)).criterion_satisfied
            assert perfectly_distinguishes(nonmax_ensemble(alpha, beta),
                                           double_cnot_attack())


def test_report_is_a_plain_value():
    report = mor_check(*make_nonmax_pair(0.5, 1.0))
    assert isinstance(report, MorReport)
    assert report == mor_check(*make_nonmax_pair(0.5, 1.0))
