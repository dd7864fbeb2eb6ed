import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mflab.model import (ChainSpec, MajoranaLabel, PauliString, ProtocolSchedule,
                         angles_from_schedule, build_trivial_testbed, identity_string,
                         majorana_pair_string, majorana_probe, majorana_to_pauli,
                         pauli_product, single_site)

SINGLES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense(p: PauliString) -> np.ndarray:
    out = np.array([[p.phase]], dtype=complex)
    for c in p.letters:
        out = np.kron(out, SINGLES[c])
    return out


letters_st = st.lists(st.sampled_from("IXYZ"), min_size=1, max_size=4)
phase_st = st.integers(min_value=0, max_value=3)


@st.composite
def pauli_pairs(draw, count=2):
    letters = draw(st.lists(st.tuples(*[st.sampled_from("IXYZ")] * count),
                            min_size=1, max_size=4))
    return [PauliString(draw(phase_st), tuple(t[i] for t in letters))
            for i in range(count)]


class TestPauliString:
    def test_single_site_products(self):
        # X.Y = iZ and the rest of the one-site table, against dense matrices
        for a in "IXYZ":
            for b in "IXYZ":
                got = pauli_product(PauliString(0, (a,)), PauliString(0, (b,)))
                assert np.allclose(dense(got), SINGLES[a] @ SINGLES[b])

    def test_xy_is_iz(self):
        p = pauli_product(PauliString(0, ("X",)), PauliString(0, ("Y",)))
        assert p == PauliString(1, ("Z",))

    @given(pauli_pairs(count=2))
    @settings(max_examples=60, deadline=None)
    def test_product_matches_dense(self, pair):
        a, b = pair
        assert np.allclose(dense(pauli_product(a, b)), dense(a) @ dense(b))

    @given(pauli_pairs(count=3))
    @settings(max_examples=60, deadline=None)
    def test_associativity(self, triple):
        a, b, c = triple
        left = pauli_product(pauli_product(a, b), c)
        right = pauli_product(a, pauli_product(b, c))
        assert left == right

    @given(letters_st)
    @settings(max_examples=30, deadline=None)
    def test_hermitian_square_is_identity(self, letters):
        p = PauliString(0, tuple(letters))
        assert pauli_product(p, p) == identity_string(len(letters))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pauli_product(PauliString(0, ("X",)), PauliString(0, ("X", "X")))

    def test_phase_properties(self):
        assert PauliString(1, ("Z",)).phase == 1j
        assert not PauliString(1, ("Z",)).is_hermitian
        assert PauliString(2, ("Z",)).is_hermitian
        assert (-PauliString(0, ("X",))).phase == -1


class TestMajoranaStrings:
    def test_gamma_l1(self):
        assert majorana_to_pauli(MajoranaLabel(1, "L"), 3) == PauliString(0, ("X", "I", "I"))

    def test_gamma_l4(self):
        # (-Z1) Y2 expands to -Z1 Y2
        assert majorana_to_pauli(MajoranaLabel(4, "L"), 3) == PauliString(2, ("Z", "Y", "I"))

    def test_gamma_r_last(self):
        # right encoding, mu = 2N: empty string times -X_N
        assert majorana_to_pauli(MajoranaLabel(6, "R"), 3) == PauliString(2, ("I", "I", "X"))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            majorana_to_pauli(MajoranaLabel(7, "L"), 3)

    @pytest.mark.parametrize("rep", ["L", "R"])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_anticommutation(self, rep, n):
        gammas = [dense(majorana_to_pauli(MajoranaLabel(mu, rep), n))
                  for mu in range(1, 2 * n + 1)]
        eye = np.eye(2 ** n)
        for i, gi in enumerate(gammas):
            for j, gj in enumerate(gammas):
                anti = gi @ gj + gj @ gi
                want = 2.0 * eye if i == j else 0.0 * eye
                assert np.allclose(anti, want, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_l_r_differ_by_parity_string(self, n):
        # gamma^L_mu gamma^R_mu is the all-Z string up to one global phase
        ref = None
        for mu in range(1, 2 * n + 1):
            a = majorana_to_pauli(MajoranaLabel(mu, "L"), n)
            b = majorana_to_pauli(MajoranaLabel(mu, "R"), n)
            prod = pauli_product(a, b)
            assert prod.letters == ("Z",) * n
            ref = prod.phase_power if ref is None else ref
            assert prod.phase_power == ref

    def test_pair_products_encoding_independent(self):
        n = 4
        for mu, nu in [(1, 2), (1, 8), (3, 4), (2, 7)]:
            assert majorana_pair_string(mu, nu, n, "L") == majorana_pair_string(mu, nu, n, "R")

    def test_probe_sign(self):
        n = 3
        assert majorana_probe(MajoranaLabel(1, "L"), n) == majorana_to_pauli(MajoranaLabel(1, "L"), n)
        assert majorana_probe(MajoranaLabel(6, "R"), n) == PauliString(0, ("I", "I", "X"))

    def test_gamma1_gamma2_is_iz(self):
        assert majorana_pair_string(1, 2, 2) == PauliString(1, ("Z", "I"))


class TestSchedule:
    def test_direct_products(self):
        sched = ProtocolSchedule(period=1.0, tau1=0.5, tau2=0.75,
                                 J=np.pi, h=np.pi / 8, lam=0.0)
        spec = angles_from_schedule(sched, 4)
        assert spec.z_angle == pytest.approx(np.pi / 16)
        assert spec.xx_angle == pytest.approx(np.pi / 4)
        assert spec.zz_angle == 0.0

    def test_zero_case(self):
        sched = ProtocolSchedule(period=1.0, tau1=0.5, tau2=0.75, J=0.0, h=0.0, lam=0.0)
        spec = angles_from_schedule(sched, 4)
        assert spec.z_angle == spec.xx_angle == spec.zz_angle == 0.0

    def test_longer_period(self):
        sched = ProtocolSchedule(period=2.0, tau1=1.0, tau2=1.5,
                                 J=np.pi / 2, h=np.pi / 16, lam=np.pi / 32)
        spec = angles_from_schedule(sched, 10)
        assert spec.z_angle == pytest.approx(np.pi / 16)
        assert spec.xx_angle == pytest.approx(np.pi / 4)
        assert spec.zz_angle == pytest.approx(np.pi / 64)

    def test_interacting_parameter_point(self):
        # lam = pi/8 over the final half-period gives the pi/16 interaction
        sched = ProtocolSchedule(period=2.0, tau1=1.0, tau2=1.5,
                                 J=np.pi / 2, h=np.pi / 16, lam=np.pi / 8)
        spec = angles_from_schedule(sched, 10)
        assert spec.z_angle == pytest.approx(np.pi / 16)
        assert spec.xx_angle == pytest.approx(np.pi / 4)
        assert spec.zz_angle == pytest.approx(np.pi / 16)

    def test_rejects_unordered_taus(self):
        with pytest.raises(ValueError):
            ProtocolSchedule(period=1.0, tau1=0.8, tau2=0.5, J=1.0, h=1.0, lam=0.0)

    @given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0.01, 5))
    @settings(max_examples=25, deadline=None)
    def test_linearity_in_rates(self, h, J, lam):
        sched = ProtocolSchedule(period=1.0, tau1=0.25, tau2=0.5, J=J, h=h, lam=lam)
        double = ProtocolSchedule(period=1.0, tau1=0.25, tau2=0.5,
                                  J=2 * J, h=2 * h, lam=2 * lam)
        a, b = angles_from_schedule(sched, 3), angles_from_schedule(double, 3)
        assert b.z_angle == pytest.approx(2 * a.z_angle)
        assert b.xx_angle == pytest.approx(2 * a.xx_angle)
        assert b.zz_angle == pytest.approx(2 * a.zz_angle)


class TestChainSpec:
    def test_json_round_trip(self):
        spec = ChainSpec(4, z_angle=(0.1, 0.2, 0.3, 0.4), xx_angle=0.5, zz_angle=0.0)
        again = ChainSpec.from_json(spec.to_json())
        assert again == spec

    def test_bad_lengths(self):
        with pytest.raises(ValueError):
            ChainSpec(4, z_angle=(0.1, 0.2))
        with pytest.raises(ValueError):
            ChainSpec(4, xx_angle=(0.1, 0.2, 0.3, 0.4))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            ChainSpec(4, z_angle=float("nan"))

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            ChainSpec(1)

    def test_unknown_json_keys(self):
        with pytest.raises(ValueError):
            ChainSpec.from_json(json.dumps({"n": 4, "bogus": 1}))


class TestTrivialTestbed:
    def test_n10_arrays(self):
        spec = build_trivial_testbed(10, np.pi / 16, np.pi / 4)
        assert spec.xx_angle == (0.0,) + (np.pi / 16,) * 7 + (0.0,)
        assert spec.z_angle == (0.0,) + (np.pi / 4,) * 8 + (0.0,)
        assert spec.is_free

    def test_n4_single_bond(self):
        spec = build_trivial_testbed(4, np.pi / 16, np.pi / 4)
        assert sum(1 for v in spec.xx_angle if v != 0.0) == 1

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_trivial_testbed(3, 0.1, 0.1)


def test_single_site_helper():
    assert single_site("Y", 2, 3) == PauliString(0, ("I", "Y", "I"))
    with pytest.raises(ValueError):
        single_site("X", 4, 3)
