import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import preset_frame
from tightframe.frame_builder import (BranchAddress, address_index, build_frame, c_array,
                                      c_sequence, from_psi, prefix_index, psi_address, reflect,
                                      synthesize, tail_energy, top_bits, l2_distance)
from tightframe.haar_core import DyadicStep, haar_L, step_inner
from tightframe.hardy_inner import cinner, taylor_coeffs
from tightframe.presets import PRESETS, preset_spec

H3 = np.sqrt(3)


class TestAddresses:
    @pytest.mark.parametrize("i,addr", [
        (0, BranchAddress("zero")),
        (4, BranchAddress("pow2", 0, 2)),
        (3, BranchAddress("branch", 1, 0)),
        (11, BranchAddress("branch", 3, 1)),
    ])
    def test_examples(self, i, addr):
        assert psi_address(i) == addr

    @given(st.integers(0, 2 ** 40))
    def test_round_trip(self, i):
        assert address_index(psi_address(i)) == i

    def test_prefixes(self):
        # 2**(p+k) plus the low p+k bits of l
        assert [prefix_index(6, k) for k in (-2, -1, 0)] == [1, 2, 6]
        assert [prefix_index(5, k) for k in (-2, -1, 0)] == [1, 3, 5]
        assert top_bits(6, -1) == 3 and top_bits(6, 0) == 1


class TestCSequence:
    def test_type3(self):
        C = c_sequence(*taylor_coeffs(preset_spec("t3a")), B=1.0)
        assert C[1] == pytest.approx(H3 / 2, abs=1e-15)
        assert C[3] == pytest.approx(-H3 / 4, abs=1e-15)
        assert C[7] == pytest.approx(H3 / 8, abs=1e-15)
        assert 2 not in C

    def test_type2(self):
        C = c_sequence(*taylor_coeffs(preset_spec("t2a")), B=1.0, L_max=64)
        assert C == {1: 1}

    def test_type4(self):
        C = c_sequence(*taylor_coeffs(preset_spec("t4a")), B=1.0)
        assert C[2] == pytest.approx(-H3 / 4, abs=1e-15)
        assert C[4] == pytest.approx(H3 / 8, abs=1e-15)

    @pytest.mark.parametrize("name", ["t3b", "t4b", "t5a", "t5e"])
    def test_dense_matches_sparse(self, name):
        a0, a1 = taylor_coeffs(preset_spec(name))
        C = c_sequence(a0, a1, 1.0, L_max=511)
        D = c_array(a0, a1, 1.0, L=512)
        for l in range(1, 512):
            assert D[l] == pytest.approx(C.get(l, 0), abs=1e-15)

    @pytest.mark.parametrize("name", [n for n in PRESETS if n > "t2"])
    def test_consistency_with_psi(self, name):
        fc = preset_frame(name)
        C1 = fc.C[1]
        for l in range(2, 64):
            assert fc.C.get(l, 0) * np.conj(C1) == pytest.approx(
                -cinner(fc.psi[l], fc.psi[1]), abs=1e-12)


class TestAssemble:
    def test_type2(self):
        fc = preset_frame("t2a")
        nz = {i: tuple(fc.psi[i]) for i in range(fc.I_max) if np.any(fc.psi[i])}
        assert nz == {2: (1, 0), 3: (0, 1)}

    def test_type3(self):
        fc = preset_frame("t3a")
        expect = {1: (0.5, 0), 2: (0, H3 / 2), 3: (0.75, 0), 5: (0, -H3 / 4), 7: (-0.375, 0)}
        for i, v in expect.items():
            np.testing.assert_allclose(fc.psi[i], v, atol=1e-15)

    def test_type1(self):
        fc = preset_frame("t1")
        assert np.count_nonzero(np.any(fc.psi != 0, axis=1)) == 1
        np.testing.assert_array_equal(fc.psi[1], [1, 0])

    def test_source_continues_storage(self):
        small = build_frame(preset_spec("t5c"), I_max=64)
        big = preset_frame("t5c")
        for i in range(64, 2048, 7):
            np.testing.assert_allclose(small.psi_at(i), big.psi[i], atol=1e-15)


class TestSynthesize:
    def test_type1_is_haar(self):
        p1, p2 = synthesize(preset_frame("t1"), 3)
        assert p1 == haar_L(1, 0).numeric()
        assert not np.any(p2.values)

    def test_type2(self):
        p1, p2 = synthesize(preset_frame("t2a"), 2)
        r = np.sqrt(2)
        np.testing.assert_allclose(p1.values, [r, -r, 0, 0])
        np.testing.assert_allclose(p2.values, [0, 0, r, -r])

    @pytest.mark.parametrize("name", ["t3a", "t5b"])
    def test_round_trip(self, name):
        fc = build_frame(preset_spec(name), I_max=128)
        psis = synthesize(fc, 7)
        for i in range(128):
            for j in range(2):
                assert step_inner(psis[j], haar_L(i, 0).numeric()) == pytest.approx(fc.psi[i, j], abs=1e-13)

    @pytest.mark.parametrize("name", PRESETS)
    def test_zero_mean(self, name):
        for p in synthesize(preset_frame(name), 12):
            assert abs(np.sum(p.values)) * 2.0 ** -12 < 1e-13

    def test_level_too_small(self):
        with pytest.raises(ValueError):
            synthesize(preset_frame("t4a"), 5)


class TestTailEnergy:
    def test_finite_types_vanish(self):
        for name in ("t1", "t2a", "t2b"):
            assert np.all(tail_energy(preset_frame(name), 8) == 0)

    def test_type3_is_not_finite(self):
        # C_{2^p - 1} never vanishes for type 3, so the tail never closes
        assert tail_energy(preset_frame("t3a"), 8)[0] > 0

    def test_type4_closed_form(self):
        t = tail_energy(preset_frame("t4a"), 1024)
        # power of two part: sum_{k >= 10} (9/16) 4**(1-k) = 3/4 * 4**-9
        assert t[0] == pytest.approx(0.75 * 4.0 ** -9, rel=1e-12)
        assert t.sum() <= 1e-5

    def test_type4_against_brute_force(self):
        big = build_frame(preset_spec("t4a"), I_max=1 << 16)
        brute = np.sum(np.abs(big.psi[1024:]) ** 2, axis=0) + tail_energy(big)
        np.testing.assert_allclose(tail_energy(preset_frame("t4a"), 1024), brute, rtol=1e-10)

    def test_type5b_against_brute_force(self):
        big = build_frame(preset_spec("t5b"), I_max=1 << 20)
        brute = np.sum(np.abs(big.psi[4096:]) ** 2, axis=0)
        beyond = tail_energy(big)
        closed = tail_energy(preset_frame("t5b"), 4096)
        # coefficients past 2**20 still hold about 3e-12 of energy
        np.testing.assert_allclose(closed, brute + beyond, rtol=0, atol=1e-16)
        assert np.all(np.abs(closed - brute) <= 1e-11)

    def test_matches_stored_tail(self):
        fc = preset_frame("t5e")
        inner = np.sum(np.abs(fc.psi[256:]) ** 2, axis=0) + tail_energy(fc)
        np.testing.assert_allclose(tail_energy(fc, 256), inner, atol=1e-16)


class TestReflect:
    def test_haar(self):
        h = haar_L(1, 0).numeric()
        assert reflect(h) == DyadicStep(1, 0, -h.values)

    def test_half_indicator(self):
        f = DyadicStep(1, 0, np.array([1.0, 0.0]))
        assert reflect(f) == DyadicStep(1, 0, np.array([0.0, 1.0]))

    def test_support_checked(self):
        with pytest.raises(ValueError):
            reflect(DyadicStep(0, 1, np.array([1.0])))

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=16), st.integers(0, 4))
    def test_involution(self, vals, J):
        n = 1 << J
        f = DyadicStep(J, 0, np.resize(np.array(vals, dtype=complex), n))
        assert reflect(reflect(f)) == f
        assert l2_distance(f, reflect(reflect(f))) == 0

    @pytest.mark.parametrize("tag", ["a", "b"])
    def test_type3_is_negated_reflection_of_type4(self, tag):
        f3 = preset_frame("t3" + tag)
        f4 = preset_frame("t4" + tag)
        bound = np.sqrt(2 * (tail_energy(f3) + tail_energy(f4)))
        for j, (p3, p4) in enumerate(zip(synthesize(f3, 12), synthesize(f4, 12))):
            assert l2_distance(p3, DyadicStep(12, 0, -reflect(p4).values)) <= bound[j] + 1e-12


def test_from_psi_pads_to_power_of_two():
    fc = from_psi([[0, 0], [1, 0], [0, 1]], 1.0)
    assert fc.I_max == 4 and fc.B == 1.0 and not fc.has_source
