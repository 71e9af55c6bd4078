import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tightframe.haar_core import (DyadicStep, ExactDyadicValue, ONE, ZERO, alpha, alpha_column,
                                  alpha_oracle, alpha_row, haar_K, haar_L, index_msb, sqrt2_power,
                                  step_inner)

R2 = sqrt2_power(-1)          # 2**-1/2
SQ2 = sqrt2_power(1)          # 2**1/2


def cells(f, J, lo, hi):
    return list(f.refine(J).on_window(J, lo, hi))


class TestExactDyadicValue:
    def test_canonical_form(self):
        assert ExactDyadicValue(4, 1) == ExactDyadicValue(1, 5)
        assert ExactDyadicValue(0, 7) == ZERO
        assert hash(ExactDyadicValue(2, 0)) == hash(ExactDyadicValue(1, 2))

    def test_sqrt2_squares_to_two(self):
        assert SQ2 * SQ2 == ExactDyadicValue(2)
        assert R2 * R2 * 2 == ONE

    def test_parity_mismatch_is_refused(self):
        with pytest.raises(ArithmeticError):
            ONE + SQ2

    @given(st.integers(-50, 50), st.integers(-8, 8), st.integers(-50, 50), st.integers(-4, 4))
    def test_matches_float(self, m1, e1, m2, k):
        a, b = ExactDyadicValue(m1, e1), ExactDyadicValue(m2, e1 + 2 * k)
        assert math.isclose(float(a + b), float(a) + float(b), rel_tol=1e-12, abs_tol=1e-12)
        assert math.isclose(float(a * b), float(a) * float(b), rel_tol=1e-12, abs_tol=1e-300)


class TestIndexMsb:
    @pytest.mark.parametrize("i,pt", [(1, (0, 0)), (5, (2, 1)), (12, (3, 4))])
    def test_examples(self, i, pt):
        assert index_msb(i) == pt

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            index_msb(0)


class TestAtoms:
    def test_scaling_atom(self):
        f = haar_L(0, 0, J=1)
        assert f.level == 1 and f.origin == 0 and f.values == (ONE, ONE)

    def test_haar_wavelet(self):
        f = haar_L(1, 0, J=1)
        assert f.values == (ONE, -ONE) and f.support == (0.0, 1.0)

    def test_shifted_fine_wavelet(self):
        f = haar_L(3, 2, J=2)
        assert f.origin == 10 and f.values == (SQ2, -SQ2)
        assert f.support == (2.5, 3.0)
        assert step_inner(f, f) == ONE

    def test_resolution_error(self):
        with pytest.raises(ValueError, match="cannot resolve"):
            haar_L(4, 0, J=2)

    def test_K_examples(self):
        assert haar_K(1, 0, 0, J=0) == DyadicStep(0, 1, (ONE,))
        assert haar_K(-1, 0, 0, J=0) == DyadicStep(0, -2, (ONE,))
        k = haar_K(1, 0, 1, J=1)
        assert k == DyadicStep(1, 1, (SQ2,))
        assert step_inner(k, k) == ONE

    def test_orthonormal_L(self):
        atoms = {(i, n): haar_L(i, n) for i in range(32) for n in range(-4, 5)}
        for (a, f), (b, g) in product(atoms.items(), repeat=2):
            assert step_inner(f, g) == (ONE if a == b else ZERO)

    def test_orthonormal_K(self):
        atoms = {(s, j, m): haar_K(s, j, m) for s in (1, -1) for j in range(16) for m in range(-3, 4)}
        for (a, f), (b, g) in product(atoms.items(), repeat=2):
            assert step_inner(f, g) == (ONE if a == b else ZERO)


class TestStepInner:
    def test_indicator_norm(self):
        chi = DyadicStep(0, 0, (ONE,))
        assert step_inner(chi, chi) == ONE

    def test_scaling_against_fine_scaling(self):
        assert step_inner(haar_L(0, 0), haar_K(1, 0, 1)) == R2

    def test_haar_against_fine_scaling(self):
        assert step_inner(haar_L(1, 0), haar_K(1, 0, 1)) == -R2

    def test_numeric_path_agrees(self):
        f, g = haar_L(5, 1), haar_K(1, 3, -1)
        assert step_inner(f.numeric(), g.numeric()) == pytest.approx(complex(step_inner(f, g)))

    @given(st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=6),
           st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=6),
           st.integers(0, 3), st.integers(0, 3), st.integers(-4, 4), st.integers(-4, 4))
    def test_conjugate_symmetric(self, u, v, J1, J2, o1, o2):
        f = DyadicStep(J1, o1, np.array(u))
        g = DyadicStep(J2, o2, np.array(v))
        assert step_inner(f, g) == pytest.approx(np.conj(step_inner(g, f)), abs=1e-9)


class TestDyadicStep:
    def test_equality_across_levels(self):
        assert DyadicStep(0, 0, (ONE,)) == DyadicStep(2, 0, (ONE,) * 4)
        assert DyadicStep(0, 0, (ONE,)) != DyadicStep(1, 0, (ONE, ZERO))

    @given(st.lists(st.integers(-3, 3), min_size=1, max_size=5), st.integers(0, 3), st.integers(0, 3))
    def test_refine_preserves_norm(self, vals, J, extra):
        f = DyadicStep(J, 0, tuple(ExactDyadicValue(v) for v in vals))
        assert step_inner(f, f) == step_inner(f.refine(J + extra), f.refine(J + extra))


class TestAlpha:
    @pytest.mark.parametrize("args,value", [
        ((0, 1, 1, 0, 0), ONE),
        ((0, 0, -1, 0, 1), ZERO),
        ((5, 0, 1, 1, 2), ONE),
        ((1, -3, 1, 0, 0), ZERO),
        ((0, 0, 1, 0, 1), R2),
        ((1, 0, 1, 0, 1), -R2),
        # the sign here is + : the scaling atom on [2,3) meets the fine wavelet
        # on [2, 2.5) | [2.5, 3) only through its positive half
        ((0, 2, 1, 1, -1), R2),
    ])
    def test_frozen_values(self, args, value):
        assert alpha(*args) == value
        assert alpha_oracle(*args) == value

    @settings(max_examples=400, deadline=None)
    @given(st.integers(0, 300), st.integers(-40, 40), st.sampled_from([1, -1]),
           st.integers(0, 300), st.integers(-9, 9))
    def test_matches_oracle_wide(self, i, n, s, j, m):
        assert alpha(i, n, s, j, m) == alpha_oracle(i, n, s, j, m)

    def test_single_entry_for_multi_bit_rows(self):
        for i in range(1, 64):
            if bin(i).count("1") < 2:
                continue
            for n in range(-6, 7):
                for s in (1, -1):
                    for m in range(-6, 7):
                        nz = [j for j in range(128) if not alpha(i, n, s, j, m).is_zero()]
                        assert len(nz) <= 1

    def test_column_enumeration_is_complete(self):
        for s, j, m in product((1, -1), range(12), range(-3, 4)):
            listed = {(i, n) for i, n, _ in alpha_column(s, j, m)}
            brute = {(i, n) for i in range(64) for n in range(-20, 21)
                     if not alpha(i, n, s, j, m).is_zero()}
            assert brute <= listed

    def test_row_sums(self):
        for i in range(32):
            for n in range(-16, 17):
                entries, tail = alpha_row(i, n, m_max=30)
                total = sum(float(a) ** 2 for *_, a in entries) + tail
                assert total == pytest.approx(1.0, abs=1e-12)
