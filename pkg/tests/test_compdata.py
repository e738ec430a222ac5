"""Compositional data containers, closure, and the clr transform."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from rcec import (
    ClrMatrix,
    CompositionMatrix,
    CountMatrix,
    basis_to_composition,
    close_counts,
    clr_transform,
    variation_from_cov,
)

positive_rows = hnp.arrays(
    np.float64,
    st.tuples(st.integers(2, 8), st.integers(2, 8)),
    elements=st.floats(0.01, 100.0),
)


class TestContainers:
    def test_count_matrix_accepts_nonnegative(self):
        m = CountMatrix([[0, 1, 2], [3, 0, 4]])
        assert m.n == 2 and m.p == 3

    def test_count_matrix_rejects_negative(self):
        with pytest.raises(ValueError, match="negative"):
            CountMatrix([[1, -1], [2, 3]])

    def test_count_matrix_rejects_all_zero_row(self):
        with pytest.raises(ValueError, match="zero"):
            CountMatrix([[0, 0], [1, 2]])

    def test_composition_rejects_zero_entry(self):
        with pytest.raises(ValueError, match="positive"):
            CompositionMatrix([[0.0, 1.0], [0.5, 0.5]])

    def test_composition_rejects_bad_row_sum(self):
        # Rows off the simplex are rejected, never silently renormalized.
        with pytest.raises(ValueError, match="sum"):
            CompositionMatrix([[0.5, 0.6], [0.5, 0.5]])

    def test_composition_row_sum_tolerance(self):
        x = np.array([[0.5, 0.5 + 5e-11], [0.25, 0.75]])
        assert CompositionMatrix(x).p == 2

    def test_minimum_shape(self):
        with pytest.raises(ValueError, match="at least 2 samples"):
            CompositionMatrix([[0.5, 0.5]])
        with pytest.raises(ValueError, match="at least 2 components"):
            CompositionMatrix([[1.0], [1.0]])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError, match="finite"):
            CompositionMatrix([[np.nan, 1.0], [0.5, 0.5]])

    def test_clr_matrix_rejects_noncentered_rows(self):
        with pytest.raises(ValueError, match="sum"):
            ClrMatrix([[1.0, 1.0], [0.5, -0.5]])


class TestCloseCounts:
    def test_plain_closure(self):
        x = close_counts(CountMatrix([[1, 1, 2], [1, 1, 2]]))
        np.testing.assert_allclose(x.values[0], [0.25, 0.25, 0.5])

    def test_zero_replacement(self):
        x = close_counts(CountMatrix([[0, 1, 1], [1, 1, 1]]), zero_replacement=0.5)
        np.testing.assert_allclose(x.values[0], [0.2, 0.4, 0.4])

    def test_accepts_plain_array(self):
        x = close_counts([[0, 1, 1], [1, 1, 1]])
        np.testing.assert_allclose(x.values[0], [0.2, 0.4, 0.4])

    def test_rejects_nonpositive_replacement(self):
        with pytest.raises(ValueError, match="zero_replacement"):
            close_counts(CountMatrix([[1, 2], [3, 4]]), zero_replacement=0.0)

    def test_all_zero_row_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            close_counts([[0, 0], [1, 2]])


class TestClrTransform:
    def test_uniform_row_maps_to_zero(self):
        w = clr_transform(CompositionMatrix([[1 / 3] * 3, [1 / 3] * 3]))
        np.testing.assert_allclose(w.values, 0.0, atol=1e-12)

    def test_hand_value(self):
        w = clr_transform(CompositionMatrix([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25]]))
        np.testing.assert_allclose(
            w.values[0], [0.462098, -0.231049, -0.231049], atol=1e-5
        )

    @given(positive_rows)
    def test_rows_sum_to_zero(self, raw):
        x = close_counts(CountMatrix(raw))
        w = clr_transform(x)
        np.testing.assert_allclose(w.values.sum(axis=1), 0.0, atol=1e-8)

    @given(positive_rows, st.floats(1e-3, 1e3))
    def test_scale_invariance(self, raw, c):
        # clr depends on within-row ratios only, so a global rescale of the
        # pre-closure counts leaves it unchanged.
        base = clr_transform(close_counts(CountMatrix(raw))).values
        scaled = clr_transform(close_counts(CountMatrix(raw * c))).values
        np.testing.assert_allclose(scaled, base, atol=1e-10)

    def test_row_centering_identity(self):
        rng = np.random.default_rng(11)
        y = rng.uniform(-5, 5, size=(6, 4))
        w = clr_transform(basis_to_composition(y))
        centered = y - y.mean(axis=1, keepdims=True)
        np.testing.assert_allclose(w.values, centered, atol=1e-10)


class TestVariationFromCov:
    def test_identity_case(self):
        np.testing.assert_array_equal(
            variation_from_cov(np.eye(2)), [[0.0, 2.0], [2.0, 0.0]]
        )

    def test_hand_value(self):
        t = variation_from_cov([[1.0, 0.5], [0.5, 2.0]])
        assert t[0, 1] == pytest.approx(2.0)

    @given(hnp.arrays(np.float64, (5, 5), elements=st.floats(-10, 10)))
    def test_symmetric_zero_diagonal(self, a):
        t = variation_from_cov((a + a.T) / 2)
        np.testing.assert_array_equal(np.diag(t), 0.0)
        np.testing.assert_allclose(t, t.T)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError, match="square"):
            variation_from_cov(np.ones((2, 3)))
