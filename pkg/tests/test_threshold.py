"""Thresholding rules and the entry-adaptive threshold matrix."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rcec import ThresholdRule, apply_rule, entry_thresholds, threshold_matrix

RULES = [
    ThresholdRule.soft(),
    ThresholdRule.adaptive_lasso(1.0),
    ThresholdRule.adaptive_lasso(2.0),
    ThresholdRule.adaptive_lasso(4.0),
    ThresholdRule.scad(3.7),
]

finite = st.floats(-1e6, 1e6, allow_nan=False)
nonneg = st.floats(0.0, 1e6, allow_nan=False)


class TestRuleConstruction:
    def test_validation(self):
        with pytest.raises(ValueError, match="unknown rule kind"):
            ThresholdRule(kind="hard")
        with pytest.raises(ValueError, match="eta must be >= 1"):
            ThresholdRule.adaptive_lasso(0.5)
        with pytest.raises(ValueError, match="a must be > 2"):
            ThresholdRule.scad(2.0)

    @pytest.mark.parametrize(
        "text, kind, param",
        [
            ("soft", "soft", None),
            ("alasso", "alasso", 1.0),
            ("alasso:2", "alasso", 2.0),
            ("scad", "scad", 3.7),
            ("scad:4.2", "scad", 4.2),
        ],
    )
    def test_parse(self, text, kind, param):
        rule = ThresholdRule.parse(text)
        assert rule.kind == kind
        if kind == "alasso":
            assert rule.eta == param
        if kind == "scad":
            assert rule.a == param

    def test_parse_rejects_garbage(self):
        for bad in ("hard", "soft:1", "alasso:nope", "alasso:0.2", ""):
            with pytest.raises(ValueError, match="bad threshold rule"):
                ThresholdRule.parse(bad)

    @pytest.mark.parametrize("rule", RULES)
    def test_spec_round_trip(self, rule):
        assert ThresholdRule.parse(rule.spec()) == rule


class TestApplyRuleValues:
    def test_soft_hand_values(self):
        soft = ThresholdRule.soft()
        assert apply_rule(soft, 3.0, 2.0) == 1.0
        assert apply_rule(soft, -3.0, 2.0) == -1.0
        assert apply_rule(soft, 1.5, 2.0) == 0.0

    def test_alasso_hand_value(self):
        rule = ThresholdRule.adaptive_lasso(2.0)
        assert apply_rule(rule, 3.0, 2.0) == pytest.approx(5.0 / 3.0)

    def test_scad_hand_value(self):
        rule = ThresholdRule.scad(3.7)
        assert apply_rule(rule, 3.0, 1.0) == pytest.approx(4.4 / 1.7)

    @pytest.mark.parametrize("rule", RULES)
    def test_zero_lambda_is_identity(self, rule):
        z = np.array([-4.0, -0.3, 0.0, 0.7, 11.0])
        np.testing.assert_array_equal(apply_rule(rule, z, 0.0), z)

    def test_vectorized_matches_scalar(self):
        rule = ThresholdRule.scad(3.7)
        z = np.linspace(-5, 5, 101)
        lam = 0.8
        expected = np.array([float(apply_rule(rule, zi, lam)) for zi in z])
        np.testing.assert_allclose(apply_rule(rule, z, lam), expected)

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            apply_rule(ThresholdRule.soft(), 1.0, -0.1)


class TestRuleProperties:
    @pytest.mark.parametrize("rule", RULES)
    @given(z=finite, lam=nonneg)
    def test_kills_small_entries(self, rule, z, lam):
        if abs(z) <= lam:
            assert apply_rule(rule, z, lam) == 0.0

    @pytest.mark.parametrize("rule", RULES)
    @given(z=finite, lam=nonneg)
    def test_shrinks_by_at_most_lambda(self, rule, z, lam):
        out = float(apply_rule(rule, z, lam))
        # The 1e-12 * |z| term absorbs rounding of z * fade at large |z|.
        assert abs(out - z) <= lam * (1 + 1e-12) + 1e-12 * (1.0 + abs(z))

    @pytest.mark.parametrize("rule", RULES)
    @given(z=finite, lam=nonneg)
    def test_sign_preserved(self, rule, z, lam):
        out = float(apply_rule(rule, z, lam))
        assert np.sign(out) in (0.0, np.sign(z))

    @pytest.mark.parametrize("rule", RULES)
    @given(z=finite, lam1=st.floats(0, 1e3), lam2=st.floats(0, 1e3))
    def test_monotone_in_lambda(self, rule, z, lam1, lam2):
        lo, hi = sorted((lam1, lam2))
        slack = 1e-12 * (1.0 + abs(z))
        assert abs(float(apply_rule(rule, z, hi))) <= abs(
            float(apply_rule(rule, z, lo))
        ) + slack

    @given(z=finite, lam=nonneg)
    def test_alasso_one_equals_soft(self, z, lam):
        soft = float(apply_rule(ThresholdRule.soft(), z, lam))
        alasso = float(apply_rule(ThresholdRule.adaptive_lasso(1.0), z, lam))
        assert abs(soft - alasso) <= 1e-12 * (1.0 + abs(z))

    @given(z=finite, lam=nonneg, offset=st.floats(-1.0, 1.0))
    def test_soft_dominated_by_any_compatible_value(self, z, lam, offset):
        # |tau(z)| <= |y| whenever |y - z| <= lam; unique to soft among the
        # implemented rules (see the bound tests below).
        y = z + offset * lam
        slack = 1e-12 * (1.0 + abs(z) + lam)
        assert abs(float(apply_rule(ThresholdRule.soft(), z, lam))) <= abs(y) + slack

    @pytest.mark.parametrize(
        "rule, bound",
        [
            (ThresholdRule.adaptive_lasso(2.0), 2.0),
            (ThresholdRule.adaptive_lasso(4.0), 4.0),
            (ThresholdRule.scad(3.7), 3.7 / 2.7),
        ],
    )
    @given(z=finite, lam=nonneg, offset=st.floats(-1.0, 1.0))
    def test_constant_factor_domination(self, rule, bound, z, lam, offset):
        # The biased rules exceed |y| near the threshold but never by more
        # than a rule-specific constant factor (eta for the adaptive lasso,
        # a/(a-1) for the clipped rule); both factors are attained in the
        # witness test below.
        y = z + offset * lam
        slack = 1e-12 * (1.0 + abs(z) + lam)
        assert abs(float(apply_rule(rule, z, lam))) <= bound * abs(y) + slack

    def test_domination_constants_are_tight(self):
        # Adaptive lasso: the ratio tau(z)/(z - lam) climbs to eta as z
        # approaches lam from above.
        rule = ThresholdRule.adaptive_lasso(2.0)
        z, lam = 1.0 + 1e-9, 1.0
        ratio = float(apply_rule(rule, z, lam)) / (z - lam)
        assert ratio > 2.0 - 1e-6
        assert float(apply_rule(rule, 2.0, 1.0)) == 1.5  # > |y| = 1 at y = z - lam

        # Clipped rule: the worst case sits exactly at z = a * lam.
        rule = ThresholdRule.scad(3.7)
        z, lam = 3.7, 1.0
        ratio = float(apply_rule(rule, z, lam)) / (z - lam)
        assert ratio == pytest.approx(3.7 / 2.7, rel=1e-9)


class TestEntryThresholds:
    def test_hand_value(self):
        gamma = np.diag([4.0, 4.0])
        t = entry_thresholds(gamma, 0.5, n=0, log_p_over_n=0.01)
        assert t[0, 1] == pytest.approx(0.2)

    def test_zero_lambda(self):
        np.testing.assert_array_equal(
            entry_thresholds(np.eye(3), 0.0, n=10), np.zeros((3, 3))
        )

    def test_symmetric_output(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(4, 4))
        gamma = a @ a.T
        t = entry_thresholds(gamma, 0.7, n=25)
        np.testing.assert_array_equal(t, t.T)

    def test_uses_log_p_over_n(self):
        gamma = np.eye(4)
        t = entry_thresholds(gamma, 1.0, n=100)
        assert t[0, 1] == pytest.approx(np.sqrt(np.log(4) / 100))

    def test_degenerate_diagonal_clamped_with_warning(self):
        gamma = np.array([[1.0, 0.5], [0.5, -2.0]])
        with pytest.warns(RuntimeWarning, match="clamped"):
            t = entry_thresholds(gamma, 1.0, n=0, log_p_over_n=1.0)
        assert t[1, 1] == pytest.approx(1e-12)
        assert t[0, 1] == pytest.approx(np.sqrt(1e-12))

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError, match="square"):
            entry_thresholds(np.ones((2, 3)), 1.0, n=10)
        with pytest.raises(ValueError, match="nonnegative"):
            entry_thresholds(np.eye(2), -1.0, n=10)
        with pytest.raises(ValueError, match="non-finite"):
            entry_thresholds(np.array([[np.inf, 0], [0, 1.0]]), 1.0, n=10)


class TestThresholdMatrix:
    def test_zero_lambda_returns_input(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(5, 5))
        gamma = a @ a.T
        np.testing.assert_array_equal(
            threshold_matrix(gamma, 0.0, 30, ThresholdRule.soft()), gamma
        )

    def test_large_lambda_leaves_diagonal(self):
        gamma = np.array([[4.0, 1.0], [1.0, 4.0]])
        out = threshold_matrix(gamma, 100.0, 10, ThresholdRule.soft())
        np.testing.assert_array_equal(out, np.diag([4.0, 4.0]))

    def test_hand_value(self):
        gamma = np.array([[4.0, 1.0], [1.0, 4.0]])
        out = threshold_matrix(
            gamma, 0.5, n=0, rule=ThresholdRule.soft(), log_p_over_n=0.01
        )
        assert out[0, 1] == pytest.approx(0.8)
        assert out[0, 0] == 4.0

    def test_diagonal_thresholding_opt_in(self):
        gamma = np.array([[4.0, 1.0], [1.0, 4.0]])
        out = threshold_matrix(
            gamma,
            0.5,
            n=0,
            rule=ThresholdRule.soft(),
            threshold_diagonal=True,
            log_p_over_n=0.01,
        )
        assert out[0, 0] == pytest.approx(4.0 - 0.5 * np.sqrt(0.16))

    def test_support_shrinks_as_lambda_grows(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(40, 8))
        gamma = a.T @ a / 40
        previous = None
        for lam in np.linspace(0.0, 5.0, 11):
            out = threshold_matrix(gamma, lam, 40, ThresholdRule.soft())
            support = {
                (i, j)
                for i in range(8)
                for j in range(i + 1, 8)
                if out[i, j] != 0.0
            }
            if previous is not None:
                assert support <= previous
            previous = support
