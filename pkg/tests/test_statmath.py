import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import ols_normal_equations
from skillscore.errors import DomainError, InsufficientDataError, SingularDesignError
from skillscore.statmath import (
    InferenceOptions,
    betainc_regularized,
    fit_ols,
    normal_cdf,
    normal_quantile,
    probit,
    student_t_two_sided_p,
)

# Frozen from tests/oracles.py (mpmath quadrature of the densities, 40 digits).
PROBIT_0_0238 = -1.9809221916174619
PROBIT_0_65 = 0.38532046640756768
Z_0_975 = 1.9599639845400539
CDF_1_959964 = 0.97500000090355760
T_P_2_447_DF6 = 0.049994014372340266
T_P_1_329_DF6 = 0.23215035627370667


class TestProbit:
    def test_center(self):
        assert probit(0.5) == 0.0

    def test_published_row(self):
        # printed as 0.39 in the chess player table
        assert probit(0.65) == pytest.approx(PROBIT_0_65, abs=1e-12)
        assert round(probit(0.65), 2) == 0.39

    def test_lower_tail_value(self):
        assert probit(0.0238) == pytest.approx(PROBIT_0_0238, abs=1e-12)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, math.nan])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            probit(p)

    @given(st.floats(min_value=1e-6, max_value=0.5))
    def test_antisymmetry(self, p):
        assert probit(1.0 - p) == pytest.approx(-probit(p), abs=1e-9)

    @given(st.floats(min_value=-6.0, max_value=6.0))
    def test_roundtrip(self, z):
        assert abs(probit(normal_cdf(z)) - z) <= 1e-7

    @given(st.floats(min_value=1e-10, max_value=1 - 1e-10))
    def test_cdf_residual(self, p):
        assert abs(normal_cdf(probit(p)) - p) <= 1e-12

    def test_monotone(self):
        ps = np.linspace(1e-6, 1 - 1e-6, 2001)
        zs = [probit(p) for p in ps]
        assert np.all(np.diff(zs) > 0)


class TestNormalCdf:
    def test_center(self):
        assert normal_cdf(0.0) == 0.5

    def test_value(self):
        assert normal_cdf(1.959964) == pytest.approx(CDF_1_959964, abs=1e-15)
        assert normal_quantile(0.975) == pytest.approx(Z_0_975, abs=1e-12)

    @pytest.mark.parametrize("z", [0.5, 1.0, 2.0, 3.0])
    def test_complement(self, z):
        assert abs(normal_cdf(-z) - (1.0 - normal_cdf(z))) <= 1e-14

    @given(st.floats(min_value=-30, max_value=30), st.floats(min_value=0, max_value=5))
    def test_monotone(self, z, dz):
        assert normal_cdf(z + dz) >= normal_cdf(z)


class TestStudentT:
    def test_center(self):
        assert student_t_two_sided_p(0.0, 6) == 1.0

    def test_published_p_value(self):
        # First Year Rating row of the classical chess regression
        assert student_t_two_sided_p(1.329, 6) == pytest.approx(0.232, abs=0.002)
        assert student_t_two_sided_p(1.329, 6) == pytest.approx(T_P_1_329_DF6, abs=1e-12)

    def test_five_percent_point(self):
        assert student_t_two_sided_p(2.447, 6) == pytest.approx(T_P_2_447_DF6, abs=1e-12)
        assert student_t_two_sided_p(2.447, 6) == pytest.approx(0.050, abs=0.001)

    def test_df_domain(self):
        with pytest.raises(DomainError):
            student_t_two_sided_p(1.0, 0)

    def test_symmetric_and_decreasing(self):
        ts = np.linspace(0, 10, 200)
        ps = [student_t_two_sided_p(t, 7) for t in ts]
        assert np.all(np.diff(ps) < 0)
        assert student_t_two_sided_p(-2.0, 7) == student_t_two_sided_p(2.0, 7)

    def test_cauchy_closed_form(self):
        # df = 1 is Cauchy: P(|T| > t) = 1 - 2 atan(t) / pi
        for t in (0.3, 1.0, 4.0, 50.0):
            assert student_t_two_sided_p(t, 1) == pytest.approx(
                1 - 2 * math.atan(t) / math.pi, abs=1e-13)

    def test_large_df_tends_to_normal(self):
        p = student_t_two_sided_p(1.96, 10**7)
        assert p == pytest.approx(2 * (1 - normal_cdf(1.96)), abs=1e-6)

    def test_betainc_symmetry(self):
        for a, b, x in [(2.0, 3.0, 0.3), (0.5, 0.5, 0.9), (10.0, 0.5, 0.95)]:
            lhs = betainc_regularized(a, b, x)
            assert lhs == pytest.approx(1 - betainc_regularized(b, a, 1 - x), abs=1e-13)


class TestFitOls:
    def test_exact_line(self):
        X = np.array([[1, 0], [1, 1], [1, 2]], float)
        fit = fit_ols(X, [1, 3, 5])
        np.testing.assert_allclose(fit.coef, [1, 2], atol=1e-12)
        assert fit.r2 == pytest.approx(1.0)

    def test_constant_response(self, rng):
        X = np.column_stack([np.ones(10), rng.normal(size=(10, 2))])
        fit = fit_ols(X, np.full(10, 3.0))
        np.testing.assert_allclose(fit.coef[1:], 0.0, atol=1e-12)
        assert fit.r2 == 0.0

    def test_rank_deficient_names_column(self, rng):
        x = rng.normal(size=12)
        X = np.column_stack([np.ones(12), x, 2 * x])
        with pytest.raises(SingularDesignError) as exc:
            fit_ols(X, rng.normal(size=12), names=["const", "x", "twice_x"])
        assert exc.value.column == "twice_x"
        assert "twice_x" in str(exc.value)

    def test_insufficient_rows(self):
        with pytest.raises(InsufficientDataError):
            fit_ols(np.ones((2, 2)) + np.eye(2), [1.0, 2.0])

    def test_residual_orthogonality_and_reconstruction(self, rng):
        X = np.column_stack([np.ones(40), rng.normal(size=(40, 3)) * [1, 100, 1e-3]])
        y = rng.normal(size=40)
        fit = fit_ols(X, y)
        assert np.max(np.abs(X.T @ fit.residuals)) <= 1e-8 * np.linalg.norm(y) * np.linalg.norm(X, axis=0).max()
        np.testing.assert_allclose(fit.fitted + fit.residuals, y, rtol=1e-10, atol=1e-12)

    def test_t_is_coef_over_se(self, rng):
        X = np.column_stack([np.ones(30), rng.normal(size=(30, 3))])
        fit = fit_ols(X, rng.normal(size=30))
        np.testing.assert_array_equal(fit.t, fit.coef / fit.se)
        assert len(fit.coef) == len(fit.se) == len(fit.t) == len(fit.p) == fit.k

    def test_normal_reference(self, rng):
        X = np.column_stack([np.ones(30), rng.normal(size=30)])
        y = X @ [0.0, 0.3] + rng.normal(size=30)
        tfit = fit_ols(X, y)
        zfit = fit_ols(X, y, opts=InferenceOptions("normal"))
        np.testing.assert_array_equal(tfit.t, zfit.t)
        assert np.all(zfit.p <= tfit.p)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_matches_normal_equations(self, seed):
        r = np.random.default_rng(seed)
        X = np.column_stack([np.ones(20), r.normal(size=(20, 3))])
        y = X @ r.normal(size=4) + r.normal(size=20)
        fit = fit_ols(X, y)
        beta, se, r2 = ols_normal_equations(X, y)
        np.testing.assert_allclose(fit.coef, beta, rtol=1e-8, atol=1e-12)
        np.testing.assert_allclose(fit.se, se, rtol=1e-8)
        assert fit.r2 == pytest.approx(r2, abs=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=3),
           st.floats(min_value=1e-3, max_value=1e3))
    def test_column_scaling_invariance(self, seed, col, c):
        r = np.random.default_rng(seed)
        X = np.column_stack([np.ones(25), r.normal(size=(25, 3))])
        y = X @ r.normal(size=4) + r.normal(size=25)
        base = fit_ols(X, y)
        Xs = X.copy()
        Xs[:, col] *= c
        scaled = fit_ols(Xs, y)
        np.testing.assert_allclose(scaled.t, base.t, rtol=1e-7)
        np.testing.assert_allclose(scaled.p, base.p, rtol=1e-6, atol=1e-14)
        assert scaled.r2 == pytest.approx(base.r2, abs=1e-10)
        assert scaled.coef[col] == pytest.approx(base.coef[col] / c, rel=1e-7)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=3),
           st.floats(min_value=-50, max_value=50))
    def test_column_shift_moves_only_intercept(self, seed, col, shift):
        r = np.random.default_rng(seed)
        X = np.column_stack([np.ones(25), r.normal(size=(25, 3))])
        y = X @ r.normal(size=4) + r.normal(size=25)
        base = fit_ols(X, y)
        Xs = X.copy()
        Xs[:, col] += shift
        moved = fit_ols(Xs, y)
        np.testing.assert_allclose(moved.coef[1:], base.coef[1:], rtol=1e-6, atol=1e-9)
        np.testing.assert_allclose(moved.t[1:], base.t[1:], rtol=1e-6, atol=1e-9)
        assert moved.r2 == pytest.approx(base.r2, abs=1e-9)


def test_chess_classical_fixture(chess_classical):
    X, y = chess_classical
    fit = fit_ols(X, y)
    np.testing.assert_allclose(fit.coef, [-1.1106, 0.1811, 0.5363, -0.3797], atol=0.15)
    assert fit.r2 == pytest.approx(0.483, abs=0.05)
    assert fit.df_resid == 6
