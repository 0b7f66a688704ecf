import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st
from scipy import optimize

from lpball.errors import DegenerateError, DomainError, NumericalError
from lpball.ratefun import (
    INF,
    DiracRate,
    ExponentialRate,
    ExtReal,
    RateGrid,
    UserGrid,
    compare_printed_form,
    conjugate_lambda_tilde,
    ext,
    ext_min,
    format_ext,
    ldp_rate_p_eq_q,
    ldp_rate_projection,
    ldp_rate_qgtp,
    ldp_rate_width,
    log_mgf_lambda_tilde,
    mdp_constrained_min,
    mdp_core_direction,
    mdp_rate,
    mdp_rate_bivariate,
    mixing_rate_eval,
    printed_form_constant,
)
from lpball.ratefun.closed import minimize_log_scale
from lpball.specfun import clt_variance, covariance_matrix, holder_conjugate, m_p

QLTP = [(2.0, 1.0), (3.0, 1.0), (3.0, 2.0), (2.0, 0.5), (5.0, 1.5)]


class TestExtReal:
    def test_infinity_absorbs(self):
        assert INF + 3.0 == INF
        assert 2.0 + INF == INF
        assert INF * 2.0 == INF
        assert str(INF) == "inf"

    @pytest.mark.parametrize(
        "op",
        [lambda: INF - INF, lambda: 1.0 - INF, lambda: INF * 0.0, lambda: -INF, lambda: ExtReal(math.nan),
         lambda: ExtReal(-math.inf)],
    )
    def test_undefined(self, op):
        with pytest.raises(NumericalError):
            op()

    def test_finite_arithmetic(self):
        a = ExtReal(1.5)
        assert a - 0.5 == 1.0 and -a == -1.5 and a / 3 == 0.5 and 3 - a == 1.5
        assert a.is_finite and not a.is_inf

    def test_helpers(self):
        assert ext(2.0) == 2.0 and isinstance(ext(2.0), ExtReal)
        assert ext_min() == INF
        assert ext_min(INF, 3.0, 2.0) == 2.0
        assert format_ext(0.1) == "0.10000000000000001"
        assert float(format_ext(1 / 3)) == 1 / 3

    @given(st.floats(-1e300, 1e300))
    def test_round_trip(self, x):
        assert float(format_ext(ExtReal(x))) == x


class TestMixingRates:
    def test_dirac(self):
        assert mixing_rate_eval(DiracRate(), 0.0) == 0.0
        assert mixing_rate_eval(DiracRate(), 0.5) == INF

    def test_exponential(self):
        assert mixing_rate_eval(ExponentialRate(2.0), 3.0) == 1.5
        assert mixing_rate_eval(ExponentialRate(2.0), -1.0) == INF

    def test_user_grid(self):
        x = np.linspace(0.0, 1.0, 11)
        g = UserGrid(RateGrid(x, x**2))
        assert mixing_rate_eval(g, 0.5) == pytest.approx(0.25)
        assert mixing_rate_eval(g, 0.55) == pytest.approx((0.25 + 0.36) / 2)
        assert mixing_rate_eval(g, 1.0) == pytest.approx(1.0)
        assert mixing_rate_eval(g, 1.5) == INF

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            RateGrid([0.0, 0.0], [1.0, 1.0])
        with pytest.raises(DomainError):
            RateGrid([0.0, 1.0], [1.0, -1.0])
        with pytest.raises(DomainError):
            RateGrid([0.0, 1.0], [1.0, 1.0], speed_kind="log n")
        with pytest.raises(DomainError):
            ExponentialRate(0.0)


class TestMdp:
    @given(st.sampled_from(QLTP), st.floats(-10, 10))
    def test_even_and_quadratic(self, pq, t):
        assert mdp_rate(t, *pq) == mdp_rate(-t, *pq)
        assert mdp_rate(t, *pq) == pytest.approx(t * t * float(mdp_rate(1.0, *pq)), rel=1e-12, abs=1e-300)

    def test_values(self):
        assert mdp_rate(0.0, 2.0, 1.0) == 0.0
        assert mdp_rate(1.0, 2.0, 1.0) == pytest.approx(1 / (2 * clt_variance(2.0, 1.0)), rel=1e-14)

    def test_domain(self):
        with pytest.raises(DegenerateError):
            mdp_rate(1.0, 2.0, 2.0)
        with pytest.raises(DomainError):
            mdp_rate(1.0, 1.0, 2.0)

    @pytest.mark.parametrize("pq", QLTP)
    def test_bivariate_against_quadrature_covariance(self, pq):
        p, q = pq
        mp.mp.dps = 30
        f = lambda r: mp.quad(lambda x: x**r * mp.e ** (-x**p / p), [0, 1, 3, mp.inf])  # noqa: E731
        z = f(0)
        m = lambda r: f(r) / z  # noqa: E731
        c = np.array(
            [[float(m(2 * q) - m(q) ** 2), float(m(p + q) - m(q))], [float(m(p + q) - m(q)), float(m(2 * p) - 1)]]
        )
        ci = np.linalg.inv(c)
        for x, y in [(1.0, 0.0), (0.3, -0.7), (-2.0, 1.5)]:
            v = np.array([x, y])
            assert mdp_rate_bivariate(x, y, p, q) == pytest.approx(0.5 * v @ ci @ v, rel=1e-10)
        assert mdp_rate_bivariate(0.0, 0.0, p, q) == 0.0

    @pytest.mark.parametrize("pq", [(2.0, 1.0), (3.0, 1.0), (3.0, 2.0)])
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_contraction_line_search(self, pq, t):
        # brute force along the level line {<g, z> = t}
        g = mdp_core_direction(*pq)
        z0 = g * t / (g @ g)
        d = np.array([-g[1], g[0]])
        res = optimize.minimize_scalar(lambda s: float(mdp_rate_bivariate(*(z0 + s * d), *pq)), bracket=(-1, 1),
                                       tol=1e-14)
        got = mdp_constrained_min(t, *pq)
        assert got.value == pytest.approx(res.fun, rel=1e-9)
        assert got.value == pytest.approx(float(mdp_rate(t, *pq)), rel=1e-10)
        assert g @ np.array([got.x, got.y]) == pytest.approx(t, rel=1e-12)

    def test_printed_form_mismatch_located(self):
        pts = np.random.default_rng(0).normal(size=(6, 2))
        # q == 1: the explicit gamma form agrees with the matrix form
        assert compare_printed_form(2.0, 1.0, pts).agrees
        assert compare_printed_form(3.0, 1.0, pts).agrees
        for p, q in [(3.0, 2.0), (2.0, 0.5), (4.0, 3.0)]:
            r = compare_printed_form(p, q, pts)
            assert not r.agrees
            assert r.xx_ratio == pytest.approx(1.0, rel=1e-10)
            assert r.yy_ratio == pytest.approx(1.0, rel=1e-10)
            assert r.xy_ratio == pytest.approx(1.0 / q, rel=1e-10)

    @pytest.mark.parametrize("pq", QLTP)
    def test_printed_constant_negative(self, pq):
        assert printed_form_constant(*pq) < 0


class TestLdpClosed:
    @given(st.floats(0.05, 3.0), st.floats(0.1, 12.0))
    @example(0.3, 3.6875)  # large M_p(q): x0^q misses M_p(q) by ~10 ulp
    @example(0.1, 9.492033898305084)  # M_p(q) ~ 1e66: the log M_p(q) term dominates
    def test_qgtp_zero_and_infinite(self, p, dq):
        q = p + dq
        x0 = m_p(p, q) ** (1 / q)
        assert ldp_rate_qgtp(x0, p, q) == pytest.approx(0.0, abs=1e-12)
        assert ldp_rate_qgtp(0.99 * x0, p, q) == INF

    def test_qgtp_value_and_monotone(self):
        # (x^2 - M_1(2))^(1/2) with M_1(2) = 2
        assert ldp_rate_qgtp(2.0, 1.0, 2.0) == pytest.approx(math.sqrt(2.0), rel=1e-14)
        xs = np.linspace(math.sqrt(2), 4, 30)
        v = [float(ldp_rate_qgtp(x, 1.0, 2.0)) for x in xs]
        assert np.all(np.diff(v) > 0)

    def test_qgtp_domain(self):
        with pytest.raises(DomainError):
            ldp_rate_qgtp(1.0, 2.0, 1.0)

    @pytest.mark.parametrize("q", [1.2, 1.5, 1.8])
    def test_width_is_qgtp_at_conjugate(self, q):
        for x in (1.2, 1.6, 2.5):
            assert ldp_rate_width(x, q) == ldp_rate_qgtp(x, 2.0, holder_conjugate(q))
        with pytest.raises(DomainError):
            ldp_rate_width(1.0, 3.0)

    @pytest.mark.parametrize("p", [0.5, 1.0, 1.5])
    def test_projection_full_is_q2_rate(self, p):
        for y in (1.5, 2.0, 3.0):
            assert ldp_rate_projection(y, p, 1.0) == pytest.approx(float(ldp_rate_qgtp(y, p, 2.0)), rel=1e-13)
        assert ldp_rate_projection(0.5 * math.sqrt(m_p(p, 2)), p, 1.0) == INF
        with pytest.raises(DomainError):
            ldp_rate_projection(1.0, p, 0.0)

    def test_lambda_tilde(self):
        assert log_mgf_lambda_tilde(0.0, 2.0) == 0.0
        assert log_mgf_lambda_tilde(1 / 6, 3.0) == pytest.approx(math.log(2) / 3, rel=1e-14)
        assert log_mgf_lambda_tilde(1 / 3, 3.0) == INF
        assert log_mgf_lambda_tilde(1 / 3 - 1e-12, 3.0) > 8.0

    def test_lambda_tilde_quadrature(self):
        p, t = 1.5, 0.2
        mp.mp.dps = 30
        num = mp.quad(lambda x: mp.e ** (t * x**p - x**p / p), [0, 1, 5, mp.inf])
        den = mp.quad(lambda x: mp.e ** (-(x**p) / p), [0, 1, 5, mp.inf])
        assert log_mgf_lambda_tilde(t, p) == pytest.approx(float(mp.log(num / den)), rel=1e-12)

    @given(st.floats(0.3, 5.0), st.floats(0.01, 10.0))
    def test_conjugate_tilde_is_legendre(self, p, s):
        res = optimize.minimize_scalar(lambda t: -(t * s - float(log_mgf_lambda_tilde(t, p))),
                                       bounds=(-1e3, 1 / p - 1e-12), method="bounded", options={"xatol": 1e-12})
        assert conjugate_lambda_tilde(s, p) == pytest.approx(-res.fun, rel=1e-6, abs=1e-8)

    def test_conjugate_tilde_outside(self):
        assert conjugate_lambda_tilde(0.0, 2.0) == INF
        assert conjugate_lambda_tilde(1.0, 2.0) == 0.0


class TestLdpDiagonal:
    def test_dirac(self):
        assert ldp_rate_p_eq_q(1.0, 2.0, DiracRate()) == 0.0
        assert ldp_rate_p_eq_q(0.9, 2.0, DiracRate()) == INF

    @pytest.mark.parametrize("p", [0.7, 1.0, 2.0, 4.0])
    def test_exponential_half_mass_point(self, p):
        # inf_t conj(t) + t/p at x = 2^(-1/p) is log(2)/p
        assert ldp_rate_p_eq_q(2 ** (-1 / p), p, ExponentialRate(p)) == pytest.approx(math.log(2) / p, rel=1e-9)

    @given(st.floats(0.05, 1.0), st.floats(0.5, 4.0))
    def test_exponential_is_minus_log(self, x, p):
        # uniform ball: P(||Z||_p <= x) = x^n exactly
        assert ldp_rate_p_eq_q(x, p, ExponentialRate(p)) == pytest.approx(-math.log(x), rel=1e-7, abs=1e-9)

    def test_outside(self):
        assert ldp_rate_p_eq_q(1.2, 2.0, ExponentialRate(2.0)) == INF
        assert ldp_rate_p_eq_q(0.0, 2.0, ExponentialRate(2.0)) == INF


class TestMinimizeLogScale:
    def test_quadratic_in_log(self):
        x, v = minimize_log_scale(lambda t: (math.log(t) - 1.0) ** 2 + 0.5, 1e-3, 1e3)
        assert x == pytest.approx(math.e, rel=1e-6) and v == pytest.approx(0.5)

    def test_all_infinite(self):
        x, v = minimize_log_scale(lambda t: math.inf, 1e-3, 1e3, n_scan=5)
        assert math.isnan(x) and v == math.inf
