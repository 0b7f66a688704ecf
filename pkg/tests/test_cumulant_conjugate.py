import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize

from lpball.errors import DomainError
from lpball.ratefun import (
    INF,
    conjugate_region,
    lambda_derivatives,
    lambda_value,
    legendre_fenchel,
    log_mgf_lambda,
)
from lpball.specfun import covariance_matrix, m_p

PQ = [(2.0, 1.0), (3.0, 2.0), (3.0, 1.0), (1.0, 0.5), (7.0, 2.0), (0.8, 0.3)]


def lambda_oracle(t1, t2, p, q):
    """log E exp(t1 |Y|^q + t2 |Y|^p) by mpmath quadrature, split at the integrand peak."""
    mp.mp.dps = 30
    t1, t2, p, q = (mp.mpf(v) for v in (t1, t2, p, q))
    a = 1 / p - t2
    log_f = lambda x: t1 * x**q - a * x**p  # noqa: E731
    # peak of x -> t1 x^q - a x^p, if any, and the point where the tail is negligible
    peak = (t1 * q / (a * p)) ** (1 / (p - q)) if t1 > 0 else mp.mpf(0)
    edges = sorted({mp.mpf(0), peak / 2, peak, 2 * peak + 1, 4 * peak + 5})
    edges = [e for e in edges if e >= 0] + [mp.inf]
    num = mp.quad(lambda x: mp.e ** (log_f(x) - log_f(peak)), edges)
    den = mp.quad(lambda x: mp.e ** (-(x**p) / p), [0, 1, 5, mp.inf])
    return float(mp.log(num) + log_f(peak) - mp.log(den))


class TestLambda:
    @pytest.mark.parametrize("pq", PQ)
    @pytest.mark.parametrize("t", [(0.0, 0.0), (1.5, -0.7), (-3.0, 0.1), (5.0, -10.0), (3.0, -0.05), (40.0, -0.2)])
    def test_quadrature_oracle(self, pq, t):
        p, q = pq
        t1, t2 = t[0], min(t[1], 1 / p - 0.05)
        assert lambda_value(t1, t2, p, q) == pytest.approx(lambda_oracle(t1, t2, p, q), rel=1e-11, abs=1e-12)

    def test_near_edge(self):
        p, q = 2.0, 1.0
        for t in [(-10.0, 0.5 - 1e-3), (3.0, 0.5 - 1e-3)]:
            assert lambda_value(*t, p, q) == pytest.approx(lambda_oracle(*t, p, q), rel=1e-10)

    @pytest.mark.parametrize("pq", PQ)
    def test_origin(self, pq):
        assert abs(lambda_value(0.0, 0.0, *pq)) < 1e-12
        d = lambda_derivatives(0.0, 0.0, *pq)
        assert d.grad == pytest.approx([m_p(*pq), 1.0], rel=1e-10)
        c = covariance_matrix(*pq)
        assert d.hess == pytest.approx(c.as_array(), rel=1e-8)

    def test_outside_domain(self):
        assert lambda_value(1.0, 0.5, 2.0, 1.0) == math.inf
        assert log_mgf_lambda(-1.0, 0.6, 2.0, 1.0) == INF
        with pytest.raises(DomainError):
            lambda_derivatives(0.0, 0.5, 2.0, 1.0)

    @pytest.mark.parametrize("pq", PQ[:4])
    def test_derivatives_match_differences(self, pq):
        p, q = pq
        t = np.array([0.7, -0.4])
        h = 1e-5
        d = lambda_derivatives(*t, p, q)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            fd = (lambda_value(*(t + e), p, q) - lambda_value(*(t - e), p, q)) / (2 * h)
            assert d.grad[i] == pytest.approx(fd, rel=1e-7)
            gd = (lambda_derivatives(*(t + e), p, q).grad - lambda_derivatives(*(t - e), p, q).grad) / (2 * h)
            assert d.hess[:, i] == pytest.approx(gd, rel=1e-6)

    @given(st.floats(-5, 5), st.floats(-3, 0.45), st.floats(-5, 5), st.floats(-3, 0.45))
    def test_convex(self, a1, a2, b1, b2):
        p, q = 2.0, 1.0
        mid = lambda_value((a1 + b1) / 2, (a2 + b2) / 2, p, q)
        assert mid <= 0.5 * (lambda_value(a1, a2, p, q) + lambda_value(b1, b2, p, q)) + 1e-12


class TestConjugate:
    def test_zero_at_mean(self):
        for p, q in PQ[:3]:
            cp = legendre_fenchel(m_p(p, q), 1.0, p, q)
            assert cp.value < 1e-12
            assert cp.argmax == pytest.approx((0.0, 0.0), abs=1e-7)

    def test_fenchel_young_grid(self):
        p, q = 2.0, 1.0
        for t1 in np.linspace(-2, 2, 5):
            for t2 in np.linspace(-2, 0.4, 5):
                d = lambda_derivatives(t1, t2, p, q)
                cp = legendre_fenchel(d.grad[0], d.grad[1], p, q)
                assert cp.converged
                assert cp.value == pytest.approx(t1 * d.grad[0] + t2 * d.grad[1] - d.value, abs=1e-9)
                assert cp.argmax == pytest.approx((t1, t2), abs=1e-6)

    @pytest.mark.parametrize("pq, s", [((2.0, 1.0), (0.9, 1.3)), ((3.0, 2.0), (0.5, 0.45)), ((3.0, 1.0), (1.0, 1.5))])
    def test_brute_force_maximum(self, pq, s):
        p, q = pq
        region = conjugate_region(*s, p, q)
        assert region == "interior"

        def neg(t):
            if t[1] >= 1 / p:
                return 1e300
            return -(t[0] * s[0] + t[1] * s[1] - lambda_value(t[0], t[1], p, q))

        best = min(
            (optimize.minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14,
                                                                       "maxiter": 4000})
             for x0 in ([0.0, 0.0], [1.0, -1.0], [-1.0, 0.1])),
            key=lambda r: r.fun,
        )
        assert legendre_fenchel(*s, p, q).value == pytest.approx(-best.fun, rel=1e-7, abs=1e-10)

    def test_outside_hull(self):
        for s in [(-0.1, 1.0), (1.0, 0.9), (0.0, 1.0)]:
            cp = legendre_fenchel(*s, 2.0, 1.0)
            assert cp.value == INF and cp.status == "unbounded"

    def test_boundary_limit_from_inside(self):
        # on the edge region the supremum is approached as t2 -> 1/p
        p, q, s = 2.0, 1.0, (0.5, 1.0)
        assert conjugate_region(*s, p, q) == "boundary"
        cp = legendre_fenchel(*s, p, q)
        assert cp.converged and cp.status == "boundary"
        t2 = 1 / p - 1e-9
        res = optimize.minimize_scalar(lambda t1: -(t1 * s[0] + t2 * s[1] - lambda_value(t1, t2, p, q)),
                                       bounds=(-50, 0), method="bounded", options={"xatol": 1e-12})
        assert cp.value == pytest.approx(-res.fun, abs=1e-6)

    def test_continuous_across_edge(self):
        p, q, s1 = 2.0, 1.0, 0.5
        k = m_p(q, p) * s1 ** (p / q)
        inner = legendre_fenchel(s1, k * (1 - 1e-6), p, q)
        edge = legendre_fenchel(s1, k, p, q)
        assert inner.converged
        assert inner.value == pytest.approx(edge.value, abs=1e-5)

    @pytest.mark.parametrize("s", [(0.008, 1e-4), (40.0, 1778.0), (0.9455, 1.0)])
    def test_hard_points_converge(self, s):
        cp = legendre_fenchel(*s, 2.0, 1.0)
        assert cp.converged

    @given(st.floats(0.05, 3.0), st.floats(1.05, 3.0))
    def test_nonnegative_and_converged(self, s1, ratio):
        s2 = ratio * s1**2
        cp = legendre_fenchel(s1, s2, 2.0, 1.0)
        assert cp.converged and cp.value >= 0

    def test_domain(self):
        with pytest.raises(DomainError):
            legendre_fenchel(1.0, 1.0, 1.0, 2.0)
