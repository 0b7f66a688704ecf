import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpball import _kernels_py
from lpball.kernels import BACKEND, available_backends, power_sums, ratio_code

BACKENDS = sorted(available_backends())


def _sums(backend, n, rows, p, q, k=None, seed=3):
    return power_sums(np.random.PCG64(seed), n, rows, p, q, k=k, backend=backend)


class TestRatioCode:
    @pytest.mark.parametrize(
        "p, q, code",
        [(2, 2, _kernels_py.R_ONE), (1, 2, _kernels_py.R_TWO), (2, 1, _kernels_py.R_HALF), (2, 3, _kernels_py.R_GENERAL)],
    )
    def test_codes(self, p, q, code):
        assert ratio_code(p, q) == code


class TestPowerSums:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_columns_match_direct_computation(self, backend):
        # replay the same draws and sum them directly
        n, rows, p, q, k = 50, 20, 1.5, 0.7, 13
        out = _sums(backend, n, rows, p, q, k=k)
        g = np.random.Generator(np.random.PCG64(3))
        a = p * g.standard_gamma(1 / p, size=(rows, n))
        b = a ** (q / p)
        assert np.allclose(out[:, 0], a.sum(axis=1), rtol=1e-13)
        assert np.allclose(out[:, 1], b.sum(axis=1), rtol=1e-13)
        assert np.allclose(out[:, 2], b[:, :k].sum(axis=1), rtol=1e-13)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_normal_path(self, backend):
        n, rows = 40, 10
        out = _sums(backend, n, rows, 2.0, 1.0)
        z = np.random.Generator(np.random.PCG64(3)).standard_normal((rows, n))
        assert np.allclose(out[:, 0], (z * z).sum(axis=1), rtol=1e-13)
        assert np.allclose(out[:, 1], np.abs(z).sum(axis=1), rtol=1e-13)

    @pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
    @pytest.mark.parametrize("p, q", [(2.0, 1.0), (1.0, 2.0), (2.0, 4.0), (3.0, 3.0)])
    def test_backends_bit_identical_on_ratio_codes(self, p, q):
        a = _sums("cython", 300, 40, p, q, k=100)
        b = _sums("python", 300, 40, p, q, k=100)
        assert np.array_equal(a, b)

    @pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
    @given(st.floats(0.3, 5.0), st.floats(0.3, 5.0), st.integers(1, 200))
    def test_backends_agree_general(self, p, q, n):
        a = _sums("cython", n, 5, p, q, k=n // 2)
        b = _sums("python", n, 5, p, q, k=n // 2)
        assert np.allclose(a, b, rtol=1e-12, atol=0)

    def test_head_bounds(self):
        out = _sums(None, 30, 4, 2.0, 1.0, k=0)
        assert np.all(out[:, 2] == 0)
        full = _sums(None, 30, 4, 2.0, 1.0, k=30)
        assert np.array_equal(full[:, 1], full[:, 2])

    def test_default_backend(self):
        assert BACKEND in ("cython", "python")

    def test_invalid_head(self):
        with pytest.raises(ValueError):
            _sums("python", 5, 2, 1.0, 1.0, k=6)
