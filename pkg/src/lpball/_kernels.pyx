# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled power-sum kernel.

For each output row, draws ``n`` p-generalized Gaussian magnitudes from a
numpy BitGenerator and accumulates (compensated) ``sum |Y|^p``,
``sum |Y|^q`` and ``sum_{i<k} |Y|^q``. No n-vector is ever materialised.

The draw order and floating-point operation sequence mirror
``lpball._kernels_py`` exactly, so both backends agree bit for bit when
libm and numpy agree on ``pow``.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport fabs, pow, sqrt
from numpy.random cimport bitgen_t


cdef extern from "numpy/random/distributions.h":
    double random_standard_gamma(bitgen_t *bitgen_state, double shape) nogil
    double random_standard_normal(bitgen_t *bitgen_state) nogil


# exponent-ratio codes shared with the pure-Python backend
DEF R_ONE = 0
DEF R_TWO = 1
DEF R_HALF = 2
DEF R_GENERAL = 3


cdef inline void _neumaier(double *s, double *c, double x) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        c[0] += (s[0] - t) + x
    else:
        c[0] += (x - t) + s[0]
    s[0] = t


cdef inline double _power(double a, int code, double r) noexcept nogil:
    if code == R_ONE:
        return a
    if code == R_TWO:
        return a * a
    if code == R_HALF:
        return sqrt(a)
    return pow(a, r)


cdef bitgen_t *_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("expected a numpy BitGenerator")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


def power_sums(object bit_generator, Py_ssize_t n, Py_ssize_t k, double p, double q,
               int ratio_code, bint normal_path, double[:, ::1] out):
    """Fill ``out[i] = (sum |Y|^p, sum |Y|^q, sum_{j<k} |Y|^q)`` for each row."""
    cdef bitgen_t *rng = _bitgen(bit_generator)
    cdef Py_ssize_t rows = out.shape[0]
    cdef Py_ssize_t i, j
    cdef double shape = 1.0 / p
    cdef double r = q / p
    cdef double a, b, z
    cdef double sp, cp, sh, ch, st, ct
    if out.shape[1] != 3:
        raise ValueError("out must have three columns")
    if k < 0 or k > n:
        raise ValueError("need 0 <= k <= n")
    with bit_generator.lock, nogil:
        for i in range(rows):
            sp = 0.0; cp = 0.0
            sh = 0.0; ch = 0.0
            st = 0.0; ct = 0.0
            for j in range(n):
                if normal_path:
                    z = random_standard_normal(rng)
                    a = z * z
                else:
                    a = p * random_standard_gamma(rng, shape)
                b = _power(a, ratio_code, r)
                _neumaier(&sp, &cp, a)
                if j < k:
                    _neumaier(&sh, &ch, b)
                else:
                    _neumaier(&st, &ct, b)
            out[i, 0] = sp + cp
            out[i, 2] = sh + ch
            out[i, 1] = (sh + ch) + (st + ct)
