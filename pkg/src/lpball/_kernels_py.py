"""Pure-numpy fallback for the compiled power-sum kernel.

Consumes the bit stream in the same order as ``_kernels.pyx`` (row-major
gamma or normal draws) and repeats its compensated-summation sequence, one
column at a time across a block of rows.
"""
from __future__ import annotations

import numpy as np

R_ONE, R_TWO, R_HALF, R_GENERAL = 0, 1, 2, 3

# elements drawn per block; bounds fallback memory to ~8 MB per array
_BLOCK_ELEMS = 1 << 20


def _power(a, code, r):
    if code == R_ONE:
        return a
    if code == R_TWO:
        return a * a
    if code == R_HALF:
        return np.sqrt(a)
    return np.power(a, r)


def _neumaier_rows(x):
    """Compensated sum along axis 1, in column order."""
    s = np.zeros(x.shape[0])
    c = np.zeros(x.shape[0])
    for j in range(x.shape[1]):
        v = x[:, j]
        t = s + v
        big = np.abs(s) >= np.abs(v)
        c += np.where(big, (s - t) + v, (v - t) + s)
        s = t
    return s + c


def power_sums(bit_generator, n, k, p, q, ratio_code, normal_path, out):
    if out.shape[1] != 3:
        raise ValueError("out must have three columns")
    if k < 0 or k > n:
        raise ValueError("need 0 <= k <= n")
    gen = np.random.Generator(bit_generator)
    rows = out.shape[0]
    block = max(1, _BLOCK_ELEMS // n)
    shape = 1.0 / p
    r = q / p
    for r0 in range(0, rows, block):
        r1 = min(rows, r0 + block)
        if normal_path:
            z = gen.standard_normal(size=(r1 - r0, n))
            a = z * z
        else:
            a = p * gen.standard_gamma(shape, size=(r1 - r0, n))
        b = _power(a, ratio_code, r)
        out[r0:r1, 0] = _neumaier_rows(a)
        head = _neumaier_rows(b[:, :k]) if k > 0 else np.zeros(r1 - r0)
        tail = _neumaier_rows(b[:, k:]) if k < n else np.zeros(r1 - r0)
        out[r0:r1, 2] = head
        out[r0:r1, 1] = head + tail
