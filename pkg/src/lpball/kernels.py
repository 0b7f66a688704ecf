"""Backend selection for the power-sum kernel.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Setting ``LPBALL_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _kernels_py

__all__ = ["BACKEND", "available_backends", "power_sums", "ratio_code"]


def _load_compiled() -> ModuleType | None:
    if os.environ.get("LPBALL_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_COMPILED = _load_compiled()
BACKEND = "cython" if _COMPILED is not None else "python"


def available_backends() -> dict[str, ModuleType]:
    out = {"python": _kernels_py}
    if _COMPILED is not None:
        out["cython"] = _COMPILED
    return out


def ratio_code(p: float, q: float) -> int:
    r = q / p
    if r == 1.0:
        return _kernels_py.R_ONE
    if r == 2.0:
        return _kernels_py.R_TWO
    if r == 0.5:
        return _kernels_py.R_HALF
    return _kernels_py.R_GENERAL


def power_sums(
    bit_generator: np.random.BitGenerator,
    n: int,
    rows: int,
    p: float,
    q: float,
    k: int | None = None,
    backend: str | None = None,
) -> np.ndarray:
    """Draw ``rows`` independent vectors of ``n`` p-generalized Gaussians.

    Returns an array of shape ``(rows, 3)`` holding, per vector,
    ``sum |Y_i|^p``, ``sum |Y_i|^q`` and ``sum_{i<=k} |Y_i|^q``.
    For ``p == 2`` the magnitudes come from standard normals, which have
    exactly the same law and are several times cheaper than gamma variates.
    """
    if k is None:
        k = n
    mod = available_backends()[backend] if backend else (_COMPILED or _kernels_py)
    out = np.empty((rows, 3))
    mod.power_sums(bit_generator, int(n), int(k), float(p), float(q), ratio_code(p, q), p == 2.0, out)
    return out
