"""Extended reals for rate functions: finite floats plus an absorbing +inf.

``ExtReal`` subclasses ``float`` so that values drop straight into numpy
arrays, comparisons and formatting. Operations whose result is undefined
(``inf - inf``, ``0 * inf``) or would leave the codomain (``-inf``, NaN)
raise instead of silently producing NaN.
"""
from __future__ import annotations

import math

from ..errors import NumericalError

__all__ = ["ExtReal", "INF", "ext", "ext_min", "format_ext"]


class ExtReal(float):
    """A real number or ``+inf``. Totally ordered like ``float``."""

    __slots__ = ()

    def __new__(cls, value=0.0):
        v = float(value)
        if math.isnan(v):
            raise NumericalError("NaN is not an extended real")
        if v == -math.inf:
            raise NumericalError("-inf is outside the codomain of a rate function")
        return super().__new__(cls, v)

    @property
    def is_inf(self) -> bool:
        return math.isinf(self)

    @property
    def is_finite(self) -> bool:
        return not math.isinf(self)

    def __add__(self, other):
        return ExtReal(float(self) + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        o = float(other)
        if math.isinf(o):
            raise NumericalError(f"undefined subtraction {float(self)!r} - inf")
        return ExtReal(float(self) - o)

    def __rsub__(self, other):
        if self.is_inf:
            raise NumericalError(f"undefined subtraction {float(other)!r} - inf")
        return ExtReal(float(other) - float(self))

    def __mul__(self, other):
        o = float(other)
        if (self.is_inf or math.isinf(o)) and (o == 0.0 or float(self) == 0.0):
            raise NumericalError("undefined product 0 * inf")
        return ExtReal(float(self) * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ExtReal(float(self) / float(other))

    def __neg__(self):
        if self.is_inf:
            raise NumericalError("-inf is outside the codomain of a rate function")
        return ExtReal(-float(self))

    def __repr__(self) -> str:
        return f"ExtReal({format_ext(self)})"

    def __str__(self) -> str:
        return format_ext(self)


INF = ExtReal(math.inf)


def ext(value) -> ExtReal:
    return value if isinstance(value, ExtReal) else ExtReal(value)


def ext_min(*values) -> ExtReal:
    """Minimum of extended reals; ``+inf`` is the identity."""
    return ext(min((float(v) for v in values), default=math.inf))


def format_ext(value: float) -> str:
    """Round-trip text form: ``inf`` or 17 significant digits."""
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")
