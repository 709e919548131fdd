"""Complex numbers carried with an explicit log-scale factor.

A ScaledComplex stores a value as ``mantissa * exp(log_scale)`` with the
mantissa normalized into [1/e, e].  Products of many gamma values and
exponentially small Bessel factors stay representable this way even when
the represented quantity is far outside binary64 range.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

__all__ = ["ScaledComplex", "scaled_sum"]


@dataclass(frozen=True)
class ScaledComplex:
    """A complex value ``mantissa * exp(log_scale)``.

    After construction ``|mantissa|`` lies in [1/e, e], or is exactly 0
    (in which case log_scale is 0).  log_scale is always finite.
    """

    mantissa: complex
    log_scale: float = 0.0

    def __post_init__(self):
        m = self.mantissa
        if m == 0:
            object.__setattr__(self, "mantissa", 0j)
            object.__setattr__(self, "log_scale", 0.0)
            return
        a = abs(m)
        if not math.isfinite(a) or not math.isfinite(self.log_scale):
            raise ValueError(f"non-finite scaled value: {m!r} * exp({self.log_scale!r})")
        shift = math.floor(math.log(a))
        if shift != 0:
            # two-step rescale: exp(-shift) itself can overflow for
            # subnormal mantissas
            f = math.exp(-0.5 * shift)
            object.__setattr__(self, "mantissa", (m * f) * f)
            object.__setattr__(self, "log_scale", self.log_scale + shift)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "ScaledComplex":
        return ScaledComplex(0j, 0.0)

    @staticmethod
    def one() -> "ScaledComplex":
        return ScaledComplex(1 + 0j, 0.0)

    @staticmethod
    def from_complex(value: complex) -> "ScaledComplex":
        return ScaledComplex(complex(value), 0.0)

    @staticmethod
    def from_log(w: complex) -> "ScaledComplex":
        """The value exp(w), with Re(w) absorbed into the scale."""
        w = complex(w)
        return ScaledComplex(cmath.exp(1j * w.imag), w.real)

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def log_abs(self) -> float:
        """log|value|, -inf for zero."""
        if self.is_zero:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.log_scale

    def abs(self) -> float:
        """|value| as a plain float; may over/underflow to inf/0."""
        if self.is_zero:
            return 0.0
        la = self.log_abs()
        if la > 709.0:
            return math.inf
        if la < -745.0:
            return 0.0
        return math.exp(la)

    def to_complex(self, extra_log: float = 0.0) -> complex:
        """The value times exp(extra_log), as a plain complex."""
        if self.is_zero:
            return 0j
        s = self.log_scale + extra_log
        if s > 700.0:
            raise OverflowError(f"scaled value overflows binary64 (log scale {s:.3g})")
        return self.mantissa * math.exp(s)

    # -- arithmetic --------------------------------------------------------

    def conjugate(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.conjugate(), self.log_scale)

    def scaled_by(self, dlog: float) -> "ScaledComplex":
        """Multiply by exp(dlog)."""
        if self.is_zero:
            return self
        return ScaledComplex(self.mantissa, self.log_scale + dlog)

    def __neg__(self) -> "ScaledComplex":
        return ScaledComplex(-self.mantissa, self.log_scale)

    def __mul__(self, other) -> "ScaledComplex":
        if isinstance(other, ScaledComplex):
            if self.is_zero or other.is_zero:
                return ScaledComplex.zero()
            return ScaledComplex(self.mantissa * other.mantissa,
                                 self.log_scale + other.log_scale)
        return ScaledComplex(self.mantissa * complex(other), self.log_scale)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledComplex":
        if isinstance(other, ScaledComplex):
            if other.is_zero:
                raise ZeroDivisionError("division by zero ScaledComplex")
            if self.is_zero:
                return ScaledComplex.zero()
            return ScaledComplex(self.mantissa / other.mantissa,
                                 self.log_scale - other.log_scale)
        return ScaledComplex(self.mantissa / complex(other), self.log_scale)

    def __add__(self, other: "ScaledComplex") -> "ScaledComplex":
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        # rescale the smaller term onto the larger one's scale
        if self.log_scale >= other.log_scale:
            big, small = self, other
        else:
            big, small = other, self
        d = small.log_scale - big.log_scale
        if d < -800.0:
            return big
        return ScaledComplex(big.mantissa + small.mantissa * math.exp(d),
                             big.log_scale)

    def __sub__(self, other: "ScaledComplex") -> "ScaledComplex":
        return self.__add__(-other if isinstance(other, ScaledComplex)
                            else ScaledComplex.from_complex(-other))

    # -- comparisons for tests ---------------------------------------------

    def rel_diff(self, other: "ScaledComplex") -> float:
        """|self - other| / |other|, computed without leaving scaled space."""
        if other.is_zero:
            return math.inf if not self.is_zero else 0.0
        diff = self - other
        if diff.is_zero:
            return 0.0
        return math.exp(diff.log_abs() - other.log_abs())

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return f"({self.mantissa.real:+.15e}{self.mantissa.imag:+.15e}j)*exp({self.log_scale:.6f})"


def scaled_sum(values: Iterable[ScaledComplex]) -> ScaledComplex:
    """Exactly rounded sum of ScaledComplex values at a common scale.

    All mantissas are brought to the scale of the largest term and the
    real/imaginary parts are added with math.fsum, so the reduction is an
    error-free transformation of the rescaled terms.  Iteration order does
    not change the result, but callers are expected to pass terms in a
    deterministic order anyway.
    """
    vals = [v for v in values if not v.is_zero]
    if not vals:
        return ScaledComplex.zero()
    top = max(v.log_scale for v in vals)
    re = []
    im = []
    for v in vals:
        d = v.log_scale - top
        if d < -800.0:
            continue
        f = math.exp(d)
        re.append(v.mantissa.real * f)
        im.append(v.mantissa.imag * f)
    return ScaledComplex(complex(math.fsum(re), math.fsum(im)), top)
