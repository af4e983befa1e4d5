"""Base-b digit arithmetic.

Fractional digit vectors are stored most-significant-first (digit i has
weight base**-(i+1)); integer base-b expansions are stored
least-significant-first (coefficient m has weight base**m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DigitVector",
    "BaseExpansion",
    "default_depth",
    "radical_inverse",
    "expand_integer",
    "digits_to_value",
    "value_to_digits",
]


def default_depth(base: int) -> int:
    """Digit depth giving at least 32 bits of resolution in any base."""
    if base == 2:
        return 32
    return math.ceil(32 * math.log(2) / math.log(base))


@dataclass(frozen=True)
class DigitVector:
    """Fractional digits of a point coordinate in [0, 1), most significant first."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if len(self.digits) < 1:
            raise ValueError("need at least one digit")
        for d in self.digits:
            if not 0 <= d < self.base:
                raise ValueError(f"digit {d} out of range for base {self.base}")

    @property
    def depth(self) -> int:
        return len(self.digits)

    def value(self) -> float:
        return digits_to_value(self)


@dataclass(frozen=True)
class BaseExpansion:
    """Base-b expansion of a positive integer, least significant first."""

    base: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if not self.coefficients:
            raise ValueError("empty expansion")
        if self.coefficients[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        for c in self.coefficients:
            if not 0 <= c < self.base:
                raise ValueError(f"coefficient {c} out of range for base {self.base}")

    @property
    def order(self) -> int:
        """Index k of the leading coefficient, i.e. floor(log_base n)."""
        return len(self.coefficients) - 1

    def value(self) -> int:
        return sum(c * self.base**m for m, c in enumerate(self.coefficients))


def radical_inverse(n: int, base: int, depth: int) -> float:
    """Van der Corput radical inverse of ``n`` in the given base.

    Reflects the base-b digits of ``n`` about the radix point:
    returns sum(d_i * base**-(i+1)) with d_0 the least significant digit
    of ``n``.  Raises if ``depth`` cannot hold all digits of ``n``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if base < 2:
        raise ValueError("base must be >= 2")
    if n >= base**depth:
        raise ValueError(f"digit overflow: {n} needs more than {depth} base-{base} digits")
    v = 0.0
    scale = 1.0 / base
    while n > 0:
        n, d = divmod(n, base)
        v += d * scale
        scale /= base
    return v


def expand_integer(n: int, base: int) -> BaseExpansion:
    """Base-b expansion of a positive integer, least significant coefficient first."""
    if n < 1:
        raise ValueError("empty expansion: n must be >= 1")
    if base < 2:
        raise ValueError("base must be >= 2")
    coeffs = []
    while n > 0:
        n, c = divmod(n, base)
        coeffs.append(c)
    return BaseExpansion(base=base, coefficients=tuple(coeffs))


def digits_to_value(dv: DigitVector) -> float:
    """Evaluate sum(digits[i] * base**-(i+1)); exact for base-2 depths <= 53."""
    v = 0.0
    for d in reversed(dv.digits):
        v = (v + d) / dv.base
    return v


def value_to_digits(x: float, base: int, depth: int) -> DigitVector:
    """First ``depth`` base-b digits of ``x``.

    Truncation is defined through the float product: the digits are those of
    floor(x * base**depth) as computed in double precision, so the round trip
    digits_to_value(value_to_digits(x, b, M)) equals floor(x * b**M) / b**M.
    """
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x must be in [0, 1), got {x}")
    n = int(x * base**depth)
    if n >= base**depth:  # guard against rounding up to 1.0
        n = base**depth - 1
    digs = []
    for _ in range(depth):
        n, d = divmod(n, base)
        digs.append(d)
    return DigitVector(base=base, digits=tuple(reversed(digs)))
