"""Exact rational helpers: parsing, canonical text form, interval selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

RationalLike = Union[Fraction, int, str]


def q(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction.

    Strings may be ``"p/q"``, integers, or decimals (parsed exactly).
    Floats are refused: they would silently smuggle binary rounding into
    every downstream computation.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational")
        return Fraction(text)
    raise TypeError(f"cannot read {value!r} as an exact rational")


def fmt(value: Fraction) -> str:
    """Canonical ``p/q`` text (integers keep the ``/1``)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def simplest_between(lo: Fraction, hi: Optional[Fraction]) -> Fraction:
    """Smallest-denominator rational in the open interval (lo, hi).

    ``hi=None`` means +infinity.  Ties on denominator go to the smaller
    numerator, which for lo >= 0 is what Stern-Brocot descent produces.
    """
    lo = Fraction(lo)
    if hi is not None:
        hi = Fraction(hi)
        if not lo < hi:
            raise ValueError(f"empty interval ({lo}, {hi})")
    if lo < 0:
        if hi is None or hi > 0:
            # 0 has denominator 1; the only integer rivals are negative,
            # and the smaller numerator wins, so pick the least integer.
            first = math.floor(lo) + 1
            return Fraction(first)
        # entirely negative: mirror
        return -simplest_between(-hi, -lo)
    base = math.floor(lo)
    if hi is None or base + 1 < hi:
        return Fraction(base + 1)
    a, b = lo - base, hi - base
    # 0 <= a < b <= 1 and no integer strictly inside
    inv_hi = Fraction(1) / b
    inv_lo = None if a == 0 else Fraction(1) / a
    return base + 1 / simplest_between(inv_hi, inv_lo)


@dataclass(frozen=True)
class Interval:
    """A real interval with explicit open/closed ends."""

    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return self.lo_open or self.hi_open
        return False

    def __and__(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif other.lo > self.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if self.hi < other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif other.hi < self.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def __contains__(self, x: Fraction) -> bool:
        if x < self.lo or (x == self.lo and self.lo_open):
            return False
        if x > self.hi or (x == self.hi and self.hi_open):
            return False
        return True

    def pick(self) -> Fraction:
        """Deterministic member: the simplest interior point, else an endpoint."""
        if self.empty():
            raise ValueError(f"empty interval {self}")
        if self.lo == self.hi:
            return self.lo
        return simplest_between(self.lo, self.hi)


def open_interval(lo: Fraction, hi: Fraction) -> Interval:
    return Interval(Fraction(lo), Fraction(hi), True, True)


def split_within(total: Fraction, first: Interval, second: Interval) -> tuple[Fraction, Fraction]:
    """Split ``total`` as a + b with a in ``first`` and b in ``second``.

    The first coordinate is chosen by the interval-selection rule; the
    second is whatever remains.
    """
    total = Fraction(total)
    # b = total - a in second  <=>  a in [total - second.hi, total - second.lo]
    mirrored = Interval(total - second.hi, total - second.lo, second.hi_open, second.lo_open)
    feasible = first & mirrored
    if feasible.empty():
        raise ValueError(f"cannot split {total} into {first} + {second}")
    a = feasible.pick()
    return a, total - a


def interval_sum(parts: list[Interval]) -> Interval:
    """Minkowski sum of intervals."""
    lo = sum((p.lo for p in parts), Fraction(0))
    hi = sum((p.hi for p in parts), Fraction(0))
    return Interval(lo, hi, any(p.lo_open for p in parts), any(p.hi_open for p in parts))


def split_many(total: Fraction, parts: list[Interval]) -> tuple[Fraction, ...]:
    """Split ``total`` into one value per interval, choosing left to right.

    With two intervals this is :func:`split_within`.
    """
    total = Fraction(total)
    if len(parts) == 1:
        if total not in parts[0]:
            raise ValueError(f"cannot place {total} in {parts[0]}")
        return (total,)
    out = []
    remaining = total
    for i, part in enumerate(parts[:-1]):
        rest = interval_sum(parts[i + 1:])
        a, _ = split_within(remaining, part, rest)
        out.append(a)
        remaining -= a
    if remaining not in parts[-1]:
        raise ValueError(f"cannot split {total} over {parts}")
    out.append(remaining)
    return tuple(out)
