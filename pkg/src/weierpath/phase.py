"""Exact trigonometric phase reduction for arguments of the form w*pi*t.

Frequencies in this package grow like b^n, so for moderate n the product
w*t is far beyond the range where a double resolves phase at all.  Every
reduction here therefore happens on exact rationals: a time is a Fraction
(binary floats are dyadic rationals and convert exactly), the scaled phase
w*t is reduced mod 2 with arbitrary-precision integers, and only the
reduced argument in [0, 2) ever reaches libm.  The returned trig value is
then accurate to an ulp or so for any frequency.

Three evaluation paths share this reduction:

* scalar: one Fraction time, one big-int frequency;
* table: a dyadic grid k/den with small den, where cos(pi*r/den) is
  precomputed for every residue r in [0, 2*den);
* affine: uniform node families (start + j*step), reduced blockwise so the
  inner arithmetic stays within int64.

All functions are pure; tables are immutable after construction.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import ParameterError

__all__ = [
    "to_fraction",
    "unit_time",
    "phase_mod2",
    "cos_pi",
    "sin_pi",
    "cos_pi_scaled",
    "sin_pi_scaled",
    "TrigTable",
    "AffineNodes",
]


def to_fraction(value) -> Fraction:
    """Convert a time-like value (Fraction, int, float, or 'p/q' string) exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParameterError("time must be numeric, got bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ParameterError("time must be finite")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse rational time {value!r}") from exc
    raise ParameterError(f"unsupported time type {type(value).__name__}")


def unit_time(value) -> Fraction:
    """Validate and convert a time in the unit interval [0, 1]."""
    t = to_fraction(value)
    if not (0 <= t <= 1):
        raise ParameterError(f"time {t} outside the interval [0, 1]")
    return t


def phase_mod2(scale: int, t: Fraction) -> Fraction:
    """Reduce scale*t mod 2 exactly; result in [0, 2)."""
    num = (scale * t.numerator) % (2 * t.denominator)
    return Fraction(num, t.denominator)


def cos_pi(x: Fraction) -> float:
    """cos(pi*x) for rational x, exact at half-integer multiples.

    The argument is folded into [0, 1/2] before the libm call so the result
    is monotone-accurate near the zeros and extremes of the cosine.
    """
    x %= 2
    if x > 1:
        x = 2 - x
    # now x in [0, 1]
    sign = 1.0
    if 2 * x > 1:
        x = 1 - x
        sign = -1.0
    if x == 0:
        return sign
    if 2 * x == 1:
        return 0.0
    return sign * math.cos(math.pi * float(x))


def sin_pi(x: Fraction) -> float:
    """sin(pi*x) for rational x, exact at half-integer multiples."""
    x %= 2
    sign = 1.0
    if x > 1:
        x -= 1
        sign = -1.0
    # now x in [0, 1]
    if 2 * x > 1:
        x = 1 - x
    if x == 0:
        return 0.0
    if 2 * x == 1:
        return sign
    return sign * math.sin(math.pi * float(x))


def cos_pi_scaled(scale: int, t) -> float:
    """cos(scale*pi*t) with exact reduction of the phase scale*t mod 2."""
    return cos_pi(phase_mod2(scale, to_fraction(t)))


def sin_pi_scaled(scale: int, t) -> float:
    """sin(scale*pi*t) with exact reduction of the phase scale*t mod 2."""
    return sin_pi(phase_mod2(scale, to_fraction(t)))


_MAX_TABLE_DEN = 1 << 20


class TrigTable:
    """Lookup table of cos/sin(pi*r/den) for all residues r in [0, 2*den).

    Serves grids of rationals with common denominator ``den``: the value
    cos(w*pi*k/den) is ``cos_at((w mod 2den) * k mod 2den)`` with exact
    integer arithmetic throughout.
    """

    def __init__(self, den: int):
        if not (1 <= den <= _MAX_TABLE_DEN):
            raise ParameterError(f"table denominator {den} outside [1, {_MAX_TABLE_DEN}]")
        self.den = den
        r = np.arange(2 * den, dtype=np.float64)
        ang = (np.pi / den) * r
        cos_vals = np.cos(ang)
        sin_vals = np.sin(ang)
        # pin the quarter-period values that are exact in rational arithmetic
        cos_vals[0] = 1.0
        sin_vals[0] = 0.0
        if den % 2 == 0:
            cos_vals[den // 2] = 0.0
            sin_vals[den // 2] = 1.0
            cos_vals[3 * den // 2] = 0.0
            sin_vals[3 * den // 2] = -1.0
        cos_vals[den] = -1.0
        sin_vals[den] = 0.0
        cos_vals.setflags(write=False)
        sin_vals.setflags(write=False)
        self._cos = cos_vals
        self._sin = sin_vals

    def residues(self, scale: int, idx: np.ndarray) -> np.ndarray:
        """Residues of scale*idx mod 2*den for integer grid indices idx."""
        two_den = 2 * self.den
        c = scale % two_den
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size and (int(idx.max(initial=0)) * c) >= (1 << 62):
            # keep the modular product inside int64
            return ((idx % two_den) * c) % two_den if c < (1 << 31) else np.array(
                [(int(i) * c) % two_den for i in idx], dtype=np.int64
            )
        return (idx * c) % two_den

    def cos_at(self, residues: np.ndarray) -> np.ndarray:
        return self._cos[residues]

    def sin_at(self, residues: np.ndarray) -> np.ndarray:
        return self._sin[residues]

    def cos_scaled(self, scale: int, idx: np.ndarray) -> np.ndarray:
        return self._cos[self.residues(scale, idx)]

    def sin_scaled(self, scale: int, idx: np.ndarray) -> np.ndarray:
        return self._sin[self.residues(scale, idx)]


class AffineNodes:
    """Exact uniform node family t_j = start + j*step, j = 0..count-1.

    Phases scale*t_j are reduced mod 2 with integer arithmetic.  When the
    common denominator is small enough the reduction is vectorized in
    int64; otherwise it falls back to exact per-node big-int arithmetic.
    """

    def __init__(self, start, step, count: int):
        if count < 1:
            raise ParameterError("node count must be >= 1")
        start = to_fraction(start)
        step = to_fraction(step)
        den = math.lcm(start.denominator, step.denominator)
        self.den = den
        self.num0 = start.numerator * (den // start.denominator)
        self.dnum = step.numerator * (den // step.denominator)
        self.count = count

    def times(self) -> np.ndarray:
        """Node positions rounded to double (for reporting only)."""
        j = np.arange(self.count, dtype=np.float64)
        return (self.num0 + j * self.dnum) / self.den

    def fraction(self, j: int) -> Fraction:
        return Fraction(self.num0 + j * self.dnum, self.den)

    def _residues(self, scale: int) -> np.ndarray:
        two_den = 2 * self.den
        r0 = (scale * self.num0) % two_den
        c = (scale * self.dnum) % two_den
        out = np.empty(self.count, dtype=np.float64)
        if two_den <= (1 << 61):
            # blockwise so base + j*c stays below 2^63 in int64
            block = max(1, ((1 << 62) - two_den) // max(c, 1))
            j0 = 0
            while j0 < self.count:
                n = min(block, self.count - j0)
                base = (r0 + j0 * c) % two_den
                jj = np.arange(n, dtype=np.int64)
                out[j0 : j0 + n] = (base + jj * c) % two_den
                j0 += n
        else:
            acc = r0
            for j in range(self.count):
                out[j] = acc
                acc = (acc + c) % two_den
        return out

    def angles(self, scale: int) -> np.ndarray:
        """Reduced arguments scale*pi*t_j mod 2*pi, in [0, 2*pi)."""
        return (np.pi / self.den) * self._residues(scale)

    def cos_scaled(self, scale: int) -> np.ndarray:
        return np.cos(self.angles(scale))

    def sin_scaled(self, scale: int) -> np.ndarray:
        return np.sin(self.angles(scale))
