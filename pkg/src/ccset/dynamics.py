"""One-dimensional dynamics of the iterated-center map with base (0, 1), (0, -1).

The third point of the isosceles triangle lives on the x-axis at
(cot(pi * v), 0) where v is the fraction alpha/pi.  Taking the center of the
circle through the two base points and the current point doubles the angle,
which is the shift map on the binary expansion of v.  All orbit bookkeeping
therefore happens in angle space, where shifts are exact; cot is applied
only to produce output coordinates.  Iterating the rational-function form of
the map in floating point would lose the true orbit after ~50 steps, which
is why no operation here ever does that.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .geometry import Point, circumcenter

BASE_TOP = Point(0.0, 1.0)
BASE_BOTTOM = Point(0.0, -1.0)

_WINDOW_BITS = 64
_HALF = Fraction(1, 2)


class DynamicsError(Exception):
    pass


class UndefinedCotangent(DynamicsError):
    """The angle fraction is 0 (mod 1): cot is undefined."""


class UnsupportedPeriodOne(DynamicsError):
    """Period exactly 1 would need a fixed point of doubling, which is the
    fraction 0, where cot is undefined.  Rejected rather than guessed."""


@dataclass(frozen=True)
class RationalAngle:
    """The number alpha/pi as an exact fraction in [0, 1)."""

    fraction: Fraction

    def __post_init__(self) -> None:
        f = Fraction(self.fraction)
        if not 0 <= f < 1:
            raise ValueError(f"angle fraction {f} outside [0, 1)")
        object.__setattr__(self, "fraction", f)

    def value(self) -> float:
        return float(self.fraction)


@dataclass(frozen=True)
class BitStreamAngle:
    """A number in [0, 1) given by a finite prefix of its binary expansion.

    ``exact`` means the known bits are the entire expansion (all later bits
    are zero), so termination is decidable.  Otherwise the stream is a
    truncation and classification beyond the horizon stays undetermined.
    Shifting advances ``offset`` instead of copying bits.
    """

    bits: str
    offset: int = 0
    exact: bool = False

    def __post_init__(self) -> None:
        if self.bits.strip("01"):
            raise ValueError("bits must be a string of 0s and 1s")
        if not 0 <= self.offset <= len(self.bits):
            raise ValueError("offset outside the known prefix")

    def remaining(self) -> str:
        return self.bits[self.offset:]

    def value(self) -> float:
        window = self.remaining()[:_WINDOW_BITS]
        if not window:
            return 0.0
        return int(window, 2) / (1 << len(window))


AngleFraction = Union[RationalAngle, BitStreamAngle]


def cotpi(v: float) -> float:
    """cot(pi * v) for v in (0, 1), accurate near both poles and the zero.

    Folds v into (0, 1/2] first; the reductions 1 - v and 1/2 - v are exact
    in binary64 on the ranges where they are used.
    """
    if v == 0.5:
        return 0.0
    if v > 0.5:
        return -cotpi(1.0 - v)
    if v <= 0.25:
        return 1.0 / math.tan(math.pi * v)
    return math.tan(math.pi * (0.5 - v))


def shift(a: AngleFraction) -> AngleFraction:
    """The doubling map 2v mod 1: drop the leading bit of the expansion."""
    if isinstance(a, RationalAngle):
        f = a.fraction * 2
        if f >= 1:
            f -= 1
        return RationalAngle(f)
    if a.offset >= len(a.bits):
        raise DynamicsError("bit stream exhausted")
    return BitStreamAngle(a.bits, a.offset + 1, a.exact)


def _rational_point(f: Fraction) -> Point:
    if f == 0:
        raise UndefinedCotangent("cot undefined at angle fraction 0")
    if f == _HALF:
        return Point(0.0, 0.0)
    return Point(cotpi(float(f)), 0.0)


def cot_point(a: AngleFraction) -> Point:
    """The orbit point (cot(pi * v), 0) in the float tower.

    The fraction 1/2 maps to the exact origin; the caller decides whether
    that is acceptable (the next center is the undefined one).
    """
    if isinstance(a, RationalAngle):
        return _rational_point(a.fraction)
    rem = a.remaining()
    if "1" not in rem:
        if a.exact:
            raise UndefinedCotangent("cot undefined at angle fraction 0")
        raise UndefinedCotangent("no known 1 bits left; value indistinguishable from 0")
    if a.exact and rem[0] == "1" and "1" not in rem[1:]:
        return Point(0.0, 0.0)
    return Point(cotpi(a.value()), 0.0)


@dataclass
class OrbitReport:
    """Classification of an orbit plus the points actually computed.

    kind is "terminates" (step = first index whose point is undefined),
    "eventually_periodic" (exact preperiod and period, rational input only),
    or "undetermined" (bit stream ran out at the given horizon).
    """

    kind: str
    points: list[Point] = field(default_factory=list)
    step: Optional[int] = None
    preperiod: Optional[int] = None
    period: Optional[int] = None
    horizon: Optional[int] = None


def multiplicative_order(base: int, modulus: int) -> int:
    if modulus <= 1:
        raise ValueError("modulus must exceed 1")
    if math.gcd(base, modulus) != 1:
        raise ValueError(f"{base} is not invertible mod {modulus}")
    t = base % modulus
    k = 1
    while t != 1:
        t = t * base % modulus
        k += 1
    return k


def _orbit_rational(a: RationalAngle, max_steps: int) -> OrbitReport:
    f = a.fraction
    if f == 0:
        return OrbitReport("terminates", [], step=1)
    q = f.denominator
    k = (q & -q).bit_length() - 1  # 2-adic valuation
    m = q >> k

    if m == 1:
        # dyadic: the (k+1)-th fraction is exactly 0
        n_points = min(max_steps, k)
        points = []
        cur = f
        for _ in range(n_points):
            points.append(_rational_point(cur))
            cur = cur * 2 % 1
        return OrbitReport("terminates", points, step=k + 1)

    preperiod = k
    period = multiplicative_order(2, m)
    points = []
    cur = f
    for _ in range(max_steps):
        points.append(_rational_point(cur))
        cur = cur * 2 % 1
    return OrbitReport("eventually_periodic", points,
                       preperiod=preperiod, period=period)


def _orbit_bits(a: BitStreamAngle, max_steps: int) -> OrbitReport:
    points: list[Point] = []
    cur = a
    for j in range(1, max_steps + 1):
        rem = cur.remaining()
        if "1" not in rem:
            if cur.exact:
                return OrbitReport("terminates", points, step=j)
            return OrbitReport("undetermined", points, horizon=j - 1)
        points.append(cot_point(cur))
        cur = shift(cur)
    return OrbitReport("undetermined", points, horizon=max_steps)


def orbit(a: AngleFraction, max_steps: int) -> OrbitReport:
    """Run and classify the orbit.

    For rational fractions p/q with q = 2^k * m (m odd) the classification
    is number-theoretic and exact: termination at step k+1 when m = 1,
    otherwise preperiod k and period ord_m(2).  Float trajectories are never
    compared to decide periodicity.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if isinstance(a, RationalAngle):
        return _orbit_rational(a, max_steps)
    return _orbit_bits(a, max_steps)


def verify_cotangent_relation(a: AngleFraction) -> float:
    """Distance between the constructed center and the doubled-angle point.

    Requires the fraction and its double to avoid {0, 1/2}.
    """
    b = shift(a)
    q1 = cot_point(a)
    q2 = cot_point(b)
    if q1 == Point(0.0, 0.0):
        raise UndefinedCotangent("angle fraction 1/2: the next center is undefined")
    center = circumcenter(BASE_TOP, BASE_BOTTOM, q1)
    return center.dist(q2)


def synthesize_alpha(preperiod: int, period: int) -> RationalAngle:
    """A rational angle fraction whose orbit has exactly the given shape.

    Built from the bit pattern 1^L followed by the repeating block
    1 0^(P-1).  The block contains a single 1, so it is primitive and the
    period is exactly P; the last preperiod bit (1) differs from the last
    bit of the first block (0, since P >= 2), so the preperiod is exactly L.
    """
    if preperiod < 0:
        raise ValueError("preperiod must be nonnegative")
    if period < 1:
        raise ValueError("period must be positive")
    if period == 1:
        raise UnsupportedPeriodOne(
            "period 1 would require the doubling map to fix a nonzero fraction; "
            "the only fixed point is 0, where cot is undefined")
    block_value = Fraction(1 << (period - 1), (1 << period) - 1)
    head = Fraction((1 << preperiod) - 1, 1 << preperiod)
    value = head + block_value / (1 << preperiod)
    a = RationalAngle(value)
    report = orbit(a, 1)
    if (report.kind, report.preperiod, report.period) != \
            ("eventually_periodic", preperiod, period):
        raise AssertionError(f"synthesis self-check failed for L={preperiod}, P={period}")
    return a


def thue_morse(n_bits: int) -> BitStreamAngle:
    """First n_bits bits of the bitwise-complement doubling sequence.

    Starts from 0 and repeatedly appends the complement of everything so
    far.  Bit n (1-indexed) also equals the parity of the ones in the
    binary expansion of n-1, which tests use as an independent oracle.
    """
    if n_bits < 1:
        raise ValueError("n_bits must be positive")
    bits = "0"
    complement = str.maketrans("01", "10")
    while len(bits) < n_bits:
        bits += bits.translate(complement)
    return BitStreamAngle(bits[:n_bits])


@dataclass
class CoverageReport:
    counts: list[int]
    empty_fraction: float
    samples: int
    steps: int
    bins: int
    rng_seed: int


def coverage_experiment(samples: int, steps: int, bins: int,
                        rng_seed: int) -> CoverageReport:
    """Histogram of orbit points for random starting angles.

    Each sample draws an independent random bit stream (sub-seed derived
    from the sample counter, so the result does not depend on evaluation
    order).  The orbit runs as a sliding 64-bit window over the bits; each
    point (cot(pi v), 0) is folded back to an angle bin through arccot,
    which compactifies the x-axis into finitely many bins.
    """
    if samples < 1 or steps < 1 or bins < 1:
        raise ValueError("samples, steps, and bins must all be at least 1")
    counts = [0] * bins
    mask = (1 << _WINDOW_BITS) - 1
    top = float(1 << _WINDOW_BITS)
    for sample in range(samples):
        rng = random.Random((rng_seed << 32) + sample)
        window = rng.getrandbits(_WINDOW_BITS)
        for _ in range(steps):
            if window != 0:
                v = window / top
                x = cotpi(v)
                theta = math.atan2(1.0, x)  # arccot onto (0, pi)
                b = int(theta / math.pi * bins)
                counts[min(b, bins - 1)] += 1
            window = ((window << 1) & mask) | rng.getrandbits(1)
    empty = sum(1 for c in counts if c == 0) / bins
    return CoverageReport(counts, empty, samples, steps, bins, rng_seed)
