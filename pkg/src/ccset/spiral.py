"""Spiral orbits of the three-point circumcenter recursion.

Starting from an isosceles triangle (apex third), each new point is the
circumcenter of the three most recent points.  Consecutive odd-indexed
triangles are similar with a fixed ratio, the whole orbit is conjugated by
a quarter-turn scaled rotation about a limit point, and the four index
classes mod 4 line up on two perpendicular pairs of lines through it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .derivation import Derivation, DerivationBuilder
from .geometry import (
    CollinearInput,
    Point,
    Scalar,
    Similarity,
    Triangle,
    circumcenter,
    cross,
    dot,
    fixed_point,
    orientation,
    similarity_from_pairs,
)

# relative tolerance for the |apex-base1| = |apex-base2| check on float input
ISOSCELES_REL_TOL = 1e-10

_TWO_THIRDS_PI = 2 * math.pi / 3
_SIXTH_PI = math.pi / 6


class SpiralError(Exception):
    pass


class OutOfRange(SpiralError):
    pass


class NotIsosceles(SpiralError):
    pass


class CollinearStep(SpiralError):
    pass


class TooFewPoints(SpiralError):
    pass


class DegenerateDoubling(SpiralError):
    pass


class ZeroApex(SpiralError):
    pass


def lambda_of(beta: float) -> float:
    """Similarity ratio (cot(beta/2) - cot(beta)) / 2 of the spiral step.

    Positive on all of (0, pi); below 1 exactly for beta in (pi/6, 5pi/6).
    """
    if not 0 < beta < math.pi:
        raise OutOfRange(f"vertex angle {beta} outside (0, pi)")
    cot_half = math.cos(beta / 2) / math.sin(beta / 2)
    cot_full = math.cos(beta) / math.sin(beta)
    return (cot_half - cot_full) / 2


def angle_at(apex: Point, p: Point, q: Point) -> float:
    """Measure of the angle p-apex-q, in (0, pi]."""
    u = p.as_float() - apex.as_float()
    v = q.as_float() - apex.as_float()
    return math.atan2(abs(cross(u, v)), dot(u, v))


def _isoscelize_indexed(builder: DerivationBuilder,
                        seeds: Sequence[tuple[int, Point]],
                        ) -> tuple[int, int, int, float]:
    """Core of isoscelize working over an existing builder.

    Returns (base1_idx, base2_idx, apex_idx, apex_angle).
    """
    (ip, p), (iq, q), (ir, r) = seeds
    o_idx, o = builder.center_of(ip, iq, ir)

    pairs = [((ip, p), (iq, q)), ((ip, p), (ir, r)), ((iq, q), (ir, r))]
    candidates = []
    for (ix, x), (iy, y) in pairs:
        theta = angle_at(o, x, y)
        # one of the three central angles is at most 2pi/3; slop admits the
        # equilateral tie in float
        if theta <= _TWO_THIRDS_PI + 1e-12 and orientation(x, y, o) != 0:
            candidates.append((theta, ix, x, iy, y))

    last_error: Optional[Exception] = None
    for theta, ix, x, iy, y in sorted(candidates, key=lambda c: c[0]):
        apex_idx, apex = o_idx, o
        try:
            while theta <= _SIXTH_PI:
                # replacing the apex by the circumcenter doubles the apex
                # angle, so the loop exits inside (pi/6, pi/3]
                apex_idx, apex = builder.center_of(ix, iy, apex_idx)
                theta = angle_at(apex, x, y)
            return ix, iy, apex_idx, theta
        except CollinearInput as exc:
            last_error = exc
            continue
    raise DegenerateDoubling(
        f"no central triangle available for {seeds}") from last_error


def isoscelize(p: Point, q: Point, r: Point) -> tuple[Triangle, Derivation]:
    """An isosceles triangle with apex angle strictly inside (pi/6, 5pi/6),
    every vertex of which is reachable from {p, q, r} by circumcenter steps.

    The apex is the third vertex of the returned triangle.  The derivation
    records the seeds and every center taken along the way; its last step is
    the final apex.
    """
    tower = "rational" if all(pt.is_exact() for pt in (p, q, r)) else "float64"
    builder = DerivationBuilder(tower)
    seeds = [(builder.seed(pt), pt) for pt in (p, q, r)]
    ix, iy, apex_idx, _theta = _isoscelize_indexed(builder, seeds)
    tri = Triangle(builder.point_at(ix), builder.point_at(iy),
                   builder.point_at(apex_idx))
    return tri, builder.build()


@dataclass
class SpiralState:
    """Snapshot of a spiral orbit.

    ``f`` is the step-two map (quarter-turn rotation scaled by ``lam``
    about ``p_infinity``); ``indices`` track each point's position in
    ``derivation``.
    """

    points: list[Point]
    beta: float
    lam: float
    f: Similarity
    p_infinity: Point
    derivation: Derivation
    indices: list[int]


def spiral_orbit(p1: Point, p2: Point, p3: Point, n: int,
                 builder: Optional[DerivationBuilder] = None,
                 seed_indices: Optional[Sequence[int]] = None) -> SpiralState:
    """Points P1..Pn of the recursion P(n) = center(P(n-1), P(n-2), P(n-3)).

    Requires the start triangle isosceles with apex p3 and n >= 4.  Passing
    a builder whose ``seed_indices`` already hold p1, p2, p3 appends the new
    centers to an existing derivation instead of starting a fresh one.
    """
    if n < 4:
        raise ValueError("need at least 4 points to identify the step map")
    d1 = p3.dist_sq(p1)
    d2 = p3.dist_sq(p2)
    if abs(float(d1) - float(d2)) > ISOSCELES_REL_TOL * max(float(d1), float(d2)):
        raise NotIsosceles(f"|p3-p1|^2 = {d1} but |p3-p2|^2 = {d2}")

    if builder is None:
        tower = "rational" if all(pt.is_exact() for pt in (p1, p2, p3)) else "float64"
        builder = DerivationBuilder(tower)
        indices = [builder.seed(pt) for pt in (p1, p2, p3)]
    else:
        if seed_indices is None or len(seed_indices) != 3:
            raise ValueError("seed_indices must name the three start points")
        indices = list(seed_indices)

    beta = angle_at(p3, p1, p2)
    points = [builder.point_at(indices[0]), builder.point_at(indices[1]),
              builder.point_at(indices[2])]
    for _ in range(3, n):
        try:
            idx, pt = builder.center_of(indices[-1], indices[-2], indices[-3])
        except CollinearInput as exc:
            raise CollinearStep(f"recursion degenerated at point {len(points) + 1}") from exc
        indices.append(idx)
        points.append(pt)

    f = similarity_from_pairs(points[0], points[1], points[2], points[3])
    p_inf = fixed_point(f)
    return SpiralState(points, beta, f.scale, f, p_inf, builder.build(), indices)


def p_infinity_formula(x: Scalar) -> Point:
    """Closed form of the orbit limit for the start (0,-1), (0,1), (x, 0)."""
    if x == 0:
        raise ZeroApex("apex on the base line")
    if isinstance(x, int):
        x = Fraction(x)
    x2 = x * x
    x3 = x2 * x
    x4 = x2 * x2
    denom = x4 + 18 * x2 + 1
    return Point((12 * x3 - 4 * x) / denom, (3 * x4 + 2 * x2 - 1) / denom)


@dataclass
class QueueLine:
    direction: tuple[float, float]
    residual: float


@dataclass
class QueueReport:
    """Line fits for the four index-mod-4 queues.

    Each queue's line goes through the limit point and the queue's first
    point; ``residual`` is the largest perpendicular offset of the remaining
    queue points, scaled by their distance from the limit point.  The perp
    entries are |cos| of the angles between the queue-1/queue-3 and
    queue-2/queue-4 lines.
    """

    lines: list[QueueLine]
    perp_13: float
    perp_24: float
    tol: float
    ok: bool


def orderly_queues_check(state: SpiralState, tol: float) -> QueueReport:
    pts = state.points
    if len(pts) < 12:
        raise TooFewPoints(f"need 12 points for three per queue, got {len(pts)}")
    p_inf = state.p_infinity

    lines: list[QueueLine] = []
    dirs: list[Point] = []
    for start in range(4):
        queue = pts[start::4]
        d = queue[0] - p_inf
        dirs.append(d)
        d_norm = d.norm()
        worst = 0.0
        for pt in queue[1:]:
            rel = pt - p_inf
            # cross product in the native tower: exactly zero stays zero
            err = abs(float(cross(d, rel))) / (d_norm * (1.0 + rel.norm()))
            worst = max(worst, err)
        lines.append(QueueLine((float(d.x) / d_norm, float(d.y) / d_norm), worst))

    def _cos_between(u: Point, v: Point) -> float:
        return abs(float(dot(u, v))) / (u.norm() * v.norm())

    perp_13 = _cos_between(dirs[0], dirs[2])
    perp_24 = _cos_between(dirs[1], dirs[3])
    ok = all(line.residual <= tol for line in lines) and \
        perp_13 <= tol and perp_24 <= tol
    return QueueReport(lines, perp_13, perp_24, tol, ok)
