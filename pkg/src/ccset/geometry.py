"""Scalar-generic planar geometry kernel.

Every operation works over one of two scalar towers:

* exact: coordinates are ``int`` or ``fractions.Fraction``; predicates are
  decided exactly and circumcenters of rational points stay rational,
* binary64: coordinates are ``float``; collinearity uses a scale-relative
  threshold.

Mixing a float into otherwise exact inputs demotes the whole operation to
the float tower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Scalar = Union[int, float, Fraction]

# float tower: |cross| <= eps * (max coordinate magnitude)^2 counts as collinear
COLLINEAR_REL_EPS = 1e-12
# float tower: squared side lengths matching to this relative tolerance count as equal
EQUILATERAL_REL_EPS = 1e-12


class GeometryError(Exception):
    """Base class for kernel failures."""


class CollinearInput(GeometryError):
    """The three points admit no circumscribed circle."""


class DegeneratePair(GeometryError):
    """Two supposedly distinct anchor points coincide."""


class NoUniqueFixedPoint(GeometryError):
    """The map is a nontrivial translation; no point is fixed."""


class EveryPointFixed(GeometryError):
    """The map is the identity; every point is fixed."""


class DegenerateCandidate(GeometryError):
    """A candidate triple collapsed onto a line."""


def is_exact_scalar(value: Scalar) -> bool:
    return isinstance(value, (int, Fraction))


@dataclass(frozen=True)
class Point:
    x: Scalar
    y: Scalar

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, k: Scalar) -> "Point":
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__

    def is_exact(self) -> bool:
        return is_exact_scalar(self.x) and is_exact_scalar(self.y)

    def as_float(self) -> "Point":
        return Point(float(self.x), float(self.y))

    def dist_sq(self, other: "Point") -> Scalar:
        dx = self.x - other.x
        dy = self.y - other.y
        return dx * dx + dy * dy

    def dist(self, other: "Point") -> float:
        return math.sqrt(float(self.dist_sq(other)))

    def norm(self) -> float:
        return math.hypot(float(self.x), float(self.y))


def dot(u: Point, v: Point) -> Scalar:
    return u.x * v.x + u.y * v.y


def cross(u: Point, v: Point) -> Scalar:
    return u.x * v.y - u.y * v.x


def _exact_tower(*points: Point) -> bool:
    return all(p.is_exact() for p in points)


def _lift(*points: Point) -> tuple[list[Point], bool]:
    """Coerce points into a single tower: all-Fraction or all-float."""
    if _exact_tower(*points):
        return [Point(Fraction(p.x), Fraction(p.y)) for p in points], True
    return [p.as_float() for p in points], False


def orientation(p: Point, q: Point, r: Point) -> int:
    """Sign of the signed parallelogram area of (q-p, r-p).

    Returns +1 for a counterclockwise turn, -1 for clockwise, 0 for
    collinear.  Exact for the rational tower; the float tower treats
    |area| <= COLLINEAR_REL_EPS * (max coordinate)^2 as zero.
    """
    (p, q, r), exact = _lift(p, q, r)
    area = cross(q - p, r - p)
    if exact:
        return (area > 0) - (area < 0)
    m = max(abs(p.x), abs(p.y), abs(q.x), abs(q.y), abs(r.x), abs(r.y))
    if abs(area) <= COLLINEAR_REL_EPS * m * m:
        return 0
    return 1 if area > 0 else -1


def collinear(p: Point, q: Point, r: Point) -> bool:
    return orientation(p, q, r) == 0


@dataclass(frozen=True)
class Triangle:
    a: Point
    b: Point
    c: Point

    def __post_init__(self) -> None:
        if orientation(self.a, self.b, self.c) == 0:
            raise CollinearInput(f"degenerate triangle {self.a}, {self.b}, {self.c}")

    def vertices(self) -> tuple[Point, Point, Point]:
        return (self.a, self.b, self.c)


def circumcenter(p: Point, q: Point, r: Point) -> Point:
    """Center of the circle through three non-collinear points.

    Solves the two perpendicular-bisector equations as a 2x2 linear system
    relative to p, so all arithmetic stays inside the scalar field: rational
    in, rational out.
    """
    if orientation(p, q, r) == 0:
        raise CollinearInput(f"collinear points {p}, {q}, {r}")
    (p, q, r), _ = _lift(p, q, r)
    dx1 = q.x - p.x
    dy1 = q.y - p.y
    dx2 = r.x - p.x
    dy2 = r.y - p.y
    c1 = (dx1 * dx1 + dy1 * dy1) / 2
    c2 = (dx2 * dx2 + dy2 * dy2) / 2
    det = dx1 * dy2 - dy1 * dx2
    ux = (c1 * dy2 - c2 * dy1) / det
    uy = (dx1 * c2 - dx2 * c1) / det
    return Point(p.x + ux, p.y + uy)


def circumradius_sq(p: Point, q: Point, r: Point) -> Scalar:
    """Squared circumradius; squared keeps rational inputs rational."""
    return circumcenter(p, q, r).dist_sq(p)


@dataclass(frozen=True)
class Similarity:
    """Orientation-preserving scaled rotation plus translation.

    Acts on (x, y) as the matrix [[re, -im], [im, re]] followed by the
    translation (tx, ty); equivalently z -> a*z + t over the complex plane
    with a = re + i*im.  Reflections are excluded by construction.
    """

    re: Scalar
    im: Scalar
    tx: Scalar
    ty: Scalar

    def __call__(self, p: Point) -> Point:
        return Point(self.re * p.x - self.im * p.y + self.tx,
                     self.im * p.x + self.re * p.y + self.ty)

    @property
    def scale_sq(self) -> Scalar:
        return self.re * self.re + self.im * self.im

    @property
    def scale(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    @property
    def angle(self) -> float:
        return math.atan2(float(self.im), float(self.re))

    @property
    def translation(self) -> Point:
        return Point(self.tx, self.ty)

    def is_linear_identity(self) -> bool:
        return self.re == 1 and self.im == 0

    def inverse(self) -> "Similarity":
        n = self.scale_sq
        if n == 0:
            raise DegeneratePair("similarity with zero scale is not invertible")
        re = self.re / n
        im = -self.im / n
        return Similarity(re, im, -(re * self.tx - im * self.ty),
                          -(im * self.tx + re * self.ty))

    def compose(self, inner: "Similarity") -> "Similarity":
        """self after inner."""
        re = self.re * inner.re - self.im * inner.im
        im = self.re * inner.im + self.im * inner.re
        t = self(Point(inner.tx, inner.ty))
        return Similarity(re, im, t.x, t.y)


def similarity_from_pairs(p1: Point, p2: Point, q1: Point, q2: Point) -> Similarity:
    """The unique scaled rotation plus translation with p1 -> q1, p2 -> q2.

    The linear part is the scaled rotation carrying p2-p1 onto q2-q1.
    """
    (p1, p2, q1, q2), _ = _lift(p1, p2, q1, q2)
    dp = p2 - p1
    dq = q2 - q1
    n = dp.x * dp.x + dp.y * dp.y
    if n == 0:
        raise DegeneratePair(f"anchor points coincide at {p1}")
    re = (dq.x * dp.x + dq.y * dp.y) / n
    im = (dq.y * dp.x - dq.x * dp.y) / n
    tx = q1.x - (re * p1.x - im * p1.y)
    ty = q1.y - (im * p1.x + re * p1.y)
    return Similarity(re, im, tx, ty)


def fixed_point(g: Similarity) -> Point:
    """The unique p with g(p) = p, from the linear system (I - A) p = t."""
    alpha = 1 - g.re
    beta = g.im
    det = alpha * alpha + beta * beta
    if det == 0:
        if g.tx == 0 and g.ty == 0:
            raise EveryPointFixed("the map is the identity")
        raise NoUniqueFixedPoint("pure translation has no fixed point")
    px = (alpha * g.tx - beta * g.ty) / det
    py = (beta * g.tx + alpha * g.ty) / det
    return Point(px, py)


def _sq_sides_equal(a: Scalar, b: Scalar, exact: bool) -> bool:
    if exact:
        return a == b
    m = max(abs(a), abs(b))
    return abs(a - b) <= EQUILATERAL_REL_EPS * m


def is_equilateral(p: Point, q: Point, r: Point) -> bool:
    (p, q, r), exact = _lift(p, q, r)
    s1 = p.dist_sq(q)
    s2 = q.dist_sq(r)
    s3 = r.dist_sq(p)
    return _sq_sides_equal(s1, s2, exact) and _sq_sides_equal(s2, s3, exact)


def shrink_witness(d: Point, e: Point, f: Point) -> tuple[Triangle, Scalar]:
    """A triangle on {d, e, f, centers} with strictly smaller circumradius.

    Let g be the circumcenter.  One of (d,e,g), (d,f,g), (e,f,g) has
    circumradius^2 below the original unless the triangle is equilateral,
    in which case (d, g, h) with h the circumcenter of (d, e, g) does.
    Candidates whose triple is collinear (g landing on a side's line) are
    skipped.
    """
    g = circumcenter(d, e, f)
    r0 = g.dist_sq(d)

    def _equilateral_branch() -> tuple[Triangle, Scalar]:
        h = circumcenter(d, e, g)
        tri = Triangle(d, g, h)
        return tri, circumradius_sq(d, g, h)

    if is_equilateral(d, e, f):
        return _equilateral_branch()

    best: Optional[tuple[Triangle, Scalar]] = None
    for x, y in ((d, e), (d, f), (e, f)):
        if orientation(x, y, g) == 0:
            continue  # DegenerateCandidate: no circle through this triple
        r2 = circumradius_sq(x, y, g)
        if r2 < r0 and (best is None or r2 < best[1]):
            best = (Triangle(x, y, g), r2)
    if best is None:
        # float drift on a near-equilateral triangle: fall through to the
        # equilateral construction, which still shrinks strictly
        return _equilateral_branch()
    return best


@dataclass(frozen=True)
class IteratedCenterReport:
    """Which clause holds for the centers g, h, i over a fixed base d, e.

    kind is one of:
      * "on_line_de": some iterate landed on the line through d and e (the
        following center is undefined exactly because of that),
      * "collinear": g, h, i are three distinct collinear points,
      * "equilateral_degenerate": the iterates are not distinct; then the
        triangle (d, g, h) is equilateral and its circumcenter lies on the
        line through d and e.
    """

    kind: str
    which: Optional[str]
    g: Optional[Point]
    h: Optional[Point]
    i: Optional[Point]
    verified: bool


def iterated_center_report(d: Point, e: Point, f: Point) -> IteratedCenterReport:
    if orientation(d, e, f) == 0:
        raise CollinearInput(f"collinear points {d}, {e}, {f}")
    g = circumcenter(d, e, f)
    if orientation(d, e, g) == 0:
        return IteratedCenterReport("on_line_de", "G", g, None, None, True)
    h = circumcenter(d, e, g)
    if orientation(d, e, h) == 0:
        return IteratedCenterReport("on_line_de", "H", g, h, None, True)
    i = circumcenter(d, e, h)
    if orientation(d, e, i) == 0:
        return IteratedCenterReport("on_line_de", "I", g, h, i, True)
    if g == h or h == i or g == i:
        ok = is_equilateral(d, g, h) and orientation(d, e, circumcenter(d, g, h)) == 0
        return IteratedCenterReport("equilateral_degenerate", None, g, h, i, ok)
    return IteratedCenterReport("collinear", None, g, h, i,
                                orientation(g, h, i) == 0)
