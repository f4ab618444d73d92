"""Constructive density machinery: dyadic segment filling, quadrilateral
patches, and the reach planner.

``segment_fill`` realizes the midpoint induction: rows of points at every
dyadic height between two endpoints, each row converging toward the axis,
every point a genuine circumcenter of three earlier points.  ``quad_fill``
sweeps the two-parameter center map over a filled segment plus an apex to
cover a quadrilateral.  ``reach`` composes the whole pipeline into a
derivation certificate whose last point lands within a requested distance
of an arbitrary target.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .derivation import Derivation, DerivationBuilder
from .geometry import (
    CollinearInput,
    GeometryError,
    Point,
    Scalar,
    Similarity,
    Triangle,
    circumcenter,
    cross,
    dot,
    is_exact_scalar,
    orientation,
    similarity_from_pairs,
)
from .spiral import (
    SpiralError,
    _isoscelize_indexed,
    angle_at,
    spiral_orbit,
)


class FillError(Exception):
    pass


class EqualParameters(FillError):
    pass


class InsufficientSequence(FillError):
    pass


class DegenerateTriple(FillError):
    pass


class ResolutionTooCoarse(FillError):
    pass


class CollinearSeed(FillError):
    pass


class BudgetExceeded(FillError):
    def __init__(self, achieved_error: float):
        super().__init__(f"retry budget exhausted; best error {achieved_error:.3e}")
        self.achieved_error = achieved_error


@dataclass(frozen=True)
class QuadPatch:
    """Parameter box [a, b] x [c, d] with a < b < c < d.

    The four image corners under the center map are always in strictly
    convex position for such parameters.
    """

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self) -> None:
        if not (self.a < self.b < self.c < self.d):
            raise ValueError(f"need a < b < c < d, got {self.a}, {self.b}, {self.c}, {self.d}")

    def vertices(self) -> tuple[Point, Point, Point, Point]:
        return (quad_map(self.a, self.c), quad_map(self.a, self.d),
                quad_map(self.b, self.d), quad_map(self.b, self.c))


def quad_map(u: Scalar, v: Scalar) -> Point:
    """Center of the circle through (0, 1), (u, 0), (v, 0).

    Closed form ((u+v)/2, (uv+1)/2); agrees with the kernel circumcenter
    exactly over the rationals.
    """
    if u == v:
        raise EqualParameters(f"base points coincide at u = v = {u}")
    if is_exact_scalar(u) and is_exact_scalar(v):
        u, v = Fraction(u), Fraction(v)
        return Point((u + v) / 2, (u * v + 1) / 2)
    u, v = float(u), float(v)
    return Point((u + v) / 2.0, (u * v + 1.0) / 2.0)


def _sqrt_exact(f: Fraction) -> Optional[Fraction]:
    if f < 0:
        return None
    num, den = f.numerator, f.denominator
    sn = math.isqrt(num)
    if sn * sn != num:
        return None
    sd = math.isqrt(den)
    if sd * sd != den:
        return None
    return Fraction(sn, sd)


def quad_map_inverse(p: Point, patch: QuadPatch
                     ) -> Optional[tuple[Scalar, Scalar]]:
    """Parameters (u, v) with quad_map(u, v) = p and u in [a,b], v in [c,d].

    u and v are the roots of t^2 - 2 p.x t + (2 p.y - 1); membership in the
    filled quadrilateral is exactly "returns a pair".  Exact when the input
    is rational and the discriminant is a perfect square (always the case
    for points produced by quad_map from rational parameters).
    """
    exact = p.is_exact()
    if exact:
        x = Fraction(p.x)
        prod = 2 * Fraction(p.y) - 1
        quarter_disc = x * x - prod
        root = _sqrt_exact(quarter_disc)
        if root is None and quarter_disc < 0:
            return None
        if root is not None:
            u, v = x - root, x + root
            if patch.a <= u <= patch.b and patch.c <= v <= patch.d:
                return (u, v)
            return None
        # irrational roots: decide in float
        x, prod = float(x), float(prod)
    else:
        x = float(p.x)
        prod = 2.0 * float(p.y) - 1.0
    quarter = x * x - prod
    if quarter < 0:
        return None
    s = math.sqrt(quarter)
    # smaller root via the numerically stable branch
    if x >= 0:
        v = x + s
        u = prod / v if v != 0 else 0.0
    else:
        u = x - s
        v = prod / u if u != 0 else 0.0
    if patch.a <= u <= patch.b and patch.c <= v <= patch.d:
        return (u, v)
    return None


@dataclass
class FillCloud:
    """A point cloud together with the derivation producing it.

    ``frame`` maps the cloud's normalized planning coordinates onto actual
    coordinates; ``resolution`` is the measured covering radius of the
    target region, in normalized units.  ``indices`` give each point's step
    in ``derivation``.
    """

    points: list[Point]
    indices: list[int]
    derivation: Derivation
    frame: Similarity
    resolution: float


class _RowPoint(NamedTuple):
    abs_off: float
    off: float
    idx: int
    pt: Point


def _max_min_dist(targets: np.ndarray, cloud: np.ndarray) -> float:
    """max over targets of the distance to the nearest cloud point."""
    worst = 0.0
    chunk = max(1, (1 << 22) // max(len(cloud), 1))
    for lo in range(0, len(targets), chunk):
        block = targets[lo:lo + chunk]
        d2 = ((block[:, None, :] - cloud[None, :, :]) ** 2).sum(axis=2)
        worst = max(worst, float(d2.min(axis=1).max()))
    return math.sqrt(worst)


def _segment_resolution(norm_xy: np.ndarray, depth: int) -> float:
    """Covering radius of the unit segment x=0, y in [0,1], both directions."""
    ts = np.linspace(0.0, 1.0, (1 << min(depth + 2, 13)) + 1)
    targets = np.column_stack([np.zeros_like(ts), ts])
    covering = _max_min_dist(targets, norm_xy)
    dy = np.maximum(0.0, np.maximum(norm_xy[:, 1] - 1.0, -norm_xy[:, 1]))
    stray = math.sqrt(float((norm_xy[:, 0] ** 2 + dy ** 2).max()))
    return max(covering, stray)


def segment_fill(endpoint_i: Point, endpoint_a: Point, base_seq: Sequence[Point],
                 depth: int, width: Optional[int] = None, *,
                 builder: Optional[DerivationBuilder] = None,
                 indices: Optional[tuple[int, int, Sequence[int]]] = None,
                 perp_tol: float = 1e-6) -> FillCloud:
    """Fill the segment from endpoint_i to endpoint_a with circumcenters.

    ``base_seq`` must lie on the line through endpoint_i perpendicular to
    the segment and approach endpoint_i strictly monotonically.  For every
    dyadic height a/2^n with n <= depth a row of points converging toward
    the axis is built; the exact on-axis limit points of intermediate rows
    are never available, so the deepest constructed row element stands in
    for them and the overall quality is measured a posteriori into
    ``resolution``.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if width is None:
        width = max(3 * depth, 1)
    if width < 1:
        raise ValueError("width must be positive")
    if len(base_seq) < width:
        raise InsufficientSequence(
            f"need {width} base points, got {len(base_seq)}")

    if builder is None:
        exact = endpoint_i.is_exact() and endpoint_a.is_exact() and \
            all(p.is_exact() for p in base_seq)
        builder = DerivationBuilder("rational" if exact else "float64")
        i_idx = builder.seed(endpoint_i)
        a_idx = builder.seed(endpoint_a)
        base_idx = [builder.seed(p) for p in base_seq]
    else:
        if indices is None:
            raise ValueError("indices required when appending to a builder")
        i_idx, a_idx, base_idx = indices[0], indices[1], list(indices[2])
        if len(base_idx) != len(base_seq):
            raise ValueError("base index list does not match base_seq")

    frame = similarity_from_pairs(Point(0, 0), Point(0, 1),
                                  endpoint_i, endpoint_a)
    inv = frame.inverse()

    base_rows: list[_RowPoint] = []
    last_abs = math.inf
    for k, (pt, idx) in enumerate(zip(base_seq, base_idx)):
        npt = inv(pt).as_float()
        if abs(npt.y) > perp_tol * max(1.0, abs(npt.x)):
            raise ValueError(
                f"base point {k} off the perpendicular line (offset {npt.y:.3e})")
        a = abs(npt.x)
        if a == 0 or a >= last_abs:
            raise ValueError("base_seq must approach endpoint_i strictly monotonically")
        last_abs = a
        base_rows.append(_RowPoint(a, npt.x, idx, pt))

    rows: dict[Fraction, list[_RowPoint]] = {Fraction(0): base_rows[:width]}
    axis = {Fraction(0): (i_idx, endpoint_i), Fraction(1): (a_idx, endpoint_a)}

    def _source(h: Fraction) -> tuple[int, Point, Optional[_RowPoint]]:
        if h in axis:
            idx, pt = axis[h]
            return idx, pt, None
        row = rows.get(h)
        if not row:
            raise InsufficientSequence(
                f"row {h} unavailable; width {width} too small for depth {depth}")
        deepest = row[-1]
        return deepest.idx, deepest.pt, deepest

    for n in range(1, depth + 1):
        denom = 1 << n
        for num in range(1, denom, 2):
            h = Fraction(num, denom)
            h_f = Fraction(num - 1, denom)
            ie, _pe, _ = _source(Fraction(num + 1, denom))
            jf, _pf, f_entry = _source(h_f)
            donors = rows.get(h_f, [])
            if f_entry is not None:
                donors = [e for e in donors if e is not f_entry]
            if not donors:
                raise InsufficientSequence(
                    f"no donor points below height {h}; width {width} too small")
            entries: list[_RowPoint] = []
            for g in donors:
                try:
                    idx, pt = builder.center_of(ie, jf, g.idx)
                except CollinearInput:
                    # cannot happen for distinct row heights; defensive skip
                    continue
                npt = inv(pt).as_float()
                entries.append(_RowPoint(abs(npt.x), npt.x, idx, pt))
            if not entries:
                raise DegenerateTriple(f"every candidate for row {h} degenerated")
            entries.sort(key=lambda e: -e.abs_off)
            rows[h] = entries

    # retained cloud: the two endpoints plus, per row, every element within
    # the trim radius and always the deepest one
    trim = 2.0 ** (-depth)
    points: list[Point] = [endpoint_i, endpoint_a]
    out_idx: list[int] = [i_idx, a_idx]
    norm_pts: list[tuple[float, float]] = [(0.0, 0.0), (0.0, 1.0)]
    for h in sorted(rows):
        row = rows[h]
        kept = [e for e in row if e.abs_off <= trim]
        if not kept:
            kept = [row[-1]]
        for e in sorted(kept, key=lambda e: e.abs_off):
            points.append(e.pt)
            out_idx.append(e.idx)
            npt = inv(e.pt).as_float()
            norm_pts.append((npt.x, npt.y))

    resolution = _segment_resolution(np.array(norm_pts, dtype=float), depth)
    return FillCloud(points, out_idx, builder.build(), frame, resolution)


def _quad_frame(apex: Point, base_cloud: FillCloud) -> Similarity:
    """Frame sending (0,0) to the foot of the apex on the segment's carrier
    line and (0,1) to the apex itself."""
    i_a = base_cloud.frame(Point(0, 0)).as_float()
    a_a = base_cloud.frame(Point(0, 1)).as_float()
    seg_len = a_a.dist(i_a)
    dirv = (a_a - i_a) * (1.0 / seg_len)
    apex_f = apex.as_float()
    t = float(dot(apex_f - i_a, dirv))
    foot = i_a + dirv * t
    h = apex_f.dist(foot)
    if h <= 1e-12 * max(seg_len, apex_f.norm()):
        raise ValueError("apex lies on the base line")
    return similarity_from_pairs(Point(0, 0), Point(0, 1), foot, apex_f)


def _u_entries(base_cloud: FillCloud, inv_q: Similarity
               ) -> list[tuple[float, int, Point]]:
    entries = [(float(inv_q(pt).x), idx, pt)
               for idx, pt in zip(base_cloud.indices, base_cloud.points)]
    entries.sort(key=lambda e: (e[0], e[1]))
    return entries


def _snap(entries: list[tuple[float, int, Point]], u_values: list[float],
          u: float) -> tuple[float, int, Point]:
    pos = bisect_left(u_values, u)
    best = None
    for cand in (pos - 1, pos, pos + 1):
        if 0 <= cand < len(entries):
            err = abs(entries[cand][0] - u)
            if best is None or err < best[0]:
                best = (err, entries[cand])
    return best[1]


def quad_fill(apex: Point, base_cloud: FillCloud, patch: QuadPatch, grid: int, *,
              builder: Optional[DerivationBuilder] = None,
              apex_index: Optional[int] = None) -> FillCloud:
    """Cover the image quadrilateral of ``patch`` with circumcenters.

    Each of grid^2 parameter pairs is snapped to the nearest base-cloud
    points and the circumcenter of (apex, U, V) is emitted.  The covering
    radius over the quadrilateral is measured a posteriori by sampling the
    parameter box, in the normalized frame with the apex at (0, 1).
    """
    if grid < 1:
        raise ValueError("grid must be positive")
    if builder is None:
        builder = DerivationBuilder.from_derivation(base_cloud.derivation)
    if apex_index is None:
        apex_index = builder.seed(apex)

    f_q = _quad_frame(apex, base_cloud)
    inv_q = f_q.inverse()
    entries = _u_entries(base_cloud, inv_q)
    u_values = [e[0] for e in entries]

    i_a = base_cloud.frame(Point(0, 0)).as_float()
    a_a = base_cloud.frame(Point(0, 1)).as_float()
    seg_len = a_a.dist(i_a)
    height = f_q.scale
    a, b, c, d = (float(patch.a), float(patch.b), float(patch.c), float(patch.d))
    span_min = min(b - a, d - c)
    rho_u = base_cloud.resolution * seg_len / height
    if rho_u > span_min / grid:
        raise ResolutionTooCoarse(
            f"cloud resolution {rho_u:.3g} (in parameter units) exceeds "
            f"{span_min / grid:.3g} needed for a {grid}x{grid} grid")
    if u_values[0] > a + rho_u or u_values[-1] < d - rho_u:
        raise ResolutionTooCoarse(
            f"cloud parameter range [{u_values[0]:.3g}, {u_values[-1]:.3g}] "
            f"does not cover the patch [{a:.3g}, {d:.3g}]")
    # measured snapping granularity inside the two parameter bands
    for lo, hi in ((a, b), (c, d)):
        inside = [u for u in u_values if lo - rho_u <= u <= hi + rho_u]
        gap = max((t - s for s, t in zip(inside, inside[1:])), default=math.inf)
        if not inside or gap > 2 * max(rho_u, span_min / grid):
            raise ResolutionTooCoarse(
                f"parameter band [{lo:.3g}, {hi:.3g}] too sparsely covered")

    points: list[Point] = []
    out_idx: list[int] = []
    seen: set[tuple[int, int]] = set()
    for iu in range(grid):
        u_t = a if grid == 1 else a + (b - a) * iu / (grid - 1)
        _, u_idx, u_pt = _snap(entries, u_values, u_t)
        for iv in range(grid):
            v_t = c if grid == 1 else c + (d - c) * iv / (grid - 1)
            _, v_idx, v_pt = _snap(entries, u_values, v_t)
            key = (u_idx, v_idx)
            if key in seen or u_idx == v_idx:
                continue
            seen.add(key)
            try:
                idx, pt = builder.center_of(apex_index, u_idx, v_idx)
            except CollinearInput:
                continue
            points.append(pt)
            out_idx.append(idx)
    if not points:
        raise ResolutionTooCoarse("no nondegenerate parameter pair available")

    # a-posteriori covering radius over the quadrilateral, in quad coordinates
    s = min(max(2 * grid, 16), 64)
    us = np.linspace(a, b, s)
    vs = np.linspace(c, d, s)
    uu, vv = np.meshgrid(us, vs)
    targets = np.column_stack([((uu + vv) / 2).ravel(),
                               ((uu * vv + 1) / 2).ravel()])
    cloud_q = np.array([[float(inv_q(p).x), float(inv_q(p).y)] for p in points])
    resolution = _max_min_dist(targets, cloud_q)
    return FillCloud(points, out_idx, builder.build(), f_q, resolution)


# ---------------------------------------------------------------------------
# reach planner


@dataclass
class _Platform:
    apex_idx: int
    apex_pt: Point
    f_q: Similarity
    inv_q: Similarity
    patch: QuadPatch
    entries: list[tuple[float, int, Point]]
    u_values: list[float]
    center_q: Point
    center_actual: Point
    diam_q: float
    scale_actual: float


@dataclass
class _Plan:
    pairs: list[tuple[int, int]]
    t_points: list[Point]
    final: Point
    err: float


def _build_platform(builder: DerivationBuilder,
                    triple: Sequence[tuple[int, Point]],
                    depth: int, grid: int) -> _Platform:
    ix, iy, iapex, theta = _isoscelize_indexed(builder, triple)
    x_pt = builder.point_at(ix)
    y_pt = builder.point_at(iy)
    apex_pt = builder.point_at(iapex)
    # one more doubling if needed puts the apex angle in (pi/3, 2pi/3],
    # keeping the orbit contraction ratio at most 1/sqrt(3)
    while theta <= math.pi / 3:
        iapex, apex_pt = builder.center_of(ix, iy, iapex)
        theta = angle_at(apex_pt, x_pt, y_pt)

    width = 3 * depth
    n = 4 * (width + 4) + 3
    state = spiral_orbit(x_pt, y_pt, apex_pt, n,
                         builder=builder, seed_indices=(ix, iy, iapex))

    s3 = [(state.indices[i], state.points[i])
          for i in range(2, len(state.points), 4)]
    i_end, end_pt = s3[-1]
    scale0 = s3[0][1].dist(end_pt)
    base: list[tuple[int, Point]] = []
    last = math.inf
    for idx, pt in s3[:-1]:
        r = pt.dist(end_pt)
        if r <= 1e-10 * scale0 or r >= last:
            break
        base.append((idx, pt))
        last = r
    depth = min(depth, max(2, len(base) - 2))
    width = min(3 * depth, len(base))
    if width < depth + 1:
        raise InsufficientSequence(
            f"only {len(base)} usable queue points for depth {depth}")

    a_idx, a_pt = state.indices[0], state.points[0]
    cloud = segment_fill(end_pt, a_pt, [pt for _, pt in base], depth,
                         width=width, builder=builder,
                         indices=(i_end, a_idx, [i for i, _ in base]),
                         perp_tol=1e-5)

    seg_len = a_pt.dist(end_pt)
    dirv = (a_pt - end_pt) * (1.0 / seg_len)
    best = None
    for cand in (1, 3, 5, 7):
        idx, pt = state.indices[cand], state.points[cand]
        h = abs(float(cross(dirv, pt - end_pt)))
        if h < 0.05 * seg_len:
            continue
        score = abs(h - 0.5 * seg_len)
        if best is None or score < best[0]:
            best = (score, idx, pt)
    if best is None:
        raise DegenerateTriple("no spiral point usable as a patch apex")
    _, apex_idx, apex_pt = best

    f_q = _quad_frame(apex_pt, cloud)
    inv_q = f_q.inverse()
    entries = _u_entries(cloud, inv_q)
    lo, hi = entries[0][0], entries[-1][0]
    span = hi - lo
    patch = QuadPatch(lo + 0.08 * span, lo + 0.36 * span,
                      lo + 0.60 * span, lo + 0.92 * span)
    quad_fill(apex_pt, cloud, patch, grid, builder=builder, apex_index=apex_idx)

    mid = quad_map((patch.a + patch.b) / 2, (patch.c + patch.d) / 2)
    verts = patch.vertices()
    diam = max(verts[i].dist(verts[j])
               for i in range(4) for j in range(i + 1, 4))
    return _Platform(apex_idx, apex_pt, f_q, inv_q, patch,
                     entries, [e[0] for e in entries],
                     mid, f_q(mid).as_float(), diam, diam * f_q.scale)


def _t_point(plat: _Platform, u: float, v: float
             ) -> Optional[tuple[tuple[int, int], Point]]:
    _, iu, pu = _snap(plat.entries, plat.u_values, u)
    _, iv, pv = _snap(plat.entries, plat.u_values, v)
    if iu == iv:
        return None
    try:
        return (iu, iv), circumcenter(plat.apex_pt, pu, pv)
    except CollinearInput:
        return None


def _neighbor_slots(plat: _Platform, u: float) -> list[int]:
    pos = bisect_left(plat.u_values, u)
    return [i for i in (pos - 1, pos, pos + 1) if 0 <= i < len(plat.entries)]


def _plan_placement(plat: _Platform, target: Point) -> Optional[_Plan]:
    """Dry-run a placement of ``target``: pick a circle centered on it that
    crosses the patch, realize three spread points on the circle from the
    cloud, and predict the circumcenter.  Emits nothing."""
    tq = plat.inv_q(target.as_float()).as_float()
    base_r = tq.dist(plat.center_q)
    radii = []
    if base_r > 0.05 * plat.diam_q:
        radii.append(base_r)
    radii += [0.30 * plat.diam_q, 0.18 * plat.diam_q, 0.45 * plat.diam_q]

    n_samples = 720
    feas: list[int] = []
    radius = None
    for r in radii:
        feas = []
        for k in range(n_samples):
            phi = 2 * math.pi * k / n_samples
            g = Point(tq.x + r * math.cos(phi), tq.y + r * math.sin(phi))
            if quad_map_inverse(g, plat.patch) is not None:
                feas.append(k)
        if len(feas) >= 8:
            radius = r
            break
    if radius is None:
        return None

    # rotate the feasible list so the largest circular gap sits at the ends
    m = len(feas)
    gaps = [(feas[(i + 1) % m] - feas[i]) % n_samples for i in range(m)]
    cut = max(range(m), key=lambda i: gaps[i])
    window = feas[cut + 1:] + feas[:cut + 1]

    def _angle(k: int) -> float:
        return 2 * math.pi * k / n_samples

    best_plan: Optional[_Plan] = None
    for shift in (0, len(window) // 12, -(len(window) // 12)):
        picks = [window[max(0, min(len(window) - 1, pos + shift))]
                 for pos in (len(window) // 6, len(window) // 2,
                             (5 * len(window)) // 6)]
        if len(set(picks)) < 3:
            continue
        params = []
        ok = True
        for k in picks:
            phi = _angle(k)
            g = Point(tq.x + radius * math.cos(phi), tq.y + radius * math.sin(phi))
            uv = quad_map_inverse(g, plat.patch)
            if uv is None:
                ok = False
                break
            params.append((float(uv[0]), float(uv[1])))
        if not ok:
            continue
        chosen = []
        for u, v in params:
            got = _t_point(plat, u, v)
            if got is None:
                ok = False
                break
            chosen.append(got)
        if not ok or orientation(chosen[0][1], chosen[1][1], chosen[2][1]) == 0:
            continue
        plan = _refine_plan(plat, target, params, chosen)
        if plan is not None and (best_plan is None or plan.err < best_plan.err):
            best_plan = plan
            break  # first viable spread is already refined; keep it
    return best_plan


def _refine_plan(plat: _Platform, target: Point,
                 params: list[tuple[float, float]],
                 chosen: list[tuple[tuple[int, int], Point]]) -> Optional[_Plan]:
    """Coordinate descent over neighboring snap slots to shave off the
    quantization error of the initial nearest-point snapping."""
    pairs = [c[0] for c in chosen]
    pts = [c[1] for c in chosen]

    def _final(ps: list[Point]) -> Optional[tuple[Point, float]]:
        try:
            f = circumcenter(ps[0], ps[1], ps[2])
        except CollinearInput:
            return None
        return f, f.dist(target.as_float())

    cur = _final(pts)
    if cur is None:
        return None
    for _ in range(2):
        improved = False
        for i in range(3):
            u, v = params[i]
            for su in _neighbor_slots(plat, u):
                for sv in _neighbor_slots(plat, v):
                    iu, iv = plat.entries[su][1], plat.entries[sv][1]
                    if iu == iv or (iu, iv) == pairs[i]:
                        continue
                    try:
                        cand = circumcenter(plat.apex_pt, plat.entries[su][2],
                                            plat.entries[sv][2])
                    except CollinearInput:
                        continue
                    trial = pts[:i] + [cand] + pts[i + 1:]
                    res = _final(trial)
                    if res is not None and res[1] < cur[1]:
                        pts = trial
                        pairs = pairs[:i] + [(iu, iv)] + pairs[i + 1:]
                        cur = res
                        improved = True
        if not improved:
            break
    return _Plan(pairs, pts, cur[0], cur[1])


def _emit_placement(builder: DerivationBuilder, plat: _Platform,
                    plan: _Plan) -> tuple[int, Point]:
    t_idx = []
    for iu, iv in plan.pairs:
        idx, _pt = builder.center_of(plat.apex_idx, iu, iv)
        t_idx.append(idx)
    return builder.center_of(t_idx[0], t_idx[1], t_idx[2])


def reach(target: Point, seed: Triangle, epsilon: float) -> Derivation:
    """Derivation from the seed triangle whose last point lands within
    ``epsilon`` of the target.

    Pipeline per working scale: normalize the current seed to a usable
    isosceles triangle, run the contracting spiral to harvest a queue
    converging to its limit plus the perpendicular first point, fill the
    segment between them, sweep a quadrilateral patch, then emit the center
    of three well-spread patch points on a circle centered at the goal.
    When the goal is too far or the cloud too coarse the same placement
    machinery plants three fresh seed points closer to the target and the
    pipeline repeats at the new scale; everything accumulates into one
    certificate.  A float pipeline cannot certify exact hits, so epsilon 0
    exhausts the budget unless the target is the seed's own circumcenter.
    """
    t = target.as_float()
    pa, pb, pc = (seed.a.as_float(), seed.b.as_float(), seed.c.as_float())
    if orientation(pa, pb, pc) == 0:
        raise CollinearSeed(f"seed triangle degenerates in float: {seed}")

    builder = DerivationBuilder("float64", 1e-9)
    ia, ib, ic = builder.seed(pa), builder.seed(pb), builder.seed(pc)
    _, c0 = builder.center_of(ia, ib, ic)
    best = c0.dist(t)
    if best <= epsilon:
        return builder.build()
    if epsilon <= 0:
        raise BudgetExceeded(best)

    triple: list[tuple[int, Point]] = [(ia, pa), (ib, pb), (ic, pc)]
    depth, grid = 7, 12
    depth_cap, grid_cap = 11, 28

    for _attempt in range(28):
        try:
            plat = _build_platform(builder, triple, depth, grid)
        except (GeometryError, SpiralError, FillError, ValueError):
            depth = min(depth + 1, depth_cap)
            continue

        plan_t = _plan_placement(plat, t)
        if plan_t is not None:
            best = min(best, plan_t.err)
            if plan_t.err <= 0.9 * epsilon:
                _emit_placement(builder, plat, plan_t)
                return builder.build()

        d_t = plat.center_actual.dist(t)
        s = plat.scale_actual
        if plan_t is None or d_t > 2.2 * s:
            hop = min(d_t, 2.0 * s)
            direction = (t - plat.center_actual) * (1.0 / d_t) if d_t > 0 \
                else Point(1.0, 0.0)
            anchor = plat.center_actual + direction * hop
            sigma = 0.8 * s
        else:
            if depth < depth_cap and plan_t.err <= 8 * epsilon:
                depth += 1
                grid = min(grid + 8, grid_cap)
                continue
            anchor = t
            e_ref = max(plan_t.err, 1e-13 * max(1.0, t.norm()))
            sigma = max(24 * e_ref, min(0.9 * epsilon * s / e_ref, 0.45 * s))
            sigma = min(sigma, 0.45 * s)

        new_triple: list[tuple[int, Point]] = []
        ok = True
        for ang_deg in (90, 210, 330):
            ang = math.radians(ang_deg)
            goal = anchor + Point(math.cos(ang), math.sin(ang)) * sigma
            pl = _plan_placement(plat, goal)
            if pl is None:
                ok = False
                break
            idx, pt = _emit_placement(builder, plat, pl)
            new_triple.append((idx, pt))
        if not ok or orientation(new_triple[0][1], new_triple[1][1],
                                 new_triple[2][1]) == 0:
            depth = min(depth + 1, depth_cap)
            grid = min(grid + 8, grid_cap)
            continue
        triple = new_triple

    raise BudgetExceeded(best)
