"""Derivation certificates: append-only DAGs of circumcenter constructions.

A derivation is an ordered list of steps.  Each step is either a seed point
or the circumcenter of three strictly earlier steps.  The list is a finite,
independently checkable witness that every recorded point belongs to the
circumcenter closure of the seeds.

Text format (one record per line, ``#`` starts a comment)::

    ccset-derivation v1 tower=<rational|float64> tol=<decimal>
    S <x> <y>
    C <i> <j> <k> <x> <y>

Indices are 0-based positions among the records.  Rational coordinates are
written ``p/q`` (or a bare integer), floats as shortest round-trip decimals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

from .geometry import Point, Scalar, circumcenter, is_exact_scalar

HEADER_PREFIX = "ccset-derivation v1"
TOWERS = ("rational", "float64")

# verifier-side collinearity threshold, deliberately local to this module
_VERIFY_COLLINEAR_EPS = 1e-12


class ParseError(ValueError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True)
class SeedStep:
    point: Point


@dataclass(frozen=True)
class CenterStep:
    i: int
    j: int
    k: int
    point: Point


Step = Union[SeedStep, CenterStep]


@dataclass(frozen=True)
class Derivation:
    steps: tuple[Step, ...]
    tower: str = "float64"
    tol: float = 1e-9

    def __len__(self) -> int:
        return len(self.steps)

    def point_at(self, index: int) -> Point:
        return self.steps[index].point

    def points(self) -> list[Point]:
        return [s.point for s in self.steps]

    def last_point(self) -> Point:
        return self.steps[-1].point


class DerivationBuilder:
    """Grow a derivation incrementally, tracking indices.

    ``center_of`` computes the circumcenter itself, so a recorded center can
    never drift from its cited ancestors.
    """

    def __init__(self, tower: str = "float64", tol: float = 1e-9):
        if tower not in TOWERS:
            raise ValueError(f"unknown tower {tower!r}")
        self.tower = tower
        self.tol = tol
        self._steps: list[Step] = []

    @classmethod
    def from_derivation(cls, d: Derivation) -> "DerivationBuilder":
        b = cls(d.tower, d.tol)
        b._steps = list(d.steps)
        return b

    def __len__(self) -> int:
        return len(self._steps)

    def point_at(self, index: int) -> Point:
        return self._steps[index].point

    def _coerce(self, p: Point) -> Point:
        if self.tower == "rational":
            if not p.is_exact():
                raise ValueError(f"non-exact point {p} in a rational-tower derivation")
            return Point(Fraction(p.x), Fraction(p.y))
        return p.as_float()

    def seed(self, p: Point) -> int:
        self._steps.append(SeedStep(self._coerce(p)))
        return len(self._steps) - 1

    def center_of(self, i: int, j: int, k: int) -> tuple[int, Point]:
        n = len(self._steps)
        if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
            raise IndexError(f"ancestor indices ({i}, {j}, {k}) out of range")
        c = circumcenter(self._steps[i].point, self._steps[j].point,
                         self._steps[k].point)
        c = self._coerce(c)
        self._steps.append(CenterStep(i, j, k, c))
        return len(self._steps) - 1, c

    def build(self) -> Derivation:
        return Derivation(tuple(self._steps), self.tower, self.tol)


@dataclass
class VerifyReport:
    ok: bool
    failed_step: Optional[int] = None
    residual: float = 0.0
    reason: str = ""
    steps_checked: int = 0


def _recompute_center(p: Point, q: Point, r: Point) -> Optional[Point]:
    """Independent circumcenter via the lifted determinant form.

    Kept separate from the kernel's perpendicular-bisector solver so the
    verifier does not share a code path with the builders it checks.  The
    determinant is evaluated in centroid-relative coordinates: without the
    shift it loses all significance on tiny triangles far from the origin.
    Returns None for (numerically) collinear inputs.
    """
    three = Fraction(3) if is_exact_scalar(p.x) and p.is_exact() and \
        q.is_exact() and r.is_exact() else 3.0
    gx = (p.x + q.x + r.x) / three
    gy = (p.y + q.y + r.y) / three
    px, py = p.x - gx, p.y - gy
    qx, qy = q.x - gx, q.y - gy
    rx, ry = r.x - gx, r.y - gy
    sp = px * px + py * py
    sq = qx * qx + qy * qy
    sr = rx * rx + ry * ry
    det = 2 * (px * (qy - ry) + qx * (ry - py) + rx * (py - qy))
    if is_exact_scalar(det):
        if det == 0:
            return None
    else:
        m = max(abs(px), abs(py), abs(qx), abs(qy), abs(rx), abs(ry))
        if abs(det) <= 2 * _VERIFY_COLLINEAR_EPS * m * m:
            return None
    cx = (sp * (qy - ry) + sq * (ry - py) + sr * (py - qy)) / det
    cy = (sp * (rx - qx) + sq * (px - rx) + sr * (qx - px)) / det
    return Point(gx + cx, gy + cy)


def verify(d: Derivation, tol: Optional[float] = None) -> VerifyReport:
    """Recompute every center step and compare against the stored point.

    With ``tol`` 0 on a rational-tower derivation the comparison is exact
    equality.  Reports the first failing step.
    """
    if tol is None:
        tol = d.tol
    checked = 0
    for idx, step in enumerate(d.steps):
        if isinstance(step, SeedStep):
            continue
        if not (step.i < idx and step.j < idx and step.k < idx):
            return VerifyReport(False, idx, math.inf,
                                "ancestor index not strictly earlier", checked)
        if step.i < 0 or step.j < 0 or step.k < 0:
            return VerifyReport(False, idx, math.inf, "negative ancestor index", checked)
        pa = d.steps[step.i].point
        pb = d.steps[step.j].point
        pc = d.steps[step.k].point
        expected = _recompute_center(pa, pb, pc)
        if expected is None:
            return VerifyReport(False, idx, math.inf, "collinear ancestors", checked)
        if tol == 0 and expected.is_exact() and step.point.is_exact():
            if expected != step.point:
                res = expected.as_float().dist(step.point.as_float())
                return VerifyReport(False, idx, res, "stored point differs exactly", checked)
        else:
            res = expected.as_float().dist(step.point.as_float())
            if res > tol:
                return VerifyReport(False, idx, res, "stored point off by more than tol", checked)
        checked += 1
    return VerifyReport(True, None, 0.0, "", checked)


def _format_scalar(v: Scalar, tower: str) -> str:
    if tower == "rational":
        return str(Fraction(v))
    return repr(float(v))


def _parse_scalar(token: str, tower: str, line_no: int) -> Scalar:
    try:
        if tower == "rational":
            return Fraction(token)
        return float(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(line_no, f"bad coordinate {token!r}: {exc}") from None


def serialize(d: Derivation) -> str:
    lines = [f"{HEADER_PREFIX} tower={d.tower} tol={repr(float(d.tol))}"]
    for step in d.steps:
        if isinstance(step, SeedStep):
            lines.append(f"S {_format_scalar(step.point.x, d.tower)} "
                         f"{_format_scalar(step.point.y, d.tower)}")
        else:
            lines.append(f"C {step.i} {step.j} {step.k} "
                         f"{_format_scalar(step.point.x, d.tower)} "
                         f"{_format_scalar(step.point.y, d.tower)}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> Derivation:
    lines = text.splitlines()
    header: Optional[str] = None
    header_line = 0
    records: list[tuple[int, str]] = []
    for line_no, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if header is None:
            header = body
            header_line = line_no
        else:
            records.append((line_no, body))
    if header is None:
        raise ParseError(0, "empty input: missing header")
    if not header.startswith(HEADER_PREFIX):
        raise ParseError(header_line, f"bad header {header!r}")
    tower = None
    tol = None
    for token in header[len(HEADER_PREFIX):].split():
        if token.startswith("tower="):
            tower = token[len("tower="):]
        elif token.startswith("tol="):
            try:
                tol = float(token[len("tol="):])
            except ValueError:
                raise ParseError(header_line, f"bad tol in header: {token}") from None
        else:
            raise ParseError(header_line, f"unknown header field {token!r}")
    if tower not in TOWERS:
        raise ParseError(header_line, f"unknown tower {tower!r}")
    if tol is None:
        raise ParseError(header_line, "missing tol in header")

    steps: list[Step] = []
    for line_no, body in records:
        fields = body.split()
        kind = fields[0]
        if kind == "S":
            if len(fields) != 3:
                raise ParseError(line_no, "seed record needs exactly 2 coordinates")
            x = _parse_scalar(fields[1], tower, line_no)
            y = _parse_scalar(fields[2], tower, line_no)
            steps.append(SeedStep(Point(x, y)))
        elif kind == "C":
            if len(fields) != 6:
                raise ParseError(line_no, "center record needs 3 indices and 2 coordinates")
            try:
                i, j, k = int(fields[1]), int(fields[2]), int(fields[3])
            except ValueError:
                raise ParseError(line_no, "non-integer ancestor index") from None
            own = len(steps)
            for idx in (i, j, k):
                if idx < 0:
                    raise ParseError(line_no, f"negative ancestor index {idx}")
                if idx >= own:
                    raise ParseError(
                        line_no,
                        f"ancestor index {idx} does not precede step {own} (DAG violation)")
            x = _parse_scalar(fields[4], tower, line_no)
            y = _parse_scalar(fields[5], tower, line_no)
            steps.append(CenterStep(i, j, k, Point(x, y)))
        else:
            raise ParseError(line_no, f"unknown record kind {kind!r}")
    return Derivation(tuple(steps), tower, tol)
