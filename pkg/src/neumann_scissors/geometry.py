"""Planar primitives in the fixed parallelogram frame.

The base AB lies on the x-axis starting at the origin and the parallelogram
leans towards +x, so every vertex has y >= 0.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import DomainError

MEASURE_RTOL = 1e-12
# Tolerance used when comparing hypotheses such as b/a <= sin(alpha); sin(pi/6)
# evaluates to 0.49999999999999994 in binary floating point.
HYPOTHESIS_ATOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


def _cross(o: Point2, a: Point2, b: Point2) -> float:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def _segments_cross(p1, p2, q1, q2) -> bool:
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4)


@dataclass(frozen=True)
class Polygon:
    """Counterclockwise simple polygon, closed implicitly."""

    vertices: tuple[Point2, ...]

    def __init__(self, vertices: Iterable[Sequence[float]]):
        pts = tuple(Point2(float(x), float(y)) for x, y in vertices)
        if len(pts) < 3:
            raise DomainError(f"polygon needs at least 3 vertices, got {len(pts)}")
        if not all(math.isfinite(c) for p in pts for c in p):
            raise DomainError("polygon vertices must be finite")
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        diag = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
        n = len(pts)
        for i in range(n):
            if math.dist(pts[i], pts[(i + 1) % n]) <= 1e-12 * diag:
                raise DomainError(f"vertices {i} and {(i + 1) % n} coincide")
        if _signed_area(pts) <= 0:
            raise DomainError("polygon must be counterclockwise with positive area")
        if n > 3:
            for i in range(n):
                for j in range(i + 2, n):
                    if i == 0 and j == n - 1:
                        continue
                    if _segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                        raise DomainError("polygon is self-intersecting")
        object.__setattr__(self, "vertices", pts)

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def translated(self, dx: float, dy: float = 0.0) -> "Polygon":
        return Polygon((p.x + dx, p.y + dy) for p in self.vertices)

    def is_convex(self) -> bool:
        pts = self.vertices
        n = len(pts)
        scale = max(abs(c) for p in pts for c in p) or 1.0
        for i in range(n):
            if _cross(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]) < -1e-12 * scale * scale:
                return False
        return True

    def contains(self, x: float, y: float, tol: float = 0.0) -> bool:
        """Point-in-polygon test for convex polygons, boundary included."""
        q = Point2(x, y)
        v = self.vertices
        for i in range(len(v)):
            A, B = v[i], v[(i + 1) % len(v)]
            if _cross(A, B, q) < -tol * math.dist(A, B):
                return False
        return True

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def to_dict(self) -> dict:
        return {"vertices": [[p.x, p.y] for p in self.vertices]}

    @classmethod
    def from_dict(cls, data: dict) -> "Polygon":
        return cls(data["vertices"])

    def to_json(self) -> str:
        # json emits repr(float), i.e. the shortest round-tripping form (<= 17 digits)
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class ParallelogramSpec:
    """Sides ``a >= b > 0`` and smallest angle ``alpha`` in (0, pi/2]."""

    a: float
    b: float
    alpha: float

    def __post_init__(self):
        a, b, alpha = self.a, self.b, self.alpha
        if not all(math.isfinite(v) for v in (a, b, alpha)):
            raise DomainError("parallelogram parameters must be finite")
        if not b > 0:
            raise DomainError(f"shorter side must be positive, got b={b}")
        if a < b:
            raise DomainError(f"need a >= b, got a={a}, b={b}")
        if not 0 < alpha <= math.pi / 2:
            raise DomainError(f"smallest angle must lie in (0, pi/2], got {alpha}")

    @property
    def height(self) -> float:
        return self.a * math.sin(self.alpha)

    @property
    def offset(self) -> float:
        """Horizontal lean of the top side, ``a cos(alpha)`` (0 for a rectangle)."""
        if self.alpha == math.pi / 2:
            return 0.0
        return self.a * math.cos(self.alpha)

    @property
    def ratio(self) -> float:
        return self.b / self.a

    def scaled(self, t: float) -> "ParallelogramSpec":
        return ParallelogramSpec(self.a * t, self.b * t, self.alpha)

    def satisfies_theorem1(self) -> bool:
        return self.ratio <= math.sin(self.alpha) + HYPOTHESIS_ATOL

    def satisfies_theorem2(self) -> bool:
        return self.ratio <= 2 * math.sin(self.alpha) - 1 + HYPOTHESIS_ATOL


@dataclass(frozen=True)
class RectangleSpec:
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0 and math.isfinite(self.w) and math.isfinite(self.h)):
            raise DomainError(f"rectangle sides must be positive, got {self.w} x {self.h}")

    def polygon(self) -> Polygon:
        return Polygon([(0, 0), (self.w, 0), (self.w, self.h), (0, self.h)])

    def scaled(self, t: float) -> "RectangleSpec":
        return RectangleSpec(self.w * t, self.h * t)


def comparison_rectangle(spec: ParallelogramSpec) -> RectangleSpec:
    """Rectangle with the same base ``b`` and the same area as the parallelogram."""
    return RectangleSpec(spec.b, spec.height)


@dataclass(frozen=True)
class SlabFunction:
    """Piecewise linear horizontal chord width ``w(y) = c0 + c1*y``.

    ``coefficients[i]`` applies on ``[breakpoints[i], breakpoints[i+1]]``.
    """

    breakpoints: tuple[float, ...]
    coefficients: tuple[tuple[float, float], ...]

    def __call__(self, y: float) -> float:
        bp = self.breakpoints
        if y < bp[0] or y > bp[-1]:
            return 0.0
        for i in range(len(self.coefficients)):
            if y <= bp[i + 1]:
                c0, c1 = self.coefficients[i]
                return max(c0 + c1 * y, 0.0)
        raise AssertionError("unreachable")

    def intervals(self):
        for i, (c0, c1) in enumerate(self.coefficients):
            yield self.breakpoints[i], self.breakpoints[i + 1], c0, c1

    def integral(self) -> float:
        return sum(c0 * (y1 - y0) + 0.5 * c1 * (y1 * y1 - y0 * y0)
                   for y0, y1, c0, c1 in self.intervals())


def _signed_area(pts: Sequence[Point2]) -> float:
    n = len(pts)
    return 0.5 * math.fsum(pts[i].x * pts[(i + 1) % n].y - pts[(i + 1) % n].x * pts[i].y
                           for i in range(n))


def make_parallelogram(spec: ParallelogramSpec) -> Polygon:
    if not isinstance(spec, ParallelogramSpec):
        raise DomainError("expected a ParallelogramSpec")
    b, h, d = spec.b, spec.height, spec.offset
    return Polygon([(0.0, 0.0), (b, 0.0), (b + d, h), (d, h)])


def area(p: Polygon) -> float:
    return _signed_area(p.vertices)


def perimeter(p: Polygon) -> float:
    v = p.vertices
    return sum(math.dist(v[i], v[(i + 1) % len(v)]) for i in range(len(v)))


def _require_convex(p: Polygon) -> None:
    if not p.is_convex():
        raise DomainError("operation requires a convex polygon")


def diameter(p: Polygon) -> float:
    _require_convex(p)
    v = p.vertices
    return max(math.dist(v[i], v[j]) for i in range(len(v)) for j in range(i + 1, len(v)))


def _chord(p: Polygon, y: float) -> tuple[float, float] | None:
    """x-extent of the horizontal chord of a convex polygon at height ``y``."""
    xs = []
    v = p.vertices
    n = len(v)
    for i in range(n):
        P, Q = v[i], v[(i + 1) % n]
        lo, hi = min(P.y, Q.y), max(P.y, Q.y)
        if lo <= y <= hi:
            if P.y == Q.y:
                xs.extend((P.x, Q.x))
            else:
                t = (y - P.y) / (Q.y - P.y)
                xs.append(P.x + t * (Q.x - P.x))
    if not xs:
        return None
    return min(xs), max(xs)


def slab_decompose(p: Polygon) -> SlabFunction:
    """Split a convex polygon at its vertex heights into linear-width slabs."""
    _require_convex(p)
    ys = sorted({q.y for q in p.vertices})
    coeffs = []
    for y0, y1 in zip(ys, ys[1:]):
        # Evaluate chord widths strictly inside the slab: at the endpoints a
        # horizontal edge would contribute its whole length.
        ya = y0 + (y1 - y0) / 3
        yb = y1 - (y1 - y0) / 3
        wa = _width(p, ya)
        wb = _width(p, yb)
        c1 = (wb - wa) / (yb - ya)
        c0 = wa - c1 * ya
        coeffs.append((c0, c1))
    return SlabFunction(tuple(ys), tuple(coeffs))


def _width(p: Polygon, y: float) -> float:
    ch = _chord(p, y)
    return 0.0 if ch is None else ch[1] - ch[0]


def _clip_halfplane(p: Polygon, y0: float, keep_below: bool) -> list[Point2]:
    out: list[Point2] = []
    v = p.vertices
    n = len(v)

    def inside(q: Point2) -> bool:
        return q.y <= y0 if keep_below else q.y >= y0

    for i in range(n):
        P, Q = v[i], v[(i + 1) % n]
        if inside(P):
            out.append(P)
        if inside(P) != inside(Q) and P.y != y0 and Q.y != y0:
            t = (y0 - P.y) / (Q.y - P.y)
            out.append(Point2(P.x + t * (Q.x - P.x), y0))
    # collapse duplicates created when a vertex sits exactly on the line
    dedup: list[Point2] = []
    for q in out:
        if not dedup or q != dedup[-1]:
            dedup.append(q)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _snapped_cut(p: Polygon, y0: float) -> float:
    _require_convex(p)
    ymin = min(q.y for q in p.vertices)
    ymax = max(q.y for q in p.vertices)
    if not ymin < y0 < ymax:
        raise DomainError(f"cut height {y0} outside the open range ({ymin}, {ymax})")
    tol = 1e-12 * (ymax - ymin)
    for q in p.vertices:
        if abs(q.y - y0) <= tol:
            y0 = q.y
            break
    if not ymin < y0 < ymax:
        raise DomainError(f"cut height {y0} snaps onto the polygon's extreme vertex")
    return y0


def clip_below(p: Polygon, y0: float) -> Polygon:
    """Part of a convex polygon with ``y <= y0``."""
    y0 = _snapped_cut(p, y0)
    return Polygon(_clip_halfplane(p, y0, keep_below=True))


def clip_above(p: Polygon, y0: float) -> Polygon:
    """Part of a convex polygon with ``y >= y0``."""
    y0 = _snapped_cut(p, y0)
    return Polygon(_clip_halfplane(p, y0, keep_below=False))


def clip_convex(subject: Sequence[Point2], clipper: Polygon) -> list[Point2]:
    """Sutherland-Hodgman intersection of a convex polygon with a convex clipper.

    Returns a (possibly empty or degenerate) vertex list; callers only use its area.
    """
    out = list(subject)
    c = clipper.vertices
    m = len(c)
    for i in range(m):
        if not out:
            break
        A, B = c[i], c[(i + 1) % m]
        inp, out = out, []
        for j in range(len(inp)):
            P, Q = inp[j], inp[(j + 1) % len(inp)]
            dp, dq = _cross(A, B, P), _cross(A, B, Q)
            if dp >= 0:
                out.append(P)
            if (dp >= 0) != (dq >= 0):
                t = dp / (dp - dq)
                out.append(Point2(P.x + t * (Q.x - P.x), P.y + t * (Q.y - P.y)))
    return out


def intersection_area(p: Polygon, q: Polygon) -> float:
    pts = clip_convex(p.vertices, q)
    if len(pts) < 3:
        return 0.0
    return max(_signed_area(pts), 0.0)
