"""Translation-only dissection of a parallelogram onto its comparison rectangle.

The parallelogram is cut by horizontal lines into strips whose top side is
shifted by exactly ``b`` with respect to the bottom side, i.e. strips of height
``b*tan(alpha)``.  A vertical cut through the strip's upper-left corner splits
each such strip into two congruent right triangles, and the topmost partial
strip is cut by the vertical line through its lower-right corner.  Moving every
piece by a multiple of ``-b`` along the x-axis stacks the strips into the
rectangle ``[0, b] x [0, a*sin(alpha)]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DomainError
from .geometry import (
    ParallelogramSpec,
    Polygon,
    RectangleSpec,
    area,
    comparison_rectangle,
    intersection_area,
    make_parallelogram,
)

SNAP_RTOL = 1e-12
AREA_RTOL = 1e-12
OVERLAP_RTOL = 1e-10
COVER_RTOL = 1e-10
CONTAIN_RTOL = 1e-10


@dataclass(frozen=True)
class Piece:
    polygon: Polygon
    shift: float

    def __post_init__(self):
        if not math.isfinite(self.shift):
            raise DomainError("piece shift must be finite")

    def placed(self) -> Polygon:
        """The piece at its position inside the target rectangle."""
        return self.polygon.translated(self.shift)


@dataclass(frozen=True)
class Dissection:
    source: Polygon
    target: RectangleSpec
    pieces: tuple[Piece, ...]
    full_strips: int
    remainder: float

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "target": {"w": self.target.w, "h": self.target.h},
            "pieces": [{"polygon": p.polygon.to_dict(), "shift": p.shift} for p in self.pieces],
            "full_strips": self.full_strips,
            "remainder": self.remainder,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Dissection":
        return cls(
            source=Polygon.from_dict(data["source"]),
            target=RectangleSpec(data["target"]["w"], data["target"]["h"]),
            pieces=tuple(Piece(Polygon.from_dict(p["polygon"]), float(p["shift"]))
                         for p in data["pieces"]),
            full_strips=int(data["full_strips"]),
            remainder=float(data["remainder"]),
        )

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def expected_piece_count(full_strips: int, remainder: float) -> int:
    if remainder > 0:
        return 2 * full_strips + 2
    return 2 * full_strips if full_strips > 0 else 1


def strip_count(spec: ParallelogramSpec) -> tuple[int, float]:
    """Number of full strips and the leftover horizontal offset of the top strip."""
    b, d = spec.b, spec.offset
    j = math.floor(d / b)
    r = d - j * b
    if r < SNAP_RTOL * b:
        r = 0.0
    elif b - r < SNAP_RTOL * b:
        j, r = j + 1, 0.0
    return j, r


def dissect(spec: ParallelogramSpec) -> Dissection:
    source = make_parallelogram(spec)
    target = comparison_rectangle(spec)
    j_full, r = strip_count(spec)
    b, h, d = spec.b, spec.height, spec.offset

    if j_full == 0 and r == 0.0:
        return Dissection(source, target, (Piece(source, 0.0),), 0, 0.0)

    def level(j: int) -> float:
        # height at which the left edge has moved right by j*b
        return h if j * b >= d else h * (j * b / d)

    pieces: list[Piece] = []
    for j in range(1, j_full + 1):
        y0 = 0.0 if j == 1 else level(j - 1)
        y1 = h if (j == j_full and r == 0.0) else level(j)
        xl, xm, xr = (j - 1) * b, j * b, (j + 1) * b
        pieces.append(Piece(Polygon([(xl, y0), (xm, y0), (xm, y1)]), -(j - 1) * b))
        pieces.append(Piece(Polygon([(xm, y0), (xr, y1), (xm, y1)]), -j * b))
    if r > 0.0:
        y0 = level(j_full) if j_full else 0.0
        xl, xm = j_full * b, (j_full + 1) * b
        pieces.append(Piece(Polygon([(xl, y0), (xm, y0), (xm, h), (d, h)]), -j_full * b))
        pieces.append(Piece(Polygon([(xm, y0), (d + b, h), (xm, h)]), -(j_full + 1) * b))
    return Dissection(source, target, tuple(pieces), j_full, r)


@dataclass
class VerificationReport:
    area_defect: float
    source_overlap: float
    target_overlap: float
    cover_defect: float
    out_of_target: float
    out_of_source: float
    piece_count: int
    expected_count: int
    horizontal: bool
    failures: list[str] = field(default_factory=list)

    @property
    def max_overlap(self) -> float:
        return max(self.source_overlap, self.target_overlap)

    @property
    def passed(self) -> bool:
        return not self.failures


def _boxes_overlap(b1, b2, tol) -> bool:
    return (min(b1[2], b2[2]) - max(b1[0], b2[0]) > tol
            and min(b1[3], b2[3]) - max(b1[1], b2[1]) > tol)


def _max_pairwise_overlap(polys: list[Polygon], tol: float) -> float:
    boxes = [p.bbox() for p in polys]
    worst = 0.0
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if _boxes_overlap(boxes[i], boxes[j], tol):
                worst = max(worst, intersection_area(polys[i], polys[j]))
    return worst


def _excess_outside_box(p: Polygon, w: float, h: float) -> float:
    return max(max(-q.x, q.x - w, -q.y, q.y - h, 0.0) for q in p.vertices)


def _excess_outside_convex(p: Polygon, hull: Polygon) -> float:
    hv = hull.vertices
    worst = 0.0
    for q in p.vertices:
        for i in range(len(hv)):
            A, B = hv[i], hv[(i + 1) % len(hv)]
            ex, ey = B.x - A.x, B.y - A.y
            # signed distance to the right of edge AB (outside for a CCW hull)
            dist = -((ex * (q.y - A.y) - ey * (q.x - A.x)) / math.hypot(ex, ey))
            worst = max(worst, dist)
    return worst


def verify_dissection(d: Dissection) -> VerificationReport:
    """Check that the pieces partition the source and, once shifted, tile the target."""
    src_area = area(d.source)
    w, h = d.target.w, d.target.h
    scale = max(w, h)
    polys = [p.polygon for p in d.pieces]
    placed = [p.placed() for p in d.pieces]

    piece_area = math.fsum(area(p) for p in polys)
    placed_area = math.fsum(area(p) for p in placed)
    report = VerificationReport(
        area_defect=abs(piece_area - src_area),
        source_overlap=_max_pairwise_overlap(polys, 1e-14 * scale),
        target_overlap=_max_pairwise_overlap(placed, 1e-14 * scale),
        cover_defect=abs(placed_area - w * h),
        out_of_target=max(_excess_outside_box(p, w, h) for p in placed),
        out_of_source=max(_excess_outside_convex(p, d.source) for p in polys),
        piece_count=len(d.pieces),
        expected_count=expected_piece_count(d.full_strips, d.remainder),
        horizontal=all(math.isfinite(p.shift) for p in d.pieces),
    )
    f = report.failures
    if report.area_defect > AREA_RTOL * src_area:
        f.append(f"piece areas differ from source area by {report.area_defect:.3e}")
    if report.max_overlap > OVERLAP_RTOL * src_area:
        f.append(f"pieces overlap (area {report.max_overlap:.3e})")
    if report.cover_defect > COVER_RTOL * w * h:
        f.append(f"translated pieces miss the target area by {report.cover_defect:.3e}")
    if report.out_of_target > CONTAIN_RTOL * scale:
        f.append(f"a translated piece leaves the target by {report.out_of_target:.3e}")
    if report.out_of_source > CONTAIN_RTOL * scale:
        f.append(f"a piece leaves the source by {report.out_of_source:.3e}")
    if report.piece_count != report.expected_count:
        f.append(f"{report.piece_count} pieces, expected {report.expected_count}")
    if not report.horizontal:
        f.append("non-finite translation")
    return report
