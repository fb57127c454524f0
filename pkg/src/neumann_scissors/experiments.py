"""Theorem checks and parameter sweeps over (b/a, alpha) with a = 1."""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .closed_form import (
    M2_SQUARE,
    mu2_rect,
    theorem1_margin,
    theorem2_bound,
    theorem2_margin,
)
from .errors import ConvergenceError, DomainError, HypothesisError
from .fem import mu2_converged
from .geometry import (
    HYPOTHESIS_ATOL,
    ParallelogramSpec,
    area,
    comparison_rectangle,
    diameter,
    make_parallelogram,
    perimeter,
)
from .trial import SeparableTrial, upper_bound_mu2

log = logging.getLogger(__name__)

THEOREM2 = "theorem2"
THEOREM1_ONLY = "theorem1_only"
HYPOTHESIS_FAIL = "hypothesis_fail"

CSV_HEADER = ["a", "b", "alpha", "ratio", "region", "mu2_fem", "mu2_R", "trial_bound", "M2", "pass"]


def classify_region(ratio: float, alpha: float) -> str:
    if not 0 < ratio <= 1:
        raise DomainError(f"ratio b/a must lie in (0, 1], got {ratio}")
    if not 0 < alpha <= math.pi / 2:
        raise DomainError(f"alpha must lie in (0, pi/2], got {alpha}")
    s = math.sin(alpha)
    if ratio <= 2 * s - 1 + HYPOTHESIS_ATOL:
        return THEOREM2
    if ratio <= s + HYPOTHESIS_ATOL:
        return THEOREM1_ONLY
    return HYPOTHESIS_FAIL


@dataclass
class SweepRow:
    a: float
    b: float
    alpha: float
    ratio: float
    region: str
    mu2_fem: float | None = None
    mu2_R: float | None = None
    trial_bound: float | None = None
    M2: float | None = None
    passed: bool | None = None
    theorem2_bound: float | None = None
    margin_t1: float | None = None
    margin_t2: float | None = None
    area: float | None = None
    perimeter: float | None = None
    diameter: float | None = None
    error: str | None = None

    def csv_fields(self) -> list[str]:
        def fmt(v):
            return "" if v is None else repr(float(v))

        if self.error is not None:
            verdict = "error"
        elif self.passed is None:
            verdict = ""
        else:
            verdict = "true" if self.passed else "false"
        return [fmt(self.a), fmt(self.b), fmt(self.alpha), fmt(self.ratio), self.region,
                fmt(self.mu2_fem), fmt(self.mu2_R), fmt(self.trial_bound), fmt(self.M2), verdict]

    @property
    def failed(self) -> bool:
        """True when a theorem check was attempted and did not pass."""
        claims = self.region in (THEOREM1_ONLY, THEOREM2)
        return claims and (self.error is not None or self.passed is False)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _base_row(spec: ParallelogramSpec) -> SweepRow:
    poly = make_parallelogram(spec)
    return SweepRow(
        a=spec.a, b=spec.b, alpha=spec.alpha, ratio=spec.ratio,
        region=classify_region(spec.ratio, spec.alpha),
        margin_t1=theorem1_margin(spec), margin_t2=theorem2_margin(spec),
        area=area(poly), perimeter=perimeter(poly), diameter=diameter(poly),
    )


def _fill_theorem1(row: SweepRow, spec: ParallelogramSpec, tol: float) -> bool:
    row.mu2_R = mu2_rect(comparison_rectangle(spec))
    row.trial_bound = upper_bound_mu2(make_parallelogram(spec), SeparableTrial(spec.height))
    return row.mu2_fem <= row.mu2_R * (1 + 2 * tol)


def _fill_theorem2(row: SweepRow, spec: ParallelogramSpec, tol: float) -> bool:
    row.theorem2_bound = theorem2_bound(spec)
    return row.M2 <= M2_SQUARE * (1 + 2 * tol)


def _solve(row: SweepRow, spec: ParallelogramSpec, tol: float) -> None:
    row.mu2_fem = mu2_converged(spec, tol).mu2
    row.M2 = row.mu2_fem * row.perimeter ** 2


def verify_theorem1(spec: ParallelogramSpec, target_rel_err: float = 1e-3) -> SweepRow:
    """FEM mu_2 of the parallelogram against the comparison rectangle's closed form.

    The extrapolated FEM value approaches mu_2 from above, so a pass is a
    conservative confirmation of mu_2(Q) <= mu_2(R).
    """
    if not spec.satisfies_theorem1():
        raise HypothesisError(
            f"theorem 1 needs b/a <= sin(alpha); b/a = {spec.ratio:.6g}, "
            f"sin(alpha) = {math.sin(spec.alpha):.6g}", theorem1_margin(spec))
    row = _base_row(spec)
    _solve(row, spec, target_rel_err)
    row.passed = _fill_theorem1(row, spec, target_rel_err)
    return row


def verify_theorem2(spec: ParallelogramSpec, target_rel_err: float = 1e-3) -> SweepRow:
    if not spec.satisfies_theorem2():
        raise HypothesisError(
            f"theorem 2 needs b/a <= 2 sin(alpha) - 1; b/a = {spec.ratio:.6g}, "
            f"2 sin(alpha) - 1 = {2 * math.sin(spec.alpha) - 1:.6g}", theorem2_margin(spec))
    row = _base_row(spec)
    _solve(row, spec, target_rel_err)
    t1 = _fill_theorem1(row, spec, target_rel_err)
    row.passed = _fill_theorem2(row, spec, target_rel_err) and t1
    return row


@dataclass
class RunConfig:
    ratio_min: float = 0.1
    ratio_max: float = 1.0
    ratio_steps: int = 5
    alpha_min: float = math.pi / 6
    alpha_max: float = math.pi / 2
    alpha_steps: int = 5
    tol: float = 1e-3
    out: str | None = None
    workers: int = 1
    region_filter: str | None = None  # keep only cells of this region (theorem1 includes theorem2)
    render_dissections: str | None = None  # directory for per-cell SVGs
    szego: bool = False

    def __post_init__(self):
        if self.ratio_steps < 1 or self.alpha_steps < 1:
            raise DomainError("grid step counts must be at least 1")
        if not 0 < self.alpha_min <= self.alpha_max <= math.pi / 2:
            raise DomainError("need 0 < alpha_min <= alpha_max <= pi/2")
        if not 0 < self.ratio_min <= self.ratio_max <= 1:
            raise DomainError("need 0 < ratio_min <= ratio_max <= 1")
        if self.region_filter not in (None, "theorem1", "theorem2"):
            raise DomainError(f"unknown region filter {self.region_filter!r}")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")

    def grid(self) -> list[tuple[float, float]]:
        """(ratio, alpha) cells in alpha-major, ratio-minor order."""
        alphas = np.linspace(self.alpha_min, self.alpha_max, self.alpha_steps)
        ratios = np.linspace(self.ratio_min, self.ratio_max, self.ratio_steps)
        cells = []
        for alpha in alphas:
            for ratio in ratios:
                region = classify_region(float(ratio), float(alpha))
                if self.region_filter == "theorem2" and region != THEOREM2:
                    continue
                if self.region_filter == "theorem1" and region == HYPOTHESIS_FAIL:
                    continue
                cells.append((float(ratio), float(alpha)))
        return cells


def sweep_cell(ratio: float, alpha: float, tol: float) -> SweepRow:
    spec = ParallelogramSpec(1.0, ratio, alpha)
    row = _base_row(spec)
    try:
        _solve(row, spec, tol)
        if row.region == HYPOTHESIS_FAIL:
            return row
        passed = _fill_theorem1(row, spec, tol)
        if row.region == THEOREM2:
            passed = _fill_theorem2(row, spec, tol) and passed
        row.passed = passed
    except (ConvergenceError, DomainError, ArithmeticError) as exc:
        log.warning("cell ratio=%s alpha=%s failed: %s", ratio, alpha, exc)
        row.error = str(exc)
    return row


def _cell_star(args):
    return sweep_cell(*args)


def sweep(config: RunConfig) -> list[SweepRow]:
    jobs = [(ratio, alpha, config.tol) for ratio, alpha in config.grid()]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_cell_star, jobs))  # map preserves submission order
    else:
        rows = [sweep_cell(*job) for job in jobs]
    return rows


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()
