"""Closed-form Neumann spectra of rectangles and the shape functionals built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import HypothesisError
from .geometry import HYPOTHESIS_ATOL, ParallelogramSpec, Polygon, RectangleSpec, area, perimeter

PI2 = math.pi ** 2
M2_SQUARE = 16 * PI2  # also the value on the equilateral triangle


@dataclass(frozen=True, order=True)
class RectMode:
    value: float
    m: int
    n: int


@dataclass(frozen=True)
class ShapeMeasures:
    mu2: float
    perimeter: float
    area: float

    @property
    def M2(self) -> float:
        return m2(self.mu2, self.perimeter)

    @classmethod
    def of(cls, polygon: Polygon, mu2: float) -> "ShapeMeasures":
        return cls(mu2, perimeter(polygon), area(polygon))


def _mode_value(m: int, n: int, w: float, h: float) -> float:
    return PI2 * (m * m / (w * w) + n * n / (h * h))


def rect_neumann_eigs(rect: RectangleSpec, k: int) -> list[RectMode]:
    """The ``k`` smallest eigenvalues pi^2 (m^2/w^2 + n^2/h^2), ties ordered by (m, n)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    w, h = rect.w, rect.h
    cap = PI2 * (1 / (w * w) + 1 / (h * h))
    while True:
        root = math.sqrt(cap) / math.pi
        m_max = math.ceil(w * root)
        n_max = math.ceil(h * root)
        modes = [RectMode(_mode_value(m, n, w, h), m, n)
                 for m in range(m_max + 1) for n in range(n_max + 1)]
        # every mode with value <= cap is in the box, so the smallest k of those are exact
        below = sorted(md for md in modes if md.value <= cap)
        if len(below) >= k:
            return below[:k]
        cap *= 2


def mu2_rect(rect: RectangleSpec) -> float:
    side = max(rect.w, rect.h)
    return _mode_value(1, 0, side, 1.0)


def theorem1_margin(spec: ParallelogramSpec) -> float:
    return math.sin(spec.alpha) - spec.ratio


def theorem2_margin(spec: ParallelogramSpec) -> float:
    return 2 * math.sin(spec.alpha) - 1 - spec.ratio


def _require_theorem1(spec: ParallelogramSpec) -> None:
    if not spec.satisfies_theorem1():
        margin = theorem1_margin(spec)
        raise HypothesisError(
            f"b/a = {spec.ratio:.6g} exceeds sin(alpha) = {math.sin(spec.alpha):.6g}", margin)


def mu2_rect_upper_bound_for_parallelogram(spec: ParallelogramSpec) -> float:
    """pi^2 / (a sin alpha)^2, the comparison rectangle's mu_2 and an upper bound for mu_2(Q)."""
    _require_theorem1(spec)
    return PI2 / spec.height ** 2


def m2(mu2: float, perimeter: float) -> float:
    if not (mu2 > 0 and perimeter > 0):
        raise ValueError("mu2 and perimeter must be positive")
    return mu2 * perimeter ** 2


def theorem2_bound(spec: ParallelogramSpec) -> float:
    """4 (1 + b/a)^2 (pi / sin alpha)^2, an upper bound for mu_2(Q) p(Q)^2."""
    _require_theorem1(spec)
    return 4 * (1 + spec.ratio) ** 2 * (math.pi / math.sin(spec.alpha)) ** 2


def _bessel_j(n: int, x: float) -> float:
    half = x / 2
    term = half ** n / math.factorial(n)
    total = term
    k = 0
    while abs(term) > 1e-18 * abs(total) or k < 3:
        k += 1
        term *= -half * half / (k * (k + n))
        total += term
    return total


def bessel_j1_prime(x: float) -> float:
    return 0.5 * (_bessel_j(0, x) - _bessel_j(2, x))


def first_zero_j1_prime(tol: float = 1e-13) -> float:
    lo, hi = 1.0, 2.0
    f_lo = bessel_j1_prime(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j1_prime(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def szego_bound_product() -> float:
    """mu_2(D) * Area(D) for a disk D; maximal over planar domains."""
    j = first_zero_j1_prime()
    return math.pi * j * j
