"""Rayleigh quotient of the x-independent trial function cos(pi*y/H).

Translating a piece horizontally leaves y unchanged, so the rectangle's
eigenfunction pulled back through a dissection is the same formula on the
whole parallelogram.  All integrals are evaluated in closed form slab by slab.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, PreconditionError
from .geometry import Polygon, SlabFunction, area, slab_decompose
from .scissors import Dissection

ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class SeparableTrial:
    """u(x, y) = cos(pi*y/H), grad u = (0, -(pi/H) sin(pi*y/H))."""

    H: float

    def __post_init__(self):
        if not self.H > 0:
            raise DomainError(f"trial height scale must be positive, got {self.H}")

    @property
    def wavenumber(self) -> float:
        return math.pi / self.H

    def __call__(self, x: float, y: float) -> float:
        return math.cos(self.wavenumber * y)

    def grad_sq(self, x: float, y: float) -> float:
        k = self.wavenumber
        return (k * math.sin(k * y)) ** 2


# antiderivatives in y of {1, y} x {cos^2(ky), sin^2(ky), cos(ky)}
def _cos2(k, y):
    return y / 2 + math.sin(2 * k * y) / (4 * k)


def _y_cos2(k, y):
    return y * y / 4 + (y * math.sin(2 * k * y) / (2 * k) + math.cos(2 * k * y) / (4 * k * k)) / 2


def _sin2(k, y):
    return y / 2 - math.sin(2 * k * y) / (4 * k)


def _y_sin2(k, y):
    return y * y / 4 - (y * math.sin(2 * k * y) / (2 * k) + math.cos(2 * k * y) / (4 * k * k)) / 2


def _cos(k, y):
    return math.sin(k * y) / k


def _y_cos(k, y):
    return y * math.sin(k * y) / k + math.cos(k * y) / (k * k)


def _slab_integral(slabs: SlabFunction, k: float, const, linear) -> float:
    parts = []
    for y0, y1, c0, c1 in slabs.intervals():
        parts.append(c0 * (const(k, y1) - const(k, y0)) + c1 * (linear(k, y1) - linear(k, y0)))
    return math.fsum(parts)


@dataclass(frozen=True)
class TrialIntegrals:
    gradient: float  # integral of |grad u|^2
    mass: float      # integral of u^2
    mean: float      # integral of u

    @property
    def quotient(self) -> float:
        return self.gradient / self.mass


def integrals(trial: SeparableTrial, p: Polygon) -> TrialIntegrals:
    if area(p) <= 0:
        raise DomainError("degenerate polygon")
    slabs = slab_decompose(p)
    k = trial.wavenumber
    return TrialIntegrals(
        gradient=k * k * _slab_integral(slabs, k, _sin2, _y_sin2),
        mass=_slab_integral(slabs, k, _cos2, _y_cos2),
        mean=_slab_integral(slabs, k, _cos, _y_cos),
    )


def rayleigh_quotient(trial: SeparableTrial, p: Polygon) -> float:
    ints = integrals(trial, p)
    if not ints.mass > 0:
        raise DomainError("trial function vanishes on the polygon")
    return ints.quotient


def mean_value(trial: SeparableTrial, p: Polygon) -> float:
    return integrals(trial, p).mean / area(p)


def upper_bound_mu2(p: Polygon, trial: SeparableTrial) -> float:
    """Rayleigh quotient of a mean-zero trial function: an upper bound for mu_2(p)."""
    mean = mean_value(trial, p)
    if abs(mean) > ORTHOGONALITY_TOL:  # sup|u| = 1
        raise PreconditionError(
            f"trial function has mean {mean:.3e} on the polygon; its quotient does not bound mu_2")
    return rayleigh_quotient(trial, p)


def transported_integrals(d: Dissection, trial: SeparableTrial) -> TrialIntegrals:
    """Integrals of the rectangle eigenfunction over the translated pieces, summed piecewise."""
    per_piece = [integrals(trial, piece.placed()) for piece in d.pieces]
    return TrialIntegrals(
        gradient=math.fsum(t.gradient for t in per_piece),
        mass=math.fsum(t.mass for t in per_piece),
        mean=math.fsum(t.mean for t in per_piece),
    )


def pullback(d: Dissection, trial: SeparableTrial):
    """Piecewise trial function on the source: u(x + shift, y) on each piece."""
    pieces = d.pieces

    def u_hat(x: float, y: float) -> float:
        for piece in pieces:
            if piece.polygon.contains(x, y, tol=1e-12):
                return trial(x + piece.shift, y)
        raise DomainError(f"point ({x}, {y}) lies outside every piece")

    return u_hat
