"""Neumann eigenvalues of parallelograms versus rectangles via translation dissections."""

from .closed_form import (
    M2_SQUARE,
    RectMode,
    ShapeMeasures,
    m2,
    mu2_rect,
    mu2_rect_upper_bound_for_parallelogram,
    rect_neumann_eigs,
    szego_bound_product,
    theorem2_bound,
)
from .errors import ConvergenceError, DomainError, HypothesisError, PreconditionError
from .fem import SpectrumResult, TriangleMesh, assemble, mesh_parallelogram, mu2_converged, smallest_eigs
from .geometry import (
    ParallelogramSpec,
    Point2,
    Polygon,
    RectangleSpec,
    SlabFunction,
    area,
    clip_above,
    clip_below,
    comparison_rectangle,
    diameter,
    make_parallelogram,
    perimeter,
    slab_decompose,
)
from .scissors import Dissection, Piece, VerificationReport, dissect, strip_count, verify_dissection
from .trial import SeparableTrial, mean_value, rayleigh_quotient, upper_bound_mu2

__version__ = "0.1.0"
