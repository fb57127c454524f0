"""P1 finite elements for the Neumann Laplacian on parallelograms.

Meshes are affine images of a uniform triangulated unit square.  The
eigensolver is a blocked inverse subspace iteration on the shifted pencil
(K + M, M) with Rayleigh-Ritz projection; the shift removes the constant mode
from the stiffness kernel so the inner operator is positive definite.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, DomainError
from .geometry import ParallelogramSpec

log = logging.getLogger(__name__)

SEED = 0x5EED
MAX_OUTER = 500
RESIDUAL_CONTRACT = 1e-8
NODE_CAP = 1_000_000


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    nodes: np.ndarray       # (N, 2) float
    triangles: np.ndarray   # (T, 3) int, counterclockwise
    nx: int = 0
    ny: int = 0

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.triangles.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def element_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def to_dict(self) -> dict:
        return {"nodes": self.nodes.tolist(), "triangles": self.triangles.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def mesh_parallelogram(spec: ParallelogramSpec, nx: int, ny: int) -> TriangleMesh:
    """Uniform nx-by-ny mesh, ``nx`` cells along the base and ``ny`` along the slanted side.

    Each cell is cut along its shorter diagonal, which for an acute lean is the
    one joining the lower-right and upper-left corners.
    """
    if nx < 1 or ny < 1:
        raise DomainError(f"mesh subdivisions must be positive, got {nx} x {ny}")
    s = np.arange(nx + 1) / nx
    t = np.arange(ny + 1) / ny
    S, T = np.meshgrid(s, t)  # row j holds t_j
    x = spec.b * S + spec.offset * T
    y = spec.height * T
    nodes = np.column_stack([x.ravel(), y.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    n00 = (j * (nx + 1) + i).ravel()
    n10 = n00 + 1
    n01 = n00 + nx + 1
    n11 = n01 + 1
    tris = np.concatenate([np.column_stack([n00, n10, n01]),
                           np.column_stack([n10, n11, n01])])
    return TriangleMesh(nodes, tris.astype(np.int64), nx, ny)


@dataclass(frozen=True, eq=False)
class SparseSymmetricMatrix:
    """Symmetric sparse matrix stored as its lower triangle in CSR form."""

    lower: sp.csr_matrix

    @classmethod
    def from_full(cls, a: sp.spmatrix) -> "SparseSymmetricMatrix":
        return cls(sp.tril(a, format="csr"))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @cached_property
    def full(self) -> sp.csr_matrix:
        strict = sp.tril(self.lower, k=-1)
        return (self.lower + strict.T).tocsr()

    def __matmul__(self, x):
        return self.full @ x

    def toarray(self) -> np.ndarray:
        return self.full.toarray()


def element_matrices(p: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Element stiffness and consistent mass for triangles ``p`` of shape (T, 3, 2)."""
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    # grad phi_i = perp(edge opposite vertex i) / (2 area)
    opp = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    grads = np.stack([-opp[..., 1], opp[..., 0]], axis=-1) / (2 * area)[:, None, None]
    ke = area[:, None, None] * np.einsum("tik,tjk->tij", grads, grads)
    me = (area / 12)[:, None, None] * np.array([[2.0, 1, 1], [1, 2, 1], [1, 1, 2]])
    return area, ke, me


def assemble(mesh: TriangleMesh) -> tuple[SparseSymmetricMatrix, SparseSymmetricMatrix]:
    p = mesh.nodes[mesh.triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    signed = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    scale = np.abs(p).max() if p.size else 1.0
    bad = np.flatnonzero(signed <= 1e-14 * scale * scale)
    if bad.size:
        raise DomainError(f"degenerate or inverted element {int(bad[0])}")
    _, ke, me = element_matrices(p)
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_nodes
    K = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    # exact symmetry: the element matrices are symmetric but summation order is not
    K = 0.5 * (K + K.T)
    M = 0.5 * (M + M.T)
    return SparseSymmetricMatrix.from_full(K), SparseSymmetricMatrix.from_full(M)


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    mesh: dict = field(default_factory=dict)
    extrapolated_mu2: float | None = None
    observed_order: float | None = None
    iterations: int = 0
    ladder: list[dict] = field(default_factory=list)
    residual_floor: float = 0.0
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def mu2(self) -> float:
        """Best available estimate of the first nonzero eigenvalue."""
        if self.extrapolated_mu2 is not None:
            return self.extrapolated_mu2
        return float(self.eigenvalues[1])

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "residuals": [float(v) for v in self.residuals],
            "mesh": self.mesh,
            "extrapolated_mu2": self.extrapolated_mu2,
            "observed_order": self.observed_order,
            "iterations": self.iterations,
            "residual_floor": self.residual_floor,
            "ladder": self.ladder,
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _as_sparse(a) -> sp.csr_matrix:
    if isinstance(a, SparseSymmetricMatrix):
        return a.full
    return sp.csr_matrix(a)


def residual_floor(K, M) -> float:
    """Estimate of the smallest attainable ``|K v - mu M v| / |M v|`` in double precision.

    Storing ``v`` rounds it by eps relative; ``K`` maps that rough noise to
    about ``eps * |K|_inf`` while ``|M v|`` scales with the smallest mass entries.
    """
    k_inf = abs(K).sum(axis=1).max()
    m_min = M.diagonal().min()
    return float(8 * np.finfo(float).eps * k_inf / m_min)


def _relative_residuals(K, M, X, theta) -> np.ndarray:
    MX = M @ X
    R = K @ X - MX * theta
    return np.linalg.norm(R, axis=0) / np.linalg.norm(MX, axis=0)


def _rayleigh_ritz(K, M, Q):
    A = Q.T @ (K @ Q)
    B = Q.T @ (M @ Q)
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    theta, C = scipy.linalg.eigh(A, B)
    return theta, Q @ C


def smallest_eigs(K, M, k: int, tol: float = 1e-9, shift: float = 1.0,
                  block: int | None = None, max_iter: int = MAX_OUTER) -> SpectrumResult:
    """The ``k`` smallest eigenpairs of ``K v = mu M v``.

    Inverse subspace iteration with ``(K + shift*M)`` factorized once; Ritz
    vectors whose residual drops below ``tol`` are locked and no longer
    iterated.
    """
    K = _as_sparse(K)
    M = _as_sparse(M)
    n = K.shape[0]
    if M.shape != K.shape or K.shape[0] != K.shape[1]:
        raise ValueError("K and M must be square with matching shapes")
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the problem dimension {n}")
    p = min(n, block or k + max(k, 6))

    if p == n:
        # the search space is the whole space: Rayleigh-Ritz is exact
        theta, X = _rayleigh_ritz(K, M, np.eye(n))
        res = _relative_residuals(K, M, X[:, :k], theta[:k])
        return SpectrumResult(theta[:k], res, iterations=1, eigenvectors=X[:, :k],
                              residual_floor=residual_floor(K, M))

    floor = residual_floor(K, M)
    accept = max(RESIDUAL_CONTRACT, floor)
    lu = splu((K + shift * M).tocsc())
    rng = np.random.default_rng(SEED)
    X = rng.standard_normal((n, p))
    X, _ = np.linalg.qr(X)
    locked = 0
    res = np.full(k, np.inf)
    history: list[float] = []
    for it in range(1, max_iter + 1):
        active = lu.solve(M @ X[:, locked:])
        Q, _ = np.linalg.qr(np.hstack([X[:, :locked], active]))
        theta, X = _rayleigh_ritz(K, M, Q)
        res = _relative_residuals(K, M, X[:, :k], theta[:k])
        ok = res <= tol
        history.append(float(res.max()))
        # on badly scaled meshes round-off can stall the residual above tol
        stalled = len(history) > 3 and history[-1] > 0.9 * history[-4]
        if ok.all() or (stalled and history[-1] <= accept):
            return SpectrumResult(theta[:k].copy(), res, iterations=it,
                                  eigenvectors=X[:, :k].copy(), residual_floor=floor)
        locked = int(np.argmin(ok))  # length of the converged prefix
        # lock only a converged prefix, and never split a cluster of equal values
        while locked > 0 and abs(theta[locked] - theta[locked - 1]) <= 1e-8 * max(1.0, abs(theta[locked])):
            locked -= 1
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations; residuals {res.tolist()}",
        partial=SpectrumResult(theta[:k].copy(), res, iterations=max_iter))


def _richardson(levels: list[float]) -> tuple[float, float | None]:
    """Extrapolate the last of three consecutive doubling levels."""
    f0, f1, f2 = levels[-3:]
    d1, d2 = f0 - f1, f1 - f2
    order = None
    if d1 != 0 and d2 != 0 and d1 / d2 > 1:
        order = math.log2(d1 / d2)
    p = order if order is not None and 1.0 <= order <= 4.0 else 2.0
    return f2 - d2 / (2 ** p - 1), order


def base_subdivisions(spec: ParallelogramSpec, min_cells: int = 8) -> tuple[int, int]:
    """Coarsest ladder level: at least ``min_cells`` along the long side, cells of equal side lengths.

    Keeping the two cell sides equal matters beyond accuracy: the attainable
    eigen-residual is limited by round-off of order eps * |K| / |M|, which blows
    up for elements that are tiny in one direction only.
    """
    nx = max(1, math.ceil(min_cells * spec.b / spec.a))
    ny = max(1, round(nx * spec.a / spec.b))
    return nx, ny


def mu2_converged(spec: ParallelogramSpec, target_rel_err: float = 1e-3,
                  node_cap: int = NODE_CAP, k: int = 2) -> SpectrumResult:
    """mu_2 from a doubling mesh ladder with Richardson extrapolation.

    The problem is solved on the copy of ``spec`` scaled to ``a = 1`` and the
    eigenvalues are rescaled by ``1/a^2``, which keeps the unit shift of the
    inverse iteration well matched to the spectrum for every domain size.
    """
    if target_rel_err < 1e-5:
        raise DomainError(f"target relative error must be >= 1e-5, got {target_rel_err}")
    unit = spec.scaled(1 / spec.a)
    factor = 1 / spec.a ** 2
    nx0, ny0 = base_subdivisions(unit)
    ladder: list[dict] = []
    mus: list[float] = []
    extrapolates: list[float] = []
    result = None
    level = 0
    while True:
        nx, ny = nx0 << level, ny0 << level
        nodes = (nx + 1) * (ny + 1)
        if nodes > node_cap:
            raise ConvergenceError(
                f"mesh ladder exhausted at {nodes} nodes before reaching {target_rel_err}",
                partial=ladder)
        mesh = mesh_parallelogram(unit, nx, ny)
        K, M = assemble(mesh)
        result = smallest_eigs(K, M, k)
        mu = float(result.eigenvalues[1]) * factor
        mus.append(mu)
        row = {"nx": nx, "ny": ny, "nodes": nodes, "mu2": mu,
               "extrapolated": None, "order": None}
        if len(mus) >= 3:
            ext, order = _richardson(mus)
            extrapolates.append(ext)
            row["extrapolated"], row["order"] = ext, order
        ladder.append(row)
        log.debug("ladder level %s", row)
        if len(extrapolates) >= 2 and \
                abs(extrapolates[-1] - extrapolates[-2]) < target_rel_err * abs(extrapolates[-1]):
            break
        level += 1
    return SpectrumResult(
        eigenvalues=result.eigenvalues * factor,
        residuals=result.residuals,
        mesh={"nx": nx, "ny": ny, "nodes": nodes, "a": spec.a, "b": spec.b, "alpha": spec.alpha},
        extrapolated_mu2=extrapolates[-1],
        observed_order=ladder[-1]["order"],
        iterations=result.iterations,
        ladder=ladder,
        residual_floor=result.residual_floor,
    )
