"""Graph signal processing with a frozen shift-operator eigenbasis.

All convolution semantics are relative to the eigenvector matrix ``U``
captured when the :class:`GraphShiftSystem` is built; rescaling columns of
``U`` changes the Hadamard product in the frequency domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import numeric
from .errors import (
    ConvAlgError,
    DecompositionError,
    DimensionError,
    IllConditionedError,
    NotSymmetricError,
    RepeatedEigenvalueError,
)
from .numeric import as_matrix, as_vector, max_abs

RECONSTRUCTION_TOL = 1e-8
DISTINCT_TOL = 1e-8
FIT_TOL = 1e-6


class ShiftKind(str, Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    NORMALIZED_LAPLACIAN_SELFLOOP = "normalized_laplacian_selfloop"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int, float], ...] = ()
    directed: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("node count must be nonnegative")
        seen = set()
        edges = []
        for e in self.edges:
            src, dst, *rest = e
            src, dst = int(src), int(dst)
            w = float(rest[0]) if rest else 1.0
            if not (0 <= src < self.n and 0 <= dst < self.n):
                raise DimensionError(f"edge ({src}, {dst}) out of range for n={self.n}")
            if not np.isfinite(w):
                raise ConvAlgError(f"edge ({src}, {dst}) has non-finite weight")
            if not self.directed and src > dst:
                src, dst = dst, src
            if (src, dst) in seen:
                raise ConvAlgError(f"duplicate edge ({src}, {dst})")
            seen.add((src, dst))
            edges.append((src, dst, w))
        object.__setattr__(self, "edges", tuple(edges))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for src, dst, w in self.edges:
            a[src, dst] = w
            if not self.directed:
                a[dst, src] = w
        return a

    @classmethod
    def cycle(cls, n: int, directed: bool = True) -> "Graph":
        if n == 1:
            return cls(1, ((0, 0, 1.0),), directed)
        if n == 2 and not directed:
            return cls(2, ((0, 1, 1.0),), False)
        return cls(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)), directed)

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, tuple((i, i + 1, 1.0) for i in range(n - 1)), False)


@dataclass(frozen=True, eq=False)
class GraphShiftSystem:
    graph: Graph
    shift_kind: ShiftKind
    S: np.ndarray
    U: np.ndarray
    eigenvalues: np.ndarray
    _lu: numeric.LUFactors = field(repr=False)
    _lu_t: numeric.LUFactors = field(repr=False)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def real(self) -> bool:
        return not (np.iscomplexobj(self.U) or np.iscomplexobj(self.eigenvalues))

    def reconstruction_error(self) -> float:
        return max_abs(self.S @ self.U - self.U * self.eigenvalues)


@dataclass(frozen=True, eq=False)
class PolynomialFilter:
    """Coefficients of ``c0 + c1 t + ... + cd t^d``, lowest degree first."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = as_vector(self.coeffs, "coeffs")
        if c.size == 0:
            c = np.zeros(1)
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, t):
        out = np.zeros_like(np.asarray(t), dtype=np.result_type(self.coeffs, np.asarray(t), float))
        for c in self.coeffs[::-1]:
            out = out * t + c
        return out


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def shift_matrix(graph: Graph, shift_kind) -> np.ndarray:
    kind = ShiftKind(shift_kind)
    a = graph.adjacency()
    if kind is ShiftKind.ADJACENCY:
        return a
    if graph.directed:
        raise ConvAlgError(f"{kind.value} shift requires an undirected graph")
    if kind is ShiftKind.LAPLACIAN:
        return np.diag(a.sum(axis=1)) - a
    if kind is ShiftKind.NORMALIZED_LAPLACIAN_SELFLOOP:
        at = a + np.eye(graph.n)
        deg = at.sum(axis=1)
        if np.any(deg <= 0):
            raise ConvAlgError("normalized Laplacian needs positive degrees after adding self-loops")
        d = 1.0 / np.sqrt(deg)
        return np.eye(graph.n) - d[:, None] * at * d[None, :]
    raise ConvAlgError("custom shift requires an explicit matrix")


def build_shift(graph: Graph, shift_kind="adjacency", custom=None, decomposition=None) -> GraphShiftSystem:
    """Assemble the shift operator and freeze its eigendecomposition.

    ``decomposition`` is an optional ``(U, eigenvalues)`` pair; it is
    validated against ``S`` rather than trusted. Without it, ``S`` must be
    real symmetric (Jacobi) or circulant (DFT basis).
    """
    kind = ShiftKind(shift_kind)
    if kind is ShiftKind.CUSTOM:
        if custom is None:
            raise ConvAlgError("custom shift requires a matrix")
        s = as_matrix(custom, "custom")
        if s.shape != (graph.n, graph.n):
            raise DimensionError(f"custom shift is {s.shape}, graph has {graph.n} nodes")
    else:
        s = shift_matrix(graph, kind)
    s = s.copy()

    if decomposition is not None:
        u, lam = decomposition
        u = as_matrix(u, "U")
        lam = as_vector(lam, "eigenvalues")
        if u.shape != s.shape or lam.size != s.shape[0]:
            raise DimensionError("supplied decomposition does not match the shift size")
        u, lam = u.copy(), lam.copy()
    elif s.shape[0] == 0:
        u, lam = np.zeros((0, 0)), np.zeros(0)
    elif graph.directed and numeric.is_circulant(s):
        # directed cycles keep the DFT basis even when S happens to be symmetric (n <= 2)
        u, lam = numeric.eig_circulant(s[0])
    elif not np.iscomplexobj(s) and numeric.asymmetry(s) <= numeric.SYMMETRY_TOL * max(max_abs(s), 1.0):
        u, lam = numeric.eig_symmetric(s)
    elif numeric.is_circulant(s):
        u, lam = numeric.eig_circulant(s[0])
    else:
        raise NotSymmetricError(
            "shift is neither symmetric nor circulant; supply its eigendecomposition"
        )

    err = max_abs(s @ u - u * lam)
    if err > RECONSTRUCTION_TOL * (1.0 + max_abs(s)):
        raise DecompositionError(f"||S U - U diag(lam)||_max = {err:.3e} fails reconstruction")
    try:
        if u.size:
            lu, lu_t = numeric.lu_factor(u), numeric.lu_factor(u.T)
        else:
            lu = lu_t = numeric.LUFactors(u, np.zeros(0, dtype=int))
    except numeric.SingularMatrixError as exc:
        raise DecompositionError(f"eigenvector matrix is not invertible: {exc}") from exc
    _freeze(s, u, lam)
    return GraphShiftSystem(graph, kind, s, u, lam, lu, lu_t)


def _signal(sys: GraphShiftSystem, x, name="x") -> np.ndarray:
    x = as_vector(x, name)
    if x.size != sys.n:
        raise DimensionError(f"{name} has length {x.size}, system has {sys.n} nodes")
    return x


def gft(sys: GraphShiftSystem, x) -> np.ndarray:
    """``x_hat = U^{-1} x`` via the stored LU factors."""
    return numeric.lu_solve(sys._lu, _signal(sys, x))


def igft(sys: GraphShiftSystem, xh) -> np.ndarray:
    return sys.U @ _signal(sys, xh, "xh")


def spectral_convolve(sys: GraphShiftSystem, x, y) -> np.ndarray:
    """``U (U^{-1} x  ⊙  U^{-1} y)``."""
    return igft(sys, gft(sys, x) * gft(sys, y))


def filter_matrix(sys: GraphShiftSystem, x) -> np.ndarray:
    """Matrix of ``y -> x * y``, i.e. ``U diag(U^{-1} x) U^{-1}``."""
    xh = gft(sys, x)
    # U diag(xh) U^{-1} = (U^{-T} (U diag(xh))^T)^T
    left = sys.U * xh
    return numeric.lu_solve(sys._lu_t, left.T).T


def eigen_response(sys: GraphShiftSystem, m) -> np.ndarray:
    """``U^{-1} M U``."""
    m = as_matrix(m, "m")
    if m.shape != (sys.n, sys.n):
        raise DimensionError(f"matrix is {m.shape}, system has {sys.n} nodes")
    return numeric.lu_solve(sys._lu, m @ sys.U)


def min_relative_gap(lam) -> float:
    """Smallest pairwise eigenvalue distance over the spread; 0 for a flat spectrum."""
    lam = np.asarray(lam)
    if lam.size < 2:
        return np.inf
    d = np.abs(lam[:, None] - lam[None, :])
    spread = d.max()
    if spread == 0:
        return 0.0
    d[np.diag_indices(lam.size)] = np.inf
    return float(d.min() / spread)


def has_distinct_spectrum(sys: GraphShiftSystem) -> bool:
    return min_relative_gap(sys.eigenvalues) > DISTINCT_TOL


def poly_eval_matrix(s: np.ndarray, p: PolynomialFilter) -> np.ndarray:
    """Horner evaluation of ``P(S)``."""
    n = s.shape[0]
    out = np.zeros((n, n), dtype=np.result_type(s, p.coeffs))
    eye = np.eye(n)
    for c in p.coeffs[::-1]:
        out = s @ out + c * eye
    return out


def interpolate(lam, values) -> PolynomialFilter:
    """Coefficients of the degree ``< len(lam)`` polynomial with ``P(lam_i) = values_i``.

    The Vandermonde system is solved in the scaled variable ``lam / rho``
    with one step of iterative refinement, then unscaled.
    """
    lam = np.asarray(lam)
    values = np.asarray(values)
    n = lam.size
    if n == 0:
        return PolynomialFilter(np.zeros(1))
    rho = max(float(np.max(np.abs(lam))), 1e-300)
    v = np.vander(lam / rho, n, increasing=True)
    lu = numeric.lu_factor(v)
    c = numeric.lu_solve(lu, values)
    c = c + numeric.lu_solve(lu, values - v @ c)
    c = c / rho ** np.arange(n)
    if np.iscomplexobj(c) and max_abs(c.imag) <= 1e-12 * max(max_abs(c), 1.0):
        c = c.real
    return PolynomialFilter(c)


def _check_distinct(sys: GraphShiftSystem):
    if not has_distinct_spectrum(sys):
        raise RepeatedEigenvalueError(
            f"eigenvalues are not pairwise distinct (relative gap {min_relative_gap(sys.eigenvalues):.3e})"
        )


def _fit_response(sys: GraphShiftSystem, response, target: np.ndarray) -> PolynomialFilter:
    _check_distinct(sys)
    poly = interpolate(sys.eigenvalues, response)
    residual = max_abs(poly_eval_matrix(sys.S, poly) - target)
    if residual > FIT_TOL:
        raise IllConditionedError(
            f"polynomial fit reproduces the filter only to {residual:.3e} (> {FIT_TOL:g})", residual
        )
    return poly


def fit_polynomial(sys: GraphShiftSystem, x) -> PolynomialFilter:
    """The unique ``P`` of degree ``<= n-1`` with ``P(S) = filter_matrix(x)``."""
    return _fit_response(sys, gft(sys, x), filter_matrix(sys, x))


@dataclass(frozen=True)
class ShiftInvarianceResult:
    invariant: bool
    commutator_norm: float
    certificate: PolynomialFilter | None = None

    def __bool__(self) -> bool:
        return self.invariant


def is_shift_invariant(sys: GraphShiftSystem, m, tol: float = 1e-9) -> ShiftInvarianceResult:
    m = as_matrix(m, "m")
    if m.shape != (sys.n, sys.n):
        raise DimensionError(f"matrix is {m.shape}, system has {sys.n} nodes")
    comm = max_abs(m @ sys.S - sys.S @ m)
    if comm > tol:
        return ShiftInvarianceResult(False, comm)
    cert = None
    if has_distinct_spectrum(sys):
        response = np.diag(eigen_response(sys, m))
        cert = _simplify(sys, _fit_response(sys, response, m), m, tol)
    return ShiftInvarianceResult(True, comm, cert)


def _simplify(sys: GraphShiftSystem, p: PolynomialFilter, m: np.ndarray, tol: float) -> PolynomialFilter:
    """Zero terms whose contribution is at rounding level and drop trailing zeros.

    The simplified polynomial is kept only if it still reproduces ``m``.
    """
    floor = 1e-12 * max(max_abs(m), 1.0)
    c = p.coeffs.copy()
    power = np.eye(sys.n)
    for k in range(c.size):
        if abs(c[k]) * max_abs(power) <= floor:
            c[k] = 0.0
        power = power @ sys.S
    nz = np.flatnonzero(c)
    c = c[: nz[-1] + 1] if nz.size else c[:1]
    q = PolynomialFilter(c)
    if max_abs(poly_eval_matrix(sys.S, q) - m) <= max(tol, floor):
        return q
    return p


def gcn_layer(sys: GraphShiftSystem, X, P: PolynomialFilter, W) -> np.ndarray:
    """``P(S) X W`` with ``P(S) X`` accumulated by Horner's rule on ``X``."""
    X = as_matrix(X, "X")
    W = as_matrix(W, "W")
    if X.shape[0] != sys.n:
        raise DimensionError(f"X has {X.shape[0]} rows, system has {sys.n} nodes")
    if X.shape[1] != W.shape[0]:
        raise DimensionError(f"X is {X.shape}, W is {W.shape}")
    y = np.zeros(X.shape, dtype=np.result_type(X, sys.S, P.coeffs))
    for c in P.coeffs[::-1]:
        y = sys.S @ y + c * X
    return y @ W


def k_hop_sizes(graph: Graph, hops: int) -> list[int]:
    """Size of each node's closed ``hops``-neighborhood (edges taken as undirected)."""
    reach = (graph.adjacency() != 0) | np.eye(graph.n, dtype=bool)
    reach = reach | reach.T
    cur = np.eye(graph.n, dtype=bool)
    for _ in range(hops):
        cur = (cur.astype(int) @ reach.astype(int)) > 0
    return [int(r.sum()) for r in cur]


def dof_report(sys: GraphShiftSystem, degree: int) -> dict:
    """Parameter counts of a polynomial graph filter vs free local kernels.

    A degree-``d`` polynomial in ``S`` has ``d + 1`` parameters however
    irregular the graph. A free kernel on the ``d``-hop neighborhood of a
    node has one parameter per neighborhood node; on the 2D grid with
    diagonal neighbors and ``d = 1`` that is the 3x3 stencil, 9 parameters.
    """
    if degree < 0:
        raise ConvAlgError("degree must be nonnegative")
    sizes = k_hop_sizes(sys.graph, degree) if sys.graph.n else [0]
    return {
        "degree": degree,
        "polynomial": degree + 1,
        "stencil3x3": 9,
        "local_kernel_max": max(sizes),
        "local_kernel_min": min(sizes),
    }
