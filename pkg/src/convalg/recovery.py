"""Recover the Fourier kernel of a convolution algebra from its product alone.

For an algebra ``x * y = U (U^{-1} x ⊙ U^{-1} y)`` the multiplication
operator ``y -> r * y`` equals ``U diag(U^{-1} r) U^{-1}``. A random probe
``r`` has a simple spectrum generically, so the operator's eigenvectors
are the columns of ``U`` up to order and scale. Only operators that come
out real symmetric or circulant are supported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import numeric
from .abelian import FiniteAbelianGroup, GroupSignal, convolve
from .errors import DegenerateProbeError, DimensionError, OracleError
from .graph import DISTINCT_TOL, GraphShiftSystem, min_relative_gap, spectral_convolve
from .numeric import as_matrix, max_abs

MAX_REDRAWS = 16
SPOT_CHECK_TOL = 1e-8
STRUCTURE_TOL = 1e-9


@dataclass(frozen=True)
class ConvolutionAlgebraOracle:
    n: int
    product: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "oracle"

    def __call__(self, x, y) -> np.ndarray:
        out = np.asarray(self.product(np.asarray(x), np.asarray(y)))
        if out.shape != (self.n,):
            raise OracleError(f"{self.name} returned shape {out.shape}, expected ({self.n},)")
        return out


def hadamard_oracle(n: int) -> ConvolutionAlgebraOracle:
    return ConvolutionAlgebraOracle(n, lambda x, y: x * y, "hadamard")


def spectral_oracle(u) -> ConvolutionAlgebraOracle:
    """Algebra ``U (U^{-1} x ⊙ U^{-1} y)`` for an invertible ``U``."""
    u = as_matrix(u, "U").copy()
    lu = numeric.lu_factor(u)

    def product(x, y):
        return u @ (numeric.lu_solve(lu, x) * numeric.lu_solve(lu, y))

    return ConvolutionAlgebraOracle(u.shape[0], product, "spectral")


def graph_oracle(sys: GraphShiftSystem) -> ConvolutionAlgebraOracle:
    return ConvolutionAlgebraOracle(sys.n, lambda x, y: spectral_convolve(sys, x, y), "graph")


def group_oracle(g: FiniteAbelianGroup) -> ConvolutionAlgebraOracle:
    def product(x, y):
        return convolve(GroupSignal(g, x), GroupSignal(g, y)).values

    return ConvolutionAlgebraOracle(g.size, product, "group")


def corrupted_oracle(oracle: ConvolutionAlgebraOracle, noise: float, seed: int = 0) -> ConvolutionAlgebraOracle:
    """Add ``noise * B(x, y)`` for a fixed random symmetric bilinear ``B``.

    ``B`` is symmetric in all three indices, so the result stays bilinear,
    commutative and has symmetric multiplication operators, but stops being
    associative.
    """
    rng = np.random.default_rng(seed)
    b = rng.uniform(-1.0, 1.0, size=(oracle.n, oracle.n, oracle.n))
    b = sum(b.transpose(p) for p in itertools.permutations(range(3))) / 6.0

    def product(x, y):
        return oracle(x, y) + noise * np.einsum("kij,i,j->k", b, x, y)

    return ConvolutionAlgebraOracle(oracle.n, product, f"{oracle.name}+noise")


def spot_check(oracle: ConvolutionAlgebraOracle, seed: int = 0, trials: int = 5) -> dict[str, float]:
    """Relative deviations from bilinearity, commutativity and associativity."""
    rng = np.random.default_rng(seed)
    n = oracle.n
    worst = {"bilinearity": 0.0, "commutativity": 0.0, "associativity": 0.0}

    def rel(a, b):
        return max_abs(a - b) / (1.0 + max(max_abs(a), max_abs(b)))

    for _ in range(trials):
        x, y, z = rng.uniform(-1.0, 1.0, size=(3, n))
        alpha, beta = rng.uniform(-2.0, 2.0, size=2)
        xy, yz, zx = oracle(x, y), oracle(y, z), oracle(z, x)
        worst["bilinearity"] = max(
            worst["bilinearity"],
            rel(oracle(alpha * x + beta * y, z), alpha * oracle(x, z) + beta * yz),
            rel(oracle(z, alpha * x + beta * y), alpha * oracle(z, x) + beta * oracle(z, y)),
        )
        worst["commutativity"] = max(worst["commutativity"], rel(xy, oracle(y, x)), rel(zx, oracle(x, z)))
        worst["associativity"] = max(worst["associativity"], rel(oracle(xy, z), oracle(x, yz)))
    return worst


def validate_oracle(oracle: ConvolutionAlgebraOracle, seed: int = 0, tol: float = SPOT_CHECK_TOL):
    worst = spot_check(oracle, seed)
    bad = {k: v for k, v in worst.items() if v > tol}
    if bad:
        detail = ", ".join(f"{k} {v:.3e}" for k, v in bad.items())
        raise OracleError(f"oracle fails spot checks ({detail}; tolerance {tol:g})")
    return worst


def multiplication_operator(oracle: ConvolutionAlgebraOracle, r) -> np.ndarray:
    """Matrix whose column ``j`` is ``r * e_j``."""
    r = np.asarray(r)
    if r.shape != (oracle.n,):
        raise DimensionError(f"probe has shape {r.shape}, oracle dimension is {oracle.n}")
    eye = np.eye(oracle.n)
    return np.column_stack([oracle(r, eye[:, j]) for j in range(oracle.n)])


@dataclass(frozen=True, eq=False)
class RecoveredKernel:
    """Unit-norm kernel columns and the scale making each functional multiplicative.

    Character ``i`` is ``nu_i(x) = scales[i] * <columns[:, i], x>`` (the
    inner product conjugates the column).
    """

    columns: np.ndarray
    scales: np.ndarray
    probe_eigenvalues: np.ndarray
    redraws: int

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    def character(self, i: int, x) -> complex:
        return self.scales[i] * np.vdot(self.columns[:, i], x)

    def characters(self, x) -> np.ndarray:
        """All character values of ``x`` at once."""
        return self.scales * (self.columns.conj().T @ np.asarray(x))

    def idempotents(self) -> np.ndarray:
        """Columns rescaled by ``1 / nu_i(u_i)``."""
        return self.columns / (self.scales * np.sum(np.abs(self.columns) ** 2, axis=0))


def _decompose(m: np.ndarray):
    scale = max(max_abs(m), 1.0)
    if max_abs(m.imag if np.iscomplexobj(m) else 0.0) <= STRUCTURE_TOL * scale:
        m = m.real
        if numeric.asymmetry(m) <= STRUCTURE_TOL * scale:
            return numeric.eig_symmetric((m + m.T) / 2.0)
    if numeric.is_circulant(m, STRUCTURE_TOL):
        return numeric.eig_circulant(m[0])
    raise OracleError("multiplication operator is neither symmetric nor circulant; unsupported oracle")


def recover_kernel(oracle: ConvolutionAlgebraOracle, seed: int = 0, validate: bool = True) -> RecoveredKernel:
    rng = np.random.default_rng(seed)
    if validate:
        validate_oracle(oracle, seed)
    for attempt in range(MAX_REDRAWS + 1):
        r = rng.uniform(-1.0, 1.0, size=oracle.n)
        u, lam = _decompose(multiplication_operator(oracle, r))
        if min_relative_gap(lam) > DISTINCT_TOL:
            break
    else:
        raise DegenerateProbeError(
            f"probe spectrum stayed degenerate after {MAX_REDRAWS} redraws; "
            "the algebra is not multiplicity-free"
        )
    squares = np.column_stack([oracle(u[:, i], u[:, i]) for i in range(oracle.n)])
    scales = np.einsum("ij,ij->j", u.conj(), squares)
    if np.iscomplexobj(scales) and max_abs(scales.imag) <= 1e-12 * max(max_abs(scales), 1.0):
        scales = scales.real
    for arr in (u, scales, lam):
        arr.setflags(write=False)
    return RecoveredKernel(u, scales, lam, attempt)


@dataclass(frozen=True)
class IdempotentReport:
    max_deviation: float
    worst_pair: tuple[int, int]
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def verify_idempotents(oracle: ConvolutionAlgebraOracle, kernel: RecoveredKernel, tol: float = 1e-6) -> IdempotentReport:
    """Check ``e_i * e_j = [i == j] e_i`` for the rescaled kernel columns."""
    e = kernel.idempotents()
    worst, pair = 0.0, (0, 0)
    for i in range(kernel.n):
        for j in range(i, kernel.n):
            target = e[:, i] if i == j else 0.0
            dev = float(np.linalg.norm(oracle(e[:, i], e[:, j]) - target))
            if dev > worst:
                worst, pair = dev, (i, j)
    return IdempotentReport(worst, pair, tol)


def rebuild_oracle(kernel: RecoveredKernel) -> ConvolutionAlgebraOracle:
    """Algebra ``x * y = sum_i nu_i(x) nu_i(y) e_i`` from the recovered characters."""
    e = kernel.idempotents()
    real = not np.iscomplexobj(e) and not np.iscomplexobj(kernel.scales)

    def product(x, y):
        out = e @ (kernel.characters(x) * kernel.characters(y))
        if not real and np.isrealobj(x) and np.isrealobj(y) and max_abs(out.imag) <= 1e-9 * max(max_abs(out), 1.0):
            out = out.real
        return out

    return ConvolutionAlgebraOracle(kernel.n, product, "rebuilt")


def match_columns(recovered, generator) -> tuple[float, np.ndarray]:
    """Distance between column sets modulo permutation and unit scalars.

    Generator columns are normalized first. Returns the maximum matched
    column distance and, for each generator column, the index of the
    recovered column it was paired with.
    """
    r = as_matrix(recovered, "recovered")
    g = as_matrix(generator, "generator")
    if r.shape != g.shape:
        raise DimensionError(f"kernel shapes differ: {r.shape} vs {g.shape}")
    g = g / np.linalg.norm(g, axis=0)
    overlap = r.conj().T @ g
    mag = np.abs(overlap)
    assigned = np.full(g.shape[1], -1)
    used = set()
    for j in np.argsort(-mag.max(axis=0), kind="stable"):
        for i in np.argsort(-mag[:, j], kind="stable"):
            if i not in used:
                assigned[j] = i
                used.add(int(i))
                break
    worst = 0.0
    for j, i in enumerate(assigned):
        ov = overlap[i, j]
        phase = ov / abs(ov) if abs(ov) > 0 else 1.0
        worst = max(worst, float(np.linalg.norm(r[:, i] * phase - g[:, j])))
    return worst, assigned
