"""Several shift systems on one node set, indexed by a finite weighted parameter set.

A multi-signal is an ``n x m`` array whose column ``t`` lives on system
``t``. Convolution acts column by column; vectorization for the recovery
bridge is column-major (``M.reshape(-1, order="F")``), so parameter ``t``
owns the block ``t*n : (t+1)*n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvAlgError, DimensionError
from .graph import GraphShiftSystem, gft, spectral_convolve
from .numeric import as_matrix, as_vector, max_abs
from .recovery import ConvolutionAlgebraOracle

ORTHOGONALITY_TOL = 1e-8
WEIGHT_TOL = 1e-12
GRAM_FLAG_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class MultiShiftSystem:
    n: int
    systems: tuple[GraphShiftSystem, ...]
    weights: np.ndarray

    def __post_init__(self):
        systems = tuple(self.systems)
        if not systems:
            raise ConvAlgError("need at least one shift system")
        w = as_vector(self.weights, "weights").astype(float)
        if w.size != len(systems):
            raise DimensionError(f"{w.size} weights for {len(systems)} systems")
        if np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ConvAlgError(f"weights must be nonnegative and sum to 1, got {w.tolist()}")
        for t, s in enumerate(systems):
            if s.n != self.n:
                raise DimensionError(f"system {t} has {s.n} nodes, expected {self.n}")
            if not s.real or max_abs(s.S - s.S.T) > 1e-12 * max(max_abs(s.S), 1.0):
                raise ConvAlgError(f"system {t} is not a real symmetric shift")
            dev = max_abs(s.U.T @ s.U - np.eye(self.n))
            if dev > ORTHOGONALITY_TOL:
                raise ConvAlgError(f"system {t} eigenvectors are not orthogonal (deviation {dev:.3e})")
        w.setflags(write=False)
        object.__setattr__(self, "systems", systems)
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return len(self.systems)

    def kernel_vectors(self) -> np.ndarray:
        """The ``n*m`` block vectors: column ``j`` of ``U_t`` placed in block ``t``."""
        out = np.zeros((self.n * self.m, self.n * self.m))
        for t, s in enumerate(self.systems):
            out[t * self.n : (t + 1) * self.n, t * self.n : (t + 1) * self.n] = s.U
        return out


def _multi(sys: MultiShiftSystem, M, name="M") -> np.ndarray:
    M = as_matrix(M, name)
    if M.shape != (sys.n, sys.m):
        raise DimensionError(f"{name} is {M.shape}, system expects ({sys.n}, {sys.m})")
    return M


def multi_convolve(sys: MultiShiftSystem, M, N) -> np.ndarray:
    M, N = _multi(sys, M), _multi(sys, N, "N")
    return np.column_stack([spectral_convolve(s, M[:, t], N[:, t]) for t, s in enumerate(sys.systems)])


def multi_character(sys: MultiShiftSystem, t: int, j: int, M) -> float:
    """``<U_t[:, j], M[:, t]>``."""
    if not (0 <= t < sys.m and 0 <= j < sys.n):
        raise DimensionError(f"character index ({t}, {j}) out of range for m={sys.m}, n={sys.n}")
    M = _multi(sys, M)
    return float(sys.systems[t].U[:, j] @ M[:, t])


def all_characters(sys: MultiShiftSystem, M) -> np.ndarray:
    """``out[j, t] = nu_{t,j}(M)``."""
    M = _multi(sys, M)
    return np.column_stack([s.U.T @ M[:, t] for t, s in enumerate(sys.systems)])


def phi1(sys: MultiShiftSystem, x) -> np.ndarray:
    x = as_vector(x, "x")
    if x.size != sys.n:
        raise DimensionError(f"x has length {x.size}, system has {sys.n} nodes")
    return np.repeat(x[:, None], sys.m, axis=1)


def phi2(sys: MultiShiftSystem, M) -> np.ndarray:
    """Weighted average of the columns.

    Written as ``M_0 + sum_t w_t (M_t - M_0)`` so that equal columns come
    back bit-for-bit.
    """
    M = _multi(sys, M)
    base = M[:, 0]
    return base + (M - base[:, None]) @ sys.weights


@dataclass(frozen=True, eq=False)
class CompositeResult:
    values: np.ndarray
    matrix: np.ndarray
    gram_deviation: float

    @property
    def orthogonal(self) -> bool:
        return self.gram_deviation <= GRAM_FLAG_TOL


def composite_matrix(sys: MultiShiftSystem) -> np.ndarray:
    eye = np.eye(sys.n)
    return np.column_stack([composite_values(sys, eye[:, i]) for i in range(sys.n)])


def composite_values(sys: MultiShiftSystem, x) -> np.ndarray:
    spectra = np.column_stack([gft(s, col) for s, col in zip(sys.systems, phi1(sys, x).T)])
    return phi2(sys, spectra)


def composite_transform(sys: MultiShiftSystem, x) -> CompositeResult:
    """``phi2`` of the columnwise GFT of ``phi1(x)``, with an orthogonality check."""
    values = composite_values(sys, x)
    mat = composite_matrix(sys)
    dev = max_abs(mat.T @ mat - np.eye(sys.n))
    return CompositeResult(values, mat, dev)


def vectorize(M) -> np.ndarray:
    return np.asarray(M).reshape(-1, order="F")


def unvectorize(sys: MultiShiftSystem, v) -> np.ndarray:
    return np.asarray(v).reshape((sys.n, sys.m), order="F")


def multi_oracle(sys: MultiShiftSystem) -> ConvolutionAlgebraOracle:
    """The multi-shift product on column-major vectorized signals."""

    def product(x, y):
        return vectorize(multi_convolve(sys, unvectorize(sys, x), unvectorize(sys, y)))

    return ConvolutionAlgebraOracle(sys.n * sys.m, product, "multishift")
