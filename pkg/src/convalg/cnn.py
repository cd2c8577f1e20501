"""Images as finitely supported functions on Z x Z, and stride-1 CNN convolution.

A :class:`LatticeFunction` stores the values on a ``width x height`` box
whose lower-left corner is ``offset``; ``values[y, x]`` is the value at
lattice point ``(offset[0] + x, offset[1] + y)``. Everything outside the
box is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NonFiniteError


@dataclass(frozen=True, eq=False)
class LatticeFunction:
    offset: tuple[int, int]
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values)
        if v.ndim != 2:
            raise DimensionError(f"values must be 2-D (height, width), got shape {v.shape}")
        if not np.issubdtype(v.dtype, np.integer):
            v = v.astype(float)
            if not np.all(np.isfinite(v)):
                raise NonFiniteError("lattice function has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "offset", (int(self.offset[0]), int(self.offset[1])))
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __call__(self, a: int, b: int):
        x, y = a - self.offset[0], b - self.offset[1]
        if 0 <= x < self.width and 0 <= y < self.height:
            return self.values[y, x]
        return 0

    def support(self) -> set[tuple[int, int]]:
        ys, xs = np.nonzero(self.values)
        return {(int(x) + self.offset[0], int(y) + self.offset[1]) for x, y in zip(xs, ys)}

    def to_dict(self) -> dict[tuple[int, int], float]:
        """Nonzero values keyed by lattice point."""
        return {p: self(*p) for p in self.support()}

    def trimmed(self) -> "LatticeFunction":
        """Same function on the bounding box of its support (unchanged if zero)."""
        ys, xs = np.nonzero(self.values)
        if xs.size == 0:
            return self
        x0, x1, y0, y1 = xs.min(), xs.max() + 1, ys.min(), ys.max() + 1
        return LatticeFunction((self.offset[0] + int(x0), self.offset[1] + int(y0)), self.values[y0:y1, x0:x1])

    @classmethod
    def from_image(cls, image) -> "LatticeFunction":
        return cls((0, 0), np.asarray(image))

    @classmethod
    def delta(cls, a: int = 0, b: int = 0, value=1) -> "LatticeFunction":
        return cls((a, b), np.array([[value]]))


def kernel3x3(values) -> LatticeFunction:
    """Kernel supported on {-1,0,1}^2 from 9 row-major values (row = y = -1..1)."""
    v = np.asarray(values)
    if v.size != 9:
        raise DimensionError(f"a 3x3 kernel needs 9 values, got {v.size}")
    return LatticeFunction((-1, -1), v.reshape(3, 3))


def translate(f: LatticeFunction, t) -> LatticeFunction:
    return LatticeFunction((f.offset[0] + int(t[0]), f.offset[1] + int(t[1])), f.values)


def group_convolve_2d(f: LatticeFunction, g: LatticeFunction) -> LatticeFunction:
    """``(f * g)(a) = sum_b g(a - b) f(b)`` on the Minkowski-sum box."""
    h = f.height + g.height - 1
    w = f.width + g.width - 1
    out = np.zeros((h, w), dtype=np.result_type(f.values, g.values))
    for (y, x), gv in np.ndenumerate(g.values):
        if gv:
            out[y : y + f.height, x : x + f.width] += gv * f.values
    return LatticeFunction((f.offset[0] + g.offset[0], f.offset[1] + g.offset[1]), out)


def sliding_window_correlate(image: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Stride-1 'full' cross-correlation with zero padding, the deep-learning convention.

    ``out[y, x] = sum_{i, j} kernel[i, j] * padded[y + i, x + j]``.
    """
    kh, kw = kernel.shape
    ih, iw = image.shape
    padded = np.zeros((ih + 2 * (kh - 1), iw + 2 * (kw - 1)), dtype=np.result_type(image, kernel))
    padded[kh - 1 : kh - 1 + ih, kw - 1 : kw - 1 + iw] = image
    out = np.zeros((ih + kh - 1, iw + kw - 1), dtype=padded.dtype)
    for y in range(out.shape[0]):
        for x in range(out.shape[1]):
            out[y, x] = np.sum(kernel * padded[y : y + kh, x : x + kw])
    return out


@dataclass(frozen=True)
class EquivalenceReport:
    discrepancy: float
    group_result: LatticeFunction
    window_result: np.ndarray

    @property
    def passed(self) -> bool:
        return self.discrepancy == 0


def cnn_equivalence_check(image: LatticeFunction, k: LatticeFunction) -> EquivalenceReport:
    """Compare group convolution with flipped-kernel sliding-window correlation."""
    if image.offset != (0, 0):
        raise DimensionError(f"image must sit at the origin, got offset {image.offset}")
    if k.offset != (-1, -1) or k.values.shape != (3, 3):
        raise DimensionError("kernel must be a 3x3 function supported on {-1,0,1}^2")
    conv = group_convolve_2d(image, k)
    window = sliding_window_correlate(image.values, k.values[::-1, ::-1])
    disc = float(np.max(np.abs(conv.values - window))) if window.size else 0.0
    return EquivalenceReport(disc, conv, window)
