"""Fourier analysis on finite abelian groups Z/n1 + ... + Z/nk.

Haar measure on the group is the counting measure; on the dual it is
``1/|A|`` times counting measure, so that the inverse transform needs no
extra constant and Plancherel reads ``sum |f|^2 = sum |f_hat|^2 / |A|``.
Signals are stored in lexicographic coordinate order (last coordinate
varies fastest).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, GroupMismatchError
from .numeric import as_vector


@dataclass(frozen=True)
class FiniteAbelianGroup:
    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if not orders:
            orders = (1,)
        if any(n < 1 for n in orders):
            raise DimensionError(f"group orders must be positive, got {orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def size(self) -> int:
        return int(np.prod(self.orders))

    def __len__(self) -> int:
        return self.size

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(n) for n in self.orders)))

    def index(self, a) -> int:
        return int(np.ravel_multi_index(self.reduce(a), self.orders))

    def element(self, index: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(index, self.orders))

    def reduce(self, a) -> tuple[int, ...]:
        a = tuple(int(c) for c in a)
        if len(a) != self.rank:
            raise DimensionError(f"element {a} has arity {len(a)}, group has rank {self.rank}")
        return tuple(c % n for c, n in zip(a, self.orders))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    @cached_property
    def _coords(self) -> np.ndarray:
        return np.array(self.elements(), dtype=np.int64).reshape(self.size, self.rank)

    @cached_property
    def difference_table(self) -> np.ndarray:
        """``table[a, b]`` is the index of ``a - b``."""
        c = self._coords
        diff = (c[:, None, :] - c[None, :, :]) % np.array(self.orders)
        return np.ravel_multi_index(tuple(np.moveaxis(diff, -1, 0)), self.orders)

    @cached_property
    def character_table(self) -> np.ndarray:
        """``table[k, a] = chi_k(a)`` with characters indexed like elements."""
        c = self._coords
        # phase numerators reduced mod n_j before dividing keeps arguments in [0, 1)
        phase = np.zeros((self.size, self.size))
        for j, n in enumerate(self.orders):
            phase += np.outer(c[:, j], c[:, j]) % n / n
        table = np.exp(2j * np.pi * phase)
        table.setflags(write=False)
        return table


def add(g: FiniteAbelianGroup, a, b) -> tuple[int, ...]:
    a, b = g.reduce(a), g.reduce(b)
    return tuple((x + y) % n for x, y, n in zip(a, b, g.orders))


def neg(g: FiniteAbelianGroup, a) -> tuple[int, ...]:
    return tuple(-x % n for x, n in zip(g.reduce(a), g.orders))


@dataclass(frozen=True)
class Character:
    group: FiniteAbelianGroup
    freq: tuple[int, ...]

    def __call__(self, a) -> complex:
        a = self.group.reduce(a)
        phase = sum((x * w) % n / n for x, w, n in zip(a, self.freq, self.group.orders))
        return complex(np.exp(2j * np.pi * phase))


def characters(g: FiniteAbelianGroup) -> list[Character]:
    """All characters of ``g``, lexicographic in frequency."""
    return [Character(g, freq) for freq in g.elements()]


@dataclass(frozen=True, eq=False)
class GroupSignal:
    group: FiniteAbelianGroup
    values: np.ndarray

    def __post_init__(self):
        values = as_vector(self.values, "values")
        if values.size != self.group.size:
            raise DimensionError(
                f"signal has {values.size} values, group {self.group.orders} has {self.group.size} elements"
            )
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, a):
        return self.values[self.group.index(a)]

    @classmethod
    def delta(cls, g: FiniteAbelianGroup, a=None) -> "GroupSignal":
        v = np.zeros(g.size)
        v[g.index(g.zero() if a is None else a)] = 1.0
        return cls(g, v)


def fourier(f: GroupSignal) -> GroupSignal:
    """``f_hat(chi) = sum_a f(a) conj(chi(a))``, indexed by frequency."""
    return GroupSignal(f.group, np.conj(f.group.character_table) @ f.values)


def inverse_fourier(fh: GroupSignal) -> GroupSignal:
    """``f(a) = (1/|A|) sum_chi f_hat(chi) chi(a)``."""
    g = fh.group
    return GroupSignal(g, g.character_table.T @ fh.values / g.size)


def convolve(f: GroupSignal, h: GroupSignal) -> GroupSignal:
    """``(f * h)(a) = sum_b h(a - b) f(b)``; exact on integer-valued inputs."""
    if f.group != h.group:
        raise GroupMismatchError(f"groups differ: {f.group.orders} vs {h.group.orders}")
    return GroupSignal(f.group, h.values[f.group.difference_table] @ f.values)


def l1_norm(f: GroupSignal) -> float:
    return float(np.sum(np.abs(f.values)))


def l2_norm_sq(f: GroupSignal) -> float:
    return float(np.sum(np.abs(f.values) ** 2))


def plancherel(f: GroupSignal) -> tuple[float, float, float]:
    """Return ``(sum |f|^2, sum |f_hat|^2 / |A|, relative gap)``."""
    lhs = l2_norm_sq(f)
    rhs = l2_norm_sq(fourier(f)) / f.group.size
    scale = max(lhs, rhs)
    gap = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return lhs, rhs, gap
