"""Signal processing on finite meet-semilattices.

Shifts ``T_a s = (s[b ∧ a])_b`` commute and multiply like the meet. The
zeta matrix (columns are down-set indicators) diagonalizes all of them at
once, exactly and in integer arithmetic:

    moebius @ T_a @ zeta == diag([c <= a for c])
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, LatticeError


@dataclass(frozen=True, eq=False)
class MeetSemilattice:
    """Elements keep their input indices; ``order`` is a linear extension of ``<=``."""

    leq: np.ndarray
    meet: np.ndarray
    order: tuple[int, ...]
    labels: tuple = field(default=())

    @property
    def n(self) -> int:
        return self.leq.shape[0]

    def __len__(self) -> int:
        return self.n

    @cached_property
    def top(self) -> int | None:
        tops = [a for a in range(self.n) if self.leq[:, a].all()]
        return tops[0] if tops else None

    @cached_property
    def bottom(self) -> int:
        return next(a for a in range(self.n) if self.leq[a, :].all())

    def check_index(self, a: int) -> int:
        if not 0 <= a < self.n:
            raise DimensionError(f"element {a} out of range for lattice of size {self.n}")
        return int(a)


def _relation(n: int, leq) -> np.ndarray:
    arr = np.asarray(leq)
    if arr.ndim == 2 and arr.shape == (n, n) and arr.dtype == bool:
        rel = arr.copy()
    else:
        rel = np.zeros((n, n), dtype=bool)
        for pair in leq:
            i, j = (int(v) for v in pair)
            if not (0 <= i < n and 0 <= j < n):
                raise LatticeError(f"pair ({i}, {j}) out of range for n={n}", (i, j))
            rel[i, j] = True
    rel[np.diag_indices(n)] = True
    return rel


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    rel = rel.copy()
    for k in range(rel.shape[0]):
        rel |= rel[:, [k]] & rel[[k], :]
    return rel


def linear_extension(leq: np.ndarray) -> tuple[int, ...]:
    """Kahn's algorithm, smallest input index first among the minimal elements."""
    n = leq.shape[0]
    below = [int(np.sum(leq[:, a])) - 1 for a in range(n)]
    heap = [a for a in range(n) if below[a] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        a = heapq.heappop(heap)
        out.append(a)
        for b in range(n):
            if b != a and leq[a, b]:
                below[b] -= 1
                if below[b] == 0:
                    heapq.heappush(heap, b)
    return tuple(out)


def build_lattice(n: int, leq, close: bool = False, labels=()) -> MeetSemilattice:
    """Validate a partial order and compute its meet table.

    ``leq`` is either an ``n x n`` boolean matrix or an iterable of pairs
    ``(i, j)`` meaning ``i <= j``. Reflexive pairs are always added. With
    ``close=True`` the transitive closure is taken before validation.
    """
    rel = _relation(n, leq)
    if close:
        rel = transitive_closure(rel)
    for i in range(n):
        for j in range(i + 1, n):
            if rel[i, j] and rel[j, i]:
                raise LatticeError(f"antisymmetry fails: {i} <= {j} and {j} <= {i}", (i, j))
    for i in range(n):
        for j in np.flatnonzero(rel[i]):
            bad = np.flatnonzero(rel[j] & ~rel[i])
            if bad.size:
                k = int(bad[0])
                raise LatticeError(
                    f"transitivity fails: {i} <= {j} and {j} <= {k} but not {i} <= {k}", (i, int(j), k)
                )
    meet = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a, n):
            lower = np.flatnonzero(rel[:, a] & rel[:, b])
            if lower.size == 0:
                raise LatticeError(f"elements {a} and {b} have no common lower bound", (a, b))
            greatest = [c for c in lower if rel[lower, c].all()]
            if len(greatest) != 1:
                raise LatticeError(f"elements {a} and {b} have no greatest lower bound", (a, b))
            meet[a, b] = meet[b, a] = greatest[0]
    order = linear_extension(rel)
    rel.setflags(write=False)
    meet.setflags(write=False)
    return MeetSemilattice(rel, meet, order, tuple(labels))


def chain(n: int) -> MeetSemilattice:
    return build_lattice(n, np.triu(np.ones((n, n), dtype=bool)))


def subset_lattice(k: int) -> MeetSemilattice:
    """Subsets of a ``k``-set as bitmasks ordered by inclusion; meet is intersection."""
    n = 1 << k
    rel = np.array([[(a & b) == a for b in range(n)] for a in range(n)])
    return build_lattice(n, rel, labels=range(n))


def divisor_lattice(m: int) -> MeetSemilattice:
    """Divisors of ``m`` ordered by divisibility; meet is gcd."""
    divs = [d for d in range(1, m + 1) if m % d == 0]
    rel = np.array([[b % a == 0 for b in divs] for a in divs])
    return build_lattice(len(divs), rel, labels=divs)


def shift_operator(lat: MeetSemilattice, a: int) -> np.ndarray:
    """0/1 integer matrix with row ``b`` selecting column ``b ∧ a``."""
    a = lat.check_index(a)
    t = np.zeros((lat.n, lat.n), dtype=np.int64)
    t[np.arange(lat.n), lat.meet[:, a]] = 1
    return t


@dataclass(frozen=True)
class CommutationReport:
    pairs_checked: int
    violations: tuple[tuple[int, int], ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def check_commutation(lat: MeetSemilattice) -> CommutationReport:
    """Verify ``T_a T_b == T_{a ∧ b} == T_b T_a`` exactly for all pairs."""
    shifts = [shift_operator(lat, a) for a in range(lat.n)]
    bad = []
    for a in range(lat.n):
        for b in range(lat.n):
            target = shifts[lat.meet[a, b]]
            if not np.array_equal(shifts[a] @ shifts[b], target):
                bad.append((a, b))
    return CommutationReport(lat.n * lat.n, tuple(bad))


@dataclass(frozen=True, eq=False)
class ZetaPair:
    """``zeta[b, c] = [c <= b]`` and its exact integer inverse."""

    zeta: np.ndarray
    moebius: np.ndarray
    responses: np.ndarray
    order: tuple[int, ...]

    def response(self, a: int) -> np.ndarray:
        return self.responses[a]


def zeta_matrix(lat: MeetSemilattice) -> np.ndarray:
    return lat.leq.T.astype(np.int64)


def moebius_matrix(lat: MeetSemilattice) -> np.ndarray:
    """Exact inverse of the zeta matrix by substitution along the linear extension."""
    z = zeta_matrix(lat)
    p = np.array(lat.order)
    low = z[np.ix_(p, p)]  # lower unitriangular
    n = lat.n
    inv = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        inv[j, j] = 1
        for i in range(j + 1, n):
            inv[i, j] = -int(low[i, j:i] @ inv[j:i, j])
    out = np.zeros_like(inv)
    out[np.ix_(p, p)] = inv
    return out


def diagonalize_shifts(lat: MeetSemilattice) -> ZetaPair:
    z = zeta_matrix(lat)
    mu = moebius_matrix(lat)
    responses = lat.leq.T.astype(np.int64)  # responses[a, c] = [c <= a]
    for arr in (z, mu, responses):
        arr.setflags(write=False)
    return ZetaPair(z, mu, responses, lat.order)


@dataclass(frozen=True)
class DiagonalizationReport:
    identities_checked: int
    failures: tuple[int, ...]
    inverse_exact: bool

    @property
    def passed(self) -> bool:
        return self.inverse_exact and not self.failures


def check_diagonalization(lat: MeetSemilattice, pair: ZetaPair | None = None) -> DiagonalizationReport:
    pair = pair or diagonalize_shifts(lat)
    eye = np.eye(lat.n, dtype=np.int64)
    inverse_exact = np.array_equal(pair.zeta @ pair.moebius, eye) and np.array_equal(pair.moebius @ pair.zeta, eye)
    failures = []
    for a in range(lat.n):
        t = shift_operator(lat, a)
        lhs_ok = np.array_equal(t @ pair.zeta, pair.zeta * pair.responses[a][None, :])
        conj_ok = np.array_equal(pair.moebius @ t @ pair.zeta, np.diag(pair.responses[a]))
        if not (lhs_ok and conj_ok):
            failures.append(a)
    return DiagonalizationReport(lat.n, tuple(failures), bool(inverse_exact))


def _lattice_signal(lat: MeetSemilattice, s, name: str) -> np.ndarray:
    s = np.asarray(s)
    if s.shape != (lat.n,):
        raise DimensionError(f"{name} has shape {s.shape}, lattice has {lat.n} elements")
    return s


def algebra_element(lat: MeetSemilattice, h) -> np.ndarray:
    """Matrix ``sum_a h[a] T_a``; integer when ``h`` is."""
    h = _lattice_signal(lat, h, "h")
    out = np.zeros((lat.n, lat.n), dtype=np.result_type(h, np.int64))
    rows = np.arange(lat.n)
    for a in range(lat.n):
        np.add.at(out, (rows, lat.meet[:, a]), h[a])
    return out


def lattice_convolve(lat: MeetSemilattice, h, s) -> np.ndarray:
    """``(sum_a h[a] T_a) s``."""
    s = _lattice_signal(lat, s, "s")
    return algebra_element(lat, h) @ s


def lattice_fourier(lat: MeetSemilattice, s) -> np.ndarray:
    """Forward transform: Möbius application."""
    return moebius_matrix(lat) @ _lattice_signal(lat, s, "s")


def inverse_lattice_fourier(lat: MeetSemilattice, sh) -> np.ndarray:
    return zeta_matrix(lat) @ _lattice_signal(lat, sh, "sh")


def frequency_response(lat: MeetSemilattice, h) -> np.ndarray:
    """Diagonal of ``sum_a h[a] T_a`` in the zeta basis: ``H[c] = sum_{a >= c} h[a]``."""
    return lat.leq.astype(np.result_type(np.asarray(h), np.int64)) @ _lattice_signal(lat, h, "h")
