"""Increasing integer maps and multi-indices.

Increasing maps carry an explicit interval domain [start..stop] because the
same machinery indexes boundary simplices (domains starting at 0) and
coordinate forms (domains starting at 1); keeping the interval explicit
avoids off-by-one drift between the two conventions.  The empty map is the
unique increasing map with an empty domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb


@dataclass(frozen=True)
class IncreasingMap:
    """Strictly increasing map from the interval [start..stop] into integers."""

    start: int
    values: tuple[int, ...]

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.values, self.values[1:])):
            raise ValueError(f"values not strictly increasing: {self.values}")

    @property
    def stop(self) -> int:
        return self.start + len(self.values) - 1

    @property
    def domain(self) -> range:
        return range(self.start, self.stop + 1)

    @property
    def is_empty(self) -> bool:
        return not self.values

    def __call__(self, i: int) -> int:
        if not self.start <= i <= self.stop:
            raise IndexError(f"{i} outside domain [{self.start}..{self.stop}]")
        return self.values[i - self.start]

    def __len__(self) -> int:
        return len(self.values)

    def range_set(self) -> frozenset:
        return frozenset(self.values)


def empty_map(start: int = 0) -> IncreasingMap:
    return IncreasingMap(start, ())


def increasing_maps(start: int, stop: int, codomain) -> list[IncreasingMap]:
    """All increasing maps [start..stop] -> codomain, in lexicographic order.

    An empty interval (stop < start) yields exactly the empty map.
    """
    size = stop - start + 1
    if size <= 0:
        return [IncreasingMap(start, ())]
    pool = sorted(set(codomain))
    return [IncreasingMap(start, combo) for combo in itertools.combinations(pool, size)]


def complement(sigma: IncreasingMap, codomain) -> IncreasingMap:
    """The increasing map onto codomain minus sigma's range.

    Its domain continues where sigma's stops, so that sigma followed by its
    complement enumerates the codomain as one permutation.
    """
    pool = sorted(set(codomain))
    taken = set(sigma.values)
    if not taken.issubset(pool):
        raise ValueError(f"range {sigma.values} not contained in {pool}")
    rest = tuple(v for v in pool if v not in taken)
    return IncreasingMap(sigma.stop + 1, rest)


def sign(sigma: IncreasingMap, codomain) -> int:
    """Parity (+1/-1) of the permutation (sigma, complement) of the codomain."""
    comp = complement(sigma, codomain)
    pool = sorted(set(codomain))
    pos = {v: i for i, v in enumerate(pool)}
    seq = [pos[v] for v in sigma.values + comp.values]
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


def perm_sign(seq) -> int:
    """Parity of an arbitrary sequence of distinct comparable items."""
    seq = list(seq)
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


def remove(sigma: IncreasingMap, i: int) -> IncreasingMap:
    """Drop the value at domain index i; the domain shrinks by one."""
    if not sigma.start <= i <= sigma.stop:
        raise IndexError(f"{i} outside domain [{sigma.start}..{sigma.stop}]")
    k = i - sigma.start
    return IncreasingMap(sigma.start, sigma.values[:k] + sigma.values[k + 1:])


def compose(outer: IncreasingMap, inner: IncreasingMap) -> IncreasingMap:
    """outer after inner; inner's values must lie in outer's domain."""
    return IncreasingMap(inner.start, tuple(outer(v) for v in inner.values))


def multi_indices(n: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples over [0..n] with total degree exactly `degree`."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for a in range(remaining + 1):
            rec(prefix + (a,), remaining - a, slots - 1)

    rec((), degree, n + 1)
    assert len(out) == comb(n + degree, n)
    return out


def multi_indices_upto(n: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for r in range(degree + 1):
        out.extend(multi_indices(n, r))
    return out
