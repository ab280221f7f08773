"""Finite combinatorics of subset sums and block-ordered set sequences.

Works with the semigroup of finite nonempty index sets under union: finite
generator families and their subset sums, additive value maps over index
sets, monochromatic subset-sum search on a bounded window, and exhaustive
window verdicts for the "meets every subset-sum family" property together
with gap bounds.  Index sets use 0-based indices; generator values are
positive integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from .errors import (
    ArityMismatch,
    CapExceeded,
    IndexOutOfRange,
    NotBlockOrdered,
)

MAX_GENERATORS = 20  # subset-sum expansion bound (2^k sums)
MAX_WINDOW = 12  # exhaustive window searches
MAX_TUPLE_LEN = 4  # generator-tuple length in exhaustive sweeps


@dataclass(frozen=True)
class FinSet:
    """Finite nonempty set of indices, stored strictly increasing."""

    elements: Tuple[int, ...]

    def __post_init__(self):
        if not self.elements:
            raise ArityMismatch("index sets must be nonempty")
        if any(e < 0 for e in self.elements):
            raise ArityMismatch(f"negative index in {self.elements}")
        if any(a >= b for a, b in zip(self.elements, self.elements[1:])):
            raise ArityMismatch(f"elements not strictly increasing: {self.elements}")

    @property
    def max(self) -> int:
        return self.elements[-1]

    @property
    def min(self) -> int:
        return self.elements[0]


def finset(elements: Iterable[int]) -> FinSet:
    return FinSet(tuple(sorted(set(int(e) for e in elements))))


@dataclass(frozen=True)
class FiniteIP:
    """Finite family of positive generators; repetition allowed."""

    generators: Tuple[int, ...]

    def __post_init__(self):
        if not self.generators:
            raise ArityMismatch("need at least one generator")
        if any(g < 1 for g in self.generators):
            raise ArityMismatch(f"generators must be positive: {self.generators}")


@dataclass(frozen=True)
class IpRing:
    """Strictly block-ordered sequence of index sets (a stored prefix)."""

    blocks: Tuple[FinSet, ...]


@dataclass(frozen=True)
class IpValueMap:
    """Prefix of a sequence of positive integers, summed over index sets."""

    gens: Tuple[int, ...]

    def __post_init__(self):
        if any(g < 1 for g in self.gens):
            raise ArityMismatch(f"generator values must be positive: {self.gens}")


def fs_expand(ip: FiniteIP, cap: int = MAX_GENERATORS) -> FrozenSet[int]:
    """All nonempty-subset sums of the generators (duplicates collapse)."""
    k = len(ip.generators)
    if k > cap:
        raise CapExceeded(f"{k} generators exceed the expansion cap {cap}")
    sums = {0}
    for g in ip.generators:
        sums |= {s + g for s in sums}
    sums.discard(0)
    return frozenset(sums)


def union_op(a: FinSet, b: FinSet) -> FinSet:
    return finset(a.elements + b.elements)


def block_less(a: FinSet, b: FinSet) -> bool:
    return a.max < b.min


def ip_value(vmap: IpValueMap, alpha: FinSet) -> int:
    if alpha.max >= len(vmap.gens):
        raise IndexOutOfRange(
            f"index {alpha.max} beyond the stored prefix of length {len(vmap.gens)}"
        )
    return sum(vmap.gens[i] for i in alpha.elements)


def ip_vector(vmaps: Sequence[IpValueMap], alpha: FinSet) -> Tuple[int, ...]:
    return tuple(ip_value(m, alpha) for m in vmaps)


def find_monochromatic_fs(
    coloring: Mapping[int, object],
    k: int,
    window_cap: int = MAX_WINDOW,
    tuple_cap: int = MAX_TUPLE_LEN,
) -> Optional[FiniteIP]:
    """Least strictly increasing generators with a one-color subset-sum set.

    ``coloring`` maps 1..W to colors.  The search runs over strictly
    increasing tuples (s_1 < ... < s_k) in lexicographic order and returns
    the first whose full subset-sum set stays inside 1..W and is
    monochromatic; None when the window has no witness.
    """
    w = _coloring_window(coloring)
    if w > window_cap:
        raise CapExceeded(f"window {w} exceeds the cap {window_cap}")
    if k < 1 or k > tuple_cap:
        raise CapExceeded(f"tuple length {k} outside 1..{tuple_cap}")
    for gens in combinations(range(1, w + 1), k):
        sums = fs_expand(FiniteIP(gens))
        if max(sums) > w:
            continue
        colors = {coloring[s] for s in sums}
        if len(colors) == 1:
            return FiniteIP(gens)
    return None


def _coloring_window(coloring: Mapping[int, object]) -> int:
    w = len(coloring)
    if w < 1 or set(coloring) != set(range(1, w + 1)):
        raise ArityMismatch("coloring must cover exactly 1..W")
    return w


@dataclass(frozen=True)
class IpStarVerdict:
    holds: bool
    witness: Optional[Tuple[int, ...]]
    k: int
    window: int


def is_ip_star_window(
    s: Iterable[int],
    k: int,
    window: int,
    window_cap: int = MAX_WINDOW,
    tuple_cap: int = MAX_TUPLE_LEN,
) -> IpStarVerdict:
    """Does S meet the subset sums of *every* generator tuple in {1..W}^k?

    Repeated generators are allowed.  Fails with the lexicographically
    least counterexample tuple.  The verdict is a statement about the
    stated window only.
    """
    if window < 1 or window > window_cap:
        raise CapExceeded(f"window {window} outside 1..{window_cap}")
    if k < 1 or k > tuple_cap:
        raise CapExceeded(f"tuple length {k} outside 1..{tuple_cap}")
    members = frozenset(int(x) for x in s)
    for tup in product(range(1, window + 1), repeat=k):
        if not (fs_expand(FiniteIP(tup)) & members):
            return IpStarVerdict(False, tup, k, window)
    return IpStarVerdict(True, None, k, window)


def syndetic_gap(s: Iterable[int], lo: int, hi: int) -> Optional[int]:
    """Largest gap of S inside [lo, hi], counting the distance in from both
    ends; None when S misses the interval entirely."""
    if lo >= hi:
        raise ArityMismatch(f"need lo < hi, got [{lo}, {hi}]")
    elems = sorted(x for x in set(s) if lo <= x <= hi)
    if not elems:
        return None
    gaps = [elems[0] - lo]
    gaps.extend(b - a for a, b in zip(elems, elems[1:]))
    gaps.append(hi - elems[-1])
    return max(gaps)


def validate_ip_ring(blocks: Sequence[FinSet]) -> IpRing:
    """Check strict block order; reports the first offending position."""
    blocks = tuple(blocks)
    if not blocks:
        raise ArityMismatch("need at least one block")
    for i in range(len(blocks) - 1):
        if not block_less(blocks[i], blocks[i + 1]):
            raise NotBlockOrdered(i + 1)
    return IpRing(blocks)


def coloring_from_json(obj: Mapping) -> Dict[int, object]:
    """{"W": int, "colors": [c_1, ..., c_W]} -> mapping 1..W -> color."""
    w = int(obj["W"])
    colors = list(obj["colors"])
    if len(colors) != w:
        raise ArityMismatch(f"expected {w} colors, got {len(colors)}")
    return {i + 1: c for i, c in enumerate(colors)}
