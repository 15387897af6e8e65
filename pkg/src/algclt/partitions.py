"""Pair partitions, ordered set partitions and the crossing statistics used by the CLT limits.

Ground sets are ``{1, ..., n}``. Enumeration is done by generators; the
``pair_partitions`` / ``ordered_set_partitions`` list versions are thin
wrappers for small ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from math import factorial, prod
from typing import Iterator


@dataclass(frozen=True)
class PairPartition:
    n: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = sorted(x for p in self.pairs for x in p)
        if seen != list(range(1, self.n + 1)):
            raise ValueError(f"pairs {self.pairs} do not cover 1..{self.n} disjointly")
        for i, j in self.pairs:
            if not i < j:
                raise ValueError(f"block {(i, j)} must satisfy i < j")

    @classmethod
    def from_pairs(cls, pairs) -> "PairPartition":
        pairs = tuple(sorted(tuple(sorted(p)) for p in pairs))
        return cls(2 * len(pairs), pairs)

    def site_pattern(self, order=None) -> tuple[int, ...]:
        """Site of each position: block ``k`` (in ``pairs`` order, or ``order[k]`` if given) gets ``k + 1``."""
        out = [0] * self.n
        for k, (i, j) in enumerate(self.pairs):
            s = k + 1 if order is None else order[k]
            out[i - 1] = out[j - 1] = s
        return tuple(out)

    def __str__(self):
        return "".join("{%d,%d}" % p for p in self.pairs)


@dataclass(frozen=True)
class OrderedSetPartition:
    """Blocks listed in increasing order of the site value they are assigned."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def site_pattern(self) -> tuple[int, ...]:
        out = [0] * self.n
        for rank, block in enumerate(self.blocks, start=1):
            for x in block:
                out[x - 1] = rank
        return tuple(out)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)


def iter_pair_partitions(n: int) -> Iterator[PairPartition]:
    """Smallest unpaired element pairs with each larger unpaired element, recursively."""
    if n < 0 or n % 2:
        return

    def rec(rest, acc):
        if not rest:
            yield PairPartition(n, tuple(acc))
            return
        first = rest[0]
        for k in range(1, len(rest)):
            acc.append((first, rest[k]))
            yield from rec(rest[1:k] + rest[k + 1:], acc)
            acc.pop()

    yield from rec(tuple(range(1, n + 1)), [])


def pair_partitions(n: int) -> list[PairPartition]:
    return list(iter_pair_partitions(n))


def crossing_number(p: PairPartition) -> int:
    return sum(
        1
        for (a, b), (c, d) in combinations(p.pairs, 2)
        if a < c < b < d or c < a < d < b
    )


def is_noncrossing(p: PairPartition) -> bool:
    """True iff the partition empties out by repeatedly deleting next-neighbour pairs."""
    partner = {}
    for i, j in p.pairs:
        partner[i], partner[j] = j, i
    stack = []
    for x in range(1, p.n + 1):
        if stack and partner[x] == stack[-1]:
            stack.pop()
        else:
            stack.append(x)
    return not stack


def is_interval(p: PairPartition) -> bool:
    return all(j == i + 1 and i % 2 == 1 for i, j in p.pairs)


def _nesting_parents(p: PairPartition) -> list[int | None]:
    """Index of the innermost block strictly enclosing each block (noncrossing input)."""
    parents: list[int | None] = []
    for k, (a, b) in enumerate(p.pairs):
        best = None
        for l, (c, d) in enumerate(p.pairs):
            if c < a and b < d and (best is None or c > p.pairs[best][0]):
                best = l
        parents.append(best)
    return parents


def monotone_labelings(p: PairPartition) -> int:
    """Orderings of the blocks in which every nested block comes after the blocks enclosing it.

    Zero for crossing partitions. Counted as linear extensions of the nesting
    forest via the hook formula ``m! / prod(subtree sizes)``.
    """
    if not is_noncrossing(p):
        return 0
    parents = _nesting_parents(p)
    m = len(p.pairs)
    size = [1] * m
    # children close before their parent, so sorting by width propagates sizes bottom-up
    for k in sorted(range(m), key=lambda k: p.pairs[k][1] - p.pairs[k][0]):
        if parents[k] is not None:
            size[parents[k]] += size[k]
    return factorial(m) // prod(size)


def iter_set_partitions(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Unordered set partitions of ``{1..n}`` via restricted growth strings, blocks sorted by minimum."""

    def rec(i, blocks):
        if i > n:
            yield tuple(tuple(b) for b in blocks)
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    if n == 0:
        yield ()
        return
    yield from rec(1, [])


def iter_ordered_set_partitions(n: int, max_blocks: int | None = None) -> Iterator[OrderedSetPartition]:
    if max_blocks is None:
        max_blocks = n
    for blocks in iter_set_partitions(n):
        if len(blocks) > max_blocks:
            continue
        for order in permutations(blocks):
            yield OrderedSetPartition(n, order)


def ordered_set_partitions(n: int, max_blocks: int | None = None) -> list[OrderedSetPartition]:
    return list(iter_ordered_set_partitions(n, max_blocks))


def iter_surjective_patterns(n: int) -> Iterator[tuple[int, ...]]:
    """Site patterns of all ordered set partitions of ``{1..n}`` (no particular order).

    Each pattern is a tuple ``s`` with ``set(s) == {1..max(s)}``.
    """
    for osp in iter_ordered_set_partitions(n):
        yield osp.site_pattern()
