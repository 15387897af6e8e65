"""Finite-N and limiting moments of normalized sums ``S_N = (b_1 + ... + b_N) / sqrt(N)``.

Finite-N moments expand ``phi(S_N^(j1) ... S_N^(jn))`` over site assignments
``{1..n} -> {1..N}``. Assignments are grouped by the ordered set partition
they induce (fibers, ordered by site value); each ordered partition with
``b`` blocks stands for ``C(N, b)`` assignments, so the sum is exact and
independent of ``N`` apart from those binomial weights.

Limits sum over pair partitions only: any fiber of size one contributes zero
(the singleton property) and fibers of size three or more are suppressed by
the ``N^(-n/2)`` normalization.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import comb, factorial, perm
from typing import Sequence

from . import partitions as P
from .moments import Kind, SiteDistribution, moment_of
from .scalars import QPoly, RootNScaled, abs2, exact_modulus


@dataclass(frozen=True)
class CltProblem:
    kind: Kind
    dist: SiteDistribution
    labels: tuple[str, ...]

    def __init__(self, kind, dist: SiteDistribution, labels: Sequence[str] | str | None = None):
        if labels is None:
            labels = dist.labels[:1]
        if isinstance(labels, str):
            labels = (labels,)
        labels = tuple(labels)
        if not labels:
            raise ValueError("labels sequence must be nonempty")
        for j in set(labels):
            if dist((j,)) != 0:
                raise ValueError(f"label {j!r} is not centered: first moment {dist((j,))}")
        object.__setattr__(self, "kind", Kind(kind))
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.labels)


def _ordered_chunk(args):
    kind, dist, labels, blocks_list = args
    out: dict[int, Fraction] = {}
    n = len(labels)
    for blocks in blocks_list:
        b = len(blocks)
        for order in permutations(blocks):
            pattern = P.OrderedSetPartition(n, order).site_pattern()
            out[b] = out.get(b, 0) + moment_of(kind, pattern, labels, dist)
    return out


def _collapsed_chunk(args):
    kind, dist, labels, blocks_list = args
    out: dict[int, Fraction] = {}
    n = len(labels)
    for blocks in blocks_list:
        pattern = P.OrderedSetPartition(n, blocks).site_pattern()
        out[len(blocks)] = out.get(len(blocks), 0) + moment_of(kind, pattern, labels, dist)
    return out


def finite_n_coefficients(p: CltProblem, collapse: bool = False, jobs: int = 1) -> dict[int, Fraction]:
    """Map ``b -> sum of moments over site patterns with b distinct sites``.

    With ``collapse=False`` patterns are ordered set partitions (weight
    ``C(N, b)``). With ``collapse=True``, allowed only for exchangeable
    kinds, they are unordered set partitions (weight ``N (N-1) ... (N-b+1)``).
    """
    if collapse and not p.kind.exchangeable:
        raise ValueError(f"{p.kind.value} moments are not exchangeable; use ordered partitions")
    work = _collapsed_chunk if collapse else _ordered_chunk
    allparts = list(P.iter_set_partitions(p.n))
    if jobs <= 1 or len(allparts) < 64:
        return work((p.kind, p.dist, p.labels, allparts))
    chunks = [allparts[i::jobs] for i in range(jobs)]
    total: dict[int, Fraction] = {}
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        for part in ex.map(work, [(p.kind, p.dist, p.labels, c) for c in chunks]):
            for b, v in part.items():
                total[b] = total.get(b, 0) + v
    return dict(sorted(total.items()))


def _assemble(coeffs: dict[int, Fraction], n: int, N: int, collapse: bool):
    weight = perm if collapse else comb
    s = sum((weight(N, b) * v for b, v in coeffs.items()), Fraction(0))
    if n % 2 == 0:
        return s / Fraction(N) ** (n // 2)
    return RootNScaled(s / Fraction(N) ** (n // 2), N)


def finite_n_moment(p: CltProblem, N: int, collapse: bool = False, jobs: int = 1):
    """Exact ``phi(S_N^(j1) ... S_N^(jn))``.

    Even ``n`` gives a rational (or Gaussian rational); odd ``n`` gives a
    :class:`RootNScaled`, i.e. a rational multiple of ``N^(-1/2)``.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    return _assemble(finite_n_coefficients(p, collapse, jobs), p.n, N, collapse)


def limit_moment(p: CltProblem, ordered: bool | None = None):
    """``lim_N phi(S_N^(j1) ... S_N^(jn))``: zero for odd ``n``, a pair-partition sum otherwise.

    The general formula sums over all maps ``sigma: {1..n} -> {1..n/2}`` with
    two-element fibers and divides by ``(n/2)!``. For exchangeable kinds all
    relabelings of the pairs agree, so by default the sum collapses to one
    term per pair partition. Monotone always uses the full ordered sum.
    """
    n = p.n
    if n % 2:
        return Fraction(0)
    if ordered is None:
        ordered = not p.kind.exchangeable
    m = n // 2
    total = Fraction(0)
    for pp in P.iter_pair_partitions(n):
        if ordered:
            for order in permutations(range(1, m + 1)):
                total = total + moment_of(p.kind, pp.site_pattern(order), p.labels, p.dist)
        else:
            total = total + moment_of(p.kind, pp.site_pattern(), p.labels, p.dist)
    return total / factorial(m) if ordered else total


def q_limit_moment(n: int) -> QPoly:
    """Sum over pair partitions of ``q^crossings``."""
    if n % 2:
        return QPoly()
    acc = [0] * (n * n // 8 + 1)
    for pp in P.iter_pair_partitions(n):
        acc[P.crossing_number(pp)] += 1
    return QPoly(acc)


@dataclass
class HypothesisReport:
    name: str
    kind: Kind
    passed: bool
    checked: int
    witness: dict | None = None

    def __bool__(self):
        return self.passed


def _patterns_by_length(n_max: int):
    for n in range(1, n_max + 1):
        for pattern in sorted(P.iter_surjective_patterns(n)):
            yield n, pattern


def check_singleton(kind, dist: SiteDistribution, n_max: int) -> HypothesisReport:
    """Every word in which some site occurs exactly once must have moment zero.

    Scans site patterns by increasing length, so the reported witness is a
    shortest failing word.
    """
    kind = Kind(kind)
    checked = 0
    for n, pattern in _patterns_by_length(n_max):
        counts = [pattern.count(s) for s in set(pattern)]
        if 1 not in counts:
            continue
        for labels in product(dist.labels, repeat=n):
            checked += 1
            val = moment_of(kind, pattern, labels, dist)
            if val != 0:
                witness = {"sites": pattern, "labels": labels, "value": val}
                return HypothesisReport("singleton", kind, False, checked, witness)
    return HypothesisReport("singleton", kind, True, checked)


def check_spreadability(
    kind, dist: SiteDistribution, n_max: int, order_preserving: bool = True
) -> HypothesisReport:
    """Invariance of moments under site relabelings.

    With ``order_preserving=True`` every word up to length ``n_max`` is
    compared against all order-preserving injections of its sites into
    ``{1..n_max+2}``. With ``order_preserving=False`` the word is compared
    against every permutation of its own sites; together with the
    order-preserving check this covers all injective relabelings.
    """
    kind = Kind(kind)
    checked = 0
    name = "spreadability" if order_preserving else "exchangeability"
    for n, pattern in _patterns_by_length(n_max):
        b = max(pattern)
        if order_preserving:
            targets = combinations(range(1, n_max + 3), b)
        else:
            targets = permutations(range(1, b + 1))
        targets = [t for t in targets if t != tuple(range(1, b + 1))]
        for labels in product(dist.labels, repeat=n):
            base = moment_of(kind, pattern, labels, dist)
            for t in targets:
                checked += 1
                moved = tuple(t[s - 1] for s in pattern)
                val = moment_of(kind, moved, labels, dist)
                if val != base:
                    witness = {
                        "sites": pattern,
                        "relabeled_sites": moved,
                        "labels": labels,
                        "value": base,
                        "relabeled_value": val,
                    }
                    return HypothesisReport(name, kind, False, checked, witness)
    return HypothesisReport(name, kind, True, checked)


def check_bound(kind, dist: SiteDistribution, n: int):
    """``C_n = max |phi(word)|`` over words of length ``n``.

    By spreadability every site assignment is equivalent to one with sites in
    ``{1..n}`` forming an ordered set partition, so the maximum over that
    finite family bounds all of them. Exact when the maximizing modulus is
    rational; a float otherwise.
    """
    kind = Kind(kind)
    best, best_val = Fraction(-1), Fraction(0)
    for pattern in P.iter_surjective_patterns(n):
        for labels in product(dist.labels, repeat=n):
            v = moment_of(kind, pattern, labels, dist)
            a2 = abs2(v)
            if a2 > best:
                best, best_val = a2, v
    return exact_modulus(best_val)


@dataclass
class MomentRow:
    n: int
    N: int | str
    exact: object
    error: object = None


@dataclass
class MomentTable:
    problem: CltProblem
    rows: list[MomentRow] = field(default_factory=list)

    @property
    def limit(self):
        return self.rows[-1].exact

    def errors(self):
        return [r.error for r in self.rows if r.N != "limit"]


def _error(value, limit):
    if isinstance(value, RootNScaled):
        return RootNScaled(abs(value.coeff), value.N)
    return exact_modulus(value - limit)


def convergence_table(p: CltProblem, N_list: Sequence[int], jobs: int = 1) -> MomentTable:
    N_list = list(N_list)
    if not N_list or N_list != sorted(N_list):
        raise ValueError("N_list must be nonempty and ascending")
    coeffs = finite_n_coefficients(p, jobs=jobs)
    lim = limit_moment(p)
    table = MomentTable(p)
    for N in N_list:
        v = _assemble(coeffs, p.n, N, False)
        table.rows.append(MomentRow(p.n, N, v, _error(v, lim)))
    table.rows.append(MomentRow(p.n, "limit", lim, Fraction(0)))
    return table
