"""Joint moments of words in independent copies of a single-site distribution.

A word is a tuple of :class:`Letter` ``(site, labels)``: the product, in order,
of generators ``b_site^(label)``. ``labels`` is a *label-word*, the product of
several generators at the same site. A :class:`SiteDistribution` assigns a
moment to each label-word; :func:`evaluate_moment` extends it to words across
sites under one of the four independence rules.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Iterable, Mapping
from fractions import Fraction
from itertools import product as cartesian
from typing import NamedTuple

from .scalars import Scalar, conj, parse_scalar


class Kind(str, enum.Enum):
    TENSOR = "tensor"
    FREE = "free"
    BOOLEAN = "boolean"
    MONOTONE = "monotone"

    @property
    def exchangeable(self) -> bool:
        """Whether moments are invariant under arbitrary (not only order-preserving) site relabelings."""
        return self is not Kind.MONOTONE


class MissingMomentError(KeyError):
    """The site distribution has no value for a label-word that the evaluation needs."""


class NotNormalizedError(ValueError):
    pass


class Letter(NamedTuple):
    site: int
    labels: tuple[str, ...]


Word = tuple[Letter, ...]


def normalize_word(letters: Iterable) -> Word:
    """Merge adjacent letters that share a site.

    Accepts :class:`Letter` objects or plain tuples ``(site, label)`` /
    ``(site, label, power)``, where ``label`` may be a string or a tuple of
    strings. The result alternates sites between consecutive letters.
    """
    out: list[list] = []
    for item in letters:
        if isinstance(item, Letter):
            site, labels = item
        elif len(item) == 3:
            site, label, power = item
            if power < 1:
                raise ValueError(f"power must be positive, got {power}")
            labels = (label,) * power if isinstance(label, str) else tuple(label) * power
        else:
            site, label = item
            labels = (label,) if isinstance(label, str) else tuple(label)
        if not labels:
            continue
        if out and out[-1][0] == site:
            out[-1][1] += labels
        else:
            out.append([site, tuple(labels)])
    return tuple(Letter(s, l) for s, l in out)


def make_word(sites: Iterable[int], labels: Iterable[str]) -> Word:
    """Normalized word ``b_{sites[0]}^{labels[0]} ... b_{sites[-1]}^{labels[-1]}``."""
    out = []
    prev = None
    run: list[str] = []
    for s, j in zip(sites, labels):
        if s == prev:
            run.append(j)
            continue
        if run:
            out.append(Letter(prev, tuple(run)))
        prev, run = s, [j]
    if run:
        out.append(Letter(prev, tuple(run)))
    return tuple(out)


def is_normalized(w: Word) -> bool:
    return all(a.site != b.site for a, b in zip(w, w[1:])) and all(l.labels for l in w)


def word_adjoint(w: Word, adjoint: Mapping[str, str] | None = None) -> Word:
    """Reverse the word and replace every label by its adjoint label."""
    adj = adjoint or {}
    return tuple(
        Letter(l.site, tuple(adj.get(x, x) for x in reversed(l.labels))) for l in reversed(w)
    )


def label_word_adjoint(labels: tuple[str, ...], adjoint: Mapping[str, str] | None = None):
    adj = adjoint or {}
    return tuple(adj.get(x, x) for x in reversed(labels))


def canonical_sites(w: Word) -> Word:
    """Relabel sites ``1, 2, ...`` in order of first occurrence."""
    rename: dict[int, int] = {}
    return tuple(Letter(rename.setdefault(l.site, len(rename) + 1), l.labels) for l in w)


class _PowerMoments:
    """Moments of a single self-adjoint label given as a table ``power -> value``."""

    def __init__(self, label: str, table: Mapping[int, Scalar] | Callable[[int], Scalar]):
        self.label = label
        self.table = table

    def __call__(self, labels: tuple[str, ...]):
        if any(x != self.label for x in labels):
            raise MissingMomentError(labels)
        k = len(labels)
        if callable(self.table):
            return self.table(k)
        try:
            return self.table[k]
        except KeyError:
            raise MissingMomentError(labels) from None


_ONE, _ZERO = Fraction(1), Fraction(0)


def _bernoulli(k: int) -> Fraction:
    return _ONE if k % 2 == 0 else _ZERO


class SiteDistribution:
    """Single-site moment functional on label-words.

    Parameters
    ----------
    moments : mapping or callable
        Either a mapping ``label-word tuple -> scalar`` or a callable
        returning the moment of a label-word (raising
        :class:`MissingMomentError` when undefined). The empty word is
        always 1.
    adjoint : mapping, optional
        The label involution ``j -> j'``; labels not listed are self-adjoint.
    labels : iterable of str, optional
        The label alphabet. Inferred from a mapping when omitted.
    """

    def __init__(self, moments, adjoint: Mapping[str, str] | None = None, labels=None):
        if callable(moments):
            self._lookup = moments
            self._table = None
        else:
            self._table = {tuple(k): parse_scalar(v) for k, v in moments.items()}
            self._lookup = None
        self.adjoint = dict(adjoint or {})
        for j, jp in self.adjoint.items():
            if self.adjoint.get(jp, jp) != j:
                raise ValueError(f"label adjoint map is not an involution at {j!r}")
        if labels is None:
            if self._table is None:
                raise ValueError("labels must be given for a callable distribution")
            labels = sorted({x for k in self._table for x in k})
        self.labels = tuple(labels)
        self._memo: dict = {}

    @classmethod
    def single_label(cls, moments, label: str = "b") -> "SiteDistribution":
        """Distribution of one self-adjoint generator from its power moments.

        ``moments`` is a sequence ``[m1, m2, ...]``, a mapping ``k -> m_k`` or a
        callable ``k -> m_k``.
        """
        if callable(moments):
            table = moments
        elif isinstance(moments, Mapping):
            table = {int(k): parse_scalar(v) for k, v in moments.items()}
        else:
            table = {k: parse_scalar(v) for k, v in enumerate(moments, start=1)}
        return cls(_PowerMoments(label, table), labels=(label,))

    @classmethod
    def symmetric_bernoulli(cls, label: str = "b") -> "SiteDistribution":
        """Moments of the law ``(delta_-1 + delta_1) / 2``: all even moments 1, odd moments 0."""
        return cls.single_label(_bernoulli, label)

    def __call__(self, labels: tuple[str, ...]) -> Scalar:
        labels = tuple(labels)
        if not labels:
            return Fraction(1)
        if self._table is not None:
            try:
                return self._table[labels]
            except KeyError:
                raise MissingMomentError(labels) from None
        return self._lookup(labels)

    def label_words(self, max_len: int):
        for k in range(1, max_len + 1):
            yield from cartesian(self.labels, repeat=k)

    def is_hermitian(self, max_len: int) -> bool:
        return all(
            self(label_word_adjoint(w, self.adjoint)) == conj(self(w))
            for w in self.label_words(max_len)
        )


def _eval_tensor(w: Word, d: SiteDistribution):
    by_site: dict[int, tuple] = {}
    for l in w:
        by_site[l.site] = by_site.get(l.site, ()) + l.labels
    acc = Fraction(1)
    for labels in by_site.values():
        acc = acc * d(labels)
        if acc == 0:
            break
    return acc


def _eval_boolean(w: Word, d: SiteDistribution):
    acc = Fraction(1)
    for l in w:
        acc = acc * d(l.labels)
        if acc == 0:
            break
    return acc


def _eval_monotone(w: Word, d: SiteDistribution):
    acc = Fraction(1)
    while w:
        if len({l.site for l in w}) == 1:
            return acc * d(w[0].labels)
        k = max(range(len(w)), key=lambda i: w[i].site)
        acc = acc * d(w[k].labels)
        if acc == 0:
            return acc
        if 0 < k < len(w) - 1 and w[k - 1].site == w[k + 1].site:
            w = w[:k - 1] + (Letter(w[k - 1].site, w[k - 1].labels + w[k + 1].labels),) + w[k + 2:]
        else:
            w = w[:k] + w[k + 1:]
    return acc


def _eval_free(w: Word, d: SiteDistribution):
    # relabeled sites share the memo; valid because free moments see only the equality pattern
    w = canonical_sites(w)
    memo = d._memo
    key = ("free", w)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if len(w) <= 1:
        val = d(w[0].labels) if w else Fraction(1)
        memo[key] = val
        return val
    # phi(prod (w_i - d_i)) = 0 for alternating centered factors; solve for phi(w_1...w_k)
    means = [d(l.labels) for l in w]
    nonzero = [i for i, m in enumerate(means) if m != 0]
    total = Fraction(0)
    for mask in range(1, 1 << len(nonzero)):
        drop = {nonzero[b] for b in range(len(nonzero)) if mask >> b & 1}
        coeff = Fraction(1)
        for i in drop:
            coeff = coeff * (-means[i])
        rest = normalize_word(l for i, l in enumerate(w) if i not in drop)
        total = total + coeff * _eval_free(rest, d)
    val = -total
    memo[key] = val
    return val


_RULES = {
    Kind.TENSOR: _eval_tensor,
    Kind.BOOLEAN: _eval_boolean,
    Kind.MONOTONE: _eval_monotone,
    Kind.FREE: _eval_free,
}


def evaluate_moment(kind: Kind | str, w: Word, d: SiteDistribution) -> Scalar:
    """Moment of the normalized word ``w`` for independent copies of ``d``.

    Tensor
        product over sites of the moment of the site's letters, concatenated in order.
    Boolean
        product of the moments of the letters in order.
    Free
        the centering recursion: alternating products of centered elements vanish.
    Monotone
        repeatedly factor out a letter whose site exceeds both neighbours
        (word ends count as site 0), then re-normalize.
    """
    kind = Kind(kind)
    w = tuple(w)
    if not is_normalized(w):
        raise NotNormalizedError(f"word {w} has adjacent letters on the same site")
    if not w:
        return Fraction(1)
    return _RULES[kind](w, d)


def moment_of(kind: Kind | str, sites, labels, d: SiteDistribution) -> Scalar:
    """Moment of ``b_{sites[0]}^{labels[0]} ... `` given position-wise sites and labels."""
    w = make_word(sites, labels)
    if not w:
        return _ONE
    return _RULES[kind if isinstance(kind, Kind) else Kind(kind)](w, d)


def relabel_sites(w: Word, mapping: Mapping[int, int] | Callable[[int], int]) -> Word:
    f = mapping if callable(mapping) else mapping.__getitem__
    return normalize_word(Letter(f(l.site), l.labels) for l in w)


__all__ = [
    "Kind",
    "Letter",
    "MissingMomentError",
    "NotNormalizedError",
    "SiteDistribution",
    "Word",
    "canonical_sites",
    "evaluate_moment",
    "is_normalized",
    "make_word",
    "moment_of",
    "normalize_word",
    "relabel_sites",
    "word_adjoint",
]
