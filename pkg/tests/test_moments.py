from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from algclt.moments import (
    Kind,
    Letter,
    MissingMomentError,
    NotNormalizedError,
    SiteDistribution,
    canonical_sites,
    evaluate_moment,
    make_word,
    moment_of,
    normalize_word,
    word_adjoint,
)
from algclt.scalars import conj

from conftest import two_label_distribution

BERNOULLI = SiteDistribution.symmetric_bernoulli()
TWO_LABEL = two_label_distribution()

ALL_KINDS = list(Kind)
EXCHANGEABLE = [k for k in Kind if k.exchangeable]


def positions(max_len=6, max_site=4, labels=("b",)):
    """Parallel (sites, labels) lists of equal length."""
    return st.integers(1, max_len).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(1, max_site), min_size=n, max_size=n),
            st.lists(st.sampled_from(labels), min_size=n, max_size=n),
        )
    )


def test_normalize_merges_adjacent_letters():
    w = normalize_word([(1, "b"), (1, "b"), (2, "b", 2), (1, ("b", "b"))])
    assert w == (Letter(1, ("b", "b")), Letter(2, ("b", "b")), Letter(1, ("b", "b")))
    assert make_word([1, 1, 2, 2, 1, 1], "bbbbbb") == w


def test_unnormalized_word_rejected(bernoulli):
    with pytest.raises(NotNormalizedError):
        evaluate_moment("free", (Letter(1, ("b",)), Letter(1, ("b",))), bernoulli)


def test_missing_moment_raises():
    d = SiteDistribution.single_label(["0", "1"])
    with pytest.raises(MissingMomentError):
        moment_of("tensor", [1, 1, 1, 1], ["b"] * 4, d)


def test_adjoint_map_must_be_involution():
    with pytest.raises(ValueError):
        SiteDistribution({("a",): 0, ("b",): 0, ("c",): 0}, adjoint={"a": "b", "b": "c"})


@pytest.mark.parametrize(
    "kind, sites, want",
    [
        ("tensor", [1, 2, 1, 2], 1),
        ("free", [1, 2, 1, 2], 0),
        ("free", [1, 2, 2, 1], 1),
        ("boolean", [1, 2, 2, 1], 0),
        ("boolean", [1, 1, 2, 2], 1),
        ("monotone", [1, 2, 2, 1], 1),
        ("monotone", [2, 1, 1, 2], 0),
        ("monotone", [1, 2, 1, 2], 0),
    ],
)
def test_known_mixed_moments(bernoulli, kind, sites, want):
    assert moment_of(kind, sites, ["b"] * 4, bernoulli) == want


def test_free_moment_with_nonzero_means():
    # b^2 has mean 1; free: phi(x y x y) = phi(x^2) phi(y)^2 + phi(x)^2 phi(y^2) - phi(x)^2 phi(y)^2
    d = SiteDistribution.single_label(["0", "2", "0", "7"])
    w = make_word([1, 1, 2, 2, 1, 1, 2, 2], ["b"] * 8)
    assert evaluate_moment("free", w, d) == 7 * 4 + 4 * 7 - 4 * 4


@given(positions(labels=("c", "c*")))
def test_adjoint_is_involution(pl):
    w = make_word(*pl)
    adj = {"c": "c*", "c*": "c"}
    assert word_adjoint(word_adjoint(w, adj), adj) == w


@pytest.mark.parametrize("kind", ALL_KINDS)
@given(pl=positions(labels=("c", "c*")))
def test_hermitian_symmetry(kind, pl):
    w = make_word(*pl)
    lhs = evaluate_moment(kind, word_adjoint(w, TWO_LABEL.adjoint), TWO_LABEL)
    assert lhs == conj(evaluate_moment(kind, w, TWO_LABEL))


@pytest.mark.parametrize("kind", ALL_KINDS)
@given(pl=positions(labels=("c", "c*")))
def test_singleton_vanishing(kind, pl):
    sites, labels = pl
    if 1 in [sites.count(s) for s in set(sites)]:
        assert moment_of(kind, sites, labels, TWO_LABEL) == 0


@pytest.mark.parametrize("kind", ALL_KINDS)
@given(pl=positions(), shift=st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_spreadability_under_order_preserving_maps(kind, pl, shift):
    sites, labels = pl
    # strictly increasing map s -> s + (cumulative gaps)
    f = {s: s + sum(shift[:s]) for s in range(1, 5)}
    moved = [f[s] for s in sites]
    assert moment_of(kind, moved, labels, BERNOULLI) == moment_of(kind, sites, labels, BERNOULLI)


@pytest.mark.parametrize("kind", EXCHANGEABLE)
@given(pl=positions(labels=("c", "c*")), perm=st.permutations([1, 2, 3, 4]))
def test_exchangeability(kind, pl, perm):
    sites, labels = pl
    moved = [perm[s - 1] for s in sites]
    assert moment_of(kind, moved, labels, TWO_LABEL) == moment_of(kind, sites, labels, TWO_LABEL)


def test_monotone_is_not_exchangeable(bernoulli):
    a = moment_of("monotone", [1, 2, 2, 1], "bbbb", bernoulli)
    b = moment_of("monotone", [2, 1, 1, 2], "bbbb", bernoulli)
    assert (a, b) == (1, 0)


@given(pl=positions(max_len=8, max_site=4))
def test_tensor_matches_classical_expectation(pl):
    sites, labels = pl
    present = sorted(set(sites))
    total = 0
    for signs in product((1, -1), repeat=len(present)):
        x = dict(zip(present, signs))
        p = 1
        for s in sites:
            p *= x[s]
        total += p
    assert moment_of("tensor", sites, labels, BERNOULLI) == Fraction(total, 2 ** len(present))


@given(pl=positions(labels=("c", "c*")))
def test_free_value_depends_only_on_site_pattern(pl):
    w = make_word(*pl)
    assert evaluate_moment("free", w, TWO_LABEL) == evaluate_moment("free", canonical_sites(w), TWO_LABEL)
