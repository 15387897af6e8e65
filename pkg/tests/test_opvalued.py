from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from algclt import clt, oracles
from algclt import opvalued as ov
from algclt.moments import Kind
from algclt.scalars import RootNScaled, gauss

seeds = st.integers(0, 10_000)


def scalar_observable():
    one, zero = ov.bmatrix([[1]]), ov.bmatrix([[0]])
    return ov.ObservableBlocks("b", zero, one, one, zero)


def test_block_shapes_validated():
    z = ov.bzeros(2, 2)
    with pytest.raises(ov.DimensionMismatch):
        ov.ObservableBlocks("x", z, ov.bzeros(3, 2), ov.bzeros(3, 2), ov.bzeros(3, 3))


def test_bmatrix_and_adjoint():
    M = ov.bmatrix([[1, gauss(0, 1)], [2, 3]])
    A = ov.badjoint(M)
    assert A[0, 1] == 2 and A[1, 0] == gauss(0, -1)
    assert ov.bequal(ov.badjoint(A), M)


@given(seeds, st.integers(1, 6))
def test_vacuum_compression_equals_limit_formula(seed, n):
    inst = ov.random_instance(seed, n)
    seq = inst.sequence()
    assert ov.bequal(ov.opvalued_vacuum_moment(seq), ov.opvalued_limit_formula(seq))


@given(seeds, st.integers(1, 5))
def test_complex_entries(seed, n):
    inst = ov.random_instance(seed, n, complex_entries=True)
    seq = inst.sequence()
    assert ov.bequal(ov.opvalued_vacuum_moment(seq), ov.opvalued_limit_formula(seq))


@given(seeds, st.integers(2, 4), st.integers(1, 3))
def test_finite_n_matches_bruteforce(seed, n, N):
    inst = ov.random_instance(seed, n)
    fast = ov.opvalued_finite_n_moment(inst.observables, inst.labels, N)
    slow = ov.boolean_finite_n_bruteforce(inst.observables, inst.labels, N)
    if n % 2:
        fast = np.vectorize(lambda x: x.coeff, otypes=[object])(fast)
    assert ov.bequal(fast, slow)


def test_odd_finite_n_entries_are_root_scaled():
    inst = ov.random_instance(1, 3)
    out = ov.opvalued_finite_n_moment(inst.observables, inst.labels, 4)
    assert all(isinstance(x, RootNScaled) for x in out.flat)


def test_n4_error_halves_when_n_doubles():
    inst = ov.random_instance(7, 4)
    lim = ov.opvalued_limit_formula(inst.sequence())
    coeffs = ov.opvalued_finite_n_coefficients(inst.observables, inst.labels)
    errs = [ov.opvalued_finite_n_moment(inst.observables, inst.labels, N, coeffs) - lim for N in (2, 4, 8)]
    assert ov.bequal(errs[0], 2 * errs[1]) and ov.bequal(errs[1], 2 * errs[2])


@pytest.mark.parametrize("n", [2, 4, 6])
def test_expansion_leading_term_is_limit(n):
    inst = ov.random_instance(11, n)
    coeffs = ov.opvalued_finite_n_coefficients(inst.observables, inst.labels)
    exp = ov.finite_n_expansion(coeffs, n)
    assert max(exp) == n // 2
    assert ov.bequal(exp[n // 2], ov.opvalued_limit_formula(inst.sequence()))


def test_binomial_power_basis():
    # C(N, 3) = (N^3 - 3N^2 + 2N) / 6
    assert ov._binomial_power_basis(3) == [0, Fraction(1, 3), Fraction(-1, 2), Fraction(1, 6)]


@pytest.mark.parametrize("n", range(1, 13))
def test_scalar_case_is_boolean_clt(n):
    seq = [scalar_observable()] * n
    assert ov.opvalued_limit_formula(seq)[0, 0] == oracles.boolean_moment(n)
    assert ov.opvalued_vacuum_moment(seq)[0, 0] == oracles.boolean_moment(n)


def test_scalar_site_distribution_feeds_scalar_engine():
    d = ov.site_distribution({"b": scalar_observable()})
    for n in (2, 4, 6):
        p = clt.CltProblem(Kind.BOOLEAN, d, ["b"] * n)
        assert clt.limit_moment(p) == 1
        assert clt.finite_n_moment(p, 3) == ov.opvalued_finite_n_moment({"b": scalar_observable()}, ["b"] * n, 3)[0, 0]


def test_adjoint_pair_detected_in_scalar_distribution():
    one = ov.bmatrix([[1]])
    c = ov.ObservableBlocks("c", ov.bmatrix([[0]]), one, 2 * one, ov.bmatrix([[3]]))
    d = ov.site_distribution({"c": c, "c*": c.adjoint("c*")})
    assert d.adjoint == {"c": "c*", "c*": "c"}
    assert d.is_hermitian(4)


@given(seeds, st.integers(1, 4))
def test_positivity(seed, n):
    inst = ov.random_instance(seed, n)
    assert ov.positivity_witness(inst.sequence()) >= -1e-9


def test_uncentered_sequence_rejected():
    one = ov.bmatrix([[1]])
    x = ov.ObservableBlocks("x", one, one, one, one)
    with pytest.raises(ValueError):
        ov.opvalued_limit_formula([x, x])
