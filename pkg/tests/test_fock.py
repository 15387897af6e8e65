from fractions import Fraction

import numpy as np
import pytest

from algclt import clt, fock, oracles
from algclt.scalars import QPoly


@pytest.mark.parametrize(
    "flavor, oracle",
    [
        (fock.Flavor.FULL, oracles.catalan),
        (fock.Flavor.BOSON, oracles.normal_moment),
        (fock.Flavor.BOOLEAN, oracles.boolean_moment),
    ],
)
@pytest.mark.parametrize("n", range(1, 13))
def test_vacuum_moments(flavor, oracle, n):
    assert fock.vacuum_moment(fock.LadderSpec(flavor), n) == oracle(n)


@pytest.mark.parametrize("n", range(0, 11))
def test_q_fock_matches_crossing_generating_function(n):
    assert fock.vacuum_moment(fock.LadderSpec("q"), n) == (clt.q_limit_moment(n) if n else 1)


def test_q_fock_n8():
    assert fock.vacuum_moment(fock.LadderSpec("q"), 8) == QPoly((14, 28, 28, 20, 10, 4, 1))


def test_q_specialisations():
    for n in (2, 4, 6, 8):
        assert fock.vacuum_moment(fock.LadderSpec("q", 0), n) == oracles.catalan(n)
        assert fock.vacuum_moment(fock.LadderSpec("q", 1), n) == oracles.normal_moment(n)
        assert fock.vacuum_moment(fock.LadderSpec("q", Fraction(1, 3)), n) == clt.q_limit_moment(n)(Fraction(1, 3))


def test_path_sum_matches_transfer():
    spec = fock.LadderSpec("boson")
    for n in (2, 4, 6):
        paths = list(fock.dyck_paths(n))
        assert len(paths) == oracles.catalan(n)
        assert sum(fock.path_weight(spec, p) for p in paths) == fock.vacuum_moment(spec, n)


@pytest.mark.parametrize("flavor", ["full", "boson", "boolean"])
def test_matrix_cross_check(flavor):
    spec = fock.LadderSpec(flavor)
    for n in (2, 4, 6, 8):
        assert fock.vacuum_moment_matrix(spec, n) == pytest.approx(float(fock.vacuum_moment(spec, n)))


@pytest.mark.parametrize("q", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
def test_qccr_relations(q):
    m = fock.qccr_build(q, 32)
    rel = fock.qccr_check_relations(m)
    assert rel.ccr_interior < 1e-12
    assert rel.commutation_interior < 1e-12
    assert rel.ccr_boundary == pytest.approx(rel.expected_boundary)
    assert rel.alpha_norm <= 1 + 1e-12
    assert rel.gamma_norm <= 1 + 1e-12


def test_qccr_rejects_bad_parameters():
    with pytest.raises(ValueError):
        fock.qccr_build(1, 16)
    with pytest.raises(ValueError):
        fock.qccr_build(Fraction(1, 2), 3)
    m = fock.qccr_build(Fraction(1, 2), 12)
    with pytest.raises(ValueError):
        fock.qccr_projections(m, 6)


@pytest.mark.parametrize("q", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
def test_qccr_projections(q):
    m = fock.qccr_build(q, 32)
    pairs = fock.qccr_projections(m, 6)
    pr = fock.projection_report(m, pairs)
    assert pr.idempotency < 1e-9
    assert pr.min_gap_eigenvalue > -1e-9
    assert pr.rank_one_error < 1e-9
    assert pr.orthogonality < 1e-9
    neumann = fock.qccr_projections(m, 6, method="neumann")
    for (P1, _), (P2, _) in zip(pairs, neumann):
        assert np.abs(P1 - P2).max() < 1e-10


@pytest.mark.parametrize("q", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
def test_qccr_gamma_reconstruction(q):
    m = fock.qccr_build(q, 32)
    rec = fock.qccr_reconstruct_gamma(m, fock.qccr_projections(m, 6), 6)
    assert rec.ok
    assert rec.norm_error <= rec.bound + 1e-9
