"""The cross-validation suite behind ``algclt verify`` and ``tests/test_acceptance.py``.

Each check returns ``(ok, detail)``; :func:`run_checks` times it and fails
it if it overruns its budget.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable


from . import clt, fock, oracles, opvalued
from . import partitions as P
from .moments import Kind, SiteDistribution, moment_of


@dataclass(frozen=True)
class Check:
    name: str
    group: str
    budget: float
    func: Callable[[], tuple[bool, str]]
    criterion: int


@dataclass
class CheckResult:
    name: str
    group: str
    passed: bool
    seconds: float
    budget: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name:<16} {self.seconds:7.2f}s (budget {self.budget:g}s)  {self.detail}"


CHECKS: list[Check] = []


def check(name: str, group: str, budget: float, criterion: int):
    def deco(func):
        CHECKS.append(Check(name, group, budget, func, criterion))
        return func

    return deco


def _bernoulli():
    return SiteDistribution.symmetric_bernoulli()


def _limit(kind, n, dist=None):
    dist = dist or _bernoulli()
    return clt.limit_moment(clt.CltProblem(kind, dist, ["b"] * n))


def _compare_limits(kind, oracle, degrees) -> tuple[bool, str]:
    bad = []
    got = []
    for n in degrees:
        v, want = _limit(kind, n), oracle(n)
        got.append(str(v))
        if v != want:
            bad.append(f"n={n}: got {v}, expected {want}")
    if bad:
        return False, "; ".join(bad)
    return True, "values " + ", ".join(got)


@check("tensor-limit", "limits", 1.0, 1)
def tensor_limit():
    return _compare_limits(Kind.TENSOR, oracles.normal_moment, [2, 4, 6, 8, 10])


@check("free-limit", "limits", 1.0, 2)
def free_limit():
    return _compare_limits(Kind.FREE, oracles.catalan, [2, 4, 6, 8, 10])


@check("boolean-limit", "limits", 1.0, 3)
def boolean_limit():
    return _compare_limits(Kind.BOOLEAN, oracles.boolean_moment, range(1, 13))


@check("monotone-limit", "limits", 5.0, 4)
def monotone_limit():
    for n in (2, 4, 6, 8):
        quad = oracles.arcsine_moment_integral(n)
        if abs(quad - float(oracles.arcsine_moment(n))) > 1e-9:
            return False, f"arcsine recurrence and quadrature disagree at n={n}"
    return _compare_limits(Kind.MONOTONE, oracles.arcsine_moment, [2, 4, 6, 8])


_FLAVOR_OF = {
    Kind.TENSOR: fock.Flavor.BOSON,
    Kind.FREE: fock.Flavor.FULL,
    Kind.BOOLEAN: fock.Flavor.BOOLEAN,
}


@check("fock-crossval", "fock", 10.0, 5)
def fock_crossval():
    bad = []
    for kind, flavor in _FLAVOR_OF.items():
        for n in range(0, 13):
            v = fock.vacuum_moment(fock.LadderSpec(flavor), n)
            lim = _limit(kind, n) if n else Fraction(1)
            if v != lim:
                bad.append(f"{flavor.value} n={n}: {v} != {lim}")
    qspec = fock.LadderSpec(fock.Flavor.QFOCK)
    for n in range(0, 11):
        v = fock.vacuum_moment(qspec, n)
        want = clt.q_limit_moment(n) if n else 1
        if v != want:
            bad.append(f"q n={n}: {v} != {want}")
    if bad:
        return False, "; ".join(bad)
    return True, "boson/full/boolean n<=12 and q-Fock n<=10 agree"


def _ratio_ok(errs) -> tuple[bool, str]:
    for a, b in zip(errs, errs[1:]):
        if b > a:
            return False, f"error increased {a} -> {b}"
        if a != 0:
            if b == 0:
                return False, f"error dropped from {a} to exactly 0"
            r = a / b
            if not Fraction(9, 5) <= r <= Fraction(11, 5):
                return False, f"error ratio ({a}) / ({b}) = {r} = {float(r):.4f} outside [1.8, 2.2]"
    return True, ""


@check("finite-n", "finite-n", 60.0, 6)
def finite_n_convergence():
    d = _bernoulli()
    Ns = [2, 4, 8, 16]
    bad, notes = [], []
    for kind in Kind:
        for n in (4, 6):
            table = clt.convergence_table(clt.CltProblem(kind, d, ["b"] * n), Ns)
            errs = table.errors()
            ok, why = _ratio_ok(errs)
            notes.append(f"{kind.value}/n={n} errors {[str(e) for e in errs]}")
            if not ok:
                bad.append(f"{kind.value} n={n}: {why}")
            if kind is Kind.TENSOR and n == 4:
                for row in table.rows[:-1]:
                    if row.exact != 3 - Fraction(2, row.N):
                        bad.append(f"tensor n=4 N={row.N}: {row.exact} != 3 - 2/N")
    if bad:
        return False, "; ".join(bad)
    return True, "; ".join(notes)


@check("hypotheses", "hypotheses", 60.0, 7)
def hypotheses():
    d = _bernoulli()
    bad = []
    for kind in Kind:
        for rep in (clt.check_singleton(kind, d, 6), clt.check_spreadability(kind, d, 6)):
            if not rep.passed:
                bad.append(f"{kind.value} {rep.name} failed: {rep.witness}")
    rep = clt.check_spreadability(Kind.MONOTONE, d, 6, order_preserving=False)
    if rep.passed:
        bad.append("monotone showed no non-exchangeability witness")
    else:
        w = rep.witness
        a = moment_of(Kind.MONOTONE, w["sites"], w["labels"], d)
        b = moment_of(Kind.MONOTONE, w["relabeled_sites"], w["labels"], d)
        if a == b:
            bad.append(f"monotone witness does not reproduce: {w}")
    if bad:
        return False, "; ".join(bad)
    w = rep.witness
    return True, (
        f"monotone witness sites {w['sites']} -> {w['relabeled_sites']}: "
        f"{w['value']} vs {w['relabeled_value']}"
    )


@check("qccr", "qccr", 10.0, 8)
def qccr():
    bad = []
    K = 6
    for q in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        m = fock.qccr_build(q, 32)
        rel = fock.qccr_check_relations(m)
        if rel.ccr_interior > 1e-12 or rel.commutation_interior > 1e-12:
            bad.append(f"q={q}: relation residuals {rel.ccr_interior:.2e}, {rel.commutation_interior:.2e}")
        pairs = fock.qccr_projections(m, K)
        pr = fock.projection_report(m, pairs)
        if pr.idempotency > 1e-9 or pr.rank_one_error > 1e-9 or pr.min_gap_eigenvalue < -1e-9:
            bad.append(f"q={q}: projections {pr}")
        rec = fock.qccr_reconstruct_gamma(m, pairs, K)
        if not rec.norm_error <= rec.bound + 1e-9 or rec.isometry_error > 1e-9:
            bad.append(f"q={q}: reconstruction {rec}")
    if bad:
        return False, "; ".join(bad)
    return True, "q in {1/4, 1/2, 3/4}, depth 32, k <= 6"


OPVALUED_SEEDS = range(100)


@check("opvalued", "opvalued", 120.0, 9)
def opvalued_theorem():
    bad = []
    Ns = (2, 4, 8, 16)
    for seed in OPVALUED_SEEDS:
        for n in range(1, 9):
            inst = opvalued.random_instance(seed, n)
            seq = inst.sequence()
            lim = opvalued.opvalued_limit_formula(seq)
            if not opvalued.bequal(opvalued.opvalued_vacuum_moment(seq), lim):
                bad.append(f"seed {seed} n={n}: vacuum moment != limit formula")
            if n % 2:
                continue
            coeffs = opvalued.opvalued_finite_n_coefficients(inst.observables, inst.labels)
            if n == 4:
                errs = [
                    opvalued.opvalued_finite_n_moment(inst.observables, inst.labels, N, coeffs) - lim
                    for N in Ns
                ]
                for idx in range(lim.size):
                    e = [x.flat[idx] for x in errs]
                    if any(e[k] != 2 * e[k + 1] for k in range(3)):
                        bad.append(f"seed {seed} n=4 entry {idx}: errors {e} not proportional to 1/N")
            # error is O(1/N): no N-power above n/2 and the N^(n/2) term is the limit
            exp = opvalued.finite_n_expansion(coeffs, n)
            top = max(exp, default=-1)
            if top > n // 2 or not opvalued.bequal(exp.get(n // 2, lim * 0), lim):
                bad.append(f"seed {seed} n={n}: finite-N expansion does not reach the limit at order 1/N")
        if len(bad) > 5:
            break
    one = opvalued.bmatrix([[1]])
    scalar = opvalued.ObservableBlocks("b", opvalued.bmatrix([[0]]), one, one, opvalued.bmatrix([[0]]))
    for n in range(1, 13):
        want = oracles.boolean_moment(n)
        seq = [scalar] * n
        for got in (opvalued.opvalued_limit_formula(seq), opvalued.opvalued_vacuum_moment(seq)):
            if got[0, 0] != want:
                bad.append(f"d=1 n={n}: {got[0, 0]} != {want}")
    if bad:
        return False, "; ".join(bad[:6])
    return True, f"{len(OPVALUED_SEEDS)} seeded M_2 instances, n <= 8; d = 1 gives the boolean moments"


@check("partitions", "partitions", 30.0, 10)
def partition_counts():
    bad = []
    for n in range(0, 13, 2):
        pps = P.pair_partitions(n)
        brute = oracles.matchings_bitmask(n)
        if len(pps) != oracles.double_factorial(n - 1) or {frozenset(p.pairs) for p in pps} != brute:
            bad.append(f"pairings n={n}: {len(pps)} vs {len(brute)}")
        nc = sum(P.is_noncrossing(p) for p in pps)
        if nc != oracles.catalan(n) or nc != oracles.dyck_words(n):
            bad.append(f"noncrossing n={n}: {nc} vs {oracles.catalan(n)}")
    for n in range(1, 9):
        c = sum(1 for _ in P.iter_ordered_set_partitions(n))
        if c != oracles.fubini(n):
            bad.append(f"ordered partitions n={n}: {c} vs {oracles.fubini(n)}")
    census = [0] * 4
    for p in P.iter_pair_partitions(6):
        census[P.crossing_number(p)] += 1
    if census != [5, 6, 3, 1] or census != oracles.crossing_census(6):
        bad.append(f"crossing census n=6: {census}")
    if bad:
        return False, "; ".join(bad)
    return True, "pairings n<=12, ordered partitions n<=8, crossing census (5, 6, 3, 1)"


def select(only: Iterable[str] | None = None) -> list[Check]:
    if not only:
        return list(CHECKS)
    wanted = set(only)
    unknown = wanted - {c.name for c in CHECKS} - {c.group for c in CHECKS}
    if unknown:
        raise KeyError(f"unknown check(s): {sorted(unknown)}")
    return [c for c in CHECKS if c.name in wanted or c.group in wanted]


def run_check(c: Check) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = c.func()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if ok and dt > c.budget:
        ok, detail = False, f"over budget: {dt:.2f}s > {c.budget}s; " + detail
    return CheckResult(c.name, c.group, ok, dt, c.budget, detail)


def run_checks(only: Iterable[str] | None = None, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    results = []
    for c in select(only):
        r = run_check(c)
        if echo:
            echo(r.line())
        results.append(r)
    return results
