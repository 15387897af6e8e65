"""Boolean CLT with amalgamation over ``B = M_d``.

An observable acts on the GNS module ``B + E`` (``E = B^m``) by the block matrix

    [[alpha, beta*],
     [gamma, delta ]]

with ``alpha`` in ``B``, ``beta, gamma`` in ``E`` and ``delta`` acting on ``E``.
Everything is stored as exact object arrays: an element of ``B`` is a
``d x d`` array, an element of ``E`` is an ``(m d) x d`` column of ``m``
such blocks, and an operator on ``B + E`` is a ``((1+m) d)``-square array.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Mapping, Sequence

import numpy as np

from . import partitions as P
from .moments import MissingMomentError, SiteDistribution
from .scalars import RootNScaled, gauss, parse_scalar

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionMismatch(ValueError):
    pass


def bzeros(rows: int, cols: int) -> np.ndarray:
    return np.full((rows, cols), ZERO, dtype=object)


def beye(d: int) -> np.ndarray:
    out = bzeros(d, d)
    for i in range(d):
        out[i, i] = ONE
    return out


def bmatrix(rows) -> np.ndarray:
    """Exact object array from nested rows of ints, Fractions or strings like ``"1/3"`` / ``"1+2i"``."""
    arr = np.array([[parse_scalar(x) for x in row] for row in rows], dtype=object)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d nested sequence")
    return arr


def badjoint(M: np.ndarray) -> np.ndarray:
    return np.conjugate(M).T


def bequal(A: np.ndarray, B: np.ndarray) -> bool:
    return A.shape == B.shape and all(a == b for a, b in zip(A.flat, B.flat))


def inner(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``<x, y> = sum_i x_i* y_i`` for ``x, y`` in ``B^m``."""
    if x.shape != y.shape:
        raise DimensionMismatch(f"vectors of shapes {x.shape} and {y.shape}")
    return badjoint(x) @ y


@dataclass(frozen=True)
class BlockOperator:
    """Operator on ``B + B^m``, stored as one ``((1+m) d)``-square exact array."""

    matrix: np.ndarray
    d: int
    m: int

    def block(self, i: int, j: int) -> np.ndarray:
        d = self.d
        return self.matrix[i * d:(i + 1) * d, j * d:(j + 1) * d]

    def vacuum(self) -> np.ndarray:
        """``<omega, T omega>``: the upper-left ``d x d`` block."""
        return self.block(0, 0)

    def _check(self, other):
        if (self.d, self.m) != (other.d, other.m):
            raise DimensionMismatch(f"(d, m) = {(self.d, self.m)} vs {(other.d, other.m)}")

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        return BlockOperator(self.matrix @ other.matrix, self.d, self.m)

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        return BlockOperator(self.matrix + other.matrix, self.d, self.m)

    def adjoint(self) -> "BlockOperator":
        return BlockOperator(badjoint(self.matrix), self.d, self.m)

    @classmethod
    def identity(cls, d: int, m: int) -> "BlockOperator":
        return cls(beye((1 + m) * d), d, m)


def _vector_dims(x: np.ndarray) -> tuple[int, int]:
    rows, d = x.shape
    if rows % d:
        raise DimensionMismatch(f"vector of shape {x.shape} is not a column of {d}x{d} blocks")
    return d, rows // d


def creator(x: np.ndarray) -> BlockOperator:
    """``a*(x)``: maps ``omega b`` to ``x b`` and kills ``E``."""
    d, m = _vector_dims(x)
    M = bzeros((1 + m) * d, (1 + m) * d)
    M[d:, :d] = x
    return BlockOperator(M, d, m)


def annihilator(x: np.ndarray) -> BlockOperator:
    return creator(x).adjoint()


@dataclass(frozen=True)
class ObservableBlocks:
    label: str
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        d = self.alpha.shape[0]
        if self.alpha.shape != (d, d):
            raise DimensionMismatch("alpha must be square")
        if self.beta.shape != self.gamma.shape or self.beta.shape[1] != d:
            raise DimensionMismatch("beta and gamma must both be (m d) x d")
        md = self.beta.shape[0]
        if md % d or self.delta.shape != (md, md):
            raise DimensionMismatch("delta must be (m d) x (m d)")

    @property
    def d(self) -> int:
        return self.alpha.shape[0]

    @property
    def m(self) -> int:
        return self.beta.shape[0] // self.d

    @property
    def centered(self) -> bool:
        return all(x == 0 for x in self.alpha.flat)

    def full(self) -> BlockOperator:
        d, m = self.d, self.m
        M = bzeros((1 + m) * d, (1 + m) * d)
        M[:d, :d] = self.alpha
        M[:d, d:] = badjoint(self.beta)
        M[d:, :d] = self.gamma
        M[d:, d:] = self.delta
        return BlockOperator(M, d, m)

    def limit_operator(self) -> BlockOperator:
        """``a*(gamma) + a(beta)`` on the boolean Fock module."""
        return creator(self.gamma) + annihilator(self.beta)

    def adjoint(self, label: str) -> "ObservableBlocks":
        return ObservableBlocks(
            label, badjoint(self.alpha), self.gamma.copy(), self.beta.copy(), badjoint(self.delta)
        )


def _check_sequence(obs: Sequence[ObservableBlocks], require_centered: bool = True):
    if not obs:
        return None
    dims = {(o.d, o.m) for o in obs}
    if len(dims) > 1:
        raise DimensionMismatch(f"observables with differing (d, m): {sorted(dims)}")
    if require_centered:
        for o in obs:
            if not o.centered:
                raise ValueError(f"observable {o.label!r} is not centered (alpha != 0)")
    return dims.pop()


def opvalued_limit_formula(obs: Sequence[ObservableBlocks], d: int | None = None) -> np.ndarray:
    """``<beta_1, gamma_2> <beta_3, gamma_4> ... <beta_{n-1}, gamma_n>``, or zero for odd ``n``."""
    dims = _check_sequence(obs)
    if dims is None:
        if d is None:
            raise ValueError("d is required for an empty sequence")
        return beye(d)
    d = dims[0]
    n = len(obs)
    if n % 2:
        return bzeros(d, d)
    out = beye(d)
    for k in range(0, n, 2):
        out = out @ inner(obs[k].beta, obs[k + 1].gamma)
    return out


def opvalued_vacuum_moment(obs: Sequence[ObservableBlocks]) -> np.ndarray:
    """``<omega, (a*(gamma_1) + a(beta_1)) ... (a*(gamma_n) + a(beta_n)) omega>``."""
    dims = _check_sequence(obs)
    if dims is None:
        raise ValueError("empty observable sequence")
    T = BlockOperator.identity(*dims)
    for o in obs:
        T = T @ o.limit_operator()
    return T.vacuum()


def single_site_word_moment(obs: Sequence[ObservableBlocks]) -> np.ndarray:
    """``Phi_0(b_1 ... b_n)``: vacuum block of the product of the full block actions."""
    dims = _check_sequence(obs, require_centered=False)
    if dims is None:
        raise ValueError("empty observable sequence")
    T = BlockOperator.identity(*dims)
    for o in obs:
        T = T @ o.full()
    return T.vacuum()


def runs_of(pattern: Sequence[int]) -> tuple[int, ...]:
    """Lengths of the maximal constant runs of a site pattern."""
    out = []
    for k, s in enumerate(pattern):
        if k and pattern[k - 1] == s:
            out[-1] += 1
        else:
            out.append(1)
    return tuple(out)


@lru_cache(maxsize=None)
def run_census(n: int) -> dict[tuple[int, ...], dict[int, int]]:
    """For each run-length composition of ``n``: how many ordered set partitions with ``b`` blocks induce it."""
    census: dict[tuple[int, ...], dict[int, int]] = {}
    for osp in P.iter_ordered_set_partitions(n):
        runs = runs_of(osp.site_pattern())
        row = census.setdefault(runs, {})
        row[osp.num_blocks] = row.get(osp.num_blocks, 0) + 1
    return census


def boolean_factorized(obs: Sequence[ObservableBlocks], runs: Sequence[int], segments=None) -> np.ndarray:
    """Product, in order, of the single-site moments of consecutive runs."""
    d = obs[0].d
    out = beye(d)
    k = 0
    for r in runs:
        seg = segments[k, k + r] if segments is not None else single_site_word_moment(obs[k:k + r])
        out = out @ seg
        k += r
    return out


def _segment_moments(obs: Sequence[ObservableBlocks]) -> dict[tuple[int, int], np.ndarray]:
    n = len(obs)
    out = {}
    for i in range(n):
        T = BlockOperator.identity(obs[0].d, obs[0].m)
        for j in range(i, n):
            T = T @ obs[j].full()
            out[i, j + 1] = T.vacuum()
    return out


def opvalued_finite_n_coefficients(
    observables: Mapping[str, ObservableBlocks], labels: Sequence[str]
) -> dict[int, np.ndarray]:
    """``b -> sum over ordered set partitions with b blocks`` of the boolean-factorized moment.

    A pattern's value depends only on its maximal same-site runs, so each run
    structure is evaluated once and multiplied by its partition count.
    """
    obs = [observables[j] for j in labels]
    _check_sequence(obs)
    d = obs[0].d
    segments = _segment_moments(obs)
    coeffs: dict[int, np.ndarray] = {}
    for runs, by_b in run_census(len(obs)).items():
        val = boolean_factorized(obs, runs, segments)
        for b, count in by_b.items():
            coeffs[b] = coeffs.get(b, bzeros(d, d)) + count * val
    return coeffs


def opvalued_finite_n_moment(
    observables: Mapping[str, ObservableBlocks], labels: Sequence[str], N: int, coeffs=None
) -> np.ndarray:
    """``Phi(S_N^(j1) ... S_N^(jn))`` for ``N`` conditionally boolean independent copies.

    Site assignments are grouped by ordered set partitions, each with ``b``
    blocks standing for ``C(N, b)`` assignments. Odd ``n`` entries come back
    as :class:`RootNScaled`. Pass ``coeffs`` from
    :func:`opvalued_finite_n_coefficients` to reuse them across ``N``.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    if coeffs is None:
        coeffs = opvalued_finite_n_coefficients(observables, labels)
    n = len(labels)
    d = observables[labels[0]].d
    total = bzeros(d, d)
    for b, c in coeffs.items():
        total = total + comb(N, b) * c
    scale = Fraction(N) ** (n // 2)
    if n % 2 == 0:
        return total / scale
    out = np.empty((d, d), dtype=object)
    for idx, v in np.ndenumerate(total):
        out[idx] = RootNScaled(v / scale, N)
    return out


def boolean_finite_n_bruteforce(
    observables: Mapping[str, ObservableBlocks], labels: Sequence[str], N: int
) -> np.ndarray:
    """Same quantity summed naively over all ``N^n`` site assignments (small cases only).

    Divided by ``N^(n // 2)``; for odd ``n`` the remaining ``1/sqrt(N)`` is left out.
    """
    from itertools import product

    obs = [observables[j] for j in labels]
    n, d = len(obs), obs[0].d
    total = bzeros(d, d)
    for sites in product(range(N), repeat=n):
        total = total + boolean_factorized(obs, runs_of(sites))
    return total / Fraction(N) ** (n // 2)


def site_distribution(observables: Mapping[str, ObservableBlocks]) -> SiteDistribution:
    """Scalar site distribution ``label-word -> Phi_0`` for ``d = 1``."""
    obs = dict(observables)
    if any(o.d != 1 for o in obs.values()):
        raise DimensionMismatch("a scalar site distribution needs d = 1")

    def lookup(word):
        try:
            return single_site_word_moment([obs[j] for j in word])[0, 0]
        except KeyError as exc:
            raise MissingMomentError(word) from exc

    adjoint = {}
    for j, o in obs.items():
        for k, p in obs.items():
            if (
                bequal(o.gamma, p.beta) and bequal(o.beta, p.gamma)
                and bequal(badjoint(o.alpha), p.alpha) and bequal(badjoint(o.delta), p.delta)
            ):
                adjoint[j] = k
                break
    adjoint = {j: k for j, k in adjoint.items() if adjoint.get(k) == j and j != k}
    return SiteDistribution(lookup, adjoint=adjoint, labels=sorted(obs))


def positivity_witness(obs: Sequence[ObservableBlocks], tol: float = 1e-9) -> float:
    """Smallest eigenvalue of the vacuum block of ``T* T`` for ``T`` the product of full actions.

    A value ``>= -tol`` witnesses positivity of ``Phi_0`` on that word.
    """
    dims = _check_sequence(obs, require_centered=False)
    T = BlockOperator.identity(*dims)
    for o in obs:
        T = T @ o.full()
    V = (T.adjoint() @ T).vacuum()
    Vc = np.array([[complex(x) for x in row] for row in V])
    return float(np.linalg.eigvalsh((Vc + Vc.conj().T) / 2).min())


def _random_rational(rng: random.Random, span: int = 3, max_den: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def _random_entry(rng: random.Random, complex_entries: bool):
    re = _random_rational(rng)
    return gauss(re, _random_rational(rng)) if complex_entries else re


def _random_matrix(rng, rows, cols, complex_entries):
    return np.array(
        [[_random_entry(rng, complex_entries) for _ in range(cols)] for _ in range(rows)], dtype=object
    )


@dataclass
class OpvaluedInstance:
    seed: int
    observables: dict[str, ObservableBlocks]
    labels: tuple[str, ...]

    def sequence(self) -> list[ObservableBlocks]:
        return [self.observables[j] for j in self.labels]


def random_observables(
    rng: random.Random, d: int = 2, m: int = 2, complex_entries: bool = False
) -> dict[str, ObservableBlocks]:
    """Centered observables ``a`` (self-adjoint) and an adjoint pair ``c``, ``c*``."""
    md = m * d
    za = bzeros(d, d)
    beta = _random_matrix(rng, md, d, complex_entries)
    D = _random_matrix(rng, md, md, complex_entries)
    a = ObservableBlocks("a", za, beta, beta.copy(), D + badjoint(D))
    c = ObservableBlocks(
        "c",
        za,
        _random_matrix(rng, md, d, complex_entries),
        _random_matrix(rng, md, d, complex_entries),
        _random_matrix(rng, md, md, complex_entries),
    )
    return {"a": a, "c": c, "c*": c.adjoint("c*")}


def random_instance(
    seed: int, n: int, d: int = 2, m: int = 2, complex_entries: bool = False
) -> OpvaluedInstance:
    rng = random.Random(seed)
    obs = random_observables(rng, d, m, complex_entries)
    labels = tuple(rng.choice(sorted(obs)) for _ in range(n))
    return OpvaluedInstance(seed, obs, labels)


def _binomial_power_basis(b: int) -> list[Fraction]:
    """Coefficients of ``C(N, b)`` as a polynomial in ``N``, lowest degree first."""
    poly = [Fraction(1)]
    for i in range(b):
        nxt = [Fraction(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            nxt[k + 1] += c
            nxt[k] -= i * c
        poly = nxt
    f = Fraction(1, factorial(b))
    return [c * f for c in poly]


def finite_n_expansion(coeffs: Mapping[int, np.ndarray], n: int) -> dict[int, np.ndarray]:
    """``Phi(S_N ...) * N^(n/2)`` written as a polynomial in ``N``: power -> matrix coefficient."""
    out: dict[int, np.ndarray] = {}
    for b, c in coeffs.items():
        for k, w in enumerate(_binomial_power_basis(b)):
            if w:
                out[k] = out[k] + w * c if k in out else w * c
    return {k: v for k, v in sorted(out.items()) if any(x != 0 for x in v.flat)}
