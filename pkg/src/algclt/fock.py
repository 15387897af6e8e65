"""Fock-type oracles for the CLT limits, and a numerical lab for the q^2-CCR.

Vacuum moments ``<Omega, (a* + a)^n Omega>`` are sums over Dyck paths of the
product of the ladder weights at every down-step, which keeps everything
exact (the square-root amplitudes pair up into the integer weights).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .scalars import QPoly, as_fraction


class Flavor(str, enum.Enum):
    FULL = "full"
    BOSON = "boson"
    BOOLEAN = "boolean"
    QFOCK = "q"


@dataclass(frozen=True)
class LadderSpec:
    """Level-indexed down-step weights of a truncated Fock space.

    ``q=None`` keeps the q-Fock weights as polynomials in a formal ``q``.
    """

    flavor: Flavor
    q: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        if self.q is not None:
            object.__setattr__(self, "q", as_fraction(self.q))

    def down_weight(self, k: int):
        """Weight ``||a e_k||^2 / ||e_{k-1}||^2`` of stepping from level ``k`` to ``k - 1``."""
        if k < 1:
            raise ValueError("levels start at 1 for down-steps")
        if self.flavor is Flavor.FULL:
            return 1
        if self.flavor is Flavor.BOSON:
            return k
        if self.flavor is Flavor.BOOLEAN:
            return 1 if k == 1 else 0
        qk = QPoly.q_integer(k)
        return qk if self.q is None else qk(self.q)


def dyck_paths(n: int) -> Iterator[tuple[int, ...]]:
    """Step sequences in ``{+1, -1}`` of length ``n`` from level 0 to 0 that never go negative."""

    def rec(path, level):
        left = n - len(path)
        if left == 0:
            if level == 0:
                yield tuple(path)
            return
        if level + 1 <= left - 1:
            path.append(1)
            yield from rec(path, level + 1)
            path.pop()
        if level > 0:
            path.append(-1)
            yield from rec(path, level - 1)
            path.pop()

    if n % 2 == 0 and n >= 0:
        yield from rec([], 0)


def path_weight(spec: LadderSpec, path) -> object:
    w, level = 1, 0
    for step in path:
        if step < 0:
            w = w * spec.down_weight(level)
        level += step
    return w


def vacuum_moment(spec: LadderSpec, n: int):
    """``<Omega, (a* + a)^n Omega>`` as an exact integer, rational, or :class:`QPoly`.

    Computed by a transfer recursion over (step, level); the truncation at
    level ``n`` is exact because an ``n``-step walk from 0 cannot go higher.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n % 2:
        return QPoly() if spec.flavor is Flavor.QFOCK and spec.q is None else 0
    # amplitude[k] = weighted number of walks ending at level k
    amp: dict[int, object] = {0: 1}
    for step in range(n):
        remaining = n - step - 1
        nxt: dict[int, object] = {}
        for k, a in amp.items():
            if k + 1 <= remaining:
                nxt[k + 1] = nxt.get(k + 1, 0) + a
            if k > 0:
                w = spec.down_weight(k)
                if w != 0:
                    nxt[k - 1] = nxt.get(k - 1, 0) + a * w
        amp = nxt
    return amp.get(0, 0)


def ladder_matrices(spec: LadderSpec, depth: int) -> np.ndarray:
    """Float creation matrix ``a*`` with ``a* e_k = sqrt(w(k+1)) e_{k+1}`` on levels ``0..depth-1``."""
    if spec.flavor is Flavor.QFOCK and spec.q is None:
        raise ValueError("a numeric q is needed for the matrix representation")
    A = np.zeros((depth, depth))
    for k in range(depth - 1):
        A[k + 1, k] = np.sqrt(float(spec.down_weight(k + 1)))
    return A


def vacuum_moment_matrix(spec: LadderSpec, n: int) -> float:
    """Float cross-check: ``(a* + a)^n`` on the space truncated at level ``n``."""
    A = ladder_matrices(spec, n + 2)
    X = A + A.T
    v = np.zeros(n + 2)
    v[0] = 1.0
    return float(v @ np.linalg.matrix_power(X, n) @ v)


class IllConditionedError(RuntimeError):
    pass


@dataclass(frozen=True)
class QccrModel:
    q: float
    depth: int
    alpha: np.ndarray
    alpha_star: np.ndarray
    gamma: np.ndarray

    def weight(self, k: int) -> float:
        """``sqrt(1 - q^(2(k+1)))``, the amplitude of ``alpha*`` from level ``k`` to ``k+1``."""
        return float(np.sqrt(1.0 - self.q ** (2 * (k + 1))))


def qccr_build(q, depth: int) -> QccrModel:
    """Canonical model: ``alpha*`` is the weighted right shift with weights ``sqrt(1 - q^(2(k+1)))``."""
    q = float(as_fraction(q)) if not isinstance(q, float) else q
    if not abs(q) < 1:
        raise ValueError(f"q must satisfy |q| < 1, got {q}")
    if depth < 4:
        raise ValueError("depth must be at least 4")
    astar = np.zeros((depth, depth))
    for k in range(depth - 1):
        astar[k + 1, k] = np.sqrt(1.0 - q ** (2 * (k + 1)))
    alpha = astar.T.copy()
    gamma = np.eye(depth) - astar @ alpha
    for m in (alpha, astar, gamma):
        m.flags.writeable = False
    return QccrModel(q, depth, alpha, astar, gamma)


@dataclass
class RelationReport:
    ccr_interior: float
    commutation_interior: float
    ccr_boundary: float
    expected_boundary: float
    alpha_norm: float
    gamma_norm: float


def qccr_check_relations(m: QccrModel) -> RelationReport:
    """Residuals of ``alpha alpha* - q^2 alpha* alpha = 1 - q^2`` and ``alpha Gamma = q^2 Gamma alpha``.

    Interior residuals exclude the last row and column, where truncation
    removes the top level's outgoing ``alpha*``.
    """
    q2 = m.q**2
    D = m.depth
    ccr = m.alpha @ m.alpha_star - q2 * (m.alpha_star @ m.alpha) - (1 - q2) * np.eye(D)
    comm = m.alpha @ m.gamma - q2 * (m.gamma @ m.alpha)
    inner = slice(0, D - 1)
    return RelationReport(
        ccr_interior=float(np.abs(ccr[inner, inner]).max()),
        commutation_interior=float(np.abs(comm[inner, inner]).max()),
        ccr_boundary=float(np.abs(ccr[D - 1]).max()),
        expected_boundary=1 - q2**D,
        alpha_norm=float(np.linalg.norm(m.alpha, 2)),
        gamma_norm=float(np.linalg.norm(m.gamma, 2)),
    )


def _inverse_solve(M: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if np.linalg.cond(M) > 1e12:
        raise IllConditionedError("1 - q^(2j) Gamma is numerically singular")
    return np.linalg.solve(M, Y)


def _inverse_neumann(c: float, G: np.ndarray, Y: np.ndarray) -> np.ndarray:
    # (1 - cG)^(-1) Y = sum_n (cG)^n Y
    out = Y.copy()
    term = Y.copy()
    for _ in range(10_000):
        term = c * (G @ term)
        out += term
        if np.abs(term).max() < 1e-18:
            return out
    raise IllConditionedError("Neumann series did not converge")


def qccr_projection(m: QccrModel, k: int, method: str = "solve") -> np.ndarray:
    """``P_k = alpha*^k (1 - q^2 Gamma)^(-1) ... (1 - q^(2k) Gamma)^(-1) alpha^k``; ``P_0 = 1``."""
    D = m.depth
    if k == 0:
        return np.eye(D)
    Y = np.linalg.matrix_power(m.alpha, k)
    for i in range(k, 0, -1):
        c = m.q ** (2 * i)
        if method == "solve":
            Y = _inverse_solve(np.eye(D) - c * m.gamma, Y)
        elif method == "neumann":
            Y = _inverse_neumann(c, m.gamma, Y)
        else:
            raise ValueError(f"unknown method {method!r}")
    return np.linalg.matrix_power(m.alpha_star, k) @ Y


def qccr_projections(m: QccrModel, k_max: int, method: str = "solve") -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairs ``(P_k, E_k)`` for ``k = 0..k_max`` with ``E_k = P_k - P_{k+1}``."""
    if k_max + 2 > m.depth // 2:
        raise ValueError(f"k_max={k_max} leaves no room below the truncation at depth {m.depth}")
    Ps = [qccr_projection(m, k, method) for k in range(k_max + 2)]
    return [(Ps[k], Ps[k] - Ps[k + 1]) for k in range(k_max + 1)]


@dataclass
class ProjectionReport:
    idempotency: float
    min_gap_eigenvalue: float
    rank_one_error: float
    orthogonality: float


def projection_report(m: QccrModel, pairs) -> ProjectionReport:
    """Idempotency of ``P_k``, positivity of ``P_k - P_{k+1}``, ``E_k`` against ``e_k e_k*``, and mutual orthogonality."""
    D = m.depth
    idem = max(np.abs(P @ P - P).max() for P, _ in pairs)
    gap = min(np.linalg.eigvalsh((E + E.T) / 2).min() for _, E in pairs)
    rank1 = 0.0
    for k, (_, E) in enumerate(pairs):
        target = np.zeros((D, D))
        target[k, k] = 1.0
        rank1 = max(rank1, np.abs(E - target).max())
    orth = 0.0
    for k, (_, Ek) in enumerate(pairs):
        for l, (_, El) in enumerate(pairs):
            if k != l:
                orth = max(orth, np.linalg.norm(Ek @ El, 2))
    return ProjectionReport(float(idem), float(gap), float(rank1), float(orth))


@dataclass
class ReconstructionReport:
    norm_error: float
    bound: float
    isometry_error: float

    @property
    def ok(self) -> bool:
        return self.norm_error <= self.bound + 1e-9 and self.isometry_error <= 1e-9


def qccr_reconstruct_gamma(m: QccrModel, E_list, K: int) -> ReconstructionReport:
    """Norm distance between ``Gamma`` and ``sum_{k<=K} q^(2k) E_k`` on the interior block.

    Also measures how far ``alpha* / sqrt(1 - q^(2(k+1)))`` is from an
    isometry of ``E_k H`` onto ``E_{k+1} H`` for ``k < K``.
    """
    D = m.depth
    E_list = [e[1] if isinstance(e, tuple) else e for e in E_list][: K + 1]
    S = sum(m.q ** (2 * k) * E for k, E in enumerate(E_list))
    inner = slice(0, D - 1)
    err = float(np.linalg.norm((m.gamma - S)[inner, inner], 2))
    iso = 0.0
    for k in range(min(K, len(E_list) - 1)):
        V = m.alpha_star @ E_list[k] / m.weight(k)
        iso = max(
            iso,
            np.abs(V.T @ V - E_list[k]).max(),
            np.abs(E_list[k + 1] @ V - V).max(),
        )
    return ReconstructionReport(err, m.q ** (2 * (K + 1)), float(iso))
