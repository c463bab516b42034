"""Numeric side of the model: parameters, covariance map, trek rule, recovery, Jacobian rank.

Matrices are ``n x n`` numpy arrays indexed from zero, so vertex ``v`` is row
``v - 1``. ``Lambda[u-1, w-1]`` is the coefficient of the edge ``u -> w`` and
``Sigma = (I - Lambda)^{-T} Omega (I - Lambda)^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_triangular

from .errors import (
    InstanceTooLargeError,
    NumericFailure,
    SingularSystemError,
    UnsupportedCertificatePhaseError,
)
from .graph import MixedGraph, half_trek_reachable
from .identify import Certificate


@dataclass(frozen=True)
class Parameters:
    Lambda: NDArray[np.float64]
    Omega: NDArray[np.float64]

    def check(self, G: MixedGraph, atol: float = 0.0) -> None:
        """Raise ``ValueError`` unless the matrices respect the support of ``G``."""
        n = G.n
        if self.Lambda.shape != (n, n) or self.Omega.shape != (n, n):
            raise ValueError(f"expected {n}x{n} matrices")
        d_mask = directed_mask(G)
        if np.any(np.abs(self.Lambda[~d_mask]) > atol):
            raise ValueError("Lambda has entries off the directed edge set")
        b_mask = bidirected_mask(G) | np.eye(n, dtype=bool)
        if np.any(np.abs(self.Omega[~b_mask]) > atol):
            raise ValueError("Omega has entries off the bidirected edge set")
        if not np.allclose(self.Omega, self.Omega.T, rtol=0, atol=max(atol, 1e-12)):
            raise ValueError("Omega is not symmetric")
        try:
            np.linalg.cholesky(self.Omega)
        except np.linalg.LinAlgError:
            raise ValueError("Omega is not positive definite") from None


def directed_mask(G: MixedGraph) -> NDArray[np.bool_]:
    mask = np.zeros((G.n, G.n), dtype=bool)
    for u, w in G.directed:
        mask[u - 1, w - 1] = True
    return mask


def bidirected_mask(G: MixedGraph) -> NDArray[np.bool_]:
    mask = np.zeros((G.n, G.n), dtype=bool)
    for u, w in G.bidirected:
        mask[u - 1, w - 1] = mask[w - 1, u - 1] = True
    return mask


def sample_parameters(
    G: MixedGraph,
    rng: np.random.Generator,
    lambda_range: tuple[float, float] = (0.5, 1.5),
    omega_range: tuple[float, float] = (0.2, 0.8),
    diagonal_margin: tuple[float, float] = (1.0, 2.0),
) -> Parameters:
    """Random parameters supported on ``G``.

    Edge coefficients have uniformly random magnitude in ``lambda_range`` and a
    random sign; off-diagonal error covariances likewise from ``omega_range``.
    Each diagonal entry is its row's absolute off-diagonal sum plus a uniform
    draw from ``diagonal_margin``, which makes ``Omega`` diagonally dominant.
    """
    n = G.n
    Lambda = np.zeros((n, n))
    directed = sorted(G.directed)
    if directed:
        mags = rng.uniform(*lambda_range, size=len(directed))
        signs = rng.choice([-1.0, 1.0], size=len(directed))
        for (u, w), val in zip(directed, mags * signs):
            Lambda[u - 1, w - 1] = val
    Omega = np.zeros((n, n))
    bidirected = sorted(G.bidirected)
    if bidirected:
        mags = rng.uniform(*omega_range, size=len(bidirected))
        signs = rng.choice([-1.0, 1.0], size=len(bidirected))
        for (u, w), val in zip(bidirected, mags * signs):
            Omega[u - 1, w - 1] = Omega[w - 1, u - 1] = val
    margin = rng.uniform(*diagonal_margin, size=n)
    Omega[np.diag_indices(n)] = np.abs(Omega).sum(axis=1) + margin
    return Parameters(Lambda, Omega)


def _topological_permutation(Lambda: NDArray) -> NDArray[np.intp]:
    n = Lambda.shape[0]
    support = Lambda != 0
    indeg = support.sum(axis=0)
    order = []
    ready = sorted(np.flatnonzero(indeg == 0).tolist())
    while ready:
        u = ready.pop(0)
        order.append(u)
        for w in np.flatnonzero(support[u]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(int(w))
        ready.sort()
    if len(order) != n:
        raise NumericFailure("support of Lambda is cyclic")
    return np.array(order, dtype=np.intp)


def _unit_triangular(Lambda: NDArray) -> tuple[NDArray, NDArray[np.intp]]:
    """``I - Lambda`` permuted to unit upper triangular form, and the permutation."""
    perm = _topological_permutation(Lambda)
    n = Lambda.shape[0]
    M = np.eye(n) - Lambda[np.ix_(perm, perm)]
    return M, perm


def covariance(params: Parameters) -> NDArray[np.float64]:
    """``Sigma = (I - Lambda)^{-T} Omega (I - Lambda)^{-1}`` via triangular solves."""
    M, perm = _unit_triangular(params.Lambda)
    Om = params.Omega[np.ix_(perm, perm)]
    X = solve_triangular(M, Om, trans="T", lower=False, unit_diagonal=True)
    Sp = solve_triangular(M, X.T, trans="T", lower=False, unit_diagonal=True).T
    Sp = (Sp + Sp.T) / 2
    Sigma = np.empty_like(Sp)
    Sigma[np.ix_(perm, perm)] = Sp
    try:
        np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError:
        raise NumericFailure("covariance matrix is not positive definite") from None
    return Sigma


def _total_effects(Lambda: NDArray) -> NDArray[np.float64]:
    """``K = (I - Lambda)^{-1}`` by a unit triangular solve."""
    M, perm = _unit_triangular(Lambda)
    n = Lambda.shape[0]
    Kp = solve_triangular(M, np.eye(n), lower=False, unit_diagonal=True)
    K = np.empty_like(Kp)
    K[np.ix_(perm, perm)] = Kp
    return K


# -- trek rule -----------------------------------------------------------------


@dataclass(frozen=True)
class Trek:
    """A trek from ``left[-1]`` to ``right[-1]``.

    ``left`` and ``right`` are directed paths read away from the top. Without
    a bridge they share their first vertex, the top node; with a bridge their
    first vertices are joined by a bidirected edge.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]
    bridge: bool

    @property
    def source(self) -> int:
        return self.left[-1]

    @property
    def target(self) -> int:
        return self.right[-1]

    def monomial(self, params: Parameters) -> float:
        L, O = params.Lambda, params.Omega  # noqa: E741
        a, b = self.left[0], self.right[0]
        value = O[a - 1, b - 1]
        for path in (self.left, self.right):
            for x, y in zip(path, path[1:]):
                value *= L[x - 1, y - 1]
        return float(value)

    def __str__(self) -> str:
        left = "<-".join(map(str, reversed(self.left)))
        right = "->".join(map(str, self.right))
        if self.bridge:
            return f"{left}<->{right}"
        return left + "".join(f"->{x}" for x in self.right[1:])


def _paths_by_end(G: MixedGraph) -> dict[int, dict[int, list[tuple[int, ...]]]]:
    """``paths[z][v]``: all directed paths from ``z`` to ``v``, the empty path included."""
    out: dict[int, dict[int, list[tuple[int, ...]]]] = {}
    for z in G.vertices:
        by_end: dict[int, list[tuple[int, ...]]] = {}
        stack = [(z,)]
        while stack:
            path = stack.pop()
            by_end.setdefault(path[-1], []).append(path)
            for w in sorted(G._ch[path[-1]], reverse=True):
                stack.append((*path, w))
        out[z] = by_end
    return out


def _check_size(G: MixedGraph, max_vertices: int) -> None:
    if G.n > max_vertices:
        raise InstanceTooLargeError(f"trek enumeration limited to {max_vertices} vertices, got {G.n}")


def _treks(G, paths, v, w):
    out = []
    for z in G.vertices:
        for left, right in product(paths[z].get(v, ()), paths[z].get(w, ())):
            out.append(Trek(left, right, False))
    for a, b in sorted(G.bidirected):
        for x, y in ((a, b), (b, a)):
            for left, right in product(paths[x].get(v, ()), paths[y].get(w, ())):
                out.append(Trek(left, right, True))
    return out


def enumerate_treks(G: MixedGraph, v: int, w: int, max_vertices: int = 10) -> list[Trek]:
    """All treks from ``v`` to ``w``."""
    _check_size(G, max_vertices)
    G.check_vertex(v)
    G.check_vertex(w)
    return _treks(G, _paths_by_end(G), v, w)


def trek_rule_covariance(G: MixedGraph, params: Parameters, max_vertices: int = 10) -> NDArray[np.float64]:
    """Covariance matrix as a sum of trek monomials over enumerated treks."""
    _check_size(G, max_vertices)
    paths = _paths_by_end(G)
    Sigma = np.zeros((G.n, G.n))
    for v in G.vertices:
        for w in range(v, G.n + 1):
            total = sum(t.monomial(params) for t in _treks(G, paths, v, w))
            Sigma[v - 1, w - 1] = Sigma[w - 1, v - 1] = total
    return Sigma


# -- recovery ------------------------------------------------------------------


def recover_parameters(
    G: MixedGraph, Sigma: NDArray, cert: Certificate, max_condition: float = 1e12
) -> Parameters:
    """Recover ``(Lambda, Omega)`` from ``Sigma`` by replaying a certificate.

    For each step with target ``v`` and half-trek sources ``y_1..y_m`` the
    linear system ``A lambda_{pa(v), v} = b`` is solved, where row ``i`` uses
    ``[(I - Lambda)^T Sigma]`` if ``y_i`` is half-trek reachable from ``v`` and
    ``Sigma`` otherwise. This needs the edge coefficients into every reachable
    source already, so steps relying on a component-level source that is
    still unsolved in ``G`` raise :class:`UnsupportedCertificatePhaseError`.
    """
    n = G.n
    Sigma = np.asarray(Sigma, dtype=float)
    Lambda = np.zeros((n, n))
    known = set(G.sources())
    for step in cert.steps:
        v = step.v
        pa = sorted(G.parents(v))
        ys = sorted(step.system.sources)
        if len(ys) != len(pa) or step.system.targets != frozenset(pa):
            raise ValueError(f"certificate step for vertex {v} does not target pa({v})")
        if set(ys) & (G.siblings(v) | {v}):
            raise UnsupportedCertificatePhaseError(
                f"vertex {v}: system sources include the vertex or a sibling in the full graph"
            )
        htr = half_trek_reachable(G, v)
        pending = [y for y in ys if y in htr and y not in known]
        if pending:
            raise UnsupportedCertificatePhaseError(
                f"vertex {v} ({step.phase}): sources {pending} are half-trek reachable "
                "but not yet recovered in the full graph"
            )
        rows = np.empty((len(ys), n))
        for i, y in enumerate(ys):
            rows[i] = Sigma[y - 1]
            if y in htr:
                rows[i] -= Lambda[:, y - 1] @ Sigma
        cols = [p - 1 for p in pa]
        A = rows[:, cols]
        b = rows[:, v - 1]
        if np.linalg.cond(A) > max_condition:
            raise SingularSystemError(f"vertex {v}: recovery system is numerically singular")
        Lambda[cols, v - 1] = np.linalg.solve(A, b)
        known.add(v)
    missing = set(G.vertices) - known
    if missing:
        raise ValueError(f"certificate leaves vertices {sorted(missing)} unsolved")
    IL = np.eye(n) - Lambda
    Omega = IL.T @ Sigma @ IL
    return Parameters(Lambda, (Omega + Omega.T) / 2)


# -- Jacobian ------------------------------------------------------------------


def parameter_index(G: MixedGraph) -> list[tuple[str, int, int]]:
    """Free parameters in Jacobian column order: edges, then error covariances, then variances."""
    cols = [("lambda", u, w) for u, w in sorted(G.directed)]
    cols += [("omega", u, w) for u, w in sorted(G.bidirected)]
    cols += [("omega", v, v) for v in G.vertices]
    return cols


def params_to_vector(G: MixedGraph, params: Parameters) -> NDArray[np.float64]:
    return np.array(
        [(params.Lambda if kind == "lambda" else params.Omega)[u - 1, w - 1] for kind, u, w in parameter_index(G)]
    )


def vector_to_params(G: MixedGraph, theta: NDArray) -> Parameters:
    n = G.n
    Lambda = np.zeros((n, n))
    Omega = np.zeros((n, n))
    for (kind, u, w), val in zip(parameter_index(G), theta):
        if kind == "lambda":
            Lambda[u - 1, w - 1] = val
        else:
            Omega[u - 1, w - 1] = Omega[w - 1, u - 1] = val
    return Parameters(Lambda, Omega)


def _vech(S: NDArray) -> NDArray:
    return S[np.triu_indices(S.shape[0])]


def jacobian(G: MixedGraph, params: Parameters) -> NDArray[np.float64]:
    """Analytic Jacobian of the upper triangle of ``Sigma`` in the free parameters.

    With ``K = (I - Lambda)^{-1}``, a change ``E`` in ``Lambda`` moves Sigma by
    ``Sigma E K + (Sigma E K)^T`` and a change ``F`` in ``Omega`` by ``K^T F K``.
    """
    Sigma = covariance(params)
    K = _total_effects(params.Lambda)
    cols = []
    for kind, u, w in parameter_index(G):
        if kind == "lambda":
            D = np.outer(Sigma[:, u - 1], K[w - 1])
            D = D + D.T
        elif u == w:
            D = np.outer(K[u - 1], K[u - 1])
        else:
            D = np.outer(K[u - 1], K[w - 1])
            D = D + D.T
        cols.append(_vech(D))
    if not cols:
        return np.zeros((G.n * (G.n + 1) // 2, 0))
    return np.column_stack(cols)


def numeric_jacobian(G: MixedGraph, params: Parameters, step: float = 1e-6) -> NDArray[np.float64]:
    """Central finite-difference Jacobian, column order as :func:`jacobian`."""
    theta = params_to_vector(G, params)
    cols = []
    for i in range(len(theta)):
        hi, lo = theta.copy(), theta.copy()
        hi[i] += step
        lo[i] -= step
        diff = _vech(covariance(vector_to_params(G, hi))) - _vech(covariance(vector_to_params(G, lo)))
        cols.append(diff / (2 * step))
    if not cols:
        return np.zeros((G.n * (G.n + 1) // 2, 0))
    return np.column_stack(cols)


def jacobian_fd_error(G: MixedGraph, params: Parameters, step: float = 1e-6) -> float:
    """Largest per-column relative difference between analytic and finite-difference Jacobians."""
    J = jacobian(G, params)
    F = numeric_jacobian(G, params, step)
    if J.shape[1] == 0:
        return 0.0
    scale = np.maximum(np.abs(J).max(axis=0), np.finfo(float).tiny)
    return float((np.abs(J - F).max(axis=0) / scale).max())


@dataclass(frozen=True)
class JacobianRank:
    rank: int
    n_params: int
    target_dim: int
    singular_values: NDArray[np.float64]

    @property
    def full(self) -> bool:
        return self.rank == self.n_params


def jacobian_rank(G: MixedGraph, params: Parameters, rel_tol: float = 1e-9) -> JacobianRank:
    """Numerical rank with threshold ``sigma_max * rel_tol * max(J.shape)``."""
    J = jacobian(G, params)
    if not np.all(np.isfinite(J)):
        raise NumericFailure("non-finite Jacobian entries")
    n_params = J.shape[1]
    target = G.n * (G.n + 1) // 2
    if n_params == 0:
        return JacobianRank(0, 0, target, np.zeros(0))
    sv = np.linalg.svd(J, compute_uv=False)
    tol = sv[0] * rel_tol * max(J.shape)
    return JacobianRank(int(np.sum(sv > tol)), n_params, target, sv)


def generic_jacobian_rank(G: MixedGraph, rng: np.random.Generator, draws: int = 3) -> JacobianRank:
    """Largest Jacobian rank over up to ``draws`` random parameter points.

    The generic rank is the maximum over points, so sampling stops as soon as
    the rank is full.
    """
    best = None
    for _ in range(draws):
        r = jacobian_rank(G, sample_parameters(G, rng))
        if best is None or r.rank > best.rank:
            best = r
        if best.full:
            break
    return best
