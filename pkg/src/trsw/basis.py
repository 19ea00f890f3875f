"""One-dimensional Gauss-Lobatto-Legendre (GLL) collocation basis.

Nodes are the p+1 roots of (1 - x^2) P_p'(x), weights are the associated
Lobatto quadrature weights 2 / (p (p+1) P_p(x_i)^2).  Collocating on these
nodes gives a diagonal mass matrix and a differentiation matrix satisfying
the summation-by-parts relation W D + (W D)^T = diag(-1, 0, ..., 0, 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NEWTON_TOL = 1e-15
NEWTON_MAXIT = 100


@dataclass(frozen=True)
class ReferenceBasis:
    """Nodes, weights and differentiation matrix for one element direction.

    Arrays are marked read-only; a basis is shared freely between meshes.
    """

    p: int
    nodes: np.ndarray    # (p+1,), ascending in [-1, 1]
    weights: np.ndarray  # (p+1,), positive, sums to 2
    diff: np.ndarray     # (p+1, p+1), D[i, j] = l_j'(x_i)

    @property
    def n(self) -> int:
        return self.p + 1


def legendre_and_derivative(p: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate P_p and P_p' by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    pk_minus = np.ones_like(x)
    if p == 0:
        return pk_minus, np.zeros_like(x)
    pk = x.copy()
    for k in range(2, p + 1):
        pk_minus, pk = pk, ((2 * k - 1) * x * pk - (k - 1) * pk_minus) / k
    # derivative from the standard relation (1-x^2) P_p' = p (P_{p-1} - x P_p)
    denom = 1.0 - x * x
    interior = np.abs(denom) > 1e-14
    dpk = np.where(
        interior,
        p * (pk_minus - x * pk) / np.where(interior, denom, 1.0),
        # endpoint limit: P_p'(+-1) = (+-1)^(p-1) p (p+1) / 2
        np.sign(x) ** (p - 1) * p * (p + 1) / 2.0,
    )
    return pk, dpk


def gll_nodes_weights(p: int) -> tuple[np.ndarray, np.ndarray]:
    """GLL nodes and weights by Newton iteration on (1 - x^2) P_p'(x).

    Chebyshev-Gauss-Lobatto points seed the iteration.  Using the Legendre
    ODE, the Newton update simplifies to x += (1-x^2) P_p'(x) / (p(p+1) P_p(x)).
    """
    if p < 1:
        raise ValueError(f"polynomial order must be >= 1, got {p}")
    nodes = -np.cos(np.pi * np.arange(p + 1) / p)
    if p > 1:
        x = nodes[1:-1].copy()
        for _ in range(NEWTON_MAXIT):
            pk, dpk = legendre_and_derivative(p, x)
            dx = (1.0 - x * x) * dpk / (p * (p + 1) * pk)
            x += dx
            if np.max(np.abs(dx)) < NEWTON_TOL:
                break
        else:
            raise RuntimeError(f"GLL node iteration did not converge for p={p}")
        nodes[1:-1] = x
    nodes[0], nodes[-1] = -1.0, 1.0
    pk, _ = legendre_and_derivative(p, nodes)
    weights = 2.0 / (p * (p + 1) * pk * pk)
    # symmetrize so the +-x pairing is exact in floating point
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def lagrange_diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """Differentiation matrix D[i, j] = l_j'(x_i) from barycentric weights.

    The diagonal is the negated off-diagonal row sum, which keeps row sums
    of D at machine zero (constants differentiate to ~0).
    """
    x = np.asarray(nodes, dtype=float)
    n = x.size
    dx = x[:, None] - x[None, :]
    off = ~np.eye(n, dtype=bool)
    if np.any(np.abs(dx[off]) < 1e-14):
        raise ValueError("degenerate basis: duplicate interpolation nodes")
    np.fill_diagonal(dx, 1.0)
    lam = 1.0 / np.prod(dx, axis=1)  # barycentric weights
    d = (lam[None, :] / lam[:, None]) / dx
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -np.sum(d, axis=1))
    return d


def make_basis(p: int) -> ReferenceBasis:
    nodes, weights = gll_nodes_weights(p)
    diff = lagrange_diff_matrix(nodes)
    for arr in (nodes, weights, diff):
        arr.setflags(write=False)
    return ReferenceBasis(p=p, nodes=nodes, weights=weights, diff=diff)


def lagrange_eval_1d(nodes: np.ndarray, xi: float) -> np.ndarray:
    """Values of the cardinal functions l_j(xi); exact hit returns a unit row."""
    x = np.asarray(nodes, dtype=float)
    diffs = xi - x
    hit = np.abs(diffs) < 1e-15
    if np.any(hit):
        out = np.zeros_like(x)
        out[np.argmax(hit)] = 1.0
        return out
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    lam = 1.0 / np.prod(dx, axis=1)
    terms = lam / diffs
    return terms / np.sum(terms)


def interpolate(basis: ReferenceBasis, values: np.ndarray, xi: float, eta: float) -> float:
    """Evaluate the tensor-product Lagrange interpolant at (xi, eta) in [-1,1]^2.

    `values` is nodal data indexed [i, j] with i the xi direction.
    """
    li = lagrange_eval_1d(basis.nodes, xi)
    lj = lagrange_eval_1d(basis.nodes, eta)
    return float(li @ np.asarray(values) @ lj)
