"""Gauss-Lobatto nodes and Lagrange interpolation on [-1, 1].

Recomputed here rather than imported from the solver; the node set is
fixed by the snapshot's polynomial degree alone.
"""
from __future__ import annotations

import numpy as np


def gll_nodes(p: int) -> np.ndarray:
    """Gauss-Lobatto-Legendre nodes: +-1 plus the roots of P_p'."""
    if p < 1:
        raise ValueError("degree must be >= 1")
    interior = np.polynomial.legendre.Legendre.basis(p).deriv().roots()
    return np.concatenate(([-1.0], np.sort(interior.real), [1.0]))


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def lagrange_rows(nodes: np.ndarray, x) -> np.ndarray:
    """Lagrange basis values at query points, one row per point.

    Barycentric form; queries that land exactly on a node return the
    one-hot row instead of dividing by zero.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = x[:, None] - nodes[None, :]
    hit = d == 0.0
    d = np.where(hit, 1.0, d)
    rows = barycentric_weights(nodes)[None, :] / d
    rows /= rows.sum(axis=1, keepdims=True)
    exact = hit.any(axis=1)
    rows[exact] = hit[exact]
    return rows
