"""Rank-revealing factorization used by the construction sweeps."""

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInput

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class LowRankFactors:
    """``F ~= X @ Z`` with ``X`` of shape ``(p, rank)`` and ``Z`` of shape ``(rank, q)``.

    ``Z`` has orthonormal rows; the singular values are carried by ``X``.
    """

    X: np.ndarray
    Z: np.ndarray
    rank: int
    singular_values: np.ndarray


def rank_threshold(sigma_max, shape, tol, atol=0.0):
    if tol > 0:
        rel = tol * sigma_max
    else:
        rel = max(shape) * np.finfo(float).eps * sigma_max
    return max(rel, atol)


def noise_floor(values):
    """
    Absolute rank floor for blocks cut from ``values``.

    Blocks that vanish in exact arithmetic come out of the sweeps (or out of a
    reconstructed dense matrix) at rounding level, where a purely relative
    threshold would still count them as full rank.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    return max(values.shape) * np.finfo(float).eps * np.linalg.norm(values)


def numerical_rank(F, tol=DEFAULT_TOL, atol=0.0):
    """Number of singular values above ``max(tol * sigma_max, atol)``."""
    F = np.asarray(F, dtype=float)
    if F.size == 0:
        return 0
    s = np.linalg.svd(F, compute_uv=False)
    return int(np.sum(s > rank_threshold(s[0], F.shape, tol, atol))) if s[0] > 0 else 0


def rank_reveal(F, tol=DEFAULT_TOL, atol=0.0):
    """
    Truncated SVD factorization of ``F``.

    The rank is the number of singular values strictly greater than
    ``tol * sigma_max(F)``. With ``tol == 0`` the threshold drops to
    ``max(p, q) * eps * sigma_max(F)``, the usual numerical-rank cutoff.

    Parameters
    ----------
    F : array_like, shape (p, q)
        Any shape, including ``p == 0`` or ``q == 0``.
    tol : float
        Relative tolerance, nonnegative.
    atol : float
        Absolute floor; singular values at or below it are dropped too.

    Returns
    -------
    LowRankFactors
        ``X = U_r diag(s_r)`` and ``Z = V_r^T``.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {F.shape}")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if not np.all(np.isfinite(F)):
        raise NonFiniteInput("matrix contains NaN or Inf")
    p, q = F.shape
    if p == 0 or q == 0 or not np.any(F):
        return LowRankFactors(np.zeros((p, 0)), np.zeros((0, q)), 0, np.zeros(0))

    U, s, Vt = np.linalg.svd(F, full_matrices=False)
    r = int(np.sum(s > rank_threshold(s[0], F.shape, tol, atol)))
    return LowRankFactors(U[:, :r] * s[:r], Vt[:r].copy(), r, s)
