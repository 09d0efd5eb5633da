"""Rank statistics and the one-dimensional principal projection.

The Kruskal-Wallis H statistic uses midranks with the standard tie
correction; its p-value comes from the chi-square survival function
(regularized upper incomplete gamma). Pairwise comparisons follow Dunn's
procedure on the pooled ranks with a Bonferroni adjustment.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special


def _midranks(pooled: np.ndarray) -> np.ndarray:
    order = np.argsort(pooled, kind="mergesort")
    ranks = np.empty(len(pooled))
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        ranks[order[i: j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_term(pooled: np.ndarray) -> float:
    _, counts = np.unique(pooled, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def _validate_groups(groups) -> list[np.ndarray]:
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if any(len(a) < 1 for a in arrays):
        raise ValueError("every group needs at least one observation")
    if any(not np.all(np.isfinite(a)) for a in arrays):
        raise ValueError("observations must be finite")
    return arrays


def chi_square_sf(x: float, df: int) -> float:
    return float(special.gammaincc(df / 2.0, x / 2.0))


def kruskal_wallis(groups) -> tuple[float, float]:
    """Tie-corrected H and its chi-square p-value over k groups."""
    arrays = _validate_groups(groups)
    pooled = np.concatenate(arrays)
    n_total = len(pooled)
    ranks = _midranks(pooled)
    h = 0.0
    start = 0
    for a in arrays:
        r_sum = float(np.sum(ranks[start: start + len(a)]))
        h += r_sum * r_sum / len(a)
        start += len(a)
    h = 12.0 / (n_total * (n_total + 1.0)) * h - 3.0 * (n_total + 1.0)
    correction = 1.0 - _tie_term(pooled) / (n_total ** 3 - n_total)
    if correction <= 0.0:  # every observation identical
        return 0.0, 1.0
    h /= correction
    p = chi_square_sf(h, len(arrays) - 1)
    return float(h), p


def bonferroni_pairwise(groups) -> np.ndarray:
    """Dunn's z-tests on pooled ranks, Bonferroni-adjusted over all pairs.

    Returns the symmetric matrix of adjusted p-values with unit diagonal.
    """
    arrays = _validate_groups(groups)
    g = len(arrays)
    pooled = np.concatenate(arrays)
    n_total = len(pooled)
    ranks = _midranks(pooled)
    means = []
    start = 0
    for a in arrays:
        means.append(float(np.mean(ranks[start: start + len(a)])))
        start += len(a)
    variance = (n_total * (n_total + 1.0) / 12.0
                - _tie_term(pooled) / (12.0 * (n_total - 1.0)))
    n_pairs = g * (g - 1) // 2
    out = np.ones((g, g))
    for i in range(g):
        for j in range(i + 1, g):
            se_sq = variance * (1.0 / len(arrays[i]) + 1.0 / len(arrays[j]))
            if se_sq <= 0.0:
                p = 1.0
            else:
                z = (means[i] - means[j]) / math.sqrt(se_sq)
                p = min(1.0, float(special.erfc(abs(z) / math.sqrt(2.0))) * n_pairs)
            out[i, j] = out[j, i] = p
    return out


def pca_project_1d(points, rel_tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """Signed projections of the points onto their first principal direction.

    The direction comes from power iteration on the covariance matrix; its
    sign is fixed so the direction's first nonzero component is positive.
    Identical points project to all zeros.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) < 2:
        raise ValueError("need at least two points")
    centered = points - points.mean(axis=0)
    if not np.any(np.abs(centered) > 0.0):
        return np.zeros(len(points))
    cov = centered.T @ centered / (len(points) - 1)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(points.shape[1])
    v /= np.linalg.norm(v)
    eigenvalue = 0.0
    for _ in range(max_iter):
        w = cov @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:  # started orthogonal to the range; re-seed
            v = rng.standard_normal(points.shape[1])
            v /= np.linalg.norm(v)
            continue
        v_new = w / norm
        if abs(norm - eigenvalue) <= rel_tol * max(norm, 1.0):
            v = v_new
            break
        eigenvalue = norm
        v = v_new
    nonzero = np.flatnonzero(np.abs(v) > 1e-12)
    if len(nonzero) and v[nonzero[0]] < 0:
        v = -v
    return centered @ v
