"""Spectral and dimension-reduction reordering baselines.

* ``svd_rank_one_order``: order by the leading singular vectors (rank-one fit).
* ``svd_angle_order``: order by the angle of each row in the plane of the top
  two singular vectors of the row-standardised matrix.
* ``mds_order``: one-dimensional classical MDS on Euclidean row distances.

Each works on rows; columns are handled by running the same procedure on the
transpose.  None of them uses randomness.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BadShape, DegenerateRow, NotSymmetric
from .matcore import (
    argsort,
    as_matrix,
    pairwise_row_distances,
    top_eigenpair_sym,
    top_singular_triplet,
    top_two_singular,
)

SCALE_EPS = 1e-12
METHODS = ("svd-rank1", "svd-angle", "mds")


@dataclass
class BaselineResult:
    method: str
    row_perm: np.ndarray
    col_perm: np.ndarray
    row_scores: np.ndarray
    col_scores: np.ndarray
    denoised: np.ndarray | None = None


def svd_rank_one_order(A) -> BaselineResult:
    A = as_matrix(A)
    sigma, u, v = top_singular_triplet(A)
    r_hat = math.sqrt(sigma) * u
    c_hat = math.sqrt(sigma) * v
    return BaselineResult("svd-rank1", argsort(r_hat), argsort(c_hat), r_hat, c_hat, np.outer(r_hat, c_hat))


def standardize_rows(A) -> np.ndarray:
    """Center each row and divide by its population RMS (guarded by ``SCALE_EPS``)."""
    A = np.asarray(A, dtype=np.float64)
    centered = A - A.mean(axis=1, keepdims=True)
    rms = np.sqrt(np.mean(centered * centered, axis=1, keepdims=True))
    degenerate = rms[:, 0] <= SCALE_EPS
    if degenerate.any():
        warnings.warn(f"rows {np.flatnonzero(degenerate).tolist()} have zero variance",
                      DegenerateRow, stacklevel=3)
    return centered / np.maximum(rms, SCALE_EPS)


def singular_angles(u1, u2) -> np.ndarray:
    """``atan(u2 / u1) + pi * [u1 <= 0]``; rows at the origin get angle pi."""
    u1 = np.asarray(u1, dtype=np.float64)
    u2 = np.asarray(u2, dtype=np.float64)
    ratio = np.zeros_like(u1)
    nonzero = u1 != 0
    ratio[nonzero] = u2[nonzero] / u1[nonzero]
    on_axis = ~nonzero & (u2 != 0)
    ratio[on_axis] = np.copysign(np.inf, u2[on_axis])
    return np.arctan(ratio) + math.pi * (u1 <= 0)


def unwrap_at_largest_gap(angles) -> np.ndarray:
    """Scores whose ascending order reads the circle starting after its largest gap.

    Gaps are measured between neighbours in sorted order plus the wrap-around
    gap (last to first + 2*pi); on equal gaps the first one wins.  Angles
    before the cut are shifted by 2*pi so that a plain ascending sort of the
    returned scores gives the cut sequence.
    """
    angles = np.asarray(angles, dtype=np.float64)
    order = argsort(angles)
    ranked = angles[order]
    gaps = np.append(np.diff(ranked), ranked[0] + 2 * math.pi - ranked[-1])
    cut = int(np.argmax(gaps))
    scores = angles.copy()
    if cut != gaps.size - 1:
        scores[order[:cut + 1]] += 2 * math.pi
    return scores


def _angle_scores(A) -> np.ndarray:
    scaled = standardize_rows(A)
    first, second = top_two_singular(scaled)
    return unwrap_at_largest_gap(singular_angles(first.left, second.left))


def svd_angle_order(A) -> BaselineResult:
    A = as_matrix(A)
    if min(A.shape) < 2:
        raise BadShape("angle ordering needs at least two rows and two columns")
    row_scores = _angle_scores(A)
    col_scores = _angle_scores(A.T)
    return BaselineResult("svd-angle", argsort(row_scores), argsort(col_scores), row_scores, col_scores)


def double_centered_gram(A) -> np.ndarray:
    """``-1/2 J D^2 J`` for the Euclidean row distances ``D`` of ``A``."""
    D2 = pairwise_row_distances(A) ** 2
    B = -0.5 * (D2 - D2.mean(axis=0, keepdims=True) - D2.mean(axis=1, keepdims=True) + D2.mean())
    scale = max(1.0, float(np.abs(B).max()))
    if np.abs(B - B.T).max() > 1e-10 * scale:
        raise NotSymmetric("double-centred matrix lost symmetry")
    return 0.5 * (B + B.T)


def _mds_scores(A) -> np.ndarray:
    if A.shape[0] == 1:
        return np.zeros(1)
    B = double_centered_gram(A)
    with warnings.catch_warnings():
        # identical rows give B = 0; every row then scores 0
        warnings.simplefilter("ignore")
        lam, v = top_eigenpair_sym(B)
    return math.sqrt(max(lam, 0.0)) * v


def mds_order(A) -> BaselineResult:
    A = as_matrix(A)
    row_scores = _mds_scores(A)
    col_scores = _mds_scores(A.T)
    return BaselineResult("mds", argsort(row_scores), argsort(col_scores), row_scores, col_scores)


def run_baseline(method: str, A) -> BaselineResult:
    dispatch = {"svd-rank1": svd_rank_one_order, "svd-angle": svd_angle_order, "mds": mds_order}
    if method not in dispatch:
        raise ValueError(f"unknown baseline {method!r}; choose from {METHODS}")
    return dispatch[method](A)
