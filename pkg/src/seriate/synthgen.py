"""Synthetic matrices with a known latent order.

Every generator builds a mean matrix, adds Gaussian noise, rescales the noisy
matrix to [0, 1], and shuffles rows and columns.  The mean matrix goes
through the *same* affine map as the data (min and max of the noisy matrix),
so the clean and shuffled means are directly comparable with the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadClusterCount, BadShape, SizeMismatch
from .matcore import apply_permutation, invert_permutation, normalize_with_range
from .prng import Rng, random_permutation, standard_normal

LBM_MEANS = np.array([[0.9, 0.4, 0.8],
                      [0.1, 0.6, 0.2],
                      [0.5, 0.3, 0.7]])
SPM_MEANS = np.array([0.9, 0.6, 0.3, 0.1])
DEFAULT_SIGMA = 0.05
MODELS = ("lbm", "spm", "gbm", "dgm")


def dgm_sigma_grid(count: int = 10, step: float = 0.03) -> list[float]:
    """Noise levels ``step * t`` for ``t = 1..count``."""
    return [round(step * t, 12) for t in range(1, count + 1)]


@dataclass
class SyntheticInstance:
    model: str
    a_bar: np.ndarray
    mean_bar: np.ndarray
    observed: np.ndarray
    mean_observed: np.ndarray
    true_row_perm: np.ndarray
    true_col_perm: np.ndarray
    sigma: float
    seed: int | None = None
    params: dict | None = None
    row_labels: np.ndarray | None = None
    col_labels: np.ndarray | None = None

    @property
    def row_order(self) -> np.ndarray:
        """Order that restores ``a_bar`` from ``observed`` (the ideal answer)."""
        return invert_permutation(self.true_row_perm)

    @property
    def col_order(self) -> np.ndarray:
        return invert_permutation(self.true_col_perm)

    @property
    def observed_row_labels(self):
        return None if self.row_labels is None else self.row_labels[self.true_row_perm]

    @property
    def observed_col_labels(self):
        return None if self.col_labels is None else self.col_labels[self.true_col_perm]


def block_labels(m: int, k: int) -> np.ndarray:
    """Contiguous cluster ids of width ``ceil(m / k)``; the last cluster takes the remainder."""
    if not 1 <= k <= m:
        raise BadClusterCount(f"cannot split {m} items into {k} clusters")
    width = math.ceil(m / k)
    return np.minimum(np.arange(m) // width, k - 1)


def shuffle_instance(a_bar, mean_bar, rng: Rng):
    """Apply one random row and one random column permutation to both matrices."""
    a_bar = np.asarray(a_bar, dtype=np.float64)
    mean_bar = np.asarray(mean_bar, dtype=np.float64)
    if a_bar.shape != mean_bar.shape:
        raise SizeMismatch(f"data {a_bar.shape} and mean {mean_bar.shape} differ in shape")
    row_p = random_permutation(rng, a_bar.shape[0])
    col_p = random_permutation(rng, a_bar.shape[1])
    return (apply_permutation(a_bar, row_p, col_p), apply_permutation(mean_bar, row_p, col_p), row_p, col_p)


def _finish(model, means, sigma, rng, params, row_labels=None, col_labels=None) -> SyntheticInstance:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    raw = means + sigma * standard_normal(rng, means.shape)
    lo, hi = raw.min(), raw.max()
    a_bar = normalize_with_range(raw, lo, hi)
    mean_bar = normalize_with_range(means, lo, hi)
    observed, mean_observed, row_p, col_p = shuffle_instance(a_bar, mean_bar, rng)
    return SyntheticInstance(model, a_bar, mean_bar, observed, mean_observed, row_p, col_p, float(sigma),
                             rng.seed, params, row_labels, col_labels)


def lbm_generate(n=100, p=100, K=3, H=3, B=None, sigma=DEFAULT_SIGMA, rng: Rng | None = None) -> SyntheticInstance:
    """Latent block model: entry (i, j) ~ Normal(B[row cluster, column cluster], sigma)."""
    B = LBM_MEANS if B is None else np.asarray(B, dtype=np.float64)
    if B.shape != (K, H):
        raise BadShape(f"block means have shape {B.shape}, expected {(K, H)}")
    rows, cols = block_labels(n, K), block_labels(p, H)
    means = B[np.ix_(rows, cols)]
    params = dict(n=n, p=p, K=K, H=H, B=B.tolist(), sigma=sigma)
    return _finish("lbm", means, sigma, rng or Rng(0), params, rows, cols)


def spm_cluster_index(n: int, p: int, K: int) -> np.ndarray:
    """0-based stripe id of every cell: ``floor((i + j) / ceil((n + p) / K))``."""
    width = math.ceil((n + p) / K)
    i, j = np.indices((n, p))
    return (i + j) // width


def spm_generate(n=100, p=100, K=4, b=None, sigma=DEFAULT_SIGMA, rng: Rng | None = None) -> SyntheticInstance:
    b = SPM_MEANS if b is None else np.asarray(b, dtype=np.float64)
    if b.shape != (K,):
        raise BadShape(f"stripe means have shape {b.shape}, expected ({K},)")
    if K < 1:
        raise BadClusterCount("need at least one stripe")
    means = b[spm_cluster_index(n, p, K)]
    params = dict(n=n, p=p, K=K, b=b.tolist(), sigma=sigma)
    return _finish("spm", means, sigma, rng or Rng(0), params)


def gbm_means(n: int, p: int) -> np.ndarray:
    n0, p0 = math.ceil(n / 2), math.ceil(p / 2)
    if p0 < 2:
        raise BadShape("gradation block needs at least two columns (p >= 3)")
    means = np.full((n, p), 0.1)
    ramp = 0.8 * np.arange(p0) / (p0 - 1) + 0.1
    means[:n0, :p0] = ramp
    return means


def gbm_generate(n=100, p=100, sigma=DEFAULT_SIGMA, rng: Rng | None = None) -> SyntheticInstance:
    """Flat background with one top-left block whose mean ramps left to right."""
    means = gbm_means(n, p)
    rows = (np.arange(n) >= math.ceil(n / 2)).astype(np.int64)
    return _finish("gbm", means, sigma, rng or Rng(0), dict(n=n, p=p, sigma=sigma), rows)


def dgm_means(n: int, p: int) -> np.ndarray:
    i, j = np.indices((n, p))
    return 0.9 - 0.8 * np.abs(i - j) / max(n, p)


def dgm_generate(n=100, p=100, sigma=0.03, rng: Rng | None = None) -> SyntheticInstance:
    """Diagonal gradation: mean decays linearly with the distance from the diagonal."""
    return _finish("dgm", dgm_means(n, p), sigma, rng or Rng(0), dict(n=n, p=p, sigma=sigma))


def generate(model: str, rng: Rng, **params) -> SyntheticInstance:
    generators = {"lbm": lbm_generate, "spm": spm_generate, "gbm": gbm_generate, "dgm": dgm_generate}
    if model not in generators:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    return generators[model](rng=rng, **params)
