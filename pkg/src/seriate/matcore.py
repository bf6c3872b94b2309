"""Dense matrices, permutations and the small iterative linear-algebra kernels.

Matrices are plain 2-D ``float64`` ndarrays and permutations are 1-D integer
arrays in "gather" form: ``perm[i]`` is the source index placed at position
``i``.  Reordering a matrix is therefore ``M[row_perm][:, col_perm]``.
"""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import (
    BadShape,
    DegenerateRange,
    NegativeEntry,
    NoConvergence,
    NonFinite,
    NotSymmetric,
    RankDeficient,
    SizeMismatch,
    ZeroMatrix,
    ZeroSpectrum,
)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10000

# |sum| below this counts as a tie in the sign convention.
_SIGN_TIE = 1e-9


class SingularTriplet(NamedTuple):
    sigma: float
    left: np.ndarray
    right: np.ndarray


def as_matrix(M) -> np.ndarray:
    """Validate and convert to a finite 2-D float64 array (always a fresh copy)."""
    arr = np.array(M, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise BadShape(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("matrix contains NaN or infinite entries")
    return arr


def as_permutation(p, size: int | None = None) -> np.ndarray:
    arr = np.asarray(p)
    if arr.ndim != 1 or (arr.size and not np.issubdtype(arr.dtype, np.integer)):
        raise BadShape("a permutation must be a 1-D integer sequence")
    arr = arr.astype(np.int64)
    if size is not None and arr.size != size:
        raise SizeMismatch(f"permutation of size {arr.size}, expected {size}")
    if not np.array_equal(np.sort(arr), np.arange(arr.size)):
        raise BadShape("sequence is not a bijection on 0..m-1")
    return arr


def identity_permutation(m: int) -> np.ndarray:
    return np.arange(m, dtype=np.int64)


def flip_permutation(p) -> np.ndarray:
    return np.asarray(p, dtype=np.int64)[::-1].copy()


def normalize_unit_range(M) -> np.ndarray:
    """Affinely map ``M`` onto [0, 1] using its own min and max."""
    M = as_matrix(M)
    lo, hi = M.min(), M.max()
    return normalize_with_range(M, lo, hi)


def normalize_with_range(M, lo: float, hi: float) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    span = hi - lo
    if not span > 0:
        raise DegenerateRange("cannot normalize a constant matrix (max == min)")
    return (M - lo) / span


def log1p_transform(M) -> np.ndarray:
    M = as_matrix(M)
    if np.any(M < 0):
        raise NegativeEntry("log1p transform requires nonnegative entries")
    return np.log1p(M)


def apply_permutation(M, row_p, col_p) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    row_p = as_permutation(row_p, M.shape[0])
    col_p = as_permutation(col_p, M.shape[1])
    return M[np.ix_(row_p, col_p)]


def invert_permutation(p) -> np.ndarray:
    p = as_permutation(p)
    inv = np.empty_like(p)
    inv[p] = np.arange(p.size, dtype=np.int64)
    return inv


def argsort(values) -> np.ndarray:
    """Stable ascending order; ties keep their original relative order."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise BadShape("argsort expects a 1-D sequence")
    if not np.all(np.isfinite(values)):
        raise NonFinite("cannot order NaN or infinite values")
    return np.argsort(values, kind="stable").astype(np.int64)


def pairwise_row_distances(M) -> np.ndarray:
    M = as_matrix(M)
    if M.shape[0] < 2:
        raise BadShape("need at least two rows for pairwise distances")
    return squareform(pdist(M, metric="euclidean"))


def _fix_sign(left: np.ndarray, *others: np.ndarray):
    s = left.sum()
    if abs(s) > _SIGN_TIE:
        flip = s < 0
    else:
        nz = np.flatnonzero(np.abs(left) > _SIGN_TIE)
        flip = bool(nz.size) and left[nz[0]] < 0
    if flip:
        return (-left, *(-o for o in others))
    return (left, *others)


def _start_vector(m: int) -> np.ndarray:
    # Fixed generic start so results never depend on global random state.
    x = np.random.Generator(np.random.Philox(20240601)).standard_normal(m)
    return x / np.linalg.norm(x)


def top_singular_triplet(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SingularTriplet:
    """Largest singular value and vectors by alternating power iteration.

    Stops once both the change in sigma and the residual
    ``||M^T u - sigma v||`` fall below ``tol * max(1, sigma)``.
    """
    M = as_matrix(M)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.any(M):
        raise ZeroMatrix("top singular triplet of a zero matrix is undefined")
    n, p = M.shape
    v = _start_vector(p)
    sigma_old = 0.0
    for _ in range(max_iter):
        u = M @ v
        sigma = np.linalg.norm(u)
        if sigma == 0.0:
            # start vector in the null space; restart from the dominant row
            v = M[np.argmax(np.linalg.norm(M, axis=1))].copy()
            v /= np.linalg.norm(v)
            continue
        u /= sigma
        w = M.T @ u
        scale = tol * max(1.0, sigma)
        resid = np.linalg.norm(w - sigma * v)
        v = w / np.linalg.norm(w)
        if abs(sigma - sigma_old) <= scale and resid <= scale:
            break
        sigma_old = sigma
    else:
        raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")
    # recompute left from the final right vector so that M v = sigma u exactly
    u = M @ v
    sigma = float(np.linalg.norm(u))
    u /= sigma
    u, v = _fix_sign(u, v)
    return SingularTriplet(sigma, u, v)


def top_two_singular(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Top two singular triplets; the second comes from the deflated matrix."""
    M = as_matrix(M)
    first = top_singular_triplet(M, tol, max_iter)
    residual = M - first.sigma * np.outer(first.left, first.right)
    floor = tol * max(1.0, first.sigma)
    if np.linalg.norm(residual) <= floor:
        raise RankDeficient("matrix is (numerically) rank one")
    second = top_singular_triplet(residual, tol, max_iter)
    if second.sigma <= floor:
        raise RankDeficient(f"second singular value {second.sigma:g} is below tolerance")
    return first, second


def top_eigenpair_sym(B, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Largest eigenvalue and unit eigenvector of a symmetric PSD matrix.

    An all-zero matrix returns ``(0.0, e_1)`` and emits a ``ZeroSpectrum``
    warning.
    """
    B = as_matrix(B)
    m = B.shape[0]
    if B.shape[1] != m:
        raise BadShape(f"expected a square matrix, got {B.shape}")
    scale_b = max(1.0, float(np.abs(B).max()))
    if np.abs(B - B.T).max() > 1e-10 * scale_b:
        raise NotSymmetric("matrix is not symmetric within 1e-10")
    if not np.any(B):
        warnings.warn("zero matrix: eigenvector is arbitrary", ZeroSpectrum, stacklevel=2)
        e1 = np.zeros(m)
        e1[0] = 1.0
        return 0.0, e1
    v = _start_vector(m)
    lam_old = 0.0
    for _ in range(max_iter):
        w = B @ v
        lam = float(v @ w)
        norm_w = np.linalg.norm(w)
        scale = tol * max(1.0, abs(lam))
        resid = np.linalg.norm(w - lam * v)
        if norm_w == 0.0:
            break
        if abs(lam - lam_old) <= scale and resid <= scale:
            break
        v = w / norm_w
        lam_old = lam
    else:
        raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")
    lam = float(v @ B @ v)
    (v,) = _fix_sign(v)
    return lam, v
