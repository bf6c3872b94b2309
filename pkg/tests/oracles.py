"""Slow, independent reference implementations used only by the tests.

Nothing here calls into ``seriate`` or ``numpy.linalg``.
"""

import math


def jacobi_eigenvalues(S, tol=1e-15, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending."""
    a = [list(map(float, row)) for row in S]
    m = len(a)
    for _ in range(max_sweeps):
        off = sum(a[i][j] ** 2 for i in range(m) for j in range(m) if i != j)
        scale = sum(a[i][i] ** 2 for i in range(m)) or 1.0
        if off <= tol * tol * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                if a[p][q] == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(m):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - s * akq
                    a[k][q] = s * akp + c * akq
                for k in range(m):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
    else:
        raise RuntimeError("Jacobi sweeps did not converge")
    return sorted((a[i][i] for i in range(m)), reverse=True)


def gram(M):
    """M^T M with plain loops."""
    n, p = len(M), len(M[0])
    return [[sum(M[k][i] * M[k][j] for k in range(n)) for j in range(p)] for i in range(p)]


def singular_values(M):
    return [math.sqrt(max(lam, 0.0)) for lam in jacobi_eigenvalues(gram(M))]


def closed_form_2x2_sigma_max(M):
    (a, b), (c, d) = M
    s = a * a + b * b + c * c + d * d
    det = a * d - b * c
    return math.sqrt((s + math.sqrt(max(s * s - 4 * det * det, 0.0))) / 2.0)


def brute_force_error(P_bar, P, row_perm, col_perm):
    """Four-flip reordering error with explicit double sums; returns (error, (k, h))."""
    n, p = len(P_bar), len(P_bar[0])
    best = None
    for k in (0, 1):
        for h in (0, 1):
            total = 0.0
            for i in range(n):
                src_i = row_perm[i] if k == 0 else row_perm[n - 1 - i]
                for j in range(p):
                    src_j = col_perm[j] if h == 0 else col_perm[p - 1 - j]
                    total += (P_bar[i][j] - P[src_i][src_j]) ** 2
            err = total / (n * p)
            if best is None or err < best[0]:
                best = (err, (k, h))
    return best


def silhouette_1d(values, labels):
    """Mean silhouette of 1-D points under the given cluster labels."""
    idx = range(len(values))
    clusters = sorted(set(labels))
    scores = []
    for i in idx:
        own = [abs(values[i] - values[j]) for j in idx if labels[j] == labels[i] and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = sum(own) / len(own)
        b = min(
            sum(abs(values[i] - values[j]) for j in idx if labels[j] == c)
            / sum(1 for j in idx if labels[j] == c)
            for c in clusters if c != labels[i]
        )
        scores.append((b - a) / max(a, b) if max(a, b) > 0 else 0.0)
    return sum(scores) / len(scores)
