"""Loop-style kernels compiled with numba (plain Python when numba is absent)."""
import math

import numpy as np

from ._accel import njit

RANK_TOL = 1e-10


@njit(cache=True, nogil=True)
def ols_batch(X, y, idx):
    B, n = idx.shape
    k = X.shape[1]
    coef = np.empty((B, k))
    se = np.empty((B, k))
    r2 = np.empty(B)
    ok = np.ones(B, dtype=np.bool_)
    A = np.empty((n, k))
    b = np.empty(n)
    v = np.empty(n)
    rinv = np.empty((k, k))
    for rep in range(B):
        for i in range(n):
            row = idx[rep, i]
            b[i] = y[row]
            for j in range(k):
                A[i, j] = X[row, j]
        ybar = 0.0
        for i in range(n):
            ybar += b[i]
        ybar /= n
        tss = 0.0
        for i in range(n):
            tss += (b[i] - ybar) ** 2

        # Householder QR, R stored in the upper triangle of A, Q^T b in b.
        for j in range(k):
            orig = 0.0
            for i in range(n):
                orig += A[i, j] * A[i, j]
            orig = math.sqrt(orig)
            # the orthogonalized norm is the norm of the trailing subcolumn
            sub = 0.0
            for i in range(j, n):
                sub += A[i, j] * A[i, j]
            sub = math.sqrt(sub)
            if orig == 0.0 or sub < RANK_TOL * orig:
                ok[rep] = False
                break
            alpha = -sub if A[j, j] >= 0.0 else sub
            vnorm2 = 0.0
            for i in range(j, n):
                v[i] = A[i, j]
            v[j] -= alpha
            for i in range(j, n):
                vnorm2 += v[i] * v[i]
            if vnorm2 > 0.0:
                for c in range(j + 1, k):
                    dot = 0.0
                    for i in range(j, n):
                        dot += v[i] * A[i, c]
                    f = 2.0 * dot / vnorm2
                    for i in range(j, n):
                        A[i, c] -= f * v[i]
                dot = 0.0
                for i in range(j, n):
                    dot += v[i] * b[i]
                f = 2.0 * dot / vnorm2
                for i in range(j, n):
                    b[i] -= f * v[i]
            A[j, j] = alpha
            for i in range(j + 1, n):
                A[i, j] = 0.0
        if not ok[rep]:
            for j in range(k):
                coef[rep, j] = np.nan
                se[rep, j] = np.nan
            r2[rep] = np.nan
            continue

        for i in range(k - 1, -1, -1):
            s = b[i]
            for c in range(i + 1, k):
                s -= A[i, c] * coef[rep, c]
            coef[rep, i] = s / A[i, i]
        rss = 0.0
        for i in range(n):
            fit = 0.0
            row = idx[rep, i]
            for j in range(k):
                fit += X[row, j] * coef[rep, j]
            rss += (y[row] - fit) ** 2
        sigma2 = rss / (n - k)

        # R^{-1} by back substitution; diag((X^T X)^{-1}) = row sums of R^{-1}**2
        for c in range(k):
            for i in range(k - 1, -1, -1):
                s = 1.0 if i == c else 0.0
                for m in range(i + 1, k):
                    s -= A[i, m] * rinv[m, c]
                rinv[i, c] = s / A[i, i]
        for i in range(k):
            acc = 0.0
            for c in range(k):
                acc += rinv[i, c] * rinv[i, c]
            se[rep, i] = math.sqrt(sigma2 * acc)
        if tss == 0.0:
            r2[rep] = 0.0
        else:
            val = 1.0 - rss / tss
            r2[rep] = min(1.0, max(0.0, val))
    return coef, se, r2, ok


@njit(cache=True, nogil=True)
def transform(t, a, b):
    flat = t.ravel()
    out = np.empty(flat.shape[0])
    for i in range(flat.shape[0]):
        v = flat[i]
        if v < 0.0:
            out[i] = 0.0
        elif v <= a:
            out[i] = v / (2.0 * a)
        elif v <= b:
            out[i] = (v + (b - 2.0 * a)) / (2.0 * (b - a))
        else:
            out[i] = 1.0
    return out.reshape(t.shape)


@njit(cache=True, nogil=True)
def weighted_scores(x, w):
    n = x.shape[0]
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(x.shape[1]):
            s += w[j] * x[i, j]
        out[i] = s
    return out


@njit(cache=True, nogil=True)
def round_outcomes(skill_a, skill_b, eps, coin, skill_weight, noise):
    m = skill_a.shape[0]
    a_wins = np.empty(m, dtype=np.bool_)
    for i in range(m):
        d = skill_weight * (skill_a[i] - skill_b[i]) + noise * eps[i]
        if d > 0.0:
            a_wins[i] = True
        elif d < 0.0:
            a_wins[i] = False
        else:
            a_wins[i] = coin[i] < 0.5
    return a_wins
