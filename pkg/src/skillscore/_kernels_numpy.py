"""Vectorized numpy twins of the numba kernels."""
import numpy as np

RANK_TOL = 1e-10
_CHUNK = 64


def ols_batch(X, y, idx):
    B, n = idx.shape
    k = X.shape[1]
    coef = np.full((B, k), np.nan)
    se = np.full((B, k), np.nan)
    r2 = np.full(B, np.nan)
    ok = np.zeros(B, dtype=bool)
    for start in range(0, B, _CHUNK):
        sl = slice(start, min(B, start + _CHUNK))
        Xs = X[idx[sl]]
        ys = y[idx[sl]]
        Q, R = np.linalg.qr(Xs, mode="reduced")
        diag = np.abs(np.diagonal(R, axis1=1, axis2=2))
        norms = np.linalg.norm(Xs, axis=1)
        good = np.all((norms > 0) & (diag >= RANK_TOL * norms), axis=1)
        if not good.any():
            continue
        Xg, yg, Qg = Xs[good], ys[good], Q[good]
        rinv = np.linalg.inv(R[good])
        qty = np.einsum("bnk,bn->bk", Qg, yg)
        beta = np.einsum("bkj,bj->bk", rinv, qty)
        resid = yg - np.einsum("bnk,bk->bn", Xg, beta)
        rss = np.einsum("bn,bn->b", resid, resid)
        sigma2 = rss / (n - k)
        var = sigma2[:, None] * np.einsum("bij,bij->bi", rinv, rinv)
        centered = yg - yg.mean(axis=1, keepdims=True)
        tss = np.einsum("bn,bn->b", centered, centered)
        with np.errstate(divide="ignore", invalid="ignore"):
            rr = np.where(tss == 0.0, 0.0, np.clip(1.0 - rss / tss, 0.0, 1.0))
        pos = np.arange(sl.start, sl.stop)[good]
        coef[pos] = beta
        se[pos] = np.sqrt(var)
        r2[pos] = rr
        ok[pos] = True
    return coef, se, r2, ok


def transform(t, a, b):
    t = np.asarray(t, dtype=float)
    return np.select(
        [t < 0.0, t <= a, t <= b],
        [0.0, t / (2.0 * a), (t + (b - 2.0 * a)) / (2.0 * (b - a))],
        default=1.0,
    )


def weighted_scores(x, w):
    return x @ w


def round_outcomes(skill_a, skill_b, eps, coin, skill_weight, noise):
    d = skill_weight * (skill_a - skill_b) + noise * eps
    return np.where(d == 0.0, coin < 0.5, d > 0.0)
