"""Independent brute-force oracles used across the test suite.

These deliberately avoid the library implementations they check: plain
loops, O(n^2) scans and textbook formulas only.
"""

import math

import numpy as np


def nan_distance_bruteforce(a, b):
    """NaN-aware Euclidean between two rows; inf with no mutual overlap."""
    total = len(a)
    acc = 0.0
    observed = 0
    for x, y in zip(a, b):
        if not (math.isnan(x) or math.isnan(y)):
            acc += (x - y) ** 2
            observed += 1
    if observed == 0:
        return math.inf
    return math.sqrt(acc * total / observed)


def knn_impute_bruteforce(values, k):
    """Reference KNN imputation by exhaustive neighbor scan.

    Donors for cell (r, c) are rows observing column c with at least one
    mutually observed coordinate; the k nearest (ties toward the lower
    row index) donate their column-c mean. No donors => column mean.
    """
    values = np.asarray(values, dtype=float)
    n, d = values.shape
    out = values.copy()
    for r in range(n):
        for c in range(d):
            if not math.isnan(values[r, c]):
                continue
            candidates = []
            for s in range(n):
                if s == r or math.isnan(values[s, c]):
                    continue
                dist = nan_distance_bruteforce(values[r], values[s])
                if math.isinf(dist):
                    continue
                candidates.append((dist, s))
            if not candidates:
                col = [v for v in values[:, c] if not math.isnan(v)]
                out[r, c] = sum(col) / len(col)
                continue
            candidates.sort(key=lambda t: (t[0], t[1]))
            chosen = candidates[: min(k, len(candidates))]
            out[r, c] = float(np.mean([values[s, c] for _, s in chosen]))
    return out


def pearson_bruteforce(columns):
    """Textbook two-pass covariance correlation matrix."""
    columns = np.asarray(columns, dtype=float)
    n, d = columns.shape
    r = np.zeros((d, d))
    means = [sum(columns[:, j]) / n for j in range(d)]
    for i in range(d):
        for j in range(d):
            cov = sxx = syy = 0.0
            for t in range(n):
                dx = columns[t, i] - means[i]
                dy = columns[t, j] - means[j]
                cov += dx * dy
                sxx += dx * dx
                syy += dy * dy
            if sxx == 0.0 or syy == 0.0:
                r[i, j] = 1.0 if i == j else 0.0
            else:
                r[i, j] = cov / math.sqrt(sxx * syy)
    np.fill_diagonal(r, 1.0)
    return r


def dft_bruteforce(samples):
    """Direct O(N^2) DFT magnitudes for bins 0..N//2."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    mags = []
    t = np.arange(n)
    for k in range(n // 2 + 1):
        angle = -2.0 * math.pi * k * t / n
        re = float(np.dot(x, np.cos(angle)))
        im = float(np.dot(x, np.sin(angle)))
        mags.append(math.hypot(re, im))
    return np.array(mags)


def conv2d_bruteforce(image, kernels, bias):
    """Quadruple-loop same-padded cross-correlation.

    image: (H, W, Cin); kernels: (3, 3, Cin, Cout); bias: (Cout,).
    """
    h, w, cin = image.shape
    kh, kw, _, cout = kernels.shape
    ph, pw = kh // 2, kw // 2
    out = np.zeros((h, w, cout))
    for i in range(h):
        for j in range(w):
            for co in range(cout):
                acc = bias[co]
                for m in range(kh):
                    for nn in range(kw):
                        ii, jj = i + m - ph, j + nn - pw
                        if 0 <= ii < h and 0 <= jj < w:
                            for ci in range(cin):
                                acc += image[ii, jj, ci] * kernels[m, nn, ci, co]
                out[i, j, co] = acc
    return out


def maxpool_bruteforce(image):
    """Sliding 2x2/stride-2 window maxima; odd edges padded with -inf."""
    h, w, c = image.shape
    oh, ow = (h + 1) // 2, (w + 1) // 2
    out = np.full((oh, ow, c), -np.inf)
    for i in range(h):
        for j in range(w):
            for ch in range(c):
                out[i // 2, j // 2, ch] = max(out[i // 2, j // 2, ch], image[i, j, ch])
    return out


def otsu_threshold_bruteforce(gray_levels):
    """Exhaustive 256-level search maximizing between-class variance.

    gray_levels: integer array in 0..255. Returns the lowest maximizing
    threshold t; class 0 is {level <= t}.
    """
    hist = np.bincount(gray_levels.ravel(), minlength=256).astype(float)
    total = hist.sum()
    best_t, best_sigma = 0, -1.0
    for t in range(256):
        w0 = hist[: t + 1].sum()
        w1 = total - w0
        if w0 == 0 or w1 == 0:
            sigma = 0.0
        else:
            mu0 = np.dot(np.arange(t + 1), hist[: t + 1]) / w0
            mu1 = np.dot(np.arange(t + 1, 256), hist[t + 1 :]) / w1
            sigma = w0 * w1 * (mu0 - mu1) ** 2
        if sigma > best_sigma:
            best_sigma, best_t = sigma, t
    return best_t


def convex_hull_contains(hull, point, tol=1e-9):
    """Point-in-convex-polygon test via cross products (hull CCW)."""
    n = len(hull)
    if n == 1:
        return abs(point[0] - hull[0][0]) <= tol and abs(point[1] - hull[0][1]) <= tol
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        cross = (bx - ax) * (point[1] - ay) - (by - ay) * (point[0] - ax)
        if cross < -tol:
            return False
    return True
