"""Independent naive implementations used as test oracles.

Everything here follows the defining formulas with explicit Python
loops, deliberately avoiding the library's vectorized code paths, so
agreement between the two is a meaningful check.
"""

import numpy as np


def inner(weights, a, b):
    total = 0.0
    for w, ai, bi in zip(weights, a, b):
        total += w * ai * bi
    return total


def outer(x, y):
    p = len(x)
    mat = np.empty((p, p))
    for i in range(p):
        for j in range(p):
            mat[i, j] = y[i] * x[j]
    return mat


def apply_op(weights, mat, f):
    p = len(f)
    out = np.zeros(p)
    for i in range(p):
        for j in range(p):
            out[i] += weights[j] * mat[i, j] * f[j]
    return out


def compose(weights, a, b):
    p = a.shape[0]
    out = np.zeros((p, p))
    for i in range(p):
        for j in range(p):
            for k in range(p):
                out[i, j] += a[i, k] * weights[k] * b[k, j]
    return out


def hs_norm(weights, mat):
    total = 0.0
    p = mat.shape[0]
    for i in range(p):
        for j in range(p):
            total += weights[i] * weights[j] * mat[i, j] ** 2
    return np.sqrt(total)


def density(ys, kernel, h, y):
    total = 0.0
    for yi in ys:
        total += float(kernel((yi - y) / h))
    return total / (len(ys) * h)


def mean_numerator(xs, ys, kernel, h, y):
    n, p = xs.shape
    out = np.zeros(p)
    for i in range(n):
        k = float(kernel((ys[i] - y) / h))
        for j in range(p):
            out[j] += k * xs[i, j]
    return out / (n * h)


def second_moment_numerator(xs, ys, kernel, h, y):
    n, p = xs.shape
    out = np.zeros((p, p))
    for i in range(n):
        k = float(kernel((ys[i] - y) / h))
        for a in range(p):
            for b in range(p):
                out[a, b] += k * xs[i, a] * xs[i, b]
    return out / (n * h)


def clipped_density(ys, kernel, h, y, floor):
    return max(floor, density(ys, kernel, h, y))


def conditional_mean(xs, ys, kernel, h, y, floor):
    return mean_numerator(xs, ys, kernel, h, y) / clipped_density(ys, kernel, h, y, floor)


def conditional_second_moment(xs, ys, kernel, h, y, floor):
    return second_moment_numerator(xs, ys, kernel, h, y) / clipped_density(
        ys, kernel, h, y, floor
    )


def conditional_covariance(xs, ys, kernel, h, y, floor):
    r = conditional_mean(xs, ys, kernel, h, y, floor)
    return conditional_second_moment(xs, ys, kernel, h, y, floor) - outer(r, r)


def mean_curve_covariance(xs, ys, kernel, h, floor):
    """Average of r(Y_i) tensor r(Y_i) by loops."""
    n, p = xs.shape
    out = np.zeros((p, p))
    for i in range(n):
        r = conditional_mean(xs, ys, kernel, h, ys[i], floor)
        out += outer(r, r)
    return out / n


def variance_quadratic(weights, xs, ys, kernel, h, floor, pinv_matrix):
    """Average of C(Y_i) pinv C(Y_i) by loops (triple composition)."""
    n = xs.shape[0]
    out = np.zeros_like(pinv_matrix)
    for i in range(n):
        c = conditional_covariance(xs, ys, kernel, h, ys[i], floor)
        out += compose(weights, c, compose(weights, pinv_matrix, c))
    return out / n
