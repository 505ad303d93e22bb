"""Numba kernel for the line-graph relaxation.

Mirrors detector._relax_python exactly: same sweep order, same relaxation
condition, same early stop, plain IEEE double arithmetic.  Results are
bit-identical to the reference engine; tests assert this.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _marginal(xs, ys, fees, dx):
    amount = dx
    deriv = 1.0
    for i in range(xs.shape[0]):
        keep = 1.0 - fees[i]
        denom = xs[i] + keep * amount
        deriv = deriv * (keep * xs[i] * ys[i]) / (denom * denom)
        amount = ys[i] * keep * amount / denom
    return deriv


@njit(cache=True)
def optimal_input_kernel(xs, ys, fees, target, seed_scale, rel_width, max_iter):
    """Mirrors optimizer._optimal_input; returns -1.0 when unprofitable."""
    if not _marginal(xs, ys, fees, 0.0) > target:
        return -1.0
    lo = 0.0
    hi = xs[0] * seed_scale
    while _marginal(xs, ys, fees, hi) > target:
        lo = hi
        hi *= 2.0
        if not np.isfinite(hi):
            return -1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if _marginal(xs, ys, fees, mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_width * hi:
            break
    return 0.5 * (lo + hi)


@njit(cache=True)
def relax_kernel(group_ptr, edge_dst, edge_w, edge_l, second,
                 src_dst, src_w, v0, rounds, n_tokens):
    n = second.shape[0]
    dis = np.full(n, np.inf)
    # stored path per vertex: token sequence + membership row for O(1) checks
    cap = n_tokens + 1  # a simple path holds <= n_tokens tokens, +1 for loop closure
    path_buf = np.zeros((n, cap), dtype=np.int64)
    plen = np.zeros(n, dtype=np.int64)
    in_path = np.zeros((n, n_tokens), dtype=np.uint8)
    version = np.zeros(n, dtype=np.int64)
    swept = np.zeros(n, dtype=np.int64)

    for m in range(rounds):
        updated = False
        if m == 0:
            for k in range(src_dst.shape[0]):
                v = src_dst[k]
                w = src_w[k]
                if w < dis[v]:
                    dis[v] = w
                    sec = second[v]
                    path_buf[v, 0] = v0
                    path_buf[v, 1] = sec
                    plen[v] = 2
                    in_path[v, v0] = 1
                    in_path[v, sec] = 1
                    version[v] += 1
                    updated = True
        for u in range(n):
            if version[u] == swept[u]:
                continue
            swept[u] = version[u]
            if second[u] == v0:
                continue  # closed loop: terminal
            du = dis[u]
            nu = plen[u]
            for e in range(group_ptr[u], group_ptr[u + 1]):
                v = edge_dst[e]
                nd = du + edge_w[e]
                if nd < dis[v]:
                    l = edge_l[e]
                    if l == v0 or in_path[u, l] == 0:
                        dis[v] = nd
                        path_buf[v, :nu] = path_buf[u, :nu]
                        path_buf[v, nu] = l
                        plen[v] = nu + 1
                        in_path[v, :] = in_path[u, :]
                        in_path[v, l] = 1
                        version[v] += 1
                        updated = True
        if not updated:
            break
    return dis, plen, path_buf
