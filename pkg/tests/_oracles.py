"""Independent reference computations used by the tests."""

import itertools

import numpy as np


def enumerate_ball(G, y, radius):
    """Integer vectors b with ||G b - y|| <= radius (breadth-first, no pruning tricks)."""
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    Q, R = np.linalg.qr(G)
    z = Q.T @ np.asarray(y, dtype=float)
    r2 = radius * radius
    nodes = np.zeros((1, 0), dtype=np.int64)   # coordinates k+1..n-1
    cost = np.zeros(1)
    for k in range(n - 1, -1, -1):
        tail = R[k, k + 1:] @ nodes.T if nodes.shape[1] else np.zeros(len(cost))
        centre = (z[k] - tail) / R[k, k]
        half = np.sqrt(np.maximum(r2 - cost, 0.0)) / abs(R[k, k])
        lo = np.ceil(centre - half - 1e-12).astype(np.int64)
        hi = np.floor(centre + half + 1e-12).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        if counts.sum() == 0:
            return np.zeros((0, n), dtype=np.int64)
        parent = np.repeat(np.arange(len(cost)), counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        bk = lo[parent] + offs
        d = R[k, k] * bk + tail[parent] - z[k]
        new_cost = cost[parent] + d * d
        keep = new_cost <= r2 + 1e-12
        nodes = np.column_stack([bk[keep], nodes[parent[keep]]])
        cost = new_cost[keep]
    return nodes


def nearest_by_enumeration(G, y, radius):
    """Closest lattice point among those within ``radius``; ties -> lexicographically smallest b."""
    B = enumerate_ball(G, y, radius)
    if len(B) == 0:
        return None, np.inf
    X = B @ np.asarray(G, dtype=float).T
    d2 = np.sum((X - y) ** 2, axis=1)
    best = d2.min()
    tied = B[d2 <= best + 1e-9]
    order = np.lexsort(tied.T[::-1])
    return tied[order[0]], best


def lattice_points_upto(G, norm2):
    """All lattice points with ||x||^2 <= norm2."""
    B = enumerate_ball(G, np.zeros(np.asarray(G).shape[0]), np.sqrt(norm2))
    return B @ np.asarray(G, dtype=float).T


def poly_crc(bits, width=4, poly=0x3):
    """Remainder of M(x) x^width modulo x^width + poly, by integer long division."""
    g = (1 << width) | poly
    m = 0
    for b in bits:
        m = (m << 1) | int(b)
    m <<= width
    while m.bit_length() > width:
        m ^= g << (m.bit_length() - width - 1)
    return [(m >> (width - 1 - j)) & 1 for j in range(width)]


def ball_volume_numeric(n, r):
    """Volume of the n-ball from 1-D slice integrals, no gamma function.

    Slicing gives V_m(1) = V_{m-1}(1) * int_{-1}^{1} (1 - x^2)^{(m-1)/2} dx.
    """
    from scipy import integrate
    v = 1.0
    for m in range(1, n + 1):
        w, _ = integrate.quad(lambda x: (1.0 - x * x) ** ((m - 1) / 2.0), -1.0, 1.0,
                              epsabs=1e-14, epsrel=1e-13)
        v *= w
    return v * r ** n


def small_int_vectors(n, bound):
    return np.array(list(itertools.product(range(-bound, bound + 1), repeat=n)))
