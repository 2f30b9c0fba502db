"""Compiled nearest-point kernels.

Every quantizer works on a single row and writes into a caller-owned
buffer, so the batch loops and the genie sweep can reuse scratch space
without allocating per trial.  Lattice-specific data travel as plain
arrays:

``aux``
    BW16: the 32 Reed-Muller RM(1,4) codewords (one per row).
    generic: upper-triangular ``R`` of the reduced basis.
``rot``
    generic: ``Q^T`` of the reduced basis (unused otherwise).
``unimod``
    generic: unimodular ``T`` with ``G_reduced = G @ T`` (float storage).
``gen``
    generic: the reduced basis itself.
"""

import numpy as np
from numba import njit

KIND_ZN = 0
KIND_DN = 1
KIND_E8 = 2
KIND_A2 = 3
KIND_BW16 = 4
KIND_GENERIC = 5

_SQRT3 = np.sqrt(3.0)


@njit(cache=True)
def _round_half_away(v):
    if v >= 0.0:
        return np.floor(v + 0.5)
    return -np.floor(-v + 0.5)


@njit(cache=True)
def _dn_into(y, off, out):
    # Conway-Sloane D_n decoder on y - off; returns squared distance.
    n = y.shape[0]
    s = 0.0
    worst = -1.0
    k = 0
    for i in range(n):
        v = y[i] - off
        f = _round_half_away(v)
        out[i] = f
        s += f
        d = abs(v - f)
        if d > worst:
            worst = d
            k = i
    if s % 2.0 != 0.0:
        v = y[k] - off
        if v - out[k] >= 0.0:
            out[k] += 1.0
        else:
            out[k] -= 1.0
    d2 = 0.0
    for i in range(n):
        out[i] += off
        e = y[i] - out[i]
        d2 += e * e
    return d2


@njit(cache=True)
def _e8_into(y, out, tmp):
    da = _dn_into(y, 0.0, out)
    db = _dn_into(y, 0.5, tmp)
    if db < da:
        for i in range(8):
            out[i] = tmp[i]


@njit(cache=True)
def _a2_into(y, out):
    # A2 = L u (L + (1/2, sqrt3/2)) with L = Z x sqrt(3) Z rectangular.
    a0 = _round_half_away(y[0])
    a1 = _round_half_away(y[1] / _SQRT3) * _SQRT3
    b0 = _round_half_away(y[0] - 0.5) + 0.5
    b1 = _round_half_away((y[1] - 0.5 * _SQRT3) / _SQRT3) * _SQRT3 + 0.5 * _SQRT3
    da = (y[0] - a0) ** 2 + (y[1] - a1) ** 2
    db = (y[0] - b0) ** 2 + (y[1] - b1) ** 2
    if db < da:
        out[0] = b0
        out[1] = b1
    else:
        out[0] = a0
        out[1] = a1


@njit(cache=True)
def _bw16_into(y, cosets, out, v, q):
    # BW16 = RM(1,4) + 2 D16: decode each of the 32 cosets of 2 D16.
    best = np.inf
    for c in range(cosets.shape[0]):
        for i in range(16):
            v[i] = 0.5 * (y[i] - cosets[c, i])
        _dn_into(v, 0.0, q)
        d = 0.0
        for i in range(16):
            e = y[i] - (2.0 * q[i] + cosets[c, i])
            d += e * e
        if d < best:
            best = d
            for i in range(16):
                out[i] = 2.0 * q[i] + cosets[c, i]


@njit(cache=True)
def _lex_less(a, b):
    for i in range(a.shape[0]):
        if a[i] < b[i]:
            return True
        if a[i] > b[i]:
            return False
    return False


@njit(cache=True)
def _sphere_into(y, R, Qt, T, Gred, out, work):
    """Schnorr-Euchner depth-first search on an upper-triangular basis.

    Equidistant candidates (within a relative 1e-12) are resolved in
    favour of the lexicographically smallest integer vector ``T @ u``.
    """
    n = y.shape[0]
    yt = Qt @ y
    u = np.zeros(n)
    best_u = np.zeros(n)
    step = np.zeros(n)
    centre = np.zeros(n)
    partial = np.zeros(n + 1)
    best = np.inf
    cand_b = work
    best_b = np.zeros(n)

    k = n - 1
    s = yt[k]
    centre[k] = s / R[k, k]
    u[k] = _round_half_away(centre[k])
    step[k] = 1.0 if centre[k] - u[k] >= 0.0 else -1.0
    while True:
        e = (centre[k] - u[k]) * R[k, k]
        d = partial[k + 1] + e * e
        if d <= best + 1e-12 * max(1.0, best):
            if k > 0:
                k -= 1
                partial[k + 1] = d
                s = yt[k]
                for j in range(k + 1, n):
                    s -= R[k, j] * u[j]
                centre[k] = s / R[k, k]
                u[k] = _round_half_away(centre[k])
                step[k] = 1.0 if centre[k] - u[k] >= 0.0 else -1.0
                continue
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += T[i, j] * u[j]
                cand_b[i] = acc
            # reaching a leaf means d <= best + tol: strict win or a tie
            if best == np.inf or d < best - 1e-12 * max(1.0, best) \
                    or _lex_less(cand_b, best_b):
                best = d
                for i in range(n):
                    best_u[i] = u[i]
                    best_b[i] = cand_b[i]
        else:
            # zig-zag order is monotone, so every later sibling is pruned too
            k += 1
            if k >= n:
                break
        while True:
            u[k] += step[k]
            step[k] = -step[k] - (1.0 if step[k] > 0 else -1.0)
            e = (centre[k] - u[k]) * R[k, k]
            if partial[k + 1] + e * e <= best + 1e-12 * max(1.0, best):
                break
            k += 1
            if k >= n:
                break
        if k >= n:
            break
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += Gred[i, j] * best_u[j]
        out[i] = acc


@njit(cache=True)
def quantize_into(kind, y, out, aux, rot, unimod, gen, w1, w2):
    if kind == KIND_ZN:
        for i in range(y.shape[0]):
            out[i] = _round_half_away(y[i])
    elif kind == KIND_DN:
        _dn_into(y, 0.0, out)
    elif kind == KIND_E8:
        _e8_into(y, out, w1)
    elif kind == KIND_A2:
        _a2_into(y, out)
    elif kind == KIND_BW16:
        _bw16_into(y, aux, out, w1, w2)
    else:
        _sphere_into(y, aux, rot, unimod, gen, out, w1)


@njit(cache=True)
def _tie_directions(n):
    # two fixed, generic unit directions for probing Voronoi boundaries
    u = np.empty((2, n))
    for i in range(n):
        u[0, i] = ((i + 1) * 0.6180339887498949) % 1.0 - 0.5
        u[1, i] = ((i + 1) * 0.41421356237309503 + 0.3) % 1.0 - 0.5
    for k in range(2):
        s = 0.0
        for i in range(n):
            s += u[k, i] * u[k, i]
        s = np.sqrt(s)
        for i in range(n):
            u[k, i] /= s
    return u


@njit(cache=True)
def quantize_rows(kind, scale, Y, aux, rot, unimod, gen, tri):
    """Batch nearest points with the lexicographic tie rule.

    Fast decoders pick an arbitrary point at exact ties.  A row whose
    answer changes under a tiny probe along either fixed direction lies on
    (or next to) a cell boundary; it is redone by the sphere search, which
    applies the tie rule.  Z^n keeps its own round-half-away rule.
    """
    N, n = Y.shape
    out = np.empty_like(Y)
    y = np.empty(n)
    q = np.empty(n)
    p = np.empty(n)
    qp = np.empty(n)
    w1 = np.empty(n)
    w2 = np.empty(n)
    inv = 1.0 / scale
    probe = kind != KIND_ZN and kind != KIND_GENERIC and tri.shape[0] == n
    u = _tie_directions(n)
    for r in range(N):
        for i in range(n):
            y[i] = Y[r, i] * inv
        quantize_into(kind, y, q, aux, rot, unimod, gen, w1, w2)
        if probe:
            eps = 1e-7
            for i in range(n):
                eps = max(eps, 1e-7 * abs(y[i]))
            boundary = False
            for k in range(2):
                for sgn in (-1.0, 1.0):
                    for i in range(n):
                        p[i] = y[i] + sgn * eps * u[k, i]
                    quantize_into(kind, p, qp, aux, rot, unimod, gen, w1, w2)
                    for i in range(n):
                        if abs(qp[i] - q[i]) > 1e-9:
                            boundary = True
            if boundary:
                _sphere_into(y, tri, rot, unimod, gen, q, w1)
        for i in range(n):
            out[r, i] = q[i] * scale
    return out


@njit(cache=True)
def _same_coset(q, x, shaping_inv, tol):
    n = q.shape[0]
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += shaping_inv[i, j] * (q[j] - x[j])
        if abs(acc - np.floor(acc + 0.5)) > tol:
            return False
    return True


@njit(cache=True)
def sweep_first_success(kind, scale, X, Y, alphas, shaping_inv,
                        aux, rot, unimod, gen):
    """Index of the first alpha whose decode lands in the coset of x, else -1.

    Decoding succeeds iff Q(alpha*y) - x lies in the shaping lattice, which
    is the same event as recovering the transmitted message index.
    """
    N, n = X.shape
    first = np.full(N, -1, np.int64)
    ay = np.empty(n)
    q = np.empty(n)
    w1 = np.empty(n)
    w2 = np.empty(n)
    inv = 1.0 / scale
    for r in range(N):
        for a in range(alphas.shape[0]):
            al = alphas[a] * inv
            for i in range(n):
                ay[i] = al * Y[r, i]
            quantize_into(kind, ay, q, aux, rot, unimod, gen, w1, w2)
            for i in range(n):
                q[i] *= scale
            if _same_coset(q, X[r], shaping_inv, 1e-6):
                first[r] = a
                break
    return first


@njit(cache=True)
def success_each(kind, scale, X, Y, alphas, shaping_inv,
                 aux, rot, unimod, gen):
    """Success flag for every (trial, alpha) pair, no early exit."""
    N, n = X.shape
    ok = np.zeros((N, alphas.shape[0]), np.bool_)
    ay = np.empty(n)
    q = np.empty(n)
    w1 = np.empty(n)
    w2 = np.empty(n)
    inv = 1.0 / scale
    for r in range(N):
        for a in range(alphas.shape[0]):
            al = alphas[a] * inv
            for i in range(n):
                ay[i] = al * Y[r, i]
            quantize_into(kind, ay, q, aux, rot, unimod, gen, w1, w2)
            for i in range(n):
                q[i] *= scale
            ok[r, a] = _same_coset(q, X[r], shaping_inv, 1e-6)
    return ok
