"""Lattices, exact nearest-point quantization and geometric constants.

A lattice is stored through its generator ``G`` whose columns are the
basis vectors, so that lattice points are ``G @ b`` for integer ``b``.
Built-in lattices (Z^n, D_n, A2, E8, BW16) use classical fast decoders;
anything else goes through a Schnorr-Euchner sphere search on an
LLL-reduced basis.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as K

__all__ = [
    "LatticeSpec", "LatticePoint",
    "zn", "dn", "a2", "e8", "bw16", "custom", "from_name", "load_generator",
    "quantize", "quantize_batch", "integer_coords", "mod_lattice",
    "covering_radius_of", "effective_radius_of", "effective_radius",
    "ball_volume", "deep_hole_search", "reed_muller_1_4",
]

MEMBERSHIP_TOL = 1e-9

_EMPTY2 = np.zeros((1, 1))


def ball_volume(n, r):
    """Volume of the n-dimensional ball of radius ``r``."""
    return math.pi ** (n / 2) * r ** n / math.gamma(n / 2 + 1)


def effective_radius(n, volume):
    """Radius of the n-ball whose volume equals ``volume``."""
    return (volume * math.gamma(n / 2 + 1) / math.pi ** (n / 2)) ** (1.0 / n)


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    """A lattice together with the data its quantizer needs.

    ``covering_radius`` is ``None`` for custom lattices; use
    :func:`covering_radius_of` with ``estimate=True`` to get a lower
    estimate for those.
    """

    name: str
    dimension: int
    generator: np.ndarray
    volume: float
    covering_radius: Optional[float]
    effective_radius: float
    kind: int = field(default=K.KIND_GENERIC, repr=False)
    scale: float = 1.0
    _aux: np.ndarray = field(default=_EMPTY2, repr=False)
    _rot: np.ndarray = field(default=_EMPTY2, repr=False)
    _unimod: np.ndarray = field(default=_EMPTY2, repr=False)
    _gen: np.ndarray = field(default=_EMPTY2, repr=False)
    _tri: np.ndarray = field(default=_EMPTY2, repr=False)

    @property
    def generator_inverse(self):
        return np.linalg.inv(self.generator)

    def scaled(self, s):
        """The lattice ``s * self`` (fast decoders are kept)."""
        if s <= 0:
            raise ValueError("scale must be positive")
        n = self.dimension
        rc = None if self.covering_radius is None else self.covering_radius * s
        return LatticeSpec(
            name=self.name, dimension=n, generator=self.generator * s,
            volume=self.volume * s ** n, covering_radius=rc,
            effective_radius=self.effective_radius * s, kind=self.kind,
            scale=self.scale * s, _aux=self._aux, _rot=self._rot,
            _unimod=self._unimod, _gen=self._gen, _tri=self._tri,
        )


@dataclass(frozen=True, eq=False)
class LatticePoint:
    coords: np.ndarray
    integer_coords: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, LatticePoint):
            return NotImplemented
        return bool(np.array_equal(self.integer_coords, other.integer_coords))

    def __hash__(self):
        return hash(tuple(self.integer_coords.tolist()))


def _build(name, G, kind, covering, aux=_EMPTY2):
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    vol = abs(float(np.linalg.det(G)))
    # every lattice carries sphere-search data; fast decoders use it to settle ties
    R, Qt, T, Gred = _sphere_data(G)
    return LatticeSpec(name=name, dimension=n, generator=G, volume=vol,
                       covering_radius=covering,
                       effective_radius=effective_radius(n, vol),
                       kind=kind, _aux=aux, _rot=Qt, _unimod=T, _gen=Gred, _tri=R)


def zn(n, scale=1.0):
    """The integer lattice Z^n."""
    lat = _build("zn", np.eye(n), K.KIND_ZN, math.sqrt(n) / 2)
    return lat if scale == 1.0 else lat.scaled(scale)


def dn(n, scale=1.0):
    """Checkerboard lattice D_n = {x in Z^n : sum(x) even}, n >= 2."""
    if n < 2:
        raise ValueError("D_n needs n >= 2")
    G = np.zeros((n, n))
    for i in range(n - 1):
        G[i, i], G[i + 1, i] = 1.0, -1.0
    G[n - 2, n - 1], G[n - 1, n - 1] = 1.0, 1.0
    # deep holes (1,0,..,0) and (1/2,...,1/2)
    lat = _build("dn", G, K.KIND_DN, max(1.0, math.sqrt(n) / 2))
    return lat if scale == 1.0 else lat.scaled(scale)


def a2(scale=1.0):
    """Hexagonal lattice with unit minimum distance."""
    G = np.array([[1.0, 0.5], [0.0, math.sqrt(3) / 2]])
    lat = _build("a2", G, K.KIND_A2, 1 / math.sqrt(3))
    return lat if scale == 1.0 else lat.scaled(scale)


def e8(scale=1.0):
    """Gosset lattice D8 u (D8 + 1/2), unit volume, minimum norm 2."""
    G = np.zeros((8, 8))
    G[0, 0] = 2.0
    for i in range(1, 7):
        G[i - 1, i], G[i, i] = -1.0, 1.0
    G[:, 7] = 0.5
    lat = _build("e8", G, K.KIND_E8, 1.0)
    return lat if scale == 1.0 else lat.scaled(scale)


def reed_muller_1_4():
    """All 32 codewords of the first-order Reed-Muller code RM(1,4)."""
    rows = [[1] * 16] + [[(i >> k) & 1 for i in range(16)] for k in range(4)]
    gm = np.array(rows)
    words = [np.array(m) @ gm % 2 for m in itertools.product((0, 1), repeat=5)]
    return np.array(words, dtype=float)


# Hermite basis (columns) of RM(1,4) + 2*D16 inside Z^16.
_BW16_BASIS = np.array([
    [4, 2, 2, 2, 2, 2, 2, 1, 2, 2, 2, 1, 2, 1, 1, 1],
    [0, 2, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0],
    [0, 0, 2, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0],
    [0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1],
    [0, 0, 0, 0, 2, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1, 0],
    [0, 0, 0, 0, 0, 2, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1],
    [0, 0, 0, 0, 0, 0, 2, 1, 0, 0, 0, 0, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 1, 0, 1, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 1, 0, 1, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 1, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 1, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
], dtype=float)


def bw16(scale=1.0, fast=True):
    """Barnes-Wall lattice RM(1,4) + 2*D16: volume 2**12, minimum norm 8.

    Its covering radius in this scaling is sqrt(6); ``(5/2, 1/2, ..., 1/2)``
    is a deep hole.  With ``fast=False`` the lattice is decoded by the
    generic sphere search instead of the 32-coset decoder.
    """
    if fast:
        lat = _build("bw16", _BW16_BASIS, K.KIND_BW16, math.sqrt(6.0),
                     aux=reed_muller_1_4())
    else:
        lat = _with_sphere_search(_build("bw16", _BW16_BASIS, K.KIND_GENERIC,
                                         math.sqrt(6.0)))
    return lat if scale == 1.0 else lat.scaled(scale)


def _lll(G, delta=0.99):
    """LLL reduction of the columns of ``G``.

    Returns ``(Gred, T)`` with ``Gred = G @ T`` and ``T`` unimodular.
    """
    B = np.array(G, dtype=float).T.copy()
    n = B.shape[0]
    T = np.eye(n)

    def gso(B):
        Bs = np.zeros_like(B)
        mu = np.zeros((n, n))
        for i in range(n):
            Bs[i] = B[i]
            for j in range(i):
                mu[i, j] = B[i] @ Bs[j] / (Bs[j] @ Bs[j])
                Bs[i] = Bs[i] - mu[i, j] * Bs[j]
        return Bs, mu

    Bs, mu = gso(B)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q != 0:
                B[k] -= q * B[j]
                T[:, k] -= q * T[:, j]
                Bs, mu = gso(B)
        if Bs[k] @ Bs[k] >= (delta - mu[k, k - 1] ** 2) * (Bs[k - 1] @ Bs[k - 1]):
            k += 1
        else:
            B[[k, k - 1]] = B[[k - 1, k]]
            T[:, [k, k - 1]] = T[:, [k - 1, k]]
            Bs, mu = gso(B)
            k = max(k - 1, 1)
    return B.T.copy(), np.round(T)


def _sphere_data(G):
    Gred, T = _lll(G)
    Q, R = np.linalg.qr(Gred)
    sign = np.sign(np.diag(R))
    sign[sign == 0] = 1.0
    Q = Q * sign
    R = sign[:, None] * R
    return (np.ascontiguousarray(R), np.ascontiguousarray(Q.T),
            np.ascontiguousarray(T), np.ascontiguousarray(Gred))


def _with_sphere_search(lat):
    return LatticeSpec(
        name=lat.name, dimension=lat.dimension, generator=lat.generator,
        volume=lat.volume, covering_radius=lat.covering_radius,
        effective_radius=lat.effective_radius, kind=K.KIND_GENERIC,
        scale=lat.scale, _aux=lat._tri, _rot=lat._rot, _unimod=lat._unimod,
        _gen=lat._gen, _tri=lat._tri,
    )


def custom(G, name="custom"):
    """Lattice generated by the columns of ``G``, decoded by sphere search."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("generator must be a square matrix")
    if abs(np.linalg.det(G)) < 1e-12:
        raise ValueError("generator columns are linearly dependent")
    return _with_sphere_search(_build(name, G, K.KIND_GENERIC, None))


def load_generator(path, name="custom"):
    """Read ``n`` followed by an n x n row-major generator matrix."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty generator file")
    n = int(tokens[0])
    vals = [float(t) for t in tokens[1:]]
    if len(vals) != n * n:
        raise ValueError(f"{path}: expected {n * n} entries, found {len(vals)}")
    return custom(np.array(vals).reshape(n, n), name=name)


def from_name(name, dim=None):
    """Built-in lattice by name (zn and dn need ``dim``)."""
    key = name.lower()
    if key in ("zn", "dn") and dim is None:
        raise ValueError(f"lattice {name!r} needs a dimension")
    makers = {"zn": lambda: zn(dim), "dn": lambda: dn(dim), "a2": a2,
              "e8": e8, "bw16": bw16}
    if key not in makers:
        raise ValueError(f"unknown lattice {name!r}; expected one of {sorted(makers)}")
    return makers[key]()


def _check_dim(lattice, y):
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != lattice.dimension or y.ndim not in (1, 2):
        raise ValueError(
            f"expected vectors of length {lattice.dimension}, got shape {y.shape}")
    return y


def quantize_batch(lattice, Y):
    """Nearest lattice points for each row of ``Y`` (coordinates only)."""
    Y = _check_dim(lattice, Y)
    flat = np.ascontiguousarray(np.atleast_2d(Y))
    out = K.quantize_rows(lattice.kind, lattice.scale, flat, lattice._aux,
                          lattice._rot, lattice._unimod, lattice._gen, lattice._tri)
    return out.reshape(Y.shape)


def integer_coords(lattice, X):
    """Integer vector ``b`` with ``X = G b``; raises if X is off-lattice."""
    X = np.asarray(X, dtype=float)
    b = np.linalg.solve(lattice.generator, np.atleast_2d(X).T).T
    bi = np.round(b)
    err = np.abs(bi @ lattice.generator.T - np.atleast_2d(X))
    if np.any(err > MEMBERSHIP_TOL * max(1.0, float(np.abs(X).max(initial=0.0)))):
        raise ValueError("point is not in the lattice")
    bi = bi.astype(np.int64)
    return bi.reshape(X.shape)


def quantize(lattice, y):
    """Nearest lattice point to ``y``."""
    y = _check_dim(lattice, y)
    if y.ndim != 1:
        raise ValueError("quantize takes one vector; use quantize_batch")
    x = quantize_batch(lattice, y[None])[0]
    return LatticePoint(coords=x, integer_coords=integer_coords(lattice, x))


def mod_lattice(lattice, y):
    """``y - Q(y)``: the representative of y in the Voronoi cell of 0."""
    y = _check_dim(lattice, y)
    return y - quantize_batch(lattice, y)


def effective_radius_of(lattice):
    return effective_radius(lattice.dimension, lattice.volume)


def deep_hole_search(lattice, starts=2000, iterations=600, seed=0):
    """Randomised lower estimate of the covering radius.

    Random points of the fundamental parallelepiped are pushed away from
    their nearest lattice point with a shrinking, jittered step; only moves
    that increase the distance to the lattice are kept.

    Returns
    -------
    radius : float
        Largest distance to the lattice found.
    point : ndarray
        The point attaining it.
    """
    rng = np.random.default_rng(seed)
    n = lattice.dimension
    Y = rng.uniform(0.0, 1.0, (starts, n)) @ lattice.generator.T
    scale = lattice.volume ** (1.0 / n)
    eta = 0.3 * scale
    D = np.linalg.norm(Y - quantize_batch(lattice, Y), axis=1)
    for it in range(iterations):
        V = Y - quantize_batch(lattice, Y)
        norms = np.maximum(np.linalg.norm(V, axis=1, keepdims=True), 1e-300)
        step = eta * rng.uniform(0.0, 1.0, (starts, 1))
        Yn = Y + step * V / norms + 0.02 * eta * rng.standard_normal(Y.shape)
        Dn = np.linalg.norm(Yn - quantize_batch(lattice, Yn), axis=1)
        better = Dn > D
        Y[better] = Yn[better]
        D[better] = Dn[better]
        if (it + 1) % max(1, iterations // 10) == 0:
            eta *= 0.6
    i = int(np.argmax(D))
    return float(D[i]), Y[i].copy()


def covering_radius_of(lattice, estimate=False, **search_kw):
    """Tabulated covering radius, or a deep-hole search estimate.

    Built-in values were checked against :func:`deep_hole_search` and an
    explicit deep hole before being hard-coded.
    """
    if lattice.covering_radius is not None and not estimate:
        return lattice.covering_radius
    if not estimate:
        raise ValueError(
            f"no tabulated covering radius for {lattice.name!r}; pass estimate=True")
    return deep_hole_search(lattice, **search_kw)[0]
