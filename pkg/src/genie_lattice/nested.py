"""Nested lattice codes Lc/Ls with hypercube (or self-similar) shaping.

Messages are integer vectors ``b`` with ``0 <= b[i] < d[i]`` where ``d`` is
the Smith diagonal of the integer matrix relating the two lattices.  For
``U @ B @ V = diag(d)`` with ``Gs = Gc @ B``, a coding-lattice point with
integer coordinates ``k`` carries the message ``(U @ k) mod d``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.domains import ZZ

from . import lattice as lat

__all__ = [
    "ConfigError", "NestedCode", "nested_code", "code_for_rate",
    "encode", "encode_batch", "decode_index", "decode_index_batch",
    "mod_shaping", "average_power", "codebook", "random_messages",
    "message_to_bits", "bits_to_message", "describe",
]

MAX_ENUMERABLE = 2 ** 24


class ConfigError(ValueError):
    """Requested code or decoder cannot be built."""


@dataclass(frozen=True, eq=False)
class NestedCode:
    coding_lattice: lat.LatticeSpec
    shaping_scale: float
    shaping_base: Optional[lat.LatticeSpec] = None   # None: hypercube M*Z^n
    diag: np.ndarray = field(default=None, repr=False)
    U: np.ndarray = field(default=None, repr=False)
    U_inv: np.ndarray = field(default=None, repr=False)

    @property
    def n(self):
        return self.coding_lattice.dimension

    @property
    def hypercube(self):
        return self.shaping_base is None

    @property
    def shaping_generator(self):
        if self.hypercube:
            return self.shaping_scale * np.eye(self.n)
        return self.shaping_scale * self.shaping_base.generator

    @property
    def shaping_lattice(self):
        if self.hypercube:
            return lat.zn(self.n, scale=self.shaping_scale)
        return self.shaping_base.scaled(self.shaping_scale)

    @property
    def size(self):
        return int(np.prod(self.diag.astype(object)))

    @property
    def rate(self):
        """Bits per dimension, (1/n) log2 |C|."""
        return float(np.sum(np.log2(self.diag))) / self.n

    @property
    def power_per_dim(self):
        if self.hypercube:
            return self.shaping_scale ** 2 / 12.0
        return average_power(self, "empirical")

    @property
    def bits_per_component(self):
        bits = np.log2(self.diag)
        if not np.allclose(bits, np.round(bits)):
            raise ConfigError("index ranges are not powers of two; no bit layout")
        return np.round(bits).astype(int)


def _smith(B):
    D, U, V = smith_normal_decomp(Matrix(B.tolist()), domain=ZZ)
    U = np.array(U.tolist(), dtype=np.int64)
    d = np.array([int(D[i, i]) for i in range(D.shape[0])], dtype=np.int64)
    if np.any(d <= 0):
        raise ConfigError("shaping lattice is not full rank inside the coding lattice")
    U_inv = np.array(Matrix(U.tolist()).inv().tolist(), dtype=np.int64)
    return d, U, U_inv


def nested_code(coding, shaping_scale, shaping_base=None):
    """Code ``coding / (M * shaping_base)``; hypercube shaping by default.

    Raises
    ------
    ConfigError
        If the shaping lattice is not contained in the coding lattice.
    """
    n = coding.dimension
    Gs = shaping_scale * (np.eye(n) if shaping_base is None
                          else shaping_base.generator)
    B = np.linalg.solve(coding.generator, Gs)
    Bi = np.round(B)
    if np.abs(B - Bi).max() > 1e-7:
        raise ConfigError(
            f"shaping lattice (scale {shaping_scale:g}) is not a sublattice of "
            f"{coding.name}")
    d, U, U_inv = _smith(Bi.astype(np.int64))
    return NestedCode(coding_lattice=coding, shaping_scale=float(shaping_scale),
                      shaping_base=shaping_base, diag=d, U=U, U_inv=U_inv)


def _nesting_scales(coding, limit=4096):
    Ginv = coding.generator_inverse
    out = []
    for m in range(1, limit + 1):
        if np.abs(m * Ginv - np.round(m * Ginv)).max() < 1e-7:
            out.append(m)
            if len(out) >= 64:
                break
    return out


def code_for_rate(coding, rate):
    """Hypercube-shaped code on ``coding`` with the requested rate.

    The shaping scale is ``M = 2**rate * V**(1/n)``; the lattice itself is
    not rescaled.  E8 at rate 2 gives M = 4, BW16 at rate 2.25 gives M = 8.
    """
    n = coding.dimension
    M = 2.0 ** rate * coding.volume ** (1.0 / n)
    if abs(M - round(M)) < 1e-9 * M:
        M = float(round(M))
    try:
        return nested_code(coding, M)
    except ConfigError:
        pass
    scales = _nesting_scales(coding)
    if not scales:
        raise ConfigError(f"{coding.name} contains no scaled copy of Z^{n}")
    rates = [math.log2(m ** n / coding.volume) / n for m in scales]
    nearest = min(rates, key=lambda r: abs(r - rate))
    raise ConfigError(
        f"rate {rate:g} is not reachable with hypercube shaping on "
        f"{coding.name}; nearest achievable rate is {nearest:g}")


def mod_shaping(code, y):
    """Reduce ``y`` modulo the shaping lattice.

    Hypercube shaping maps into the half-open cube [-M/2, M/2)^n, which is
    the codebook region; other shapings use the Voronoi cell.
    """
    y = np.asarray(y, dtype=float)
    if code.hypercube:
        M = code.shaping_scale
        return y - M * np.floor(y / M + 0.5)
    return lat.mod_lattice(code.shaping_lattice, y)


def _check_messages(code, B):
    B = np.asarray(B)
    if B.shape[-1] != code.n:
        raise ValueError(f"messages must have length {code.n}")
    if not np.issubdtype(B.dtype, np.integer):
        if np.any(B != np.round(B)):
            raise ValueError("message components must be integers")
        B = B.astype(np.int64)
    if np.any(B < 0) or np.any(B >= code.diag):
        raise ValueError(f"message out of range; bounds are {code.diag.tolist()}")
    return B


def encode_batch(code, B):
    """Codewords (coset leaders) for each message row of ``B``."""
    B = _check_messages(code, np.atleast_2d(B))
    k = B @ code.U_inv.T
    X = k.astype(float) @ code.coding_lattice.generator.T
    return mod_shaping(code, X)


def encode(code, b):
    return encode_batch(code, np.asarray(b)[None])[0]


def decode_index_batch(code, X):
    """Messages carried by coding-lattice points ``X`` (any coset member)."""
    k = lat.integer_coords(code.coding_lattice, np.atleast_2d(X))
    return np.mod(k @ code.U.T, code.diag)


def decode_index(code, x_hat):
    x_hat = np.asarray(x_hat, dtype=float)
    if x_hat.shape != (code.n,):
        raise ValueError(f"expected a vector of length {code.n}")
    return decode_index_batch(code, x_hat[None])[0]


def random_messages(code, rng, count):
    return rng.integers(0, code.diag, size=(count, code.n))


def _all_messages(code, start, stop):
    # mixed-radix digits of the integers in [start, stop)
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, code.n), dtype=np.int64)
    for i in range(code.n - 1, -1, -1):
        out[:, i] = idx % code.diag[i]
        idx //= code.diag[i]
    return out


def codebook(code):
    """All codewords, in mixed-radix message order."""
    if code.size > MAX_ENUMERABLE:
        raise ConfigError(f"codebook of {code.size} words is too large to enumerate")
    return encode_batch(code, _all_messages(code, 0, code.size))


def average_power(code, mode="second_moment"):
    """Per-dimension codebook power.

    ``second_moment`` is M^2/12 (hypercube shaping only); ``empirical``
    averages ||x||^2 / n over the enumerated codebook.
    """
    if mode == "second_moment":
        if not code.hypercube:
            raise ConfigError("second-moment power is defined for hypercube shaping")
        return code.shaping_scale ** 2 / 12.0
    if mode != "empirical":
        raise ValueError(f"unknown power mode {mode!r}")
    if code.size > MAX_ENUMERABLE:
        raise ConfigError(f"codebook of {code.size} words is too large to enumerate")
    total = 0.0
    chunk = 1 << 16
    for start in range(0, code.size, chunk):
        X = encode_batch(code, _all_messages(code, start, min(code.size, start + chunk)))
        total += float(np.sum(X * X))
    return total / (code.n * code.size)


def message_to_bits(code, B):
    """Bit rows, component by component, most significant bit first."""
    B = np.atleast_2d(B)
    widths = code.bits_per_component
    cols = []
    for i, w in enumerate(widths):
        for j in range(w - 1, -1, -1):
            cols.append((B[:, i] >> j) & 1)
    if not cols:
        return np.zeros((B.shape[0], 0), dtype=np.uint8)
    return np.stack(cols, axis=1).astype(np.uint8)


def bits_to_message(code, bits):
    bits = np.atleast_2d(bits).astype(np.int64)
    widths = code.bits_per_component
    B = np.zeros((bits.shape[0], code.n), dtype=np.int64)
    pos = 0
    for i, w in enumerate(widths):
        for _ in range(w):
            B[:, i] = (B[:, i] << 1) | bits[:, pos]
            pos += 1
    return B


def describe(code):
    """Plain-text descriptor echoed into result files."""
    c = code.coding_lattice
    shaping = "hypercube" if code.hypercube else code.shaping_base.name
    lines = [
        f"lattice = {c.name}",
        f"dimension = {c.dimension}",
        f"lattice_scale = {c.scale:.17g}",
        f"shaping = {shaping}",
        f"shaping_scale = {code.shaping_scale:.17g}",
        f"rate = {code.rate:.17g}",
        f"power_per_dim = {code.power_per_dim:.17g}",
        f"index_ranges = {' '.join(str(int(v)) for v in code.diag)}",
    ]
    return "\n".join(lines)
