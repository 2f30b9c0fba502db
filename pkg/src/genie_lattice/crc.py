"""Cyclic redundancy check embedded in lattice message vectors.

The parity bits occupy the first (lowest-index) bit positions of the
message bit layout from :func:`genie_lattice.nested.message_to_bits`; the
remaining positions carry information bits.
"""

from dataclasses import dataclass

import numpy as np

from . import nested

__all__ = ["CrcScheme", "CRC4_ITU", "crc_remainder", "embed", "crc_ok",
           "info_width"]


@dataclass(frozen=True)
class CrcScheme:
    """Non-reflected CRC with zero initial register.

    ``poly`` omits the leading x**width term, so x^4 + x + 1 is 0x3.
    """

    width: int = 4
    poly: int = 0x3
    name: str = "CRC-4-ITU"

    @property
    def parity_bits(self):
        return self.width


CRC4_ITU = CrcScheme()


def crc_remainder(scheme, bits):
    """Parity rows for each row of info ``bits`` (MSB first)."""
    bits = np.atleast_2d(bits).astype(np.int64)
    w = scheme.width
    top = 1 << (w - 1)
    mask = (1 << w) - 1
    reg = np.zeros(bits.shape[0], dtype=np.int64)
    for j in range(bits.shape[1]):
        fb = ((reg & top) != 0).astype(np.int64) ^ bits[:, j]
        reg = (reg << 1) & mask
        reg ^= fb * scheme.poly
    out = np.empty((bits.shape[0], w), dtype=np.uint8)
    for j in range(w):
        out[:, j] = (reg >> (w - 1 - j)) & 1
    return out


def info_width(code, scheme):
    total = int(code.bits_per_component.sum())
    if scheme.width >= total:
        raise nested.ConfigError(
            f"{scheme.width} parity bits do not fit in a {total}-bit message")
    return total - scheme.width


def embed(code, scheme, info_bits):
    """Messages whose leading bits are the CRC of ``info_bits``."""
    info_bits = np.atleast_2d(info_bits).astype(np.uint8)
    k = info_width(code, scheme)
    if info_bits.shape[1] != k:
        raise ValueError(f"expected {k} information bits per message")
    parity = crc_remainder(scheme, info_bits)
    return nested.bits_to_message(code, np.hstack([parity, info_bits]))


def crc_ok(code, scheme, B):
    """True for message rows whose parity matches their information bits."""
    bits = nested.message_to_bits(code, B)
    w = scheme.width
    return np.all(crc_remainder(scheme, bits[:, w:]) == bits[:, :w], axis=1)
