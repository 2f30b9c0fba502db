"""Genie-aided lattice decoding: quantizers, nested codes, WER bounds and simulation."""

from . import bounds, channel, crc, lattice, nested
from .bounds import (BoundQuery, BoundResult, asymptotic_bound, covering_bound,
                     effective_estimate, ps_closed_form, tarokh_bound)
from .channel import (AlphaGrid, ChannelParams, WerEstimate, decode_crc_retry,
                      decode_genie, decode_oneshot, estimate_wer, line_decodable,
                      crossing_snr, simulate, transmit)
from .crc import CRC4_ITU, CrcScheme
from .lattice import (LatticePoint, LatticeSpec, a2, bw16, covering_radius_of, dn, e8,
                      effective_radius_of, mod_lattice, quantize, quantize_batch, zn)
from .nested import (NestedCode, average_power, code_for_rate, decode_index, encode,
                     nested_code)

__version__ = "0.1.0"
