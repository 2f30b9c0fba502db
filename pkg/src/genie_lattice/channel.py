"""AWGN transmission, one-shot / genie / CRC-retry decoding and WER estimation.

Random numbers come from counter-based Philox streams: trial ``i`` belongs
to block ``i // block_size`` and block ``k`` draws from the stream keyed by
the seed with counter offset ``k << 192``.  The sample sequence therefore
depends only on ``(seed, block_size)``, never on how blocks are spread over
worker processes.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from . import crc as crcmod
from . import lattice as lat
from . import nested

__all__ = [
    "ChannelParams", "AlphaGrid", "WerEstimate", "GenieOutcome", "CrcOutcome",
    "TrialRecords", "DECODERS", "BLOCK_SIZE",
    "transmit", "decode_oneshot", "decode_genie", "line_decodable",
    "decode_crc_retry", "default_crc_alphas", "block_rng",
    "estimate_wer", "simulate", "crossing_snr",
]

BLOCK_SIZE = 8192
DECODERS = ("alpha1", "mmse", "genie", "crc_single", "crc_retry")
_CRC_FAMILY = ("crc_single", "crc_retry")


@dataclass(frozen=True)
class ChannelParams:
    sigma2: float
    snr: float

    def __post_init__(self):
        if not self.sigma2 > 0 or not self.snr > 0:
            raise ValueError("sigma2 and snr must be positive")

    @classmethod
    def from_snr_db(cls, power, snr_db):
        snr = 10.0 ** (snr_db / 10.0)
        return cls(sigma2=power / snr, snr=snr)

    @classmethod
    def from_sigma2(cls, power, sigma2):
        return cls(sigma2=sigma2, snr=power / sigma2)

    @property
    def alpha_mmse(self):
        return self.snr / (1.0 + self.snr)

    @property
    def snr_db(self):
        return 10.0 * math.log10(self.snr)


@dataclass(frozen=True)
class AlphaGrid:
    """Scaling factors tried by the genie decoder.

    Trial order is alpha_MMSE (when ``include_mmse``), then the
    ``always_include`` values, then grid points by increasing distance from
    alpha_MMSE.  Both endpoints belong to the grid when the step reaches
    them.
    """

    min: float = 0.5
    max: float = 1.5
    step: float = 0.01
    always_include: tuple = (1.0,)
    include_mmse: bool = True

    def __post_init__(self):
        if not self.min < self.max:
            raise ValueError("alpha grid needs min < max")
        if not self.step > 0:
            raise ValueError("alpha grid step must be positive")

    def points(self):
        count = int(math.floor((self.max - self.min) / self.step + 1e-9)) + 1
        return np.round(self.min + self.step * np.arange(count), 12)

    def trial_order(self, alpha_mmse):
        head = ([alpha_mmse] if self.include_mmse else []) + list(self.always_include)
        pts = self.points()
        key = np.lexsort((pts, np.abs(pts - alpha_mmse)))
        out = []
        for a in head + list(pts[key]):
            if all(abs(a - b) > 1e-12 for b in out):
                out.append(float(a))
        return np.array(out)


@dataclass
class WerEstimate:
    decoder: str
    trials: int
    errors: int
    seed: int
    mean_attempts: float = 1.0
    crc_wrong_checks: int = 0
    crc_false_accepts: int = 0

    @property
    def wer(self):
        return self.errors / self.trials if self.trials else 0.0

    @property
    def ci95(self):
        # normal approximation; adequate at >= 100 errors
        p = self.wer
        return 1.96 * math.sqrt(p * (1.0 - p) / self.trials) if self.trials else 0.0

    @property
    def false_accept_rate(self):
        if not self.crc_wrong_checks:
            return float("nan")
        return self.crc_false_accepts / self.crc_wrong_checks


@dataclass(frozen=True)
class GenieOutcome:
    success: bool
    alpha_used: Optional[float]
    attempts: int


@dataclass(frozen=True)
class CrcOutcome:
    message: Optional[np.ndarray]
    attempts: int

    @property
    def failed(self):
        return self.message is None


def transmit(code, b, channel, rng):
    """Channel output ``encode(b) + z`` with z ~ N(0, sigma2 I)."""
    x = nested.encode(code, b)
    return x + math.sqrt(channel.sigma2) * rng.standard_normal(code.n)


def decode_oneshot(code, y, alpha):
    """Dec(alpha*y): quantize to the coding lattice, reduce, read the index."""
    y = np.asarray(y, dtype=float)
    q = lat.quantize_batch(code.coding_lattice, alpha * y)
    return nested.decode_index(code, nested.mod_shaping(code, q))


def decode_genie(code, y, truth, grid, alpha_mmse=None):
    """Retry decoding over ``grid`` until the decoded message equals ``truth``.

    ``grid`` is an :class:`AlphaGrid` (which needs ``alpha_mmse`` when it
    includes it) or an explicit sequence of alphas in trial order.
    """
    if isinstance(grid, AlphaGrid):
        if grid.include_mmse and alpha_mmse is None:
            raise ValueError("alpha_mmse is required when the grid includes it")
        alphas = grid.trial_order(alpha_mmse if alpha_mmse is not None else 1.0)
    else:
        alphas = np.asarray(list(grid), dtype=float)
    if alphas.size == 0:
        raise ValueError("empty alpha grid")
    truth = np.asarray(truth)
    for i, a in enumerate(alphas):
        if np.array_equal(decode_oneshot(code, y, a), truth):
            return GenieOutcome(True, float(a), i + 1)
    return GenieOutcome(False, None, int(alphas.size))


def line_decodable(x, y, r):
    """Whether the line through 0 and ``y`` meets the ball of radius r about x.

    Works row-wise on stacked inputs.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    yy = np.sum(y * y, axis=-1)
    if np.any(yy == 0):
        raise ValueError("y must be non-zero")
    xy = np.sum(x * y, axis=-1)
    d2 = np.sum(x * x, axis=-1) - xy * xy / yy
    return np.maximum(d2, 0.0) <= r * r


def decode_crc_retry(code, y, alphas, crc=crcmod.CRC4_ITU):
    """Return the first candidate decode whose embedded CRC verifies."""
    crcmod.info_width(code, crc)
    for i, a in enumerate(alphas):
        b = decode_oneshot(code, y, a)
        if crcmod.crc_ok(code, crc, b[None])[0]:
            return CrcOutcome(b, i + 1)
    return CrcOutcome(None, len(alphas))


def default_crc_alphas(alpha_mmse):
    """alpha_MMSE followed by one shrunk and one enlarged candidate."""
    return (alpha_mmse, alpha_mmse - 0.1, alpha_mmse + 0.1)


def block_rng(seed, block):
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 192))


@dataclass
class TrialRecords:
    """Per-trial outcomes in trial order (``attempts`` counts decodes tried)."""

    success: dict = field(default_factory=dict)
    attempts: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Job:
    code: nested.NestedCode
    channel: ChannelParams
    decoders: tuple
    genie_alphas: np.ndarray
    crc_alphas: tuple
    crc: crcmod.CrcScheme
    seed: int
    block_size: int


def _kernel_args(code):
    c = code.coding_lattice
    sinv = np.ascontiguousarray(np.linalg.inv(code.shaping_generator))
    return c.kind, c.scale, sinv, c._aux, c._rot, c._unimod, c._gen


def _quantize_fast(c, Y):
    # no boundary probing: exact ties have probability zero under Gaussian noise
    return K.quantize_rows(c.kind, c.scale, np.ascontiguousarray(Y), c._aux, c._rot,
                           c._unimod, c._gen, _NO_TIE_DATA)


_NO_TIE_DATA = np.zeros((1, 1))


def _run_block(job, block):
    code, ch = job.code, job.channel
    rng = block_rng(job.seed, block)
    B = job.block_size
    crc_family = job.decoders[0] in _CRC_FAMILY
    if crc_family:
        k = crcmod.info_width(code, job.crc)
        msgs = crcmod.embed(code, job.crc, rng.integers(0, 2, size=(B, k)))
    else:
        msgs = nested.random_messages(code, rng, B)
    X = nested.encode_batch(code, msgs)
    Y = X + math.sqrt(ch.sigma2) * rng.standard_normal(X.shape)

    succ, att = {}, {}
    stats = {"wrong": {}, "fa": {}}
    if crc_family:
        cand, seen = [], []
        for a in job.crc_alphas:
            Q = _quantize_fast(code.coding_lattice, a * Y)
            Bh = nested.decode_index_batch(code, Q)
            repeat = np.zeros(B, dtype=bool)
            for prev in seen:
                repeat |= np.all(Bh == prev, axis=1)
            seen.append(Bh)
            cand.append((np.all(Bh == msgs, axis=1), crcmod.crc_ok(code, job.crc, Bh),
                         repeat))
        correct = np.stack([c[0] for c in cand], axis=1)
        passed = np.stack([c[1] for c in cand], axis=1)
        fresh = ~np.stack([c[2] for c in cand], axis=1)
        wrong_pass = passed & ~correct
        for d in job.decoders:
            if d == "crc_single":
                succ[d] = passed[:, 0] & correct[:, 0]
                att[d] = np.ones(B, dtype=np.int64)
                checked = np.zeros_like(passed)
                checked[:, 0] = True
            else:
                any_pass = passed.any(axis=1)
                first = np.where(any_pass, np.argmax(passed, axis=1), passed.shape[1] - 1)
                succ[d] = any_pass & correct[np.arange(B), first]
                att[d] = first + 1
                checked = np.arange(passed.shape[1])[None, :] <= first[:, None]
            # a word already rejected earlier in the trial is not a new check
            stats["wrong"][d] = checked & ~correct & fresh
            stats["fa"][d] = checked & wrong_pass & fresh
        return succ, att, stats

    kind, scale, sinv, aux, rot, uni, gen = _kernel_args(code)
    one = [a for a in ("alpha1", "mmse") if a in job.decoders]
    genie_first = None
    if "genie" in job.decoders:
        genie_first = K.sweep_first_success(kind, scale, X, Y, job.genie_alphas,
                                            sinv, aux, rot, uni, gen)
        succ["genie"] = genie_first >= 0
        att["genie"] = np.where(genie_first >= 0, genie_first + 1,
                                job.genie_alphas.size)
        if "mmse" in one and abs(job.genie_alphas[0] - ch.alpha_mmse) < 1e-15:
            succ["mmse"] = genie_first == 0
            one.remove("mmse")
    if one:
        alphas = np.array([1.0 if d == "alpha1" else ch.alpha_mmse for d in one])
        ok = K.success_each(kind, scale, X, Y, alphas, sinv, aux, rot, uni, gen)
        for j, d in enumerate(one):
            succ[d] = ok[:, j]
    for d in ("alpha1", "mmse"):
        if d in succ:
            att[d] = np.ones(B, dtype=np.int64)
    return succ, att, stats


def _run_block_star(args):
    return _run_block(*args)


def _families(decoders):
    unknown = [d for d in decoders if d not in DECODERS]
    if unknown:
        raise ValueError(f"unknown decoder(s) {unknown}; expected {DECODERS}")
    plain = tuple(d for d in decoders if d not in _CRC_FAMILY)
    crc = tuple(d for d in decoders if d in _CRC_FAMILY)
    return [f for f in (plain, crc) if f]


def simulate(code, channel, decoders=("alpha1", "mmse", "genie"), *,
             grid=AlphaGrid(), crc=crcmod.CRC4_ITU, crc_alphas=None,
             max_trials=10 ** 6, max_errors=100, seed=0, workers=1,
             block_size=BLOCK_SIZE, keep_records=False):
    """Paired Monte Carlo WER estimates for several decoders.

    Decoders of one family (``alpha1``/``mmse``/``genie`` on uniform
    messages, ``crc_single``/``crc_retry`` on CRC-carrying messages) see
    exactly the same trials, and the family stops once every member has
    ``max_errors`` errors or ``max_trials`` trials have run.  Sharing the
    stopping point makes genie <= mmse hold trial by trial, not just on
    average.

    Returns
    -------
    dict
        decoder -> :class:`WerEstimate`; with ``keep_records`` a pair
        ``(estimates, TrialRecords)``.
    """
    if max_trials < 1:
        raise ValueError("max_trials must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    families = _families(tuple(decoders))
    genie_alphas = grid.trial_order(channel.alpha_mmse)
    if crc_alphas is None:
        crc_alphas = default_crc_alphas(channel.alpha_mmse)
    crc_alphas = tuple(float(a) for a in crc_alphas)

    estimates, records = {}, TrialRecords()
    for fam in families:
        if fam[0] in _CRC_FAMILY:
            crcmod.info_width(code, crc)
        job = _Job(code, channel, fam, genie_alphas, crc_alphas, crc, seed,
                   block_size)
        est, rec = _run_family(job, max_trials, max_errors, workers, keep_records)
        estimates.update(est)
        records.success.update(rec.success)
        records.attempts.update(rec.attempts)
    ordered = {d: estimates[d] for d in decoders}
    return (ordered, records) if keep_records else ordered


def _run_family(job, max_trials, max_errors, workers, keep_records):
    decs = job.decoders
    errors = dict.fromkeys(decs, 0)
    attempts = dict.fromkeys(decs, 0)
    wrong = dict.fromkeys(decs, 0)
    fa = dict.fromkeys(decs, 0)
    rec = TrialRecords({d: [] for d in decs}, {d: [] for d in decs})
    trials = 0
    block = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        done = False
        while not done:
            wave = list(range(block, block + max(1, workers)))
            block += len(wave)
            if pool is None:
                results = [_run_block(job, b) for b in wave]
            else:
                results = list(pool.map(_run_block_star, [(job, b) for b in wave]))
            for succ, att, stats in results:
                take = min(job.block_size, max_trials - trials)
                for d in decs:
                    s = succ[d][:take]
                    errors[d] += int(take - np.count_nonzero(s))
                    attempts[d] += int(att[d][:take].sum())
                    if d in stats["wrong"]:
                        wrong[d] += int(stats["wrong"][d][:take].sum())
                        fa[d] += int(stats["fa"][d][:take].sum())
                    if keep_records:
                        rec.success[d].append(s)
                        rec.attempts[d].append(att[d][:take])
                trials += take
                if trials >= max_trials or all(errors[d] >= max_errors for d in decs):
                    done = True
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    est = {d: WerEstimate(decoder=d, trials=trials, errors=errors[d],
                          seed=job.seed, mean_attempts=attempts[d] / trials,
                          crc_wrong_checks=wrong[d], crc_false_accepts=fa[d])
           for d in decs}
    if keep_records:
        rec = TrialRecords({d: np.concatenate(v) for d, v in rec.success.items()},
                           {d: np.concatenate(v) for d, v in rec.attempts.items()})
    return est, rec


def estimate_wer(code, channel, decoder="mmse", **kw):
    """WER of a single decoder; keywords as in :func:`simulate`."""
    return simulate(code, channel, (decoder,), **kw)[decoder]


def crossing_snr(snr_db, wer, target=1e-4):
    """SNR (dB) where a WER curve first drops below ``target``.

    Interpolates log10(wer) linearly between the bracketing grid points.
    Returns None when the curve never crosses.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    wer = np.asarray(wer, dtype=float)
    order = np.argsort(snr_db)
    s, w = snr_db[order], wer[order]
    for i in range(len(s) - 1):
        if w[i] >= target > w[i + 1]:
            if w[i + 1] <= 0:
                return float(s[i + 1])
            lo, hi = math.log10(w[i]), math.log10(w[i + 1])
            frac = (lo - math.log10(target)) / (lo - hi)
            return float(s[i] + frac * (s[i + 1] - s[i]))
    return None
