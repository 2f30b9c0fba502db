"""Command-line experiment runner.

Three subcommands write CSV (to ``--out`` or stdout):

``bound``
    covering / effective / tarokh / asymptotic values over an SNR grid.
``simulate``
    paired Monte Carlo WER per decoder over an SNR grid.
``compare``
    the two joined on ``snr_db`` with ``wer / bound`` ratio columns.

Every file starts with ``#`` lines echoing the configuration; with
``--out`` the same block is also written to ``<out>.config.txt``.  The
worker count is deliberately left out of the echo so that runs with
different ``--workers`` produce identical files.
"""

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import bounds, channel, lattice, nested

__all__ = ["build_parser", "main", "run_bound_sweep", "run_simulation",
           "run_compare", "BOUND_COLUMNS", "SIM_COLUMNS"]

BOUND_COLUMNS = ("snr_db", "kind", "n", "radius", "power", "sigma2", "value",
                 "abs_err", "status")
SIM_COLUMNS = ("snr_db", "decoder", "trials", "errors", "wer", "ci95",
               "mean_attempts", "seed")
BOUND_KINDS = ("covering", "effective", "tarokh", "asymptotic")
_NOT_ECHOED = {"workers", "out", "func"}


class UsageError(ValueError):
    pass


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def snr_grid(start, stop, step):
    if start is None or stop is None:
        raise UsageError("--snr-start and --snr-stop are required")
    if not step > 0:
        raise UsageError("--snr-step must be positive")
    if stop < start:
        raise UsageError("--snr-stop must not be below --snr-start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 10) for k in range(count)]


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _lattice(args):
    if args.generator_file:
        lt = lattice.load_generator(args.generator_file)
    else:
        lt = lattice.from_name(args.lattice, args.dim)
    if args.lattice_scale != 1.0:
        lt = lt.scaled(args.lattice_scale)
    return lt


def _code(args):
    if args.rate is None:
        raise UsageError("--rate is required when a lattice code is used")
    return nested.code_for_rate(_lattice(args), args.rate)


def _config_lines(args, code=None):
    lines = [f"command = {args.command}"]
    for key in sorted(vars(args)):
        if key in _NOT_ECHOED or key == "command":
            continue
        lines.append(f"{key} = {getattr(args, key)}")
    if code is not None:
        lines += nested.describe(code).splitlines()
    return lines


def _write(args, lines, columns, rows):
    buf = io.StringIO()
    for line in lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        with open(args.out + ".config.txt", "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return text


def _bound_rows(args):
    kinds = _csv_list(args.kinds)
    bad = [k for k in kinds if k not in BOUND_KINDS]
    if bad:
        raise UsageError(f"unknown bound kind(s) {bad}; expected {list(BOUND_KINDS)}")
    snrs = snr_grid(args.snr_start, args.snr_stop, args.snr_step)
    code = None
    if args.n is not None:
        # raw query: fixed sigma2, power swept as sigma2 * SNR
        if args.radius != "value" or args.radius_value is None:
            raise UsageError("--n needs --radius value --radius-value R")
        n, r_main = args.n, args.radius_value
        r_e = r_main
        def params(snr):
            return args.sigma2 * 10.0 ** (snr / 10.0), args.sigma2
    else:
        code = _code(args)
        lt = code.coding_lattice
        n, r_e = lt.dimension, lt.effective_radius
        if args.radius == "covering":
            r_main = lattice.covering_radius_of(lt, estimate=args.estimate_covering)
        elif args.radius == "effective":
            r_main = r_e
        else:
            if args.radius_value is None:
                raise UsageError("--radius value needs --radius-value")
            r_main = args.radius_value
        P = code.power_per_dim
        def params(snr):
            return P, P / 10.0 ** (snr / 10.0)

    rows = []
    for snr in snrs:
        P, s2 = params(snr)
        for kind in kinds:
            r = r_e if kind in ("effective", "tarokh") else r_main
            status, value, err = "ok", float("nan"), float("nan")
            try:
                if kind == "tarokh":
                    res = bounds.tarokh_bound(n, r, s2)
                elif kind == "asymptotic":
                    res = bounds.asymptotic_bound(n, r, s2)
                else:
                    res = bounds.cone_bound(bounds.BoundQuery(n, r, P, s2), kind)
                value, err = res.value, res.quadrature_abs_err
            except bounds.BoundRestrictionError:
                status = "restriction_violated: radius^2 >= n*P"
            rows.append([_fmt(snr), kind, str(n), _fmt(r), _fmt(P), _fmt(s2),
                         _fmt(value), _fmt(err), status])
    return code, rows


def run_bound_sweep(args):
    """Bound values per (snr_db, kind); returns the CSV text."""
    code, rows = _bound_rows(args)
    return _write(args, _config_lines(args, code), BOUND_COLUMNS, rows)


def _grid(args):
    return channel.AlphaGrid(min=args.alpha_min, max=args.alpha_max,
                             step=args.alpha_step,
                             include_mmse=args.force_include_mmse)


def _sim_rows(args):
    code = _code(args)
    decoders = _csv_list(args.decoder)
    bad = [d for d in decoders if d not in channel.DECODERS]
    if bad:
        raise UsageError(f"unknown decoder(s) {bad}; expected {list(channel.DECODERS)}")
    grid = _grid(args)
    rows = []
    for snr in snr_grid(args.snr_start, args.snr_stop, args.snr_step):
        ch = channel.ChannelParams.from_snr_db(code.power_per_dim, snr)
        est = channel.simulate(code, ch, decoders, grid=grid, max_trials=args.trials,
                               max_errors=args.max_errors, seed=args.seed,
                               workers=args.workers)
        for d in decoders:
            e = est[d]
            rows.append([_fmt(snr), d, str(e.trials), str(e.errors), _fmt(e.wer),
                         _fmt(e.ci95), _fmt(e.mean_attempts), str(e.seed)])
    return code, rows


def run_simulation(args):
    """WER per (snr_db, decoder); returns the CSV text."""
    code, rows = _sim_rows(args)
    return _write(args, _config_lines(args, code), SIM_COLUMNS, rows)


def _read_csv(path):
    with open(path, encoding="utf-8") as fh:
        body = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(body))


def _join(bound_rows, sim_rows):
    bound = {}
    kinds = []
    for r in bound_rows:
        bound.setdefault(float(r["snr_db"]), {})[r["kind"]] = float(r["value"])
        if r["kind"] not in kinds:
            kinds.append(r["kind"])
    sim_snrs = sorted({float(r["snr_db"]) for r in sim_rows})
    missing_b = [s for s in sim_snrs if s not in bound]
    missing_s = [s for s in sorted(bound) if s not in sim_snrs]
    if missing_b or missing_s:
        parts = []
        if missing_b:
            parts.append("no bound rows at snr_db " + ", ".join(map(_fmt, missing_b)))
        if missing_s:
            parts.append("no simulation rows at snr_db " + ", ".join(map(_fmt, missing_s)))
        raise UsageError("mismatched SNR grids: " + "; ".join(parts))
    columns = ["snr_db", "decoder", "trials", "errors", "wer", "ci95"]
    for k in kinds:
        columns += [k, f"wer_over_{k}"]
    rows = []
    for r in sim_rows:
        b = bound[float(r["snr_db"])]
        wer = float(r["wer"])
        row = [r[c] for c in columns[:6]]
        for k in kinds:
            v = b.get(k, float("nan"))
            row += [_fmt(v), _fmt(wer / v if v > 0 else float("nan"))]
        rows.append(row)
    return columns, rows


def run_compare(args):
    """Simulation rows joined with bound rows on snr_db; returns the CSV text."""
    code = None
    if args.bound_csv or args.sim_csv:
        if not (args.bound_csv and args.sim_csv):
            raise UsageError("--bound-csv and --sim-csv go together")
        brows, srows = _read_csv(args.bound_csv), _read_csv(args.sim_csv)
    else:
        code, b = _bound_rows(args)
        _, s = _sim_rows(args)
        brows = [dict(zip(BOUND_COLUMNS, r)) for r in b]
        srows = [dict(zip(SIM_COLUMNS, r)) for r in s]
    columns, rows = _join(brows, srows)
    return _write(args, _config_lines(args, code), columns, rows)


def _add_common(p, sim=False, bound=False):
    g = p.add_argument_group("code")
    g.add_argument("--lattice", default="e8",
                   help="built-in lattice: zn, dn, a2, e8, bw16 (default e8)")
    g.add_argument("--dim", type=int, default=None, help="dimension for zn/dn")
    g.add_argument("--generator-file", default=None,
                   help="custom lattice: n then n*n row-major generator entries")
    g.add_argument("--lattice-scale", type=float, default=1.0,
                   help="scale applied to the lattice (default 1)")
    g.add_argument("--rate", type=float, default=None,
                   help="code rate in bits/dimension (E8: 2, BW16: 2.25)")
    s = p.add_argument_group("SNR grid (dB)")
    s.add_argument("--snr-start", type=float, default=None)
    s.add_argument("--snr-stop", type=float, default=None)
    s.add_argument("--snr-step", type=float, default=0.25, help="default 0.25")
    if bound:
        b = p.add_argument_group("bounds")
        b.add_argument("--kinds", default="covering,effective",
                       help="comma list from covering,effective,tarokh,asymptotic "
                            "(default covering,effective)")
        b.add_argument("--radius", choices=("covering", "effective", "value"),
                       default="covering",
                       help="radius for covering and asymptotic rows; effective and "
                            "tarokh rows always use r_e (default covering)")
        b.add_argument("--radius-value", type=float, default=None)
        b.add_argument("--estimate-covering", action="store_true",
                       help="allow a deep-hole estimate of r_c for custom lattices")
        b.add_argument("--n", type=int, default=None,
                       help="raw query dimension; power is swept as sigma2 * SNR")
        b.add_argument("--sigma2", type=float, default=1.0,
                       help="noise variance for raw queries (default 1)")
    if sim:
        d = p.add_argument_group("simulation")
        d.add_argument("--decoder", default="alpha1,mmse,genie,crc_retry",
                       help="comma list from " + ",".join(channel.DECODERS) +
                            " (default alpha1,mmse,genie,crc_retry)")
        d.add_argument("--alpha-min", type=float, default=0.5, help="default 0.5")
        d.add_argument("--alpha-max", type=float, default=1.5, help="default 1.5")
        d.add_argument("--alpha-step", type=float, default=0.01, help="default 0.01")
        d.add_argument("--force-include-mmse", action=argparse.BooleanOptionalAction,
                       default=True, help="put alpha_MMSE first in the genie grid "
                                          "(default on)")
        d.add_argument("--trials", type=int, default=10 ** 6,
                       help="maximum trials per SNR point (default 1e6)")
        d.add_argument("--max-errors", type=int, default=100,
                       help="stop once every decoder has this many errors (default 100)")
        d.add_argument("--seed", type=int, default=0, help="default 0")
        d.add_argument("--workers", type=int, default=1,
                       help="worker processes; results do not depend on it (default 1)")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="genie-lattice",
        description="WER bounds and genie-aided lattice decoding simulations.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("bound", help="bound sweep over SNR")
    _add_common(p, bound=True)
    p.set_defaults(func=run_bound_sweep)
    p = sub.add_parser("simulate", help="Monte Carlo WER over SNR")
    _add_common(p, sim=True)
    p.set_defaults(func=run_simulation)
    p = sub.add_parser("compare", help="bounds joined with simulated WER")
    _add_common(p, sim=True, bound=True)
    p.add_argument("--bound-csv", default=None, help="join this bound CSV ...")
    p.add_argument("--sim-csv", default=None, help="... with this simulation CSV")
    p.set_defaults(func=run_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except (UsageError, nested.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.out:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
