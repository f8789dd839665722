"""Command-line interface: design, verify, analyze, simulate, compare.

Exit codes: 0 success, 1 verification failed, 2 usage error, 3 work budget
exceeded.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
from typing import Sequence

from . import outage_analysis as oa
from .block_code import SystematicCode, design_network_code, is_mds, min_distance, singleton_bound
from .errors import BudgetExceeded, GdncError
from .fault_model import GdncParams, composite_distance
from .finite_field import parse_field_spec
from .gf_matrix import format_matrix, read_matrix
from .monte_carlo import ChannelMode, ErrorUnit, Scheme, SimConfig, run_sim

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

ANALYTIC_SCHEMES = ("bnc", "daf", "dnc2-reciprocal", "dnc2-nonreciprocal", "dnc", "gdnc")


class UsageError(Exception):
    pass


def parse_snr_grid(text: str) -> list[float]:
    """``"a:b:step"`` (inclusive) or a comma-separated list of dB values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"SNR grid must be a:b:step, got {text!r}")
        a, b, step = (float(x) for x in parts)
        if step <= 0 or b < a:
            raise UsageError(f"bad SNR grid {text!r}")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return [round(a + i * step, 10) for i in range(count)]
    return [float(x) for x in text.split(",") if x.strip()]


def _split(text: str | None) -> list[str]:
    if not text:
        return []
    return [s.strip().lower() for s in text.split(",") if s.strip()]


def _read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise UsageError(f"config line {line!r} is not key=value")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _params_from(args, header: dict[str, str] | None = None) -> GdncParams:
    header = header or {}
    values = {}
    for name, hkey in (("users", "M"), ("k1", "k1"), ("k2", "k2")):
        v = getattr(args, name, None)
        if v is None and hkey in header:
            v = int(header[hkey])
        if v is None:
            raise UsageError(f"--{name} is required")
        values[hkey] = int(v)
    return GdncParams(values["M"], values["k1"], values["k2"])


def _load_code(args, params: GdncParams | None = None) -> tuple[SystematicCode, GdncParams]:
    field = parse_field_spec(args.field) if args.field else None
    if args.matrix:
        if not os.path.isfile(args.matrix):
            raise UsageError(f"matrix file {args.matrix!r} not found")
        P, header = read_matrix(args.matrix, field)
        code = SystematicCode.from_parity(P)
        params = params or _params_from(args, header)
    else:
        params = params or _params_from(args)
        code = design_network_code(params.M, params.k1, params.k2, field)
    params.check_code(code)
    return code, params


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout, False
    _check_writable(path)
    return open(path, "w", encoding="utf-8", newline=""), True


def _emit(text: str, path: str | None) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


# -- subcommands ---------------------------------------------------------------

def cmd_design(args) -> int:
    params = _params_from(args)
    field = parse_field_spec(args.field) if args.field else None
    code = design_network_code(params.M, params.k1, params.k2, field)
    text = format_matrix(code.P, M=params.M, k1=params.k1, k2=params.k2)
    _emit(text, args.out)
    log = sys.stderr if args.out in (None, "-") else sys.stdout
    verdict = "MDS" if is_mds(code) else "not MDS"
    try:
        d = str(min_distance(code))
    except BudgetExceeded:
        d = "unknown (budget exceeded)"
    print(f"{verdict}, d_min={d}, n={code.n}, k={code.k}, GF({code.field.q}) {code.field.spec}", file=log)
    return EXIT_OK


def verify_report(code: SystematicCode, params: GdncParams, max_patterns: int | None) -> tuple[str, int]:
    out = io.StringIO()
    target = params.max_diversity
    print(f"shape: P {code.k}x{code.n - code.k}, (n, k) = ({code.n}, {code.k}), "
          f"M={params.M} k1={params.k1} k2={params.k2}: ok", file=out)
    print(f"field: GF({code.field.q}) {code.field.spec}", file=out)
    print(f"mds: {'yes' if is_mds(code) else 'no'}", file=out)
    print(f"d_min: {min_distance(code)} (singleton bound {singleton_bound(code.n, code.k)})", file=out)
    res = composite_distance(code, params, max_patterns=max_patterns)
    print(f"composite distance: {res.value}", file=out)
    print(f"guaranteed diversity: {res.value} (maximum M+k2 = {target})", file=out)
    witness = ", ".join(f"({e.source}->{e.decoder}, {e.slot})" for e in res.witness)
    print(f"witness: [{witness}] (faulty d_min {res.faulty_distance}, {res.witness.count} faults)", file=out)
    return out.getvalue(), EXIT_OK if res.value == target else EXIT_FAILED


def cmd_verify(args) -> int:
    code, params = _load_code(args)
    try:
        text, status = verify_report(code, params, args.max_patterns)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}; composite distance <= {exc.upper_bound}", file=sys.stderr)
        return EXIT_BUDGET
    sys.stdout.write(text)
    return status


def analysis_csv(schemes: Sequence[str], grid: Sequence[float], rate: float, params: GdncParams | None) -> str:
    lines = ["snr_db,pe,scheme,mode,p_outage"]
    for scheme in schemes:
        if scheme not in ANALYTIC_SCHEMES:
            raise UsageError(f"unknown analytic scheme {scheme!r}; choose from {', '.join(ANALYTIC_SCHEMES)}")
    for scheme in schemes:
        for snr_db in grid:
            pe = oa.single_link_outage(oa.ChannelParams.from_db(snr_db, rate))
            rows = []
            if scheme in ("gdnc", "dnc"):
                if params is None:
                    raise UsageError("gdnc analysis needs --users, --k1 and --k2")
                M, k1, k2 = (params.M, 1, params.M - 1) if scheme == "dnc" else (params.M, params.k1, params.k2)
                rows.append(("exact", oa.gdnc_overall_outage(pe, M, k1, k2, "exact", "upper")))
                rows.append(("leading", oa.gdnc_overall_outage(pe, M, k1, k2, "leading", "upper")))
                rows.append(("band-lo", oa.gdnc_overall_outage(pe, M, k1, k2, "exact", "lower")))
                rows.append(("band-hi", oa.gdnc_overall_outage(pe, M, k1, k2, "exact", "upper")))
            else:
                rows.append(("leading", oa.baseline_outage(scheme, pe)))
            for mode, value in rows:
                lines.append(f"{snr_db:.10g},{pe:.10g},{scheme},{mode},{value:.10g}")
    return "\n".join(lines) + "\n"


def _analysis_params(args) -> GdncParams | None:
    if args.users is None:
        return None
    return GdncParams(args.users, args.k1 or 1, args.k2 or args.users - 1)


def cmd_analyze(args) -> int:
    grid = parse_snr_grid(args.snr_db)
    _emit(analysis_csv(_split(args.schemes), grid, args.rate, _analysis_params(args)), args.out)
    return EXIT_OK


def _sim_grid(args) -> list[float]:
    if args.pe:
        grid = sorted(oa.snr_db_for_pe(float(p), args.rate) for p in _split(args.pe))
    else:
        grid = parse_snr_grid(args.snr_db)
    return grid


def _parse_window(text: str | None) -> tuple[int, int] | None:
    if not text:
        return None
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def simulate_result(args, scheme: str):
    if args.trials is None or args.trials < 1:
        raise UsageError("--trials must be a positive integer")
    scheme = Scheme(scheme)
    grid = _sim_grid(args)
    if scheme in (Scheme.BNC2, Scheme.DAF2):
        config = SimConfig(grid, rate=args.rate, trials=args.trials, seed=args.seed, scheme=scheme,
                           error_unit=args.error_unit, channel_mode=args.channel_mode,
                           slope_window=_parse_window(args.slope_window))
    else:
        params = None
        if scheme is Scheme.DNC:
            M = args.users or 2
            params = GdncParams(M, 1, M - 1)
        code, params = _load_code(args, params)
        config = SimConfig(grid, params, code, args.rate, args.trials, args.seed, scheme,
                           args.error_unit, args.channel_mode, _parse_window(args.slope_window))
    return run_sim(config, workers=args.workers)


def cmd_simulate(args) -> int:
    if args.trials is None or args.trials < 1:
        raise UsageError("--trials must be a positive integer")
    if args.out not in (None, "-"):
        _check_writable(args.out)
    result = simulate_result(args, args.scheme)
    _emit(result.to_csv(), args.out)
    return EXIT_OK


def _check_writable(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise UsageError(f"output directory {parent!r} does not exist")


_ANALYTIC_FOR = {"gdnc": "gdnc", "dnc": "dnc", "bnc2": "bnc", "daf2": "daf"}


def cmd_compare(args) -> int:
    if args.trials is None or args.trials < 1:
        raise UsageError("--trials must be a positive integer")
    schemes = _split(args.schemes)
    for s in schemes:
        if s not in _ANALYTIC_FOR:
            raise UsageError(f"unknown scheme {s!r}")
    os.makedirs(args.out_dir, exist_ok=True)
    grid = _sim_grid(args)
    params = _analysis_params(args) or GdncParams(2, 1, 1)
    analytic = [_ANALYTIC_FOR[s] for s in schemes]
    with open(os.path.join(args.out_dir, "analysis.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(analysis_csv(analytic, grid, args.rate, params))
    for s in schemes:
        # the matrix and field options describe the GDNC code only
        sub = args if s == "gdnc" else argparse.Namespace(**{**vars(args), "matrix": None, "field": None})
        result = simulate_result(sub, s)
        with open(os.path.join(args.out_dir, f"sim_{s}.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(result.to_csv())
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def _add_shape(p):
    p.add_argument("-M", "--users", type=int, help="number of users M")
    p.add_argument("--k1", type=int, help="broadcast packets per user")
    p.add_argument("--k2", type=int, help="parity packets per user")
    p.add_argument("--field", help='field spec, e.g. "2^3/1011", "2^3" or "8"')


def _add_sim(p):
    p.add_argument("--matrix", help="parity matrix file (plain-text format)")
    p.add_argument("--snr-db", default="5:40:5", help="a:b:step in dB, or a comma list")
    p.add_argument("--pe", help="comma list of single-link outage probabilities (overrides --snr-db)")
    p.add_argument("--rate", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--error-unit", choices=[e.value for e in ErrorUnit], default=ErrorUnit.PER_MESSAGE.value)
    p.add_argument("--channel-mode", choices=[c.value for c in ChannelMode], default=ChannelMode.RAYLEIGH.value)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--slope-window", help="lo:hi point indices for the slope fit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gdnc", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value file of default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="build an MDS transfer matrix")
    _add_shape(p)
    p.add_argument("--out", help="output matrix file (default stdout)")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("verify", help="certify the guaranteed diversity of a matrix")
    _add_shape(p)
    p.add_argument("--matrix", required=True)
    p.add_argument("--max-patterns", type=int, default=1 << 16)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="analytical outage curves as CSV")
    _add_shape(p)
    p.add_argument("--schemes", default="bnc,daf,gdnc")
    p.add_argument("--snr-db", default="0:40:5")
    p.add_argument("--rate", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo FER simulation as CSV")
    _add_shape(p)
    _add_sim(p)
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.GDNC.value)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="analysis plus simulation for several schemes")
    _add_shape(p)
    _add_sim(p)
    p.add_argument("--schemes", default="bnc2,dnc,gdnc")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_compare)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    if not os.path.isfile(known.config):
        raise UsageError(f"config file {known.config!r} not found")
    values = _read_config(known.config)
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            dests = {a.dest: a for a in sp._actions}
            for key, raw in values.items():
                if key in dests:
                    conv = dests[key].type or str
                    sp.set_defaults(**{key: conv(raw)})


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"gdnc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"gdnc: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except GdncError as exc:
        print(f"gdnc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
