"""Command-line entry point: ``braidhash <command> ...``.

Exit codes: 0 success, 1 usage error, 2 missing or corrupt table,
3 resource-limit refusal.  Results go to stdout, diagnostics to stderr.
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from braidhash.braid import format_word
from braidhash.compiler import HashParams, bootstrap_table, compile_gate
from braidhash.errors import (
    BraidhashError,
    ConfigurationError,
    CorruptTableError,
    InvalidInputError,
    ResourceLimitError,
)
from braidhash.pseudogroup import (
    available_lengths,
    load_table,
    load_tables,
    save_table,
    table_dir,
    table_path,
)
from braidhash.search import brute_force_best, build_table
from braidhash.stats import (
    DEFAULT_SEED,
    brute_force_decay,
    decay_fit,
    fit_wd,
    read_suite_csv,
    run_suite,
    write_histogram_csv,
    write_suite_csv,
)
from braidhash.su2 import PAULI_X, PAULI_Y, PAULI_Z, check_unitary

JSON_SCHEMA = "braidhash/1"

EXIT_OK, EXIT_USAGE, EXIT_TABLE, EXIT_RESOURCE = 0, 1, 2, 3

NAMED_GATES = {
    "X": PAULI_X,
    "Y": PAULI_Y,
    "Z": PAULI_Z,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "T": np.diag([1, np.exp(1j * math.pi / 4)]),
    "iX": 1j * PAULI_X,
    "iZ": 1j * PAULI_Z,
    "-iX": -1j * PAULI_X,
}


class UsageError(BraidhashError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_gate(spec):
    """Resolve a gate spec: a name, ``matrix:<8 reals>`` or ``axis:nx,ny,nz:angle``."""
    if spec in NAMED_GATES:
        return NAMED_GATES[spec].copy()
    kind, _, rest = spec.partition(":")
    try:
        if kind == "matrix":
            vals = [float(x) for x in rest.replace(",", " ").split()]
            if len(vals) != 8:
                raise ValueError("expected 8 reals (re, im for a11, a12, a21, a22)")
            m = np.array([complex(vals[i], vals[i + 1]) for i in range(0, 8, 2)]).reshape(2, 2)
            return check_unitary(m, "gate")
        if kind == "axis":
            axis_txt, _, angle_txt = rest.partition(":")
            axis = np.array([float(x) for x in axis_txt.split(",")])
            if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1) > 1e-9:
                raise ValueError("axis must be a unit 3-vector")
            angle = float(angle_txt)
            gen = axis[0] * PAULI_X + axis[1] * PAULI_Y + axis[2] * PAULI_Z
            return math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * gen
    except ValueError as exc:
        raise UsageError(f"bad gate spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown gate {spec!r}; names: {', '.join(NAMED_GATES)}, or matrix:..., axis:...")


def _add_threads(p):
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads (results do not depend on it)")


def _add_params(p):
    p.add_argument("--l", type=int, default=8, help="preprocessor table length")
    p.add_argument("--m", type=int, default=3, help="preprocessor product size")
    p.add_argument("--L", type=int, default=24, help="main processor table length")
    p.add_argument("--n", type=int, default=3, help="fine-rotation product size")
    p.add_argument("--q", type=int, default=1, help="refinement passes")
    p.add_argument("--levels", default=None,
                   help="comma-separated table lengths for each pass (default: L, then larger tables found)")


def _params(args, directory):
    if args.levels:
        levels = tuple(int(x) for x in args.levels.split(","))
    else:
        extra = [N for N in available_lengths(directory) if N > args.L]
        levels = (args.L, *extra)[: args.q]
    return HashParams(args.l, args.m, args.L, args.n, args.q, levels)


def build_parser():
    parser = _Parser(prog="braidhash", description=__doc__.splitlines()[0])
    parser.add_argument("--table-dir", default=None, help="table directory (else $BRAIDHASH_TABLE_DIR, else ./tables)")
    parser.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    tables = sub.add_parser("tables", help="build, check or bootstrap pseudo-group tables")
    tsub = tables.add_subparsers(dest="action", parser_class=_Parser, required=True)
    b = tsub.add_parser("build")
    b.add_argument("--length", type=int, required=True)
    b.add_argument("--method", choices=["exhaustive", "mitm"], default="exhaustive")
    b.add_argument("--alphabet", choices=["even", "full"], default="even")
    b.add_argument("--out", default=None)
    _add_threads(b)
    c = tsub.add_parser("check")
    c.add_argument("file")
    bs = tsub.add_parser("bootstrap")
    _add_params(bs)
    bs.add_argument("--out", default=None)

    comp = sub.add_parser("compile", help="hash a gate into a braid")
    comp.add_argument("--gate", required=True, help="gate name, matrix:... or axis:...; write --gate=-iX for names starting with '-'")
    _add_params(comp)
    comp.add_argument("--format", choices=["text", "json"], default="text")

    bench = sub.add_parser("bench")
    bsub = bench.add_subparsers(dest="action", parser_class=_Parser, required=True)
    br = bsub.add_parser("brute")
    br.add_argument("--gate", required=True)
    br.add_argument("--max-length", type=int, required=True)
    br.add_argument("--alphabet", choices=["even", "full"], default="full")

    suite = sub.add_parser("suite")
    ssub = suite.add_subparsers(dest="action", parser_class=_Parser, required=True)
    sr = ssub.add_parser("random")
    sr.add_argument("--count", type=int, required=True)
    sr.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sr.add_argument("--out", required=True)
    _add_params(sr)
    _add_threads(sr)

    st = sub.add_parser("stats")
    stsub = st.add_subparsers(dest="action", parser_class=_Parser, required=True)
    wd = stsub.add_parser("wd")
    wd.add_argument("--in", dest="infile", required=True)
    wd.add_argument("--hist-out", default=None)
    wd.add_argument("--format", choices=["text", "json", "csv"], default="text")
    dc = stsub.add_parser("decay")
    dc.add_argument("--lmin", type=int, required=True)
    dc.add_argument("--lmax", type=int, required=True)
    dc.add_argument("--count", type=int, required=True)
    dc.add_argument("--seed", type=int, default=DEFAULT_SEED)
    dc.add_argument("--alphabet", choices=["even", "full"], default="even")
    return parser


def _compile_payload(gate, target, params, result, elapsed):
    final = result.final
    return {
        "schema": JSON_SCHEMA,
        "gate": gate,
        "params": {"l": params.l, "m": params.m, "L": params.L, "n": params.n, "q": params.q,
                   "levels": list(params.levels)},
        "word": format_word(final.word),
        "distance": final.dist,
        "length": len(final.word),
        "raw_length": final.raw_length,
        "nominal_length": result.nominal_length,
        "wall_time": elapsed,
        "history": [
            {"stage": h.stage, "distance": h.dist, "length": h.length, "raw_length": h.raw_length,
             "wall_time": h.wall_time, "candidates": h.candidates, "improved": h.improved}
            for h in result.history
        ],
    }


def _cmd_tables(args, out):
    directory = table_dir(args.table_dir)
    if args.action == "build":
        t = build_table(args.length, args.method, args.alphabet, threads=args.threads)
        path = save_table(t, args.out or table_path(directory, args.length))
        print(f"wrote {path}: N={t.N} mean={t.mean_dist:.6g} max={t.max_dist:.6g}", file=out)
    elif args.action == "check":
        t = load_table(args.file)
        print(f"{args.file}: ok N={t.N} mean={t.mean_dist:.6g} max={t.max_dist:.6g} "
              f"longest={t.max_length}", file=out)
    else:
        params = _params(args, directory)
        tables = load_tables(directory, params.required_lengths)
        t = bootstrap_table(params, tables)
        path = save_table(t, args.out or table_path(directory, t.N))
        print(f"wrote {path}: N={t.N} mean={t.mean_dist:.6g} max={t.max_dist:.6g}", file=out)


def _cmd_compile(args, out):
    directory = table_dir(args.table_dir)
    target = parse_gate(args.gate)
    params = _params(args, directory)
    tables = load_tables(directory, params.required_lengths)
    start = time.perf_counter()
    result = compile_gate(target, params, tables)
    payload = _compile_payload(args.gate, target, params, result, time.perf_counter() - start)
    if args.format == "json":
        print(json.dumps(payload, indent=2), file=out)
        return
    print(payload["word"], file=out)
    print(f"distance {payload['distance']:.9g}", file=out)
    print(f"length {payload['length']} (before reduction {payload['raw_length']}, "
          f"nominal {payload['nominal_length']})", file=out)
    for h in payload["history"]:
        print(f"  {h['stage']:<12} d={h['distance']:.6g} length={h['length']} "
              f"candidates={h['candidates']} time={h['wall_time'] * 1e3:.1f}ms", file=out)


def _cmd_bench(args, out):
    res = brute_force_best(parse_gate(args.gate), args.max_length, args.alphabet)
    print(f"{format_word(res.word)}\ndistance {res.dist:.9g}\nwords {res.nodes_visited} "
          f"time {res.wall_time:.3f}s", file=out)


def _cmd_suite(args, out):
    directory = table_dir(args.table_dir)
    params = _params(args, directory)
    tables = load_tables(directory, params.required_lengths)
    samples = run_suite(args.count, params, tables, args.seed, threads=args.threads)
    write_suite_csv(samples, args.out)
    fit = fit_wd(samples) if len(samples) >= 100 else None
    ks = f" ks={fit.ks_stat:.4f}" if fit else ""
    print(f"wrote {args.out}: count={len(samples)} mean={samples.mean:.6g}{ks}", file=out)


def _cmd_stats(args, out):
    if args.action == "wd":
        if not Path(args.infile).is_file():
            raise UsageError(f"no such suite file: {args.infile}")
        samples = read_suite_csv(args.infile)
        fit = fit_wd(samples)
        if args.hist_out:
            write_histogram_csv(samples.values, args.hist_out)
        if args.format == "json":
            print(json.dumps({"schema": JSON_SCHEMA, "d_L": fit.d_L, "ks_stat": fit.ks_stat,
                              "sample_count": fit.sample_count}), file=out)
        elif args.format == "csv":
            print(f"d_L,ks_stat,sample_count\n{fit.d_L:.8e},{fit.ks_stat:.8e},{fit.sample_count}", file=out)
        else:
            print(f"d_L {fit.d_L:.6g}\nks {fit.ks_stat:.4f}\ncount {fit.sample_count}", file=out)
    else:
        lengths = [L for L in range(args.lmin, args.lmax + 1) if args.alphabet == "full" or L % 2 == 0]
        means = brute_force_decay(lengths, args.count, args.seed, args.alphabet)
        for L, m in zip(lengths, means):
            print(f"L={L} mean={m:.6g}", file=out)
        print(f"xi {decay_fit(lengths, means):.4f}", file=out)


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        handler = {"tables": _cmd_tables, "compile": _cmd_compile, "bench": _cmd_bench,
                   "suite": _cmd_suite, "stats": _cmd_stats}[args.command]
        handler(args, out)
    except (UsageError, InvalidInputError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (ConfigurationError, CorruptTableError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_TABLE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_RESOURCE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
