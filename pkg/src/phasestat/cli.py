"""Command-line entry point.

Exit codes: 0 every check passes, 1 a check fails (or a degenerate trace),
2 invalid flags or input files, 3 grid truncation.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import corpus, formats, husimi, statistics, suites, symplectic, toeplitz, wigner
from .core import DomainError, GridSpec, TruncationError, TruncationWarning

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNCATION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(kind):
    def conv(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {s}")
        return v
    return conv


def _seed(s):
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _grid_flags(p, hbar=True):
    if hbar:
        p.add_argument("--hbar", type=_positive(float), default=1.0)
    p.add_argument("--grid-n", type=_positive(int), default=64)
    p.add_argument("--grid-L", type=_positive(float), default=8.0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="phasestat", description="Phase-space symbols and exchange-lemma checks.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run verification suites over the built-in corpus")
    v.add_argument("--suite", choices=["all", *suites.SUITES], default="all")
    _grid_flags(v)
    v.add_argument("--samples", type=_positive(int), default=100)
    v.add_argument("--seed", type=_seed, default=42)
    v.add_argument("--json", metavar="PATH", help="write the report array here")
    v.add_argument("--tolerance-scale", type=_positive(float), default=1.0)
    v.add_argument("--list-corpus", action="store_true", help="print the corpus and exit")
    v.add_argument("--quiet", action="store_true", help="print only the summary line")

    c = sub.add_parser("compute", help="dump a Husimi or Wigner field of a state file to CSV")
    c.add_argument("what", choices=["husimi", "wigner"])
    c.add_argument("state_file")
    c.add_argument("out_file")
    c.add_argument("--m", type=_positive(int), default=32, help="Husimi phase axis points")
    c.add_argument("--stride", type=_positive(int), default=None,
                   help="Wigner subsampling (default 1 for one particle, 4 for two)")

    s = sub.add_parser("symmetrize", help="bosonic/fermionic state from a one-particle symbol")
    s.add_argument("symbol_file")
    s.add_argument("kind", choices=["bosonic", "fermionic"])
    s.add_argument("out_file")
    _grid_flags(s, hbar=False)
    s.add_argument("--report", metavar="PATH", help="default: <out_file>.report.json")
    s.add_argument("--normalize", action="store_true", help="write the unit-trace state")

    sub.add_parser("matrices", help="print the built-in linear phase maps as JSON")
    return ap


def _grid(args, hbar) -> GridSpec:
    try:
        g = GridSpec(args.grid_n, args.grid_L, hbar, 2)
    except DomainError as e:
        raise _Usage(str(e)) from None
    g.check_resolution()
    return g


class _Usage(Exception):
    pass


def cmd_verify(args) -> int:
    grid = _grid(args, args.hbar)
    if args.list_corpus:
        print(json.dumps(formats._plain(corpus.describe(grid)), indent=2))
        return EXIT_OK
    cfg = suites.Config(grid, args.samples, args.seed, args.tolerance_scale)
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        try:
            reports = suites.run_suite(args.suite, cfg)
        except TruncationWarning as w:
            raise TruncationError(str(w)) from None
    data = formats.reports_to_json(reports)
    if args.json:
        formats.write_json(data, args.json)
    failed = [r for r in reports if not r.passed]
    if not args.quiet:
        for r in reports:
            case = (r.details or {}).get("case", "")
            print(f"{'PASS' if r.passed else 'FAIL'} {r.lemma:32s} {r.which:3s} {case:22s} "
                  f"err={r.max_rel_err:.3e} tol={r.tolerance:.1e}")
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_compute(args) -> int:
    rho = formats.load_state(args.state_file)
    rho.grid.check_resolution()
    N = rho.particles
    q_names = ["q1", "p1", "q2", "p2"][: 2 * N]
    if args.what == "husimi":
        q, p = husimi.phase_grid(rho.grid, args.m)
        vals = husimi.husimi_grid(rho, q, p)
        formats.write_csv(args.out_file, q_names, [q, p] * N, vals)
    else:
        W = wigner.wigner(rho)
        stride = args.stride or (4 if N == 2 else 1)
        formats.write_csv(args.out_file, q_names, list(W.axes) * N, W.values, stride=stride)
    return EXIT_OK


def _symbol_mass_check(h: toeplitz.GaussianSymbol):
    total = abs(h.trace_value())
    scale = sum(abs(c) * (np.pi * h.hbar / a) / (2 * np.pi * h.hbar) for c, a in zip(h.c, h.alpha))
    if total <= 1e-12 * scale:
        raise DomainError("degenerate trace: the symbol has zero total mass")


def cmd_symmetrize(args) -> int:
    h = formats.load_symbol(args.symbol_file)
    if h.particles != 1:
        raise _Usage("symmetrize takes a one-particle (relative-coordinate) symbol")
    grid = _grid(args, h.hbar).with_particles(1)
    _symbol_mass_check(h)
    H = toeplitz.toeplitz_quantize(h, grid)
    S = statistics.symmetrize(H, args.kind)
    report = statistics.check_state(S, args.kind, grid)
    if args.normalize:
        S = statistics.normalized(S, grid)
    formats.write_json(formats.state_to_json(S), args.out_file)
    formats.write_json(formats.reports_to_json([report]), args.report or args.out_file + ".report.json")
    d = report.details
    print(f"{'PASS' if report.passed else 'FAIL'} {args.kind}: residual_U={d['residual_U']:.2e} "
          f"residual_V={d['residual_V']:.2e} lambda_min={d['lambda_min']:.3e} "
          f"lambda_max={d['lambda_max']:.3e} trace={d['trace'][0]:.12g}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_matrices(args) -> int:
    out = [symplectic.builtin(k).to_json() for k in symplectic.builtin_labels()]
    out.append(symplectic.pm_rotation(4).to_json())
    out.extend(symplectic.wminus_map(w).to_json() for w in ("U", "V"))
    print(json.dumps(out, indent=2))
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "compute": cmd_compute, "symmetrize": cmd_symmetrize,
            "matrices": cmd_matrices}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except TruncationError as e:
        print(f"truncation: {e}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (formats.SchemaError, _Usage, FileNotFoundError, IsADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL if "degenerate trace" in str(e) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
