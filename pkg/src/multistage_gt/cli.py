"""Command-line entry point: ``gt-multistage <verb> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import nullcontext
from fractions import Fraction

from .audit import audit_2good, audit_3good
from .campaign import run_campaign
from .decode_three import decode_s3
from .decode_two import decode_s2
from .design import compute_params, generate_matrix
from .errors import GroupTestingError
from .io import format_matrix, read_matrix, rates_to_json, write_campaign_csv
from .oracle import make_oracle
from .rates import optimize_constants


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _out(path):
    return open(path, "w", newline="") if path and path != "-" else nullcontext(sys.stdout)


def cmd_design(args) -> int:
    params = compute_params(args.t, args.s, N=args.N, p=Fraction(args.p) if args.p else None,
                            L1=args.L1, seed=args.seed)
    text = format_matrix(generate_matrix(params))
    with _out(args.out) as fh:
        fh.write(text)
    return 0


def cmd_audit(args) -> int:
    X = read_matrix(args.matrix)
    audit = audit_2good if X.params.s == 2 else audit_3good
    report = audit(X, scope=args.scope)
    print(json.dumps(report.summary()))
    for v in report.violations[: args.show]:
        print(f"{v.property} y={v.outcome} {v.witness}")
    return 0 if report.passed else 1


def cmd_decode(args) -> int:
    X = read_matrix(args.matrix)
    hidden = [v - 1 for v in _int_list(args.hidden)]
    if len(hidden) != X.params.s:
        raise GroupTestingError(f"expected {X.params.s} hidden samples, got {len(hidden)}")
    decoder = decode_s2 if X.params.s == 2 else decode_s3
    result = decoder(X, make_oracle(hidden, X.t))
    out = {
        "defectives": [v + 1 for v in result.defectives] if result.ok else None,
        "failure": result.failure,
        "detail": result.detail,
        "transcript": result.transcript.to_json_obj(),
    }
    print(json.dumps(out))
    return 0 if result.ok and sorted(hidden) == list(result.defectives) else 1


def _campaign_kwargs(args) -> dict:
    return dict(N=args.N, L1=args.L1, decoder=args.decoder, audit=not args.no_audit,
                retry_budget=args.retry_budget)


def cmd_verify(args) -> int:
    report = run_campaign(args.mode, args.t, args.s, seed=args.seed, trials=args.trials,
                          **_campaign_kwargs(args))
    with _out(args.csv) as fh:
        write_campaign_csv([report], fh)
    logging.getLogger(__name__).info("wall clock %.2fs, audit %s", report.wall_clock, report.audit)
    return 0 if report.n_failures == 0 else 1


def cmd_rates(args) -> int:
    text = rates_to_json(optimize_constants())
    with _out(args.out) as fh:
        fh.write(text + "\n")
    return 0


def cmd_bench(args) -> int:
    reports = [
        run_campaign("random", t, args.s, seed=args.seed, trials=args.trials, **_campaign_kwargs(args))
        for t in _int_list(args.t_list)
    ]
    with _out(args.csv) as fh:
        write_campaign_csv(reports, fh)
    return 0 if all(r.n_failures == 0 for r in reports) else 1


def _campaign_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s", type=int, required=True, choices=(2, 3))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--N", type=int, help="override the stage-1 test count")
    p.add_argument("--L1", type=int, help="override the sparsity threshold")
    p.add_argument("--decoder", choices=("multistage", "baseline"), default="multistage")
    p.add_argument("--no-audit", action="store_true", help="skip the matrix audit")
    p.add_argument("--retry-budget", type=int, default=16)
    p.add_argument("--csv", default="-", help="CSV output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gt-multistage",
                                     description="Multistage group testing for 2 or 3 defectives.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("design", help="generate a stage-1 pool matrix file")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--s", type=int, required=True, choices=(2, 3))
    p.add_argument("--N", type=int)
    p.add_argument("--p", help="relative column weight, e.g. 0.2 or 1/5")
    p.add_argument("--L1", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("audit", help="check a matrix against the goodness properties")
    p.add_argument("--matrix", required=True)
    p.add_argument("--scope", choices=("reachable", "all"), default="reachable")
    p.add_argument("--show", type=int, default=10, help="violations to print")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("decode", help="decode one hidden set against a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--hidden", required=True, help="1-based sample indices, e.g. 3,17,42")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("verify", help="exhaustive or random decoding campaign")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "random"), required=True)
    p.add_argument("--trials", type=int)
    _campaign_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rates", help="optimise the rate constants")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("bench", help="random campaigns over several t")
    p.add_argument("--t-list", required=True, help="comma-separated t values")
    p.add_argument("--trials", type=int, default=1000)
    _campaign_options(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (GroupTestingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
