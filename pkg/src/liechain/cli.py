"""Command-line interface: ``liechain catalog|analyze|verify|report``.

Exit codes: 0 conclusive and consistent, 1 usage or I/O error, 2 verification
or consistency failure, 3 inconclusive (no counterexample within budget),
4 internal construction error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import certfile
from .algebra import StructuralError
from .catalog import CATALOG, Expected, UnknownChainError, build_chain, list_catalog
from .criterion import CertificateRejected, Tag, TAU_ACCEPT, classify_chain, decompose
from .lie import ConstructionError, DegenerateProbeError
from .report import format_taxonomy, run_suite, to_json, to_markdown
from .roots import FrameConventionError

EXIT_OK, EXIT_USAGE, EXIT_REJECTED, EXIT_INCONCLUSIVE, EXIT_INTERNAL = 0, 1, 2, 3, 4
BUDGET_ENV = "LIECHAIN_BUDGET"
DEFAULT_BUDGET = 64
INTERNAL_ERRORS = (ConstructionError, FrameConventionError, DegenerateProbeError)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise SystemExit(f"{BUDGET_ENV} must be positive, got {n}")
    return n


def _positive(s: str) -> int:
    n = int(s)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _print(*a):
    print(*a, flush=True)


# -- commands -------------------------------------------------------------------------

def cmd_catalog_list(args) -> int:
    rows = list_catalog()
    if args.format == "json":
        sys.stdout.write(json.dumps([{"id": i, "expected": e, "reference": r} for i, e, r in rows],
                                    indent=2) + "\n")
    else:
        w = max(len(i) for i, _, _ in rows)
        for i, e, r in rows:
            _print(f"{i:<{w}}  {e:<18}  {r}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        chain = build_chain(args.chain_id)
    except UnknownChainError:
        print(f"unknown chain id {args.chain_id!r}; see `liechain catalog list`", file=sys.stderr)
        return EXIT_USAGE
    budget = args.budget or default_budget()
    try:
        v = classify_chain(chain, restarts=budget, iterations=args.iterations, seed=args.seed,
                           threads=args.threads)
    except INTERNAL_ERRORS as e:
        print(f"internal construction error on {chain.id}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    _print(f"chain:    {chain.id}  (h, k, g dims {chain.dims})")
    _print(f"verdict:  {v.tag.value}")
    if v.taxonomy is not None:
        _print(f"taxonomy: {format_taxonomy(v.taxonomy)}")
    for n in v.notes:
        _print(f"note:     {n}")
    if v.certificate is not None:
        c = v.certificate
        if c.residual > args.tol:
            print(f"certificate residual {c.residual:.3e} exceeds --tol {args.tol:.1e}", file=sys.stderr)
            return EXIT_REJECTED
        _print(f"residual: {c.residual:.3e}   m-bracket norm: {c.m_bracket_norm:.6f}   origin: {c.origin.value}")
        if args.out:
            try:
                certfile.write(args.out, certfile.CertificateFile.from_certificate(c, decompose(chain)))
            except OSError as e:
                print(f"cannot write {args.out}: {e}", file=sys.stderr)
                return EXIT_USAGE
            _print(f"certificate written to {args.out}")
    if v.c_estimate is not None:
        est = v.c_estimate
        _print(f"C estimate: {est.value:.6f}" + ("  (DIVERGENT)" if est.divergent else ""))
    return EXIT_INCONCLUSIVE if v.tag is Tag.NO_COUNTEREXAMPLE_FOUND else EXIT_OK


def cmd_verify(args) -> int:
    try:
        cf = certfile.read(args.path)
    except (OSError, UnicodeDecodeError, certfile.CertificateFormatError) as e:
        print(f"cannot read certificate: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        dec = decompose(build_chain(cf.chain_id))
    except UnknownChainError:
        print(f"certificate names unknown chain {cf.chain_id!r}", file=sys.stderr)
        return EXIT_REJECTED
    try:
        c = cf.verify(dec)
    except certfile.DigestMismatch as e:
        print(f"REJECTED: digest mismatch: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except CertificateRejected as e:
        print(f"REJECTED: {e}", file=sys.stderr)
        return EXIT_REJECTED
    _print(f"ACCEPTED {cf.chain_id}: residual {c.residual:.3e}, m-bracket norm {c.m_bracket_norm:.6f}")
    return EXIT_OK


def _parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        cid, sep, tag = item.partition("=")
        if not sep:
            raise ValueError(f"override {item!r} is not of the form ID=TAG")
        out[cid] = Expected(tag)
    return out


def cmd_report(args) -> int:
    known = {s.id for s in CATALOG}
    ids = args.only or None
    try:
        overrides = _parse_overrides(args.override_expected)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    bad = [i for i in list(ids or ()) + list(overrides) if i not in known]
    if bad:
        print(f"unknown chain id(s): {', '.join(bad)}", file=sys.stderr)
        return EXIT_USAGE
    budget = args.budget or default_budget()

    def progress(r):
        if not args.quiet:
            print(f"  {r.chain_id:<20} {r.computed:<24} {'ok' if r.consistent else 'INCONSISTENT'}",
                  file=sys.stderr, flush=True)

    try:
        rows = run_suite(ids, restarts=budget, iterations=args.iterations, seed=args.seed,
                         threads=args.threads, overrides=overrides, progress=progress)
    except INTERNAL_ERRORS as e:
        print(f"internal construction error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    text = to_json(rows) if args.format == "json" else to_markdown(rows)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as e:
            print(f"cannot write {args.out}: {e}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.consistent for r in rows) else EXIT_REJECTED


# -- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="liechain", description="Curvature criterion for homogeneous chains H < K < G.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cat = sub.add_parser("catalog", help="list the built-in chains")
    cat_sub = cat.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ls = cat_sub.add_parser("list")
    ls.add_argument("--format", choices=("table", "json"), default="table")
    ls.set_defaults(func=cmd_catalog_list)

    threads = os.cpu_count() or 1

    an = sub.add_parser("analyze", help="classify one chain")
    an.add_argument("chain_id")
    an.add_argument("--budget", type=_positive, default=None,
                    help=f"search restarts (default ${BUDGET_ENV} or {DEFAULT_BUDGET})")
    an.add_argument("--iterations", type=_positive, default=2000)
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--tol", type=float, default=TAU_ACCEPT, help="largest accepted commutator norm")
    an.add_argument("--out", help="write the certificate here if one is found")
    an.add_argument("--threads", type=_positive, default=threads)
    an.set_defaults(func=cmd_analyze)

    ve = sub.add_parser("verify", help="re-verify a certificate file")
    ve.add_argument("path")
    ve.set_defaults(func=cmd_verify)

    rp = sub.add_parser("report", help="classify the whole catalog and compare with expectations")
    rp.add_argument("--suite", choices=("paper",), default="paper")
    rp.add_argument("--out")
    rp.add_argument("--format", choices=("md", "json"), default="md")
    rp.add_argument("--budget", type=_positive, default=None)
    rp.add_argument("--iterations", type=_positive, default=2000)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--threads", type=_positive, default=threads)
    rp.add_argument("--only", action="append", metavar="ID", help="restrict to these chains")
    rp.add_argument("--override-expected", action="append", metavar="ID=TAG",
                    help="replace a chain's expectation tag (for testing the consistency gate)")
    rp.add_argument("--quiet", action="store_true")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StructuralError as e:
        print(f"structural error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
