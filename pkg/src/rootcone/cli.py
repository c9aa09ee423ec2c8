"""``rootcone`` command line: enumerate, verify and check."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from . import certificate as cf
from .automorphism import make_automorphism, standard_automorphism
from .errors import StrategyUnavailable
from .rcl import GAMMA_MODES, STRATEGIES, TwistedSetup, default_jobs, verify_all
from .root_datum import resolve_datum
from .weyl import weyl_group

log = logging.getLogger("rootcone")


def _parse_auto(datum, spec: str):
    """Named automorphism, or ``perm:i1,i2,...`` listing 1-based images."""
    if spec.startswith("perm:"):
        perm = [int(p) - 1 for p in spec[5:].split(",")]
        return make_automorphism(datum, perm, "custom")
    return standard_automorphism(datum, spec)


def _gamma(value: str) -> str:
    v = value.replace("_", "-")
    if v not in GAMMA_MODES:
        raise argparse.ArgumentTypeError(f"gamma must be one of {', '.join(GAMMA_MODES)}")
    return v


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rootcone", description=__doc__)
    p.add_argument("--version", action="version", version=f"rootcone {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="Weyl group order, positive roots and Cartan matrix")
    e.add_argument("--type", required=True, help="Cartan type (A3, E6, A2xA2) or a Cartan JSON file")
    e.add_argument("--json", action="store_true")
    e.add_argument("--allow-large", action="store_true", help="permit enumerating E7 and E8")

    v = sub.add_parser("verify", help="verify every Weyl element and write a certificate")
    v.add_argument("--type", required=True)
    v.add_argument("--auto", default="identity", help="identity|flip|swap|triality|e6|cycle[:d]|perm:i1,i2,...")
    v.add_argument("--strategy", choices=STRATEGIES, default="all")
    v.add_argument("--grid-max", type=_positive, default=3)
    v.add_argument("--gamma", type=_gamma, default="zero", help="zero or gamma-w")
    v.add_argument("--jobs", type=_positive, default=None, help="worker processes (default: RCL_JOBS or CPU count)")
    v.add_argument("--out", help="certificate path")
    v.add_argument("--json", action="store_true", help="print the summary as JSON")
    v.add_argument("--no-timing", action="store_true", help="write wall_time_ms as null for byte-stable files")
    v.add_argument("--allow-large", action="store_true")

    c = sub.add_parser("check", help="independently re-verify a certificate file")
    c.add_argument("path")
    c.add_argument("--json", action="store_true")
    return p


def cmd_enumerate(args) -> int:
    d = resolve_datum(args.type)
    g = weyl_group(d, allow_large=args.allow_large)
    cartan = [[int(x) for x in row] for row in d.cartan_matrix.tolist()]
    info = {
        "type": d.name,
        "rank": d.rank,
        "weyl_order": len(g),
        "positive_roots": len(d.positive_roots),
        "longest_length": int(g.lengths.max()),
        "cartan": cartan,
    }
    if args.json:
        print(json.dumps(info))
    else:
        print(f"type {info['type']}  rank {d.rank}")
        print(f"|W| = {info['weyl_order']}")
        print(f"positive roots = {info['positive_roots']}")
        print("Cartan matrix:")
        for row in cartan:
            print("  " + " ".join(f"{x:3d}" for x in row))
    return 0


def _writable(path: str) -> bool:
    parent = Path(path).resolve().parent
    return parent.is_dir() and os.access(parent, os.W_OK) and not Path(path).is_dir()


def cmd_verify(args) -> int:
    if args.out and not _writable(args.out):
        print(f"error: cannot write {args.out}", file=sys.stderr)
        return cf.EXIT_USAGE
    d = resolve_datum(args.type)
    theta = _parse_auto(d, args.auto)
    setup = TwistedSetup.create(d, theta, allow_large=args.allow_large)
    jobs = args.jobs or default_jobs()
    certs, summary = verify_all(setup, args.strategy, args.gamma, args.grid_max, jobs=jobs)
    doc = cf.build_document(setup, certs, summary, args.strategy, args.gamma, args.grid_max,
                            timing=not args.no_timing)
    if args.out:
        try:
            cf.write(doc, args.out)
        except OSError as e:
            print(f"error: cannot write {args.out}: {e}", file=sys.stderr)
            return cf.EXIT_USAGE
    ok = summary.verified + summary.vacuous
    if args.json:
        print(json.dumps(doc["summary"] | {"elements": len(certs), "digest": doc["digest"]}))
    else:
        print(f"{setup.datum.name} theta={theta.name} {[p + 1 for p in theta.perm]} strategy={args.strategy}")
        print(f"Number of elements = {len(certs)}")
        print(f"Number of successful elements = {ok}")
        print(f"verified {summary.verified}  vacuous {summary.vacuous}  failed {summary.failed}  "
              f"({summary.wall_time_ms} ms)")
        for c in certs:
            if c.status == "failed":
                word = [i + 1 for i in c.word]
                print(f"  FAILED word={word} {c.note}")
    return cf.EXIT_FAIL if summary.failed else cf.EXIT_OK


def cmd_check(args) -> int:
    rep = cf.check_file(args.path)
    if args.json:
        print(json.dumps({"exit_code": rep.exit_code, "checked": rep.checked, "verified": rep.verified,
                          "vacuous": rep.vacuous, "failed": rep.failed, "problems": rep.problems[:50]}))
    else:
        for msg in rep.problems[:50]:
            print(f"problem: {msg}", file=sys.stderr)
        state = "OK" if rep.exit_code == 0 else "FAILED"
        print(f"{state}: {rep.checked} records re-checked "
              f"(verified {rep.verified}, vacuous {rep.vacuous}, failed {rep.failed})")
    return rep.exit_code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return cf.EXIT_USAGE if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    handlers = {"enumerate": cmd_enumerate, "verify": cmd_verify, "check": cmd_check}
    try:
        return handlers[args.command](args)
    except (ValueError, KeyError, StrategyUnavailable, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return cf.EXIT_USAGE

