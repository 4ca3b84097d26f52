"""Command-line interface: ``daeindex <verb> <system.json> [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from typing import List, Optional

from .diffpoly import JetVar
from .indexcore import DEFAULT, EXACT, RankOptions, StabilizationError, differentiation_index
from .ranklab import DEFAULT_EPSILON, ExactRankTooLarge
from .relfind import RelationError, RelationQuery, implicit_relation
from .report import AnalysisReport, build_report, options_echo, system_echo
from .sysmodel import SystemShapeError, localize
from .sysparse import ParseError, SystemFormatError, emit_report, load_system_file, parse_expression

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_STABILIZATION = 3

VERBS = ("analyze", "index", "bounds", "basis", "relation")


class UsageError(ValueError):
    pass


def parse_epsilon(text: str) -> float:
    """Accepts ``2^-k`` or a plain float in (0, 1)."""
    m = re.fullmatch(r"\s*2\s*\^\s*(-\s*\d+)\s*", text)
    val = 2.0 ** int(m.group(1).replace(" ", "")) if m else float(text)
    if not 0 < val < 1:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1)")
    return val


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="daeindex", description="Differentiation index and order of DAE systems.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("file", help="system description (JSON)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=parse_epsilon, default=DEFAULT_EPSILON)
    p.add_argument("--exact", action="store_true", help="force exact ranks")
    p.add_argument("--audit", action="store_true", help="include the rank audit")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--kmax", type=int, default=None, help="override the index search cap")
    p.add_argument("--target", help="relation: target jet, e.g. u1 or u2'")
    p.add_argument("--basis", default="", help="relation: comma-separated basis jets")
    p.add_argument("--max-degree", type=int, default=1)
    p.add_argument("--y-level", type=int, default=None,
                   help="relation: include Y-jets up to this order (default from sigma)")
    p.add_argument("--localize", default="", help="comma-separated unknowns moved to the ground field")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _jet(text: str, names) -> JetVar:
    p = parse_expression(text.strip(), names)
    vs = p.variables()
    if len(vs) != 1 or len(p.terms) != 1 or p != type(p).from_jet(next(iter(vs))):
        raise UsageError(f"{text!r} is not a single jet variable")
    return next(iter(vs))


def relation_report(sysm, args, opts: RankOptions) -> AnalysisReport:
    if not args.target:
        raise UsageError("relation needs --target")
    names = set(sysm.unknowns) | set(sysm.parameter_names) | {y for y in sysm.y_names if y}
    target = _jet(args.target, names)
    basis = tuple(_jet(b, names) for b in args.basis.split(",") if b.strip())
    ys = {y for y in sysm.y_names if y}
    y_level = args.y_level
    sigma = None
    if y_level is None:
        sigma = differentiation_index(sysm, opts, args.kmax).sigma
        y_level = sigma if target.deriv >= 1 else sigma - 1
    explicit_y = tuple(v for v in basis if v.base in ys)
    others = tuple(v for v in basis if v.base not in ys)
    q = RelationQuery.with_y_level(sysm, target, others, y_level, args.max_degree)
    extra = tuple(v for v in explicit_y if v not in q.y_jets)
    q = RelationQuery(q.target, q.basis, q.y_jets + extra, q.max_degree)
    res = implicit_relation(sysm, q, seed=opts.seed)
    rep = AnalysisReport("relation", system_echo(sysm), options_echo(opts))
    body = res.to_dict()
    body["y_level"] = y_level
    if sigma is not None:
        rep.results["sigma"] = sigma
    rep.results["relation"] = body
    return rep


def format_human(rep: AnalysisReport) -> str:
    d = rep.to_dict()
    s = d["system"]
    lines = [
        f"system {s.get('name') or '(unnamed)'}: n={s['n']} m={s['m']} r={s['r']} e={s['e']}"
        f"  e_j={s['e_j']}  eps={['-' if x is None else x for x in s['eps']]}",
    ]
    if "mu_sequence" in d:
        mu = d["mu_sequence"]
        lines.append("")
        lines.append(f"{'k':>3} {'mu_k':>6} {'lower':>6} {'upper':>6}")
        for k, (v, (lo, hi)) in enumerate(zip(mu["values"], mu["bounds"])):
            lines.append(f"{k:>3} {v:>6} {lo:>6} {hi:>6}")
        lines.append(f"search cap: {mu['search_cap']}")
        lines.append("")
    for key in ("sigma", "sigma_tilde", "sigma_hat", "ord"):
        if key in d:
            lines.append(f"{key}: {d[key]}")
    if "hilbert_kolchin" in d:
        hk = d["hilbert_kolchin"]
        lines.append(
            f"Hilbert-Kolchin polynomial: {hk['slope']}(T+1) + {hk['constant']}"
            f"  (regularity <= {hk['regularity_bound']})"
        )
    if "bounds" in d:
        b = d["bounds"]
        lines.append(
            f"bounds: greenspan={b['greenspan']} ritt={b['ritt']} jacobi={b['jacobi']}"
            f"  tight={','.join(b['tight']) or '-'}"
        )
    if "basis" in d:
        b = d["basis"]
        if "error" in b:
            lines.append(f"basis: {b['error']}")
        else:
            tag = " (first-order reduction)" if b.get("reduced") else ""
            lines.append(f"basis{tag}: W={b['W']} xi={b['xi']} eta={b['eta']}")
    if "relation" in d:
        lines.append(f"relation: {d['relation']['relation']}")
    if "audit" in d:
        a = d["audit"]
        lines.append(f"audit: epsilon={a['epsilon']} seed={a['seed']}")
        for w in a["windows"]:
            lines.append(
                f"  k={w['k']} shape={w['shape']} rank={w['rank']} method={w['method']}"
                f" trials={w.get('trials', '-')} trial_ranks={w['trial_ranks']}"
            )
    return "\n".join(lines) + "\n"


def run(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=err)
    opts = RankOptions(EXACT if args.exact else DEFAULT, args.seed, args.epsilon)
    try:
        sysm = load_system_file(args.file)
        W = [w.strip() for w in args.localize.split(",") if w.strip()]
        if W:
            sysm = localize(sysm, W)
        if args.verb == "relation":
            rep = relation_report(sysm, args, opts)
        else:
            rep = build_report(sysm, args.verb, opts, audit=args.audit, kmax=args.kmax)
    except (ParseError, SystemFormatError, SystemShapeError, UsageError, OSError, json.JSONDecodeError) as exc:
        err.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except StabilizationError as exc:
        err.write(f"stabilization failure: {exc}\n")
        return EXIT_STABILIZATION
    except (ExactRankTooLarge, RelationError) as exc:
        err.write(f"resource limit: {exc}\n")
        return EXIT_INPUT
    out.write(emit_report(rep) if args.json else format_human(rep))
    return EXIT_OK


def main() -> None:
    sys.exit(run())
