"""Assembly of analysis reports (JSON-ready, stable key order)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .indexcore import (
    MuSequence,
    RankOptions,
    StabilizationError,
    differentiation_index,
    hat_index,
    modified_index,
    search_cap,
)
from .invariants import check_order_bounds, hilbert_kolchin, ideal_order
from .sysmodel import DAESystem, SystemShapeError, reduce_to_first_order
from .transbasis import BasisError, differential_transcendence_basis

FORMAT_VERSION = 1
NA = "n/a"

# section names in emission order
SECTIONS = (
    "mu_sequence", "sigma", "sigma_tilde", "sigma_hat", "ord",
    "hilbert_kolchin", "bounds", "basis", "relation", "audit",
)


@dataclass
class AnalysisReport:
    command: str
    system: Dict[str, Any]
    options: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "system": self.system,
            "options": self.options,
        }
        for key in SECTIONS:
            if key in self.results:
                out[key] = self.results[key]
        return out

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "AnalysisReport":
        if doc.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported report format_version {doc.get('format_version')!r}")
        results = {k: doc[k] for k in SECTIONS if k in doc}
        return cls(doc["command"], doc["system"], doc["options"], results)


def system_echo(sys: DAESystem) -> Dict[str, Any]:
    out: Dict[str, Any] = {"name": sys.name} if sys.name else {}
    out["field"] = sys.field
    out.update(sys.summary())
    return out


def options_echo(opts: RankOptions) -> Dict[str, Any]:
    return {"seed": opts.seed, "rank_mode": opts.mode, "epsilon": opts.epsilon}


def mu_section(sys: DAESystem, seq: MuSequence) -> Dict[str, Any]:
    return {
        "values": list(seq.values),
        "bounds": [list(b) for b in seq.bounds],
        "search_cap": search_cap(sys),
    }


def audit_section(seq: MuSequence, opts: RankOptions) -> Dict[str, Any]:
    return {
        "epsilon": opts.epsilon,
        "seed": opts.seed,
        "point_seeds": f"{opts.seed}/<trial>",
        "windows": [rec.to_dict() for rec in seq.records],
    }


def index_results(sys: DAESystem, opts: RankOptions, kmax: Optional[int] = None) -> Dict[str, Any]:
    seq = differentiation_index(sys, opts, kmax)
    out: Dict[str, Any] = {"_seq": seq, "mu_sequence": mu_section(sys, seq), "sigma": seq.sigma}
    try:
        out["sigma_tilde"] = modified_index(sys, opts).sigma
    except SystemShapeError:
        out["sigma_tilde"] = NA
    out["sigma_hat"] = hat_index(sys, opts).sigma
    return out


def bounds_results(sys: DAESystem, seq: MuSequence) -> Dict[str, Any]:
    b = check_order_bounds(sys, seq).to_dict()
    b["mu_within_bounds"] = all(lo <= mu <= hi for mu, (lo, hi) in zip(seq.values, seq.bounds))
    b["sigma_within_cap"] = seq.sigma <= search_cap(sys)
    return {
        "ord": ideal_order(sys, seq),
        "hilbert_kolchin": hilbert_kolchin(sys, seq).to_dict(),
        "bounds": b,
    }


def basis_results(sys: DAESystem, opts: RankOptions, seq: Optional[MuSequence] = None) -> Dict[str, Any]:
    target = sys
    note = None
    if sys.e != 1:
        target = reduce_to_first_order(sys)
        seq = None
        note = "basis of the first-order reduction"
    try:
        rep = differential_transcendence_basis(target, opts, seq).to_dict()
    except BasisError as exc:
        rep = {"error": str(exc)}
    if note:
        rep = {"reduced": True, "note": note, "variables": list(target.unknowns), **rep}
    return {"basis": rep}


def build_report(
    sys: DAESystem,
    command: str,
    opts: RankOptions,
    audit: bool = False,
    kmax: Optional[int] = None,
) -> AnalysisReport:
    """Report for the ``analyze``, ``index``, ``bounds`` and ``basis`` verbs."""
    rep = AnalysisReport(command, system_echo(sys), options_echo(opts))
    res = index_results(sys, opts, kmax)
    seq = res.pop("_seq")
    if command in ("analyze", "index"):
        rep.results.update(res)
    else:
        rep.results["sigma"] = seq.sigma
    if command in ("analyze", "bounds"):
        rep.results.update(bounds_results(sys, seq))
    if command in ("analyze", "basis"):
        rep.results.update(basis_results(sys, opts, seq))
    if audit:
        rep.results["audit"] = audit_section(seq, opts)
    return rep


__all__ = [
    "AnalysisReport", "FORMAT_VERSION", "NA", "build_report", "StabilizationError",
]
