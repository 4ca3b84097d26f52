"""Implicit polynomial relations on the variety of a prolonged system.

Relations are found by interpolation: points of the variety are produced
parametrically (free X and U-jets, X-jets through the induced derivation,
``Y^(l)`` set to the value of ``g^(l)``), every monomial of total degree at
most D in the projected coordinates is evaluated, and a kernel vector of the
evaluation matrix gives the coefficients.  D ascends from 1.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .diffpoly import DiffPoly, JetVar, poly_sum
from .prolong import KPoint
from .ranklab import rational_nullspace
from .sysmodel import DAESystem

log = logging.getLogger(__name__)

SAMPLE_BOUND = 2 ** 16
MARGIN = 10
FRESH_POINTS = 20
MAX_MONOMIALS = 1500
RETRIES = 3


class RelationError(RuntimeError):
    """Resource cap exceeded or a candidate failed verification repeatedly."""


def degree_bound(sys: DAESystem, flavor: str, sigma: int) -> int:
    """d^((sigma+1)(n+r)) for the V1 projection, d^(sigma(n+r)) for V0."""
    d = sys.input_degree()
    if flavor == "V1":
        return d ** ((sigma + 1) * (sys.n + sys.r))
    if flavor == "V0":
        return d ** (sigma * (sys.n + sys.r))
    raise ValueError(f"unknown flavor {flavor!r}")


class VarietyPoint(Mapping):
    """A point of the variety of the prolonged system.

    Unknowns and parameters come from a :class:`KPoint`; residual jets
    ``Y_j^(l)`` are the values of ``g_j^(l)`` there, so every prolonged
    equation vanishes by construction.
    """

    def __init__(self, sys: DAESystem, seed, bound: int = SAMPLE_BOUND, max_jet: int = 0):
        self.sys = sys
        self.base = KPoint(sys, seed, bound, max_jet)
        self._g = {y: g for y, g in zip(sys.y_names, sys.g) if y is not None}
        self._y: Dict[JetVar, object] = {}

    def __getitem__(self, v: JetVar):
        g = self._g.get(v.base)
        if g is None:
            return self.base[v]
        got = self._y.get(v)
        if got is None:
            got = g.derivative(v.deriv).evaluate(self.base)
            self._y[v] = got
        return got

    def __iter__(self):
        yield from self.base
        yield from dict(self._y)

    def __len__(self) -> int:
        return len(self.base) + len(self._y)

    def __contains__(self, v) -> bool:
        return v in self.base or (isinstance(v, JetVar) and v.base in self._g)

    def coordinates(self, level: int) -> Dict[JetVar, object]:
        """X^[level+1], U^[level+e], parameter jets and Y^[level] as a dict."""
        sys = self.sys
        out: Dict[JetVar, object] = {}
        for x in sys.x_names:
            for l in range(level + 2):
                out[JetVar(x, l)] = self[JetVar(x, l)]
        for u in list(sys.u_names) + list(sys.parameter_names):
            for l in range(level + sys.e + 1):
                out[JetVar(u, l)] = self[JetVar(u, l)]
        for y in self._g:
            for l in range(level + 1):
                out[JetVar(y, l)] = self[JetVar(y, l)]
        return out


def sample_variety_point(sys: DAESystem, level: int, seed, bound: int = SAMPLE_BOUND) -> VarietyPoint:
    if level < 0:
        raise ValueError("level must be >= 0")
    return VarietyPoint(sys, seed, bound, level + sys.e)


def residual(sys: DAESystem, pt: Mapping, level: int):
    """Max |value| of F^[level] and G^[level] - Y^[level] at ``pt``."""
    worst = 0
    for x, fx in zip(sys.x_names, sys.f):
        h = fx - DiffPoly.var(x, 1)
        for l in range(level + 1):
            worst = max(worst, abs(h.derivative(l).evaluate(pt)))
    for y, g in zip(sys.y_names, sys.g):
        h = g if y is None else g - DiffPoly.var(y)
        for l in range(level + 1):
            worst = max(worst, abs(h.derivative(l).evaluate(pt)))
    return worst


@dataclass(frozen=True)
class RelationQuery:
    target: JetVar
    basis: Tuple[JetVar, ...]
    y_jets: Tuple[JetVar, ...] = ()
    max_degree: int = 1

    def __post_init__(self):
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        if self.target in self.basis or self.target in self.y_jets:
            raise ValueError("target must not be among the basis coordinates")

    @property
    def coordinates(self) -> Tuple[JetVar, ...]:
        seen = []
        for v in (self.target,) + self.basis + self.y_jets:
            if v not in seen:
                seen.append(v)
        return tuple(seen)

    @classmethod
    def with_y_level(cls, sys: DAESystem, target, basis, y_level: int, max_degree: int = 1) -> "RelationQuery":
        ys = tuple(
            JetVar(y, l) for l in range(y_level + 1) for y in sys.y_names if y is not None
        )
        return cls(target, tuple(basis), ys, max_degree)


@dataclass
class RelationResult:
    relation: Optional[DiffPoly]
    degree: Optional[int]
    max_degree: int
    verified_points: int = 0
    separable: bool = False
    text: str = ""
    notes: List[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.relation is not None

    def to_dict(self) -> dict:
        return {
            "relation": self.text if self.found else f"none up to {self.max_degree}",
            "degree": self.degree,
            "verified_points": self.verified_points,
            "separable": self.separable,
        }


def _monomials(nvars: int, D: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of total degree <= D, graded."""
    out = []
    for deg in range(D + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            ex = [0] * nvars
            for c in combo:
                ex[c] += 1
            out.append(tuple(ex))
    return out


def _row(vals: Sequence[object], mons) -> List[object]:
    row = []
    for ex in mons:
        acc = 1
        for v, k in zip(vals, ex):
            if k:
                acc = acc * v ** k
        row.append(acc)
    return row


def _assemble(coords, mons, vec) -> DiffPoly:
    terms = []
    for c, ex in zip(vec, mons):
        if c:
            p = DiffPoly.const(c)
            for v, k in zip(coords, ex):
                if k:
                    p = p * DiffPoly.from_jet(v) ** k
            terms.append(p)
    return poly_sum(terms)


def _normalize(p: DiffPoly, order: Dict[str, int]) -> DiffPoly:
    lead = p.sorted_terms(order)[0][1]
    return p * (Fraction(1) / Fraction(lead))


def implicit_relation(
    sys: DAESystem,
    query: RelationQuery,
    seed=0,
    max_monomials: int = MAX_MONOMIALS,
    bound: int = SAMPLE_BOUND,
) -> RelationResult:
    """Minimal-degree separable relation between the target and the basis."""
    coords = query.coordinates
    max_jet = max(v.deriv for v in coords)
    order = sys.variable_order()
    for D in range(1, query.max_degree + 1):
        mons = _monomials(len(coords), D)
        if len(mons) > max_monomials:
            raise RelationError(f"{len(mons)} monomials at degree {D} exceed the cap {max_monomials}")
        for attempt in range(RETRIES):
            tag = f"{seed}/{D}/{attempt}"
            pts = [VarietyPoint(sys, f"{tag}/s{t}", bound, max_jet) for t in range(len(mons) + MARGIN)]
            M = [_row([pt[v] for v in coords], mons) for pt in pts]
            kernel = rational_nullspace(M, len(mons))
            if not kernel:
                break
            cand = _pick(sys, coords, mons, kernel, query.target, tag, bound, max_jet)
            if cand is None:
                # only relations among the basis coordinates at this degree
                break
            rel = _normalize(cand, order)
            fresh = [VarietyPoint(sys, f"{tag}/v{t}", bound, max_jet) for t in range(FRESH_POINTS)]
            if all(rel.evaluate(pt) == 0 for pt in fresh):
                return RelationResult(
                    rel, D, query.max_degree, FRESH_POINTS, True, rel.to_str(order)
                )
            log.warning("relation candidate failed verification at degree %d; resampling", D)
        else:
            raise RelationError(f"no verified relation after {RETRIES} resamples at degree {D}")
    return RelationResult(None, None, query.max_degree)


def _pick(sys, coords, mons, kernel, target, tag, bound, max_jet) -> Optional[DiffPoly]:
    """First kernel vector whose target partial is nonzero on the variety."""
    witness = VarietyPoint(sys, f"{tag}/w", bound, max_jet)
    for vec in kernel:
        p = _assemble(coords, mons, vec)
        dp = p.partial(target)
        if dp.terms and dp.evaluate(witness) != 0:
            return p
    return None
