"""Algebraic and differential transcendence bases of first-order systems.

Independence of a set of jets modulo the prolonged equations is decided by
the Jacobian criterion: the equations up to order ``sigma + level - 1`` form a
prime complete intersection, so a set S of coordinates is algebraically
independent modulo them exactly when deleting the columns of S from the
Jacobian leaves its rank unchanged at a generic point of the variety.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .diffpoly import ZERO, DiffPoly, JetVar
from .indexcore import MuSequence, RankOptions, differentiation_index, matrix_rank
from .invariants import ideal_order
from .prolong import prolongation
from .sysmodel import DAESystem, SystemShapeError, localize


class BasisError(RuntimeError):
    """The greedy construction found fewer derivatives than m - r."""


@dataclass
class Certificate:
    candidate: str
    level: int
    accepted: bool
    rank_full: int
    rank_deleted: int

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate,
            "level": self.level,
            "accepted": self.accepted,
            "rank_full": self.rank_full,
            "rank_deleted": self.rank_deleted,
        }


@dataclass
class BasisReport:
    W: List[str]
    xi: List[str]
    eta: List[str]
    B0: List[str]
    sigma: int
    ord: int
    certificates: List[Certificate] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "W": list(self.W),
            "xi": list(self.xi),
            "eta": list(self.eta),
            "B0": list(self.B0),
            "sigma": self.sigma,
            "ord": self.ord,
            "certificates": [c.to_dict() for c in self.certificates],
        }


class _Criterion:
    """Jacobian of F^[L-1], G^[L-1] w.r.t. X^[L], U^[L] with L = sigma + level."""

    def __init__(self, sys: DAESystem, sigma: int, level: int, opts: RankOptions):
        self.sys = sys
        self.opts = opts
        L = sigma + level
        ctx = prolongation(sys)
        self.cols = [JetVar(z, q) for q in range(L + 1) for z in sys.unknowns]
        rows = []
        for l in range(L):
            for idx in range(len(ctx.H)):
                h = ctx.equation(idx, l)
                present = h.variables()
                rows.append([h.partial(c) if c in present else ZERO for c in self.cols])
        self.rows = rows
        d = sys.input_degree()
        self.degree = d * (1 + L * max(1, d - 1))
        self._full: Optional[int] = None

    def rank(self, drop: Iterable[JetVar] = ()) -> int:
        drop = set(drop)
        keep = [j for j, c in enumerate(self.cols) if c not in drop]
        if not self.rows or not keep:
            return 0
        ent = [[row[j] for j in keep] for row in self.rows]
        return matrix_rank(self.sys, ent, self.opts, self.degree).rank

    @property
    def full(self) -> int:
        if self._full is None:
            self._full = self.rank()
        return self._full


def _check_first_order(sys: DAESystem) -> None:
    if sys.e != 1:
        raise SystemShapeError(
            f"transcendence bases need a first-order system (e = {sys.e}); "
            "apply reduce_to_first_order first"
        )


def _index(sys: DAESystem, opts: RankOptions, seq: Optional[MuSequence]) -> MuSequence:
    return seq if seq is not None else differentiation_index(sys, opts)


def is_algebraically_independent(
    sys: DAESystem,
    vars: Iterable[JetVar],
    level: int,
    opts: Optional[RankOptions] = None,
    seq: Optional[MuSequence] = None,
) -> bool:
    """Independence of jets of order <= ``level`` modulo the prolonged system."""
    _check_first_order(sys)
    if level not in (0, 1):
        raise ValueError("level must be 0 or 1")
    vars = set(vars)
    unknown = set(sys.unknowns)
    for v in vars:
        if v.base not in unknown or v.deriv > level:
            raise ValueError(f"{v} is not a jet of an unknown of order <= {level}")
    if not vars:
        return True
    opts = opts or RankOptions()
    crit = _Criterion(sys, _index(sys, opts, seq).sigma, level, opts)
    return crit.rank(vars) == crit.full


def differential_transcendence_basis(
    sys: DAESystem, opts: Optional[RankOptions] = None, seq: Optional[MuSequence] = None
) -> BasisReport:
    """Greedy basis in declared variable order (X before U).

    B0 is a maximal independent subset of the unknowns at level 0; then m - r
    derivatives of elements of B0 are added, one at a time, while the union
    stays independent at level 1.  W collects the variables whose derivative
    was chosen.
    """
    _check_first_order(sys)
    opts = opts or RankOptions()
    seq = _index(sys, opts, seq)
    sigma = seq.sigma
    order = ideal_order(sys, seq)
    certs: List[Certificate] = []

    c0 = _Criterion(sys, sigma, 0, opts)
    B0: List[JetVar] = []
    for z in sys.unknowns:
        v = JetVar(z, 0)
        rk = c0.rank(B0 + [v])
        ok = rk == c0.full
        certs.append(Certificate(z, 0, ok, c0.full, rk))
        if ok:
            B0.append(v)

    want = sys.m - sys.r
    c1 = _Criterion(sys, sigma, 1, opts)
    chosen: List[JetVar] = []
    for v in B0:
        if len(chosen) == want:
            break
        d = JetVar(v.base, 1)
        rk = c1.rank(B0 + chosen + [d])
        ok = rk == c1.full
        certs.append(Certificate(f"{v.base}'", 1, ok, c1.full, rk))
        if ok:
            chosen.append(d)
    if len(chosen) < want:
        raise BasisError(
            f"found {len(chosen)} of {want} independent derivatives; "
            "probable rank failure, retry with exact ranks"
        )
    W = [d.base for d in chosen]
    xi = [v.base for v in B0 if v.base not in W]
    taken = set(W) | set(xi)
    eta = [z for z in sys.unknowns if z not in taken]
    return BasisReport(W, xi, eta, [v.base for v in B0], sigma, order, certs)


def verify_order_preservation(sys: DAESystem, W: Sequence[str], opts: Optional[RankOptions] = None) -> bool:
    """ord of the system localized at W equals ord of the system."""
    opts = opts or RankOptions()
    return ideal_order(localize(sys, W), opts=opts) == ideal_order(sys, opts=opts)
