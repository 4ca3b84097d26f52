"""Jacobian windows of prolonged systems and their evaluation semantics.

Window ``J(k, i)`` is the Jacobian of ``H^(i-e+1), ..., H^(i-e+k)`` (``H`` being
the F-block followed by the G-block) with respect to ``Z^(i+1), ..., Z^(i+k)``
(``Z`` being X followed by U).  Entries are kept as formal polynomials in the
X-jets and U-jets.  Their meaning as elements of ``K = k(X)<U>`` comes from
substituting every ``X^(s)``, ``s >= 1``, by the induced derivative of ``f``:
:func:`reduce` does it symbolically, :class:`KPoint` does it numerically by
assigning X-jets their induced values.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .diffpoly import FIELD_GENERATOR, ZERO, DiffPoly, JetVar, poly_sum
from .sysmodel import DAESystem, SystemShapeError

DEFAULT_BOUND = 2 ** 20


class Prolongation:
    """Per-system cache of prolonged equations and reduced X-jets."""

    def __init__(self, sys: DAESystem):
        self.sys = sys
        self.H: Tuple[DiffPoly, ...] = tuple(
            fx - DiffPoly.var(x, 1) for x, fx in zip(sys.x_names, sys.f)
        ) + tuple(sys.g)
        self.f_of = dict(zip(sys.x_names, sys.f))
        self._xjet: Dict[JetVar, DiffPoly] = {}
        self._lock = threading.Lock()

    def equation(self, idx: int, l: int) -> DiffPoly:
        return self.H[idx].derivative(l)

    def induced_derivative(self, p: DiffPoly) -> DiffPoly:
        """Derivative in K of a polynomial free of X-jets of order >= 1."""
        d = p.total_derivative()
        xs = {JetVar(x, 1): fx for x, fx in self.f_of.items()}
        if any(v in xs for v in d.variables()):
            d = d.substitute(xs)
        return d

    def xjet(self, v: JetVar) -> DiffPoly:
        """Reduced representative of ``x^(s)``."""
        if v.deriv == 0:
            return DiffPoly.from_jet(v)
        got = self._xjet.get(v)
        if got is not None:
            return got
        if v.deriv == 1:
            val = self.f_of[v.base]
        else:
            val = self.induced_derivative(self.xjet(JetVar(v.base, v.deriv - 1)))
        with self._lock:
            self._xjet[v] = val
        return val

    def reduce(self, p: DiffPoly) -> DiffPoly:
        mapping = {
            v: self.xjet(v)
            for v in p.variables()
            if v.deriv >= 1 and v.base in self.f_of
        }
        return p.substitute(mapping) if mapping else p


@lru_cache(maxsize=256)
def prolongation(sys: DAESystem) -> Prolongation:
    return Prolongation(sys)


def reduce(sys: DAESystem, p: DiffPoly) -> DiffPoly:
    """Representative of ``p`` in k[X, U-jets] (X-jets substituted out)."""
    return prolongation(sys).reduce(p)


def induced_derivative(sys: DAESystem, p: DiffPoly) -> DiffPoly:
    return prolongation(sys).induced_derivative(reduce(sys, p))


@dataclass
class JacobianWindow:
    sys: DAESystem
    k: int
    i: int
    entries: List[List[DiffPoly]]
    row_labels: List[str]
    col_labels: List[JetVar]
    _reduced: Optional[List[List[DiffPoly]]] = field(default=None, repr=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.entries), len(self.col_labels)

    @property
    def block_shape(self) -> Tuple[int, int]:
        return self.sys.n + self.sys.r, self.sys.n + self.sys.m

    def block(self, p: int, q: int, reduced: bool = False) -> List[List[DiffPoly]]:
        """Block ``(p, q)``, 1-indexed."""
        a, b = self.block_shape
        src = self.reduced() if reduced else self.entries
        return [row[(q - 1) * b:q * b] for row in src[(p - 1) * a:p * a]]

    def reduced(self) -> List[List[DiffPoly]]:
        if self._reduced is None:
            ctx = prolongation(self.sys)
            self._reduced = [[ctx.reduce(e) for e in row] for row in self.entries]
        return self._reduced

    def leading(self, k: int) -> "JacobianWindow":
        """The nested window ``J(k, i)`` for ``k <= self.k``."""
        if not 1 <= k <= self.k:
            raise ValueError("k out of range")
        a, b = self.block_shape
        ent = [row[:k * b] for row in self.entries[:k * a]]
        red = None
        if self._reduced is not None:
            red = [row[:k * b] for row in self._reduced[:k * a]]
        return JacobianWindow(self.sys, k, self.i, ent, self.row_labels[:k * a], self.col_labels[:k * b], red)

    def null_rows(self) -> int:
        return sum(1 for row in self.entries if all(e.is_zero() for e in row))

    def max_degree(self, reduced: bool = True) -> int:
        src = self.reduced() if reduced else self.entries
        return max((e.total_degree() for row in src for e in row), default=0)

    def dump(self, reduced: bool = True) -> List[List[str]]:
        """Grid of serialized entries (golden-file format)."""
        order = self.sys.variable_order()
        src = self.reduced() if reduced else self.entries
        return [[e.to_str(order) for e in row] for row in src]


def build_window(sys: DAESystem, k: int, i: Optional[int] = None) -> JacobianWindow:
    e = sys.e
    if i is None:
        i = e - 1
    if k < 1:
        raise ValueError("k must be >= 1")
    if i < e - 1:
        raise SystemShapeError(f"window index i={i} is below e-1={e - 1}")
    ctx = prolongation(sys)
    Z = list(sys.x_names) + list(sys.u_names)
    rows: List[List[DiffPoly]] = []
    labels: List[str] = []
    cols = [JetVar(z, i + q) for q in range(1, k + 1) for z in Z]
    hnames = [f"F{a + 1}" for a in range(sys.n)] + [f"G{j + 1}" for j in range(sys.r)]
    for p in range(1, k + 1):
        l = i - e + p
        for idx in range(len(ctx.H)):
            Hl = ctx.equation(idx, l)
            present = Hl.variables()
            rows.append([Hl.partial(c) if c in present else ZERO for c in cols])
            labels.append(f"{hnames[idx]}^({l})")
    return JacobianWindow(sys, k, i, rows, labels, cols)


# ----------------------------------------------------------------------
# points of K


class KPoint(Mapping):
    """Random specialization of X, U-jets, parameter jets and ``t``.

    Free coordinates are drawn lazily, each from its own RNG seeded by
    ``(seed, variable)``, so a point does not depend on the order in which
    coordinates are requested.  X-jets of order >= 1 get the values of the
    induced derivation.
    """

    def __init__(self, sys: DAESystem, seed, bound: int = DEFAULT_BOUND, max_jet: int = 0):
        self.sys = sys
        self.seed = seed
        self.bound = bound
        self.max_jet = max_jet
        self._values: Dict[JetVar, object] = {}
        self._xs = set(sys.x_names)
        self._free = set(sys.u_names) | set(sys.parameter_names)
        self._f = dict(zip(sys.x_names, sys.f))
        for x in sys.x_names:
            self[JetVar(x, 0)]
        for u in list(sys.u_names) + list(sys.parameter_names):
            for l in range(max_jet + 1):
                self[JetVar(u, l)]
        if sys.field == "Q(t)":
            self[JetVar(FIELD_GENERATOR, 0)]

    def _draw(self, v: JetVar) -> int:
        rng = random.Random(f"{self.seed}|{v.base}|{v.deriv}")
        return rng.randint(-self.bound, self.bound)

    def __getitem__(self, v: JetVar):
        got = self._values.get(v)
        if got is not None:
            return got
        if v.base in self._xs:
            if v.deriv == 0:
                val = self._draw(v)
            else:
                # x^(p) = value of f^(p-1), which only involves x-jets below p
                val = self._f[v.base].derivative(v.deriv - 1).evaluate(self)
        elif v.base in self._free or (v.base == FIELD_GENERATOR and v.deriv == 0):
            val = self._draw(v)
        else:
            raise KeyError(f"variable {v} is not covered by this point")
        self._values[v] = val
        return val

    def __iter__(self):
        return iter(dict(self._values))

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, v) -> bool:
        return isinstance(v, JetVar) and (
            v.base in self._xs or v.base in self._free or v == JetVar(FIELD_GENERATOR, 0)
        )


def sample_kpoint(sys: DAESystem, max_jet: int, seed, bound: int = DEFAULT_BOUND) -> KPoint:
    if max_jet < 0:
        raise ValueError("max_jet must be >= 0")
    return KPoint(sys, seed, bound, max_jet)


def evaluate_window(w: JacobianWindow, pt: Mapping[JetVar, object]) -> List[List[object]]:
    return evaluate_matrix(w.entries, pt)


def evaluate_matrix(entries: Sequence[Sequence[DiffPoly]], pt: Mapping[JetVar, object]) -> List[List[object]]:
    return [[e.evaluate(pt) if e.terms else 0 for e in row] for row in entries]


def degree_bound(sys: DAESystem, k: int, i: int) -> int:
    """Conservative total-degree bound for reduced window entries."""
    d = sys.input_degree()
    return d * (1 + (i + k) * max(1, d - 1))
