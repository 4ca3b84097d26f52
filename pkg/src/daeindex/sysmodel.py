"""The DAE system record and its structural transformations.

A system has the shape::

    x_i' = f_i(X, U)                  i = 1..n
    g_j(X, U, U', ..., U^(e_j)) = Y_j j = 1..r

with the ``Y_j`` generic parameters.  Localized systems additionally carry
``parameter_names``: former unknowns that now live in the ground field.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .diffpoly import FIELD_GENERATOR, DiffPoly, JetVar

log = logging.getLogger(__name__)


class SystemShapeError(ValueError):
    """A structural precondition on the system does not hold."""


@dataclass(frozen=True)
class DAESystem:
    field: str
    x_names: Tuple[str, ...]
    u_names: Tuple[str, ...]
    f: Tuple[DiffPoly, ...]
    g: Tuple[DiffPoly, ...]
    parameter_names: Tuple[str, ...] = ()
    # residual names per g-equation; None marks an equation whose right-hand
    # side is identically zero (an f-equation turned into a constraint)
    y_names: Optional[Tuple[Optional[str], ...]] = None
    name: str = ""
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.y_names is None:
            taken = set(self.x_names) | set(self.u_names) | set(self.parameter_names)
            ys = []
            for j in range(len(self.g)):
                cand = f"y{j + 1}"
                while cand in taken:
                    cand = "y" + cand
                ys.append(cand)
            object.__setattr__(self, "y_names", tuple(ys))

    # structural counts -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.x_names)

    @property
    def m(self) -> int:
        return len(self.u_names)

    @property
    def r(self) -> int:
        return len(self.g)

    @property
    def orders(self) -> Tuple[int, ...]:
        """e_j: order of g_j in the unknown U-variables (0 when none occurs)."""
        out = []
        for g in self.g:
            best = 0
            for u in self.u_names:
                o = g.order_of(u)
                if o is not None and o > best:
                    best = o
            out.append(best)
        return tuple(out)

    @property
    def e(self) -> int:
        return max((1,) + self.orders)

    @property
    def eps(self) -> Tuple[Optional[int], ...]:
        """Maximal order of each U_i over the g's; ``None`` if U_i occurs in no g."""
        out = []
        for u in self.u_names:
            best = None
            for g in self.g:
                o = g.order_of(u)
                if o is not None and (best is None or o > best):
                    best = o
            out.append(best)
        return tuple(out)

    def order_matrix(self) -> List[List[Optional[int]]]:
        """e_ij: order of U_i in g_j (rows i over U, columns j over g)."""
        return [[g.order_of(u) for g in self.g] for u in self.u_names]

    @property
    def unknowns(self) -> Tuple[str, ...]:
        return self.x_names + self.u_names

    def variable_order(self) -> Dict[str, int]:
        names = list(self.x_names) + list(self.u_names) + list(self.parameter_names)
        names += [y for y in self.y_names if y is not None]
        return {v: i for i, v in enumerate(names)}

    def input_degree(self) -> int:
        """Upper bound d on the total degrees of the input polynomials (at least 1)."""
        return max([1] + [p.total_degree() for p in self.f + self.g])

    @property
    def is_square(self) -> bool:
        return self.r == self.m

    # validation ----------------------------------------------------------
    def validate(self) -> "DAESystem":
        if self.m < 1 and not self.parameter_names:
            raise SystemShapeError("at least one U-variable is required")
        if len(self.f) != self.n:
            raise SystemShapeError(f"length mismatch: {self.n} x-variables but {len(self.f)} f-expressions")
        names = list(self.x_names) + list(self.u_names) + list(self.parameter_names)
        if len(set(names)) != len(names):
            raise SystemShapeError("duplicate names")
        if FIELD_GENERATOR in names:
            raise SystemShapeError("'t' is reserved")
        known = set(names) | {FIELD_GENERATOR}
        for i, p in enumerate(self.f):
            for v in p.variables():
                if v.base not in known:
                    raise SystemShapeError(f"f[{i}] uses undeclared variable {v.base!r}")
                if v.deriv >= 1 and v.base != FIELD_GENERATOR and v.base not in self.parameter_names:
                    raise SystemShapeError(f"derivative in f: f[{i}] contains {v}")
        xs = set(self.x_names)
        for j, p in enumerate(self.g):
            for v in p.variables():
                if v.base not in known:
                    raise SystemShapeError(f"g[{j}] uses undeclared variable {v.base!r}")
                if v.base in xs and v.deriv >= 1:
                    raise SystemShapeError(f"g[{j}] contains a derivative of x-variable {v.base}")
        if self.field == "Q" and any(
            v.base == FIELD_GENERATOR for p in self.f + self.g for v in p.variables()
        ):
            raise SystemShapeError("'t' used over Q")
        warns = []
        used = set()
        for p in self.f + self.g:
            used |= {v.base for v in p.variables()}
        for u in self.u_names:
            if u not in used:
                msg = f"{u} occurs in no equation and is trivially free"
                log.warning(msg)
                warns.append(msg)
        return replace(self, warnings=tuple(warns))

    def summary(self) -> Dict[str, object]:
        return {
            "x": list(self.x_names),
            "u": list(self.u_names),
            "parameters": list(self.parameter_names),
            "n": self.n,
            "m": self.m,
            "r": self.r,
            "e_j": list(self.orders),
            "eps": list(self.eps),
            "e": self.e,
        }


# ----------------------------------------------------------------------
# transformations


def _fresh(base: str, taken: set) -> str:
    cand = base
    k = 0
    while cand in taken:
        k += 1
        cand = f"{base}_{k}"
    taken.add(cand)
    return cand


def tilde_transform(sys: DAESystem) -> DAESystem:
    """Rewrite every U_i as Z_i^(e - eps_i) so that each Z_i reaches order e.

    Defined only for square systems without X-variables in which every U_i
    occurs in some g.
    """
    if sys.n != 0 or sys.r != sys.m:
        raise SystemShapeError(
            f"tilde transform needs n = 0 and r = m (got n={sys.n}, r={sys.r}, m={sys.m})"
        )
    eps = sys.eps
    missing = [u for u, ep in zip(sys.u_names, eps) if ep is None]
    if missing:
        raise SystemShapeError(f"tilde transform needs every U-variable in some g; absent: {missing}")
    e = sys.e
    taken = set(sys.parameter_names) | {FIELD_GENERATOR}
    z_names = [_fresh(f"z{i + 1}", taken) for i in range(sys.m)]
    shift = {u: (z, e - ep) for u, z, ep in zip(sys.u_names, z_names, eps)}

    def ren(v: JetVar) -> JetVar:
        if v.base in shift:
            z, s = shift[v.base]
            return JetVar(z, v.deriv + s)
        return v

    g = tuple(p.rename(ren) for p in sys.g)
    return DAESystem(
        field=sys.field,
        x_names=(),
        u_names=tuple(z_names),
        f=(),
        g=g,
        parameter_names=sys.parameter_names,
        y_names=sys.y_names,
        name=(sys.name + "~") if sys.name else "",
    ).validate()


def reduce_to_first_order(sys: DAESystem) -> DAESystem:
    """Standard first-order reduction.

    Each U_i with eps_i >= 2 is split into copies ``<u>_0 .. <u>_<eps_i - 1>``
    standing for its derivatives of order 0 .. eps_i - 1.  The copies below the
    top one become X-variables linked by ``(<u>_(l-1))' = <u>_l``; the top copy
    stays a U-variable and carries the remaining derivative, so every g is
    rewritten with order at most 1.  Variables with eps_i <= 1 are unchanged.
    """
    eps = sys.eps
    taken = set(sys.unknowns) | set(sys.parameter_names) | {FIELD_GENERATOR}
    copies: Dict[str, List[str]] = {}
    for u, ep in zip(sys.u_names, eps):
        if ep is None or ep <= 1:
            copies[u] = [u]
        else:
            taken.discard(u)
            copies[u] = [_fresh(f"{u}_{l}", taken) for l in range(ep)]

    def ren(v: JetVar) -> JetVar:
        names = copies.get(v.base)
        if names is None:
            return v
        top = len(names) - 1
        if v.deriv <= top:
            return JetVar(names[v.deriv], 0)
        return JetVar(names[top], v.deriv - top)

    new_x = list(sys.x_names)
    new_f = [p.rename(ren) for p in sys.f]
    new_u = []
    for u in sys.u_names:
        names = copies[u]
        for l in range(1, len(names)):
            new_x.append(names[l - 1])
            new_f.append(DiffPoly.var(names[l]))
        new_u.append(names[-1])
    new_g = tuple(p.rename(ren) for p in sys.g)
    return DAESystem(
        field=sys.field,
        x_names=tuple(new_x),
        u_names=tuple(new_u),
        f=tuple(new_f),
        g=new_g,
        parameter_names=sys.parameter_names,
        y_names=sys.y_names,
        name=(sys.name + "^") if sys.name else "",
    ).validate()


def localize(sys: DAESystem, W: Iterable[str]) -> DAESystem:
    """Move the unknowns in ``W`` to the ground field.

    A localized U-variable simply becomes a parameter.  A localized
    X-variable also becomes a parameter, and its equation ``x' = f`` turns
    into the constraint ``f - x' = 0`` appended to the g-block.
    """
    W = set(W)
    unknown = set(sys.unknowns)
    if not W <= unknown:
        raise SystemShapeError(f"not unknowns of the system: {sorted(W - unknown)}")
    if not W:
        return sys
    x_names, f = [], []
    extra_g, extra_y = [], []
    for x, fx in zip(sys.x_names, sys.f):
        if x in W:
            extra_g.append(fx - DiffPoly.var(x, 1))
            extra_y.append(None)
        else:
            x_names.append(x)
            f.append(fx)
    u_names = [u for u in sys.u_names if u not in W]
    params = tuple(sys.parameter_names) + tuple(v for v in sys.unknowns if v in W)
    out = DAESystem(
        field=sys.field,
        x_names=tuple(x_names),
        u_names=tuple(u_names),
        f=tuple(f),
        g=tuple(sys.g) + tuple(extra_g),
        parameter_names=params,
        y_names=tuple(sys.y_names) + tuple(extra_y),
        name=sys.name,
    )
    return out.validate()


def validate(sys: DAESystem) -> DAESystem:
    return sys.validate()
