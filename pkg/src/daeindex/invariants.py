"""Hilbert-Kolchin data of the system ideal and classical order bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .indexcore import MuSequence, RankOptions, differentiation_index
from .sysmodel import DAESystem, SystemShapeError


class OrderBoundViolation(RuntimeError):
    """The computed order exceeds a classical bound (points at a rank failure)."""


@dataclass(frozen=True)
class HilbertKolchinRecord:
    slope: int
    constant: int
    regularity_bound: int
    mu_sigma: int
    note: str = ""

    def value(self, i: int) -> int:
        """The polynomial (m - r)(T + 1) + ord at T = i."""
        return self.slope * (i + 1) + self.constant

    def to_dict(self) -> dict:
        out = {
            "slope": self.slope,
            "constant": self.constant,
            "regularity_bound": self.regularity_bound,
            "mu_sigma": self.mu_sigma,
        }
        if self.note:
            out["note"] = self.note
        return out


def _seq(sys: DAESystem, seq: Optional[MuSequence], opts: Optional[RankOptions]) -> MuSequence:
    return seq if seq is not None else differentiation_index(sys, opts)


def ideal_order(sys: DAESystem, seq: Optional[MuSequence] = None, opts: Optional[RankOptions] = None) -> int:
    """ord = e(n + r) - mu_sigma."""
    seq = _seq(sys, seq, opts)
    return sys.e * (sys.n + sys.r) - seq.mu_sigma


def hilbert_kolchin(
    sys: DAESystem, seq: Optional[MuSequence] = None, opts: Optional[RankOptions] = None
) -> HilbertKolchinRecord:
    seq = _seq(sys, seq, opts)
    note = ""
    if sys.e == 1:
        note = "function equals polynomial for all i"
    return HilbertKolchinRecord(
        slope=sys.m - sys.r,
        constant=ideal_order(sys, seq),
        regularity_bound=sys.e - 1,
        mu_sigma=seq.mu_sigma,
        note=note,
    )


def greenspan_bound(sys: DAESystem) -> int:
    return sys.n + sum(sys.orders)


def ritt_bound(sys: DAESystem) -> int:
    """n + sum of the maximal orders eps_i (absent variables contribute 0)."""
    return sys.n + sum(ep or 0 for ep in sys.eps)


# ----------------------------------------------------------------------
# Jacobi's bound


def hungarian_max(weights: Sequence[Sequence[Optional[int]]]) -> Optional[Tuple[int, List[int]]]:
    """Maximum-weight perfect matching of a square integer matrix.

    ``None`` entries are forbidden.  Returns ``(total, assignment)`` with
    ``assignment[row] = column``, or ``None`` when no perfect matching avoids
    the forbidden entries.  O(n^3) shortest augmenting paths with potentials.
    """
    n = len(weights)
    if n == 0:
        return 0, []
    if any(len(row) != n for row in weights):
        raise ValueError("weight matrix must be square")
    finite = [w for row in weights for w in row if w is not None]
    if not finite:
        return None
    # minimize cost = top - w; forbidden entries cost more than any full
    # assignment of allowed ones, so they are used only when unavoidable
    top = max(finite)
    spread = top - min(finite)
    big = n * (spread + 1) + 1
    cost = [[(top - w) if w is not None else big for w in row] for row in weights]
    INF = float("inf")
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    match_col = [0] * (n + 1)  # match_col[j] = row assigned to column j (1-based)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match_col[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match_col[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_col[j0] == 0:
                break
        while True:
            j1 = way[j0]
            match_col[j0] = match_col[j1]
            j0 = j1
            if j0 == 0:
                break
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[match_col[j] - 1] = j - 1
    if any(weights[i][assignment[i]] is None for i in range(n)):
        return None
    return sum(weights[i][assignment[i]] for i in range(n)), assignment


def jacobi_bound(sys: DAESystem) -> Optional[int]:
    """n + max over permutations of sum_j e_(tau(j), j); ``None`` if vacuous.

    Requires a square system in which every U-variable occurs in some g.
    """
    if sys.m != sys.r:
        raise SystemShapeError(f"Jacobi bound needs m = r (got m={sys.m}, r={sys.r})")
    if any(ep is None for ep in sys.eps):
        raise SystemShapeError("Jacobi bound needs every U-variable to occur in some g")
    best = hungarian_max(sys.order_matrix())
    if best is None:
        return None
    return sys.n + best[0]


@dataclass
class BoundsReport:
    ord: int
    greenspan: int
    ritt: int
    jacobi: Optional[int]
    jacobi_status: str
    tight: List[str]

    def to_dict(self) -> dict:
        return {
            "ord": self.ord,
            "greenspan": self.greenspan,
            "ritt": self.ritt,
            "jacobi": self.jacobi if self.jacobi_status == "ok" else self.jacobi_status,
            "tight": list(self.tight),
        }


def check_order_bounds(
    sys: DAESystem, seq: Optional[MuSequence] = None, opts: Optional[RankOptions] = None
) -> BoundsReport:
    """ord against every applicable bound; raises if one is violated."""
    o = ideal_order(sys, seq, opts)
    gb, rb = greenspan_bound(sys), ritt_bound(sys)
    jb = None
    status = "ok"
    try:
        jb = jacobi_bound(sys)
        if jb is None:
            status = "vacuous"
    except SystemShapeError:
        status = "n/a"
    bounds = {"greenspan": gb, "ritt": rb}
    if jb is not None:
        bounds["jacobi"] = jb
    violated = [name for name, b in bounds.items() if o > b]
    if violated:
        raise OrderBoundViolation(f"ord={o} exceeds {violated}: {bounds}")
    tight = [name for name, b in bounds.items() if o == b]
    return BoundsReport(o, gb, rb, jb, status, tight)
