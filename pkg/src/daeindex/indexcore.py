"""The mu-sequence of a system and the indices derived from it."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .prolong import JacobianWindow, KPoint, build_window, degree_bound, prolongation
from .ranklab import (
    DEFAULT_EPSILON,
    ExactRankTooLarge,
    RankBudget,
    rank_exact,
    rank_probabilistic,
)
from .sysmodel import DAESystem, SystemShapeError, reduce_to_first_order, tilde_transform

log = logging.getLogger(__name__)

# rank modes
DEFAULT = "default"  # probabilistic, confirmed exactly when the window is small
EXACT = "exact"
PROBABILISTIC = "probabilistic"
MODES = (DEFAULT, EXACT, PROBABILISTIC)

# windows larger than this are not confirmed exactly in default mode
CONFIRM_MAX_DIM = 20
CONFIRM_MAX_DEGREE = 4


class StabilizationError(RuntimeError):
    """The mu-sequence did not behave as the genericity hypothesis predicts."""


@dataclass
class RankOptions:
    mode: str = DEFAULT
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown rank mode {self.mode!r}")


@dataclass
class RankRecord:
    k: int
    rows: int
    cols: int
    rank: int
    method: str
    probabilistic_rank: Optional[int] = None
    exact_rank: Optional[int] = None
    budget: Optional[RankBudget] = None
    trial_ranks: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "k": self.k,
            "shape": [self.rows, self.cols],
            "rank": self.rank,
            "method": self.method,
            "probabilistic_rank": self.probabilistic_rank,
            "exact_rank": self.exact_rank,
            "trial_ranks": list(self.trial_ranks),
        }
        if self.budget is not None:
            out.update(self.budget.to_dict())
        return out


def window_rank(w: JacobianWindow, opts: RankOptions) -> RankRecord:
    """Rank of a window under the chosen mode."""
    confirm = opts.mode == DEFAULT and _confirmable(w)
    return matrix_rank(
        w.sys, w.entries, opts, degree_bound(w.sys, w.k, w.i),
        reduced=w.reduced, confirm=confirm, k=w.k,
    )


def matrix_rank(
    sys: DAESystem,
    entries: List[List],
    opts: RankOptions,
    degree: int,
    reduced: Optional[Callable[[], List[List]]] = None,
    confirm: Optional[bool] = None,
    k: int = 0,
) -> RankRecord:
    """Rank over K of a matrix of formal entries (X-jets read through f).

    ``reduced`` supplies the X-jet-free entries for the exact route.  In
    default mode the exact confirmation runs only when ``confirm`` is true.
    """
    rows = len(entries)
    cols = len(entries[0]) if rows else 0
    if reduced is None:
        ctx = prolongation(sys)

        def reduced():
            return [[ctx.reduce(e) for e in row] for row in entries]

    rec = RankRecord(k, rows, cols, 0, opts.mode)
    if opts.mode in (DEFAULT, PROBABILISTIC):
        budget = RankBudget.for_shape(rows, cols, degree, opts.epsilon)

        def points(trial, bound):
            return KPoint(sys, f"{opts.seed}/{trial}", bound)

        res = rank_probabilistic(entries, budget, points)
        rec.probabilistic_rank = res.rank
        rec.trial_ranks = res.trial_ranks
        rec.budget = budget
        rec.rank = res.rank
        rec.method = "probabilistic"
    if confirm is None:
        confirm = min(rows, cols) <= CONFIRM_MAX_DIM
    if opts.mode == EXACT or (opts.mode == DEFAULT and confirm):
        try:
            rec.exact_rank = rank_exact(reduced())
        except ExactRankTooLarge as exc:
            if opts.mode == EXACT:
                raise
            log.info("exact confirmation skipped for k=%d: %s", k, exc)
        else:
            if rec.probabilistic_rank is not None and rec.probabilistic_rank != rec.exact_rank:
                log.warning(
                    "probabilistic rank %s disagrees with exact rank %s (k=%d)",
                    rec.probabilistic_rank, rec.exact_rank, k,
                )
            rec.rank = rec.exact_rank
            rec.method = "exact" if opts.mode == EXACT else "probabilistic+exact"
    return rec


def _confirmable(w: JacobianWindow) -> bool:
    rows, cols = w.shape
    if min(rows, cols) > CONFIRM_MAX_DIM:
        return False
    if w.sys.n and w.k + w.i > 3:
        # X-jet reduction grows entry degrees quickly; check before reducing
        if w.sys.input_degree() > 1:
            return False
    return w.max_degree(reduced=True) <= CONFIRM_MAX_DEGREE


def mu_bounds(sys: DAESystem, k: int) -> Tuple[int, int]:
    """Lower and upper bounds for mu_k from the null-row count and the row count."""
    if k < 0:
        raise ValueError("k must be >= 0")
    e, n, r = sys.e, sys.n, sys.r
    lower = n * min(k, e - 1) + sum(min(k, e - ej) for ej in sys.orders)
    upper = min(k, e) * (n + r)
    return lower, upper


def search_cap(sys: DAESystem) -> int:
    """A priori bound on the index: min(e(n+r), e + n + sum e_j)."""
    e = sys.e
    return min(e * (sys.n + sys.r), e + sys.n + sum(sys.orders))


@dataclass
class MuSequence:
    values: List[int]
    sigma: Optional[int]
    i: int
    bounds: List[Tuple[int, int]]
    records: List[RankRecord] = field(default_factory=list)

    @property
    def stabilized(self) -> bool:
        return self.sigma is not None

    @property
    def mu_sigma(self) -> int:
        if self.sigma is None:
            raise StabilizationError("sequence did not stabilize")
        return self.values[self.sigma]

    def table(self) -> List[Tuple[int, int, int, int]]:
        return [(k, mu, lo, hi) for k, (mu, (lo, hi)) in enumerate(zip(self.values, self.bounds))]

    def check_shape(self) -> None:
        """Strictly increasing before sigma, constant from sigma on, within bounds."""
        vals = self.values
        for k, (mu, (lo, hi)) in enumerate(zip(vals, self.bounds)):
            if not lo <= mu <= hi:
                raise StabilizationError(
                    f"mu_{k} = {mu} outside [{lo}, {hi}]: hypothesis or rank failure"
                )
        s = self.sigma if self.sigma is not None else len(vals) - 1
        for k in range(min(s, len(vals) - 1)):
            if not vals[k] < vals[k + 1]:
                raise StabilizationError(
                    f"mu not strictly increasing before stabilization (mu_{k}={vals[k]}, "
                    f"mu_{k + 1}={vals[k + 1]}): hypothesis or rank failure"
                )
        if self.sigma is not None:
            tail = vals[self.sigma:]
            if any(v != tail[0] for v in tail):
                raise StabilizationError(
                    "mu changed after stabilization: hypothesis or rank failure"
                )

    def to_dict(self) -> dict:
        return {
            "values": list(self.values),
            "sigma": self.sigma,
            "i": self.i,
            "bounds": [list(b) for b in self.bounds],
        }


def mu_sequence(
    sys: DAESystem,
    kmax: int,
    opts: Optional[RankOptions] = None,
    i: Optional[int] = None,
    stop_at_plateau: bool = False,
) -> MuSequence:
    """mu_k = k(n+r) - rank J(k, i) for k = 0..kmax (i defaults to e-1)."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    opts = opts or RankOptions()
    if i is None:
        i = sys.e - 1
    big = build_window(sys, kmax, i)
    values = [0]
    records = []
    sigma = None
    for k in range(1, kmax + 1):
        w = big.leading(k)
        rec = window_rank(w, opts)
        records.append(rec)
        values.append(k * (sys.n + sys.r) - rec.rank)
        if sigma is None and values[-1] == values[-2]:
            sigma = k - 1
            if stop_at_plateau:
                break
    bounds = [mu_bounds(sys, k) for k in range(len(values))]
    seq = MuSequence(values, sigma, i, bounds, records)
    seq.check_shape()
    return seq


def differentiation_index(
    sys: DAESystem, opts: Optional[RankOptions] = None, kmax: Optional[int] = None
) -> MuSequence:
    """sigma = min{k : mu_k = mu_(k+1)}, searched up to the a priori cap."""
    opts = opts or RankOptions()
    cap = search_cap(sys) if kmax is None else kmax
    seq = mu_sequence(sys, cap + 1, opts, stop_at_plateau=True)
    if seq.sigma is None:
        raise StabilizationError(
            f"mu-sequence did not stabilize by k={cap} (rank mode {opts.mode!r}); "
            "the right-hand sides g are probably not differentially algebraically "
            "independent (genericity hypothesis), or a rank evaluation failed"
        )
    return seq


def modified_index(sys: DAESystem, opts: Optional[RankOptions] = None, sigma: Optional[int] = None) -> MuSequence:
    """Index of the system rewritten so that every variable reaches order e."""
    seq = differentiation_index(tilde_transform(sys), opts)
    if sigma is not None and seq.sigma > sigma:
        raise StabilizationError(f"modified index {seq.sigma} exceeds index {sigma}")
    return seq


def hat_index(sys: DAESystem, opts: Optional[RankOptions] = None) -> MuSequence:
    """Index of the standard first-order reduction.

    Only where the modified index is also defined (n = 0, r = m) is it known
    to lie between that index and sigma.
    """
    return differentiation_index(reduce_to_first_order(sys), opts)
