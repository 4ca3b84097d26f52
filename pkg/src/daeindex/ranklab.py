"""Ranks of matrices with polynomial entries.

Two independent routes:

* :func:`rank_probabilistic` specializes the entries at random integer points
  and takes the maximum rational rank over several trials.  Specialization can
  only lower the rank, so the result never overshoots; by Schwartz-Zippel it
  undershoots with probability at most ``epsilon``.
* :func:`rank_exact` runs fraction-free (Bareiss) elimination directly on the
  polynomial entries with symbolic zero tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Mapping, Optional, Sequence

from .diffpoly import ONE_POLY, ZERO, DiffPoly, JetVar
from .prolong import evaluate_matrix

DEFAULT_EPSILON = 2.0 ** -40
MIN_BOUND = 2 ** 20

# default resource cap for the exact route
EXACT_MAX_DIM = 64
EXACT_MAX_TERMS = 4000


class ExactRankTooLarge(RuntimeError):
    """The exact elimination exceeded its resource cap."""


@dataclass(frozen=True)
class RankBudget:
    """Schwartz-Zippel accounting for one probabilistic rank query.

    A nonzero minor of the matrix has degree at most ``minor_degree`` =
    ``min(rows, cols) * D``; it vanishes at a uniform point of
    ``[-B, B]^N`` with probability at most ``minor_degree / (2B + 1)``.
    ``trials`` independent points push the failure probability below
    ``epsilon``.
    """

    epsilon: float
    degree: int
    trials: int
    bound: int
    minor_degree: int = 0

    @property
    def per_trial_failure(self) -> float:
        return self.minor_degree / (2 * self.bound + 1)

    @property
    def failure_probability(self) -> float:
        return self.per_trial_failure ** self.trials

    @classmethod
    def for_shape(cls, rows: int, cols: int, degree: int, epsilon: float = DEFAULT_EPSILON) -> "RankBudget":
        if not 0 < epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        degree = max(1, degree)
        minor = max(1, min(rows, cols)) * degree
        bound = MIN_BOUND
        # keep every single trial below failure probability 2^-10
        while minor / (2 * bound + 1) > 2.0 ** -10:
            bound *= 2
        p = minor / (2 * bound + 1)
        trials = max(1, math.ceil(math.log(1 / epsilon) / math.log(1 / p)))
        return cls(epsilon, degree, trials, bound, minor)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "degree_bound": self.degree,
            "trials": self.trials,
            "sample_bound": self.bound,
            "minor_degree": self.minor_degree,
        }


@dataclass
class RankResult:
    rank: int
    trial_ranks: List[int] = field(default_factory=list)
    budget: Optional[RankBudget] = None


# ----------------------------------------------------------------------
# rational matrices


def rational_rank(matrix: Sequence[Sequence[object]]) -> int:
    """Exact rank of a matrix of ints / Fractions (integer Bareiss)."""
    rows = []
    for row in matrix:
        if not any(row):
            continue
        den = 1
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = den * x.denominator // math.gcd(den, x.denominator)
        rows.append([int(x * den) for x in row])
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    prev = 1
    col = 0
    nrows = len(rows)
    while rank < nrows and col < ncols:
        piv = None
        for r in range(rank, nrows):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        prow = rows[rank]
        for r in range(rank + 1, nrows):
            row = rows[r]
            a = row[col]
            if a:
                rows[r] = [(p * row[j] - a * prow[j]) // prev for j in range(ncols)]
            elif p != prev:
                rows[r] = [(p * x) // prev for x in row]
        prev = p
        rank += 1
        col += 1
    return rank


def rational_nullspace(matrix: Sequence[Sequence[object]], ncols: int) -> List[List[Fraction]]:
    """Basis of the right kernel, one vector per free column of the RREF."""
    A = [[Fraction(x) for x in row] for row in matrix]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(A)):
            if A[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -A[row_idx][fc]
        basis.append(v)
    return basis


# ----------------------------------------------------------------------
# polynomial matrices


def rank_probabilistic(
    entries: Sequence[Sequence[DiffPoly]],
    budget: RankBudget,
    point_source: Callable[[int, int], Mapping[JetVar, object]],
) -> RankResult:
    """Max over ``budget.trials`` of the rank at ``point_source(trial, bound)``."""
    nrows = len(entries)
    ncols = len(entries[0]) if nrows else 0
    if nrows == 0 or ncols == 0 or all(e.is_zero() for row in entries for e in row):
        return RankResult(0, [0], budget)
    cap = min(nrows, ncols)
    best = 0
    ranks = []
    for trial in range(budget.trials):
        pt = point_source(trial, budget.bound)
        rk = rational_rank(evaluate_matrix(entries, pt))
        ranks.append(rk)
        best = max(best, rk)
        if best == cap:
            # full rank cannot be exceeded
            break
    return RankResult(best, ranks, budget)


def _weight(p: DiffPoly):
    return (len(p.terms), p.total_degree())


def rank_exact(
    entries: Sequence[Sequence[DiffPoly]],
    max_dim: int = EXACT_MAX_DIM,
    max_terms: int = EXACT_MAX_TERMS,
) -> int:
    """Rank over the fraction field of the entry ring by Bareiss elimination.

    Complete pivoting on the entry with fewest terms keeps minors small.
    Raises :class:`ExactRankTooLarge` when the matrix or an intermediate entry
    exceeds the resource cap.
    """
    M = [[e for e in row] for row in entries if any(not e.is_zero() for e in row)]
    if not M:
        return 0
    nrows, ncols = len(M), len(M[0])
    if min(nrows, ncols) > max_dim:
        raise ExactRankTooLarge(f"{nrows}x{ncols} exceeds the exact-rank cap {max_dim}")
    cols = list(range(ncols))
    prev = ONE_POLY
    rank = 0
    while rank < nrows and rank < ncols:
        best = None
        for i in range(rank, nrows):
            row = M[i]
            for jj in range(rank, ncols):
                e = row[cols[jj]]
                if e.terms:
                    w = _weight(e)
                    if best is None or w < best[0]:
                        best = (w, i, jj)
                        if w == (1, 0):
                            break
            if best is not None and best[0] == (1, 0):
                break
        if best is None:
            break
        _, pi, pj = best
        M[rank], M[pi] = M[pi], M[rank]
        cols[rank], cols[pj] = cols[pj], cols[rank]
        prow = M[rank]
        pc = cols[rank]
        p = prow[pc]
        rest = cols[rank + 1:]
        for i in range(rank + 1, nrows):
            row = M[i]
            a = row[pc]
            new = list(row)
            for c in rest:
                if a.terms:
                    val = p * row[c] - a * prow[c]
                elif row[c].terms:
                    val = p * row[c]
                else:
                    continue
                if val.terms and not prev.is_constant():
                    val = val.exact_div(prev)
                elif val.terms and prev != 1:
                    val = val * (Fraction(1) / Fraction(prev.constant_value()))
                if len(val.terms) > max_terms:
                    raise ExactRankTooLarge(f"intermediate entry with {len(val.terms)} terms")
                new[c] = val
            new[pc] = ZERO
            M[i] = new
        prev = p
        rank += 1
    return rank
