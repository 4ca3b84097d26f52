"""Independent reference computations used to check the engine."""

import itertools
from fractions import Fraction


def brute_force_assignment(weights):
    """Max over all permutations of sum_i w[i][perm[i]], skipping None entries."""
    n = len(weights)
    if n == 0:
        return 0
    best = None
    for perm in itertools.permutations(range(n)):
        vals = [weights[i][perm[i]] for i in range(n)]
        if any(v is None for v in vals):
            continue
        s = sum(vals)
        if best is None or s > best:
            best = s
    return best


def gauss_rank(matrix):
    """Rank by textbook Gaussian elimination over Fractions."""
    A = [[Fraction(x) for x in row] for row in matrix]
    if not A:
        return 0
    rank = 0
    ncols = len(A[0])
    for c in range(ncols):
        piv = next((r for r in range(rank, len(A)) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rank + 1, len(A)):
            if A[r][c] != 0:
                f = A[r][c] / A[rank][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank


def dense_eval(poly_terms, point):
    """Evaluate a {monomial: coeff} map where monomials are tuples of (var, exp)."""
    total = Fraction(0)
    for mono, c in poly_terms.items():
        v = Fraction(c)
        for var, e in mono:
            v *= Fraction(point[var]) ** e
        total += v
    return total
