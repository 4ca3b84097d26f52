import math
import random
from fractions import Fraction

import pytest

from conftest import GOLDEN, golden
from oracles import gauss_rank
from daeindex.diffpoly import DiffPoly, ZERO
from daeindex.prolong import KPoint, build_window, degree_bound, evaluate_window, sample_kpoint
from daeindex.ranklab import (
    DEFAULT_EPSILON,
    ExactRankTooLarge,
    RankBudget,
    rank_exact,
    rank_probabilistic,
    rational_nullspace,
    rational_rank,
)
from daeindex.sysmodel import tilde_transform


def _points(sys, seed=0):
    return lambda trial, bound: KPoint(sys, f"{seed}/{trial}", bound)


def test_zero_matrix():
    Z = [[ZERO] * 3 for _ in range(2)]
    b = RankBudget.for_shape(2, 3, 1)
    assert rank_probabilistic(Z, b, lambda t, B: {}).rank == 0
    assert rank_exact(Z) == 0


def test_identity_block(pendulum):
    s = golden("ode_quadratic")
    w = build_window(s, 1, 0)
    b = RankBudget.for_shape(*w.shape, degree_bound(s, 1, 0))
    assert rank_probabilistic(w.entries, b, _points(s)).rank == s.n


def test_pendulum_window_rank(pendulum):
    w = build_window(pendulum, 5, 1)
    b = RankBudget.for_shape(*w.shape, degree_bound(pendulum, 5, 1))
    assert rank_probabilistic(w.entries, b, _points(pendulum)).rank == 11
    assert rank_exact(w.reduced()) == 11


def test_pendulum_tilde_rank(pendulum):
    t = tilde_transform(pendulum)
    assert rank_exact(build_window(t, 3, 1).reduced()) == 7


def test_diagonal_rank():
    u1, u2 = DiffPoly.var("u1"), DiffPoly.var("u2")
    M = [[u1, ZERO, ZERO], [ZERO, ZERO, ZERO], [ZERO, ZERO, u2]]
    assert rank_exact(M) == 2


@pytest.mark.parametrize("name", GOLDEN)
def test_transpose_rank(name):
    s = golden(name)
    M = build_window(s, 3).reduced()
    T = [list(col) for col in zip(*M)]
    assert rank_exact(M) == rank_exact(T)


def test_exact_cap():
    M = [[DiffPoly.var("u1")] * 5 for _ in range(5)]
    with pytest.raises(ExactRankTooLarge):
        rank_exact(M, max_dim=3)


def test_budget_accounting():
    b = RankBudget.for_shape(15, 15, 10, DEFAULT_EPSILON)
    assert b.bound >= 2 ** 20
    assert b.per_trial_failure <= 2 ** -10
    assert b.failure_probability <= DEFAULT_EPSILON
    assert b.trials == math.ceil(math.log(1 / DEFAULT_EPSILON) / math.log(1 / b.per_trial_failure))
    assert min(b.epsilon, b.degree, b.trials, b.bound) > 0
    with pytest.raises(ValueError):
        RankBudget.for_shape(2, 2, 1, 1.5)


def test_rational_rank_matches_gauss():
    rng = random.Random(4)
    for _ in range(200):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        base = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(c)] for _ in range(rng.randint(1, 3))]
        # rows are random combinations of a few base rows: rank is often deficient
        M = []
        for _ in range(r):
            coef = [rng.randint(-2, 2) for _ in base]
            M.append([sum(a * row[j] for a, row in zip(coef, base)) for j in range(c)])
        assert rational_rank(M) == gauss_rank(M)


def test_nullspace():
    M = [[1, 2, 3], [2, 4, 6]]
    ker = rational_nullspace(M, 3)
    assert len(ker) == 2
    for v in ker:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)


@pytest.mark.parametrize("name", GOLDEN)
def test_single_trial_le_max_le_exact(name):
    s = golden(name)
    w = build_window(s, 3)
    exact = rank_exact(w.reduced())
    b = RankBudget.for_shape(*w.shape, degree_bound(s, 3, w.i))
    res = rank_probabilistic(w.entries, b, _points(s, 9))
    assert all(t <= res.rank for t in res.trial_ranks)
    assert res.rank <= exact
    # evaluated ranks agree with the Gaussian oracle
    M = evaluate_window(w, sample_kpoint(s, 6, 2))
    assert rational_rank(M) == gauss_rank(M)


@pytest.mark.parametrize("name", GOLDEN)
def test_rank_monotone_in_k(name):
    s = golden(name)
    big = build_window(s, 5)
    ranks = [rank_exact(big.leading(k).reduced()) for k in range(1, 6)]
    assert ranks == sorted(ranks)
