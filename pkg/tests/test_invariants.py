import random

import pytest

from conftest import GOLDEN, chain, golden, system
from oracles import brute_force_assignment
from daeindex.indexcore import differentiation_index
from daeindex.invariants import (
    check_order_bounds,
    greenspan_bound,
    hilbert_kolchin,
    hungarian_max,
    ideal_order,
    jacobi_bound,
    ritt_bound,
)
from daeindex.sysmodel import SystemShapeError, localize


def test_ideal_order_examples(pendulum):
    assert ideal_order(chain(4)) == 3
    assert ideal_order(localize(chain(4), ["u4"])) == 0
    assert ideal_order(pendulum) == 2


def test_hilbert_kolchin_examples(pendulum):
    hk = hilbert_kolchin(chain(4))
    assert (hk.slope, hk.constant) == (1, 3)
    hk = hilbert_kolchin(pendulum)
    assert (hk.slope, hk.constant, hk.regularity_bound) == (0, 2, 1)
    assert hk.note == ""
    ode = golden("ode_quadratic")
    hk = hilbert_kolchin(ode)
    assert (hk.slope, hk.constant) == (ode.m, ode.n)
    assert hk.note == "function equals polynomial for all i"


@pytest.mark.parametrize("name", [n for n in GOLDEN if golden(n).e == 1])
def test_hilbert_function_matches_polynomial_e1(name):
    s = golden(name)
    seq = differentiation_index(s)
    hk = hilbert_kolchin(s, seq)
    for i in (0, 1, 2):
        direct = (s.m - s.r) * (i + 1) + s.e * (s.n + s.r) - seq.mu_sigma
        assert hk.value(i) == direct


def test_greenspan_examples(pendulum):
    assert greenspan_bound(pendulum) == 4
    assert greenspan_bound(chain(4)) == 3
    assert greenspan_bound(golden("ode_linear")) == 2


def test_ritt_examples(pendulum):
    # eps = (2, 2, 0): U3 occurs only undifferentiated
    assert ritt_bound(pendulum) == 4
    assert ritt_bound(chain(4)) == 3
    assert ritt_bound(golden("ode_linear")) == 2


def test_jacobi_examples(pendulum):
    assert jacobi_bound(golden("jacobi4")) == 0
    assert jacobi_bound(pendulum) == 2
    diag = system(["u1", "u2", "u3"], ["u1''", "u2", "u3^(3)"])
    assert jacobi_bound(diag) == 5
    with pytest.raises(SystemShapeError):
        jacobi_bound(chain(4))


def test_jacobi_vacuous():
    # U2 and U3 both only occur in g3, so every permutation hits an absent entry.
    # Such a system is structurally singular, hence never differentially independent;
    # only the bound itself is checked here.
    s = system(["u1", "u2", "u3"], ["u1", "u1'", "u2 + u3"])
    assert jacobi_bound(s) is None


def test_check_order_bounds_examples(pendulum):
    b = check_order_bounds(golden("jacobi4"))
    assert (b.ord, b.jacobi, b.greenspan, b.ritt) == (0, 0, 3, 3)
    assert "jacobi" in b.tight
    b = check_order_bounds(pendulum)
    assert (b.ord, b.jacobi, b.greenspan) == (2, 2, 4)
    assert b.tight == ["jacobi"]
    ode = golden("ode_linear")
    b = check_order_bounds(ode)
    assert b.ord == ode.n == b.greenspan


@pytest.mark.parametrize("name", GOLDEN)
def test_order_within_bounds(name):
    s = golden(name)
    b = check_order_bounds(s)
    assert 0 <= b.ord <= min(b.greenspan, b.ritt)
    if b.jacobi is not None:
        assert b.ord <= b.jacobi


def test_hungarian_against_brute_force():
    rng = random.Random(7)
    for _ in range(400):
        n = rng.randint(1, 7)
        W = [[rng.choice([None, None, 0, 1, 2, 3, 4, -2]) for _ in range(n)] for _ in range(n)]
        got = hungarian_max(W)
        assert (got[0] if got else None) == brute_force_assignment(W)
        if got:
            assert sorted(got[1]) == list(range(n))
            assert sum(W[i][got[1][i]] for i in range(n)) == got[0]


def test_hungarian_golden_matrices():
    for name in GOLDEN:
        s = golden(name)
        if s.m != s.r or any(e is None for e in s.eps):
            continue
        M = s.order_matrix()
        got = hungarian_max(M)
        assert (got[0] if got else None) == brute_force_assignment(M)


def test_hungarian_edge_cases():
    assert hungarian_max([]) == (0, [])
    assert hungarian_max([[None]]) is None
    with pytest.raises(ValueError):
        hungarian_max([[1, 2]])
