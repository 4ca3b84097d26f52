import pytest

from conftest import chain, golden, system
from daeindex.diffpoly import JetVar
from daeindex.indexcore import EXACT, RankOptions
from daeindex.invariants import ideal_order
from daeindex.sysmodel import SystemShapeError, localize, reduce_to_first_order
from daeindex.transbasis import (
    differential_transcendence_basis,
    is_algebraically_independent,
    verify_order_preservation,
)


def J(name, d=0):
    return JetVar(name, d)


def test_independence_examples():
    c = chain(4)
    assert is_algebraically_independent(c, [J(f"u{i}") for i in range(1, 5)], 0)
    assert not is_algebraically_independent(c, [J("u1"), J("u4", 1)], 1)
    assert is_algebraically_independent(c, [], 0)
    assert is_algebraically_independent(c, [J("u3", 1), J("u1")], 1, RankOptions(EXACT))


def test_independence_errors(pendulum):
    with pytest.raises(SystemShapeError):
        is_algebraically_independent(pendulum, [J("u1")], 0)
    with pytest.raises(ValueError):
        is_algebraically_independent(chain(4), [J("u1", 1)], 0)


@pytest.mark.parametrize("opts", [RankOptions(), RankOptions(EXACT)])
def test_chain_basis(opts):
    rep = differential_transcendence_basis(chain(4), opts)
    assert rep.W == ["u3"]
    assert rep.xi == ["u1", "u2", "u4"]
    assert rep.eta == []


def test_explicit_ode_basis():
    s = golden("ode_quadratic")
    rep = differential_transcendence_basis(s)
    assert rep.W == list(s.u_names) and rep.xi == list(s.x_names) and rep.eta == []


def test_zero_dimensional_basis():
    s = golden("jacobi4")
    rep = differential_transcendence_basis(s)
    assert rep.W == [] and len(rep.xi) == ideal_order(s)


@pytest.mark.parametrize("name", ["chain3", "chain4", "chain5", "ode_linear", "ode_quadratic",
                                  "toy_time", "control_output", "jacobi5"])
def test_basis_invariants(name):
    s = golden(name)
    rep = differential_transcendence_basis(s)
    assert sorted(rep.W + rep.xi + rep.eta) == sorted(s.unknowns)
    assert len(rep.W) == s.m - s.r
    assert len(rep.xi) == rep.ord == ideal_order(s)
    assert len(rep.B0) == (s.m - s.r) + rep.ord
    assert verify_order_preservation(s, rep.W)
    # monotone: every subset of an accepted set is independent
    B = [J(v) for v in rep.B0]
    for k in range(len(B)):
        assert is_algebraically_independent(s, B[:k] + B[k + 1:], 0)


def test_reduced_pendulum_basis(pendulum):
    red = reduce_to_first_order(pendulum)
    rep = differential_transcendence_basis(red)
    assert rep.W == [] and len(rep.xi) == ideal_order(pendulum)


def test_determinism():
    a = differential_transcendence_basis(chain(5), RankOptions(seed=3))
    b = differential_transcendence_basis(chain(5), RankOptions(seed=3))
    assert a.to_dict() == b.to_dict()


def test_order_preservation_examples():
    c = chain(4)
    assert verify_order_preservation(c, ["u3"])
    assert not verify_order_preservation(c, ["u4"])
    assert verify_order_preservation(golden("jacobi4"), [])


def test_localized_framework_stabilizes():
    c = chain(4)
    rep = differential_transcendence_basis(c)
    assert ideal_order(localize(c, rep.W)) == 3
