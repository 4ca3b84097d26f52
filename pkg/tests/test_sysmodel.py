import itertools
import logging

import pytest

from conftest import GOLDEN, chain, golden, system
from daeindex.indexcore import differentiation_index
from daeindex.sysmodel import SystemShapeError, localize, reduce_to_first_order, tilde_transform
from daeindex.sysparse import parse_expression


def test_validate_examples(pendulum):
    assert pendulum.e == 2
    c = chain(4)
    assert (c.n, c.r, c.m, c.e) == (0, 3, 4, 1)
    s = system(["u1"], [], x=["x1", "x2"], f=["x2", "x1*u1"])
    assert (s.r, s.e) == (0, 1)


def test_absent_variable_warning(caplog):
    with caplog.at_level(logging.WARNING):
        s = system(["u1", "u2"], ["u1'"])
    assert any("u2" in w for w in s.warnings)
    assert "trivially free" in caplog.text


def test_order_matrix(pendulum):
    M = pendulum.order_matrix()
    assert M == [[2, None, 0], [None, 2, 0], [0, 0, None]]
    # column maxima are the e_j, row maxima the eps_i
    for j, ej in enumerate(pendulum.orders):
        assert max(row[j] for row in M if row[j] is not None) == ej
    for i, ep in enumerate(pendulum.eps):
        assert max(v for v in M[i] if v is not None) == ep


def test_tilde_pendulum(pendulum):
    t = tilde_transform(pendulum)
    names = t.u_names
    P = lambda s: parse_expression(s, names)  # noqa: E731
    assert t.g[2] == P("z1^2 + z2^2 - 1")
    assert t.g[0] == P("z1'' + z1*z3''")
    assert t.e == pendulum.e and t.r == pendulum.r and t.m == pendulum.m
    assert all(ep == t.e for ep in t.eps)


def test_tilde_identity_when_all_orders_maximal():
    s = system(["u1", "u2"], ["u1' + u2", "u2' * u1"])
    t = tilde_transform(s)
    assert [str(g) for g in t.g] == ["z1' + z2", "z1*z2'"]


def test_tilde_refuses_chain():
    with pytest.raises(SystemShapeError):
        tilde_transform(chain(4))
    with pytest.raises(SystemShapeError):
        tilde_transform(system(["u1"], ["u1"], x=["x1"], f=["u1"]))


def test_reduce_pendulum(pendulum):
    red = reduce_to_first_order(pendulum)
    # U1, U2 reach order 2: copies of order 0 become states, order 1 stays free
    assert red.x_names == ("u1_0", "u2_0")
    assert red.u_names == ("u1_1", "u2_1", "u3")
    assert [str(p) for p in red.f] == ["u1_1", "u2_1"]
    assert red.e == 1
    assert red.m - red.r == pendulum.m - pendulum.r


def test_reduce_first_order_unchanged():
    c = chain(4)
    red = reduce_to_first_order(c)
    assert red.unknowns == c.unknowns and red.g == c.g
    ode = golden("ode_linear")
    assert reduce_to_first_order(ode).f == ode.f


def test_reduce_link_count_oracle():
    s = system(["u1", "u2", "u3"], ["u1^(3) + u2", "u2'' + u3", "u3 + u1"])
    red = reduce_to_first_order(s)
    # recount: one state per order 0..eps-2 for each variable with eps >= 2
    expected = sum(max(0, (ep or 0) - 1) for ep in s.eps)
    assert red.n == expected == 3
    assert red.e == 1


@pytest.mark.parametrize("name", GOLDEN)
def test_reduce_preserves_slope(name):
    s = golden(name)
    red = reduce_to_first_order(s)
    assert red.m - red.r == s.m - s.r


def test_localize_examples():
    c = chain(4)
    l3 = localize(c, ["u3"])
    assert (l3.m, l3.r) == (3, 3) and l3.parameter_names == ("u3",)
    l4 = localize(c, ["u4"])
    assert (l4.m, l4.r) == (3, 3) and l4.parameter_names == ("u4",)
    assert localize(c, []) is c
    with pytest.raises(SystemShapeError):
        localize(c, ["u9"])


def test_localize_state_becomes_constraint():
    s = golden("control_output")
    l = localize(s, ["x2"])
    assert l.x_names == ("x1",) and l.parameter_names == ("x2",)
    assert l.y_names[-1] is None
    assert str(l.g[-1]) == "u1 - x2'"


@pytest.mark.parametrize("name", ["chain4", "jacobi4", "control_output"])
def test_localize_composition(name):
    s = golden(name)
    names = s.unknowns
    for a, b in itertools.combinations(names, 2):
        twice = localize(localize(s, [a]), [b])
        once = localize(s, [a, b])
        assert set(twice.parameter_names) == set(once.parameter_names)
        assert twice.unknowns == once.unknowns
        assert set(twice.g) == set(once.g)


def test_localized_index_is_well_defined():
    for W in (["u3"], ["u4"]):
        seq = differentiation_index(localize(chain(4), W))
        assert seq.stabilized
