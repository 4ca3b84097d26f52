import pytest

from conftest import chain, golden, system
from daeindex.diffpoly import JetVar
from daeindex.relfind import (
    RelationError,
    RelationQuery,
    degree_bound,
    implicit_relation,
    residual,
    sample_variety_point,
)
from daeindex.sysmodel import localize, tilde_transform
from daeindex.sysparse import parse_expression


def J(name, d=0):
    return JetVar(name, d)


def test_degree_bound_examples(pendulum):
    assert degree_bound(tilde_transform(pendulum), "V1", 2) == 512
    assert degree_bound(chain(4), "V1", 3) == 1
    assert degree_bound(pendulum, "V0", 0) == 1
    with pytest.raises(ValueError):
        degree_bound(pendulum, "V2", 1)


def test_sample_point_explicit_ode():
    s = golden("ode_quadratic")
    pt = sample_variety_point(s, 2, seed=1)
    coords = pt.coordinates(2)
    assert not any(v.base.startswith("y") for v in coords)
    assert residual(s, pt, 2) == 0


def test_sample_point_chain_defining_equation():
    c = chain(4)
    pt = sample_variety_point(c, 1, seed=4)
    assert pt[J("y1")] == pt[J("u1")] + pt[J("u4", 1)]
    assert residual(c, pt, 3) == 0


@pytest.mark.parametrize("name", ["pendulum", "toy_time", "control_output", "jacobi4"])
def test_residual_vanishes_exactly(name):
    s = golden(name)
    for seed in range(3):
        assert residual(s, sample_variety_point(s, 2, seed), 2) == 0


def _localized():
    c = localize(chain(4), ["u4"])
    names = c.unknowns + c.parameter_names + tuple(y for y in c.y_names if y)
    return c, (lambda t: parse_expression(t, names))


def test_first_chain_relation():
    c, P = _localized()
    res = implicit_relation(c, RelationQuery(J("u1"), (J("u4", 1),), (J("y1"),), 1))
    assert res.found and res.degree == 1
    assert res.relation == P("u1 - y1 + u4'")
    assert res.verified_points == 20 and res.separable


def test_second_chain_relation():
    c, P = _localized()
    res = implicit_relation(c, RelationQuery(J("u2"), (J("u4", 2),), (J("y2"), J("y1", 1)), 1))
    assert res.relation == P("u2 - y2 + y1' - u4''")


def test_returned_relations_vanish_on_fresh_points():
    c, _ = _localized()
    res = implicit_relation(c, RelationQuery(J("u2"), (J("u4", 2),), (J("y2"), J("y1", 1)), 1), seed=5)
    for seed in range(100, 120):
        assert res.relation.evaluate(sample_variety_point(c, 2, f"fresh{seed}")) == 0


def test_no_relation_up_to_one():
    c, _ = _localized()
    res = implicit_relation(c, RelationQuery(J("u2"), (J("u4"),), (), 1))
    assert not res.found
    assert res.to_dict()["relation"] == "none up to 1"


def test_zero_dimensional_nonlinear_relation():
    # u1 and y1 are tied by y1 = u1^2 + u1'
    s = system(["u1"], ["u1^2 + u1'"])
    res = implicit_relation(s, RelationQuery(J("u1", 1), (J("u1"),), (J("y1"),), 2))
    assert res.found and res.degree == 2
    names = ("u1", "y1")
    assert res.relation == parse_expression("u1^2 + u1' - y1", names)


def test_query_validation():
    with pytest.raises(ValueError):
        RelationQuery(J("u1"), (J("u1"),))
    with pytest.raises(ValueError):
        RelationQuery(J("u1"), (J("u2"),), max_degree=0)


def test_resource_cap():
    c, _ = _localized()
    # the level-0 values are independent, so the search climbs until the cap
    q = RelationQuery(J("u2"), (J("u1"), J("u3"), J("u4")), (), 6)
    with pytest.raises(RelationError):
        implicit_relation(c, q, max_monomials=50)


def test_y_level_query(pendulum):
    q = RelationQuery.with_y_level(pendulum, J("u3"), (J("u1"),), 1)
    assert set(q.y_jets) == {J(y, l) for y in ("y1", "y2", "y3") for l in (0, 1)}
