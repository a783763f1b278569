import pytest
from hypothesis import given
from hypothesis import strategies as st

from petersonmap.rootdata import (
    ParabolicType,
    RootDataError,
    add,
    build_root_system,
    neg,
    parse_type,
)

ROOT_COUNTS = {
    ("A", 1): 2, ("A", 2): 6, ("A", 3): 12, ("A", 4): 20,
    ("B", 2): 8, ("B", 3): 18, ("B", 4): 32,
    ("C", 2): 8, ("C", 3): 18, ("C", 4): 32,
    ("D", 4): 24, ("D", 5): 40,
    ("E", 6): 72, ("E", 7): 126, ("E", 8): 240,
    ("F", 4): 48, ("G", 2): 12,
}


@pytest.mark.parametrize("key,count", sorted(ROOT_COUNTS.items()))
def test_root_counts(key, count):
    rs = build_root_system(*key)
    assert len(rs.roots) == count
    assert len(rs.positive_roots) == count // 2
    assert all(rs.is_root(neg(a)) for a in rs.roots)


@pytest.mark.parametrize("label,theta", [
    ("A2", (1, 1)), ("B2", (1, 2)), ("C2", (2, 1)), ("G2", (3, 2)),
    ("B3", (1, 2, 2)), ("C3", (2, 2, 1)), ("D4", (1, 2, 1, 1)),
    ("F4", (2, 3, 4, 2)), ("E8", (2, 3, 4, 6, 5, 4, 3, 2)),
])
def test_highest_root(label, theta):
    assert parse_type(label).highest_root == theta


@pytest.mark.parametrize("label,order", [("A1", 2), ("A2", 6), ("B2", 8), ("G2", 12), ("A3", 24), ("B3", 48), ("D4", 192)])
def test_weyl_order_and_longest(label, order):
    rs = parse_type(label)
    W = rs.weyl_group
    assert len(W) == order
    w0 = rs.longest_element
    assert w0.length == len(rs.positive_roots)
    assert all(not rs.is_positive(rs.act_root(w0, a)) for a in rs.positive_roots)


@pytest.mark.parametrize("bad", [("A", 0), ("B", 1), ("C", 1), ("D", 3), ("E", 9), ("F", 3), ("G", 3), ("X", 2)])
def test_invalid_types(bad):
    with pytest.raises(RootDataError):
        build_root_system(*bad)


def test_parse_type_defaults():
    assert parse_type("G").rank == 2
    assert parse_type("F").rank == 4
    with pytest.raises(RootDataError):
        parse_type("A")


def test_coroots_pair_to_two(small_rs):
    rs = small_rs
    for a in rs.roots:
        assert rs.pair(a, rs.coroot(a)) == 2
        assert rs.coroot(neg(a)) == neg(rs.coroot(a))


def test_g2_short_and_long():
    rs = build_root_system("G", 2)
    # alpha_1 short: its coroot is 3x the long one in the pairing with alpha_2
    assert rs.pair(rs.simple_root(2), rs.simple_coroot(1)) == -3
    assert rs.pair(rs.simple_root(1), rs.simple_coroot(2)) == -1


def test_simple_reflections_are_involutions(small_rs):
    rs = small_rs
    for s in rs.simple_reflections:
        assert rs.mul(s, s) == rs.identity
        assert s.length == 1


@pytest.mark.parametrize("label,P,expected", [
    ("A2", (2,), 3), ("A2", (1,), 3), ("A3", (2,), 12), ("A3", (1, 3), 6), ("C2", (1,), 4), ("G2", (2,), 6), ("B3", (1, 2), 8),
])
def test_parabolic_quotients(label, P, expected):
    rs = parse_type(label)
    W, WP, WPmin = rs.enumerate_weyl(ParabolicType.of(P))
    assert len(WPmin) == expected == len(W) // len(WP)
    for w in W:
        m = rs.min_coset_rep(w, ParabolicType.of(P))
        assert m in WPmin and m.length <= w.length


def weyl_and_root(rs):
    return st.tuples(st.sampled_from(rs.weyl_group), st.sampled_from(rs.roots))


@pytest.mark.parametrize("label", ["A2", "B2", "G2", "A3", "C3"])
@given(data=st.data())
def test_action_properties(label, data):
    rs = parse_type(label)
    w, v = data.draw(st.sampled_from(rs.weyl_group)), data.draw(st.sampled_from(rs.weyl_group))
    alpha = data.draw(st.sampled_from(rs.roots))
    mu = tuple(data.draw(st.lists(st.integers(-3, 3), min_size=rs.rank, max_size=rs.rank)))
    # group action on roots and coweights
    assert rs.act_root(rs.mul(w, v), alpha) == rs.act_root(w, rs.act_root(v, alpha))
    assert rs.act_coweight(rs.mul(w, v), mu) == rs.act_coweight(w, rs.act_coweight(v, mu))
    assert rs.is_root(rs.act_root(w, alpha))
    # pairing invariance and coroot equivariance
    assert rs.pair(rs.act_root(w, alpha), rs.act_coweight(w, mu)) == rs.pair(alpha, mu)
    assert rs.coroot(rs.act_root(w, alpha)) == rs.act_coweight(w, rs.coroot(alpha))
    assert rs.mul(w, rs.inverse(w)) == rs.identity
    assert w.length == sum(1 for a in rs.positive_roots if not rs.is_positive(rs.act_root(w, a)))
    assert rs.from_word(rs.reduced_word(w)) == w
    assert len(rs.reduced_word(w)) == w.length


@pytest.mark.parametrize("label", ["A2", "C2", "G2", "B3"])
@given(data=st.data())
def test_reflection_formula(label, data):
    rs = parse_type(label)
    a = data.draw(st.sampled_from(rs.roots))
    mu = tuple(data.draw(st.lists(st.integers(-3, 3), min_size=rs.rank, max_size=rs.rank)))
    s = rs.reflection(a)
    expected = add(mu, tuple(-rs.pair(a, mu) * c for c in rs.coroot(a)))
    assert rs.act_coweight(s, mu) == expected
    assert rs.mul(s, s) == rs.identity
    assert rs.act_root(s, a) == neg(a)
