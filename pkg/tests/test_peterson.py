import pytest
from hypothesis import given
from hypothesis import strategies as st

from petersonmap.affweyl import affine_weyl_group
from petersonmap.exactalg import Poly
from petersonmap.peterson import (
    PetersonError,
    PetersonMap,
    dim_count_sweep,
    specialize_class,
    verify_homomorphism,
)
from petersonmap.rootdata import ParabolicType, parse_type


def pmap(label, P=()):
    return PetersonMap(parse_type(label), ParabolicType.of(P))


def test_borel_everything_is_in_wp_af():
    pm = pmap("A2")
    for x in pm.W.enumerate_all(4):
        assert pm.in_WP_af(x) and pm.condition_C(x)


def test_a1_images():
    pm = pmap("A1")
    W, rs = pm.W, pm.rs
    assert pm.phi_basis(W.identity) == {((0,), rs.identity): Poly.one(1)}
    # s0 = s_theta t_{-theta^vee}: phi gives q^{-1} sigma_s
    assert pm.phi_basis(W.s(0)) == {((-1,), rs.s(1)): Poly.one(1)}
    assert pm.phi_basis(W.parse("w=e;lam=-1")) == {((-1,), rs.identity): Poly.one(1)}


def test_a1_transport_of_quantum_relation():
    # xi_{s0}^2 = xi_{t_{-a}} + a xi_{s t_{-2a}}; phi carries this to sigma_s * sigma_s = a sigma_s + q
    pm = pmap("A1")
    W = pm.W
    s0 = W.s(0)
    left, right = pm.check_pair(s0, s0)
    assert left == right
    rs = pm.rs
    assert right == {((-2,), rs.s(1)): Poly.var(1, 1), ((-1,), rs.identity): Poly.one(1)}


def test_a2_parabolic_zero_images():
    pm = pmap("A2", (2,))
    W = pm.W
    zeros = [x for x in W.enumerate_waf_minus(4) if not pm.phi_basis(x)]
    assert zeros, "some affine classes must map to zero for a proper parabolic"
    for x in zeros:
        assert not pm.in_WP_af(x) and not pm.condition_C(x)


def test_phi_rejects_non_minimal():
    pm = pmap("A2")
    with pytest.raises(PetersonError):
        pm.phi_basis(pm.W.s(1))


@pytest.mark.parametrize("label,P", [("A2", (1,)), ("C2", (2,)), ("G2", ()), ("B2", (1,))])
def test_condition_equivalence(label, P):
    pm = pmap(label, P)
    for x in pm.W.enumerate_all(5):
        assert pm.condition_C(x) == pm.in_WP_af(x)


@pytest.mark.parametrize("label,P", [("A2", ()), ("A2", (2,)), ("C2", (1,)), ("G2", (1,))])
def test_dimension_count(label, P):
    pm = pmap(label, P)
    elems = pm.W.enumerate_waf_minus(5)
    assert list(dim_count_sweep(pm, elems)) == []
    for x in elems:
        for v in pm.qh.WP:
            assert pm.dim_count(x, v) >= 0


def test_dimension_count_requires_wp():
    pm = pmap("A2", (2,))
    with pytest.raises(PetersonError):
        pm.dim_count(pm.W.identity, pm.rs.s(2))


@pytest.mark.parametrize("label", ["A2", "C2"])
@given(data=st.data())
def test_section_degrees_sum(label, data):
    pm = pmap(label, (1,))
    x = data.draw(st.sampled_from(pm.W.enumerate_waf_minus(5)))
    v = data.draw(st.sampled_from(pm.qh.WP))
    mu = pm.W.center(x)
    sd = pm.section_data(mu, v)
    assert sum(sd.degrees) == pm.c1_term(x, v)
    assert len(sd.degrees) == len(pm.qh.roots_out)


def test_verify_small_report():
    rep = verify_homomorphism(parse_type("A1"), ParabolicType(), 3)
    assert rep.passed and rep.pairs_checked == 16
    d = rep.to_dict(with_timing=False)
    assert "timing" not in d and d["failures"] == []
    assert verify_homomorphism(parse_type("A1"), ParabolicType(), 0).pairs_checked == 1


def test_verify_with_table_and_threads():
    rs = parse_type("A2")
    P = ParabolicType.of((2,))
    W = affine_weyl_group(rs)
    pm = PetersonMap(rs, P)
    elems = W.enumerate_waf_minus(2)
    table = {(u, v): pm.gr.product(u, v) for u in elems for v in elems}
    a = verify_homomorphism(rs, P, 2, gr_table=table).to_dict(False)
    b = verify_homomorphism(rs, P, 2, threads=2).to_dict(False)
    assert a == b and a["passed"]


def test_verify_detects_a_broken_table():
    rs = parse_type("A1")
    W = affine_weyl_group(rs)
    pm = PetersonMap(rs)
    elems = W.enumerate_waf_minus(2)
    table = {(u, v): pm.gr.product(u, v) for u in elems for v in elems}
    s0 = W.s(0)
    table[(s0, s0)] = {W.parse("w=e;lam=-1"): Poly.one(1)}  # drop the equivariant term
    rep = verify_homomorphism(rs, ParabolicType(), 2, gr_table=table)
    assert not rep.passed and len(rep.failures) == 1
    # the dropped term is equivariant, so the non-equivariant comparison still agrees
    assert verify_homomorphism(rs, ParabolicType(), 2, gr_table=table, non_equivariant=True).passed


def test_specialize_class():
    a = Poly.var(2, 1)
    c = {("k",): a + 2, ("j",): a}
    assert specialize_class(c) == {("k",): Poly.const(2, 2)}
