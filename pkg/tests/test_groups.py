import itertools

import numpy as np
import pytest

from frobtrace.errors import MalformedInputError, SizeGuardError
from frobtrace.group_lab.groups import (
    Kind,
    element_array,
    enumerate_group,
    generators,
    group_order,
    member_mask,
    membership,
    resolve_xi,
)
from frobtrace.group_lab.matrices import GTuple, Gl2Mat, arr_mul, encode

ALL_KINDS = list(Kind)


def naive_gl2(ell):
    return [Gl2Mat(a, b, c, d, ell) for a, b, c, d in itertools.product(range(ell), repeat=4)
            if (a * d - b * c) % ell]


def naive_elements(kind, ell, g):
    """Filter every g-tuple of invertible matrices through the scalar membership test."""
    comps = naive_gl2(ell)
    gg = 1 if kind is Kind.GL2 else g
    return {GTuple(ms) for ms in itertools.product(comps, repeat=gg) if membership(GTuple(ms), kind)}


@pytest.mark.parametrize("kind", ALL_KINDS)
@pytest.mark.parametrize("ell,g", [(3, 1), (3, 2), (5, 1)])
def test_enumeration_matches_filter_oracle(kind, ell, g):
    want = naive_elements(kind, ell, g)
    got = set(enumerate_group(kind, ell, g))
    assert got == want
    assert len(want) == group_order(kind, ell, g)


def closure_size(gens, ell):
    """BFS over right multiplication by generators, on integer codes."""
    seen = {int(c) for c in encode(gens, ell)}
    frontier = gens
    while len(frontier):
        prods = arr_mul(frontier[:, None], gens[None], ell).reshape(-1, *gens.shape[1:])
        codes = encode(prods, ell)
        new = np.array([c not in seen for c in codes.tolist()], dtype=bool)
        _, first = np.unique(codes[new], return_index=True)
        frontier = prods[new][first]
        seen.update(codes[new].tolist())
    return len(seen)


@pytest.mark.parametrize("kind", [k for k in ALL_KINDS if k is not Kind.GL2])
@pytest.mark.parametrize("ell,g", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1)])
def test_generators_generate(kind, ell, g):
    gens = generators(kind, ell, g)
    assert member_mask(gens, kind, ell).all()
    assert closure_size(gens, ell) == group_order(kind, ell, g)


@pytest.mark.parametrize("kind", ALL_KINDS)
@pytest.mark.parametrize("ell,g", [(3, 2), (5, 2), (7, 1)])
def test_member_mask_agrees_with_membership(kind, ell, g):
    x = element_array(Kind.FULL, ell, g) if ell ** 8 < 10**6 else element_array(Kind.BOREL_PRODUCT, ell, g)
    if kind is Kind.GL2:
        x = element_array(Kind.GL2, ell, 1)
    rng = np.random.default_rng(0)
    sample = x[rng.choice(len(x), size=min(len(x), 400), replace=False)]
    mask = member_mask(sample, kind, ell)
    assert mask.tolist() == [membership(GTuple.from_array(r, ell), kind) for r in sample]


def test_order_formulas():
    assert group_order("G", 3, 2) == 1152
    assert group_order("U", 5, 3) == 125
    assert group_order("B", 3, 1) == 12
    for ell in (3, 5, 7, 11):
        for g in (1, 2, 3):
            assert group_order("FULL", ell, g) == group_order("GL2", ell, 1) ** g
            assert group_order("B", ell, g) == group_order("U", ell, g) * group_order("T", ell, g)
            assert group_order("UPRIME", ell, g) == (ell - 1) * group_order("U", ell, g)


def test_membership_examples():
    t = GTuple.of(Gl2Mat.diag(1, 2, 3), Gl2Mat.from_rows([[2, 1], [0, 1]], 3))
    assert membership(t, "B")
    assert membership(GTuple.of(Gl2Mat.from_rows([[1, 1], [0, 1]], 3)), "U")
    assert not membership(GTuple.of(Gl2Mat.diag(1, 1, 3), Gl2Mat.diag(1, 2, 3)), "G")
    two = GTuple.of(Gl2Mat.from_rows([[2, 1], [0, 2]], 5), Gl2Mat.from_rows([[2, 3], [0, 2]], 5))
    assert membership(two, "UPRIME") and not membership(two, "U")


def test_torus_g1_listing():
    got = {tuple(m.entries) for (m,) in enumerate_group("T", 3, 1, cap=10**6)}
    assert got == {(1, 0, 0, 1), (1, 0, 0, 2), (2, 0, 0, 1), (2, 0, 0, 2)}


def test_size_guard():
    with pytest.raises(SizeGuardError) as e:
        element_array("G", 7, 3, cap=10**6)
    assert e.value.order == 6 * 343 * 48**3


def test_nonsplit_xi():
    assert resolve_xi(7, None) == 3
    with pytest.raises(MalformedInputError):
        resolve_xi(7, 2)
    for xi in (3, 5, 6):
        x = element_array("NONSPLIT", 7, 2, xi=xi)
        assert len(x) == group_order("NONSPLIT", 7, 2)
        assert member_mask(x, "NONSPLIT", 7, xi=xi).all()


def test_kind_parse():
    assert Kind.parse("U'") is Kind.UPRIME
    assert Kind.parse("borel-product") is Kind.BOREL_PRODUCT
    with pytest.raises(MalformedInputError):
        Kind.parse("SL2")
