import json

import numpy as np
import pytest

from frobtrace.errors import DomainError, MalformedInputError, SizeGuardError
from frobtrace.group_lab.groups import Kind, element_array, generators
from frobtrace.group_lab.verify import (
    LEMMAS,
    borel_sweep,
    closed_under_conjugation,
    closed_under_left_mult,
    conjugacy_orbits,
    is_normal,
    quotient_is_abelian,
    verify_lemma,
)


@pytest.mark.parametrize("lemma", LEMMAS)
@pytest.mark.parametrize("ell,g", [(3, 1), (5, 1), (3, 2)])
def test_all_lemmas_pass_small(lemma, ell, g):
    rep = verify_lemma(lemma, ell, g, z=2)
    assert rep.passed, rep.counterexample
    assert rep.checks and all(rep.checks.values())
    d = rep.to_dict()
    assert d["pass"] is True and "counterexample" not in d
    assert {"lemma", "ell", "g", "params", "pass", "cardinalities"} <= d.keys()
    json.dumps(d)


def test_l43_quotient_order_is_oracle_value():
    rep = verify_lemma("L4.3", 3, 2)
    assert rep.passed
    assert rep.cardinalities["B/U"] == rep.cardinalities["T"] == 8


def test_l54_torus_count():
    # a1 + a2 = -1 = 2 (mod 3) with a_i in {1, 2}: only diag(1, 1)
    rep = verify_lemma("L5.4", 3, 1, t=1)
    assert rep.passed and rep.cardinalities["C_Torus(t=1)"] == 1


def test_l51_zero_witness():
    rep = verify_lemma("L5.1", 5, 1, t=0)
    assert rep.passed and rep.checks["(i) t=0: witness in C_Torus"]


def test_ell_dividing_2g_rejected():
    with pytest.raises(DomainError):
        verify_lemma("L5.1", 3, 3)
    with pytest.raises(MalformedInputError):
        verify_lemma("L9.9", 3, 1)
    with pytest.raises(MalformedInputError):
        verify_lemma("L5.4", 9, 1)


def test_size_guard_propagates():
    with pytest.raises(SizeGuardError):
        verify_lemma("L5.1", 7, 2, cap=1000)


def test_xi_adds_nonsplit_check():
    rep = verify_lemma("L4.1", 5, 1, xi=2)
    assert rep.params["xi"] == 2 and rep.checks["nonsplit_cartan_order"]
    with pytest.raises(MalformedInputError):
        verify_lemma("L4.1", 5, 1, xi=4)


# the primitive checks must be able to fail


def test_torus_is_not_normal_in_borel():
    ok, witness, _ = is_normal(Kind.T, Kind.B, 5, 1, 10**6)
    assert not ok and witness is not None


def test_borel_is_not_abelian_mod_trivial():
    # commutators of B lie in U, not in T
    ok, witness, _ = quotient_is_abelian(Kind.B, Kind.T, 5, 1, 10**6)
    assert not ok


def test_closure_checks_detect_missing_element():
    b = element_array(Kind.B, 5, 1)
    ok, _ = closed_under_conjugation(b, generators(Kind.G, 5, 1), 5)
    assert not ok
    u = element_array(Kind.U, 5, 1)
    ok, _ = closed_under_left_mult(u[1:], u, 5)
    assert not ok
    ok, _ = closed_under_left_mult(b, u, 5)
    assert ok


def test_conjugacy_orbits_of_gl2_3():
    # GL2(3) has 8 conjugacy classes
    gl2 = element_array(Kind.G, 3, 1)
    n, labels = conjugacy_orbits(gl2, generators(Kind.G, 3, 1), 3)
    assert n == 8 and sorted(np.bincount(labels).tolist()) == [1, 1, 6, 6, 6, 8, 8, 12]


@pytest.mark.parametrize("ell,g", [(3, 1), (5, 2), (7, 1)])
def test_borel_sweep(ell, g):
    for t in range(ell):
        rep = borel_sweep(ell, g, t)
        assert rep.passed, rep.counterexample


def test_failure_report_shape():
    from frobtrace.group_lab.verify import LemmaReport

    rep = LemmaReport("L4.1", 3, 1, {})
    rep.record("a", True)
    rep.record("b", False, [[1, 2, 3, 4]])
    rep.record("c", False, "later")
    d = rep.to_dict()
    assert d["pass"] is False
    assert d["counterexample"] == {"check": "b", "witness": [[1, 2, 3, 4]]}
