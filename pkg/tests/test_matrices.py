import numpy as np
import pytest
from hypothesis import given, strategies as st

from frobtrace.errors import DomainError, MalformedInputError
from frobtrace.group_lab.matrices import (
    GTuple,
    Gl2Mat,
    arr_conj,
    arr_det,
    arr_inv,
    arr_mul,
    arr_trace,
    borel_conjugator,
    char_poly_gl2,
    char_poly_tuple,
    decode,
    encode,
    poly_mul_mod,
)

ELLS = [3, 5, 7, 11, 13]


def mats(ell=None, invertible=True):
    ells = st.just(ell) if ell else st.sampled_from(ELLS)

    def build(ell):
        m = st.tuples(*[st.integers(0, ell - 1)] * 4).map(lambda e: Gl2Mat(*e, ell))
        return m.filter(Gl2Mat.is_invertible) if invertible else m

    return ells.flatmap(build)


@st.composite
def tuples(draw, ell=None, g=None):
    ell = ell or draw(st.sampled_from(ELLS))
    g = g or draw(st.integers(1, 3))
    return GTuple(tuple(draw(mats(ell)) for _ in range(g)))


def test_entries_reduced():
    m = Gl2Mat(-1, 7, 3, 10, 5)
    assert m.entries == (4, 2, 3, 0)


def test_modulus_checks():
    with pytest.raises(MalformedInputError):
        Gl2Mat(1, 0, 0, 1, 9)
    with pytest.raises(MalformedInputError):
        GTuple((Gl2Mat.identity(3), Gl2Mat.identity(5)))
    with pytest.raises(MalformedInputError):
        GTuple(())


def test_char_poly_examples():
    p = char_poly_gl2(Gl2Mat.diag(1, 2, 3))
    assert p.coeffs == (1, 0, 2)
    assert p.status.kind == "split_distinct" and p.status.roots == (1, 2)
    p = char_poly_gl2(Gl2Mat.identity(3))
    assert p.coeffs == (1, 1, 1)  # X^2 - 2X + 1
    assert p.status.kind == "split_repeated" and p.status.roots == (1,)
    p = char_poly_gl2(Gl2Mat.from_rows([[0, 2], [1, 0]], 3))
    assert p.coeffs == (1, 0, 1)
    assert p.status.kind == "nonsplit" and p.status.roots == ()


def test_char_poly_tuple_examples():
    t = GTuple.of(Gl2Mat.diag(1, 2, 3), Gl2Mat.diag(2, 1, 3))
    assert char_poly_tuple(t).coeffs == (1, 0, 1, 0, 1)
    t = GTuple.of(Gl2Mat.identity(5), Gl2Mat.identity(5))
    assert char_poly_tuple(t).coeffs == (1, 1, 1, 1, 1)  # (X-1)^4 = X^4-4X^3+6X^2-4X+1
    m = Gl2Mat.from_rows([[1, 2], [3, 4]], 7)
    assert char_poly_tuple(GTuple.of(m)).coeffs == char_poly_gl2(m).coeffs


@given(mats(invertible=False))
def test_char_poly_status_matches_roots(m):
    ell = m.ell
    p = char_poly_gl2(m)
    roots = tuple(x for x in range(ell) if (x * x + p.coeffs[1] * x + p.coeffs[2]) % ell == 0)
    assert p.status.roots == roots
    if not roots:
        assert p.status.kind == "nonsplit"
    else:
        assert p.status.kind == ("split_repeated" if len(roots) == 1 else "split_distinct")


@given(tuples(), st.data())
def test_char_poly_conjugation_invariant(t, data):
    s = data.draw(tuples(ell=t.ell, g=t.g))
    assert char_poly_tuple(t.conjugate_by(s)).coeffs == char_poly_tuple(t).coeffs


@given(mats())
def test_inverse(m):
    assert m @ m.inverse() == Gl2Mat.identity(m.ell)


@given(mats())
def test_borel_conjugator(m):
    if char_poly_gl2(m).status.kind == "nonsplit":
        with pytest.raises(DomainError):
            borel_conjugator(m)
        return
    n = borel_conjugator(m)
    assert n.det() == 1
    assert (n @ m @ n.inverse()).is_upper_triangular()


def test_borel_conjugator_examples():
    up = Gl2Mat.from_rows([[2, 1], [0, 3]], 5)
    assert (borel_conjugator(up) @ up @ borel_conjugator(up).inverse()).is_upper_triangular()
    m = Gl2Mat.from_rows([[0, 4], [1, 0]], 5)
    n = borel_conjugator(m)
    c = n @ m @ n.inverse()
    assert n.det() == 1 and (c.a, c.c, c.d) == (2, 0, 3)
    with pytest.raises(DomainError):
        borel_conjugator(Gl2Mat.from_rows([[0, 2], [1, 0]], 3))
    assert borel_conjugator(Gl2Mat.diag(2, 2, 5)) == Gl2Mat.identity(5)


def test_poly_mul_mod():
    assert poly_mul_mod((1, 3, 5), (1, -3, 5), 0) == (1, 0, 1, 0, 25)
    assert poly_mul_mod((1, 3, 5), (1, -3, 5), 7) == (1, 0, 1, 0, 4)


@given(st.data())
def test_array_kernels_match_scalar(data):
    ell = data.draw(st.sampled_from(ELLS))
    g = data.draw(st.integers(1, 3))
    a = data.draw(tuples(ell, g))
    b = data.draw(tuples(ell, g))
    xa, xb = a.to_array()[None], b.to_array()[None]
    assert GTuple.from_array(arr_mul(xa, xb, ell)[0], ell) == a @ b
    assert GTuple.from_array(arr_inv(xa, ell)[0], ell) == a.inverse()
    assert GTuple.from_array(arr_conj(xb, xa, ell)[0], ell) == a.conjugate_by(b)
    assert arr_det(xa, ell)[0].tolist() == [m.det() for m in a]
    assert arr_trace(xa, ell)[0].tolist() == [m.trace() for m in a]


@given(st.data())
def test_encode_roundtrip_and_order(data):
    ell = data.draw(st.sampled_from(ELLS))
    g = data.draw(st.integers(1, 3))
    x = np.array(data.draw(st.lists(
        st.lists(st.integers(0, ell - 1), min_size=4 * g, max_size=4 * g), min_size=1, max_size=20)))
    x = x.reshape(-1, g, 4)
    codes = encode(x, ell)
    assert np.array_equal(decode(codes, ell, g), x)
    # codes order like the flattened tuples
    flat = [tuple(r) for r in x.reshape(len(x), -1).tolist()]
    assert sorted(range(len(x)), key=lambda i: (codes[i], i)) == sorted(range(len(x)), key=lambda i: (flat[i], i))
