"""The subgroups of GL2(F_ell)^g: membership, orders, enumeration, generators.

Kinds:

* ``GL2``            GL2(ell) itself (tuples of length 1, independent of g)
* ``FULL``           GL2(ell)^g
* ``BOREL_PRODUCT``  (upper-triangular invertible)^g
* ``G``              tuples in GL2(ell)^g with equal determinants
* ``B``              upper-triangular tuples with equal determinants
* ``U``              unipotent upper-triangular tuples
* ``UPRIME``         scalar multiples a*u, a in F_ell^x, u in U
* ``T``              diagonal tuples with equal determinants
* ``NONSPLIT``       non-split Cartan [[a, xi*b], [b, a]] tuples with equal determinants
"""

from __future__ import annotations

import enum
from functools import lru_cache
from typing import Iterator

import numpy as np

from ..errors import MalformedInputError, SizeGuardError
from ..modarith import legendre, least_nonresidue, primitive_root
from .matrices import GTuple, arr_det, check_modulus

DEFAULT_CAP = 20_000_000


class Kind(enum.Enum):
    GL2 = "GL2"
    FULL = "FULL"
    BOREL_PRODUCT = "BOREL_PRODUCT"
    G = "G"
    B = "B"
    U = "U"
    UPRIME = "UPRIME"
    T = "T"
    NONSPLIT = "NONSPLIT"

    @classmethod
    def parse(cls, s: "str | Kind") -> "Kind":
        if isinstance(s, Kind):
            return s
        try:
            return cls[s.upper().replace("'", "PRIME").replace("-", "_")]
        except KeyError:
            raise MalformedInputError(f"unknown subgroup kind {s!r}") from None


def resolve_xi(ell: int, xi: int | None) -> int:
    if xi is None:
        return least_nonresidue(ell)
    if legendre(xi, ell) != -1:
        raise MalformedInputError(f"xi={xi} is not a non-square mod {ell}")
    return xi % ell


def group_order(kind: Kind | str, ell: int, g: int) -> int:
    """Closed-form order of the subgroup."""
    kind = Kind.parse(kind)
    ell = check_modulus(ell)
    if g < 1:
        raise MalformedInputError("g must be >= 1")
    gl2 = (ell - 1) * ell * (ell * ell - 1)
    return {
        Kind.GL2: gl2,
        Kind.FULL: gl2**g,
        Kind.BOREL_PRODUCT: (ell - 1) ** (2 * g) * ell**g,
        Kind.G: (ell - 1) * ell**g * (ell * ell - 1) ** g,
        Kind.B: (ell - 1) ** (g + 1) * ell**g,
        Kind.U: ell**g,
        Kind.UPRIME: (ell - 1) * ell**g,
        Kind.T: (ell - 1) ** (g + 1),
        Kind.NONSPLIT: (ell * ell - 1) * (ell + 1) ** (g - 1),
    }[kind]


def membership(t: GTuple, kind: Kind | str, xi: int | None = None) -> bool:
    kind = Kind.parse(kind)
    ell = t.ell
    mats = t.mats
    dets = [m.det() for m in mats]
    invertible = all(d != 0 for d in dets)
    same_det = len(set(dets)) == 1
    upper = all(m.c == 0 for m in mats)
    if kind is Kind.GL2:
        return len(mats) == 1 and invertible
    if kind is Kind.FULL:
        return invertible
    if kind is Kind.BOREL_PRODUCT:
        return invertible and upper
    if kind is Kind.G:
        return invertible and same_det
    if kind is Kind.B:
        return invertible and upper and same_det
    if kind is Kind.U:
        return all(m.a == 1 and m.c == 0 and m.d == 1 for m in mats)
    if kind is Kind.UPRIME:
        s = mats[0].a
        return s != 0 and all(m.a == s and m.d == s and m.c == 0 for m in mats)
    if kind is Kind.T:
        return invertible and same_det and all(m.b == 0 and m.c == 0 for m in mats)
    if kind is Kind.NONSPLIT:
        xi = resolve_xi(ell, xi)
        shape = all(m.a == m.d and m.b == (xi * m.c) % ell for m in mats)
        return shape and invertible and same_det
    raise MalformedInputError(f"unsupported kind {kind}")


# ---------------------------------------------------------------------------
# single-matrix building blocks, each an (k, 4) array


@lru_cache(maxsize=None)
def _gl2_rows(ell: int) -> np.ndarray:
    r = np.arange(ell, dtype=np.int64)
    allm = np.stack(np.meshgrid(r, r, r, r, indexing="ij"), axis=-1).reshape(-1, 4)
    return allm[arr_det(allm, ell) != 0]


def _borel_rows(ell: int) -> np.ndarray:
    m = _gl2_rows(ell)
    return m[m[:, 2] == 0]


def _torus_rows(ell: int) -> np.ndarray:
    m = _gl2_rows(ell)
    return m[(m[:, 1] == 0) & (m[:, 2] == 0)]


def _nonsplit_rows(ell: int, xi: int) -> np.ndarray:
    r = np.arange(ell, dtype=np.int64)
    a, b = (v.ravel() for v in np.meshgrid(r, r, indexing="ij"))
    keep = (a != 0) | (b != 0)
    a, b = a[keep], b[keep]
    return np.stack([a, (xi * b) % ell, b, a], axis=-1)


def _product(blocks: list[np.ndarray]) -> np.ndarray:
    """Cartesian product of g blocks of shape (k_i, 4), first block most significant."""
    sizes = [len(b) for b in blocks]
    idx = np.indices(sizes).reshape(len(blocks), -1)
    return np.stack([blocks[i][idx[i]] for i in range(len(blocks))], axis=1)


def _common_det_product(rows: np.ndarray, ell: int, g: int) -> np.ndarray:
    """All g-tuples from rows sharing one determinant, grouped by that determinant."""
    dets = arr_det(rows, ell)
    parts = [_product([rows[dets == d]] * g) for d in range(1, ell)]
    parts = [p for p in parts if len(p)]
    if not parts:
        return np.empty((0, g, 4), dtype=np.int64)
    return np.concatenate(parts)


def _build(kind: Kind, ell: int, g: int, xi: int | None) -> np.ndarray:
    if kind is Kind.GL2:
        return _gl2_rows(ell)[:, None, :]
    if kind is Kind.FULL:
        return _product([_gl2_rows(ell)] * g)
    if kind is Kind.BOREL_PRODUCT:
        return _product([_borel_rows(ell)] * g)
    if kind is Kind.G:
        return _common_det_product(_gl2_rows(ell), ell, g)
    if kind is Kind.B:
        return _common_det_product(_borel_rows(ell), ell, g)
    if kind is Kind.T:
        return _common_det_product(_torus_rows(ell), ell, g)
    if kind is Kind.NONSPLIT:
        return _common_det_product(_nonsplit_rows(ell, resolve_xi(ell, xi)), ell, g)
    r = np.arange(ell, dtype=np.int64)
    unip = np.stack([np.ones(ell, np.int64), r, np.zeros(ell, np.int64), np.ones(ell, np.int64)], axis=-1)
    u = _product([unip] * g)
    if kind is Kind.U:
        return u
    if kind is Kind.UPRIME:
        scal = np.arange(1, ell, dtype=np.int64)[:, None, None, None]
        return ((scal * u[None]) % ell).reshape(-1, g, 4)
    raise MalformedInputError(f"unsupported kind {kind}")


@lru_cache(maxsize=32)
def _cached(kind: Kind, ell: int, g: int, xi: int | None) -> np.ndarray:
    arr = _build(kind, ell, g, xi)
    arr.setflags(write=False)
    return arr


def element_array(kind: Kind | str, ell: int, g: int, cap: int = DEFAULT_CAP,
                  xi: int | None = None) -> np.ndarray:
    """All elements of the subgroup as a read-only (n, g, 4) array."""
    kind = Kind.parse(kind)
    order = group_order(kind, ell, g)
    if order > cap:
        raise SizeGuardError(order, cap, f"{kind.value}({ell}) with g={g}")
    if kind is Kind.NONSPLIT:
        xi = resolve_xi(ell, xi)
    else:
        xi = None
    return _cached(kind, ell, g, xi)


def enumerate_group(kind: Kind | str, ell: int, g: int, cap: int = DEFAULT_CAP,
                    xi: int | None = None) -> Iterator[GTuple]:
    """Stream every element exactly once."""
    arr = element_array(kind, ell, g, cap, xi)
    for row in arr:
        yield GTuple.from_array(row, ell)


def member_mask(x: np.ndarray, kind: Kind | str, ell: int, xi: int | None = None) -> np.ndarray:
    """Vectorised membership test on an (n, g, 4) array."""
    kind = Kind.parse(kind)
    det = arr_det(x, ell)
    inv = (det != 0).all(axis=1)
    same = (det == det[:, :1]).all(axis=1)
    upper = (x[..., 2] == 0).all(axis=1)
    if kind is Kind.GL2:
        return inv & (x.shape[1] == 1)
    if kind is Kind.FULL:
        return inv
    if kind is Kind.BOREL_PRODUCT:
        return inv & upper
    if kind is Kind.G:
        return inv & same
    if kind is Kind.B:
        return inv & same & upper
    if kind is Kind.T:
        return inv & same & upper & (x[..., 1] == 0).all(axis=1)
    if kind is Kind.U:
        return ((x[..., 0] == 1) & (x[..., 2] == 0) & (x[..., 3] == 1)).all(axis=1)
    if kind is Kind.UPRIME:
        s = x[:, :1, 0]
        return (s[:, 0] != 0) & ((x[..., 0] == s) & (x[..., 3] == s) & (x[..., 2] == 0)).all(axis=1)
    if kind is Kind.NONSPLIT:
        xi = resolve_xi(ell, xi)
        shape = ((x[..., 0] == x[..., 3]) & (x[..., 1] == (xi * x[..., 2]) % ell)).all(axis=1)
        return shape & inv & same
    raise MalformedInputError(f"unsupported kind {kind}")


# ---------------------------------------------------------------------------
# generating sets (used for conjugation-closure and normality checks)


def _embed(ell: int, g: int, i: int, m: tuple[int, int, int, int]) -> np.ndarray:
    out = np.tile(np.array([1, 0, 0, 1], dtype=np.int64), (g, 1))
    out[i] = m
    return out


def generators(kind: Kind | str, ell: int, g: int, xi: int | None = None) -> np.ndarray:
    """A generating set of the subgroup as a (k, g, 4) array."""
    kind = Kind.parse(kind)
    ell = check_modulus(ell)
    gam = primitive_root(ell)
    gam_inv = pow(gam, -1, ell)
    upper = (1, 1, 0, 1)
    lower = (1, 0, 1, 1)
    split_diag = (gam, 0, 0, gam_inv)
    det_diag = np.tile(np.array([gam, 0, 0, 1], dtype=np.int64), (g, 1))
    gens: list[np.ndarray] = []
    if kind is Kind.GL2:
        return np.array([[upper], [lower], [(gam, 0, 0, 1)]], dtype=np.int64)
    if kind in (Kind.FULL, Kind.BOREL_PRODUCT):
        for i in range(g):
            gens.append(_embed(ell, g, i, upper))
            if kind is Kind.FULL:
                gens.append(_embed(ell, g, i, lower))
            gens.append(_embed(ell, g, i, (gam, 0, 0, 1)))
            if kind is Kind.BOREL_PRODUCT:
                gens.append(_embed(ell, g, i, (1, 0, 0, gam)))
    elif kind is Kind.G:
        for i in range(g):
            gens.append(_embed(ell, g, i, upper))
            gens.append(_embed(ell, g, i, lower))
        gens.append(det_diag)
    elif kind in (Kind.B, Kind.T):
        for i in range(g):
            if kind is Kind.B:
                gens.append(_embed(ell, g, i, upper))
            gens.append(_embed(ell, g, i, split_diag))
        gens.append(det_diag)
    elif kind is Kind.U:
        for i in range(g):
            gens.append(_embed(ell, g, i, upper))
    elif kind is Kind.UPRIME:
        for i in range(g):
            gens.append(_embed(ell, g, i, upper))
        gens.append(np.tile(np.array([gam, 0, 0, gam], dtype=np.int64), (g, 1)))
    elif kind is Kind.NONSPLIT:
        # F_{ell^2}^x is cyclic; its norm-one subgroup is generated by z^(ell-1).
        xi = resolve_xi(ell, xi)
        z = _nonsplit_generator(ell, xi)
        zn = _ns_pow(z, ell - 1, ell, xi)
        for i in range(g):
            gens.append(_embed(ell, g, i, (zn[0], xi * zn[1] % ell, zn[1], zn[0])))
        gens.append(np.tile(np.array([z[0], xi * z[1] % ell, z[1], z[0]], dtype=np.int64), (g, 1)))
    return np.array(gens, dtype=np.int64)


def _ns_mul(x, y, ell, xi):
    return ((x[0] * y[0] + xi * x[1] * y[1]) % ell, (x[0] * y[1] + x[1] * y[0]) % ell)


def _ns_pow(x, n, ell, xi):
    out = (1, 0)
    while n:
        if n & 1:
            out = _ns_mul(out, x, ell, xi)
        x = _ns_mul(x, x, ell, xi)
        n >>= 1
    return out


def _nonsplit_generator(ell: int, xi: int) -> tuple[int, int]:
    from ..modarith import prime_factors

    order = ell * ell - 1
    qs = prime_factors(order)
    for a in range(ell):
        for b in range(1, ell):
            if all(_ns_pow((a, b), order // q, ell, xi) != (1, 0) for q in qs):
                return (a, b)
    raise AssertionError("F_ell^2 has no generator")  # pragma: no cover
