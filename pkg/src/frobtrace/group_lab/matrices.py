"""2x2 matrices over F_ell and g-tuples of them.

Two representations live side by side. ``Gl2Mat``/``GTuple`` are small
immutable value types for single elements; bulk work (enumeration,
conjugation sweeps, coset keys) uses int64 arrays of shape ``(n, g, 4)``
holding the entries ``(a, b, c, d)`` of ``[[a, b], [c, d]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ..errors import DomainError, MalformedInputError
from ..modarith import is_prime, sqrt_mod


def check_modulus(ell: int) -> int:
    ell = int(ell)
    if ell < 3 or not is_prime(ell):
        raise MalformedInputError(f"ell must be an odd prime, got {ell}")
    return ell


_cached_modulus = lru_cache(maxsize=None)(check_modulus)


@dataclass(frozen=True, slots=True)
class Gl2Mat:
    a: int
    b: int
    c: int
    d: int
    ell: int

    def __post_init__(self):
        _cached_modulus(self.ell)
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % self.ell)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ell: int) -> "Gl2Mat":
        (a, b), (c, d) = rows
        return cls(a, b, c, d, ell)

    @classmethod
    def identity(cls, ell: int) -> "Gl2Mat":
        return cls(1, 0, 0, 1, ell)

    @classmethod
    def diag(cls, x: int, y: int, ell: int) -> "Gl2Mat":
        return cls(x, 0, 0, y, ell)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.ell

    def trace(self) -> int:
        return (self.a + self.d) % self.ell

    def is_invertible(self) -> bool:
        return self.det() != 0

    def __matmul__(self, other: "Gl2Mat") -> "Gl2Mat":
        if other.ell != self.ell:
            raise MalformedInputError("modulus mismatch")
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Gl2Mat(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.ell)

    def inverse(self) -> "Gl2Mat":
        det = self.det()
        if det == 0:
            raise DomainError("matrix is singular mod ell")
        k = pow(det, -1, self.ell)
        return Gl2Mat(self.d * k, -self.b * k, -self.c * k, self.a * k, self.ell)

    def is_upper_triangular(self) -> bool:
        return self.c == 0

    def __repr__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]] mod {self.ell}"


@dataclass(frozen=True, slots=True)
class GTuple:
    mats: tuple[Gl2Mat, ...]

    def __post_init__(self):
        mats = tuple(self.mats)
        if not mats:
            raise MalformedInputError("a g-tuple needs g >= 1 components")
        if len({m.ell for m in mats}) != 1:
            raise MalformedInputError("components of a g-tuple must share one modulus")
        object.__setattr__(self, "mats", mats)

    @classmethod
    def of(cls, *mats: Gl2Mat) -> "GTuple":
        return cls(tuple(mats))

    @property
    def ell(self) -> int:
        return self.mats[0].ell

    @property
    def g(self) -> int:
        return len(self.mats)

    def __len__(self) -> int:
        return len(self.mats)

    def __iter__(self):
        return iter(self.mats)

    def __getitem__(self, i: int) -> Gl2Mat:
        return self.mats[i]

    def __matmul__(self, other: "GTuple") -> "GTuple":
        if other.g != self.g:
            raise MalformedInputError("g mismatch")
        return GTuple(tuple(x @ y for x, y in zip(self.mats, other.mats)))

    def inverse(self) -> "GTuple":
        return GTuple(tuple(m.inverse() for m in self.mats))

    def conjugate_by(self, s: "GTuple") -> "GTuple":
        """Return s * self * s^-1."""
        return s @ self @ s.inverse()

    def trace_sum(self) -> int:
        return sum(m.trace() for m in self.mats) % self.ell

    def to_array(self) -> np.ndarray:
        return np.array([m.entries for m in self.mats], dtype=np.int64)

    @classmethod
    def from_array(cls, arr: np.ndarray, ell: int) -> "GTuple":
        return cls(tuple(Gl2Mat(int(a), int(b), int(c), int(d), ell) for a, b, c, d in arr))

    def __repr__(self) -> str:
        return "(" + ", ".join(repr(m).rsplit(" mod", 1)[0] for m in self.mats) + f") mod {self.ell}"


# ---------------------------------------------------------------------------
# characteristic polynomials


@dataclass(frozen=True)
class EigenStatus:
    """Eigenvalue shape of a 2x2 matrix over F_ell.

    kind is one of ``"split_distinct"``, ``"split_repeated"``, ``"nonsplit"``;
    roots lists the eigenvalues in F_ell in ascending order (empty if nonsplit).
    """

    kind: str
    roots: tuple[int, ...] = ()


SPLIT_DISTINCT = "split_distinct"
SPLIT_REPEATED = "split_repeated"
NONSPLIT = "nonsplit"


@dataclass(frozen=True)
class CharPoly:
    coeffs: tuple[int, ...]  # descending degree, monic, residues mod ell
    ell: int
    status: EigenStatus | None = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def char_poly_gl2(m: Gl2Mat) -> CharPoly:
    ell = m.ell
    tr, det = m.trace(), m.det()
    disc = (tr * tr - 4 * det) % ell
    inv2 = pow(2, -1, ell)
    if disc == 0:
        status = EigenStatus(SPLIT_REPEATED, (tr * inv2 % ell,))
    else:
        r = sqrt_mod(disc, ell)
        if r is None:
            status = EigenStatus(NONSPLIT)
        else:
            roots = sorted({(tr + r) * inv2 % ell, (tr - r) * inv2 % ell})
            status = EigenStatus(SPLIT_DISTINCT, tuple(roots))
    return CharPoly((1, (-tr) % ell, det), ell, status)


def poly_mul_mod(p: Sequence[int], q: Sequence[int], m: int) -> tuple[int, ...]:
    """Product of two descending-coefficient polynomials, reduced mod m (m=0: over Z)."""
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    if m:
        out = [v % m for v in out]
    return tuple(out)


def char_poly_tuple(t: GTuple) -> CharPoly:
    coeffs: tuple[int, ...] = (1,)
    for m in t.mats:
        coeffs = poly_mul_mod(coeffs, char_poly_gl2(m).coeffs, t.ell)
    return CharPoly(coeffs, t.ell)


# ---------------------------------------------------------------------------
# Lemma: split matrices are SL2-conjugate into the Borel


def borel_conjugator(m: Gl2Mat) -> Gl2Mat:
    """N with det N = 1 and N m N^-1 upper-triangular.

    Takes the smaller eigenvalue lam, an eigenvector v for it, completes v to
    a basis P = [v | w], sets N = P^-1 and finally rescales the first row of
    N by det(N)^-1.
    """
    ell = m.ell
    if not m.is_invertible():
        raise DomainError("borel_conjugator needs an invertible matrix")
    status = char_poly_gl2(m).status
    if status.kind == NONSPLIT:
        raise DomainError(f"characteristic polynomial of {m!r} does not split over F_{ell}")
    lam = status.roots[0]
    a, b, c, d = m.entries
    if (a - lam) % ell == 0 and b == 0 and c == 0 and (d - lam) % ell == 0:
        return Gl2Mat.identity(ell)
    if b != 0 or (a - lam) % ell != 0:
        v = (b, lam - a)
    else:
        v = (lam - d, c)
    v = (v[0] % ell, v[1] % ell)
    w = (0, 1) if v[0] != 0 else (1, 0)
    p = Gl2Mat(v[0], w[0], v[1], w[1], ell)
    n = p.inverse()
    k = pow(n.det(), -1, ell)
    return Gl2Mat(n.a * k, n.b * k, n.c, n.d, ell)


# ---------------------------------------------------------------------------
# vectorised kernels on (n, g, 4) arrays


@lru_cache(maxsize=None)
def inverse_table(ell: int) -> np.ndarray:
    tab = np.zeros(ell, dtype=np.int64)
    for x in range(1, ell):
        tab[x] = pow(x, -1, ell)
    return tab


@lru_cache(maxsize=None)
def square_table(ell: int) -> np.ndarray:
    """Boolean table: is_square[r] for r in F_ell (0 counts as a square)."""
    tab = np.zeros(ell, dtype=bool)
    tab[(np.arange(ell, dtype=np.int64) ** 2) % ell] = True
    return tab


def arr_det(x: np.ndarray, ell: int) -> np.ndarray:
    return (x[..., 0] * x[..., 3] - x[..., 1] * x[..., 2]) % ell


def arr_trace(x: np.ndarray, ell: int) -> np.ndarray:
    return (x[..., 0] + x[..., 3]) % ell


def arr_mul(x: np.ndarray, y: np.ndarray, ell: int) -> np.ndarray:
    a, b, c, d = (x[..., i] for i in range(4))
    e, f, g, h = (y[..., i] for i in range(4))
    return np.stack([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], axis=-1) % ell


def arr_inv(x: np.ndarray, ell: int) -> np.ndarray:
    k = inverse_table(ell)[arr_det(x, ell)]
    return np.stack([x[..., 3] * k, -x[..., 1] * k, -x[..., 2] * k, x[..., 0] * k], axis=-1) % ell


def arr_conj(s: np.ndarray, x: np.ndarray, ell: int) -> np.ndarray:
    """s x s^-1, broadcasting s against x."""
    return arr_mul(arr_mul(s, x, ell), arr_inv(s, ell), ell)


def arr_split_units(x: np.ndarray, ell: int) -> np.ndarray:
    """Per-component mask: both eigenvalues lie in F_ell^x."""
    tr, det = arr_trace(x, ell), arr_det(x, ell)
    disc = (tr * tr - 4 * det) % ell
    return square_table(ell)[disc] & (det != 0)


def encode(x: np.ndarray, ell: int) -> np.ndarray:
    """Lexicographic int64 code of each tuple in an (n, g, 4) array."""
    n, g, _ = x.shape
    if 4 * g * np.log2(ell) >= 62:
        raise MalformedInputError(f"tuples over F_{ell} with g={g} are too wide to encode")
    flat = x.reshape(n, 4 * g)
    code = np.zeros(n, dtype=np.int64)
    for j in range(4 * g):
        code = code * ell + flat[:, j]
    return code


def decode(codes: np.ndarray, ell: int, g: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64).copy()
    out = np.empty((codes.shape[0], 4 * g), dtype=np.int64)
    for j in range(4 * g - 1, -1, -1):
        out[:, j] = codes % ell
        codes //= ell
    return out.reshape(-1, g, 4)


def tuples_to_array(items: Iterable[GTuple]) -> np.ndarray:
    return np.array([t.to_array() for t in items], dtype=np.int64)


def array_to_tuples(x: np.ndarray, ell: int) -> list[GTuple]:
    return [GTuple.from_array(row, ell) for row in x]
