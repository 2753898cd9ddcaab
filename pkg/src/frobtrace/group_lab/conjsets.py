"""Unions of conjugacy classes cut out by a trace-sum condition.

For a residue t, C(t) is the set of tuples in G(ell) whose 2g eigenvalues
all lie in F_ell^x and whose traces sum to -t mod ell.  Borel and torus
versions intersect with B(ell) and T(ell).  Hat versions are images in a
quotient of B(ell) and are returned as canonical coset representatives:

* B/U   -> the diagonal part (the unique T(ell) element of the coset)
* B/U'  -> the lexicographically least tuple of the coset
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidVariantError, MalformedInputError
from .groups import DEFAULT_CAP, Kind, element_array, resolve_xi
from .matrices import GTuple, arr_mul, arr_split_units, arr_trace, array_to_tuples, check_modulus, encode

TAGS = (
    "C", "CBorel", "CTorus", "CHatBorel", "CHatPrimeBorel",
    "CRange", "CBorelRange", "CHatBorelRange", "CNs",
)


@dataclass(frozen=True)
class ConjSetKind:
    tag: str
    t: int = 0
    z: float | None = None
    xi: int | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise MalformedInputError(f"unknown conjugacy-set kind {self.tag!r}")
        if self.tag.endswith("Range"):
            if self.z is None or self.z <= 0:
                raise MalformedInputError(f"{self.tag} needs a positive z")

    def range_ts(self) -> range:
        k = math.floor(self.z)
        return range(-k, k + 1)


def _mask_trace(x: np.ndarray, ell: int, residues: set[int]) -> np.ndarray:
    split = arr_split_units(x, ell).all(axis=1)
    ts = arr_trace(x, ell).sum(axis=1) % ell
    want = np.zeros(ell, dtype=bool)
    want[[(-r) % ell for r in residues]] = True
    return split & want[ts]


def _nonsplit_mask(x: np.ndarray, ell: int, residues: set[int]) -> np.ndarray:
    ts = arr_trace(x, ell).sum(axis=1) % ell
    want = np.zeros(ell, dtype=bool)
    want[[(-r) % ell for r in residues]] = True
    return want[ts]


def diagonal_rep(x: np.ndarray) -> np.ndarray:
    """Canonical B/U representative: zero the upper-right entry."""
    out = np.array(x, copy=True)
    out[..., 1] = 0
    return out


def unique_rows(x: np.ndarray, ell: int) -> np.ndarray:
    if len(x) == 0:
        return x
    _, idx = np.unique(encode(x, ell), return_index=True)
    return x[np.sort(idx)]


def lex_least_in_cosets(x: np.ndarray, coset_group: np.ndarray, ell: int) -> np.ndarray:
    """For each row b of x, the lexicographically least element of b * N."""
    g = x.shape[1]
    out = np.empty_like(x)
    step = max(1, 2_000_000 // max(1, len(coset_group)))
    for s in range(0, len(x), step):
        chunk = x[s:s + step]
        prods = arr_mul(chunk[:, None], coset_group[None], ell)  # (k, |N|, g, 4)
        codes = encode(prods.reshape(-1, g, 4), ell).reshape(len(chunk), -1)
        best = codes.argmin(axis=1)
        out[s:s + step] = prods[np.arange(len(chunk)), best]
    return out


def conj_set_array(kind: ConjSetKind, ell: int, g: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Explicit element (or coset-representative) array for the set."""
    ell = check_modulus(ell)
    tag = kind.tag
    if tag == "CHatPrimeBorel" and kind.t % ell != 0:
        raise InvalidVariantError("the U'-quotient image is only defined for t = 0")
    if tag.endswith("Range"):
        residues = {t % ell for t in kind.range_ts()}
    else:
        residues = {kind.t % ell}

    if tag in ("C", "CRange"):
        x = element_array(Kind.G, ell, g, cap)
        return x[_mask_trace(x, ell, residues)]
    if tag in ("CBorel", "CBorelRange"):
        x = element_array(Kind.B, ell, g, cap)
        return x[_mask_trace(x, ell, residues)]
    if tag == "CTorus":
        x = element_array(Kind.T, ell, g, cap)
        return x[_mask_trace(x, ell, residues)]
    if tag in ("CHatBorel", "CHatBorelRange"):
        x = element_array(Kind.B, ell, g, cap)
        return unique_rows(diagonal_rep(x[_mask_trace(x, ell, residues)]), ell)
    if tag == "CHatPrimeBorel":
        x = element_array(Kind.B, ell, g, cap)
        reps = unique_rows(diagonal_rep(x[_mask_trace(x, ell, residues)]), ell)
        uprime = element_array(Kind.UPRIME, ell, g, cap)
        return unique_rows(lex_least_in_cosets(reps, uprime, ell), ell)
    if tag == "CNs":
        xi = resolve_xi(ell, kind.xi)
        x = element_array(Kind.NONSPLIT, ell, g, cap, xi=xi)
        return x[_nonsplit_mask(x, ell, residues)]
    raise MalformedInputError(f"unsupported conjugacy-set kind {tag}")  # pragma: no cover


def conj_set(kind: ConjSetKind, ell: int, g: int, cap: int = DEFAULT_CAP) -> frozenset[GTuple]:
    return frozenset(array_to_tuples(conj_set_array(kind, ell, g, cap), ell))
