"""Elliptic curves over Q reduced mod p: point counts, Frobenius traces, Weil polynomials."""

from __future__ import annotations

import hashlib
import logging
import math
import os
import random
import re
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import BadReductionError, DomainError, MalformedInputError, SingularCurveError
from .group_lab.matrices import poly_mul_mod
from .modarith import legendre, least_nonresidue, prime_factors, sqrt_mod

log = logging.getLogger(__name__)

EXHAUSTIVE_BELOW = 2**14
BSGS_POINTS = 8


@dataclass(frozen=True)
class Curve:
    """Integral long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0
    a6: int = 0
    label: str = ""

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise MalformedInputError(f"coefficient {name} must be an integer")
            object.__setattr__(self, name, int(v))
        if not self.label:
            object.__setattr__(self, "label", "[" + ",".join(map(str, self.ainvs)) + "]")
        if self.discriminant == 0:
            raise SingularCurveError(f"curve {self.label} is singular (discriminant 0)")

    @classmethod
    def short(cls, a4: int, a6: int, label: str = "") -> "Curve":
        return cls(0, 0, 0, a4, a6, label)

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def c_invariants(self) -> tuple[int, int]:
        b2, b4, b6, _ = self.b_invariants
        return b2 * b2 - 24 * b4, -(b2**3) + 36 * b2 * b4 - 216 * b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def discriminant_and_bad_primes(c: Curve) -> tuple[int, list[int]]:
    return c.discriminant, _bad_primes(c.ainvs)


@lru_cache(maxsize=256)
def _bad_primes(ainvs: tuple[int, ...]) -> list[int]:
    return prime_factors(Curve(*ainvs).discriminant)


def is_good(c: Curve, p: int) -> bool:
    return c.discriminant % p != 0


# ---------------------------------------------------------------------------
# exhaustive counting


@lru_cache(maxsize=64)
def _root_counts(p: int) -> np.ndarray:
    """root_counts[r] = #{y in F_p : y^2 = r}."""
    return np.bincount((np.arange(p, dtype=np.int64) ** 2) % p, minlength=p)


def count_points(c: Curve, p: int) -> int:
    """#E(F_p) by scanning every x (every (x, y) when p = 2)."""
    if not is_good(c, p):
        raise BadReductionError(f"p={p} divides the discriminant of {c.label}")
    a1, a2, a3, a4, a6 = (v % p for v in c.ainvs)
    if p == 2:
        return 1 + sum(
            1 for x in range(2) for y in range(2)
            if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % p == 0
        )
    # complete the square: (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2, b4, b6, _ = (v % p for v in c.b_invariants)
    x = np.arange(p, dtype=np.int64)
    rhs = (((4 * x + b2) % p * x % p + 2 * b4) % p * x + b6) % p
    return 1 + int(_root_counts(p)[rhs].sum())


# ---------------------------------------------------------------------------
# baby-step giant-step in the Hasse interval (short model, p >= 5)

_O = None  # point at infinity


def _add(P, Q, A: int, p: int):
    if P is _O:
        return Q
    if Q is _O:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return _O
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _neg(P, p: int):
    return _O if P is _O else (P[0], (-P[1]) % p)


def _mul(n: int, P, A: int, p: int):
    R = _O
    while n:
        if n & 1:
            R = _add(R, P, A, p)
        P = _add(P, P, A, p)
        n >>= 1
    return R


def _random_point(A: int, B: int, p: int, rng: random.Random):
    while True:
        x = rng.randrange(p)
        r = (x * x * x + A * x + B) % p
        y = sqrt_mod(r, p)
        if y is not None:
            return (x, y if rng.random() < 0.5 else (-y) % p)


def _annihilators(P, A: int, p: int) -> set[int]:
    """All n in the Hasse interval with nP = O."""
    w = math.isqrt(4 * p)
    lo, hi = p + 1 - w, p + 1 + w
    s = math.isqrt(hi - lo + 1) + 1
    baby: dict = {}
    R = _O
    for j in range(s):
        baby.setdefault(R, []).append(j)
        R = _add(R, P, A, p)
    step = R  # s * P
    G = _mul(lo, P, A, p)
    out = set()
    for i in range((hi - lo) // s + 1):
        for j in baby.get(_neg(G, p), ()):
            n = lo + i * s + j
            if n <= hi:
                out.add(n)
        G = _add(G, step, A, p)
    return out


def _short_model(c: Curve, p: int) -> tuple[int, int]:
    c4, c6 = c.c_invariants
    return (-27 * c4) % p, (-54 * c6) % p


def _candidates(A: int, B: int, p: int, rng: random.Random, points: int) -> set[int]:
    cands: set[int] | None = None
    for _ in range(points):
        found = _annihilators(_random_point(A, B, p, rng), A, p)
        cands = found if cands is None else cands & found
        if len(cands) <= 1:
            break
    return cands or set()


@dataclass(frozen=True)
class TraceResult:
    a_p: int
    method: str  # "exhaustive" | "bsgs" | "bsgs+twist" | "exhaustive-fallback"


def _bsgs_count(c: Curve, p: int, seed: int) -> tuple[int | None, str]:
    A, B = _short_model(c, p)
    rng = random.Random(f"{seed}:{p}:{c.label}")
    cands = _candidates(A, B, p, rng, BSGS_POINTS)
    if len(cands) == 1:
        return cands.pop(), "bsgs"
    d = least_nonresidue(p)
    twist = _candidates(A * d * d % p, B * d * d * d % p, p, rng, BSGS_POINTS)
    both = cands & {2 * p + 2 - n for n in twist}
    if len(both) == 1:
        return both.pop(), "bsgs+twist"
    return None, "ambiguous"


def trace_detail(c: Curve, p: int, method: str = "auto", seed: int = 0) -> TraceResult:
    if method not in ("auto", "exhaustive", "bsgs"):
        raise MalformedInputError(f"unknown trace method {method!r}")
    if not is_good(c, p):
        raise BadReductionError(f"p={p} divides the discriminant of {c.label}")
    if method == "auto":
        method = "exhaustive" if p < EXHAUSTIVE_BELOW else "bsgs"
    if method == "bsgs" and p < 5:
        method = "exhaustive"
    used = method
    if method == "bsgs":
        n, used = _bsgs_count(c, p, seed)
        if n is None:
            log.info("BSGS ambiguous for %s at p=%d; falling back to exhaustive count", c.label, p)
            n, used = count_points(c, p), "exhaustive-fallback"
    else:
        n = count_points(c, p)
    a = p + 1 - n
    assert a * a <= 4 * p, f"Hasse bound violated: a_{p}={a}"
    return TraceResult(a, used)


def trace(c: Curve, p: int, method: str = "auto", seed: int = 0) -> int:
    """a_p(E) = p + 1 - #E(F_p)."""
    return trace_detail(c, p, method, seed).a_p


# ---------------------------------------------------------------------------
# Weil polynomials (coefficients in descending degree)


def weil_poly(a_p: int, p: int) -> tuple[int, int, int]:
    return (1, -a_p, p)


def weil_poly_mod(a_p: int, p: int, m: int) -> tuple[int, int, int]:
    if m < 1 or math.gcd(p, m) != 1:
        raise DomainError(f"modulus m={m} must be a positive integer coprime to p={p}")
    return tuple(v % m for v in weil_poly(a_p, p))


def product_weil_poly(records: Sequence[tuple[int, int]], m: int = 0) -> tuple[int, ...]:
    """Product of the Weil polynomials of (a_p, p) pairs sharing one p (reduced mod m if m > 0)."""
    if not records:
        raise DomainError("need at least one (a_p, p) record")
    ps = {p for _, p in records}
    if len(ps) != 1:
        raise DomainError(f"records mix primes {sorted(ps)}")
    out: tuple[int, ...] = (1,)
    for a_p, p in records:
        factor = weil_poly_mod(a_p, p, m) if m else weil_poly(a_p, p)
        out = poly_mul_mod(out, factor, m)
    return out


def frobenius_disc(a_p: int, p: int) -> int:
    return a_p * a_p - 4 * p


@dataclass(frozen=True)
class TraceRecord:
    p: int
    traces: tuple[int, ...]
    a1p: int = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))
        if self.a1p is None:
            object.__setattr__(self, "a1p", -sum(self.traces))
        if self.a1p != -sum(self.traces):
            raise MalformedInputError("a1p must equal minus the sum of the traces")
        if any(a * a > 4 * self.p for a in self.traces):
            raise MalformedInputError(f"trace outside the Hasse interval at p={self.p}")


# ---------------------------------------------------------------------------
# catalog files: one `label: a1,a2,a3,a4,a6` per line

_LINE = re.compile(r"^\s*([^:#]+?)\s*:\s*([-+\d\s,]+)$")


def parse_catalog(text: str) -> list[Curve]:
    curves = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise MalformedInputError(f"catalog line {lineno}: expected 'label: a1,a2,a3,a4,a6'")
        parts = [s.strip() for s in m.group(2).split(",")]
        if len(parts) != 5:
            raise MalformedInputError(f"catalog line {lineno}: need exactly 5 coefficients")
        curves.append(Curve(*map(int, parts), label=m.group(1)))
    return curves


def load_catalog(path: str | os.PathLike) -> list[Curve]:
    return parse_catalog(Path(path).read_text())


def format_catalog(curves: Iterable[Curve]) -> str:
    return "".join(f"{c.label}: {','.join(map(str, c.ainvs))}\n" for c in curves)


# ---------------------------------------------------------------------------
# append-only binary trace cache

CACHE_MAGIC = b"FTC1"
_REC = struct.Struct("<QQq")


def label_hash(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode(), digest_size=8).digest(), "little")


class TraceCache:
    """Append-only cache of a_p keyed by (curve label, p).

    File layout: the 4-byte magic ``FTC1`` followed by 24-byte little-endian
    records (label hash u64, p u64, a_p i64).  Later records win.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._data: dict[tuple[int, int], int] = {}
        self._pending: list[tuple[int, int, int]] = []
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        raw = self.path.read_bytes()
        if raw[:4] != CACHE_MAGIC:
            raise MalformedInputError(f"{self.path} is not a trace cache (bad magic)")
        body = raw[4:]
        usable = len(body) - len(body) % _REC.size  # a torn final record is ignored
        for h, p, a in _REC.iter_unpack(body[:usable]):
            self._data[(h, p)] = a

    def get(self, label: str, p: int) -> int | None:
        return self._data.get((label_hash(label), p))

    def put(self, label: str, p: int, a_p: int) -> None:
        key = (label_hash(label), p)
        if self._data.get(key) != a_p:
            self._data[key] = a_p
            self._pending.append((key[0], p, a_p))

    def __len__(self) -> int:
        return len(self._data)

    def flush(self) -> None:
        if not self._pending:
            return
        new = not self.path.exists()
        with open(self.path, "ab") as fh:
            if new:
                fh.write(CACHE_MAGIC)
            fh.write(b"".join(_REC.pack(*r) for r in self._pending))
        self._pending.clear()
