"""Batch traces over all good primes up to x and the counting functions built on them.

The counting functions all work off a :class:`TraceTable`, the per-prime
traces of a g-tuple of curves.  Good primes are those not dividing the
discriminant of any input curve (a finite superset of the primes of bad
reduction).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .curves import Curve, TraceCache, TraceRecord, discriminant_and_bad_primes, trace
from .errors import DomainError, MalformedInputError
from .group_lab.matrices import square_table
from .modarith import is_prime
from .sieve import primes_between, primes_upto

BAD_PRIME_DISCLOSURE = (
    "primes dividing the discriminant of any input curve are excluded "
    "(a superset of the conductor's support); the isogeny-degree exclusion "
    "p | d_A has no computable surrogate and is not modelled"
)


@dataclass
class SurveyConfig:
    curves: list[Curve]
    x: int
    t: int = 0
    z: float | None = None
    ell: int | None = None
    epsilon: float = 0.1
    threads: int = 1
    seed: int = 0
    cache_path: str | None = None

    def __post_init__(self):
        if not self.curves:
            raise MalformedInputError("need g >= 1 curves")
        if self.x < 3:
            raise MalformedInputError("x must be >= 3")
        if not self.epsilon > 0:
            raise MalformedInputError("epsilon must be > 0")
        if self.ell is not None and (self.ell < 3 or not is_prime(self.ell)):
            raise MalformedInputError("ell must be an odd prime")
        if self.threads < 1:
            raise MalformedInputError("threads must be >= 1")

    @property
    def g(self) -> int:
        return len(self.curves)


@dataclass
class TraceTable:
    """Traces at every good prime p <= x.

    ``primes`` (n,), ``traces`` (n, g) and ``a1p`` (n,) are int64 arrays in
    ascending p; ``n_primes`` is pi(x) and ``bad`` the excluded primes <= x.
    """

    curves: list[Curve]
    x: int
    primes: np.ndarray
    traces: np.ndarray
    n_primes: int
    bad: list[int]

    @property
    def a1p(self) -> np.ndarray:
        return -self.traces.sum(axis=1)

    @property
    def g(self) -> int:
        return len(self.curves)

    def upto(self, x: int) -> "TraceTable":
        k = int(np.searchsorted(self.primes, x, side="right"))
        return TraceTable(self.curves, x, self.primes[:k], self.traces[:k],
                          len(primes_upto(x)), [p for p in self.bad if p <= x])

    def records(self) -> Iterator[TraceRecord]:
        for p, row in zip(self.primes.tolist(), self.traces.tolist()):
            yield TraceRecord(p, tuple(row))


def _bad_set(curves: Sequence[Curve], x: int) -> list[int]:
    return sorted({p for c in curves for p in discriminant_and_bad_primes(c)[1] if p <= x})


def _trace_block(args) -> list[int]:
    curve, primes, seed = args
    return [trace(curve, p, seed=seed) for p in primes]


def _blocks(items: list[int], n: int) -> list[list[int]]:
    """Split into n contiguous blocks of near-equal size (order preserved)."""
    n = max(1, min(n, len(items)))
    k, r = divmod(len(items), n)
    out, start = [], 0
    for i in range(n):
        end = start + k + (1 if i < r else 0)
        out.append(items[start:end])
        start = end
    return out


def compute_table(curves: Sequence[Curve], x: int, threads: int = 1, seed: int = 0,
                  cache: TraceCache | None = None) -> TraceTable:
    curves = list(curves)
    all_primes = primes_upto(x)
    bad = _bad_set(curves, x)
    good = all_primes[~np.isin(all_primes, bad)]
    traces = np.zeros((len(good), len(curves)), dtype=np.int64)
    plist = good.tolist()
    for j, c in enumerate(curves):
        missing_idx = list(range(len(plist)))
        if cache is not None:
            missing_idx = []
            for i, p in enumerate(plist):
                v = cache.get(c.label, p)
                if v is None:
                    missing_idx.append(i)
                else:
                    traces[i, j] = v
        missing = [plist[i] for i in missing_idx]
        blocks = _blocks(missing, threads)
        if threads > 1 and len(missing) > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(_trace_block, [(c, b, seed) for b in blocks]))
        else:
            parts = [_trace_block((c, b, seed)) for b in blocks]
        values = [v for part in parts for v in part]  # merged in block order
        for i, v in zip(missing_idx, values):
            traces[i, j] = v
            if cache is not None:
                cache.put(c.label, plist[i], v)
    if cache is not None:
        cache.flush()
    return TraceTable(curves, int(x), good, traces, len(all_primes), bad)


def table_for(cfg: SurveyConfig) -> TraceTable:
    cache = TraceCache(cfg.cache_path) if cfg.cache_path else None
    return compute_table(cfg.curves, cfg.x, cfg.threads, cfg.seed, cache)


def _table(src: "SurveyConfig | TraceTable") -> TraceTable:
    return src if isinstance(src, TraceTable) else table_for(src)


# ---------------------------------------------------------------------------
# counting functions


def batch_traces(cfg: "SurveyConfig | TraceTable") -> Iterator[TraceRecord]:
    return _table(cfg).records()


def histogram(src: "SurveyConfig | TraceTable") -> dict[int, int]:
    """t -> pi_A(x, t) for every t that occurs."""
    vals, counts = np.unique(_table(src).a1p, return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


def pi_t(src: "SurveyConfig | TraceTable", t: int | None = None) -> int:
    tab = _table(src)
    if t is None:
        t = src.t if isinstance(src, SurveyConfig) else 0
    return int((tab.a1p == t).sum())


def pi_range(src: "SurveyConfig | TraceTable", z: float) -> int:
    """Sum of pi_A(x, t) over integers |t| <= z."""
    return int((np.abs(_table(src).a1p) <= math.floor(z)).sum())


class Splitting(enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def splits_completely(a_p: int, p: int, ell: int) -> Splitting:
    """How ell decomposes in Q(sqrt(a_p^2 - 4p))."""
    if ell == 2 or ell == p or not is_prime(ell):
        raise DomainError(f"ell must be an odd prime different from p (ell={ell}, p={p})")
    d = (a_p * a_p - 4 * p) % ell
    if d == 0:
        return Splitting.RAMIFIED
    return Splitting.SPLIT if pow(d, (ell - 1) // 2, ell) == 1 else Splitting.INERT


def _splitting_mask(tab: TraceTable, ell: int, want: Splitting) -> np.ndarray:
    if ell == 2 or not is_prime(ell):
        raise DomainError(f"ell must be an odd prime (got {ell})")
    disc = (tab.traces**2 - 4 * tab.primes[:, None]) % ell
    sq = square_table(ell)[disc]
    nonzero = disc != 0
    per = nonzero & (sq if want is Splitting.SPLIT else ~sq)
    return per.all(axis=1) & (tab.primes != ell)


def pi_ell_t(src: "SurveyConfig | TraceTable", ell: int | None = None, t: int | None = None,
             z: float | None = None) -> int:
    """pi_A(x, ell, t): a1p = t (or |a1p| <= z) and ell split in every Q(pi_p(E_i))."""
    return _pi_ell(src, ell, t, z, Splitting.SPLIT)


def pi_ns_ell_t(src: "SurveyConfig | TraceTable", ell: int | None = None, t: int | None = None,
                z: float | None = None) -> int:
    """Inert-prime variant of pi_ell_t."""
    return _pi_ell(src, ell, t, z, Splitting.INERT)


def _pi_ell(src, ell, t, z, want) -> int:
    tab = _table(src)
    if isinstance(src, SurveyConfig):
        ell = src.ell if ell is None else ell
        t = src.t if t is None else t
    if ell is None:
        raise MalformedInputError("ell is required")
    t = 0 if t is None else t
    mask = _splitting_mask(tab, ell, want)
    hit = (np.abs(tab.a1p) <= math.floor(z)) if z is not None else (tab.a1p == t)
    return int((mask & hit).sum())


def eligible_ells(curves: Sequence[Curve], lo: float, hi: float) -> list[int]:
    """Odd primes in [lo, hi] not dividing any curve's discriminant."""
    return [ell for ell in primes_between(lo, hi) if ell > 2 and all(c.discriminant % ell for c in curves)]


@dataclass
class MaxSurvey:
    max: int
    argmax: int
    ratio: float
    pi_t: int
    per_ell: list[tuple[int, int]] = field(default_factory=list)


def max_survey(src: "SurveyConfig | TraceTable", y: float, u: float, t: int | None = None,
               z: float | None = None) -> MaxSurvey:
    """max over eligible primes ell in [y, y + u] of pi_A(x, ell, t)."""
    tab = _table(src)
    if t is None:
        t = src.t if isinstance(src, SurveyConfig) else 0
    ells = eligible_ells(tab.curves, y, y + u)
    if not ells:
        raise DomainError(f"no odd prime good for all curves in [{y}, {y + u}]")
    per = [(ell, pi_ell_t(tab, ell, t, z)) for ell in ells]
    best_ell, best = max(per, key=lambda e: (e[1], -e[0]))
    total = pi_range(tab, z) if z is not None else pi_t(tab, t)
    ratio = 0.0 if total == 0 else (math.inf if best == 0 else total / best)
    return MaxSurvey(best, best_ell, ratio, total, per)


def nonlacunarity(src: "SurveyConfig | TraceTable", t: int | None = None) -> float:
    """#{good p <= x : a1p != t} / pi(x)."""
    tab = _table(src)
    if t is None:
        t = src.t if isinstance(src, SurveyConfig) else 0
    if tab.n_primes == 0:
        return 0.0
    return int((tab.a1p != t).sum()) / tab.n_primes


def threshold_exponent(g: int, epsilon: float | Fraction) -> Fraction:
    """1/(3g+1) - epsilon as an exact rational (epsilon read from its decimal form)."""
    eps = epsilon if isinstance(epsilon, Fraction) else Fraction(str(epsilon))
    return Fraction(1, 3 * g + 1) - eps


def exceeds_power(a: int, p: int, alpha: Fraction) -> bool:
    """|a| > p^alpha, decided in exact integer arithmetic."""
    a = abs(a)
    if alpha <= 0:
        # p^alpha <= 1, with equality iff alpha = 0
        return a > 1 if alpha == 0 else a >= 1
    return a**alpha.denominator > p**alpha.numerator


def large_trace(src: "SurveyConfig | TraceTable", epsilon: float | Fraction | None = None) -> float:
    """#{good p <= x : |a1p| > p^(1/(3g+1) - eps)} / pi(x)."""
    tab = _table(src)
    if epsilon is None:
        epsilon = src.epsilon if isinstance(src, SurveyConfig) else 0.1
    if not epsilon > 0:
        raise MalformedInputError("epsilon must be > 0")
    if tab.n_primes == 0:
        return 0.0
    alpha = threshold_exponent(tab.g, epsilon)
    hits = sum(exceeds_power(a, p, alpha) for a, p in zip(tab.a1p.tolist(), tab.primes.tolist()))
    return hits / tab.n_primes


ISOGENY_SUSPECT = "ISOGENY-SUSPECT"
CM_SUSPECT = "CM-SUSPECT"
# CM curves have a_p = 0 on half the primes, non-CM curves on a vanishing share
CM_ZERO_FRACTION = 0.4


def sanity_checks(curves: Sequence[Curve], probe_bound: int = 1000) -> list[str]:
    """Heuristic warnings for isogenous pairs and CM curves."""
    if probe_bound < 100:
        raise MalformedInputError("probe_bound must be >= 100")
    tab = compute_table(curves, probe_bound)
    warnings = []
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            if np.array_equal(tab.traces[:, i], tab.traces[:, j]):
                warnings.append(f"{ISOGENY_SUSPECT}: {curves[i].label} and {curves[j].label} "
                                f"share a_p at every good p <= {probe_bound}")
    # a_p = 0 forces p | a_p only meaningfully for p >= 5
    big = tab.primes >= 5
    for j, c in enumerate(curves):
        n = int(big.sum())
        zeros = int(((tab.traces[:, j] == 0) & big).sum())
        if n and zeros > CM_ZERO_FRACTION * n:
            warnings.append(f"{CM_SUSPECT}: {c.label} has a_p = 0 at {zeros}/{n} good p <= {probe_bound}")
    return warnings


# ---------------------------------------------------------------------------
# reports


@dataclass
class SurveyReport:
    params: dict
    counts: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)
    histogram: dict = field(default_factory=dict)
    per_ell: list = field(default_factory=list)
    series: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    disclosure: str = BAD_PRIME_DISCLOSURE

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "disclosure": self.disclosure,
            "counts": self.counts,
            "ratios": self.ratios,
            "histogram": [{"t": t, "count": n} for t, n in sorted(self.histogram.items())],
            "per_ell": [{"ell": e, "pi_ell_t": v} for e, v in self.per_ell],
            "series": self.series,
            "warnings": self.warnings,
        }


def run_survey(cfg: SurveyConfig, ell_range: tuple[float, float] | None = None,
               x_grid: Sequence[int] | None = None, table: TraceTable | None = None) -> SurveyReport:
    tab = table if table is not None else table_for(cfg)
    rep = SurveyReport(params={
        "curves": [{"label": c.label, "ainvs": list(c.ainvs)} for c in cfg.curves],
        "g": cfg.g, "x": cfg.x, "t": cfg.t, "z": cfg.z, "ell": cfg.ell,
        "ell_range": list(ell_range) if ell_range else None, "epsilon": cfg.epsilon, "seed": cfg.seed,
    })
    rep.counts = {
        "pi_x": tab.n_primes,
        "good_primes": len(tab.primes),
        "bad_primes_le_x": len(tab.bad),
        "pi_t": pi_t(tab, cfg.t),
    }
    if cfg.z is not None:
        rep.counts["pi_range_z"] = pi_range(tab, cfg.z)
    if cfg.ell is not None:
        rep.counts["pi_ell_t"] = pi_ell_t(tab, cfg.ell, cfg.t, cfg.z)
        rep.counts["pi_ns_ell_t"] = pi_ns_ell_t(tab, cfg.ell, cfg.t, cfg.z)
    rep.ratios = {
        "nonlacunarity": nonlacunarity(tab, cfg.t),
        "large_trace": large_trace(tab, cfg.epsilon),
    }
    rep.histogram = histogram(tab)
    if ell_range is not None:
        y, u = ell_range
        ms = max_survey(tab, y, u, cfg.t, cfg.z)
        rep.per_ell = ms.per_ell
        rep.counts["max_pi_ell_t"] = ms.max
        rep.counts["argmax_ell"] = ms.argmax
        rep.ratios["pi_t_over_max"] = ms.ratio
    for x in (x_grid or [cfg.x]):
        sub = tab.upto(int(x))
        row = {"x": int(x), "pi_t": pi_t(sub, cfg.t)}
        if cfg.z is not None:
            row["pi_range_z"] = pi_range(sub, cfg.z)
        rep.series.append(row)
    return rep
