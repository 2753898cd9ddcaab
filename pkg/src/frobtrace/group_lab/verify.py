"""Brute-force verification of the subgroup and conjugacy-set lemmas.

Every verifier enumerates the sets involved and checks the quantified
statement directly.  Closure statements over a whole group ("S is a union
of G-classes", "N is normal in H") are checked either against every group
element or against a generating set; for a finite group the two are
equivalent, and the report records which mode ran.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import DomainError, MalformedInputError
from .conjsets import ConjSetKind, conj_set_array
from .groups import DEFAULT_CAP, Kind, element_array, generators, group_order, member_mask, resolve_xi
from .matrices import arr_conj, arr_inv, arr_mul, check_modulus, encode

LEMMAS = ("L4.1", "L4.3", "L5.1", "L5.3", "L5.4", "C2.2-hyp")

# exhaustive pairwise checks above this many pairs switch to generators
PAIR_BUDGET = 4_000_000


@dataclass
class LemmaReport:
    lemma: str
    ell: int
    g: int
    params: dict[str, Any]
    passed: bool = True
    cardinalities: dict[str, int] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    counterexample: Any = None
    notes: list[str] = field(default_factory=list)

    def record(self, name: str, ok: bool, witness: Any = None) -> bool:
        ok = bool(ok)
        self.checks[name] = ok
        if not ok:
            self.passed = False
            if self.counterexample is None:
                self.counterexample = {"check": name, "witness": witness}
        return ok

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        if d["counterexample"] is None:
            d.pop("counterexample")
        return d


# ---------------------------------------------------------------------------
# primitive checks; each returns (ok, witness)


def _subset(x: np.ndarray, of_codes: np.ndarray, ell: int):
    if len(x) == 0:
        return True, None
    inside = np.isin(encode(x, ell), of_codes)
    if inside.all():
        return True, None
    return False, x[np.argmin(inside)].tolist()


def closed_under_conjugation(s: np.ndarray, conjugators: np.ndarray, ell: int):
    codes = np.unique(encode(s, ell)) if len(s) else np.empty(0, np.int64)
    for h in conjugators:
        ok, w = _subset(arr_conj(h[None], s, ell), codes, ell)
        if not ok:
            return False, {"conjugator": h.tolist(), "image": w}
    return True, None


def closed_under_left_mult(s: np.ndarray, n: np.ndarray, ell: int):
    codes = np.unique(encode(s, ell)) if len(s) else np.empty(0, np.int64)
    step = max(1, PAIR_BUDGET // max(1, len(s)))
    for i in range(0, len(n), step):
        prods = arr_mul(n[i:i + step, None], s[None], ell).reshape(-1, s.shape[1], 4)
        ok, w = _subset(prods, codes, ell)
        if not ok:
            return False, {"product": w}
    return True, None


def _group_or_gens(kind: Kind, ell: int, g: int, cap: int, pairs_with: int):
    """Whole group if the pair budget allows, else a generating set."""
    order = group_order(kind, ell, g)
    if order * pairs_with <= PAIR_BUDGET and order <= cap:
        return element_array(kind, ell, g, cap), "exhaustive"
    return generators(kind, ell, g), "generators"


def is_normal(n_kind: Kind, h_kind: Kind, ell: int, g: int, cap: int):
    n = element_array(n_kind, ell, g, cap)
    h, mode = _group_or_gens(h_kind, ell, g, cap, len(n))
    ok, w = closed_under_conjugation(n, h, ell)
    return ok, w, mode


def quotient_is_abelian(h_kind: Kind, n_kind: Kind, ell: int, g: int, cap: int):
    """All commutators of H land in N (pairs of elements or of generators)."""
    n_codes = np.unique(encode(element_array(n_kind, ell, g, cap), ell))
    h, mode = _group_or_gens(h_kind, ell, g, cap, group_order(h_kind, ell, g))
    hinv = arr_inv(h, ell)
    step = max(1, PAIR_BUDGET // max(1, len(h)))
    for i in range(0, len(h), step):
        x, xi = h[i:i + step, None], hinv[i:i + step, None]
        comm = arr_mul(arr_mul(x, h[None], ell), arr_mul(xi, hinv[None], ell), ell)
        ok, w = _subset(comm.reshape(-1, g, 4), n_codes, ell)
        if not ok:
            return False, {"commutator": w}, mode
    return True, None, mode


def coset_keys(x: np.ndarray, n: np.ndarray, ell: int) -> np.ndarray:
    """Least code over each coset x*N; equal keys <=> same coset."""
    g = x.shape[1]
    keys = np.empty(len(x), dtype=np.int64)
    step = max(1, PAIR_BUDGET // max(1, len(n)))
    for i in range(0, len(x), step):
        prods = arr_mul(x[i:i + step, None], n[None], ell)
        keys[i:i + step] = encode(prods.reshape(-1, g, 4), ell).reshape(-1, len(n)).min(axis=1)
    return keys


def conjugacy_orbits(s: np.ndarray, gens: np.ndarray, ell: int) -> tuple[int, np.ndarray]:
    """Orbits of s under conjugation by the group generated by gens.

    s must be a union of orbits.  Returns (number of orbits, label per row).
    """
    codes = encode(s, ell)
    order = np.argsort(codes)
    sorted_codes = codes[order]
    rows, cols = [], []
    for h in gens:
        img = encode(arr_conj(h[None], s, ell), ell)
        pos = np.searchsorted(sorted_codes, img)
        if (pos >= len(s)).any() or (sorted_codes[np.minimum(pos, len(s) - 1)] != img).any():
            raise DomainError("set is not closed under conjugation")
        rows.append(np.arange(len(s)))
        cols.append(order[pos])
    r, c = np.concatenate(rows), np.concatenate(cols)
    adj = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(len(s), len(s)))
    return connected_components(adj, directed=True, connection="weak")


# ---------------------------------------------------------------------------
# lemma verifiers


def _check_ell(ell: int, g: int) -> int:
    ell = check_modulus(ell)
    if g < 1:
        raise MalformedInputError("g must be >= 1")
    if (2 * g) % ell == 0:
        raise DomainError(f"lemma verification requires ell not dividing 2g (ell={ell}, g={g})")
    return ell


def _residues(ell: int, t: int | None) -> list[int]:
    return list(range(ell)) if t is None else [t % ell]


def verify_L41(ell: int, g: int, cap: int = DEFAULT_CAP, **_) -> LemmaReport:
    rep = LemmaReport("L4.1", ell, g, {})
    for n_kind in (Kind.U, Kind.UPRIME):
        ok, w, mode = is_normal(n_kind, Kind.B, ell, g, cap)
        rep.record(f"{n_kind.value} normal in B", ok, w)
        rep.notes.append(f"normality of {n_kind.value}: {mode}")
        ok, w, mode = quotient_is_abelian(Kind.B, n_kind, ell, g, cap)
        rep.record(f"B/{n_kind.value} abelian", ok, w)
        rep.notes.append(f"commutators for B/{n_kind.value}: {mode}")
    rep.cardinalities = {k.value: len(element_array(k, ell, g, cap)) for k in (Kind.B, Kind.U, Kind.UPRIME)}
    return rep


def verify_L43(ell: int, g: int, cap: int = DEFAULT_CAP, **_) -> LemmaReport:
    rep = LemmaReport("L4.3", ell, g, {})
    b = element_array(Kind.B, ell, g, cap)
    u = element_array(Kind.U, ell, g, cap)
    t = element_array(Kind.T, ell, g, cap)
    b_keys = np.unique(coset_keys(b, u, ell))
    t_keys = coset_keys(t, u, ell)
    rep.cardinalities = {
        "B": len(b), "U": len(u), "T": len(t),
        "B/U": len(b_keys), "image of T": len(np.unique(t_keys)),
    }
    rep.record("T -> B/U injective", len(np.unique(t_keys)) == len(t))
    missing = np.setdiff1d(b_keys, t_keys)
    rep.record("T -> B/U surjective", len(missing) == 0, missing[:1].tolist())
    return rep


def _torus_witness(ell: int, g: int, t: int) -> np.ndarray:
    inv2g = pow(2 * g, -1, ell)
    if t % ell == 0:
        m = [inv2g, 0, 0, (-inv2g) % ell]
    else:
        lam = (-t * inv2g) % ell
        m = [lam, 0, 0, lam]
    return np.tile(np.array(m, dtype=np.int64), (1, g, 1))


def verify_L51(ell: int, g: int, t: int | None = None, z: float | None = None,
               cap: int = DEFAULT_CAP, **_) -> LemmaReport:
    rep = LemmaReport("L5.1", ell, g, {"t": t, "z": z})
    g_gens, b_gens, t_gens = (generators(k, ell, g) for k in (Kind.G, Kind.B, Kind.T))
    u = element_array(Kind.U, ell, g, cap)
    uprime = element_array(Kind.UPRIME, ell, g, cap)
    for r in _residues(ell, t):
        c = conj_set_array(ConjSetKind("C", r), ell, g, cap)
        cb = conj_set_array(ConjSetKind("CBorel", r), ell, g, cap)
        ct = conj_set_array(ConjSetKind("CTorus", r), ell, g, cap)
        c_codes, cb_codes = np.unique(encode(c, ell)), np.unique(encode(cb, ell))
        wit = _torus_witness(ell, g, r)
        rep.record(f"(i) t={r}: C_Torus nonempty", len(ct) > 0)
        rep.record(f"(i) t={r}: witness in C_Torus", _subset(wit, np.unique(encode(ct, ell)), ell)[0],
                   wit.tolist())
        rep.record(f"(i) t={r}: C_Torus in C_Borel", *_subset(ct, cb_codes, ell))
        rep.record(f"(i) t={r}: C_Borel in C", *_subset(cb, c_codes, ell))
        bmask = member_mask(c, Kind.B, ell)
        rep.record(f"(i) t={r}: C_Borel = C cap B", len(cb) == int(bmask.sum()))
        rep.record(f"(ii) t={r}: C union of G-classes", *closed_under_conjugation(c, g_gens, ell))
        rep.record(f"(iii) t={r}: C_Borel union of B-classes", *closed_under_conjugation(cb, b_gens, ell))
        rep.record(f"(iv) t={r}: C_Torus union of T-classes", *closed_under_conjugation(ct, t_gens, ell))
        rep.record(f"(v) t={r}: U C_Borel in C_Borel", *closed_under_left_mult(cb, u, ell))
        if r == 0:
            rep.record("(vi) t=0: U' C_Borel in C_Borel", *closed_under_left_mult(cb, uprime, ell))
        rep.cardinalities.update({f"C(t={r})": len(c), f"C_Borel(t={r})": len(cb),
                                  f"C_Torus(t={r})": len(ct)})
    if z is not None:
        cbr = conj_set_array(ConjSetKind("CBorelRange", z=z), ell, g, cap)
        rep.record(f"(i) z={z}: C_Borel(|t|<=z) nonempty", len(cbr) > 0)
        rep.record(f"(v) z={z}: U C_Borel(|t|<=z) closed", *closed_under_left_mult(cbr, u, ell))
        rep.cardinalities[f"C_Borel(|t|<={z})"] = len(cbr)
    rep.notes.append("G/B/T-class closure checked against generating sets")
    return rep


def verify_L53(ell: int, g: int, t: int | None = None, z: float | None = None,
               cap: int = DEFAULT_CAP, **_) -> LemmaReport:
    rep = LemmaReport("L5.3", ell, g, {"t": t, "z": z})
    gens = generators(Kind.G, ell, g)
    targets = [(f"t={r}", ConjSetKind("C", r)) for r in _residues(ell, t)]
    if z is not None:
        targets.append((f"|t|<={z}", ConjSetKind("CRange", z=z)))
    for name, kind in targets:
        c = conj_set_array(kind, ell, g, cap)
        n_orbits, labels = conjugacy_orbits(c, gens, ell)
        in_b = member_mask(c, Kind.B, ell)
        hit = np.zeros(n_orbits, dtype=bool)
        hit[labels[in_b]] = True
        bad = np.flatnonzero(~hit)
        witness = c[np.flatnonzero(labels == bad[0])[0]].tolist() if len(bad) else None
        rep.record(f"{name}: every class meets B", len(bad) == 0, witness)
        rep.cardinalities[f"classes in C({name})"] = int(n_orbits)
    return rep


def verify_L54(ell: int, g: int, t: int | None = None, z: float | None = None,
               cap: int = DEFAULT_CAP, **_) -> LemmaReport:
    rep = LemmaReport("L5.4", ell, g, {"t": t, "z": z})
    u = element_array(Kind.U, ell, g, cap)
    uprime = element_array(Kind.UPRIME, ell, g, cap)
    bound = 2 * (ell - 1) ** g
    for r in _residues(ell, t):
        cb = conj_set_array(ConjSetKind("CBorel", r), ell, g, cap)
        ct = conj_set_array(ConjSetKind("CTorus", r), ell, g, cap)
        hat = conj_set_array(ConjSetKind("CHatBorel", r), ell, g, cap)
        keys, counts = np.unique(coset_keys(cb, u, ell), return_counts=True)
        rep.record(f"(i) t={r}: |C_Torus| <= 2(l-1)^g", len(ct) <= bound, len(ct))
        rep.record(f"(ii) t={r}: |C_Borel| = l^g |C_Torus|", len(cb) == ell**g * len(ct), len(cb))
        rep.record(f"(iii) t={r}: |C^_Borel| = |C_Torus|", len(keys) == len(ct) == len(hat), len(keys))
        rep.record(f"(iii) t={r}: full preimages", bool((counts == len(u)).all()))
        rep.cardinalities.update({f"C_Torus(t={r})": len(ct), f"C_Borel(t={r})": len(cb),
                                  f"C^_Borel(t={r})": int(len(keys))})
        if r == 0:
            hat_p = conj_set_array(ConjSetKind("CHatPrimeBorel", 0), ell, g, cap)
            keys_p = np.unique(coset_keys(cb, uprime, ell))
            rep.record("(iv) |C^'_Borel(0)| = |C^_Borel(0)|/(l-1)",
                       len(keys_p) * (ell - 1) == len(keys) and len(hat_p) == len(keys_p), len(keys_p))
            rep.record("(iv) |C^'_Borel(0)| <= 2(l-1)^(g-1)", len(keys_p) <= 2 * (ell - 1) ** (g - 1))
            rep.cardinalities["C^'_Borel(t=0)"] = int(len(keys_p))
    if z is not None:
        cbr = conj_set_array(ConjSetKind("CBorelRange", z=z), ell, g, cap)
        hat_r = np.unique(coset_keys(cbr, u, ell)) if len(cbr) else np.empty(0)
        rhs = 5 * (ell - 1) ** g * z
        rep.record(f"(v) z={z}: |C^_Borel(|t|<=z)| < 5(l-1)^g z", len(hat_r) < rhs, len(hat_r))
        rep.cardinalities[f"C^_Borel(|t|<={z})"] = int(len(hat_r))
        listed = conj_set_array(ConjSetKind("CHatBorelRange", z=z), ell, g, cap)
        rep.record(f"(v) z={z}: representative count agrees", len(listed) == len(hat_r))
    return rep


def verify_C22(ell: int, g: int, t: int | None = None, cap: int = DEFAULT_CAP, **_) -> LemmaReport:
    """Group-theoretic hypotheses for (G, B, U, C(t)) and (G, B, U', C(0))."""
    rep = LemmaReport("C2.2-hyp", ell, g, {"t": t})
    g_gens = generators(Kind.G, ell, g)
    configs = [(Kind.U, r) for r in _residues(ell, t)] + [(Kind.UPRIME, 0)]
    seen_group_checks: dict[Kind, tuple] = {}
    for n_kind, r in configs:
        tag = f"(G,B,{n_kind.value},t={r})"
        if n_kind not in seen_group_checks:
            seen_group_checks[n_kind] = (
                is_normal(n_kind, Kind.B, ell, g, cap)[:2],
                quotient_is_abelian(Kind.B, n_kind, ell, g, cap)[:2],
            )
        (nok, nw), (aok, aw) = seen_group_checks[n_kind]
        rep.record(f"{tag}: N normal in H", nok, nw)
        rep.record(f"{tag}: H/N abelian", aok, aw)
        c = conj_set_array(ConjSetKind("C", r), ell, g, cap)
        rep.record(f"{tag}: C union of G-classes", *closed_under_conjugation(c, g_gens, ell))
        cb = c[member_mask(c, Kind.B, ell)]
        rep.record(f"{tag}: N (C cap H) in C cap H",
                   *closed_under_left_mult(cb, element_array(n_kind, ell, g, cap), ell))
        rep.cardinalities[f"C cap H {tag}"] = len(cb)
    return rep


_VERIFIERS = {
    "L4.1": verify_L41,
    "L4.3": verify_L43,
    "L5.1": verify_L51,
    "L5.3": verify_L53,
    "L5.4": verify_L54,
    "C2.2-hyp": verify_C22,
}


def verify_lemma(lemma_id: str, ell: int, g: int, t: int | None = None, z: float | None = None,
                 cap: int = DEFAULT_CAP, xi: int | None = None) -> LemmaReport:
    """Run one verifier.  A given ``xi`` also checks the order of the non-split Cartan it defines."""
    if lemma_id not in _VERIFIERS:
        raise MalformedInputError(f"unknown lemma id {lemma_id!r}; expected one of {', '.join(LEMMAS)}")
    if z is not None and not (z > 0 and math.isfinite(z)):
        raise MalformedInputError("z must be a positive real")
    ell = _check_ell(ell, g)
    rep = _VERIFIERS[lemma_id](ell, g, t=t, z=z, cap=cap)
    if xi is not None:
        xi = resolve_xi(ell, xi)
        rep.params["xi"] = xi
        ns = element_array(Kind.NONSPLIT, ell, g, cap, xi=xi)
        rep.cardinalities["nonsplit_cartan"] = len(ns)
        rep.record("nonsplit_cartan_order", len(ns) == group_order(Kind.NONSPLIT, ell, g))
    rep.notes.append("ell not dividing 2g enforced for every lemma")
    return rep


def borel_sweep(ell: int, g: int, t: int, cap: int = DEFAULT_CAP) -> LemmaReport:
    """Constructive companion to L5.3: conjugate each element of C(t) into B with borel_conjugator."""
    from .matrices import GTuple, borel_conjugator

    rep = LemmaReport("L5.3-constructive", ell, g, {"t": t})
    c = conj_set_array(ConjSetKind("C", t), ell, g, cap)
    for row in c:
        m = GTuple.from_array(row, ell)
        n = GTuple(tuple(borel_conjugator(mi) for mi in m))
        img = m.conjugate_by(n)
        if not all(x.det() == 1 for x in n) or not all(x.c == 0 for x in img):
            rep.record("borel conjugation", False, row.tolist())
            return rep
    rep.record("borel conjugation", True)
    rep.cardinalities["C"] = len(c)
    return rep

