import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frobtrace import survey as sv
from frobtrace.curves import Curve
from frobtrace.errors import DomainError, MalformedInputError
from frobtrace.sieve import prime_pi
from frobtrace.survey import Splitting, SurveyConfig


@pytest.fixture(scope="module")
def e1_table():
    return sv.compute_table([Curve.short(1, 1)], 10**4)


def test_batch_traces_examples(e1):
    recs = list(sv.batch_traces(SurveyConfig([e1], 7)))
    assert [(r.p, r.traces, r.a1p) for r in recs] == [(3, (0,), 0), (5, (-3,), 3), (7, (3,), -3)]
    recs = list(sv.batch_traces(SurveyConfig([e1, e1], 7)))
    assert [r.a1p for r in recs] == [0, 6, -6]
    tab = sv.compute_table([e1], 2)
    assert list(tab.records()) == [] and tab.n_primes == 1


def test_counting_examples(e1):
    tab = sv.compute_table([e1], 10)
    assert sv.pi_t(tab, 0) == 1
    assert sv.pi_t(tab, 3) == 1
    assert sv.pi_ell_t(tab, 3, 3) == 1
    assert sv.pi_ell_t(tab, 5, 3) == 0
    assert sv.pi_t(SurveyConfig([e1], 10, t=3)) == 1
    assert sv.pi_ell_t(SurveyConfig([e1], 10, t=3, ell=3)) == 1


def test_splitting_examples():
    assert sv.splits_completely(-3, 5, 3) is Splitting.SPLIT
    assert sv.splits_completely(-3, 5, 11) is Splitting.RAMIFIED
    assert sv.splits_completely(0, 7, 5) is Splitting.INERT
    for ell in (2, 7, 9):
        with pytest.raises(DomainError):
            sv.splits_completely(0, 7, ell)


@given(st.integers(-40, 40), st.sampled_from([101, 103, 107]), st.sampled_from([3, 5, 7, 11, 13]))
def test_splitting_against_root_count(a, p, ell):
    if a * a > 4 * p:
        return
    d = (a * a - 4 * p) % ell
    roots = sum(1 for x in range(ell) if (x * x - d) % ell == 0)
    want = {0: Splitting.INERT, 1: Splitting.RAMIFIED, 2: Splitting.SPLIT}[roots]
    assert sv.splits_completely(a, p, ell) is want


def test_max_survey_fixture(e1_table):
    tab = e1_table.upto(1000)
    ms = sv.max_survey(tab, 5, 25, 0)
    assert ms.per_ell == [(5, 1), (7, 4), (11, 3), (13, 4), (17, 2), (19, 4), (23, 3), (29, 3)]
    assert (ms.max, ms.argmax, ms.pi_t) == (4, 7, 5)
    assert ms.max >= sv.pi_ell_t(tab, 7, 0)
    assert ms.ratio == 5 / 4


def test_max_survey_edges(e1_table):
    tab = e1_table.upto(1000)
    one = sv.max_survey(tab, 7, 0.5, 0)
    assert one.per_ell == [(7, sv.pi_ell_t(tab, 7, 0))] and one.max == one.per_ell[0][1]
    zero = sv.max_survey(tab, 5, 25, 10**6)
    assert zero.pi_t == 0 and zero.ratio == 0
    with pytest.raises(DomainError):
        sv.max_survey(tab, 24, 4, 0)  # [24, 28] has no prime
    with pytest.raises(DomainError):
        sv.max_survey(tab, 31, 0, 0)  # 31 divides the discriminant


def test_nonlacunarity_fixture(e1_table):
    tab = e1_table
    assert (tab.n_primes, len(tab.primes), tab.bad) == (1229, 1227, [2, 31])
    assert sv.pi_t(tab, 0) == 10
    assert sv.nonlacunarity(tab, 0) == 1217 / 1229
    assert sv.nonlacunarity(tab, 0) >= 0.95
    assert sv.nonlacunarity(sv.compute_table([Curve.short(1, 1)], 2), 0) == 0


def test_large_trace_fixture(e1_table):
    assert sv.large_trace(e1_table, 0.05) == 1144 / 1229
    assert sv.large_trace(e1_table, 0.05) >= 0.9


def test_large_trace_exponent_collapse(e1_table):
    # eps = 1/(3g+1) makes the threshold exactly 1
    want = int((np.abs(e1_table.a1p) > 1).sum()) / e1_table.n_primes
    assert sv.large_trace(e1_table, Fraction(1, 4)) == want
    # beyond it every nonzero trace counts
    want = int((e1_table.a1p != 0).sum()) / e1_table.n_primes
    assert sv.large_trace(e1_table, 0.5) == want
    tiny = sv.compute_table([Curve.short(1, 1)], 3)
    assert sv.large_trace(tiny, 0.05) in (0, 1 / tiny.n_primes)


@given(st.integers(0, 10**6), st.integers(2, 10**6), st.fractions(Fraction(-1, 2), Fraction(1, 2), max_denominator=40))
def test_exceeds_power_exact(a, p, alpha):
    got = sv.exceeds_power(a, p, alpha)
    if alpha <= 0:
        assert got == (a > 1 if alpha == 0 else a >= 1)
    else:
        assert got == (Fraction(a) ** alpha.denominator > Fraction(p) ** alpha.numerator)


def test_exceeds_power_boundary():
    # 2^4 = 16 = 256^(1/2): equality is not exceedance
    assert not sv.exceeds_power(16, 256, Fraction(1, 2))
    assert sv.exceeds_power(17, 256, Fraction(1, 2))
    assert sv.threshold_exponent(2, 0.05) == Fraction(1, 7) - Fraction(1, 20)


def test_sanity_checks(e1, e2):
    warn = sv.sanity_checks([e1, e1], 1000)
    assert any(w.startswith("ISOGENY-SUSPECT") for w in warn)
    warn = sv.sanity_checks([Curve.short(-1, 0)], 1000)
    assert len(warn) == 1 and warn[0].startswith("CM-SUSPECT")
    assert sv.sanity_checks([e1, e2], 1000) == []
    with pytest.raises(MalformedInputError):
        sv.sanity_checks([e1], 50)


def test_config_validation(e1):
    for kw in ({"x": 2}, {"epsilon": 0}, {"ell": 9}, {"ell": 2}, {"threads": 0}):
        with pytest.raises(MalformedInputError):
            SurveyConfig([e1], **{"x": 100, **kw})
    with pytest.raises(MalformedInputError):
        SurveyConfig([], 100)


# ---------------------------------------------------------------------------
# invariants over random small surveys

small_curves = st.tuples(st.integers(-5, 5), st.integers(-5, 5)).filter(
    lambda a: 4 * a[0] ** 3 + 27 * a[1] ** 2 != 0).map(lambda a: Curve.short(*a))


@settings(max_examples=25, deadline=None)
@given(st.lists(small_curves, min_size=1, max_size=3), st.integers(3, 3000))
def test_survey_invariants(cs, x):
    tab = sv.compute_table(cs, x)
    g = len(cs)
    hasse = 2 * g * math.sqrt(x)
    # partition
    total = sum(sv.pi_t(tab, t) for t in range(-math.floor(hasse), math.floor(hasse) + 1))
    assert total == len(tab.primes) == tab.n_primes - len(tab.bad)
    assert sum(sv.histogram(tab).values()) == len(tab.primes)
    # Hasse truncation
    assert sv.pi_t(tab, math.floor(hasse) + 1) == 0
    assert sv.pi_t(tab, -math.floor(hasse) - 1) == 0
    # nesting and monotonicity
    for ell in sv.eligible_ells(cs, 3, 30):
        for t in (0, 1, -2):
            both = sv.pi_ell_t(tab, ell, t) + sv.pi_ns_ell_t(tab, ell, t)
            assert both <= sv.pi_t(tab, t)
            assert sv.pi_ell_t(tab.upto(x // 2), ell, t) <= sv.pi_ell_t(tab, ell, t)
    assert sv.pi_t(tab.upto(x // 2), 0) <= sv.pi_t(tab, 0)
    assert tab.n_primes == prime_pi(x)
    assert (tab.a1p == -tab.traces.sum(axis=1)).all()


def test_threads_deterministic(pair):
    a = sv.run_survey(SurveyConfig(pair, 20000, threads=1), ell_range=(3, 40)).to_dict()
    b = sv.run_survey(SurveyConfig(pair, 20000, threads=3), ell_range=(3, 40)).to_dict()
    a["params"].pop("threads", None)
    b["params"].pop("threads", None)
    assert a == b


def test_cache_reuse(tmp_path, pair):
    path = str(tmp_path / "c.ftc")
    first = sv.table_for(SurveyConfig(pair, 3000, cache_path=path))
    second = sv.table_for(SurveyConfig(pair, 3000, cache_path=path))
    assert np.array_equal(first.traces, second.traces)
    bigger = sv.table_for(SurveyConfig(pair, 5000, cache_path=path))
    assert np.array_equal(bigger.upto(3000).traces, first.traces)


def test_report_shape(pair):
    rep = sv.run_survey(SurveyConfig(pair, 2000, z=3, ell=7), ell_range=(5, 20), x_grid=[500, 1000, 2000])
    d = rep.to_dict()
    assert d["disclosure"] == sv.BAD_PRIME_DISCLOSURE
    assert [r["x"] for r in d["series"]] == [500, 1000, 2000]
    assert all(d["counts"][k] <= d["counts"]["pi_x"] for k in ("pi_t", "pi_range_z", "pi_ell_t"))
    assert {"ell", "pi_ell_t"} == set(d["per_ell"][0])
