"""Acceptance criteria, each run at its stated sample size and recorded as one pass/fail line."""

import random
from fractions import Fraction
from math import comb

import pytest

from conftest import LONG, o3_g3_samples, o3_grid_samples, random_metric, random_product
from lossygossip import fan as fg
from lossygossip import gossip as gb
from lossygossip import groups as gr
from lossygossip import pq
from lossygossip.trop import (
    INF,
    TropMatrix,
    build_W,
    identity,
    is_connected,
    is_irredundant,
    is_metric,
    kleene_star,
    metric_as_calls,
    symmetric_core,
)

MONOID_SIZES = {1: (1, 0), 2: (2, 1), 3: (11, 3), 4: (189, 4), 5: (9152, 6), 6: (1_092_473, 10)}
IRREDUNDANT_LENGTHS = {1: 0, 2: 1, 3: 3, 4: 5, 5: 8, 6: 12}


# 1 -------------------------------------------------------------------------------

def test_monoid_sizes(criterion):
    with criterion(1, "ordinary gossip monoid sizes and max lengths, n = 1..6"):
        for n, expected in MONOID_SIZES.items():
            rep = gb.enumerate_monoid(n)
            assert (rep.total_count, rep.max_length) == expected, n


@pytest.mark.optin
@pytest.mark.skipif(not LONG, reason="set LOSSYGOSSIP_LONG=1 for the n = 7 enumeration")
def test_monoid_size_n7(criterion):
    with criterion(1, "ordinary gossip monoid n = 7 (opt-in)"):
        rep = gb.enumerate_monoid(7)
        assert (rep.total_count, rep.max_length) == (293_656_554, 13)


# 2 -------------------------------------------------------------------------------

def test_all_zero_length(criterion):
    with criterion(2, "length of the all-zero matrix: 1, 3, then 2n-4 for n = 4..6"):
        expected = {2: 1, 3: 3, 4: 4, 5: 6, 6: 8}
        for n, length in expected.items():
            assert gb.element_length(gb.full_state(n), n) == length, n


# 3 -------------------------------------------------------------------------------

def test_irredundant_lengths(criterion):
    with criterion(3, "irredundant lengths l_n for n = 1..6, each at most C(n,2)"):
        for n, expected in IRREDUNDANT_LENGTHS.items():
            length, word = gb.max_irredundant_length(n, return_witness=True)
            assert length == expected, n
            assert length <= comb(n, 2)
            assert gb.is_irredundant_calls(word, n)


# 4 -------------------------------------------------------------------------------

def test_pessimal_construction(criterion):
    with criterion(4, "pessimal construction of length C(n,2) verifies for n = 2..8"):
        for n in range(2, 9):
            calls = gb.construct_pessimal(n)
            assert len(calls) == comb(n, 2) and gb.verify_pessimal(calls, n)


def test_pessimal_random_search(criterion):
    with criterion(4, "10^6 seeded random chains find nothing longer than C(n,2), n = 2..5"):
        for n in range(2, 6):
            rep = gb.random_pessimal_search(n, 1_000_000, seed=n)
            assert sum(rep["histogram"].values()) == 1_000_000
            assert rep["max_length"] == comb(n, 2)


# 5 -------------------------------------------------------------------------------

def test_spans_and_orbits_small(criterion):
    with criterion(5, "spans and orbits for n = 2, 3"):
        for n, spans, dist in ((2, 1, {1: 1}), (3, 7, {1: 1, 6: 1})):
            c = fg.enumerate_spans(n)
            assert len(c.spans) == spans
            assert fg.orbit_size_distribution(fg.orbit_classify(c.spans, n)) == dist


@pytest.mark.slow
def test_spans_and_orbits_n4(criterion, fan4):
    with criterion(5, "289 spans, 16 orbits (1x1, 6x12, 9x24), 11 classes with transposition, n = 4"):
        spans = fan4.census.spans
        assert len(spans) == 289
        orbits = fg.orbit_classify(spans, 4)
        assert len(orbits) == 16
        assert fg.orbit_size_distribution(orbits) == {1: 1, 12: 6, 24: 9}
        assert len(fg.orbit_classify(spans, 4, with_transpose=True)) == 11


# 6 -------------------------------------------------------------------------------

@pytest.mark.slow
def test_fan_n4(criterion, fan4):
    with criterion(6, "n = 4 fan check, f-vector, purity, connectivity, metric cone present"):
        assert fan4.report.is_fan
        assert fan4.f_vector == (43, 327, 1042, 1560, 1092, 289)
        assert fan4.is_pure and all(c.dim == 6 for c in fan4.cones)
        assert fan4.codim1_connected
        assert fan4.metric_cone_index is not None
        d4 = fg.metric_cone(4)
        assert fan4.cones[fan4.metric_cone_index].span() == d4.span()
        assert fan4.cones[fan4.metric_cone_index] == d4


# 7 -------------------------------------------------------------------------------

def test_closure_n3(criterion, fan3):
    with criterion(7, "closure sampling, 10^4 trials, n = 3"):
        assert fg.closure_sample_check(fan3, 10_000, seed=0).failures == []


@pytest.mark.slow
def test_closure_n4(criterion, fan4):
    with criterion(7, "closure sampling, 10^4 trials, n = 4"):
        assert fg.closure_sample_check(fan4, 10_000, seed=0).failures == []


# 8 -------------------------------------------------------------------------------

def test_pq_example(criterion):
    with criterion(8, "P/Q: equal spans, 10-dimensional intersection, non-convexity witness"):
        rep = pq.pq_example_check(seed=0)
        assert rep.spans_equal and rep.intersection_dim == 10
        assert rep.witness is not None and rep.ok
        for key in ("p_matrix", "q_matrix", "combination", "weight"):
            assert rep.witness[key]


# 9 -------------------------------------------------------------------------------

def test_semiring_laws(criterion):
    with criterion(9, "tropical semiring laws on 10^3 random triples"):
        rng = random.Random(90)
        vals = [INF] + [Fraction(k, d) for k in range(0, 20) for d in (1, 2, 3)]
        for _ in range(1000):
            n = rng.randint(1, 4)
            a, b, c = (TropMatrix([[rng.choice(vals) for _ in range(n)] for _ in range(n)]) for _ in range(3))
            assert (a @ b) @ c == a @ (b @ c)
            assert a @ b.oplus(c) == (a @ b).oplus(a @ c)
            assert a.oplus(b) @ c == (a @ c).oplus(b @ c)
            assert a @ identity(n) == a == identity(n) @ a


def test_kleene_star_metric(criterion):
    with criterion(9, "Kleene star of 10^4 sampled products is metric, n <= 6"):
        rng = random.Random(91)
        for _ in range(10_000):
            n = rng.randint(2, 6)
            assert is_metric(kleene_star(random_product(rng, n, p_inf=0.1)))


def test_symmetric_core(criterion):
    with criterion(9, "symmetric core has >= n-1 edges and is connected, 10^4 samples"):
        rng = random.Random(92)
        for _ in range(10_000):
            n = rng.randint(2, 6)
            core = symmetric_core(random_product(rng, n, p_inf=0.1))
            assert len(core) >= n - 1 and is_connected(n, core)


def test_metric_as_calls(criterion):
    with criterion(9, "metric_as_calls round trip, 10^3 samples"):
        rng = random.Random(93)
        for _ in range(1000):
            m = random_metric(rng, rng.randint(2, 6))
            assert metric_as_calls(m).product() == m


def test_sl_closure(criterion):
    with criterion(9, "Trop(SL_n) closed under products, 10^4 samples each for n = 2, 3"):
        for n in (2, 3):
            assert gr.sl_closure_check(n, 10_000, seed=94).failures == []


def test_additive_counterexample(criterion):
    with criterion(9, "additive-group product leaves the family for 100 random (a, b)"):
        rng = random.Random(95)
        for _ in range(100):
            a = Fraction(rng.randint(0, 100), rng.randint(1, 5))
            b = Fraction(rng.randint(0, 100), rng.randint(1, 5))
            r = gr.additive_counterexample(a, b)
            assert r["matches_display"] and not r["is_member"]


def test_o3_classification(criterion):
    with criterion(9, "O_3 nonnegative classification on 10^4 prevariety points"):
        rng = random.Random(96)
        samples = o3_g3_samples(9_500, rng) + o3_grid_samples(500, rng)
        assert len(samples) == 10_000
        for m in samples:
            assert gr.o3_prevariety_check(m)["satisfied"]
            assert gr.o3_nonneg_classify(m)["in_Sym3_G3"]


def test_build_w(criterion):
    with criterion(9, "W_n irredundant with C(n+1,3) factors, n = 1..6"):
        for n in range(1, 7):
            w = build_W(n)
            assert len(w) == comb(n + 1, 3) and is_irredundant(w)


# 10 ------------------------------------------------------------------------------

def test_excluded_targets(criterion):
    with criterion(10, "n = 5 span census and n >= 8 monoid rows excluded as stretch targets"):
        # the encoding stops at n = 8; larger requests are refused, not attempted
        with pytest.raises(ValueError):
            gb.enumerate_monoid(9)
