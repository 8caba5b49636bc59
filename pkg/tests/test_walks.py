import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclefactors.bruteforce import walk_distribution
from cyclefactors.fractional import (
    EdgeWeighting,
    build_walk_registry,
    redistribute_pfm,
    uniform_weighting,
)
from cyclefactors.hypergraph import Hypergraph, complete_hypergraph
from cyclefactors.walks import (
    OracleCapError,
    StuckWalkError,
    WalkError,
    WalkState,
    format_marginals,
    memory_length,
    sample_walk,
    self_avoiding_rate,
    transition_dist,
    tuple_marginal_oracle,
)


def k5_pfm():
    H = complete_hypergraph(3, 5).remove_edges([(0, 1, 2)])
    return H, redistribute_pfm(H, build_walk_registry(H, seed=0))


class TestWalkState:
    def test_memory_resets_every_L(self):
        assert [memory_length(3, 4, t) for t in range(1, 10)] == [
            0, 1, 2, 2, 0, 1, 2, 2, 0,
        ]

    def test_state_validation(self):
        with pytest.raises(WalkError, match="disagrees"):
            WalkState(history=(0, 1), L=4, t=2, m=1, k=3, rng=random.Random(0))
        with pytest.raises(WalkError, match="implies"):
            WalkState(history=(0,), L=4, t=2, m=0, k=3, rng=random.Random(0))

    def test_advance_tracks_m(self):
        s = WalkState.start(k=3, L=3, seed=1)
        s = s.advance(0).advance(1).advance(2)
        assert s.t == 4 and s.m == 0  # block boundary: memory reset
        assert s.suffix == ()
        s = s.advance(3)
        assert s.m == 1 and s.suffix == (3,)


class TestTransitionDist:
    def test_initial_distribution_is_uniform_under_pfm(self):
        H = complete_hypergraph(3, 4)
        w = uniform_weighting(H)
        d = transition_dist(H, w, WalkState.start(k=3, L=4))
        assert all(d[v] == Fraction(1, 4) for v in range(4))

    def test_one_step_history_example(self):
        H = complete_hypergraph(3, 4)
        w = uniform_weighting(H)
        s = WalkState.start(k=3, L=4).advance(0)
        d = transition_dist(H, w, s)
        assert d[0] == 0
        assert all(d[v] == Fraction(1, 3) for v in (1, 2, 3))

    def test_suffix_vertices_excluded_and_sum_is_one(self):
        H, w = k5_pfm()
        s = WalkState.start(k=3, L=5).advance(0).advance(3)
        d = transition_dist(H, w, s)
        assert d[0] == d[3] == 0
        assert sum(d.values()) == 1

    def test_stuck_state(self):
        H = Hypergraph(3, 5, [(0, 1, 2), (1, 2, 3)])
        w = EdgeWeighting(H, [Fraction(1), Fraction(1)], exact=True)
        bad = WalkState(history=(0, 4), L=5, t=3, m=2, k=3, rng=random.Random(0))
        with pytest.raises(StuckWalkError):
            transition_dist(H, w, bad)

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_reachable_states_sum_to_one_exactly(self, seed):
        rng = random.Random(seed)
        H, w = k5_pfm()
        L = rng.randint(1, 6)
        s = WalkState.start(k=3, L=L, seed=seed)
        for _ in range(rng.randint(0, 7)):
            d = transition_dist(H, w, s)
            assert sum(d.values()) == 1
            v = rng.choices(list(d), weights=[float(p) for p in d.values()])[0]
            s = s.advance(v)


class TestSampleWalk:
    def test_deterministic_under_seed(self):
        H, w = k5_pfm()
        assert sample_walk(H, w, 4, 9, seed=42) == sample_walk(H, w, 4, 9, seed=42)
        assert sample_walk(H, w, 4, 9, seed=1) != sample_walk(H, w, 4, 9, seed=2)

    def test_walks_respect_the_window_law(self):
        H, w = k5_pfm()
        for seed in range(30):
            walk = sample_walk(H, w, 4, 8, seed=seed)
            # within each L-block, every k-window must be an edge
            for b in range(0, 8, 4):
                block = walk[b : b + 4]
                for i in range(len(block) - 2):
                    assert H.has_edge(block[i : i + 3])

    def test_one_edge_walk_is_uniform_ordered_edge(self):
        H = complete_hypergraph(3, 4)
        w = uniform_weighting(H)
        counts = Counter(sample_walk(H, w, 3, 3, seed=s) for s in range(24_000))
        assert len(counts) == 24
        for freq in counts.values():
            assert abs(freq / 24_000 - 1 / 24) < 0.012


class TestTupleMarginalOracle:
    def test_k4_ordered_edges(self):
        H = complete_hypergraph(3, 4)
        w = uniform_weighting(H)
        res = tuple_marginal_oracle(H, w, L=4, t=3, j=3)
        supported = {tup: pe for tup, (pe, pf) in res.items() if pe > 0}
        assert len(supported) == 24
        assert all(pe == Fraction(1, 24) for pe in supported.values())
        assert all(pe == pf for pe, pf in res.values())
        assert sum(pe for pe, _ in res.values()) == 1

    def test_vertex_marginal_is_uniform_under_pfm(self):
        H, w = k5_pfm()
        for t in (1, 2, 3, 4):
            res = tuple_marginal_oracle(H, w, L=4, t=t, j=1)
            for tup, (pe, pf) in res.items():
                assert pe == pf == Fraction(1, 5)

    def test_formula_holds_for_arbitrary_positive_weights(self):
        # the tuple law is an identity in omega, not a PFM property
        H = complete_hypergraph(3, 5)
        rng = random.Random(7)
        weights = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in H.edges]
        w = EdgeWeighting(H, weights, exact=True)
        for t, j in [(2, 1), (3, 2), (4, 3), (4, 1)]:
            res = tuple_marginal_oracle(H, w, L=5, t=t, j=j)
            assert all(pe == pf for pe, pf in res.values())

    def test_agrees_with_full_sequence_enumeration(self):
        H, w = k5_pfm()
        L, t, j = 4, 4, 2
        res = tuple_marginal_oracle(H, w, L=L, t=t, j=j)
        full = walk_distribution(H, w, L, t)
        marg = {}
        for seq, p in full.items():
            marg[seq[-j:]] = marg.get(seq[-j:], Fraction(0)) + p
        for tup, (pe, pf) in res.items():
            assert pe == marg.get(tup, Fraction(0))

    def test_preconditions(self):
        H, w = k5_pfm()
        with pytest.raises(WalkError, match="t <= L"):
            tuple_marginal_oracle(H, w, L=3, t=4, j=1)
        with pytest.raises(WalkError, match="j <="):
            tuple_marginal_oracle(H, w, L=4, t=2, j=3)
        with pytest.raises(OracleCapError):
            tuple_marginal_oracle(H, w, L=4, t=4, j=1, cap=10)
        with pytest.raises(WalkError, match="exact"):
            tuple_marginal_oracle(H, w.as_floats(), L=4, t=2, j=1)

    def test_dump_format(self):
        H = complete_hypergraph(3, 4)
        w = uniform_weighting(H)
        text = format_marginals(tuple_marginal_oracle(H, w, L=3, t=1, j=1))
        assert text.splitlines()[0] == "0 : 1/4 1/4"


class TestSelfAvoidingRate:
    def test_single_window_never_repeats(self):
        H = complete_hypergraph(3, 6)
        w = uniform_weighting(H)
        r = self_avoiding_rate(H, w, L=3, t_star=3, trials=500, seed=0)
        assert r.rate == 1.0 and r.hits == 500

    def test_two_steps_cannot_collide(self):
        H = complete_hypergraph(3, 4)
        w = uniform_weighting(H)
        assert self_avoiding_rate(H, w, L=4, t_star=2, trials=300, seed=1).rate == 1.0

    def test_longer_walks_collide_more(self):
        H = complete_hypergraph(3, 8)
        w = uniform_weighting(H)
        r4 = self_avoiding_rate(H, w, L=8, t_star=4, trials=4000, seed=2)
        r8 = self_avoiding_rate(H, w, L=8, t_star=8, trials=4000, seed=2)
        assert r8.rate < r4.rate <= 1.0
        lo, hi = r8.interval()
        assert 0.0 <= lo <= r8.rate <= hi <= 1.0
