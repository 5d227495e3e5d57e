import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cequery.adversaries import (ASAdversaryState, HTPState, answer_from_revealed, as_answer,
                                 as_finalize, htp_step, in_count, polite_wrap, replay_matches)
from cequery.hypercube import Path, UsageError, closure, hamming, random_walk
from cequery.labeling import in_degree, label_from_path


def scripted(queries):
    """Inner algorithm that asks a fixed list of vertices, ignoring its budget."""
    def algo(ask, n, budget):
        for q in queries:
            ask(q)
    return algo


class TestASAdversary:
    def test_first_query_all_out(self):
        state = ASAdversaryState(6)
        ans = as_answer(state, 13)
        assert ans == (-1,) * 6 and in_count(ans) == 0

    def test_second_query_neighbour(self):
        state = ASAdversaryState(6)
        as_answer(state, 13)
        ans = as_answer(state, 13 ^ 4)
        assert in_count(ans) == 1
        assert ans[2] == 1 and sum(1 for r in ans if r == -1) == 5

    def test_empty_finalize(self):
        state = ASAdversaryState(4)
        R = as_finalize(state)
        assert R.incident(0) == (-1,) * 4 and R.incident(15) == (1,) * 4

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 14), st.lists(st.integers(0, 2**14 - 1), max_size=80))
    def test_replay_and_antisymmetry(self, n, raw):
        state = ASAdversaryState(n)
        for q in raw:
            as_answer(state, q % (1 << n))
        R = as_finalize(state)
        assert replay_matches(state, R)
        for v in {q % (1 << n) for q in raw}:
            for i in range(n):
                assert R.R(v, i) == -R.R(v ^ (1 << i), i)
        # in-degree is the number of neighbours queried earlier
        seen = set()
        for v, ans in zip(state.queried, state.answers):
            if v not in seen:
                assert in_count(ans) == sum(1 for i in range(n) if v ^ (1 << i) in seen)
            seen.add(v)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(8, 16), st.integers(0, 2**32))
    def test_polite_sequences_never_win(self, n, seed):
        """Queries with at most n/4 earlier-queried neighbours have in-degree <= n/4."""
        rng = random.Random(seed)
        state = ASAdversaryState(n)
        seen = set()
        for _ in range(200):
            v = rng.getrandbits(n)
            if v in seen or sum(1 for i in range(n) if v ^ (1 << i) in seen) * 4 > n:
                continue
            seen.add(v)
            assert in_count(as_answer(state, v)) * 4 <= n
        R = as_finalize(state)
        assert all(in_degree(R, v).count * 4 <= n for v in seen)


class TestPoliteWrap:
    def test_far_apart_queries_pass_through(self):
        n = 10
        qs = [0, 0b111, 0b111000, 0b111111000, 0b1001001001 ^ 0b111]
        assert all(hamming(a, b) >= 3 for a in qs for b in qs if a != b)
        state = ASAdversaryState(n)
        log = polite_wrap(scripted(qs), 1, 2)(lambda v: as_answer(state, v), n, 100)
        assert log.issued == qs and log.halted == "done"

    def test_star(self):
        n, c = 16, 0b1010
        qs = [c] + [c ^ (1 << i) for i in range(n)]
        state = ASAdversaryState(n)
        log = polite_wrap(scripted(qs), 2, 4)(lambda v: as_answer(state, v), n, 1000)
        assert log.violations == 0
        assert all(p <= 4 for p in log.prior_neighbors)
        assert set(log.inner_queries) <= set(log.issued)
        assert log.closure_bound_holds

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32))
    def test_issued_is_closure(self, seed):
        n = 12
        rng = random.Random(seed)
        v = rng.getrandbits(n)
        qs = []
        for _ in range(60):
            v ^= 1 << rng.randrange(n)
            qs.append(v)
        state = ASAdversaryState(n)
        log = polite_wrap(scripted(qs), Fraction(n, 8), Fraction(n, 4))(lambda v: as_answer(state, v), n, 10**4)
        asked = log.inner_queries
        if log.halted == "done":
            assert set(log.issued) == closure(asked, Fraction(n, 8), n)
            assert log.violations == 0
        assert replay_matches(state, as_finalize(state))
        assert all(in_count(a) * 4 <= n for a in state.answers)

    def test_budget_halt(self):
        n = 12
        qs = [random.Random(i).getrandbits(n) for i in range(100)]
        state = ASAdversaryState(n)
        log = polite_wrap(scripted(qs), Fraction(n, 8), Fraction(n, 4))(lambda v: as_answer(state, v), n, 10)
        assert len(log.issued) <= 10 and log.halted == "budget"

    def test_threshold_check(self):
        with pytest.raises(UsageError):
            polite_wrap(scripted([]), 3, 5)


def suffix_scan_win(path, frontier, q):
    return q in path.vertices[frontier + 1:]


class TestHTP:
    def test_revealed_vertex_misses(self):
        path = Path(4, (0, 1, 3, 7, 15, 14, 12))
        state = HTPState(path, 2)
        htp_step(state, None)
        assert state.revealed() == (0, 1, 3)
        assert not htp_step(state, 1).win

    def test_end_vertex_wins(self):
        path = random_walk(0, 30, 8, random.Random(4))
        state = HTPState(path, 4)
        assert htp_step(state, path.end).win
        assert state.win_step == 1
        with pytest.raises(UsageError):
            htp_step(state, 0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(3, 10), st.integers(1, 60), st.integers(1, 6), st.integers(0, 2**32),
           st.sampled_from(["after", "before"]))
    def test_win_rule_matches_suffix_scan(self, n, L, k, seed, judge):
        rng = random.Random(seed)
        path = random_walk(rng.getrandbits(n), L, n, rng)
        state = HTPState(path, k, judge)
        while not state.won and state.revealed_upto < L:
            q = rng.choice(path.vertices) if rng.random() < 0.5 else rng.getrandbits(n)
            before = state.revealed_upto
            out = htp_step(state, q)
            frontier = state.revealed_upto if judge == "after" else before
            assert out.win == suffix_scan_win(path, frontier, q)
            assert state.revealed_upto == min(state.step * k, L)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 8), st.integers(1, 80), st.integers(1, 8), st.integers(0, 2**32))
    def test_answers_from_prefix(self, n, L, k, seed):
        rng = random.Random(seed)
        path = random_walk(rng.getrandbits(n), L, n, rng)
        state = HTPState(path, k)
        full = label_from_path(path)
        while state.revealed_upto < L:
            htp_step(state, None)
            upto = state.revealed_upto
            prefix = label_from_path(Path(n, path.vertices[: upto + 1]))
            late = set(path.vertices[upto:])
            for v in range(1 << n):
                got = answer_from_revealed(state, v)
                assert got == prefix.incident(v)
                if v not in late:
                    assert got == full.incident(v)

    def test_bad_quota(self):
        with pytest.raises(UsageError):
            HTPState(Path(2, (0,)), 0)


def exact_prober_win_probability(path, k, T):
    """A uniform prober ignores the path, so given the path its chance of
    never landing on the unrevealed tail is a product over steps."""
    n, L = path.n, path.length
    miss = 1.0
    for t in range(1, T + 1):
        frontier = min(t * k, L)
        tail = set(path.vertices[frontier + 1:])
        miss *= 1 - len(tail) / 2**n
    return 1 - miss


def test_random_prober_matches_exact_expectation():
    from cequery.experiments import htp_trial, trial_rng

    n, L, k, T, N = 10, 64, 4, 8, 3000
    wins, expected = 0, 0.0
    for i in range(N):
        rng = trial_rng(77, i)
        path = random_walk(rng.getrandbits(n), L, n, rng)
        expected += exact_prober_win_probability(path, k, T)
        wins += htp_trial("random", n, L, k, T, 77, i).won
    p, q = wins / N, expected / N
    se = (q * (1 - q) / N) ** 0.5
    assert abs(p - q) <= 4 * se
