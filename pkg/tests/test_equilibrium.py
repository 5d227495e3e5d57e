import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cequery.equilibrium import (CompactionError, SparseDistribution, WitnessError, compact_support,
                                 coordinate_closure, default_alpha, extract_witness, flip_gain,
                                 outside_weight_check, regret, total_regret_sum, verify_ce)
from cequery.games import (constant_game, coordination_game, dominant_game, game_from_as, game_from_nnv,
                           matching_pennies, random_game)
from cequery.hypercube import UsageError, from_bits
from cequery.labeling import in_degree, make_path_instance, nnv_check, random_as_labeling
from cequery.solvers import exact_ce_small


def brute_regret(x, game, i, b):
    """Sum over the whole cube, not just the support."""
    total = Fraction(0)
    for v in range(1 << game.n):
        w = (v | (1 << i)) if b else (v & ~(1 << i))
        total += x[v] * (game.u(i, w) - game.u(i, v))
    return total


def random_distribution(n, rng, size=None):
    size = size or rng.randint(1, min(8, 1 << n))
    support = rng.sample(range(1 << n), size)
    weights = [rng.randint(1, 20) for _ in support]
    return SparseDistribution(n, {v: Fraction(w, sum(weights)) for v, w in zip(support, weights)})


@st.composite
def game_and_dist(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    rng = random.Random(draw(st.integers(0, 2**32)))
    return random_game(n, 5, rng), random_distribution(n, rng)


class TestDistribution:
    def test_validation(self):
        with pytest.raises(UsageError):
            SparseDistribution(2, {0: Fraction(1, 2)})
        with pytest.raises(UsageError):
            SparseDistribution(2, {0: Fraction(3, 2), 1: Fraction(-1, 2)})
        with pytest.raises(UsageError):
            SparseDistribution(2, {4: 1})
        x = SparseDistribution(3, {1: Fraction(1, 2), 2: Fraction(1, 2), 5: 0})
        assert x.support == {1, 2}

    def test_json(self):
        x = SparseDistribution(4, {from_bits("1000"): Fraction(1, 3), 6: Fraction(2, 3)})
        data = x.to_json()
        assert data["entries"][0]["profile"] == "1000"
        assert SparseDistribution.from_json(data) == x


class TestRegret:
    def test_point_mass(self):
        g = random_game(3, 6, random.Random(3))
        v = 0b101
        x = SparseDistribution.point(3, v)
        for i in range(3):
            assert regret(x, g, i, (v >> i) & 1) == 0
            assert regret(x, g, i, 1 - ((v >> i) & 1)) == g.u(i, v ^ (1 << i)) - g.u(i, v)

    def test_matching_pennies_uniform(self):
        x = SparseDistribution.uniform(2, range(4))
        g = matching_pennies()
        assert all(regret(x, g, i, b) == 0 for i in range(2) for b in (0, 1))
        assert verify_ce(x, g, 0).passed

    def test_constant_game(self):
        x = random_distribution(4, random.Random(1))
        assert verify_ce(x, constant_game(4, Fraction(1, 2)), 0).passed
        assert total_regret_sum(x, constant_game(4)) == 0

    def test_coordination_example(self):
        # profile written "01": player 1 plays 0, player 2 plays 1
        x = SparseDistribution.point(2, from_bits("01"))
        g = coordination_game()
        assert regret(x, g, 0, 1) == 1
        report = verify_ce(x, g, Fraction(99, 100))
        assert not report.passed and report.max_regret == 1

    @settings(max_examples=100, deadline=None)
    @given(game_and_dist())
    def test_matches_brute_force(self, case):
        game, x = case
        report = verify_ce(x, game)
        for i in range(game.n):
            for b in (0, 1):
                r = brute_regret(x, game, i, b)
                assert regret(x, game, i, b) == r == report.regrets[i][b]

    @settings(max_examples=100, deadline=None)
    @given(game_and_dist())
    def test_total_regret_identity(self, case):
        game, x = case
        total = sum(regret(x, game, i, b) for i in range(game.n) for b in (0, 1))
        assert total == total_regret_sum(x, game)

    def test_negative_eps(self):
        with pytest.raises(UsageError):
            verify_ce(SparseDistribution.point(1, 0), constant_game(1), -1)


class TestWitness:
    def test_point_mass_ce(self):
        g = dominant_game(4)
        x = SparseDistribution.point(4, 0b1111)
        assert verify_ce(x, g).passed
        assert extract_witness(x, g, 0) == 0b1111

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_nnv_exact_ce(self, n):
        inst = make_path_instance(n, random.Random(n))
        g = game_from_nnv(inst.labeling)
        x = exact_ce_small(g)
        v = extract_witness(x, g, 0)
        assert nnv_check(inst.labeling, v)
        assert v == inst.end_vertex
        assert inst.end_vertex in x.support

    @pytest.mark.parametrize("seed", range(5))
    def test_as_half_ce(self, seed):
        n = 5
        R = random_as_labeling(n, random.Random(seed))
        g = game_from_as(R)
        x = exact_ce_small(g)
        assert verify_ce(x, g, Fraction(1, 2)).passed
        v = extract_witness(x, g, Fraction(n, 2))
        assert in_degree(R, v).signed_sum <= Fraction(n, 2)
        assert flip_gain(g, v) == in_degree(R, v).signed_sum

    def test_no_witness(self):
        g = constant_game(2)
        with pytest.raises(WitnessError):
            extract_witness(SparseDistribution.point(2, 0), g, -1)


class TestCompaction:
    def test_inside_q_prime(self):
        x = SparseDistribution(3, {0: Fraction(1, 2), 1: Fraction(1, 2)})
        out, rec = compact_support(x, {0}, Fraction(1, 10), 0)
        assert out == x and rec.beta == 1
        assert rec.q_prime == {0, 1}

    def test_forced_renormalisation(self):
        a, b = 0b000, 0b110
        x = SparseDistribution(3, {a: Fraction(1, 2), b: Fraction(1, 2)})
        out, rec = compact_support(x, {a}, Fraction(1, 10), 0)
        assert out == SparseDistribution.point(3, a) and rec.beta == 2

    def test_all_outside(self):
        with pytest.raises(CompactionError):
            compact_support(SparseDistribution.point(3, 7), {0}, Fraction(1, 2), 0)

    def test_bound_value(self):
        _, rec = compact_support(SparseDistribution.point(2, 0), {0}, Fraction(1, 10), Fraction(1, 100))
        # 1/10 + 4 * 11/100; the quoted decimal 0.544 is looser than the formula
        assert rec.output_eps_bound == Fraction(27, 50)

    def test_coordinate_closure(self):
        assert coordinate_closure({0b100, 0b011}) == {0b100, 0b101, 0b011, 0b010}
        assert coordinate_closure(set()) == frozenset()

    def test_default_alpha(self):
        assert default_alpha(Fraction(1, 100)) == Fraction(1, 10)
        a = default_alpha(Fraction(1, 2))
        assert abs(a * a - Fraction(1, 2)) < Fraction(1, 10**4)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 2**32))
    def test_outside_weight(self, n, seed):
        """Heavy mass off Q' lets some completion break the CE."""
        rng = random.Random(seed)
        alpha = Fraction(1, 10)
        game = random_game(n, 4, rng).scaled(alpha)
        Q = set(rng.sample(range(1 << n), rng.randint(1, 4)))
        x = random_distribution(n, rng)
        eps = Fraction(1, 100)
        check = outside_weight_check(x, game, Q, eps)
        if check.bound_violated:
            assert check.completion_violates
        assert check.alpha <= alpha
