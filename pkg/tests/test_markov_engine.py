"""Transition matrix construction, stationary solves, payoffs, marginals."""

import numpy as np
import pytest

from memgame import game_core, markov_engine
from memgame.game_core import GameSpec, MemoryConfig, sample_interior_strategy
from memgame.markov_engine import (
    analyze_stationary,
    bilinear_payoff,
    build_transition_matrix,
    conditional_marginalized_x,
    current_pair_marginal,
    marginalized_strategies,
    stationary_distribution,
    stationary_distribution_power,
    stationary_payoffs,
    stationary_residual,
)

MP = GameSpec(np.array([[1.0, -1.0], [-1.0, 1.0]]))


def tables_210(xv, y):
    xv = np.asarray(xv, dtype=float)
    return np.column_stack([xv, 1 - xv]), np.array([[y, 1 - y]])


def random_profile(rng, spec, mem):
    m = spec.m
    x = sample_interior_strategy(rng, game_core.state_count(mem.n_x, m), m)
    y = sample_interior_strategy(rng, game_core.state_count(mem.n_y, m), m)
    return x, y


class TestBuildTransitionMatrix:
    def test_entry_is_product_of_strategies(self):
        # from state (a2,b2), playing (a1,b2) has probability x4*(1-y)
        mem = MemoryConfig(1, 0)
        x, y = tables_210([0.8, 0.6, 0.4, 0.2], 0.5)
        M = build_transition_matrix(x, y, MP, mem)
        s = game_core.encode_state([(1, 1)], 2)
        s2 = game_core.encode_state([(0, 1)], 2)
        assert M[s2, s] == pytest.approx(0.2 * 0.5, abs=1e-15)

    def test_columns_sum_to_one(self):
        rng = np.random.default_rng(3)
        for mem in [MemoryConfig(1, 0), MemoryConfig(2, 1), MemoryConfig(2, 2)]:
            x, y = random_profile(rng, MP, mem)
            M = build_transition_matrix(x, y, MP, mem)
            assert np.abs(M.sum(axis=0) - 1.0).max() < 1e-12
            assert M.min() >= 0.0

    def test_sparsity_pattern_matches_successors(self):
        rng = np.random.default_rng(4)
        mem = MemoryConfig(2, 0)
        x, y = random_profile(rng, MP, mem)
        M = build_transition_matrix(x, y, MP, mem)
        succ = game_core.successor_table(mem, 2)
        allowed = np.zeros_like(M, dtype=bool)
        for s in range(16):
            allowed[succ[s].ravel(), s] = True
        assert np.all(M[~allowed] == 0.0)

    def test_no_memory_single_state(self):
        mem = MemoryConfig(0, 0)
        x = np.array([[0.3, 0.7]])
        y = np.array([[0.6, 0.4]])
        M = build_transition_matrix(x, y, MP, mem)
        assert M.shape == (1, 1)
        assert M[0, 0] == pytest.approx(1.0, abs=1e-15)

    def test_dimension_mismatch(self):
        mem = MemoryConfig(1, 0)
        x = np.full((2, 2), 0.5)
        y = np.array([[0.5, 0.5]])
        with pytest.raises(ValueError):
            build_transition_matrix(x, y, MP, mem)


class TestStationaryDistribution:
    def test_uniform_strategies_give_uniform_chain(self):
        mem = MemoryConfig(1, 0)
        x, y = tables_210([0.5] * 4, 0.5)
        p = stationary_distribution(build_transition_matrix(x, y, MP, mem))
        assert np.allclose(p, 0.25, atol=1e-13)

    def test_balanced_one_memory_profile_is_uniform(self):
        # x_st = 0.5 for this profile, so the chain is uniform
        mem = MemoryConfig(1, 0)
        x, y = tables_210([0.8, 0.6, 0.4, 0.2], 0.5)
        p = stationary_distribution(build_transition_matrix(x, y, MP, mem))
        assert np.allclose(p, 0.25, atol=1e-12)

    @pytest.mark.parametrize("mem", [MemoryConfig(1, 0), MemoryConfig(2, 1)])
    def test_dense_matches_power_iteration(self, mem):
        rng = np.random.default_rng(5)
        for _ in range(10):
            x, y = random_profile(rng, MP, mem)
            M = build_transition_matrix(x, y, MP, mem)
            pd = stationary_distribution(M)
            pp = stationary_distribution_power(M)
            assert np.abs(pd - pp).max() < 1e-11

    def test_residual_and_normalization(self):
        rng = np.random.default_rng(6)
        mem = MemoryConfig(2, 2)
        x, y = random_profile(rng, MP, mem)
        M = build_transition_matrix(x, y, MP, mem)
        p = stationary_distribution(M)
        assert stationary_residual(M, p) <= 1e-12
        assert p.min() >= 0.0
        assert p.sum() == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_stochastic(self):
        with pytest.raises(ValueError):
            stationary_distribution(np.array([[0.5, 0.2], [0.2, 0.2]]))

    def test_power_fallback_when_solve_fails(self, monkeypatch):
        rng = np.random.default_rng(16)
        mem = MemoryConfig(1, 0)
        x, y = random_profile(rng, MP, mem)
        M = build_transition_matrix(x, y, MP, mem)
        expected = stationary_distribution(M)

        def broken(*args, **kwargs):
            raise np.linalg.LinAlgError("synthetic")

        monkeypatch.setattr(np.linalg, "solve", broken)
        p = stationary_distribution(M)
        assert np.abs(p - expected).max() < 1e-10


class TestStationaryPayoffs:
    def test_uniform_matching_pennies_is_zero(self):
        mem = MemoryConfig(1, 0)
        u, v = stationary_payoffs(np.full(4, 0.25), MP, mem)
        assert u == pytest.approx(0.0, abs=1e-15)
        assert v == -u

    def test_weighted_distribution(self):
        mem = MemoryConfig(1, 0)
        u, v = stationary_payoffs(np.array([0.4, 0.1, 0.1, 0.4]), MP, mem)
        assert u == pytest.approx(0.6, abs=1e-15)

    def test_zero_sum_exact(self):
        rng = np.random.default_rng(7)
        mem = MemoryConfig(2, 1)
        x, y = random_profile(rng, MP, mem)
        res = analyze_stationary(x, y, MP, mem)
        assert res.u_st + res.v_st == 0.0

    def test_needs_memory(self):
        with pytest.raises(ValueError):
            stationary_payoffs(np.ones(1), MP, MemoryConfig(0, 0))


class TestMarginalizedStrategies:
    def test_state_independent_x_collapses(self):
        mem = MemoryConfig(1, 0)
        x = np.tile([0.3, 0.7], (4, 1))
        y = np.array([[0.6, 0.4]])
        res = analyze_stationary(x, y, MP, mem)
        assert np.allclose(res.x_marg, [0.3, 0.7], atol=1e-13)
        # memoryless reduction: stationary payoff equals the bilinear one
        assert res.u_st == pytest.approx(
            bilinear_payoff(np.array([0.3, 0.7]), np.array([0.6, 0.4]), MP), abs=1e-12)

    def test_balanced_profile_marginal(self):
        mem = MemoryConfig(1, 0)
        x, y = tables_210([0.8, 0.6, 0.4, 0.2], 0.5)
        res = analyze_stationary(x, y, MP, mem)
        assert np.allclose(res.x_marg, [0.5, 0.5], atol=1e-12)

    def test_marginals_are_distributions(self):
        rng = np.random.default_rng(8)
        for mem in [MemoryConfig(1, 0), MemoryConfig(2, 1), MemoryConfig(2, 2)]:
            x, y = random_profile(rng, MP, mem)
            res = analyze_stationary(x, y, MP, mem)
            assert res.x_marg.sum() == pytest.approx(1.0, abs=1e-12)
            assert res.y_marg.sum() == pytest.approx(1.0, abs=1e-12)

    def test_zero_memory_y_marginal_is_exact_row(self):
        rng = np.random.default_rng(9)
        mem = MemoryConfig(2, 0)
        x, y = random_profile(rng, MP, mem)
        res = analyze_stationary(x, y, MP, mem)
        assert np.array_equal(res.y_marg, y[0])


class TestConditionalMarginalizedX:
    def test_zero_memory_group_equals_marginal(self):
        rng = np.random.default_rng(10)
        mem = MemoryConfig(2, 0)
        x, y = random_profile(rng, MP, mem)
        res = analyze_stationary(x, y, MP, mem)
        cond = conditional_marginalized_x(x, res.p_st, mem, 2)
        assert cond.shape == (1, 2)
        assert np.allclose(cond[0], res.x_marg, atol=1e-12)

    def test_state_independent_x(self):
        mem = MemoryConfig(2, 1)
        x = np.tile([0.25, 0.75], (16, 1))
        y = sample_interior_strategy(np.random.default_rng(11), 4, 2)
        res = analyze_stationary(x, y, MP, mem)
        cond = conditional_marginalized_x(x, res.p_st, mem, 2)
        assert np.allclose(cond, [0.25, 0.75], atol=1e-12)

    def test_zero_group_mass_rejected(self):
        mem = MemoryConfig(2, 1)
        x = np.tile([0.4, 0.6], (16, 1))
        p = np.zeros(16)
        p[0] = 1.0  # group of state 0's projection gets all the mass
        with pytest.raises(ValueError):
            conditional_marginalized_x(x, p, mem, 2)

    def test_monte_carlo_rollout_oracle(self):
        # long-run conditional frequency of X's action within each of Y's
        # memory groups, from a direct simulation of the chain
        rng = np.random.default_rng(12)
        mem = MemoryConfig(2, 1)
        x, y = random_profile(rng, MP, mem)
        res = analyze_stationary(x, y, MP, mem)
        cond = conditional_marginalized_x(x, res.p_st, mem, 2)

        proj = game_core.projection_table(mem, 2)
        succ = game_core.successor_table(mem, 2)
        steps = 1_000_000
        u1 = rng.random(steps)
        u2 = rng.random(steps)
        s = 0
        count = np.zeros(4)
        mean_acc = np.zeros((4, 2))
        sq_acc = np.zeros((4, 2))
        burn = 10_000
        for t in range(steps):
            if t >= burn:
                sig = proj[s]
                count[sig] += 1
                mean_acc[sig] += x[s]
                sq_acc[sig] += x[s] ** 2
            a = 0 if u1[t] < x[s, 0] else 1
            b = 0 if u2[t] < y[proj[s], 0] else 1
            s = succ[s, a, b]
        est = mean_acc / count[:, None]
        var = sq_acc / count[:, None] - est**2
        se = np.sqrt(var / count[:, None])
        # sequential samples are correlated; 3 iid standard errors padded 3x
        assert np.all(np.abs(est - cond) <= 9 * se + 1e-4)


class TestCurrentPairMarginal:
    def test_one_memory_is_identity(self):
        rng = np.random.default_rng(13)
        mem = MemoryConfig(1, 0)
        x, y = random_profile(rng, MP, mem)
        res = analyze_stationary(x, y, MP, mem)
        assert np.allclose(current_pair_marginal(res.p_st, mem, 2), res.p_st)

    def test_uniform_two_memory(self):
        mem = MemoryConfig(2, 0)
        out = current_pair_marginal(np.full(16, 1 / 16), mem, 2)
        assert np.allclose(out, 0.25, atol=1e-14)

    def test_memoryless_y_factorization(self):
        # with n_y = 0 the newest pair factorizes into x_marg (x) y
        rng = np.random.default_rng(14)
        mem = MemoryConfig(2, 0)
        x, y = random_profile(rng, MP, mem)
        res = analyze_stationary(x, y, MP, mem)
        pair = current_pair_marginal(res.p_st, mem, 2).reshape(2, 2)
        assert np.abs(pair - np.outer(res.x_marg, y[0])).max() < 1e-9


class TestAnalyzeStationary:
    def test_no_memory_bilinear(self):
        mem = MemoryConfig(0, 0)
        x = np.array([[0.3, 0.7]])
        y = np.array([[0.6, 0.4]])
        res = analyze_stationary(x, y, MP, mem)
        assert res.u_st == pytest.approx(bilinear_payoff(x[0], y[0], MP), abs=1e-15)
        assert np.array_equal(res.p_st, np.ones(1))
        assert np.array_equal(res.x_marg, x[0])

    def test_residual_reported(self):
        rng = np.random.default_rng(15)
        mem = MemoryConfig(2, 1)
        x, y = random_profile(rng, MP, mem)
        res = analyze_stationary(x, y, MP, mem)
        assert res.residual <= 1e-12
