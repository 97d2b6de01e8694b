import json

import numpy as np
import pytest

from vfpolytope.errors import UnknownSuite
from vfpolytope.evaluation import value_function
from vfpolytope.mdp import FIXTURE_NAMES, Mdp, Policy, builtin_fixture, random_mdp
from vfpolytope.verification import (
    SUITE_NAMES,
    OracleConfig,
    compare_oracles,
    mc_value_oracle,
    neumann_tail_bound,
    neumann_value_oracle,
    run_suite,
)

DYN2 = builtin_fixture("dyn2")
UNIFORM2 = Policy.uniform(2, 2)

FAST = OracleConfig(mc_episodes=20_000, mc_horizon=200, seed=0)


class TestNeumannOracle:
    def test_one_term_is_expected_reward(self):
        cfg = OracleConfig(neumann_terms=1)
        out = neumann_value_oracle(DYN2, UNIFORM2, cfg)
        np.testing.assert_allclose(out, [-0.275, 0.5], atol=1e-15)

    def test_gamma_zero_is_exact(self):
        m = Mdp(
            n_states=2,
            n_actions=2,
            rewards=DYN2.rewards,
            transitions=DYN2.transitions,
            gamma=0.0,
        )
        out = neumann_value_oracle(m, UNIFORM2, OracleConfig(neumann_terms=1))
        np.testing.assert_allclose(out, value_function(m, UNIFORM2), atol=1e-15)

    def test_within_tail_bound_on_dyn2(self):
        cfg = OracleConfig(neumann_terms=200)
        out = neumann_value_oracle(DYN2, UNIFORM2, cfg)
        exact = value_function(DYN2, UNIFORM2)
        bound = neumann_tail_bound(DYN2, 200)
        assert bound == pytest.approx(0.9**200 * 0.5 / 0.1)
        assert np.max(np.abs(out - exact)) <= bound

    def test_bound_holds_on_random_instances(self):
        for seed in range(25):
            rng = np.random.default_rng(seed)
            mdp = random_mdp(
                int(rng.integers(2, 5)), int(rng.integers(2, 4)),
                float(rng.uniform(0.2, 0.9)), seed=seed,
            )
            policy = Policy(
                rng.dirichlet(np.ones(mdp.n_actions), size=mdp.n_states)
            )
            for terms in (1, 5, 40):
                cfg = OracleConfig(neumann_terms=terms)
                dev = np.max(
                    np.abs(
                        neumann_value_oracle(mdp, policy, cfg)
                        - value_function(mdp, policy)
                    )
                )
                assert dev <= neumann_tail_bound(mdp, terms) + 1e-14


class TestMonteCarloOracle:
    def test_deterministic_chain_geometric_series(self):
        m = Mdp(
            n_states=1,
            n_actions=1,
            rewards=np.array([1.0]),
            transitions=np.array([[1.0]]),
            gamma=0.9,
        )
        cfg = OracleConfig(mc_episodes=16, mc_horizon=300, seed=1)
        est = mc_value_oracle(m, Policy(np.ones((1, 1))), cfg)
        assert abs(est.value[0] - 10.0) <= 1e-10 + est.truncation_bound
        assert est.stderr[0] == 0.0

    def test_zero_rewards(self):
        m = Mdp(
            n_states=2,
            n_actions=2,
            rewards=np.zeros(4),
            transitions=DYN2.transitions,
            gamma=0.9,
        )
        est = mc_value_oracle(m, UNIFORM2, OracleConfig(mc_episodes=100, seed=2))
        np.testing.assert_array_equal(est.value, [0.0, 0.0])
        np.testing.assert_array_equal(est.stderr, [0.0, 0.0])

    def test_consistent_with_exact_on_dyn2(self):
        est = mc_value_oracle(DYN2, UNIFORM2, FAST)
        exact = value_function(DYN2, UNIFORM2)
        assert np.all(
            np.abs(est.value - exact) <= 3 * est.stderr + est.truncation_bound
        )

    def test_seeded_determinism(self):
        a = mc_value_oracle(DYN2, UNIFORM2, OracleConfig(mc_episodes=500, seed=5))
        b = mc_value_oracle(DYN2, UNIFORM2, OracleConfig(mc_episodes=500, seed=5))
        np.testing.assert_array_equal(a.value, b.value)


class TestCompareOracles:
    def test_dyn2_uniform_triangulates(self):
        report = compare_oracles(DYN2, UNIFORM2, FAST)
        assert report.passed

    def test_zero_reward_exact_agreement(self):
        m = Mdp(
            n_states=2,
            n_actions=2,
            rewards=np.zeros(4),
            transitions=DYN2.transitions,
            gamma=0.9,
        )
        report = compare_oracles(m, UNIFORM2, FAST)
        assert report.passed
        assert report.max_deviation <= 0.0

    def test_gamma_zero_single_step(self):
        m = Mdp(
            n_states=2,
            n_actions=2,
            rewards=DYN2.rewards,
            transitions=DYN2.transitions,
            gamma=0.0,
        )
        report = compare_oracles(m, UNIFORM2, FAST)
        assert report.passed


class TestSuites:
    def test_unknown_suite(self):
        with pytest.raises(UnknownSuite):
            run_suite("nope")

    @pytest.mark.parametrize("name", SUITE_NAMES)
    def test_random_family_passes(self, name):
        trials = 10 if name in ("boundary", "hull") else 25
        report = run_suite(name, trials=trials, seed=123)
        assert report.passed, report.failures
        assert report.instances_run >= 1

    @pytest.mark.parametrize("fixture", FIXTURE_NAMES)
    def test_fixtures_pass_all_suites(self, fixture):
        mdp = builtin_fixture(fixture)
        for name in SUITE_NAMES:
            trials = 1 if name in ("boundary", "hull", "dominance") else 5
            report = run_suite(name, trials=trials, seed=9, mdp=mdp)
            assert report.passed, (name, report.failures)

    def test_line_suite_tight_deviation(self):
        report = run_suite("line", trials=100, seed=1)
        assert report.passed
        assert report.max_deviation < 1e-9

    def test_zeros_suite_exact(self):
        report = run_suite("zeros", trials=50, seed=2)
        assert report.passed
        assert report.max_deviation == 0.0

    def test_hull_suite_on_dyn2(self):
        report = run_suite("hull", seed=7, mdp=DYN2)
        assert report.passed

    def test_reports_deterministic(self):
        a = run_suite("rho", trials=10, seed=4)
        b = run_suite("rho", trials=10, seed=4)
        assert a.to_dict() == b.to_dict()

    def test_report_serializes(self):
        report = run_suite("order", trials=5, seed=0)
        payload = json.loads(json.dumps(report.to_dict()))
        assert payload["check_name"] == "order"
        assert payload["passed"] is True
        assert payload["instances_run"] == 5
        assert isinstance(payload["max_deviation"], float)

    def test_failure_recorded_with_descriptor(self):
        report = run_suite("dominance", trials=3, seed=0, tolerance=-1.0)
        assert not report.passed
        assert report.failures[0]["instance"]
        assert report.failures[0]["deviation"] >= 0.0
