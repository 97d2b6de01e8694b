import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vfpolytope.errors import (
    EnumerationTooLarge,
    InvalidGamma,
    InvalidStochasticRow,
    MalformedDocument,
    UnknownFixture,
)
from vfpolytope.mdp import (
    FIXTURE_NAMES,
    Mdp,
    Policy,
    builtin_fixture,
    deterministic_policies,
    dump_mdp,
    example1_mdp,
    load_mdp,
    policy_matrix,
    random_mdp,
    random_policy,
)


def doc_for(mdp: Mdp) -> dict:
    return json.loads(dump_mdp(mdp))


class TestFixtures:
    def test_catalog_has_six_entries(self):
        assert len(FIXTURE_NAMES) == 6
        assert set(FIXTURE_NAMES) == {
            "fig2a", "fig2b", "fig2c", "fig2d", "threeaction", "dyn2",
        }

    def test_fig2a_numbers(self):
        m = builtin_fixture("fig2a")
        assert m.gamma == 0.9
        assert m.reward_matrix[0, 1] == 0.38
        assert m.transitions[0, 1] == 0.99
        np.testing.assert_array_equal(m.rewards, [0.06, 0.38, -0.13, 0.64])

    def test_fig2c_numbers(self):
        m = builtin_fixture("fig2c")
        assert (m.n_states, m.n_actions, m.gamma) == (2, 3, 0.9)
        np.testing.assert_array_equal(
            m.rewards, [-0.93, -0.49, 0.63, 0.78, 0.14, 0.41]
        )

    def test_threeaction_shape(self):
        m = builtin_fixture("threeaction")
        assert (m.n_actions, m.gamma) == (3, 0.8)

    def test_dyn2_numbers(self):
        m = builtin_fixture("dyn2")
        assert m.gamma == 0.9
        assert m.reward_matrix[0, 0] == -0.45
        np.testing.assert_array_equal(m.transitions[0], [0.7, 0.3])

    def test_unknown_fixture(self):
        with pytest.raises(UnknownFixture):
            builtin_fixture("bogus")

    def test_all_fixtures_validate(self):
        for name in FIXTURE_NAMES:
            m = builtin_fixture(name)
            sums = m.transitions.sum(axis=1)
            assert np.all(np.abs(sums - 1.0) < 1e-12)


class TestExample1:
    def test_reward_layout(self):
        m = example1_mdp()
        np.testing.assert_array_equal(m.rewards, [0.0, 1.0, 0.0, 0.0])
        assert m.gamma == 0.9

    def test_structure(self):
        m = example1_mdp()
        np.testing.assert_array_equal(m.transitions[0], [1.0, 0.0])
        np.testing.assert_array_equal(m.transitions[1], [0.0, 1.0])
        # absorbing second state, both actions
        np.testing.assert_array_equal(m.transitions[2], [0.0, 1.0])
        np.testing.assert_array_equal(m.transitions[3], [0.0, 1.0])

    def test_gamma_passthrough(self):
        assert example1_mdp(gamma=0.5).gamma == 0.5

    def test_round_trip(self):
        m = example1_mdp()
        assert load_mdp(dump_mdp(m)) == m


class TestLoadMdp:
    def test_fixture_documents_round_trip(self):
        for name in FIXTURE_NAMES:
            m = builtin_fixture(name)
            again = load_mdp(dump_mdp(m))
            assert again == m
            # and a second round trip is bit-identical too
            assert load_mdp(dump_mdp(again)) == again

    def test_bad_stochastic_row(self):
        doc = doc_for(example1_mdp())
        doc["transitions"][0] = [0.5, 0.6]
        with pytest.raises(InvalidStochasticRow):
            load_mdp(json.dumps(doc))

    def test_row_within_accept_tolerance_is_renormalized(self):
        doc = doc_for(example1_mdp())
        doc["transitions"][0] = [0.5 + 4e-10, 0.5]
        m = load_mdp(json.dumps(doc))
        assert abs(m.transitions[0].sum() - 1.0) < 1e-12
        # once normalized, the document round-trips bit for bit
        assert load_mdp(dump_mdp(m)) == m

    def test_negative_entry_rejected(self):
        doc = doc_for(example1_mdp())
        doc["transitions"][0] = [1.1, -0.1]
        with pytest.raises(InvalidStochasticRow):
            load_mdp(json.dumps(doc))

    def test_gamma_one_rejected(self):
        doc = doc_for(example1_mdp())
        doc["gamma"] = 1.0
        with pytest.raises(InvalidGamma):
            load_mdp(json.dumps(doc))

    def test_missing_and_extra_keys(self):
        doc = doc_for(example1_mdp())
        del doc["rewards"]
        with pytest.raises(MalformedDocument):
            load_mdp(json.dumps(doc))
        doc = doc_for(example1_mdp())
        doc["surprise"] = 1
        with pytest.raises(MalformedDocument):
            load_mdp(json.dumps(doc))

    def test_wrong_lengths(self):
        doc = doc_for(example1_mdp())
        doc["rewards"] = doc["rewards"][:-1]
        with pytest.raises(MalformedDocument):
            load_mdp(json.dumps(doc))

    def test_not_json(self):
        with pytest.raises(MalformedDocument):
            load_mdp("{nope")


class TestRandomGeneration:
    def test_random_mdp_deterministic(self):
        a = random_mdp(2, 2, 0.9, seed=7)
        b = random_mdp(2, 2, 0.9, seed=7)
        assert a == b

    def test_random_mdp_rows_stochastic(self):
        m = random_mdp(4, 3, 0.9, seed=2)
        sums = m.transitions.sum(axis=1)
        assert np.all(np.abs(sums - 1.0) < 1e-12)
        assert np.all(m.transitions >= 0.0)

    def test_single_action(self):
        m = random_mdp(3, 1, 0.5, seed=1)
        pols = deterministic_policies(m)
        assert len(pols) == 1
        assert random_policy(m, 0) == pols[0]

    def test_invalid_gamma(self):
        with pytest.raises(InvalidGamma):
            random_mdp(2, 2, 1.0, seed=0)

    def test_random_policy_deterministic(self):
        m = builtin_fixture("dyn2")
        assert random_policy(m, 3) == random_policy(m, 3)

    def test_random_policy_rowwise_flat_mean(self):
        # flat Dirichlet over two actions has mean (1/2, 1/2)
        m = builtin_fixture("dyn2")
        rows = np.stack([random_policy(m, s).probs for s in range(10_000)])
        mean = rows.mean(axis=0)
        assert np.max(np.abs(mean - 0.5)) < 0.02

    @given(st.integers(min_value=0, max_value=10_000))
    def test_random_policy_on_simplex(self, seed):
        m = builtin_fixture("fig2c")
        p = random_policy(m, seed)
        assert np.min(p.probs) >= 0.0
        assert np.all(np.abs(p.probs.sum(axis=1) - 1.0) <= 1e-12)


class TestDeterministicPolicies:
    def test_counts(self):
        assert len(deterministic_policies(builtin_fixture("dyn2"))) == 4
        assert len(deterministic_policies(builtin_fixture("threeaction"))) == 9

    def test_one_hot_rows_and_no_duplicates(self):
        pols = deterministic_policies(builtin_fixture("threeaction"))
        seen = set()
        for p in pols:
            assert np.all(np.isin(p.probs, (0.0, 1.0)))
            assert np.all(p.probs.sum(axis=1) == 1.0)
            seen.add(tuple(np.argmax(p.probs, axis=1)))
        assert len(seen) == 9

    def test_lexicographic_order(self):
        pols = deterministic_policies(builtin_fixture("dyn2"))
        actions = [tuple(np.argmax(p.probs, axis=1)) for p in pols]
        assert actions == sorted(actions)

    def test_cap(self):
        m = random_mdp(8, 6, 0.9, seed=0)
        with pytest.raises(EnumerationTooLarge):
            deterministic_policies(m, cap=10**5)


class TestPolicyMatrix:
    def test_uniform_two_by_two(self):
        p = Policy.uniform(2, 2)
        np.testing.assert_array_equal(
            policy_matrix(p), [[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5]]
        )

    def test_deterministic_is_binary(self):
        p = Policy.deterministic([1, 0], 2)
        m = policy_matrix(p)
        assert np.all(np.isin(m, (0.0, 1.0)))
        assert np.all(m.sum(axis=1) == 1.0)

    def test_matches_induced_transitions(self):
        from vfpolytope.evaluation import induce

        mdp = builtin_fixture("fig2c")
        p = random_policy(mdp, 5)
        np.testing.assert_allclose(
            policy_matrix(p) @ mdp.transitions,
            induce(mdp, p).p_pi,
            atol=1e-14,
        )


class TestImmutability:
    def test_arrays_are_read_only(self):
        m = builtin_fixture("dyn2")
        with pytest.raises(ValueError):
            m.rewards[0] = 99.0
        p = Policy.uniform(2, 2)
        with pytest.raises(ValueError):
            p.probs[0, 0] = 0.7
