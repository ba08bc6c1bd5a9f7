import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from mediated_persuasion import (
    BarycenterMismatch,
    BeliefDistribution,
    BlackwellOrder,
    ColumnSumMismatch,
    NegativeEntry,
    PriorOutsideSupport,
    TooFewRealizations,
    ZeroProbabilitySignal,
    bayes_plausible_weights,
    blackwell_compare,
    compose,
    garbling_rank,
    induced_tau,
    is_mps,
    posterior_after_signal,
    validate_stochastic,
)
from mediated_persuasion.info import _garbling_closed_form, _garbling_lp

from conftest import RANKED_PAIR, UNRANKED_PAIR, random_experiment, random_garbling


class TestValidateStochastic:
    def test_identity_ok(self):
        m = validate_stochastic([[1, 0], [0, 1]])
        assert m.m == m.n == 2

    def test_worked_garbling_ok(self):
        m = validate_stochastic([[6 / 7, 3 / 7], [1 / 7, 4 / 7]])
        assert_allclose(m.a.sum(axis=0), 1.0)

    def test_column_sum_mismatch_reports_worst_column(self):
        with pytest.raises(ColumnSumMismatch) as exc:
            validate_stochastic([[0.5, 0.6], [0.5, 0.5]])
        assert exc.value.column == 1
        assert exc.value.deviation == pytest.approx(0.1)

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry):
            validate_stochastic([[1.2, 0], [-0.2, 1]])

    def test_too_few_realizations(self):
        with pytest.raises(TooFewRealizations):
            validate_stochastic([[0.2, 0.5, 0.3], [0.8, 0.5, 0.7]])

    def test_input_not_mutated(self):
        raw = [[0.5, 0.25], [0.5, 0.75]]
        validate_stochastic(raw)
        assert raw == [[0.5, 0.25], [0.5, 0.75]]


class TestCompose:
    def test_identity_right_factor(self):
        sigma = [[6 / 7, 3 / 7], [1 / 7, 4 / 7]]
        b = compose(sigma, np.eye(2))
        assert_allclose(b.a, sigma)

    def test_absorbing_garbling(self):
        b = compose([[0.5, 0.5], [0.5, 0.5]], random_experiment(np.random.default_rng(3)))
        assert_allclose(b.a[:, 0], b.a[:, 1])

    def test_noise_channel_product(self):
        eps, p = 1 / 100, 1 / 4
        sigma = np.array([[eps * p - eps + 1, eps * p], [eps - eps * p, 1 - eps * p]])
        x, y = 0.7, 0.2
        X = np.array([[x, y], [1 - x, 1 - y]])
        b = compose(sigma, X)
        expected = np.array(
            [
                [x * (eps * p - eps + 1) - eps * p * (x - 1), y * (eps * p - eps + 1) - eps * p * (y - 1)],
                [(eps * p - 1) * (x - 1) + x * (eps - eps * p), (eps * p - 1) * (y - 1) + y * (eps - eps * p)],
            ]
        )
        assert_allclose(b.a, expected, atol=1e-12)

    def test_composition_stays_column_stochastic(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            b = compose(random_garbling(rng), random_experiment(rng))
            assert_allclose(b.a.sum(axis=0), 1.0, atol=1e-12)


class TestPosteriors:
    def test_conviction_structure(self):
        b = [[4 / 7, 0], [3 / 7, 1]]
        assert posterior_after_signal(b, 0.3, 1) == pytest.approx(0.5, abs=1e-12)
        assert posterior_after_signal(b, 0.3, 0) == pytest.approx(0.0, abs=1e-12)

    def test_worked_garbling_posteriors(self):
        b = [[6 / 7, 3 / 7], [1 / 7, 4 / 7]]
        assert posterior_after_signal(b, 0.5, 0) == pytest.approx(1 / 3, abs=1e-12)
        assert posterior_after_signal(b, 0.5, 1) == pytest.approx(4 / 5, abs=1e-12)

    def test_zero_probability_signal(self):
        with pytest.raises(ZeroProbabilitySignal):
            posterior_after_signal([[0, 0], [1, 1]], 0.3, 0)


class TestInducedTau:
    def test_worked_garbling(self):
        tau = induced_tau([[6 / 7, 3 / 7], [1 / 7, 4 / 7]], 0.5)
        assert_allclose(tau.beliefs, [1 / 3, 4 / 5], atol=1e-12)
        assert_allclose(tau.probs, [9 / 14, 5 / 14], atol=1e-12)

    def test_uninformative_collapses_to_prior(self):
        for prior in (0.1, 0.42, 0.9):
            tau = induced_tau([[0.37, 0.37], [0.63, 0.63]], prior)
            assert tau.beliefs.size == 1
            assert tau.beliefs[0] == pytest.approx(prior, abs=1e-12)
            assert tau.probs.tolist() == [1.0]

    def test_asymmetric_noise_structure(self):
        # columns ordered target-state-first in the source, so swap them here
        b = np.array([[1 / 100, 1 / 2], [99 / 100, 1 / 2]])
        tau = induced_tau(b, 0.3)
        assert_allclose(tau.beliefs, [0.15 / 0.843, 0.15 / 0.157], atol=1e-9)
        assert_allclose(tau.probs, [0.843, 0.157], atol=1e-12)

    def test_zero_probability_signals_dropped(self):
        tau = induced_tau([[0, 0], [0.6, 1], [0.4, 0]], 0.5)
        assert tau.beliefs.size == 2

    def test_bayes_plausible_for_random_composites(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            prior = rng.uniform(0.05, 0.95)
            tau = induced_tau(
                compose(random_garbling(rng), random_experiment(rng)), prior
            )
            assert abs(float(tau.beliefs @ tau.probs) - prior) < 1e-9


class TestBayesPlausibleWeights:
    def test_conviction_weights(self):
        assert bayes_plausible_weights(0.0, 0.5, 0.3) == pytest.approx((0.4, 0.6))

    def test_degenerate_convention(self):
        assert bayes_plausible_weights(0.4, 0.4, 0.4) == (0.5, 0.5)

    def test_worked_weights(self):
        p1, p2 = bayes_plausible_weights(1 / 3, 4 / 5, 0.5)
        assert (p1, p2) == pytest.approx((9 / 14, 5 / 14), abs=1e-12)

    def test_prior_outside_support(self):
        with pytest.raises(PriorOutsideSupport):
            bayes_plausible_weights(0.5, 0.8, 0.3)

    @given(
        b1=st.floats(0, 1),
        b2=st.floats(0, 1),
        lam=st.floats(0.0, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_weights_recover_prior(self, b1, b2, lam):
        lo, hi = sorted((b1, b2))
        prior = lo + lam * (hi - lo)
        p1, p2 = bayes_plausible_weights(lo, hi, prior)
        assert abs(p1 + p2 - 1.0) < 1e-12
        assert abs(p1 * lo + p2 * hi - prior) < 1e-9


class TestMeanPreservingSpread:
    def test_worked_pair(self):
        mp = BeliefDistribution.from_atoms([(1 / 3, 9 / 14), (4 / 5, 5 / 14)])
        bp = BeliefDistribution.from_atoms([(1 / 3, 0.5), (2 / 3, 0.5)])
        res = is_mps(mp, bp)
        assert res
        assert res.witness.shape == (2, 2)

    def test_reflexive_with_identity_witness(self):
        tau = BeliefDistribution.from_atoms([(0.2, 0.5), (0.6, 0.5)])
        res = is_mps(tau, tau)
        assert res
        assert_allclose(res.witness, np.eye(2), atol=1e-12)

    def test_reverse_direction_fails(self):
        mp = BeliefDistribution.from_atoms([(1 / 3, 9 / 14), (4 / 5, 5 / 14)])
        bp = BeliefDistribution.from_atoms([(1 / 3, 0.5), (2 / 3, 0.5)])
        assert not is_mps(bp, mp)

    def test_barycenter_mismatch(self):
        a = BeliefDistribution.from_atoms([(0.2, 0.5), (0.6, 0.5)])
        b = BeliefDistribution.from_atoms([(0.1, 0.5), (0.3, 0.5)])
        with pytest.raises(BarycenterMismatch):
            is_mps(a, b)

    def test_point_mass_always_dominated(self):
        spread = BeliefDistribution.from_atoms([(0.1, 0.75), (0.9, 0.25)])
        point = BeliefDistribution.from_atoms([(0.3, 1.0)])
        assert is_mps(spread, point)
        assert not is_mps(point, spread)

    def test_garbling_contracts_beliefs(self):
        # composing with any garbling yields a mean-preserving contraction
        rng = np.random.default_rng(23)
        for _ in range(1000):
            prior = rng.uniform(0.05, 0.95)
            sigma = random_garbling(rng, lo=0.0, hi=1.0, min_det=0.0)
            x = random_experiment(rng)
            res = is_mps(induced_tau(x, prior), induced_tau(compose(sigma, x), prior))
            assert res

    def test_three_point_supports_via_linear_program(self):
        spread = BeliefDistribution.from_atoms([(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)])
        mid = BeliefDistribution.from_atoms([(0.2, 0.35), (0.5, 0.3), (0.8, 0.35)])
        res = is_mps(spread, mid)
        assert res
        T = res.witness
        assert T.min() >= -1e-9
        assert_allclose(T.sum(axis=0), 1.0, atol=1e-9)
        assert_allclose(T @ mid.probs, spread.probs, atol=1e-9)
        assert_allclose(spread.beliefs @ T, mid.beliefs, atol=1e-9)
        assert not is_mps(mid, spread)

    def test_witness_satisfies_both_conditions(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            prior = rng.uniform(0.1, 0.9)
            x = random_experiment(rng)
            sigma = random_garbling(rng)
            spread = induced_tau(x, prior)
            contracted = induced_tau(compose(sigma, x), prior)
            res = is_mps(spread, contracted)
            assert res
            T = res.witness
            assert T.min() >= -1e-9
            assert_allclose(T.sum(axis=0), 1.0, atol=1e-9)
            assert_allclose(T @ contracted.probs, spread.probs, atol=1e-9)
            assert_allclose(spread.beliefs @ T, contracted.beliefs, atol=1e-9)


class TestBlackwellCompare:
    def test_ranked_pair(self):
        s1, s2 = RANKED_PAIR
        res = blackwell_compare(s1, s2)
        assert res.order is BlackwellOrder.DOMINATES
        expected = np.array([[0.635, 0.21833], [0.255, 0.67167]]) / 0.89
        assert_allclose(res.to_second, expected, atol=1e-4)
        assert_allclose(res.to_second @ s1, s2, atol=1e-9)
        assert_allclose(res.to_second.sum(axis=0), 1.0, atol=1e-9)

    def test_unranked_pair(self):
        s1, s2 = UNRANKED_PAIR
        assert blackwell_compare(s1, s2).order is BlackwellOrder.UNRANKED

    def test_self_equivalent_with_identity(self):
        s = np.array([[0.7, 0.2], [0.3, 0.8]])
        res = blackwell_compare(s, s)
        assert res.order is BlackwellOrder.EQUIVALENT
        assert_allclose(res.to_second, np.eye(2), atol=1e-9)

    def test_reflexive_on_random_structures(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            s = random_garbling(rng)
            assert blackwell_compare(s, s).order is BlackwellOrder.EQUIVALENT

    def test_transitive_on_garbled_chains(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            top = random_garbling(rng)
            mid = compose(random_garbling(rng), top).a
            bot = compose(random_garbling(rng), mid).a
            assert blackwell_compare(top, mid).order in (
                BlackwellOrder.DOMINATES,
                BlackwellOrder.EQUIVALENT,
            )
            assert blackwell_compare(mid, bot).order in (
                BlackwellOrder.DOMINATES,
                BlackwellOrder.EQUIVALENT,
            )
            assert blackwell_compare(top, bot).order in (
                BlackwellOrder.DOMINATES,
                BlackwellOrder.EQUIVALENT,
            )

    def test_witness_is_valid_garbling(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            s1 = random_garbling(rng)
            s2 = compose(random_garbling(rng), s1).a
            res = blackwell_compare(s1, s2)
            assert res.to_second is not None
            assert np.abs(res.to_second @ s1 - s2).max() < 1e-9
            assert_allclose(res.to_second.sum(axis=0), 1.0, atol=1e-9)
            assert res.to_second.min() >= 0.0

    def test_closed_form_agrees_with_feasibility_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            s1 = random_garbling(rng, lo=0.02, hi=0.98, min_det=0.02)
            s2 = (
                compose(random_garbling(rng), s1).a
                if rng.uniform() < 0.5
                else random_garbling(rng, lo=0.02, hi=0.98, min_det=0.02)
            )
            closed = _garbling_closed_form(s1, s2)
            lp = _garbling_lp(s1, s2)
            assert (closed is None) == (lp is None)


class TestGarblingRank:
    def test_identical_columns_deficient(self):
        res = garbling_rank([[0.5, 0.5], [0.5, 0.5]])
        assert not res.full_rank and res.rank == 1

    def test_worked_garbling_full_rank(self):
        assert garbling_rank([[2 / 3, 1 / 4], [1 / 3, 3 / 4]]).full_rank

    def test_identity_full_rank(self):
        assert garbling_rank(np.eye(2)).full_rank

    def test_three_signal_structure(self):
        s3 = [[1 / 3, 1 / 9, 2 / 3], [1 / 3, 4 / 9, 1 / 3], [1 / 3, 4 / 9, 0]]
        assert garbling_rank(s3).full_rank


class TestBeliefDistribution:
    def test_merges_duplicates(self):
        tau = BeliefDistribution.from_atoms([(0.3, 0.5), (0.3, 0.2), (0.7, 0.3)])
        assert tau.beliefs.size == 2
        assert tau.probs[0] == pytest.approx(0.7)

    def test_rejects_wrong_barycenter(self):
        with pytest.raises(BarycenterMismatch):
            BeliefDistribution(np.array([0.2, 0.8]), np.array([0.5, 0.5]), prior=0.3)

    def test_drops_zero_probability_atoms(self):
        tau = BeliefDistribution.from_atoms([(0.1, 0.0), (0.4, 1.0)])
        assert tau.beliefs.tolist() == [0.4]
