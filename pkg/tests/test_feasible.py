import numpy as np
import pytest
from numpy.testing import assert_allclose

from mediated_persuasion import (
    BeliefDistribution,
    NotSigmaPlausible,
    SingularGarbling,
    boundary_curves,
    brute_force_pairs,
    companion_intervals,
    compose,
    garbling_rank,
    induced_tau,
    member_pairs,
    membership,
    nesting_report,
    ordered_member,
    posterior_pair,
    reconstruct_experiment,
    sample_feasible_general,
    symmetry_report,
    wing_polygons,
)
from mediated_persuasion.feasible import UNINFORMATIVE_X, polygon_area

from conftest import RANKED_PAIR, UNRANKED_PAIR, random_experiment, random_garbling

SIGMA_STAR = np.array([[6 / 7, 3 / 7], [1 / 7, 4 / 7]])
SIGMA_BUTTERFLY = np.array([[2 / 3, 1 / 4], [1 / 3, 3 / 4]])
SIGMA_TRACE = np.array([[1 / 3, 1 / 7], [2 / 3, 6 / 7]])
SIGMA3 = np.array([[1 / 3, 1 / 9, 2 / 3], [1 / 3, 4 / 9, 1 / 3], [1 / 3, 4 / 9, 0]])


class TestBoundaryCurves:
    def test_identity_fully_revealing_endpoint(self):
        curves = boundary_curves(np.eye(2), 0.4, 33)
        q1, q2 = curves["X1"].points[0]  # p = 0 pins the revealing experiment
        assert (q1, q2) == pytest.approx((0.0, 1.0), abs=1e-12)

    def test_endpoints_match_direct_evaluation(self):
        curves = boundary_curves(SIGMA_TRACE, 0.5, 65)
        x1_0 = np.array([[1.0, 0.0], [0.0, 1.0]])
        x1_1 = np.array([[1.0, 1.0], [0.0, 0.0]])
        assert_allclose(
            curves["X1"].points[0], posterior_pair(SIGMA_TRACE @ x1_0, 0.5), atol=1e-12
        )
        assert_allclose(
            curves["X1"].points[-1], posterior_pair(SIGMA_TRACE @ x1_1, 0.5), atol=1e-12
        )

    def test_family_x4_at_one_is_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            sigma = random_garbling(rng)
            prior = rng.uniform(0.1, 0.9)
            curves = boundary_curves(sigma, prior, 17)
            assert_allclose(
                curves["X4"].points[-1], posterior_pair(sigma, prior), atol=1e-12
            )

    def test_parameters_strictly_increasing(self):
        curves = boundary_curves(SIGMA_BUTTERFLY, 0.3, 64)
        for c in curves.values():
            assert np.all(np.diff(c.params) > 0)

    def test_every_sample_passes_membership(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            sigma = random_garbling(rng)
            prior = rng.uniform(0.15, 0.85)
            for c in boundary_curves(sigma, prior, 64).values():
                lo = np.minimum(c.points[:, 0], c.points[:, 1])
                hi = np.maximum(c.points[:, 0], c.points[:, 1])
                assert member_pairs(sigma, prior, lo, hi).all()

    def test_singular_garbling_rejected(self):
        with pytest.raises(SingularGarbling):
            boundary_curves([[0.5, 0.5], [0.5, 0.5]], 0.3)


class TestReconstruction:
    def test_identity_recovers_worked_example(self):
        tau = BeliefDistribution.from_atoms([(1 / 3, 9 / 14), (4 / 5, 5 / 14)])
        x = reconstruct_experiment(SIGMA_STAR, 0.5, tau)
        assert_allclose(x, np.eye(2), atol=1e-9)

    def test_uninformative_target(self):
        tau = BeliefDistribution.from_atoms([(0.3, 1.0)])
        x = reconstruct_experiment(SIGMA_BUTTERFLY, 0.3, tau)
        assert_allclose(x, UNINFORMATIVE_X)

    def test_label_swapped_assignment(self):
        tau = BeliefDistribution.from_atoms([(1 / 5, 5 / 14), (2 / 3, 9 / 14)])
        x = reconstruct_experiment(SIGMA_STAR, 0.5, tau)
        assert_allclose(x, [[0, 1], [1, 0]], atol=1e-9)

    def test_far_pair_not_plausible(self):
        p1, p2 = (0.99 - 0.3) / 0.98, (0.3 - 0.01) / 0.98
        tau = BeliefDistribution.from_atoms([(0.01, p1), (0.99, p2)])
        with pytest.raises(NotSigmaPlausible):
            reconstruct_experiment(SIGMA_BUTTERFLY, 0.3, tau)
        # confirmed by brute force: no grid experiment comes close
        cloud = brute_force_pairs(SIGMA_BUTTERFLY, 0.3, step=0.01)
        d = np.abs(cloud - np.array([0.01, 0.99])).max(axis=1)
        d_swap = np.abs(cloud - np.array([0.99, 0.01])).max(axis=1)
        assert min(d.min(), d_swap.min()) > 0.05

    def test_round_trip_on_random_feasible_targets(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            sigma = random_garbling(rng)
            prior = rng.uniform(0.05, 0.95)
            tau = induced_tau(compose(sigma, random_experiment(rng)), prior)
            x = reconstruct_experiment(sigma, prior, tau)
            back = induced_tau(compose(sigma, x), prior)
            assert back.beliefs.size == tau.beliefs.size
            assert np.abs(back.beliefs - tau.beliefs).max() < 1e-9
            assert np.abs(back.probs - tau.probs).max() < 1e-9


class TestMembership:
    def test_prior_point_always_member(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            sigma = random_garbling(rng)
            prior = rng.uniform(0.1, 0.9)
            x = membership(sigma, prior, prior, prior)
            assert x is not None
            assert induced_tau(compose(sigma, x), prior).is_degenerate()

    def test_asymmetric_noise_pair_needs_identity(self):
        sigma = np.array([[1 / 100, 1 / 2], [99 / 100, 1 / 2]])
        x = membership(sigma, 0.3, 0.15 / 0.843, 0.15 / 0.157)
        assert x is not None
        assert_allclose(x, np.eye(2), atol=1e-9)

    def test_blackwell_inferior_pair_can_be_infeasible(self):
        # a contraction of the most informative point that no experiment
        # induces: the pair sits inside the tip's interval yet outside both
        # wings (confirmed against the brute-force cloud)
        assert membership(SIGMA_BUTTERFLY, 0.3, 0.15, 0.32) is None
        cloud = brute_force_pairs(SIGMA_BUTTERFLY, 0.3, step=0.01)
        d = np.abs(cloud - np.array([0.15, 0.32])).max(axis=1)
        d_swap = np.abs(cloud - np.array([0.32, 0.15])).max(axis=1)
        assert min(d.min(), d_swap.min()) > 0.03

    def test_not_bayes_plausible_rejected(self):
        assert membership(SIGMA_BUTTERFLY, 0.3, 0.4, 0.6) is None

    def test_oracle_agreement_away_from_boundaries(self):
        # label-free comparison: supports are canonicalized to sorted pairs
        from mediated_persuasion.feasible import point_to_polygon_distance

        rng = np.random.default_rng(41)
        for _ in range(20):
            sigma = random_garbling(rng, lo=0.15, hi=0.85, min_det=0.1)
            prior = rng.uniform(0.25, 0.75)
            cloud = np.sort(brute_force_pairs(sigma, prior, step=0.01), axis=1)
            fs = wing_polygons(sigma, prior, 256)
            test_pts = np.sort(
                np.column_stack([rng.uniform(0, 1, 300), rng.uniform(0, 1, 300)]),
                axis=1,
            )
            for lo, hi in test_pts:
                d_edge = min(
                    point_to_polygon_distance((lo, hi), fs.left),
                    point_to_polygon_distance((hi, lo), fs.right),
                )
                if d_edge <= 0.02:
                    continue
                exact = bool(member_pairs(sigma, prior, [lo], [hi])[0]) and (
                    lo <= prior <= hi
                )
                near_cloud = bool(
                    (np.abs(cloud - np.array([lo, hi])).max(axis=1) <= 0.02).any()
                )
                assert exact == near_cloud, (sigma, prior, (lo, hi))


class TestWingPolygons:
    def test_identity_garbling_gives_bayes_rectangle(self):
        fs = wing_polygons(np.eye(2), 0.3, 64)
        corners = {(round(a, 6), round(b, 6)) for a, b in fs.left}
        assert {(0.0, 0.3), (0.0, 1.0), (0.3, 1.0), (0.3, 0.3)} <= corners

    def test_butterfly_vertices_contain_perverse_tip(self):
        fs = wing_polygons(SIGMA_BUTTERFLY, 0.3, 256)
        verts = np.vstack([fs.left, fs.right])
        sorted_verts = np.sort(verts, axis=1)
        target = np.array([0.16, 0.53333333])
        assert np.abs(sorted_verts - target).max(axis=1).min() < 1e-3

    def test_wings_convex_and_contain_origin(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            sigma = random_garbling(rng)
            prior = rng.uniform(0.2, 0.8)
            fs = wing_polygons(sigma, prior, 128)
            origin = np.array([prior, prior])
            for wing in (fs.left, fs.right):
                if len(wing) < 3:
                    continue
                # convexity: all cross products one sign (CCW)
                v = np.roll(wing, -1, axis=0) - wing
                w = np.roll(wing, -2, axis=0) - np.roll(wing, -1, axis=0)
                cross = v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]
                assert (cross >= -1e-9).all()
                assert np.abs(wing - origin).max(axis=1).min() < 5e-3

    def test_all_vertices_pass_membership(self):
        fs = wing_polygons(SIGMA_BUTTERFLY, 0.3, 128)
        for q1, q2 in np.vstack([fs.left, fs.right]):
            lo, hi = min(q1, q2), max(q1, q2)
            assert member_pairs(SIGMA_BUTTERFLY, 0.3, [lo], [hi])[0]

    def test_near_singular_wings_collapse(self):
        eps = 1e-4
        sigma = np.array([[0.5 + eps, 0.5 - eps], [0.5 - eps, 0.5 + eps]])
        fs = wing_polygons(sigma, 0.4, 64)
        assert polygon_area(fs.left) < 1e-3
        assert np.abs(np.vstack([fs.left, fs.right]) - 0.4).max() < 0.01

    def test_bayes_plausibility_of_vertices(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            sigma = random_garbling(rng)
            prior = rng.uniform(0.2, 0.8)
            fs = wing_polygons(sigma, prior, 64)
            for q1, q2 in np.vstack([fs.left, fs.right]):
                assert min(q1, q2) <= prior + 1e-9 <= max(q1, q2) + 2e-9

    def test_midpoint_closure_within_wings(self):
        rng = np.random.default_rng(6)
        sigma = SIGMA_BUTTERFLY
        prior = 0.3
        pairs = []
        while len(pairs) < 50:
            x = random_experiment(rng)
            q1, q2 = posterior_pair(sigma @ x, prior)
            if q1 <= prior <= q2:  # natural wing only
                pairs.append((q1, q2))
        pairs = np.array(pairs)
        for _ in range(200):
            i, j = rng.integers(0, len(pairs), 2)
            mid = 0.5 * (pairs[i] + pairs[j])
            assert member_pairs(sigma, prior, [mid.min()], [mid.max()])[0]


class TestNesting:
    def test_ranked_pair_nested_with_witnesses(self):
        s1, s2 = RANKED_PAIR
        rep = nesting_report(s1, s2, 0.3, n_samples=1000, seed=0)
        assert rep.nested
        assert not rep.violations
        assert not rep.witness_failures

    def test_unranked_pair_violations_both_ways(self):
        s1, s2 = UNRANKED_PAIR
        rep_fwd = nesting_report(s1, s2, 0.3, n_samples=1000, seed=0)
        rep_rev = nesting_report(s2, s1, 0.3, n_samples=1000, seed=0)
        assert rep_fwd.violations
        assert rep_rev.violations

    def test_same_garbling_trivially_nested(self):
        rep = nesting_report(SIGMA_BUTTERFLY, SIGMA_BUTTERFLY, 0.3, n_samples=300, seed=1)
        assert rep.nested and not rep.witness_failures


class TestSymmetry:
    def test_symmetric_garbling(self):
        rep = symmetry_report([[2 / 3, 1 / 3], [1 / 3, 2 / 3]], 0.5, n_samples=1000, seed=0)
        assert rep.symmetric

    def test_asymmetric_garbling_has_witness(self):
        rep = symmetry_report(SIGMA_BUTTERFLY, 0.5, n_samples=1000, seed=0)
        assert not rep.symmetric
        assert rep.witness is not None

    def test_identity_symmetric(self):
        rep = symmetry_report(np.eye(2), 0.5, n_samples=500, seed=0)
        assert rep.symmetric


class TestGeneralSampler:
    def test_two_signal_grid_agrees_with_membership(self):
        sigma = SIGMA_BUTTERFLY
        cloud = sample_feasible_general(sigma, 0.3, 0.05)
        mask = (cloud.probs > 1e-9).all(axis=1)
        pts = cloud.posteriors[mask]
        lo = np.minimum(pts[:, 0], pts[:, 1])
        hi = np.maximum(pts[:, 0], pts[:, 1])
        assert member_pairs(sigma, 0.3, lo, hi).all()

    def test_three_signals_reach_below_prior(self):
        cloud = sample_feasible_general(SIGMA3, 0.3, 0.05)
        assert cloud.min_belief() < 0.3 - 1e-6

    def test_restricted_block_is_uninformative(self):
        sub = SIGMA3[np.ix_([1, 2], [0, 1])]
        sub = sub / sub.sum(axis=0, keepdims=True)
        assert not garbling_rank(sub).full_rank
        cloud = sample_feasible_general(sub, 0.3, 0.05)
        assert_allclose(cloud.attained_beliefs(), [0.3], atol=1e-9)

    def test_uninformative_square_collapses(self):
        sigma = np.full((3, 3), 1 / 3)
        cloud = sample_feasible_general(sigma, 0.4, 0.1)
        assert_allclose(cloud.attained_beliefs(), [0.4], atol=1e-9)


class TestCompanionIntervals:
    def test_three_step_slice_at_upper_cutoff(self):
        ivals = companion_intervals(SIGMA_STAR, 0.5, 2 / 3, False)
        (lo, hi), = ivals
        assert lo == pytest.approx(3 / 8, abs=1e-9)
        assert hi == pytest.approx(5 / 11, abs=1e-9)

    def test_slice_endpoints_feasible(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            sigma = random_garbling(rng)
            prior = rng.uniform(0.2, 0.8)
            c = rng.uniform(0.0, prior)
            for lo, hi in companion_intervals(sigma, prior, c, True):
                assert member_pairs(sigma, prior, [c, c], [lo, hi]).all()
