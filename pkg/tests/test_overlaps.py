"""Overlap-system checks: the two maps, self-consistency of the solver against
an independent bracketing root-finder, the certainty special case, the
collapsed approximation, and the relative-change contraction."""

import math

import numpy as np
import pytest
from scipy import optimize

from uncertain_ssl.kernel import channel_overlap
from uncertain_ssl.overlaps import (
    ConvergenceError,
    EpsilonMixture,
    ProblemParams,
    qu_from_qv,
    qv_from_qu,
    sensitivity_ratio,
    solve_approx,
    solve_certainty,
    solve_overlaps,
)

LAM_GRID = (0.25, 1.0, 2.0, 4.0)
C_GRID = (0.5, 1.0, 5.0)
ETA_GRID = (0.0, 0.2, 0.5, 1.0)


def certainty_fixed_point_oracle(lam, c, eta):
    """Largest root of q_v = eta + (1 - eta) F(qu(q_v)), by bracketed bisection.

    Independent of the package's damped iteration: scans the defect for its
    rightmost sign change and hands the bracket to Brent's method.  With no
    labels and no sign change the only solution is the uninformative origin.
    """

    def defect(q_v):
        return q_v - (eta + (1.0 - eta) * channel_overlap(0.0, qu_from_qv(lam, c, q_v)))

    if defect(1.0) <= 0.0:
        return qu_from_qv(lam, c, 1.0), 1.0
    grid = np.linspace(1.0, 1e-9, 400)
    values = [defect(g) for g in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if fa > 0.0 and fb <= 0.0:
            root = optimize.brentq(defect, b, a, xtol=1e-15)
            return qu_from_qv(lam, c, root), root
    if eta > 0.0:
        root = optimize.brentq(defect, eta / 2.0, 1.0, xtol=1e-15)
        return qu_from_qv(lam, c, root), root
    return 0.0, 0.0


class TestEpsilonMixture:
    def test_weights_normalise_and_validate(self):
        mix = EpsilonMixture(atoms=((0.5, 0.4), (0.0, 0.6)))
        assert abs(sum(w for _, w in mix.atoms) - 1.0) <= 1e-15
        assert mix.eps_bar_sq == pytest.approx(0.1, abs=1e-15)
        with pytest.raises(ValueError):
            EpsilonMixture(atoms=((0.5, 0.4), (0.0, 0.4)))
        with pytest.raises(ValueError):
            EpsilonMixture(atoms=((1.5, 1.0),))

    def test_certainty_factory(self):
        mix = EpsilonMixture.certainty(0.2)
        assert mix.atoms == ((1.0, 0.2), (0.0, 0.8))
        assert mix.eps_bar_sq == pytest.approx(0.2, abs=1e-15)

    def test_from_samples(self):
        mix = EpsilonMixture.from_samples([0.5, 0.5, 0.0, -0.5])
        weights = dict((e, w) for e, w in mix.atoms)
        assert weights[0.5] == pytest.approx(0.5)
        assert weights[-0.5] == pytest.approx(0.25)
        assert mix.eps_bar_sq == pytest.approx(0.1875)


class TestFeatureOverlapMap:
    def test_no_signal_or_no_alignment(self):
        assert qu_from_qv(0.0, 2.0, 0.7) == 0.0
        assert qu_from_qv(1.5, 2.0, 0.0) == 0.0

    def test_unit_point(self):
        assert qu_from_qv(1.0, 1.0, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_strictly_increasing_and_bounded(self):
        lam, c = 1.7, 2.3
        q_v = np.linspace(0.0, 1.0, 51)
        values = [qu_from_qv(lam, c, q) for q in q_v]
        assert np.all(np.diff(values) > 0.0)
        assert all(0.0 <= v < lam for v in values)


class TestLabelOverlapMap:
    def test_all_certain_is_one(self):
        mix = EpsilonMixture.single(1.0)
        for q_u in (0.0, 0.3, 5.0):
            assert qv_from_qu(mix, q_u) == 1.0

    def test_all_unlabeled_at_zero(self):
        assert qv_from_qu(EpsilonMixture.single(0.0), 0.0) == 0.0

    def test_certainty_mixture_affine_identity(self):
        eta = 0.3
        mix = EpsilonMixture.certainty(eta)
        for q_u in (0.0, 0.4, 1.0, 3.0):
            expected = eta + (1.0 - eta) * channel_overlap(0.0, q_u)
            assert abs(qv_from_qu(mix, q_u) - expected) < 1e-12


class TestSolveOverlaps:
    def test_no_signal_forces_zero_feature_overlap(self):
        mix = EpsilonMixture(atoms=((0.6, 0.5), (0.0, 0.5)))
        solution = solve_overlaps(ProblemParams(lam=0.0, c=1.0, mixture=mix))
        assert solution.q_u == 0.0
        assert solution.q_v == pytest.approx(qv_from_qu(mix, 0.0), abs=1e-10)
        assert solution.q_v == pytest.approx(mix.eps_bar_sq, abs=1e-10)

    def test_pinned_label_overlap_closed_form(self):
        solution = solve_certainty(0.25, 5.0, 1.0)
        assert solution.q_v == pytest.approx(1.0, abs=1e-12)
        assert solution.q_u == pytest.approx(0.25 * 1.25 / 2.25, abs=1e-12)

    def test_self_consistency_residual(self):
        mix = EpsilonMixture(atoms=((1.0, 0.2), (0.0, 0.8)))
        params = ProblemParams(lam=1.0, c=1.0, mixture=mix)
        solution = solve_overlaps(params)
        assert solution.converged
        assert abs(solution.q_u - qu_from_qv(1.0, 1.0, solution.q_v)) < 1e-9
        assert abs(solution.q_v - qv_from_qu(mix, solution.q_u)) < 1e-9

    def test_residual_contract_on_grid(self):
        for lam in LAM_GRID:
            for c in C_GRID:
                for eta in ETA_GRID:
                    solution = solve_certainty(lam, c, eta, tol=1e-10)
                    assert solution.converged
                    assert solution.residual < 1e-10
                    # the label overlap can never fall below the mean
                    # squared confidence, and q_u stays below lam
                    assert solution.q_v >= eta - 1e-12
                    assert 0.0 <= solution.q_u <= lam

    def test_monotone_in_resources(self):
        lam_grid = (0.25, 0.5, 1.0, 2.0)
        c_grid = (0.5, 1.0, 2.0, 5.0)
        eta_grid = (0.0, 0.2, 0.5, 1.0)
        q_u = {
            (lam, c, eta): solve_certainty(lam, c, eta).q_u
            for lam in lam_grid
            for c in c_grid
            for eta in eta_grid
        }
        slack = 1e-11
        for lam_lo, lam_hi in zip(lam_grid[:-1], lam_grid[1:]):
            for c in c_grid:
                for eta in eta_grid:
                    assert q_u[(lam_hi, c, eta)] >= q_u[(lam_lo, c, eta)] - slack
        for lam in lam_grid:
            for c_lo, c_hi in zip(c_grid[:-1], c_grid[1:]):
                for eta in eta_grid:
                    assert q_u[(lam, c_hi, eta)] >= q_u[(lam, c_lo, eta)] - slack
        for lam in lam_grid:
            for c in c_grid:
                for eta_lo, eta_hi in zip(eta_grid[:-1], eta_grid[1:]):
                    assert q_u[(lam, c, eta_hi)] >= q_u[(lam, c, eta_lo)] - slack

    def test_non_convergence_carries_last_iterate(self):
        params = ProblemParams(lam=2.0, c=1.0, mixture=EpsilonMixture.certainty(0.2))
        with pytest.raises(ConvergenceError) as info:
            solve_overlaps(params, tol=1e-16, max_iter=2)
        assert info.value.last.iterations >= 1
        assert math.isfinite(info.value.last.q_v)


class TestSolveCertainty:
    def test_fully_labeled_closed_form(self):
        for lam in (0.5, 2.0):
            for c in (1.0, 3.0):
                solution = solve_certainty(lam, c, 1.0)
                assert solution.q_v == pytest.approx(1.0, abs=1e-12)
                assert solution.q_u == pytest.approx(
                    lam * lam * c / (1.0 + lam * c), abs=1e-12
                )

    def test_no_signal(self):
        assert solve_certainty(0.0, 2.0, 0.4).q_u == 0.0

    def test_matches_general_solver_on_two_atom_mixture(self):
        mix = EpsilonMixture(atoms=((1.0, 0.2), (0.0, 0.8)))
        general = solve_overlaps(ProblemParams(lam=2.0, c=1.0, mixture=mix))
        special = solve_certainty(2.0, 1.0, 0.2)
        assert abs(general.q_u - special.q_u) < 1e-9
        assert abs(general.q_v - special.q_v) < 1e-9

    def test_matches_independent_root_finder(self):
        q_u, q_v = certainty_fixed_point_oracle(2.0, 1.0, 0.2)
        solution = solve_certainty(2.0, 1.0, 0.2)
        assert abs(solution.q_u - q_u) < 1e-9
        assert abs(solution.q_v - q_v) < 1e-9


class TestSolveApprox:
    def test_exact_for_certainty_style_mixtures(self):
        mix = EpsilonMixture(atoms=((1.0, 0.3), (0.0, 0.7)))
        params = ProblemParams(lam=1.5, c=1.0, mixture=mix)
        exact = solve_overlaps(params)
        approx = solve_approx(params)
        assert abs(exact.q_u - approx.q_u) < 1e-10
        assert abs(exact.q_v - approx.q_v) < 1e-10

    def test_exact_for_all_unlabeled(self):
        params = ProblemParams(lam=1.0, c=5.0, mixture=EpsilonMixture.single(0.0))
        assert abs(solve_overlaps(params).q_u - solve_approx(params).q_u) < 1e-10

    def test_within_surrogate_budget_for_soft_labels(self):
        # The pointwise surrogate error (at most ~7.6% on the grid) amplifies
        # through the fixed point by 1/(1 - slope); at this worst point the
        # solved q_v gap is 8.69%, so the budget is 0.09, not the pointwise 0.08.
        params = ProblemParams(lam=1.0, c=1.0, mixture=EpsilonMixture.single(0.5))
        exact = solve_overlaps(params)
        approx = solve_approx(params)
        rel_v = abs(approx.q_v - exact.q_v) / exact.q_v
        rel_u = abs(approx.q_u - exact.q_u) / exact.q_u
        assert rel_v <= 0.09
        assert rel_u <= rel_v


class TestSensitivityRatio:
    def test_analytic_contraction_factor(self):
        rel_u, rel_v = sensitivity_ratio(1.0, 1.0, 1.0, 1e-6)
        assert abs(rel_u / rel_v - 0.5) < 1e-3

    def test_no_signal_means_no_response(self):
        rel_u, rel_v = sensitivity_ratio(0.0, 1.0, 0.5, 1e-3)
        assert rel_u == 0.0

    def test_zero_perturbation(self):
        assert sensitivity_ratio(1.0, 2.0, 0.5, 0.0) == (0.0, 0.0)

    def test_relative_contraction_on_grid(self):
        for lam in LAM_GRID:
            for c in C_GRID:
                for q_v in (0.2, 0.5, 0.8, 1.0):
                    for delta in (1e-6, 1e-3, 0.05):
                        rel_u, rel_v = sensitivity_ratio(lam, c, q_v, delta)
                        assert rel_u <= rel_v + 1e-15
