# coding=utf-8
"""Tests for the analytic bounds."""
import math
import unittest

from hypothesis import given, settings, strategies as st
import numpy as np

from magic_blind.app.bounds import DELTA_CONVENTION, LATTICE_RESOLUTION, SIDE, BoundParams, \
    binom_lower_tail, binom_upper_tail, eps_cor, eps_of_phi, eps_rob, hypergeom_tail, nu_of_phi, \
    security_error
from magic_blind.app.exceptions import ContractError


class BoundParamsTestCase(unittest.TestCase):
    """Validation and the derived margins."""

    def test_alpha(self):
        """α is 1/2 for an exact computation and shrinks with c."""
        self.assertEqual(BoundParams(10, 10, 0, 1).alpha, 0.5)
        self.assertAlmostEqual(BoundParams(10, 10, 0, 1, c=0.25).alpha, 1 / 3)

    def test_delta_conventions(self):
        """Both readings of Δ are available and differ once w and k are positive."""
        wide = BoundParams(10, 10, 1, 2)
        split = BoundParams(10, 10, 1, 2, delta_convention=DELTA_CONVENTION.SPLIT)
        self.assertAlmostEqual(wide.delta, 0.3)
        self.assertAlmostEqual(split.delta, 0.45)
        item9 = BoundParams(10, 10, 1, 2, delta_convention=DELTA_CONVENTION.ITEM9)
        self.assertEqual(item9.delta, split.delta)
        self.assertEqual(BoundParams(10, 10, 0, 3).delta, 0.5)

    def test_invalid(self):
        """Out-of-range parameters are rejected at construction."""
        for kwargs in (dict(d=0, s=10, w=0, k=1),
                       dict(d=10, s=10, w=11, k=1),
                       dict(d=10, s=10, w=0, k=0),
                       dict(d=10, s=10, w=0, k=1, c=0.5),
                       dict(d=10, s=10, w=0, k=1, p_err=1.5),
                       dict(d=10, s=10, w=0, k=1, delta_convention='bogus')):
            with self.subTest(kwargs=kwargs), self.assertRaises(ContractError):
                BoundParams(**kwargs)


class TailTestCase(unittest.TestCase):
    """Hoeffding tails."""

    def test_binom_upper_tail(self):
        """Far into the tail the bound is exp(−32)."""
        self.assertAlmostEqual(binom_upper_tail(100, 0.1, 50), math.exp(-32), delta=1e-20)
        self.assertAlmostEqual(binom_upper_tail(100, 0.1, 50), 1.2664e-14, delta=1e-17)

    def test_at_the_mean(self):
        """At k = np both tails are the trivial bound 1."""
        self.assertEqual(binom_upper_tail(10, 0.5, 5), 1.0)
        self.assertEqual(binom_lower_tail(10, 0.5, 5), 1.0)

    def test_doubling(self):
        """Doubling n and k squares the bound."""
        single = binom_upper_tail(100, 0.1, 20)
        double = binom_upper_tail(200, 0.1, 40)
        self.assertAlmostEqual(double, single ** 2)
        self.assertAlmostEqual(binom_lower_tail(200, 0.3, 40), binom_lower_tail(100, 0.3, 20) ** 2)

    def test_wrong_side(self):
        """A threshold on the wrong side of the mean is a contract violation."""
        with self.assertRaises(ContractError):
            binom_upper_tail(100, 0.5, 10)
        with self.assertRaises(ContractError):
            binom_lower_tail(100, 0.1, 50)

    @given(st.integers(1, 500), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_bounds_are_probabilities(self, n, p, q):
        """Either tail is a probability for any admissible threshold."""
        k = n * max(p, q)
        value = binom_upper_tail(n, p, k) if k >= n * p else 1.0
        self.assertGreaterEqual(value, 0.0)
        self.assertLessEqual(value, 1.0)

    def test_hypergeom_tail(self):
        """Drawing 20 of 100 at slack 0.2 gives exp(−1.6) on either side."""
        for side in (SIDE.UPPER, SIDE.LOWER):
            with self.subTest(side=side):
                self.assertAlmostEqual(hypergeom_tail(100, 50, 20, 0.2, side), math.exp(-1.6))
                self.assertAlmostEqual(hypergeom_tail(100, 50, 20, 0.2, side), 0.2019, places=4)
        self.assertEqual(hypergeom_tail(100, 50, 20, 0.0), 1.0)

    def test_hypergeom_errors(self):
        """Negative slack, slack leaving [0, 1] and unknown sides are rejected."""
        with self.assertRaises(ContractError):
            hypergeom_tail(100, 50, 20, -0.1)
        with self.assertRaises(ContractError):
            hypergeom_tail(100, 90, 20, 0.2, SIDE.UPPER)
        with self.assertRaises(ContractError):
            hypergeom_tail(100, 10, 20, 0.2, SIDE.LOWER)
        with self.assertRaises(ContractError):
            hypergeom_tail(100, 50, 20, 0.1, 'middle')
        with self.assertRaises(ContractError):
            hypergeom_tail(100, 150, 20, 0.1)


class ErrorTermsTestCase(unittest.TestCase):
    """Correctness and robustness errors."""

    def test_eps_cor(self):
        """A 10% error over 100 rounds gives exp(−32); a single exact round exp(−1/2)."""
        self.assertAlmostEqual(eps_cor(100, 0.1), math.exp(-32), delta=1e-20)
        self.assertAlmostEqual(eps_cor(1, 0.0), 0.6065, places=4)
        with self.assertRaises(ContractError):
            eps_cor(10, 0.5)

    def test_eps_rob(self):
        """
        Robustness errors.

        Do the following:

        1. Bound the reject probability at s=100, w=10, p_err=0.05.
        2. Assert it is exp(−1/2).
        3. Assert the wrong-output bound matches the majority tail at c + p_err.

        """
        reject, wrong = eps_rob(100, 100, 10, 0.0, 0.05)
        self.assertAlmostEqual(reject, math.exp(-0.5))
        self.assertAlmostEqual(wrong, math.exp(-2 * 100 * 0.45 ** 2))

    def test_eps_rob_needs_slack(self):
        """Noise at or above w/s, or c + p_err at 1/2, leaves no robustness."""
        with self.assertRaises(ContractError):
            eps_rob(100, 100, 10, 0.0, 0.1)
        with self.assertRaises(ContractError):
            eps_rob(100, 100, 60, 0.25, 0.25)


class PhiTestCase(unittest.TestCase):
    """ε(φ) and ν(φ)."""

    params = BoundParams(d=200, s=200, w=2, k=2, c=0.0)

    def test_eps_at_delta(self):
        """At φ = Δ only χ = 0 is feasible and ε is vacuous."""
        delta = self.params.delta
        self.assertEqual(eps_of_phi(self.params, delta, [0.0, 0.1, 0.2]), 1.0)

    def test_eps_inside(self):
        """Halfway into the margin ε is a real bound."""
        delta = self.params.delta
        grid = np.linspace(0, self.params.alpha, 65)
        self.assertLess(eps_of_phi(self.params, delta / 2, grid), 1.0)

    def test_refinement(self):
        """Refining the χ grid never increases ε or ν."""
        delta = self.params.delta
        fine = np.linspace(0, self.params.alpha, 129)
        coarse = fine[::4]
        self.assertLessEqual(eps_of_phi(self.params, delta / 2, fine),
                             eps_of_phi(self.params, delta / 2, coarse))
        self.assertLessEqual(nu_of_phi(self.params, delta / 2, fine),
                             nu_of_phi(self.params, delta / 2, coarse))

    def test_eps_errors(self):
        """φ outside [0, Δ] and grids with no feasible χ are rejected."""
        with self.assertRaises(ContractError):
            eps_of_phi(self.params, self.params.delta + 0.1, [0.0])
        with self.assertRaises(ContractError):
            eps_of_phi(self.params, 0.0, [self.params.delta + 0.1])
        with self.assertRaises(ContractError):
            nu_of_phi(self.params, 0.1, [0.2])

    def test_nu(self):
        """A single χ = 0.1 at φ = 0.2 gives exp(−2) + exp(−10/3)."""
        params = BoundParams(100, 100, 0, 1, 0.0)
        expected = math.exp(-2) + math.exp(-10 / 3)
        self.assertAlmostEqual(nu_of_phi(params, 0.2, [0.1]), expected)
        self.assertAlmostEqual(nu_of_phi(params, 0.2, [0.1]), 0.1710, places=4)

    def test_nu_at_zero(self):
        """At φ = 0 only χ = 0 is feasible and ν is vacuous."""
        self.assertEqual(nu_of_phi(BoundParams(100, 100, 0, 1), 0.0, [0.0, 0.1]), 1.0)

    def test_nu_decreases_in_d(self):
        """More computation rounds tighten ν."""
        small = nu_of_phi(BoundParams(100, 100, 0, 1), 0.2, [0.1])
        large = nu_of_phi(BoundParams(400, 100, 0, 1), 0.2, [0.1])
        self.assertLess(large, small)


class SecurityErrorTestCase(unittest.TestCase):
    """The security error p_d."""

    def test_vacuous(self):
        """Without a margin the bound is 1 and flagged vacuous."""
        breakdown = security_error(BoundParams(10, 10, 5, 2))
        self.assertLessEqual(breakdown.delta, 0)
        self.assertTrue(breakdown.vacuous)
        self.assertEqual(breakdown.p_d, 1.0)

    def test_closed_form(self):
        """
        The closed-form point bounds the optimum.

        Do the following:

        1. Compute p_d for c=0, k=2, d=s=500, w=5.
        2. Assert the first ε term at χ = Δ/4 is exp(−2(Δ/4)²·s).
        3. Assert the grid optimum is no worse than the closed form.

        """
        params = BoundParams(500, 500, 5, 2)
        breakdown = security_error(params)
        delta = params.delta
        self.assertFalse(breakdown.vacuous)
        self.assertAlmostEqual(breakdown.delta, 0.48)
        expected = math.exp(-2 * (delta / 4) ** 2 * 500)
        self.assertLessEqual(breakdown.closed_terms['eps_hypergeom'], expected * (1 + 1e-12))
        self.assertLessEqual(breakdown.p_d, breakdown.p_closed)
        self.assertLessEqual(breakdown.p_d, max(breakdown.eps_phi, breakdown.nu_phi) + 1e-300)
        self.assertAlmostEqual(breakdown.m0_over_N, breakdown.alpha - breakdown.phi)
        self.assertEqual(set(breakdown.as_dict()['closed_terms']),
                         {'eps_hypergeom', 'eps_binom', 'nu_hypergeom', 'nu_binom'})

    def test_bits_scale_linearly(self):
        """Scaling d, s and w together grows −log₂ p_d linearly."""
        scales = np.array([1, 2, 4, 8])
        bits = np.array([security_error(BoundParams(200 * lam, 200 * lam, lam, 2)).neg_log2_p_d
                         for lam in scales])
        slope, _intercept = np.polyfit(scales, bits, 1)
        self.assertGreater(bits[0], 0)
        self.assertGreaterEqual(slope, 0.9 * bits[0])
        self.assertTrue(np.all(np.diff(bits) > 0))

    def test_monotone_in_d(self):
        """More computation rounds never loosen the bound."""
        values = [security_error(BoundParams(d, 200, 2, 2)).p_d for d in (50, 100, 200, 400)]
        for looser, tighter in zip(values, values[1:]):
            self.assertLessEqual(tighter, looser)

    def test_monotone_in_s(self):
        """With w = 0 the margin is fixed and more test rounds never loosen the bound."""
        values = [security_error(BoundParams(200, s, 0, 2)).p_d for s in (50, 100, 200, 400)]
        for looser, tighter in zip(values, values[1:]):
            self.assertLessEqual(tighter, looser)

    def test_split_convention(self):
        """The split reading keeps the convention on the breakdown."""
        params = BoundParams(200, 200, 20, 2, delta_convention=DELTA_CONVENTION.SPLIT)
        breakdown = security_error(params)
        self.assertEqual(breakdown.delta_convention, DELTA_CONVENTION.SPLIT)
        self.assertAlmostEqual(breakdown.delta, 0.5 - 20 / 400)
        self.assertFalse(security_error(BoundParams(200, 200, 20, 2)).vacuous)

    def test_phi_grid(self):
        """
        A given φ grid is searched, refined and never does worse than its own points.

        Do the following:

        1. Compute p_d for d=s=500, w=5, k=2 over nine evenly spaced φ values in [0, Δ].
        2. Evaluate max(ε(φ), ν(φ)) at each of those φ on the same χ grid.
        3. Assert p_d is at most the best of them and the minimizing φ lies in [0, Δ].

        """
        params = BoundParams(500, 500, 5, 2)
        delta = params.delta
        grid = np.linspace(0, delta, 9)
        breakdown = security_error(params, grid)
        chis = list(params.alpha * np.arange(LATTICE_RESOLUTION + 1) / LATTICE_RESOLUTION)
        chis.append(delta / 4)
        coarse = min(max(eps_of_phi(params, phi, chis), nu_of_phi(params, phi, chis))
                     for phi in grid)
        self.assertLessEqual(breakdown.p_d, coarse * (1 + 1e-9))
        self.assertLessEqual(breakdown.p_d, breakdown.p_closed)
        self.assertTrue(0 <= breakdown.phi <= delta)

    def test_phi_grid_resolution(self):
        """A coarser χ grid is accepted and still bounded by the closed form."""
        params = BoundParams(500, 500, 5, 2)
        breakdown = security_error(params, [params.delta / 2], chi_grid_resolution=16)
        self.assertLessEqual(breakdown.p_d, breakdown.p_closed)

    def test_phi_grid_out_of_range(self):
        """φ grids outside [0, Δ], empty grids and bad resolutions are rejected."""
        params = BoundParams(500, 500, 5, 2)
        for kwargs in (dict(phi_grid=[0.1, params.delta + 0.01]),
                       dict(phi_grid=[-0.01, 0.1]),
                       dict(phi_grid=[]),
                       dict(chi_grid_resolution=0)):
            with self.subTest(kwargs=kwargs), self.assertRaises(ContractError):
                security_error(params, **kwargs)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 300), st.integers(1, 300), st.integers(0, 3), st.integers(1, 4),
           st.floats(0.0, 0.4))
    def test_is_probability(self, d, s, w, k, c):
        """p_d always lies in (0, 1] and never exceeds the closed form."""
        breakdown = security_error(BoundParams(d, s, min(w, s), k, c))
        self.assertGreaterEqual(breakdown.p_d, 0.0)
        self.assertLessEqual(breakdown.p_d, 1.0)
        self.assertLessEqual(breakdown.p_d, breakdown.p_closed)
