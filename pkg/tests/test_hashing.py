"""Tests for hashing yields, thresholds, and finite-size bounds."""

import math

import numpy as np
import pytest

from quditpure.hashing import (
    HashingReport,
    asymptotic_yield,
    entropy_based,
    finite_size_report,
    isotropic_entropy,
    lemma1_montecarlo,
    min_fidelity,
    noisy_thresholds,
    resolve_delta,
    universal_threshold,
)
from quditpure.indices import primes_in
from quditpure.states import StatePreset, make_preset


def iso(d, F):
    return make_preset(StatePreset("isotropic", F), d)


class TestEntropy:
    def test_isotropic_anchor(self):
        assert isotropic_entropy(2, 0.81) == pytest.approx(
            1.002614335020917, abs=1e-14
        )

    def test_pure_state_zero(self):
        assert isotropic_entropy(3, 1.0) == 0.0
        assert entropy_based(iso(3, 1.0)) == 0.0

    def test_maximally_mixed_two(self):
        for d in (2, 3, 5):
            assert isotropic_entropy(d, 1 / d**2) == pytest.approx(2.0, abs=1e-12)

    def test_matrix_and_scalar_routes_agree(self):
        for d in (2, 5, 11):
            for F in (0.3, 0.77, 0.99):
                assert entropy_based(iso(d, F)) == pytest.approx(
                    isotropic_entropy(d, F), abs=1e-13
                )

    def test_scalar_route_handles_huge_d(self):
        assert 0.0 < isotropic_entropy(9973, 0.9) < 2.0

    def test_rejects_bad_fidelity(self):
        with pytest.raises(ValueError):
            isotropic_entropy(3, 1.5)


class TestAsymptoticYield:
    def test_anchor_d2(self):
        assert asymptotic_yield(iso(2, 0.9)) == pytest.approx(
            0.37250815633860324, abs=1e-12
        )

    def test_increasing_in_d_at_fixed_fidelity(self):
        values = [asymptotic_yield(iso(d, 0.9)) for d in (2, 3, 5, 7, 11)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_clamped_at_zero(self):
        assert asymptotic_yield(iso(2, 0.6)) == 0.0

    def test_pure_yield_one(self):
        assert asymptotic_yield(iso(5, 1.0)) == 1.0

    def test_requires_prime(self):
        with pytest.raises(ValueError):
            asymptotic_yield(iso(4, 0.9))


class TestMinFidelity:
    def test_anchor_d2(self):
        assert min_fidelity(2) == pytest.approx(0.8107103753136473, abs=1e-8)

    def test_entropy_is_one_at_root(self):
        for d in (2, 3, 13):
            assert isotropic_entropy(d, min_fidelity(d)) == pytest.approx(
                1.0, abs=1e-7
            )

    def test_monotone_decreasing_over_primes(self):
        values = [min_fidelity(d) for d in primes_in(2, 101)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_all_above_one_half(self):
        for d in primes_in(2, 101):
            assert min_fidelity(d) > 0.5
        assert min_fidelity(1009) == pytest.approx(0.5497482375880016, abs=1e-8)

    def test_requires_prime(self):
        with pytest.raises(ValueError):
            min_fidelity(9)


class TestNoisyThresholds:
    def test_anchor_d2(self):
        p_min, q_min = noisy_thresholds(2)
        assert p_min == pytest.approx(0.8646466525416783, abs=1e-8)
        assert q_min == pytest.approx(0.9298637817130412, abs=1e-8)

    def test_anchor_d11(self):
        p_min, q_min = noisy_thresholds(11)
        assert p_min == pytest.approx(0.7956437900009842, abs=1e-8)
        assert q_min == pytest.approx(0.8919886714532781, abs=1e-8)

    def test_anchor_d9973(self):
        _, q_min = noisy_thresholds(9973)
        assert q_min == pytest.approx(0.8562330693877767, abs=1e-8)

    def test_consistency_identity(self):
        """p_min must reproduce min_fidelity through the channel formula
        F = p**2 + (1 - p**2)/d**2, and q_min**2 must equal p_min."""
        for d in (2, 3, 11, 101):
            F_min = min_fidelity(d)
            p_min, q_min = noisy_thresholds(d)
            assert p_min**2 + (1 - p_min**2) / d**2 == pytest.approx(F_min, abs=1e-12)
            assert q_min**2 == pytest.approx(p_min, abs=1e-12)

    def test_above_universal_threshold(self):
        """Hashing tolerates less noise than the entanglement limit."""
        for d in (2, 5, 23):
            _, q_min = noisy_thresholds(d)
            assert q_min > universal_threshold(d)

    def test_requires_prime(self):
        with pytest.raises(ValueError):
            noisy_thresholds(6)


class TestUniversalThreshold:
    def test_exact_d2(self):
        assert universal_threshold(2) == 3.0**-0.25

    def test_closed_form(self):
        for d in (3, 7, 100):
            assert universal_threshold(d) == pytest.approx(
                (d + 1.0) ** -0.25, abs=1e-14
            )

    def test_approaches_d_power_law(self):
        d = 10**6
        ratio = universal_threshold(d) / d**-0.25
        assert abs(ratio - 1.0) < 0.01

    def test_decreasing_in_d(self):
        values = [universal_threshold(d) for d in range(2, 50)]
        assert all(b < a for a, b in zip(values, values[1:]))


class TestResolveDelta:
    def test_fixed_number_and_string(self):
        assert resolve_delta(0.05, 100, 0.5) == 0.05
        assert resolve_delta("fixed:0.05", 100, 0.5) == 0.05

    def test_npow(self):
        assert resolve_delta("npow:-0.25", 16, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_n_to_1(self):
        assert resolve_delta("n_to_1", 10, 0.4) == pytest.approx(0.25, abs=1e-15)

    def test_rejects_bad_policies(self):
        with pytest.raises(ValueError):
            resolve_delta(-0.1, 10, 0.5)
        with pytest.raises(ValueError):
            resolve_delta("npow:0.5", 10, 0.5)
        with pytest.raises(ValueError):
            resolve_delta("bogus", 10, 0.5)
        with pytest.raises(ValueError):
            resolve_delta(None, 10, 0.5)


class TestFiniteSizeReport:
    def test_yield_crossing_near_n_43(self):
        """d=5, F=0.99, delta = n**(-1/5): the first block size with a
        positive distillable fraction is n = 43."""
        assert finite_size_report(5, 42, 0.99, "npow:-0.2").yield_ == 0.0
        report = finite_size_report(5, 43, 0.99, "npow:-0.2")
        assert report.yield_ > 0.0
        assert report.yield_ == pytest.approx(0.00283868173688151, abs=1e-10)

    def test_structural_identities(self):
        report = finite_size_report(3, 500, 0.97, 0.02)
        assert report.r == math.ceil(500 * (report.S + 2 * 0.02) - 1e-12)
        assert report.p2 == pytest.approx(3.0 ** (-500 * 0.02), abs=1e-15)
        assert report.yield_raw == pytest.approx(1 - report.S - 2 * 0.02, abs=1e-14)
        assert report.F_out_raw == pytest.approx(
            1 - report.p1_bound - report.p2, abs=1e-14
        )

    def test_p2_spot_check(self):
        assert finite_size_report(2, 100, 0.95, 0.1).p2 == 2.0**-10

    def test_pure_input_edge(self):
        """At F=1 the block is never atypical, so only collisions hurt."""
        report = finite_size_report(3, 50, 1.0, 0.05)
        assert report.p1_bound == 0.0
        assert report.F_out_bound == pytest.approx(1.0 - report.p2, abs=1e-14)

    def test_n_to_1_feasible(self):
        report = finite_size_report(2, 10, 0.95, "n_to_1")
        assert report.feasible
        assert report.delta == pytest.approx(0.2671774589239929, abs=1e-12)
        assert report.yield_ == pytest.approx(0.1, abs=1e-12)
        assert report.r == 9

    def test_n_to_1_infeasible(self):
        report = finite_size_report(2, 10, 0.7, "n_to_1")
        assert not report.feasible
        assert report.delta < 0.0
        assert report.yield_ == 0.0
        assert report.p1_bound == 1.0 and report.p2 == 1.0

    def test_f_out_monotone_in_n(self):
        bounds = [
            finite_size_report(5, n, 0.99, "npow:-0.2").F_out_bound
            for n in (50, 100, 200, 400, 800)
        ]
        assert all(b >= a for a, b in zip(bounds, bounds[1:]))

    def test_finite_yield_approaches_asymptote(self):
        """The finite-size yield sits exactly 2*delta below the
        asymptotic one while positive, so the gap closes as n grows."""
        F = 0.99
        target = asymptotic_yield(iso(5, F))
        for n in (10**4, 10**6):
            report = finite_size_report(5, n, F, "npow:-0.25")
            assert target - report.yield_ == pytest.approx(
                2 * report.delta, abs=1e-12
            )

    def test_minimal_usable_fidelity_decreases_with_d(self):
        """Smallest F with positive yield at n=10**4, found by scanning:
        larger alphabets tolerate lower fidelity."""

        def minimal_F(d):
            for F in np.arange(1 / d**2 + 0.01, 1.0, 0.002):
                if finite_size_report(d, 10**4, float(F), "npow:-0.25").yield_ > 0:
                    return float(F)
            return 1.0

        values = [minimal_F(d) for d in (2, 3, 7)]
        assert values[0] > values[1] > values[2]
        assert values[0] == pytest.approx(0.862, abs=2e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            finite_size_report(4, 100, 0.9)  # composite d
        with pytest.raises(ValueError):
            finite_size_report(2, 1, 0.9)  # block too small
        with pytest.raises(ValueError):
            finite_size_report(2, 100, 0.2)  # at or below 1/d**2
        with pytest.raises(ValueError):
            finite_size_report(2, 100, 1.1)

    def test_report_is_frozen(self):
        report = finite_size_report(2, 100, 0.95, 0.1)
        assert isinstance(report, HashingReport)
        with pytest.raises(AttributeError):
            report.yield_ = 0.5


class TestLemma1MonteCarlo:
    @pytest.mark.parametrize("d", [2, 3, 5, 7])
    def test_collision_rate_matches_1_over_d(self, d):
        trials = 100_000
        rate = lemma1_montecarlo(d, 8, trials=trials, seed=0)
        sigma = math.sqrt((1 / d) * (1 - 1 / d) / trials)
        assert abs(rate - 1 / d) < 4 * sigma

    def test_deterministic_under_seed(self):
        a = lemma1_montecarlo(3, 8, trials=10_000, seed=7)
        b = lemma1_montecarlo(3, 8, trials=10_000, seed=7)
        assert a == b

    def test_rejects_small_trial_counts(self):
        with pytest.raises(ValueError):
            lemma1_montecarlo(2, 8, trials=100)

    def test_rejects_composite_d(self):
        with pytest.raises(ValueError):
            lemma1_montecarlo(4, 8)

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            lemma1_montecarlo(2, 0)
