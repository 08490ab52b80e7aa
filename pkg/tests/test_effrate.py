"""Effective-rate tests: Jensen limits, strategy agreement, low/high-SNR
approximations, derivative formulas against finite differences, and the
power-coefficient search."""

import math
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest

from noma_effrate.channel import AlphaMuChannel, ChannelPair
from noma_effrate.effrate import (
    LN2,
    LOG2_E,
    DelayQos,
    NomaSystem,
    er_derivatives,
    er_high_snr,
    er_low_snr,
    er_noma,
    er_oma,
    ergodic_rate,
    min_energy_per_bit,
    noma_oma_gap,
    power_search,
    rate_loss,
    sum_er_noma,
    wideband_slope,
)
from noma_effrate.specfun import laguerre_expectation


def make_pair(alpha=2, mu=1, omega_s=1.0, omega_w2=0.1):
    return ChannelPair(
        AlphaMuChannel(alpha, mu, omega_s),
        AlphaMuChannel(alpha, mu, math.sqrt(omega_w2)),
    )


def make_system(alpha=2, mu=1, a_s=0.24, rho_db=10.0, theta=0.5, omega_w2=0.1, tb=1.0):
    return NomaSystem(
        make_pair(alpha, mu, 1.0, omega_w2),
        a_s,
        10.0 ** (rho_db / 10.0),
        DelayQos(theta, tb),
    )


class TestTypes:
    def test_nu_definition(self):
        qos = DelayQos(0.5, 2.0)
        assert qos.nu == pytest.approx(0.5 * 2.0 / LN2, rel=1e-14)

    def test_theta_zero_is_unconstrained(self):
        assert DelayQos(0.0).nu == 0.0

    def test_power_coefficient_ordering(self):
        with pytest.raises(ValueError):
            make_system(a_s=0.6)

    def test_a_w_complement(self):
        assert make_system(a_s=0.24).a_w == pytest.approx(0.76)


class TestErNoma:
    def test_jensen_equality_limit(self):
        sys = make_system(theta=1e-9)
        for user in ("strong", "weak"):
            er = er_noma(sys, user).value
            erg = ergodic_rate(sys, user).value
            assert abs(er - erg) < 1e-6

    def test_vanishing_power_share(self):
        sys = make_system(a_s=1e-6)
        assert er_noma(sys, "strong").value < 1e-4

    def test_theta_zero_delegates_to_ergodic(self):
        sys = make_system(theta=0.0)
        assert er_noma(sys, "strong").value == pytest.approx(
            ergodic_rate(sys, "strong").value, rel=1e-12
        )

    @pytest.mark.parametrize("user", ["strong", "weak"])
    def test_strategies_agree(self, user):
        sys = make_system(alpha=3, mu=2, theta=0.5, rho_db=15.0)
        q = er_noma(sys, user, "quadrature").value
        c = er_noma(sys, user, "closed-form").value
        tol = 1e-5 if user == "strong" else 1e-3
        assert c == pytest.approx(q, rel=tol)

    def test_monotone_in_theta(self):
        vals = [
            sum_er_noma(make_system(theta=t)) for t in (0.1, 0.5, 1.0, 2.0)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_jensen_upper_bound(self):
        for theta in (0.1, 0.5, 2.0):
            sys = make_system(theta=theta, alpha=3, mu=2)
            for user in ("strong", "weak"):
                er = er_noma(sys, user).value
                erg = ergodic_rate(sys, user).value
                assert er <= erg + 1e-9


class TestErOma:
    def test_theta_zero_half_ergodic(self):
        sys = make_system(theta=0.0)
        for user, ch in (("strong", sys.pair.strong), ("weak", sys.pair.weak)):
            want = 0.5 * laguerre_expectation(
                ch, lambda x: np.log2(1 + sys.rho * x)
            )
            assert er_oma(sys, user).value == pytest.approx(want, rel=1e-9)

    def test_symmetric_pair_equal_rates(self):
        pair = ChannelPair.relaxed(AlphaMuChannel(2, 1, 1.0), AlphaMuChannel(2, 1, 1.0))
        sys = NomaSystem(pair, 0.24, 10.0, DelayQos(0.7))
        assert er_oma(sys, "strong").value == pytest.approx(
            er_oma(sys, "weak").value, rel=1e-12
        )

    def test_strategies_agree(self):
        sys = make_system(theta=1.0, rho_db=10.0)
        for user in ("strong", "weak"):
            q = er_oma(sys, user, "quadrature").value
            c = er_oma(sys, user, "closed-form").value
            assert c == pytest.approx(q, rel=1e-6)


class TestHighSnr:
    def test_weak_forced_values(self):
        assert er_high_snr(make_system(a_s=0.2), "weak").value == pytest.approx(
            math.log2(5.0), rel=1e-12
        )
        assert er_high_snr(make_system(a_s=0.24), "weak").value == pytest.approx(
            2.058893689053569, rel=1e-12
        )

    def test_strong_converges_to_exact(self):
        sys = make_system(alpha=2, mu=2, theta=0.5, rho_db=40.0, a_s=0.24)
        approx = er_high_snr(sys, "strong").value
        exact = er_noma(sys, "strong").value
        assert abs(approx - exact) < 0.05

    def test_validity_condition(self):
        # alpha*mu = 1 <= 2*nu for theta=1
        sys = make_system(alpha=1, mu=1, theta=1.0)
        with pytest.raises(ValueError, match="invalid"):
            er_high_snr(sys, "strong")

    def test_weak_independent_of_channel(self):
        a = er_high_snr(make_system(alpha=2, mu=1, theta=0.5), "weak").value
        b = er_high_snr(make_system(alpha=3, mu=3, theta=2.0), "weak").value
        assert a == b


class TestDerivatives:
    def test_strong_first_derivative_exponential(self):
        sys = make_system(a_s=0.24)
        first, _ = er_derivatives(sys, "strong")
        assert first == pytest.approx(LOG2_E * 0.24, rel=1e-12)

    def test_strong_second_derivative_at_nu_zero(self):
        sys = make_system(a_s=0.24, theta=0.0)
        _, second = er_derivatives(sys, "strong")
        # E[g^2] = 2 for the exponential gain
        assert second == pytest.approx(-LOG2_E * 0.24**2 * 2.0, rel=1e-12)

    @pytest.mark.parametrize("user", ["strong", "weak"])
    @pytest.mark.parametrize("alpha,mu", [(2, 1), (3, 2)])
    def test_against_finite_differences(self, user, alpha, mu):
        # second-order forward stencils anchored at rho=0 where the rate is 0
        sys = make_system(alpha=alpha, mu=mu, theta=0.5)
        h = 1e-3

        def rate(rho):
            return er_noma(replace(sys, rho=rho), user, "quadrature").value

        r1, r2, r3 = rate(h), rate(2 * h), rate(3 * h)
        fd_first = (4 * r1 - r2) / (2 * h)
        fd_second = (-5 * r1 + 4 * r2 - r3) / h**2
        first, second = er_derivatives(sys, user)
        assert first == pytest.approx(fd_first, rel=1e-3)
        assert second == pytest.approx(fd_second, rel=1e-3)


class TestLowSnr:
    def test_zero_at_zero_snr(self):
        sys = make_system()
        tiny = replace(sys, rho=1e-300)
        assert er_low_snr(tiny, "strong").value == pytest.approx(0.0, abs=1e-12)

    def test_matches_exact_at_small_snr(self):
        sys = make_system(rho_db=-30.0)  # rho = 1e-3
        for user in ("strong", "weak"):
            taylor = er_low_snr(sys, user).value
            exact = er_noma(sys, user).value
            assert taylor == pytest.approx(exact, rel=1e-3)

    def test_sum_grows_linearly(self):
        slopes = []
        for rho in (1e-5, 2e-5):
            sys = replace(make_system(), rho=rho)
            total = er_low_snr(sys, "strong").value + er_low_snr(sys, "weak").value
            slopes.append(total / rho)
        ds, dw = er_derivatives(make_system(), "strong")[0], er_derivatives(
            make_system(), "weak"
        )[0]
        assert slopes[0] == pytest.approx(ds + dw, rel=1e-4)
        assert slopes[1] == pytest.approx(ds + dw, rel=1e-4)


class TestLowSnrMetrics:
    def test_min_energy_strong_exponential(self):
        sys = make_system(a_s=0.24)
        assert min_energy_per_bit(sys, "strong") == pytest.approx(
            1.0 / (0.24 * LOG2_E), rel=1e-12
        )

    def test_min_energy_theta_invariant(self):
        vals = {
            min_energy_per_bit(make_system(theta=t), "weak") for t in (0.1, 1.0, 2.0)
        }
        assert len({round(v, 14) for v in vals}) == 1

    def test_min_energy_weak_exponential_minimum(self):
        sys = make_system(a_s=0.24)
        want = 1.0 / (0.76 * LOG2_E / 11.0)
        assert min_energy_per_bit(sys, "weak") == pytest.approx(want, rel=1e-12)

    def test_wideband_slope_unity_case(self):
        # exponential gain at nu=0: 2 (a log2 e)^2 ln2 / (log2 e a^2 * 2) = 1
        sys = make_system(theta=0.0)
        assert wideband_slope(sys, "strong") == pytest.approx(1.0, rel=1e-12)

    def test_wideband_slope_decreases_with_theta(self):
        slopes = [wideband_slope(make_system(theta=t), "strong") for t in (0.1, 0.5, 1, 2)]
        assert all(a > b for a, b in zip(slopes, slopes[1:]))

    def test_weak_slope_matches_low_snr_curve_fit(self):
        sys = make_system()
        h = 1e-4  # around -40 dB in linear terms

        def rate(rho):
            return er_noma(replace(sys, rho=rho), "weak", "quadrature").value

        r1, r2 = rate(h), rate(2 * h)
        fd_first = (4 * r1 - r2) / (2 * h)
        fd_second = (r2 - 2 * r1) / h**2
        fd_slope = -2.0 * fd_first**2 / fd_second * LN2
        assert wideband_slope(sys, "weak") == pytest.approx(fd_slope, rel=0.05)


class TestErgodic:
    def test_exponential_integral_identity(self):
        sys = make_system(a_s=0.24, rho_db=10.0)
        c = sys.a_s * sys.rho
        want = float(mp.exp(1 / c) * mp.e1(1 / c) / mp.log(2))
        assert ergodic_rate(sys, "strong").value == pytest.approx(want, rel=1e-9)

    def test_constant_kernel_expectation(self):
        # a variance-free rate reduces the expectation to log2(1+gamma)
        ch = AlphaMuChannel(3, 2, 1.0)
        gamma = 3.7
        got = laguerre_expectation(ch, lambda x: np.full_like(x, math.log2(1 + gamma)))
        assert got == pytest.approx(math.log2(1 + gamma), rel=1e-12)

    @pytest.mark.parametrize("rho_db", [0.0, 10.0, 20.0, 30.0])
    def test_closed_form_vs_quadrature(self, rho_db):
        sys = make_system(alpha=2, mu=2, rho_db=rho_db)
        for user in ("strong", "weak"):
            c = ergodic_rate(sys, user, "closed-form").value
            q = ergodic_rate(sys, user, "quadrature").value
            assert c == pytest.approx(q, rel=1e-6)


class TestRateLoss:
    def test_vanishes_without_delay_constraint(self):
        assert rate_loss(make_system(theta=1e-9)) < 1e-6

    def test_monotone_in_theta(self):
        assert rate_loss(make_system(theta=2.0)) > rate_loss(make_system(theta=0.5))

    def test_increases_with_snr(self):
        assert rate_loss(make_system(rho_db=30.0)) > rate_loss(make_system(rho_db=10.0))


class TestNomaOmaGap:
    def test_negligible_under_strict_delay(self):
        # strict delay and severe fading: the superposition advantage
        # collapses (evaluated at the very asymmetric omega_w^2 = 0.01 pair,
        # where the loose-delay gap peaks above 2 bits)
        strict = [
            abs(noma_oma_gap(make_system(theta=2.0, rho_db=r, omega_w2=0.01)))
            for r in (0, 10, 20, 30, 40)
        ]
        loose = [
            noma_oma_gap(make_system(theta=0.5, rho_db=r, omega_w2=0.01))
            for r in (0, 10, 20, 30, 40)
        ]
        assert max(strict) < 0.25
        assert max(strict) < 0.3 * max(loose)

    def test_positive_over_practical_range(self):
        for rho_db in (10, 20, 30, 40):
            assert noma_oma_gap(make_system(theta=0.5, rho_db=rho_db)) > 0

    def test_shrinks_as_weak_link_strengthens(self):
        wide = noma_oma_gap(make_system(theta=1.0, rho_db=20.0, omega_w2=0.1))
        narrow = noma_oma_gap(make_system(theta=1.0, rho_db=20.0, omega_w2=0.5))
        assert wide > narrow


class TestPowerSearch:
    def test_singleton_grid(self):
        best_a, _ = power_search(make_system(), [0.1])
        assert best_a == 0.1

    def test_matches_brute_force(self):
        sys = make_system(alpha=2, mu=2, theta=0.5, rho_db=20.0)
        grid = [0.05, 0.1, 0.15, 0.2, 0.24]
        best_a, best_sum = power_search(sys, grid)
        sums = {a: sum_er_noma(replace(sys, a_s=a)) for a in grid}
        want = min(a for a, v in sums.items() if v == max(sums.values()))
        assert best_a == want
        assert best_sum == pytest.approx(max(sums.values()), rel=1e-12)

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError, match="empty"):
            power_search(make_system(), [])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="feasible range"):
            power_search(make_system(), [0.3])
