"""Contour-quadrature and expectation-kernel tests.

The Meijer-G/Fox-H engines are checked three ways: against the reduction
identities they were built from, against mpmath's independent
implementation, and against direct quadrature of the expectations whose
closed forms they evaluate.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad

from noma_effrate.channel import AlphaMuChannel, ChannelPair, gain_moment, min_gain_pdf
from noma_effrate.closedform import power_mellin_analytic, ratio_mellin_analytic
from noma_effrate.specfun import (
    ContourConfig,
    ContourError,
    FoxH2Spec,
    MeijerGSpec,
    PoleError,
    fox_h2,
    laguerre_expectation,
    laguerre_log_expectation,
    ln_gamma,
    meijer_g,
)

# frozen 30-digit reference computed with mpmath at 50-digit precision
LOGGAMMA_3_4J = complex(-1.75662678460378411053060418162, 4.74266443803465792819488940755)


def make_pair(alpha=2, mu=1, omega_s=1.0, omega_w2=0.1):
    return ChannelPair(
        AlphaMuChannel(alpha, mu, omega_s),
        AlphaMuChannel(alpha, mu, math.sqrt(omega_w2)),
    )


class TestLnGamma:
    def test_factorial(self):
        assert ln_gamma(5).real == pytest.approx(math.log(24.0), rel=1e-14)
        assert ln_gamma(5).imag == 0.0

    def test_half(self):
        assert ln_gamma(0.5).real == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)

    def test_complex_reference(self):
        got = ln_gamma(3 + 4j)
        assert abs(got - LOGGAMMA_3_4J) < 1e-12

    @pytest.mark.parametrize("z", [0, -1, -7])
    def test_pole(self, z):
        with pytest.raises(PoleError):
            ln_gamma(z)


class TestMeijerIdentities:
    @pytest.mark.parametrize("z", np.geomspace(1e-3, 1e3, 9).tolist())
    def test_exponential(self, z):
        spec = MeijerGSpec(a=(), b=(0.0,), m=1, n=0)
        got = meijer_g(spec, z)
        assert got.sign > 0
        assert got.log_abs == pytest.approx(-z, rel=1e-8, abs=1e-10)

    @pytest.mark.parametrize("z", np.geomspace(1e-3, 1e3, 9).tolist())
    def test_binomial(self, z):
        y = -1.3
        spec = MeijerGSpec(a=(1 + y,), b=(0.0,), m=1, n=1)
        want = math.gamma(-y) * (1 + z) ** y
        assert meijer_g(spec, z).value == pytest.approx(want, rel=1e-8)

    def test_binomial_spec_point(self):
        # (1+z)^y at z=0.5, y=-1.3 -> Gamma(1.3) * 1.5^-1.3
        y = -1.3
        spec = MeijerGSpec(a=(1 + y,), b=(0.0,), m=1, n=1)
        want = math.gamma(1.3) * 1.5**-1.3
        assert meijer_g(spec, 0.5).value == pytest.approx(want, rel=1e-10)

    @pytest.mark.parametrize(
        "a,b,m,n,z",
        [
            ((), (0.0,), 1, 0, 2.5),
            ((0.3,), (0.0,), 1, 1, 0.8),
            ((0.5, -0.25), (0.0, 0.5, -0.25), 3, 1, 1.7),
        ],
    )
    def test_against_mpmath(self, a, b, m, n, z):
        spec = MeijerGSpec(a=a, b=b, m=m, n=n)
        want = float(
            mp.meijerg(
                [list(a[:n]), list(a[n:])], [list(b[:m]), list(b[m:])], z
            )
        )
        assert meijer_g(spec, z).value == pytest.approx(want, rel=1e-9)

    def test_doubling_nodes_stays_within_error(self):
        spec = MeijerGSpec(a=(0.3,), b=(0.0, 0.5), m=2, n=1)
        coarse = meijer_g(spec, 1.3, ContourConfig(nodes=129))
        fine = meijer_g(spec, 1.3, ContourConfig(nodes=257))
        assert abs(fine.value - coarse.value) <= 2 * abs(coarse.value) * max(
            coarse.error, 1e-14
        )

    def test_interleaved_poles_raise(self):
        # a=1 numerator-type against b=1.5: right family starts left of the
        # left family's top -> empty gap
        spec = MeijerGSpec(a=(-1.0,), b=(-2.5,), m=1, n=1)
        with pytest.raises(ContourError):
            meijer_g(spec, 1.0)

    def test_rejects_nonpositive_argument(self):
        spec = MeijerGSpec(a=(), b=(0.0,), m=1, n=0)
        with pytest.raises(ValueError):
            meijer_g(spec, 0.0)


class TestMellinStrongClosedForm:
    def test_spec_sample_point(self):
        # alpha=2, mu=1, a_s=0.2, rho=10, omega=1, exponent 1.5
        ch = AlphaMuChannel(2, 1, 1.0)
        c, w = 0.2 * 10.0, 1.5
        want, _ = quad(
            lambda x: (1 + c * x) ** -w * math.exp(-x), 0, np.inf, limit=200
        )
        assert power_mellin_analytic(ch, c, w) == pytest.approx(want, rel=1e-6)

    @pytest.mark.parametrize("alpha,mu", [(1, 2), (2, 2), (3, 1), (4, 3)])
    def test_against_gain_quadrature(self, alpha, mu):
        ch = AlphaMuChannel(alpha, mu, 0.9)
        c, w = 2.4, 0.7213
        want = laguerre_expectation(ch, lambda x: (1 + c * x) ** -w)
        assert power_mellin_analytic(ch, c, w) == pytest.approx(want, rel=1e-8)


class TestFoxH2:
    def test_spec_assembly_point(self):
        # alpha=2, mu=1, rho=10, a_s=0.2, omega_s^2=1, omega_w^2=0.1, w=1.5
        pair = make_pair(2, 1, 1.0, 0.1)
        rho, a_s, w = 10.0, 0.2, 1.5
        kernel = lambda x: (1 + rho * x) ** -w * (1 + a_s * rho * x) ** w
        want, _ = quad(
            lambda x: kernel(x) * min_gain_pdf(pair, x), 0, np.inf, limit=300
        )
        got = ratio_mellin_analytic(pair, rho, a_s, w)
        assert got == pytest.approx(want, rel=1e-4)

    def test_degenerate_exponent_approaches_one(self):
        pair = make_pair(2, 1, 1.0, 0.1)
        vals = [ratio_mellin_analytic(pair, 10.0, 0.2, w) for w in (0.2, 0.1, 0.05)]
        errs = [abs(v - 1.0) for v in vals]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 0.06

    def test_against_monte_carlo(self):
        pair = make_pair(2, 2, 1.0, 0.1)
        rho, a_s, w = 10.0, 0.2, 1.5
        rng = np.random.default_rng(31)
        from noma_effrate.channel import sample_min_gain

        g = sample_min_gain(pair, rng, 10_000_000)
        samples = (1 + rho * g) ** -w * (1 + a_s * rho * g) ** w
        se = samples.std(ddof=1) / math.sqrt(samples.size)
        got = ratio_mellin_analytic(pair, rho, a_s, w)
        assert abs(got - samples.mean()) < 3 * se

    def test_direct_kernel_value(self):
        # at mu=1 the branch prefactors collapse and the bare double-contour
        # kernel equals Gamma(w) Gamma(-w) times the ratio expectation
        pair = make_pair(2, 1, 1.0, 0.1)
        mu, al = 1, 2
        rho, a_s, w = 4.0, 0.3, 0.85
        wt = pair.omega_tilde
        z1 = rho * (wt / mu) ** (2 / al)
        spec = FoxH2Spec(outer_c=mu, outer_r=2 / al, power=w)
        h = fox_h2(spec, z1, a_s * z1, ContourConfig(rtol=1e-9))
        kernel = lambda x: (1 + rho * x) ** -w * (1 + a_s * rho * x) ** w
        mean, _ = quad(lambda x: kernel(x) * min_gain_pdf(pair, x), 0, np.inf, limit=300)
        want = mean * math.gamma(w) * math.gamma(-w)
        assert h.value == pytest.approx(want, rel=1e-7)

    def test_doubling_nodes_stays_within_error(self):
        spec = FoxH2Spec(outer_c=2.0, outer_r=1.0, power=0.7213)
        coarse = fox_h2(spec, 0.8, 0.2, ContourConfig(nodes=129, rtol=1e-7))
        fine = fox_h2(spec, 0.8, 0.2, ContourConfig(nodes=257, rtol=1e-7))
        assert abs(fine.value - coarse.value) <= 2 * abs(coarse.value) * max(
            coarse.error, 1e-12
        )

    def test_integer_power_rejected(self):
        with pytest.raises(ContourError):
            FoxH2Spec(outer_c=1.0, outer_r=1.0, power=2.0)

    def test_contour_config_invariants(self):
        with pytest.raises(ValueError):
            ContourConfig(nodes=32)
        with pytest.raises(ValueError):
            ContourConfig(half_height=-1.0)

    def test_non_convergence_reports_estimates(self):
        from noma_effrate.specfun import ConvergenceError

        spec = MeijerGSpec(a=(0.3,), b=(0.0, 0.5), m=2, n=1)
        with pytest.raises(ConvergenceError) as exc:
            meijer_g(spec, 1.3, ContourConfig(nodes=65, max_nodes=66, rtol=1e-14))
        assert exc.value.estimates is not None
        assert len(exc.value.estimates) == 2


class TestLaguerreExpectation:
    @pytest.mark.parametrize("alpha", [1, 2, 3, 4])
    @pytest.mark.parametrize("mu", [1, 2, 3, 4])
    def test_unit_kernel(self, alpha, mu):
        ch = AlphaMuChannel(alpha, mu, 1.1)
        got = laguerre_expectation(ch, lambda x: np.ones_like(x))
        assert got == pytest.approx(1.0, abs=1e-12)

    def test_identity_kernel_exponential(self):
        ch = AlphaMuChannel(2, 1, 1.0)
        assert laguerre_expectation(ch, lambda x: x) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("alpha,mu", [(2, 1), (3, 2), (4, 4)])
    def test_square_kernel_matches_moment(self, alpha, mu):
        ch = AlphaMuChannel(alpha, mu, 0.8)
        got = laguerre_expectation(ch, lambda x: x**2)
        assert got == pytest.approx(gain_moment(ch, 2), rel=1e-9)

    def test_rayleigh_incomplete_gamma_kernel(self):
        # E[(1+2x)^-1.5], x ~ Exp(1): frozen 25-digit mpmath value of
        # exp(1/c) c^-w Gamma(1-w, 1/c) with c=2, w=1.5
        ch = AlphaMuChannel(2, 1, 1.0)
        want = 0.3443204575812015284561288
        got = laguerre_expectation(ch, lambda x: (1 + 2 * x) ** -1.5)
        assert got == pytest.approx(want, rel=1e-10)

    def test_min_gain_branches_match_raw_quadrature(self):
        pair = make_pair(3, 2, 1.0, 0.36)
        kernel = lambda x: (1 + 1.7 * x) ** -0.9
        got = laguerre_expectation(pair, kernel)
        want, _ = quad(
            lambda x: kernel(x) * min_gain_pdf(pair, x), 0, np.inf, limit=300
        )
        assert got == pytest.approx(want, rel=1e-9)

    def test_log_expectation_matches_linear(self):
        pair = make_pair(2, 2, 1.0, 0.1)
        w = 3.7
        kernel = lambda x: (1 + 2.4 * x) ** -w
        log_kernel = lambda x: -w * np.log1p(2.4 * x)
        want = laguerre_expectation(pair, kernel)
        got, err = laguerre_log_expectation(pair, log_kernel)
        assert got == pytest.approx(math.log(want), abs=1e-8)
        assert err < 1e-8

    def test_log_expectation_extreme_exponent(self):
        # exponent far beyond linear-space representability
        ch = AlphaMuChannel(2, 1, 1.0)
        w = 1200.0
        log_kernel = lambda x: -w * np.log1p(2.4 * x)
        got, _ = laguerre_log_expectation(ch, log_kernel)
        want, _ = quad(
            lambda x: np.exp(-w * np.log1p(2.4 * x)) * np.exp(-x), 0, np.inf, limit=300
        )
        assert got == pytest.approx(math.log(want), rel=1e-5)
