"""Analytic closed forms for the rate/transform expectations.

Each function here evaluates a Meijer-G or bivariate Fox-H representation
of an expectation that the quadrature route (specfun.laguerre_expectation)
computes independently; the two routes cross-validate each other in the
test suite.

The Meijer-G parameter blocks follow the Gauss-multiplication pattern:
``_delta(x, y)`` expands a Gamma of argument scaled by x into x Gamma
factors at offsets (y+k)/x.
"""

from __future__ import annotations

import math

from scipy.special import gammaln
from scipy.special import gamma as _gamma

from .channel import AlphaMuChannel, ChannelPair
from .specfun import (
    DEFAULT_CONTOUR,
    ContourConfig,
    FoxH2Spec,
    MeijerGSpec,
    fox_h2,
    meijer_g,
)

LN2 = math.log(2.0)


def _delta(x: int, y: float) -> tuple[float, ...]:
    return tuple((y + k) / x for k in range(x))


def power_mellin_analytic(
    ch: AlphaMuChannel,
    c: float,
    w: float,
    cfg: ContourConfig = DEFAULT_CONTOUR,
) -> float:
    """E[(1 + c*g)^-w] for an alpha-mu gain, Meijer-G closed form."""
    if not c > 0:
        raise ValueError("scale c must be positive")
    if not w > 0:
        raise ValueError("exponent w must be positive")
    al, mu, om = ch.alpha, ch.mu, ch.omega
    spec = MeijerGSpec(
        a=_delta(al, 1.0 - 0.5 * al * mu),
        b=_delta(2, 0.0) + _delta(al, w - 0.5 * al * mu),
        m=2 + al,
        n=al,
    )
    z = mu**2 / (4.0 * c**al * om ** (2 * al))
    g = meijer_g(spec, z, cfg)
    log_pref = (
        w * math.log(al)
        + mu * math.log(mu)
        - 0.5 * math.log(2.0)
        - (al - 0.5) * math.log(2.0 * math.pi)
        - al * mu * math.log(om)
        - gammaln(mu)
        - gammaln(w)
        - 0.5 * al * mu * math.log(c)
    )
    return g.sign * math.exp(log_pref + g.log_abs)


def ratio_mellin_analytic(
    pair: ChannelPair,
    rho: float,
    a_s: float,
    w: float,
    cfg: ContourConfig = DEFAULT_CONTOUR,
) -> float:
    """E[((1 + rho*g_min) / (1 + a_s*rho*g_min))^-w], bivariate Fox-H form.

    This is the weak-user SINR kernel: the ratio equals 1 + sinr where
    sinr = (1-a_s)*rho*g_min / (a_s*rho*g_min + 1).
    """
    if not (rho > 0 and 0 < a_s < 1):
        raise ValueError("need rho > 0 and a_s in (0, 1)")
    al, mu = pair.alpha, pair.mu
    wt = pair.omega_tilde
    z1 = rho * (wt / mu) ** (2.0 / al)
    z2 = a_s * z1
    h_vals = []
    for k in range(mu):
        spec = FoxH2Spec(outer_c=mu + k, outer_r=2.0 / al, power=w)
        h_vals.append(fox_h2(spec, z1, z2, cfg).value)
    total = 0.0
    for first, second in ((pair.strong, pair.weak), (pair.weak, pair.strong)):
        for k in range(mu):
            coef = math.exp(
                (mu + k) * math.log(wt)
                - gammaln(k + 1)
                - k * al * math.log(second.omega)
                - mu * al * math.log(first.omega)
            )
            total += coef * h_vals[k]
    pref = 1.0 / (_gamma(mu) * _gamma(w) * _gamma(-w))
    return pref * total


def log_mean_analytic(
    ch: AlphaMuChannel,
    c: float,
    cfg: ContourConfig = DEFAULT_CONTOUR,
) -> float:
    """E[log2(1 + c*g)] for an alpha-mu gain, Meijer-G closed form."""
    if not c > 0:
        raise ValueError("scale c must be positive")
    al, mu, om = ch.alpha, ch.mu, ch.omega
    zeta = _delta(al, -0.5 * al * mu)
    chi = _delta(al, 1.0 - 0.5 * al * mu)
    spec = MeijerGSpec(
        a=zeta + chi,
        b=_delta(2, 0.0) + zeta + zeta,
        m=2 + 2 * al,
        n=al,
    )
    z = (mu / (2.0 * om**al)) ** 2 / c**al
    g = meijer_g(spec, z, cfg)
    log_pref = (
        mu * math.log(mu)
        - 0.5 * math.log(2.0)
        - math.log(LN2)
        - (al - 0.5) * math.log(2.0 * math.pi)
        - gammaln(mu)
        - al * mu * math.log(om)
        - 0.5 * al * mu * math.log(c)
    )
    return g.sign * math.exp(log_pref + g.log_abs)


def min_log_mean_difference_analytic(
    pair: ChannelPair,
    rho: float,
    a_s: float,
    cfg: ContourConfig = DEFAULT_CONTOUR,
) -> float:
    """E[log2(1 + rho*g_min)] - E[log2(1 + a_s*rho*g_min)], Meijer-G form.

    Equals the weak user's ergodic rate under superposition with
    interference cancellation at the strong receiver only.
    """
    if not (rho > 0 and 0 < a_s < 1):
        raise ValueError("need rho > 0 and a_s in (0, 1)")
    al, mu = pair.alpha, pair.mu
    wt = pair.omega_tilde

    def script_g(x: float, y: int) -> float:
        psi = _delta(al, -0.5 * al * (mu + y))
        phi = _delta(al, 1.0 - 0.5 * al * (mu + y))
        spec = MeijerGSpec(
            a=psi + phi,
            b=_delta(2, 0.0) + psi + psi,
            m=2 + 2 * al,
            n=al,
        )
        z = (mu / (2.0 * wt)) ** 2 / x**al
        g = meijer_g(spec, z, cfg)
        return g.sign * math.exp(g.log_abs - 0.5 * al * (mu + y) * math.log(x))

    total = 0.0
    for first, second in ((pair.strong, pair.weak), (pair.weak, pair.strong)):
        for y in range(mu):
            coef = math.exp(
                (mu + y) * math.log(mu)
                - gammaln(y + 1)
                - y * al * math.log(second.omega)
                - mu * al * math.log(first.omega)
            )
            total += coef * (script_g(rho, y) - script_g(a_s * rho, y))
    pref = 1.0 / (
        math.sqrt(2.0)
        * LN2
        * (2.0 * math.pi) ** (al - 0.5)
        * _gamma(mu)
    )
    return pref * total
