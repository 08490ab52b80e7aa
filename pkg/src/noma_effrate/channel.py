"""Alpha-mu fading channel gains: densities, moments, and sampling.

The power gain g = |h|^2 of an alpha-mu fading link with non-linearity
``alpha``, clustering ``mu`` and alpha-root-mean ``omega`` has

    pdf(x) = alpha * mu^mu * x^(alpha*mu/2 - 1)
             / (2 * omega^(alpha*mu) * Gamma(mu)) * exp(-mu x^(alpha/2) / omega^alpha)

which covers Rayleigh (alpha=2, mu=1), Nakagami-m (alpha=2, mu=m) and
Weibull (mu=1) as special cases.  Both parameters are restricted to
positive integers, which keeps the CDF a finite sum and makes the
minimum-gain density of a two-link pair a finite mixture of alpha-mu
densities (used heavily by the expectation routines).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gammaln


class UnboundedDensityError(ValueError):
    """Density diverges at the requested point (x=0 with alpha=mu=1)."""


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("gain values must be nonnegative")
    return arr


@dataclass(frozen=True)
class AlphaMuChannel:
    """One alpha-mu fading link.

    alpha and mu must be positive integers; omega is the alpha-root-mean
    of the gain and must be positive.
    """

    alpha: int
    mu: int
    omega: float

    def __post_init__(self):
        if int(self.alpha) != self.alpha or self.alpha < 1:
            raise ValueError(f"alpha must be a positive integer, got {self.alpha}")
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValueError(f"mu must be a positive integer, got {self.mu}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        object.__setattr__(self, "alpha", int(self.alpha))
        object.__setattr__(self, "mu", int(self.mu))
        object.__setattr__(self, "omega", float(self.omega))


@dataclass(frozen=True)
class ChannelPair:
    """Strong/weak link pair with shared alpha, mu and ordered gains.

    The production constructor requires weak.omega^alpha < strong.omega^alpha.
    Use :meth:`relaxed` in tests that need the symmetric (equal-omega) case.
    """

    strong: AlphaMuChannel
    weak: AlphaMuChannel

    def __post_init__(self):
        self._check_common()
        if not self.weak.omega**self.alpha < self.strong.omega**self.alpha:
            raise ValueError(
                "weak link must be strictly weaker: "
                f"omega_w^alpha={self.weak.omega**self.alpha} >= "
                f"omega_s^alpha={self.strong.omega**self.alpha}"
            )

    def _check_common(self):
        if self.strong.alpha != self.weak.alpha or self.strong.mu != self.weak.mu:
            raise ValueError("both links must share alpha and mu")

    @classmethod
    def relaxed(cls, strong: AlphaMuChannel, weak: AlphaMuChannel) -> "ChannelPair":
        """Test-only constructor that permits omega_w == omega_s."""
        pair = object.__new__(cls)
        object.__setattr__(pair, "strong", strong)
        object.__setattr__(pair, "weak", weak)
        pair._check_common()
        if weak.omega > strong.omega:
            raise ValueError("weak.omega must not exceed strong.omega")
        return pair

    @property
    def alpha(self) -> int:
        return self.strong.alpha

    @property
    def mu(self) -> int:
        return self.strong.mu

    @cached_property
    def omega_tilde(self) -> float:
        """Harmonic combination 1 / (omega_s^-alpha + omega_w^-alpha).

        Carries the dimension of omega^alpha; it replaces omega^alpha in
        the exponential factor of the minimum-gain density.
        """
        a = self.alpha
        return 1.0 / (self.strong.omega**-a + self.weak.omega**-a)


def gain_pdf(ch: AlphaMuChannel, x) -> np.ndarray | float:
    """Density of the channel gain at x (x >= 0, scalar or array)."""
    arr = _as_array(x)
    a, m, w = ch.alpha, ch.mu, ch.omega
    if a * m < 2 and np.any(arr == 0):
        raise UnboundedDensityError(
            "gain density is unbounded at x=0 for alpha=mu=1"
        )
    out = np.zeros_like(arr)
    pos = arr > 0
    xp = arr[pos]
    log_pdf = (
        math.log(a)
        + m * math.log(m)
        + (0.5 * a * m - 1.0) * np.log(xp)
        - math.log(2.0)
        - a * m * math.log(w)
        - gammaln(m)
        - m * xp ** (0.5 * a) / w**a
    )
    out[pos] = np.exp(log_pdf)
    if a * m == 2:
        # finite limit at the origin: the power of x vanishes
        out[arr == 0] = a * m**m / (2.0 * w ** (a * m) * math.gamma(m))
    return out if out.ndim else float(out)


def gain_cdf(ch: AlphaMuChannel, x) -> np.ndarray | float:
    """Distribution function of the gain, via the finite mu-term sum."""
    arr = _as_array(x)
    m, a, w = ch.mu, ch.alpha, ch.omega
    u = m * arr ** (0.5 * a) / w**a
    # survival = exp(-u) * sum_{j<mu} u^j/j!, each term a Poisson pmf (<= 1)
    out = np.zeros_like(arr)
    pos = u > 0
    up = u[pos]
    terms = np.stack(
        [np.exp(-up + j * np.log(up) - gammaln(j + 1)) for j in range(m)]
    )
    out[pos] = 1.0 - terms.sum(axis=0)
    return np.clip(out, 0.0, 1.0) if out.ndim else float(min(max(out, 0.0), 1.0))


def min_gain_mixture(pair: ChannelPair) -> list[tuple[float, AlphaMuChannel]]:
    """Decompose the minimum-gain law as a finite alpha-mu mixture.

    Each branch term of the minimum-gain density is itself an alpha-mu
    density with clustering mu+k and alpha-root-mean set by omega_tilde.
    Returns (weight, component) pairs; the weights sum to 1.
    """
    a, m = pair.alpha, pair.mu
    wt = pair.omega_tilde
    comps: list[tuple[float, AlphaMuChannel]] = []
    for first, second in ((pair.strong, pair.weak), (pair.weak, pair.strong)):
        for k in range(m):
            log_c = (
                gammaln(m + k)
                - gammaln(m)
                - gammaln(k + 1)
                + (m + k) * math.log(wt)
                - k * a * math.log(second.omega)
                - m * a * math.log(first.omega)
            )
            omega_k = ((m + k) * wt / m) ** (1.0 / a)
            comps.append((math.exp(log_c), AlphaMuChannel(a, m + k, omega_k)))
    return comps


def min_gain_pdf(pair: ChannelPair, x) -> np.ndarray | float:
    """Density of min(g_strong, g_weak) via the two-branch closed form."""
    arr = _as_array(x)
    a, m = pair.alpha, pair.mu
    wt = pair.omega_tilde
    out = np.zeros_like(arr)
    pos = arr > 0
    xp = arr[pos]
    log_x = np.log(xp)
    decay = m * xp ** (0.5 * a) / wt
    acc = np.zeros_like(xp)
    for first, second in ((pair.strong, pair.weak), (pair.weak, pair.strong)):
        for k in range(m):
            log_term = (
                math.log(a)
                - math.log(2.0)
                + (m + k) * math.log(m)
                + (0.5 * a * (m + k) - 1.0) * log_x
                - gammaln(m)
                - gammaln(k + 1)
                - m * a * math.log(first.omega)
                - k * a * math.log(second.omega)
                - decay
            )
            acc += np.exp(log_term)
    out[pos] = acc
    if a * m == 2:
        # only the k=0 branches survive at the origin (exponent 0.5*a*m-1 = 0)
        c = a * m**m / (2.0 * math.gamma(m))
        out[arr == 0] = c * (pair.strong.omega ** (-a * m) + pair.weak.omega ** (-a * m))
    elif a * m < 2 and np.any(arr == 0):
        raise UnboundedDensityError(
            "minimum-gain density is unbounded at x=0 for alpha=mu=1"
        )
    return out if out.ndim else float(out)


def min_gain_cdf(pair: ChannelPair, x) -> np.ndarray | float:
    """Distribution of the minimum gain: 1 - (1-F_s)(1-F_w)."""
    fs = np.asarray(gain_cdf(pair.strong, x))
    fw = np.asarray(gain_cdf(pair.weak, x))
    out = 1.0 - (1.0 - fs) * (1.0 - fw)
    return out if out.ndim else float(out)


def gain_moment(ch: AlphaMuChannel, k: int) -> float:
    """k-th moment of the gain: omega^2k Gamma(mu+2k/alpha) / (mu^(2k/alpha) Gamma(mu))."""
    if k < 1 or int(k) != k:
        raise ValueError(f"moment order must be a positive integer, got {k}")
    a, m, w = ch.alpha, ch.mu, ch.omega
    r = 2.0 * k / a
    return math.exp(2 * k * math.log(w) + gammaln(m + r) - r * math.log(m) - gammaln(m))


def min_gain_moment(pair: ChannelPair, k: int) -> float:
    """First or second moment of min(g_strong, g_weak), double-sum closed form."""
    if k not in (1, 2):
        raise ValueError(f"unsupported order: min-gain moments exist for k in {{1, 2}}, got {k}")
    a, m = pair.alpha, pair.mu
    wt = pair.omega_tilde
    r = 2.0 * k / a
    total = 0.0
    for first, second in ((pair.strong, pair.weak), (pair.weak, pair.strong)):
        for j in range(m):
            log_term = (
                (m + j + r) * math.log(wt)
                - gammaln(j + 1)
                - r * math.log(m)
                - j * a * math.log(second.omega)
                - m * a * math.log(first.omega)
                - gammaln(m)
                + gammaln(m + j + r)
            )
            total += math.exp(log_term)
    return total


def sample_gain(ch: AlphaMuChannel, rng: np.random.Generator, size=None):
    """Draw gains as (omega^alpha * Y / mu)^(2/alpha) with Y ~ Gamma(mu, 1).

    The caller owns the generator; parallel sampling requires independent
    streams (e.g. via numpy SeedSequence.spawn).
    """
    y = rng.gamma(shape=ch.mu, scale=1.0, size=size)
    return (ch.omega**ch.alpha * y / ch.mu) ** (2.0 / ch.alpha)


def sample_min_gain(pair: ChannelPair, rng: np.random.Generator, size=None):
    """Draw min(g_strong, g_weak) from independent links."""
    gs = sample_gain(pair.strong, rng, size)
    gw = sample_gain(pair.weak, rng, size)
    return np.minimum(gs, gw)
