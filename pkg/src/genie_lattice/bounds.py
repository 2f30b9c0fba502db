"""Word-error-rate bounds for genie-aided lattice decoding.

All quantities reduce to Gaussian ball probabilities.  For an m-dimensional
N(0, sigma2 I) vector and ``t = r^2 / (2 sigma2)``, the probability of
leaving the ball of radius r is

* m even: ``exp(-t) * sum_{k=0}^{m/2-1} t^k / k!``
* m odd:  ``erfc(sqrt t) + exp(-t) * sum_{k=1/2, 3/2, ..}^{m/2-1} t^k / k!``

with half-integer factorials through the gamma function.  The universal
sphere bound uses m = n; the cone bounds integrate the (n-1)-dimensional
cross-section along the line through the origin and the codeword.
"""

import math
from dataclasses import dataclass

from scipy import integrate

__all__ = [
    "BoundQuery", "BoundResult", "BoundRestrictionError",
    "ball_exit_probability", "tarokh_bound", "ps_closed_form",
    "covering_bound", "effective_estimate", "asymptotic_bound", "cone_bound",
]


class BoundRestrictionError(ValueError):
    """Query violates radius^2 < n * P_x."""


@dataclass(frozen=True)
class BoundQuery:
    n: int
    radius: float
    power_per_dim: float
    sigma2: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("cone bounds need n >= 2")
        if not (self.radius > 0 and self.power_per_dim > 0 and self.sigma2 > 0):
            raise ValueError("radius, power_per_dim and sigma2 must be positive")

    @property
    def cone_valid(self):
        return self.radius ** 2 < self.n * self.power_per_dim


@dataclass(frozen=True)
class BoundResult:
    value: float
    quadrature_abs_err: float
    kind: str


def _exp_series(t, exponents):
    # sum of exp(-t) t^k / Gamma(k+1), each term formed in log space
    if t == 0.0:
        return 1.0 if exponents and exponents[0] == 0 else 0.0
    lt = math.log(t)
    terms = [math.exp(k * lt - t - math.lgamma(k + 1.0)) for k in exponents]
    return math.fsum(sorted(terms, reverse=True))


def ball_exit_probability(m, t):
    """P(||z||^2 > 2 sigma2 t) for z ~ N(0, sigma2 I_m), m >= 1."""
    if m < 1:
        raise ValueError("dimension must be >= 1")
    if t < 0:
        raise ValueError("t must be non-negative")
    if m % 2 == 0:
        return min(1.0, _exp_series(t, [k for k in range(m // 2)]))
    halves = [j - 0.5 for j in range(1, (m - 1) // 2 + 1)]
    return min(1.0, math.erfc(math.sqrt(t)) + _exp_series(t, halves))


def tarokh_bound(n, r_e, sigma2):
    """Universal lower bound: Gaussian noise leaves the effective sphere."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not sigma2 > 0 or r_e < 0:
        raise ValueError("need sigma2 > 0 and r_e >= 0")
    t = r_e * r_e / (2.0 * sigma2)
    return BoundResult(ball_exit_probability(n, t), 0.0, "tarokh")


def ps_closed_form(n, r, sigma2):
    """Probability that the (n-1)-dimensional noise lies inside radius r."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if r < 0 or not sigma2 > 0:
        raise ValueError("need r >= 0 and sigma2 > 0")
    return 1.0 - ball_exit_probability(n - 1, r * r / (2.0 * sigma2))


def _cross_section_exit(n, f, sigma2):
    return ball_exit_probability(n - 1, f * f / (2.0 * sigma2))


def cone_bound(q, kind="covering"):
    """1 - P(y in cone) for the double cone tangent to the ball about x.

    Along the axis through x the cone has cross-section radius
    ``f(z) = |a z + b|`` with ``a = r / sqrt(nP - r^2)`` and
    ``b = sqrt(nP r^2 / (nP - r^2))``; the error probability is
    ``int phi(z) h(z) dz`` with h the cross-section exit probability.
    """
    if not q.cone_valid:
        raise BoundRestrictionError(
            f"need radius^2 < n * P_x, got {q.radius ** 2:.6g} >= "
            f"{q.n * q.power_per_dim:.6g}")
    n, r, s2 = q.n, q.radius, q.sigma2
    nP = n * q.power_per_dim
    a = r / math.sqrt(nP - r * r)
    b = math.sqrt(nP * r * r / (nP - r * r))
    sigma = math.sqrt(s2)
    norm = 1.0 / math.sqrt(2.0 * math.pi * s2)

    def integrand(z):
        return norm * math.exp(-z * z / (2.0 * s2)) * \
            _cross_section_exit(n, a * z + b, s2)

    # exponent z^2 + f(z)^2 is smallest at z_star; cone vertex at -sqrt(nP)
    z_star = -a * b / (1.0 + a * a)
    lo = min(-10.0 * sigma, z_star - 10.0 * sigma)
    hi = 10.0 * sigma
    breaks = sorted({p for p in (z_star, -math.sqrt(nP), 0.0) if lo < p < hi})
    edges = [lo] + breaks + [hi]
    value, err = 0.0, 0.0
    for u, v in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(integrand, u, v, epsabs=1e-15, epsrel=1e-11,
                                limit=400)
        value += val
        err += e
    # integrand <= phi(z), so the mass outside [lo, hi] is below the Gaussian tail
    err += math.erfc(10.0 / math.sqrt(2.0))
    return BoundResult(min(1.0, max(0.0, value)), err, kind)


def covering_bound(q):
    """Lower bound on genie-aided WER from the covering sphere (q.radius = r_c)."""
    return cone_bound(q, "covering")


def effective_estimate(q):
    """WER estimate from the effective sphere (q.radius = r_e)."""
    return cone_bound(q, "effective")


def asymptotic_bound(n, r, sigma2):
    """Large-power limit 1 - P_s(r): the cone becomes a cylinder."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (r > 0 and sigma2 > 0):
        raise ValueError("need r > 0 and sigma2 > 0")
    return BoundResult(_cross_section_exit(n, r, sigma2), 0.0, "asymptotic")
