import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

import genie_lattice as gl
from genie_lattice import bounds as Bd


def radial_ball_probability(m, r, sigma2):
    """P(||z|| <= r) for z ~ N(0, sigma2 I_m) by integrating the chi density."""
    s = math.sqrt(sigma2)
    val, _ = integrate.quad(lambda u: stats.chi.pdf(u, m), 0.0, r / s,
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def test_tarokh_trivial_cases():
    for n in (1, 2, 5, 8, 16):
        assert Bd.tarokh_bound(n, 0.0, 1.0).value == 1.0
    t = 1.7
    r = math.sqrt(2 * t * 0.4)
    assert Bd.tarokh_bound(2, r, 0.4).value == pytest.approx(math.exp(-t), rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 8, 16, 33])
@pytest.mark.parametrize("t", [0.01, 0.5, 3.0, 10.0, 40.0])
def test_tarokh_equals_chi_square_tail(n, t):
    s2 = 0.7
    r = math.sqrt(2 * t * s2)
    want = stats.chi2.sf(r * r / s2, n)
    assert Bd.tarokh_bound(n, r, s2).value == pytest.approx(want, abs=1e-10, rel=1e-9)


def test_tarokh_rejects_bad_input():
    with pytest.raises(ValueError):
        Bd.tarokh_bound(8, 1.0, 0.0)
    with pytest.raises(ValueError):
        Bd.tarokh_bound(8, -1.0, 1.0)


def test_ps_anchor_values():
    assert Bd.ps_closed_form(5, 0.0, 1.0) == 0.0
    assert Bd.ps_closed_form(2, 1.0, 1.0) == pytest.approx(0.6826894921, abs=1e-10)
    r = math.sqrt(2 * math.log(2.0))
    assert Bd.ps_closed_form(3, r, 1.0) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        Bd.ps_closed_form(1, 1.0, 1.0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8, 9, 16, 17, 31, 32])
@pytest.mark.parametrize("rs", [0.1, 1.0, 3.0, 6.0])
def test_ps_branch_consistency(n, rs):
    s2 = 2.5
    r = rs * math.sqrt(s2)
    assert Bd.ps_closed_form(n, r, s2) == pytest.approx(
        radial_ball_probability(n - 1, r, s2), abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(m=st.integers(1, 40), t=st.floats(0.0, 200.0))
def test_ball_exit_probability_is_chi_square_tail(m, t):
    assert Bd.ball_exit_probability(m, t) == pytest.approx(stats.chi2.sf(2 * t, m),
                                                           abs=1e-12, rel=1e-8)


def test_cone_integrand_uses_the_cross_section():
    # h(z) = 1 - P_s(f(z)) on both parities
    for n in (7, 8):
        for f in (0.3, 1.1, 2.5):
            h = Bd._cross_section_exit(n, f, 0.8)
            assert h == pytest.approx(1 - Bd.ps_closed_form(n, f, 0.8), abs=1e-15)


def test_noise_free_limit():
    q = Bd.BoundQuery(8, 1.0, 10.0, 1e-12)
    assert Bd.covering_bound(q).value < 1e-10


def test_restriction_enforced():
    with pytest.raises(Bd.BoundRestrictionError, match="n \\* P_x"):
        Bd.covering_bound(Bd.BoundQuery(8, 4.0, 2.0, 0.1))
    with pytest.raises(Bd.BoundRestrictionError):
        Bd.effective_estimate(Bd.BoundQuery(2, 2.0, 2.0, 0.1))
    with pytest.raises(ValueError):
        Bd.BoundQuery(1, 0.5, 2.0, 0.1)


def test_effective_shares_the_cone_path():
    q = Bd.BoundQuery(8, 1.0, 4.0 / 3.0, 0.05)
    assert Bd.effective_estimate(q).value == Bd.covering_bound(q).value
    assert Bd.effective_estimate(q).kind == "effective"


def test_monotone_in_noise():
    q = Bd.BoundQuery(8, 0.8393661845719881, 4.0 / 3.0, 0.02)
    q2 = Bd.BoundQuery(8, q.radius, q.power_per_dim, q.sigma2 * 1.1)
    assert Bd.effective_estimate(q2).value > Bd.effective_estimate(q).value


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 24), frac_e=st.floats(0.05, 0.9), extra=st.floats(0.0, 0.5),
       P=st.floats(0.2, 20.0), snr_db=st.floats(-5.0, 30.0))
def test_ordering_and_range(n, frac_e, extra, P, snr_db):
    rmax = math.sqrt(n * P)
    r_e = frac_e * rmax
    r_c = min(r_e * (1 + extra), 0.999 * rmax)
    s2 = P / 10 ** (snr_db / 10)
    cov = Bd.covering_bound(Bd.BoundQuery(n, r_c, P, s2))
    eff = Bd.effective_estimate(Bd.BoundQuery(n, r_e, P, s2))
    assert 0.0 <= cov.value <= eff.value + 1e-12 <= 1.0 + 1e-12
    assert cov.quadrature_abs_err < 1e-10


def test_cone_bound_rises_monotonically_to_the_cylinder_limit():
    # the tangent cone is wider than the cylinder near x (f(0) > r), so its
    # error is smaller and grows toward the cylinder value as P increases
    n, r = 8, 5.4512
    asym = Bd.asymptotic_bound(n, r, 1.0).value
    vals = [Bd.covering_bound(Bd.BoundQuery(n, r, P, 1.0)).value
            for P in (10.0, 100.0, 1e3, 1e4, 1e5, 1e6)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= asym
    assert abs(vals[-1] - asym) / asym < 0.01


def test_small_power_cone_error_is_below_cylinder_by_monte_carlo():
    n, r, P = 8, 5.4512, 10.0
    rng = np.random.default_rng(14)
    x = np.zeros(n)
    x[0] = math.sqrt(n * P)
    misses, draws = 0, 2 * 10 ** 6
    for _ in range(4):
        Y = x + rng.standard_normal((draws // 4, n))
        misses += int((~gl.line_decodable(x, Y, r)).sum())
    p = misses / draws
    q = Bd.covering_bound(Bd.BoundQuery(n, r, P, 1.0)).value
    assert abs(p - q) < 3 * math.sqrt(q / draws)
    assert p < 0.5 * Bd.asymptotic_bound(n, r, 1.0).value


@pytest.mark.parametrize("n,r", [(8, 5.4512), (16, 6.5552)])
def test_small_noise_anchor_radii(n, r):
    v = Bd.asymptotic_bound(n, r, 1.0).value
    assert 3e-5 <= v <= 3e-4


def test_asymptotic_is_one_minus_ps():
    assert Bd.asymptotic_bound(9, 2.0, 0.5).value == pytest.approx(
        1 - Bd.ps_closed_form(9, 2.0, 0.5), abs=1e-15)


def test_e8_code_bounds_decrease_with_snr():
    e8 = gl.e8()
    P = 4.0 / 3.0
    prev = None
    for snr_db in np.arange(4.0, 12.01, 1.0):
        s2 = P / 10 ** (snr_db / 10)
        cov = Bd.covering_bound(Bd.BoundQuery(8, e8.covering_radius, P, s2)).value
        eff = Bd.effective_estimate(Bd.BoundQuery(8, e8.effective_radius, P, s2)).value
        tar = Bd.tarokh_bound(8, e8.effective_radius, s2).value
        assert cov < eff < tar
        if prev is not None:
            assert cov < prev
        prev = cov
