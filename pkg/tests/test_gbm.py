import math

import numpy as np
import pytest
from scipy import integrate

from ordtutte.gbm import GbmParams, chain_lambdas, moment_formula, moment_vs_s_n, simulate_integral
from ordtutte.reductions import s_n_via_generalized
from ordtutte.symbolic import SingularWeightError


def second_moment_oracle(mu, sigma, t):
    """E[(int_0^t f)^2] from E[f_s f_u] = exp(mu (s + u) + sigma^2 min(s, u))."""
    val, _ = integrate.dblquad(
        lambda s, u: math.exp(mu * (s + u) + sigma**2 * s), 0, t, 0, lambda u: u, epsabs=1e-13
    )
    return 2 * val


def test_params_validation():
    with pytest.raises(ValueError):
        GbmParams(0.1, 0.2, t=0)
    with pytest.raises(ValueError):
        GbmParams(0.1, -0.2)
    with pytest.raises(ValueError):
        GbmParams(0.1, 0.2, paths=0)


def test_zero_drift_zero_vol_is_exact():
    x = simulate_integral(GbmParams(0.0, 0.0, t=1.7, steps=37, paths=50))
    assert np.all(x == 1.7)


def test_sigma_zero_is_quadrature():
    p = GbmParams(0.3, 0.0, t=2.0, steps=400, paths=20)
    x = simulate_integral(p)
    exact = math.expm1(0.3 * 2.0) / 0.3
    h = p.t / p.steps
    # trapezoid error bound t h^2 max|f''| / 12
    bound = p.t * h**2 * 0.3**2 * math.exp(0.6) / 12
    assert np.all(np.abs(x - exact) <= bound)
    assert np.ptp(x) == 0


def test_seeded_determinism():
    p = GbmParams(0.05, 0.2, steps=50, paths=2500, seed=7)
    a, b = simulate_integral(p), simulate_integral(p)
    assert np.array_equal(a, b)
    c = simulate_integral(GbmParams(0.05, 0.2, steps=50, paths=2500, seed=8))
    assert not np.array_equal(a, c)


def test_chain_lambdas():
    assert chain_lambdas(0.05, 0.2, 1.0, 1) == [0.05]
    assert chain_lambdas(0.05, 0.2, 2.0, 2) == pytest.approx([2 * (0.05 + 0.04), 0.1])


def test_first_moment_formula():
    assert moment_formula(0.05, 0.2, 1.0, 1) == pytest.approx(math.expm1(0.05) / 0.05, rel=1e-12)
    assert moment_formula(-0.4, 0.7, 2.5, 1) == pytest.approx(math.expm1(-1.0) / -0.4, rel=1e-12)


@pytest.mark.parametrize("mu,sigma,t", [(0.05, 0.2, 1.0), (0.1, 0.5, 2.0), (-0.2, 0.3, 0.5)])
def test_second_moment_formula(mu, sigma, t):
    assert moment_formula(mu, sigma, t, 2) == pytest.approx(second_moment_oracle(mu, sigma, t), rel=1e-9)


def test_gamma_normalization_is_off_by_n():
    mu, sigma, t = 0.05, 0.2, 1.0
    s2 = s_n_via_generalized(chain_lambdas(mu, sigma, t, 2))
    with_gamma = math.gamma(2) * t**2 * s2
    assert second_moment_oracle(mu, sigma, t) / with_gamma == pytest.approx(2.0, rel=1e-9)


def test_singular_moment():
    with pytest.raises((SingularWeightError, ValueError)):
        moment_formula(0.0, 0.2, 1.0, 1)


def test_small_monte_carlo_report():
    p = GbmParams(0.05, 0.2, steps=100, paths=4000, seed=3)
    x = simulate_integral(p)
    r = moment_vs_s_n(p, 1, samples=x)
    assert r.n == 1 and r.mc_stderr > 0
    assert r.z_score < 4
    assert set(r.to_dict()) == {"n", "mc_mean", "mc_stderr", "formula_value", "z_score"}
    with pytest.raises(ValueError):
        moment_vs_s_n(p, 0, samples=x)
