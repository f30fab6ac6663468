"""Special functions against independent series/integral oracles.

Every oracle here is built directly from a defining series or integral
representation, independent of the implementation's own branch structure;
scipy values are asserted on top as a second opinion.
"""

import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st

from afrelay import specfun as sf


# ----------------------------------------------------------------------
# oracles
# ----------------------------------------------------------------------


def j0_series(x, terms=40):
    q = 0.25 * x * x
    term = 1.0
    acc = 1.0
    for k in range(1, terms):
        term *= -q / (k * k)
        acc += term
    return acc


def trapz_oracle(f, lo, hi, n=200_001):
    xs = np.linspace(lo, hi, n)
    return float(np.trapezoid([f(x) for x in xs], xs))


# ----------------------------------------------------------------------
# bessel_j0
# ----------------------------------------------------------------------


def test_j0_at_zero():
    assert sf.bessel_j0(0.0) == 1.0


def test_j0_first_zero_bisection_oracle():
    # locate the first zero of the power series by bisection
    lo, hi = 2.0, 3.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if j0_series(lo) * j0_series(mid) <= 0:
            hi = mid
        else:
            lo = mid
    root = 0.5 * (lo + hi)
    assert root == pytest.approx(2.404825557695773, abs=1e-9)
    assert abs(sf.bessel_j0(root)) < 1e-9


def test_j0_series_oracle_at_5():
    assert sf.bessel_j0(5.0) == pytest.approx(j0_series(5.0), abs=1e-12)


def test_j0_even_and_bounded():
    for x in np.logspace(-3, 2, 50):
        v = sf.bessel_j0(x)
        assert v == sf.bessel_j0(-x)
        assert abs(v) <= 1.0


def test_j0_grid_vs_scipy():
    for x in np.logspace(-3, 2, 50):
        assert sf.bessel_j0(x) == pytest.approx(float(sp.j0(x)), abs=2e-12)


def test_j0_branch_agreement():
    # series and asymptotic branches agree to 1e-10 across the switchover
    for x in np.linspace(11.0, 13.0, 21):
        assert sf._j0_series(x) == pytest.approx(sf._j0_asymptotic(x), abs=1e-10)


def test_j0_rejects_nonfinite():
    with pytest.raises(ValueError):
        sf.bessel_j0(math.inf)


# ----------------------------------------------------------------------
# bessel_k1
# ----------------------------------------------------------------------


def test_k1_small_x_pole():
    x = 1e-4
    assert abs(sf.bessel_k1(x) - 1.0 / x) / (1.0 / x) < 1e-3


def test_k1_integral_representation_oracle():
    # K1(x) = int_0^inf e^{-x cosh t} cosh t dt (tail cut where it underflows)
    def f(t):
        if t > 40.0:
            return 0.0
        c = math.cosh(t)
        return math.exp(-c) * c

    val = sf.integrate(
        f, 0.0, math.inf,
        sf.QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=2000),
    )
    assert sf.bessel_k1(1.0) == pytest.approx(val, abs=1e-9)


def test_k1_monotone_decreasing():
    xs = np.logspace(-2, 1.5, 40)
    vals = [sf.bessel_k1(x) for x in xs]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))
    assert sf.bessel_k1(10.0) < sf.bessel_k1(1.0)


def test_k1_grid_vs_scipy():
    xs = np.logspace(-3, 2, 50)
    for x in xs:
        assert sf.bessel_k1(x) == pytest.approx(float(sp.k1(x)), rel=1e-10)
    scaled = sf.bessel_k1e(xs)
    assert np.allclose(scaled, sp.k1e(xs), rtol=1e-10)


def test_k1_branch_agreement():
    for x in (1.8, 2.0, 2.2, 15.0, 16.0, 17.0):
        a = sf._k1_series_scaled(x) if x < 3 else sf._k1_asymptotic_scaled(x)
        b = float(sf.bessel_k1e(np.array([x]))[0])
        assert a == pytest.approx(b, rel=1e-10)


def test_k1_rejects_nonpositive():
    with pytest.raises(ValueError):
        sf.bessel_k1(0.0)
    with pytest.raises(ValueError):
        sf.bessel_k1(-1.0)


# ----------------------------------------------------------------------
# erfc / gauss_q
# ----------------------------------------------------------------------


def test_erfc_at_zero():
    assert sf.erfc(0.0) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(-8, 8))
@settings(max_examples=200, deadline=None)
def test_erfc_reflection(x):
    assert sf.erfc(x) + sf.erfc(-x) == pytest.approx(2.0, abs=1e-13)


def test_erfc_quadrature_oracle():
    # erfc(1) = (2/sqrt(pi)) int_1^inf e^{-t^2} dt
    val = 2.0 / math.sqrt(math.pi) * sf.integrate(
        lambda t: math.exp(-t * t), 1.0, math.inf,
        sf.QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, max_subdivisions=2000),
    )
    assert sf.erfc(1.0) == pytest.approx(val, abs=1e-10)


def test_erfc_grid_vs_scipy():
    for x in np.linspace(-6, 10, 81):
        assert sf.erfc(x) == pytest.approx(float(sp.erfc(x)), rel=5e-13, abs=1e-300)
    for x in np.logspace(-3, 2, 40):
        assert sf.erfcx(x) == pytest.approx(float(sp.erfcx(x)), rel=5e-13)


def test_gauss_q():
    assert sf.gauss_q(0.0) == 0.5
    for x in (-2.0, -0.3, 0.7, 3.1):
        assert sf.gauss_q(x) == pytest.approx(1.0 - sf.gauss_q(-x), abs=1e-14)
    val = sf.integrate(
        lambda t: math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi),
        3.0, math.inf,
        sf.QuadratureSpec(abs_tol=1e-15, rel_tol=1e-12, max_subdivisions=2000),
    )
    assert sf.gauss_q(3.0) == pytest.approx(val, abs=1e-10)


# ----------------------------------------------------------------------
# expint_ei
# ----------------------------------------------------------------------


def test_ei_series_oracle_negative():
    # Ei(x) = ge + log|x| + sum x^r/(r r!) continued to machine convergence
    x = -1.0
    acc = sf.EULER_GAMMA + math.log(abs(x))
    term = 1.0
    for r in range(1, 200):
        term *= x / r
        acc += term / r
        if abs(term) / r < 1e-18:
            break
    assert sf.expint_ei(-1.0) == pytest.approx(acc, rel=1e-12)


def test_ei_asymptotic_tail():
    assert sf.expint_ei(-20.0) == pytest.approx(-math.exp(-20.0) / 20.0, rel=0.05)


def test_ei_log_singularity():
    assert sf.expint_ei(-1e-8) < -17.0
    with pytest.raises(ValueError):
        sf.expint_ei(0.0)


def test_ei_negative_sign():
    for x in np.logspace(-3, 2, 30):
        assert sf.expint_ei(-x) < 0


def test_ei_grid_vs_scipy():
    for x in np.logspace(-3, 2.5, 60):
        assert sf.expint_ei(-x) == pytest.approx(float(sp.expi(-x)), rel=1e-12)
    for x in np.logspace(-3, 2.2, 50):
        assert sf.expint_ei(x) == pytest.approx(float(sp.expi(x)), rel=1e-12)
    for x in np.logspace(-2, 2.8, 50):
        assert sf.expint_e1_scaled(x) == pytest.approx(
            float(sp.exp1(x) * np.exp(x)), rel=1e-12
        )


# ----------------------------------------------------------------------
# whittaker_w
# ----------------------------------------------------------------------


def k_bessel_quad(nu_arg, order):
    # independent K_nu via its cosh integral, trapezoid on a dense grid
    return trapz_oracle(
        lambda t: math.exp(-nu_arg * math.cosh(t)) * math.cosh(order * t), 0.0, 30.0
    )


def test_whittaker_quadrature_oracle():
    # test-local U(3/2, 2, x) by trapezoid on the Laplace representation,
    # t = u^2 so the integrand is smooth at the origin
    x = 0.5
    u_val = trapz_oracle(
        lambda u: 2.0 * math.exp(-x * u * u) * u * u / math.sqrt(1.0 + u * u),
        0.0, 30.0, n=2_000_001,
    ) / math.gamma(1.5)
    ref = math.exp(-0.5 * x) * x * u_val
    assert sf.whittaker_w(-0.5, 0.5, x) == pytest.approx(ref, abs=1e-8)


def test_whittaker_k_bessel_identity():
    # W_{-1/2,1/2}(x) = (x/sqrt(pi)) (K1(x/2) - K0(x/2)), derived via
    # t = sinh^2 in the U integral -- fully independent oracle
    for x in (0.2, 1.0, 4.0):
        ref = x / math.sqrt(math.pi) * (k_bessel_quad(x / 2, 1) - k_bessel_quad(x / 2, 0))
        assert sf.whittaker_w(-0.5, 0.5, x) == pytest.approx(ref, rel=1e-7)


def test_whittaker_index_symmetry():
    for x in (0.3, 0.7, 2.0):
        assert sf.whittaker_w(-0.5, 0.5, x) == pytest.approx(
            sf.whittaker_w(-0.5, -0.5, x), rel=1e-8
        )


def test_whittaker_scaled_tail_decreasing():
    vals = [math.exp(x / 2) * sf.whittaker_w(-0.5, 0.5, x) for x in (5.0, 10.0, 20.0, 40.0)]
    assert all(math.isfinite(v) for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_whittaker_rejects_bad_domain():
    with pytest.raises(ValueError):
        sf.whittaker_w(-0.5, 0.5, 0.0)
    with pytest.raises(ValueError):
        sf.whittaker_w(-0.5, 0.5, -1.0)


# ----------------------------------------------------------------------
# hyp2f1
# ----------------------------------------------------------------------


def hyp2f1_series(a, b, c, z, terms=2000):
    term = 1.0
    acc = 1.0
    for n in range(terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        acc += term
        if abs(term) < 1e-18 * abs(acc):
            break
    return acc


def test_hyp2f1_empty_product():
    assert sf.hyp2f1(2.5, 1.5, 2.0, 0.0) == 1.0


def test_hyp2f1_log_closed_form():
    z = 0.5
    assert sf.hyp2f1(1.0, 1.0, 2.0, z) == pytest.approx(-math.log(1 - z) / z, abs=1e-10)


def test_hyp2f1_series_oracle():
    assert sf.hyp2f1(2.5, 1.5, 2.0, 0.3) == pytest.approx(
        hyp2f1_series(2.5, 1.5, 2.0, 0.3), rel=1e-14
    )


def test_hyp2f1_grid_vs_scipy():
    for z in np.linspace(-0.95, 0.95, 39):
        if z == 0:
            continue
        assert sf.hyp2f1(2.5, 1.5, 2.0, z) == pytest.approx(
            float(sp.hyp2f1(2.5, 1.5, 2.0, z)), rel=1e-9
        )
    # near-unit argument (where the BER kernel needs it)
    for z in (0.99, 0.999, 0.99999):
        assert sf.hyp2f1(2.5, 1.5, 2.0, z) == pytest.approx(
            float(sp.hyp2f1(2.5, 1.5, 2.0, z)), rel=1e-8
        )


def test_hyp2f1_domain_errors():
    with pytest.raises(ValueError):
        sf.hyp2f1(1.0, 1.0, 0.0, 0.3)      # c non-positive integer
    with pytest.raises(ValueError):
        sf.hyp2f1(2.5, 1.5, 2.0, 1.0)      # divergent edge reported


# ----------------------------------------------------------------------
# integrate
# ----------------------------------------------------------------------


def test_integrate_exponential():
    assert sf.integrate(lambda x: math.exp(-x), 0.0, math.inf) == pytest.approx(
        1.0, abs=1e-10
    )


def test_integrate_endpoint_singularity():
    assert sf.integrate(lambda x: x ** -0.5, 0.0, 1.0) == pytest.approx(2.0, abs=1e-8)


def test_integrate_gamma_half():
    val = sf.integrate(lambda x: math.exp(-x) / math.sqrt(x), 0.0, math.inf)
    assert val == pytest.approx(math.sqrt(math.pi), abs=1e-8)


def test_integrate_fails_loudly_not_silently():
    spec = sf.QuadratureSpec(abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=3)
    with pytest.raises(sf.IntegrationError):
        sf.integrate(lambda x: math.cos(137.0 * x), 0.0, 60.0, spec)


def test_integrate_rejects_bad_limits():
    with pytest.raises(ValueError):
        sf.integrate(lambda x: x, 1.0, 0.0)
    with pytest.raises(ValueError):
        sf.integrate(lambda x: x, math.nan, 1.0)


def test_quadrature_spec_invariants():
    with pytest.raises(ValueError):
        sf.QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        sf.QuadratureSpec(max_subdivisions=0)


# ----------------------------------------------------------------------
# gamma
# ----------------------------------------------------------------------


def test_gamma_hard_anchors():
    assert sf.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert sf.gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-14)


def test_gamma_precision_contract():
    # relative error < 1e-12 on (0.5, 30)
    for x in np.linspace(0.5, 30.0, 119):
        ref = math.exp(math.lgamma(x))
        assert abs(sf.gamma(x) - ref) / ref < 1e-12


def test_gamma_poles_rejected():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(ValueError):
            sf.gamma(x)
