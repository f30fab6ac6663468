"""Channel statistics against transcription, quadrature and MC oracles."""

import math

import numpy as np
import pytest

from conftest import faithful_link_mc

from afrelay.channel import (
    CsiPair,
    FadingConfig,
    HopStatistics,
    hop1_moment,
    hop_statistics,
    jakes_rho,
    ordered_cdf_hop2,
    ordered_pdf_hop1,
    sample_csi_pair,
)
from afrelay.specfun import IntegrationError, QuadratureSpec, integrate

QUAD = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-9, max_subdivisions=3000)


def j0_series(x, terms=60):
    q = 0.25 * x * x
    term, acc = 1.0, 1.0
    for k in range(1, terms):
        term *= -q / (k * k)
        acc += term
    return acc


# ----------------------------------------------------------------------
# jakes_rho
# ----------------------------------------------------------------------


def test_jakes_perfect_csi_at_zero_delay():
    for fd in (0.0, 10.0, 5000.0):
        assert jakes_rho(fd, 0.0) == 1.0


def test_jakes_first_zero_vicinity():
    # fd * Td = 0.3827 puts 2 pi fd Td at the first Bessel zero
    assert abs(jakes_rho(0.3827, 1.0)) < 0.01


def test_jakes_series_oracle():
    assert jakes_rho(0.1, 1.0) == pytest.approx(j0_series(0.2 * math.pi), abs=1e-12)


def test_jakes_rejects_negative():
    with pytest.raises(ValueError):
        jakes_rho(-1.0, 1.0)
    with pytest.raises(ValueError):
        jakes_rho(1.0, -1.0)


# ----------------------------------------------------------------------
# sample_csi_pair
# ----------------------------------------------------------------------


def test_csi_pair_rho_one_is_exact_copy():
    rng = np.random.Generator(np.random.Philox(key=3))
    for _ in range(100):
        pair = sample_csi_pair(rng, 1.0, 1.0)
        assert pair.outdated == pair.current


def _pair_batch(rho, n, seed=11):
    rng = np.random.Generator(np.random.Philox(key=seed))
    cur = np.empty(n, dtype=complex)
    out = np.empty(n, dtype=complex)
    for i in range(n):
        p = sample_csi_pair(rng, 1.0, rho)
        cur[i], out[i] = p.current, p.outdated
    return cur, out


def test_csi_pair_uncorrelated_at_rho_zero():
    n = 400_000
    cur, out = _pair_batch(0.0, n)
    corr = np.corrcoef(np.abs(cur) ** 2, np.abs(out) ** 2)[0, 1]
    assert abs(corr) < 0.005


def test_csi_pair_complex_correlation():
    n = 400_000
    rho = 0.95
    cur, out = _pair_batch(rho, n)
    num = np.mean(cur * np.conj(out))
    corr = num.real / math.sqrt(np.mean(np.abs(cur) ** 2) * np.mean(np.abs(out) ** 2))
    assert corr == pytest.approx(math.sqrt(rho), abs=0.01)


def test_csi_pair_mean_power():
    n = 200_000
    cur, out = _pair_batch(0.7, n, seed=5)
    assert np.mean(np.abs(cur) ** 2) == pytest.approx(1.0, abs=0.01)
    assert np.mean(np.abs(out) ** 2) == pytest.approx(1.0, abs=0.01)


def test_csi_pair_rejects_bad_args():
    rng = np.random.Generator(np.random.Philox(key=1))
    with pytest.raises(ValueError):
        sample_csi_pair(rng, 0.0, 0.5)
    with pytest.raises(ValueError):
        sample_csi_pair(rng, 1.0, 1.5)


# ----------------------------------------------------------------------
# hop_statistics coefficient tables
# ----------------------------------------------------------------------


def test_stats_single_relay_rows():
    cfg = FadingConfig(1, 1, 10.0, 10.0, 0.9, 0.9)
    st = hop_statistics(cfg)
    assert st.p[0] == pytest.approx(1.0)
    assert st.s[0] == pytest.approx(1.0)
    assert st.q[0, 0] == 1.0 and st.r[0, 0] == 1.0 and st.t[0, 0] == 1.0
    assert st.q[0, 1] == 0.0 and st.t[0, 1] == 0.0      # N-k+n = 0 kills slot 2
    assert st.u[0, 0] == pytest.approx(1.0)             # gamma1/gamma2


def test_stats_full_correlation_denominator():
    # at rho1 = 1 the (1-rho1) term vanishes and D = gbar exactly
    cfg = FadingConfig(3, 2, 10.0, 5.0, 1.0, 0.4)
    st = hop_statistics(cfg)
    q_off = np.array([1.0, 2.0])                        # N-k+n for n=0,1
    assert np.allclose(st.r[:, 1], (q_off + 1.0) * cfg.gamma1_bar / st.gbar)
    assert np.allclose(st.q[:, 1], q_off * cfg.gamma2_bar / st.gbar)


def test_stats_transcription_oracle():
    # independent literal re-derivation of every table entry
    n_r, k = 3, 2
    g1, g2, rho1, rho2 = 10.0, 10.0, 0.9, 0.9
    cfg = FadingConfig(n_r, k, g1, g2, rho1, rho2)
    st = hop_statistics(cfg)
    gbar = g1 * g2 / (g1 + g2)
    assert st.gbar == pytest.approx(gbar, rel=1e-15)
    for n in range(k):
        q = n_r - k + n
        comb = math.comb(k - 1, n)
        p_ref = (-1) ** n * comb / (1.0 + (g2 / gbar) * q)
        s_ref = (-1) ** n * comb / (1.0 + (g1 / gbar) * q)
        d1 = rho1 * gbar + (1 - rho1) * (q + 1) * g1
        d2 = rho2 * gbar + (1 - rho2) * (q + 1) * g2
        assert st.p[n] == pytest.approx(p_ref, rel=1e-14)
        assert st.s[n] == pytest.approx(s_ref, rel=1e-14)
        assert st.q[n, 1] == pytest.approx(q * g2 / d1, rel=1e-14)
        assert st.r[n, 1] == pytest.approx((q + 1) * g1 / d1, rel=1e-14)
        assert st.t[n, 1] == pytest.approx(q * g1 / ((q + 1) * g2), rel=1e-14)
        assert st.u[n, 0] == pytest.approx(g1 / g2, rel=1e-14)
        assert st.u[n, 1] == pytest.approx((q + 1) * g1 / d2, rel=1e-14)
    assert st.binom == pytest.approx(math.comb(n_r, k), rel=1e-12)


def test_stats_gbar_bounded_by_hops():
    cfg = FadingConfig(2, 1, 7.0, 3.0, 0.5, 0.5)
    st = hop_statistics(cfg)
    assert st.gbar <= min(cfg.gamma1_bar, cfg.gamma2_bar)


def test_fading_config_invariants():
    with pytest.raises(ValueError):
        FadingConfig(0, 1, 1.0, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        FadingConfig(2, 3, 1.0, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        FadingConfig(2, 1, -1.0, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        FadingConfig(2, 1, 1.0, 1.0, 1.5, 0.5)


# ----------------------------------------------------------------------
# pdf / cdf / moments
# ----------------------------------------------------------------------

GRID = [
    (n, k, rho)
    for n in (1, 2, 3, 5)
    for k in range(1, n + 1)
    for rho in (0.0, 0.5, 0.9, 1.0)
]


@pytest.mark.parametrize("n_r,k,rho", GRID)
def test_pdf_normalizes(n_r, k, rho):
    cfg = FadingConfig(n_r, k, 8.0, 12.0, rho, rho)
    st = hop_statistics(cfg)
    total = integrate(lambda x: ordered_pdf_hop1(x, cfg, st), 0.0, math.inf, QUAD)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_pdf_single_relay_is_exponential():
    cfg = FadingConfig(1, 1, 10.0, 10.0, 0.9, 0.9)
    st = hop_statistics(cfg)
    for x in (0.0, 0.5, 3.0, 30.0):
        assert ordered_pdf_hop1(x, cfg, st) == pytest.approx(
            math.exp(-x / 10.0) / 10.0, abs=1e-12
        )


def test_pdf_matches_faithful_mc_histogram():
    # KS distance of the closed-form cdf vs 2e6 selected-link draws
    for (n_r, k, rho) in [(3, 3, 1.0), (3, 2, 0.6), (2, 1, 0.9)]:
        cfg = FadingConfig(n_r, k, 10.0, 10.0, rho, rho)
        st = hop_statistics(cfg)
        n = 2_000_000
        g1, _, _ = faithful_link_mc(cfg, n, seed=17)
        xs = np.sort(g1)
        w = st.p[:, None] * st.q / st.r
        cdf = 1.0 - cfg.rank * st.binom * np.einsum(
            "nj,xnj->x", w, np.exp(-st.r * xs[:, None, None] / cfg.gamma1_bar)
        )
        ks = np.max(np.abs(cdf - np.arange(1, n + 1) / n))
        assert ks < 0.002, f"KS={ks} at N={n_r} k={k} rho={rho}"


def test_cdf_hop2_boundary_values():
    cfg = FadingConfig(3, 2, 10.0, 5.0, 0.8, 0.8)
    st = hop_statistics(cfg)
    assert ordered_cdf_hop2(0.0, cfg, st) == pytest.approx(0.0, abs=1e-9)
    assert ordered_cdf_hop2(1e3 * cfg.gamma2_bar, cfg, st) > 1.0 - 1e-4


def test_cdf_hop2_nondecreasing():
    cfg = FadingConfig(3, 3, 10.0, 5.0, 0.7, 0.7)
    st = hop_statistics(cfg)
    xs = np.linspace(0.0, 100.0, 400)
    vals = ordered_cdf_hop2(xs, cfg, st)
    assert np.all(np.diff(vals) >= -1e-12)


def test_cdf_hop2_matches_faithful_mc_asymmetric():
    # asymmetric average SNRs pin the corrected U-table numerator
    cfg = FadingConfig(2, 1, 10.0, 5.0, 0.8, 0.8)
    st = hop_statistics(cfg)
    n = 2_000_000
    _, g2, _ = faithful_link_mc(cfg, n, seed=23)
    for x in (1.0, 5.0, 20.0):
        emp = float(np.mean(g2 < x))
        ref = ordered_cdf_hop2(x, cfg, st)
        sd = math.sqrt(emp * (1 - emp) / n)
        assert abs(emp - ref) < 3.0 * sd, f"x={x}: emp={emp} ref={ref}"


def test_pdf_cdf_reject_negative_snr():
    cfg = FadingConfig(2, 2, 10.0, 10.0, 0.9, 0.9)
    st = hop_statistics(cfg)
    with pytest.raises(ValueError):
        ordered_pdf_hop1(-1.0, cfg, st)
    with pytest.raises(ValueError):
        ordered_cdf_hop2(-0.5, cfg, st)


def test_moment_single_relay():
    cfg = FadingConfig(1, 1, 10.0, 4.0, 0.9, 0.9)
    st = hop_statistics(cfg)
    assert hop1_moment(1, cfg, st) == pytest.approx(10.0, abs=1e-9)
    assert hop1_moment(2, cfg, st) == pytest.approx(200.0, rel=1e-12)


def test_moment_matches_pdf_quadrature():
    # internal consistency of the moment and the pdf, 1e-6 relative
    for (n_r, k, rho) in [(3, 3, 0.9), (2, 2, 0.5), (5, 3, 0.0)]:
        cfg = FadingConfig(n_r, k, 8.0, 12.0, rho, rho)
        st = hop_statistics(cfg)
        m1 = hop1_moment(1, cfg, st)
        quad = integrate(
            lambda x: x * ordered_pdf_hop1(x, cfg, st), 0.0, math.inf, QUAD
        )
        assert abs(m1 - quad) / m1 < 1e-6


def test_moment_matches_faithful_mc():
    cfg = FadingConfig(3, 3, 10.0, 10.0, 0.9, 0.9)
    st = hop_statistics(cfg)
    n = 2_000_000
    g1, _, _ = faithful_link_mc(cfg, n, seed=29)
    se = float(np.std(g1)) / math.sqrt(n)
    assert abs(float(np.mean(g1)) - hop1_moment(1, cfg, st)) < 3.0 * se


def test_moment_rejects_bad_order():
    cfg = FadingConfig(1, 1, 10.0, 10.0, 0.9, 0.9)
    with pytest.raises(ValueError):
        hop1_moment(0, cfg, hop_statistics(cfg))
