"""Closed-form and asymptotic performance of the selected relay link.

Outage probability, average BER and ergodic capacity for the three gain
policies, evaluated from the precomputed channel mixture tables and the
Bussgang distortion factor zeta. Each quadruple sum runs over the
(P, Q, R) hop-1 and (S, T, U) hop-2 tables; alternating signs live in P
and S, so sums are computed with plain numpy reductions and the result is
guarded: a probability further than 1e-9 outside [0, 1] raises instead of
being clamped silently.

The exact outage expressions pair a sqrt * exp * K1 kernel (fixed gain and
variable gain II); the variable-gain-I family is an approximation built on
the selection-time hop-1 mixture (rates A, weights Q0) smeared through the
CSI correlation, with mu/kappa/a the per-term decay, tilt and shift
constants. BER closed forms integrate those CDFs against the Gaussian-tail
kernel; every one of them is cross-checkable against direct quadrature of
the same CDF (ber_quadrature), and high-SNR asymptotes against their exact
counterparts. Ergodic capacity integrates the CCDF against 1/(1+x) with
the half-duplex 1/2 factor; the variable-gain-I case also has a scalar
exponential-integral closed form (capacity_vgi_closed_form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hpa
from .channel import FadingConfig, HopStatistics, hop1_moment
from .specfun import (
    EULER_GAMMA,
    QuadratureSpec,
    _hyperu,
    bessel_k1e,
    expint_e1_scaled,
    expint_ei,
    gamma as gamma_fn,
    hyp2f1,
    integrate,
)
from .relaying import RelayScheme

__all__ = [
    "BPSK",
    "ModulationParams",
    "PerformancePoint",
    "ber",
    "ber_asymptotic",
    "ber_quadrature",
    "capacity",
    "capacity_ceiling",
    "capacity_vgi_closed_form",
    "diversity_gain",
    "effective_zeta",
    "outage",
    "outage_asymptotic",
    "outage_fg",
    "outage_fg_asymptotic",
    "outage_vgi",
    "outage_vgii",
    "outage_vgii_asymptotic",
]


@dataclass(frozen=True)
class ModulationParams:
    """Generic alpha Q(sqrt(2 beta x)) error-rate parameterization."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("modulation parameters must be positive")


BPSK = ModulationParams(alpha=1.0, beta=1.0)


@dataclass
class PerformancePoint:
    """One sweep point with both engines' numbers side by side.

    provenance records which evaluation path produced each column
    (closed-form | asymptote | quadrature | mc) so downstream plots can
    not silently mix engines.
    """

    snr_db: float
    outage_analytic: float = math.nan
    outage_asymptotic: float = math.nan
    outage_mc: float = math.nan
    outage_mc_ci: float = math.nan
    ber_analytic: float = math.nan
    ber_mc: float = math.nan
    ber_mc_ci: float = math.nan
    capacity_analytic: float = math.nan
    capacity_mc: float = math.nan
    capacity_mc_ci: float = math.nan
    capacity_ceiling: float = math.nan
    error: str | None = None
    provenance: dict = field(
        default_factory=lambda: {
            "outage_analytic": "closed-form",
            "outage_asymptotic": "asymptote",
            "outage_mc": "mc",
            "ber_analytic": "closed-form",
            "ber_mc": "mc",
            "capacity_analytic": "quadrature",
            "capacity_mc": "mc",
            "capacity_ceiling": "closed-form",
        }
    )


def _as_probability(value: float, label: str) -> float:
    if math.isnan(value) or value < -1e-9 or value > 1.0 + 1e-9:
        raise ArithmeticError(
            f"{label} evaluated to {value!r}, outside [0, 1] beyond the 1e-9 "
            "numerical guard; coefficient sums are unreliable here"
        )
    return min(max(value, 0.0), 1.0)


def effective_zeta(
    bp: hpa.BussgangParams,
    cfg: FadingConfig,
    stats: HopStatistics,
    sigma_sq: float = 1.0,
    noise_var: float = 1.0,
) -> float:
    """Frozen per-SNR-point zeta using the statistical (fixed) gain.

    G sigma0^2 = sigma^2 / (E[g1]+1), so zeta = 1 + stau (E[g1]+1)/(d^2 s^2);
    it grows with the average SNR, which is what creates the outage floors
    and the capacity ceiling under distortion.
    """
    m1 = hop1_moment(1, cfg, stats)
    gain_power = sigma_sq / (noise_var * (m1 + 1.0))
    return hpa.zeta(bp, gain_power, noise_var)


# ----------------------------------------------------------------------
# Outage probability
# ----------------------------------------------------------------------


def _quad_tables(stats: HopStatistics):
    # Broadcast helpers: first two axes (n, j) for P/Q/R, last two (m, i)
    # for S/T/U -> 4-D weight and per-term R/U grids.
    pq = (stats.p[:, None] * stats.q)[:, :, None, None]
    st = (stats.s[:, None] * stats.t)[None, None, :, :]
    w = pq * st
    r = stats.r[:, :, None, None]
    u = stats.u[None, None, :, :]
    return w, r, u


def _prefactor(cfg: FadingConfig, stats: HopStatistics) -> float:
    # k^2 C(N,k)^2 shared by every quadruple sum.
    return cfg.rank * cfg.rank * math.exp(2.0 * stats.log_binom)


def outage_fg(
    gamma_th: float, cfg: FadingConfig, stats: HopStatistics, zeta: float
) -> float:
    """Fixed-gain outage probability (exact under the product-form law).

    1 - (2 k^2 / g1) C(N,k)^2 sum S P T Q sqrt(U c x / R)
        exp(-R zeta x / g1) K1(2 sqrt(U R c x) / g1),  c = E[g1] + zeta.
    """
    _check_outage_args(gamma_th, zeta)
    g1 = cfg.gamma1_bar
    c = hop1_moment(1, cfg, stats) + zeta
    w, r, u = _quad_tables(stats)
    karg = 2.0 / g1 * np.sqrt(u * r * c * gamma_th)
    # exp(-R zeta x/g1) K1(karg) = exp(-R zeta x/g1 - karg) k1e(karg)
    log_env = -r * zeta * gamma_th / g1 - karg
    terms = w * np.sqrt(u * c * gamma_th / r) * np.exp(log_env) * bessel_k1e(karg)
    val = 1.0 - 2.0 * _prefactor(cfg, stats) / g1 * float(np.sum(terms))
    return _as_probability(val, "fixed-gain outage")


def outage_fg_asymptotic(
    gamma_th: float, cfg: FadingConfig, stats: HopStatistics, zeta: float
) -> float:
    """High-SNR fixed-gain outage, linear in the threshold.

    Derived from the min(g1, g1 g2/c) bound; each term combines log, exp
    and Ei(-Uc/g1) pieces whose alternating-sign sum produces the actual
    diversity behaviour.
    """
    _check_outage_args(gamma_th, zeta)
    g1 = cfg.gamma1_bar
    c = hop1_moment(1, cfg, stats) + zeta
    w, r, u = _quad_tables(stats)
    z = u * c / g1
    e1s = np.vectorize(expint_e1_scaled)(z)
    # z log(g1/R) + e^{-z} + z (1 - ge - log z) - z E1(z), E1 = e^{-z} e1s
    bracket = (
        z * np.log(g1 / r)
        + np.exp(-z) * (1.0 - z * e1s)
        + z * (1.0 - EULER_GAMMA - np.log(z))
    )
    val = _prefactor(cfg, stats) * gamma_th / g1 * float(np.sum(w * bracket))
    return _as_probability(val, "fixed-gain asymptotic outage")


def outage_vgii(
    gamma_th: float, cfg: FadingConfig, stats: HopStatistics, zeta: float
) -> float:
    """Variable-gain-II outage probability (exact under the product form).

    Same K1 kernel as the fixed-gain case with c x -> zeta x (1+x) and the
    envelope exp(-x (U + zeta R)/g1).
    """
    _check_outage_args(gamma_th, zeta)
    g1 = cfg.gamma1_bar
    w, r, u = _quad_tables(stats)
    s = zeta * gamma_th * (1.0 + gamma_th)
    karg = 2.0 / g1 * np.sqrt(u * r * s)
    log_env = -gamma_th * (u + zeta * r) / g1 - karg
    terms = w * np.sqrt(u * s / r) * np.exp(log_env) * bessel_k1e(karg)
    val = 1.0 - 2.0 * _prefactor(cfg, stats) / g1 * float(np.sum(terms))
    return _as_probability(val, "variable-gain-II outage")


def outage_vgii_asymptotic(
    gamma_th: float, cfg: FadingConfig, stats: HopStatistics, zeta: float
) -> float:
    """First-order high-SNR variable-gain-II outage: x/g1 sum SPTQ (zeta + U/R)."""
    _check_outage_args(gamma_th, zeta)
    g1 = cfg.gamma1_bar
    w, r, u = _quad_tables(stats)
    val = (
        _prefactor(cfg, stats)
        * gamma_th
        / g1
        * float(np.sum(w * (zeta + u / r)))
    )
    return _as_probability(val, "variable-gain-II asymptotic outage")


def _vgi_term_tables(cfg: FadingConfig, stats: HopStatistics, zeta: float, rho1: float):
    # Selection-time hop-1 mixture: rates A (rho-free R) and weights Q0
    # (rho-free Q); the correlation enters through the shifted rate
    # a = rho/(1-rho) + A, the tilt kappa and the decay mu.
    k = cfg.rank
    g1, g2 = cfg.gamma1_bar, cfg.gamma2_bar
    gbar = stats.gbar
    q_off = np.arange(k, dtype=float) + (cfg.n_relays - k)
    a_rate = np.stack([np.ones(k), (q_off + 1.0) * g1 / gbar], axis=1)
    q0 = np.stack([np.ones(k), q_off * g2 / gbar], axis=1)

    one_m = 1.0 - rho1
    a = rho1 / one_m + a_rate                              # (k, 2)
    kappa = a_rate / (g1 * (rho1 + one_m * a_rate))        # (k, 2), > 0
    u = stats.u                                            # (m, 2)

    a4 = a[:, :, None, None]
    arate4 = a_rate[:, :, None, None]
    kap4 = kappa[:, :, None, None]
    u4 = u[None, None, :, :]
    mu = (zeta + rho1 * (u4 - a4 * zeta) / (one_m * a4 * a4)) / (one_m * g1)
    w = (
        (stats.p[:, None] * q0)[:, :, None, None]
        * (stats.s[:, None] * stats.t)[None, None, :, :]
    )
    return w, a4, arate4, kap4, u4, mu


def outage_vgi(
    gamma_th: float,
    cfg: FadingConfig,
    stats: HopStatistics,
    zeta: float,
    rho1: float,
) -> float:
    """Variable-gain-I outage approximation (requires rho1 < 1 strictly).

    At rho1 = 1 the scheme coincides with variable gain II; use
    outage_vgii there. Per term the survival mass is
    e^{-mu x} [g1/A - (U x/((1-rho) a^2)) e^z E1(z)], z = kappa U x / a.
    """
    _check_outage_args(gamma_th, zeta)
    if not (0.0 <= rho1 < 1.0):
        raise ValueError(
            "variable-gain-I closed form needs rho1 < 1; at rho1 = 1 the "
            "scheme equals variable gain II (use outage_vgii)"
        )
    g1 = cfg.gamma1_bar
    w, a, a_rate, kappa, u, mu = _vgi_term_tables(cfg, stats, zeta, rho1)
    z = kappa * u * gamma_th / a
    e1s = np.vectorize(expint_e1_scaled)(np.maximum(z, 1e-300))
    tail = np.where(z > 0, u * gamma_th / ((1.0 - rho1) * a * a) * e1s, 0.0)
    bracket = g1 / a_rate - tail
    val = 1.0 - _prefactor(cfg, stats) / g1 * float(
        np.sum(w * np.exp(-mu * gamma_th) * bracket)
    )
    return _as_probability(val, "variable-gain-I outage")


def outage(
    scheme: RelayScheme,
    gamma_th: float,
    cfg: FadingConfig,
    stats: HopStatistics,
    zeta: float,
) -> float:
    """Scheme dispatcher; redirects VGI with rho1 > 0.999 to the VGII form."""
    if scheme is RelayScheme.FG:
        return outage_fg(gamma_th, cfg, stats, zeta)
    if scheme is RelayScheme.VGII:
        return outage_vgii(gamma_th, cfg, stats, zeta)
    if scheme is RelayScheme.VGI:
        if cfg.rho1 > 0.999:
            return outage_vgii(gamma_th, cfg, stats, zeta)
        return outage_vgi(gamma_th, cfg, stats, zeta, cfg.rho1)
    raise TypeError(f"unknown scheme: {scheme!r}")


def outage_asymptotic(
    scheme: RelayScheme,
    gamma_th: float,
    cfg: FadingConfig,
    stats: HopStatistics,
    zeta: float,
) -> float:
    """High-SNR outage dispatcher; no asymptote exists for variable gain I."""
    if scheme is RelayScheme.FG:
        return outage_fg_asymptotic(gamma_th, cfg, stats, zeta)
    if scheme is RelayScheme.VGII:
        return outage_vgii_asymptotic(gamma_th, cfg, stats, zeta)
    raise ValueError("no high-SNR outage asymptote for variable gain I")


def _check_outage_args(gamma_th: float, zeta: float):
    if not gamma_th > 0:
        raise ValueError("gamma_th must be positive")
    if not zeta >= 1.0:
        raise ValueError("zeta must be >= 1")


# ----------------------------------------------------------------------
# Average BER
# ----------------------------------------------------------------------

_BER_QUAD = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-7, max_subdivisions=3000)


def ber(
    scheme: RelayScheme,
    modulation: ModulationParams,
    cfg: FadingConfig,
    stats: HopStatistics,
    zeta: float,
) -> float:
    """Closed-form average BER for the given scheme.

    The fixed-gain expression is exact (Whittaker kernel); the variable
    gain ones inherit the approximations of their CDFs. All three reduce
    to alpha/2 as the channel degenerates.
    """
    al, be = modulation.alpha, modulation.beta
    g1 = cfg.gamma1_bar
    if scheme is RelayScheme.FG:
        c = hop1_moment(1, cfg, stats) + zeta
        w, r, u = _quad_tables(stats)
        p = be * g1 + r * zeta
        x = u * r * c / (g1 * p)
        # e^{x/2} W_{-1/2,1/2}(x) = x U(3/2, 2, x): overflow-free at any x.
        scaled_w = np.vectorize(lambda t: t * _hyperu(1.5, 2.0, t))(x)
        terms = w / (r * np.sqrt(p)) * scaled_w
        val = al / 2.0 - (
            al
            * _prefactor(cfg, stats)
            / 2.0
            * math.sqrt(be * g1 / math.pi)
            * gamma_fn(0.5)
            * gamma_fn(1.5)
            * float(np.sum(terms))
        )
        return _as_probability(val, "fixed-gain BER")
    if scheme is RelayScheme.VGII:
        w, r, u = _quad_tables(stats)
        var_rho = 2.0 / g1 * np.sqrt(u * zeta * r)
        omega = be + (u + zeta * r) / g1
        zarg = (omega - var_rho) / (omega + var_rho)
        f21 = np.vectorize(lambda t: hyp2f1(2.5, 1.5, 2.0, t))(zarg)
        terms = (
            w
            * np.sqrt(zeta * u / r)
            * var_rho
            / (omega + var_rho) ** 2.5
            * f21
        )
        val = al / 2.0 - (
            2.0
            * al
            * _prefactor(cfg, stats)
            * math.sqrt(be)
            / g1
            * gamma_fn(0.5)
            * gamma_fn(2.5)
            * float(np.sum(terms))
        )
        return _as_probability(val, "variable-gain-II BER")
    if scheme is RelayScheme.VGI:
        if cfg.rho1 > 0.999:
            return ber(RelayScheme.VGII, modulation, cfg, stats, zeta)
        rho1 = cfg.rho1
        w, a, a_rate, kappa, u, mu = _vgi_term_tables(cfg, stats, zeta, rho1)
        q = be + mu
        # Gamma-kernel integrals of the log-expanded survival mass; the
        # gamma log term integrates to psi(3/2) - log q with
        # psi(3/2) = 2 - ge - 2 log 2.
        coeff = u / ((1.0 - rho1) * a * a)
        bracket = (g1 / a_rate) / np.sqrt(q) + coeff * (
            2.0 - math.log(4.0) + np.log(kappa * u / (a * q))
        ) / (2.0 * q ** 1.5)
        val = al / 2.0 - (
            al
            * math.sqrt(be)
            / 2.0
            * _prefactor(cfg, stats)
            / g1
            * float(np.sum(w * bracket))
        )
        return _as_probability(val, "variable-gain-I BER")
    raise TypeError(f"unknown scheme: {scheme!r}")


def ber_quadrature(
    scheme: RelayScheme,
    modulation: ModulationParams,
    cfg: FadingConfig,
    stats: HopStatistics,
    zeta: float,
) -> float:
    """Average BER by direct quadrature of the Gaussian-tail kernel.

    (alpha sqrt(beta) / 2 sqrt(pi)) int_0^inf e^{-beta x} x^{-1/2} F(x) dx
    with F the scheme's outage CDF; x = u^2 removes the endpoint kink.
    This is the independent cross-check for all three closed forms.
    """
    al, be = modulation.alpha, modulation.beta

    def f(uu):
        if uu == 0.0:
            return 0.0
        x = uu * uu
        return math.exp(-be * x) * outage(scheme, x, cfg, stats, zeta)

    val = al * math.sqrt(be) / math.sqrt(math.pi) * integrate(
        f, 0.0, math.inf, _BER_QUAD
    )
    return _as_probability(val, "quadrature BER")


def ber_asymptotic(
    scheme: RelayScheme,
    modulation: ModulationParams,
    cfg: FadingConfig,
    stats: HopStatistics,
    zeta: float,
) -> float:
    """High-SNR BER from the linear outage asymptote: alpha D / (4 beta),
    D the outage slope in the threshold. Not available for variable gain I."""
    if scheme is RelayScheme.VGI:
        raise ValueError("no high-SNR BER asymptote for variable gain I")
    al, be = modulation.alpha, modulation.beta
    slope = outage_asymptotic(scheme, 1.0, cfg, stats, zeta)
    return _as_probability(al * slope / (4.0 * be), "asymptotic BER")


# ----------------------------------------------------------------------
# Ergodic capacity
# ----------------------------------------------------------------------

_CAP_QUAD = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-7, max_subdivisions=3000)


def capacity(
    scheme: RelayScheme,
    cfg: FadingConfig,
    stats: HopStatistics,
    zeta: float,
) -> float:
    """Ergodic capacity (bits/s/Hz) by quadrature of the CCDF.

    C = 1/(2 ln 2) int_0^inf (1 - F(x)) / (1 + x) dx; the half factor is
    the two-slot relaying penalty.
    """

    def f(x):
        if x == 0.0:
            return 1.0
        return (1.0 - outage(scheme, x, cfg, stats, zeta)) / (1.0 + x)

    val = integrate(f, 0.0, math.inf, _CAP_QUAD) / (2.0 * math.log(2.0))
    if val < 0:
        raise ArithmeticError(f"negative capacity {val!r}")
    return val


def capacity_vgi_closed_form(
    cfg: FadingConfig, stats: HopStatistics, zeta: float
) -> float:
    """Scalar closed form of the variable-gain-I capacity.

    Uses the affine survival-mass approximation e^{-mu x}(eta + nu x) with
    the log frozen at its exponential average, giving per term
    nu/mu + e^mu Ei(-mu) (nu - eta). Cross-check against capacity().
    """
    rho1 = cfg.rho1
    if rho1 > 0.999:
        raise ValueError("variable-gain-I capacity closed form needs rho1 < 1")
    g1 = cfg.gamma1_bar
    w, a, a_rate, kappa, u, mu = _vgi_term_tables(cfg, stats, zeta, rho1)
    eta = g1 / a_rate
    nu = u / ((1.0 - rho1) * a * a) * np.log(kappa * u / (a * mu))
    e1s = np.vectorize(expint_e1_scaled)(mu)       # e^mu E1(mu)
    bracket = nu / mu - e1s * (nu - eta)           # e^mu Ei(-mu) = -e1s
    val = _prefactor(cfg, stats) / g1 * float(np.sum(w * bracket))
    return val / (2.0 * math.log(2.0))


def capacity_ceiling(bp: hpa.BussgangParams, sigma_sq: float = 1.0) -> float:
    """Distortion-limited capacity ceiling 0.5 log2(1 + d^2 s^2 / stau^2).

    Ideal hardware has no ceiling and returns +inf.
    """
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    if bp.sigma_tau_sq <= 0.0:
        return math.inf
    return 0.5 * math.log2(1.0 + bp.delta ** 2 * sigma_sq / bp.sigma_tau_sq)


def diversity_gain(outage_curve) -> float:
    """Diversity order from an outage curve: -10 x slope of log10 P vs dB.

    Needs at least three strictly positive points in the asymptotic
    region; a saturated (flat) curve fits to ~0 by construction.
    """
    pts = [(float(s), float(p)) for s, p in outage_curve]
    if len(pts) < 3:
        raise ValueError("need at least 3 (snr_db, outage) points")
    if any(p <= 0 for _, p in pts):
        raise ValueError("outage values must be strictly positive")
    x = np.array([s for s, _ in pts])
    y = np.log10([p for _, p in pts])
    slope = np.polyfit(x, y, 1)[0]
    return -10.0 * float(slope)
