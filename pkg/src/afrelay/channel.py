"""Correlated Rayleigh fading and ordered-selection channel statistics.

Per hop, each relay sees a pair of unit-power complex Gaussian gains: the
*outdated* one (available at selection time, used by the opportunistic
selection and by the VGI gain) and the *current* one (realized at
transmission time), tied together by the Jakes correlation rho.  Selecting
the relay whose outdated bottleneck min-SNR has rank k out of N makes the
transmission-time SNRs of the selected link follow exponential-mixture
laws; the mixture coefficients (P, S, Q, R, T, U tables and the harmonic
mean) are precomputed here and drive every closed form in `metrics`.

Conventions: E[|h|^2] = 1 per hop, so the linear average SNRs gamma1_bar /
gamma2_bar are free axis parameters; rank k = N selects the best relay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import bessel_j0

__all__ = [
    "CsiPair",
    "FadingConfig",
    "HopStatistics",
    "hop1_moment",
    "hop_statistics",
    "jakes_rho",
    "ordered_cdf_hop2",
    "ordered_pdf_hop1",
    "sample_csi_pair",
]


@dataclass(frozen=True)
class CsiPair:
    """One hop's (current, outdated) complex gain pair."""

    current: complex
    outdated: complex


@dataclass(frozen=True)
class FadingConfig:
    """Relay-set geometry, average SNRs and CSI correlation per hop."""

    n_relays: int
    rank: int
    gamma1_bar: float
    gamma2_bar: float
    rho1: float
    rho2: float

    def __post_init__(self):
        if self.n_relays < 1:
            raise ValueError("n_relays must be >= 1")
        if not (1 <= self.rank <= self.n_relays):
            raise ValueError("rank k must satisfy 1 <= k <= N")
        if not (self.gamma1_bar > 0 and self.gamma2_bar > 0):
            raise ValueError("average SNRs must be positive")
        for r in (self.rho1, self.rho2):
            if not (0.0 <= r <= 1.0):
                raise ValueError("correlation coefficients must lie in [0, 1]")


@dataclass(frozen=True)
class HopStatistics:
    """Exponential-mixture coefficient tables of the selected link.

    Rows are indexed n (or m) = 0..k-1; the second axis is the j (or i)
    = 1, 2 slot.  Q/R describe the hop-1 transmission-time pdf, T/U the
    hop-2 transmission-time cdf; gbar is the harmonic-mean SNR of the
    selection bottleneck.  Q[:,0] = R[:,0] = T[:,0] = 1 exactly.
    """

    p: np.ndarray
    s: np.ndarray
    q: np.ndarray
    r: np.ndarray
    t: np.ndarray
    u: np.ndarray
    gbar: float
    log_binom: float = field(repr=False, default=0.0)

    @property
    def binom(self) -> float:
        return math.exp(self.log_binom)


def jakes_rho(doppler_hz: float, delay_s: float) -> float:
    """Jakes autocorrelation rho = J0(2 pi f_d T_d) of the fading process."""
    if doppler_hz < 0 or delay_s < 0:
        raise ValueError("Doppler frequency and delay must be nonnegative")
    return bessel_j0(2.0 * math.pi * doppler_hz * delay_s)


def sample_csi_pair(rng: np.random.Generator, mean_power: float, rho: float) -> CsiPair:
    """Draw one (current, outdated) gain pair with the given correlation.

    h and the innovation w are independent circular Gaussians of the same
    mean power; outdated = sqrt(rho) h + sqrt(1-rho) w.  rho = 1 short-
    circuits to an exact copy so no innovation noise leaks in.
    """
    if mean_power <= 0:
        raise ValueError("mean_power must be positive")
    if not (0.0 <= rho <= 1.0):
        raise ValueError("rho must lie in [0, 1]")
    scale = math.sqrt(mean_power / 2.0)
    g = rng.standard_normal(2)
    h = complex(g[0], g[1]) * scale
    if rho == 1.0:
        return CsiPair(current=h, outdated=h)
    g = rng.standard_normal(2)
    w = complex(g[0], g[1]) * scale
    return CsiPair(current=h, outdated=math.sqrt(rho) * h + math.sqrt(1.0 - rho) * w)


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def hop_statistics(cfg: FadingConfig) -> HopStatistics:
    """Precompute the P, S, Q, R, T, U tables for one configuration.

    Signed alternating-binomial weights are computed in log space and
    exponentiated, so the tables stay finite up to N = 64.
    """
    n_r, k = cfg.n_relays, cfg.rank
    g1, g2 = cfg.gamma1_bar, cfg.gamma2_bar
    gbar = g1 * g2 / (g1 + g2)

    idx = np.arange(k, dtype=float)
    q_off = n_r - k + idx                     # N - k + n
    signs = np.where(idx.astype(int) % 2 == 0, 1.0, -1.0)
    binom_rows = np.exp([_log_binom(k - 1, int(i)) for i in idx])

    p = signs * binom_rows / (1.0 + (g2 / gbar) * q_off)
    s = signs * binom_rows / (1.0 + (g1 / gbar) * q_off)

    d1 = cfg.rho1 * gbar + (1.0 - cfg.rho1) * (q_off + 1.0) * g1
    d2 = cfg.rho2 * gbar + (1.0 - cfg.rho2) * (q_off + 1.0) * g2

    q = np.stack([np.ones(k), q_off * g2 / d1], axis=1)
    r = np.stack([np.ones(k), (q_off + 1.0) * g1 / d1], axis=1)
    t = np.stack([np.ones(k), q_off * g1 / ((q_off + 1.0) * g2)], axis=1)
    u = np.stack([np.full(k, g1 / g2), (q_off + 1.0) * g1 / d2], axis=1)

    return HopStatistics(
        p=p, s=s, q=q, r=r, t=t, u=u, gbar=gbar, log_binom=_log_binom(n_r, k)
    )


def ordered_pdf_hop1(x, cfg: FadingConfig, stats: HopStatistics):
    """Transmission-time pdf of the selected link's hop-1 SNR.

    f(x) = (k/g1) C(N,k) sum_n sum_j P_n Q_{n,j} exp(-R_{n,j} x / g1);
    accepts a scalar or an array of SNR values x >= 0.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("SNR argument must be nonnegative")
    g1 = cfg.gamma1_bar
    w = stats.p[:, None] * stats.q                       # (k, 2)
    val = np.einsum(
        "nj,...nj->...",
        w,
        np.exp(-stats.r * arr[..., None, None] / g1),
    )
    val *= cfg.rank / g1 * stats.binom
    return float(val) if np.isscalar(x) else val


def ordered_cdf_hop2(x, cfg: FadingConfig, stats: HopStatistics):
    """Transmission-time cdf of the selected link's hop-2 SNR.

    F(x) = 1 - k C(N,k) sum_m sum_i S_m T_{m,i} exp(-U_{m,i} x / g1).
    The U table folds the g1/g2 conversion, hence the g1 in the exponent.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("SNR argument must be nonnegative")
    g1 = cfg.gamma1_bar
    w = stats.s[:, None] * stats.t
    val = np.einsum(
        "mi,...mi->...",
        w,
        np.exp(-stats.u * arr[..., None, None] / g1),
    )
    val = 1.0 - cfg.rank * stats.binom * val
    return float(val) if np.isscalar(x) else val


def hop1_moment(order: int, cfg: FadingConfig, stats: HopStatistics) -> float:
    """n-th moment of the hop-1 transmission-time SNR of the selected link.

    Termwise integral of the hop-1 pdf mixture:
    E[x^n] = k C(N,k) n! sum_{n,j} P Q (g1/R)^{n+1} / g1.
    """
    if order < 1:
        raise ValueError("moment order must be >= 1")
    g1 = cfg.gamma1_bar
    w = stats.p[:, None] * stats.q
    val = float(np.sum(w * (g1 / stats.r) ** (order + 1)))
    return cfg.rank / g1 * stats.binom * math.factorial(order) * val
