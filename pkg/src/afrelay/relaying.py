"""Opportunistic relay selection and end-to-end SNDR forms.

Selection ranks the relays by the bottleneck min(hop1, hop2) of the
*outdated* (selection-time) SNRs; rank N is the best relay, rank k the
k-th smallest bottleneck, which models picking the next best available
relay under half-duplex contention. The per-sample SNDR expressions take
the distortion inflation zeta precomputed by the hpa module; zeta = 1
recovers the ideal-hardware forms. The three gain policies differ only in
which hop-1 power estimate normalizes the amplifier input: the statistical
mean (FG), the selection-time draw (VGI) or the transmission-time draw
(VGII).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinkSample",
    "RelayScheme",
    "ors_select",
    "relay_gain",
    "sndr_fg",
    "sndr_vgi",
    "sndr_vgii",
]


class RelayScheme(enum.Enum):
    """Amplification gain policy."""

    FG = "fg"
    VGI = "vgi"
    VGII = "vgii"


@dataclass(frozen=True)
class LinkSample:
    """SNR draws of the selected link (selection-time and transmission-time)."""

    gamma1_outdated: float
    gamma1_current: float
    gamma2_outdated: float
    gamma2_current: float

    def __post_init__(self):
        vals = (
            self.gamma1_outdated,
            self.gamma1_current,
            self.gamma2_outdated,
            self.gamma2_current,
        )
        if any(v < 0 for v in vals):
            raise ValueError("SNR samples must be nonnegative")


def ors_select(samples, rank: int) -> int:
    """Index of the relay whose outdated bottleneck has the given rank.

    samples is a sequence of per-relay (hop1, hop2) outdated SNR pairs;
    rank follows the ascending convention (rank = N is the best relay).
    """
    n = len(samples)
    if n == 0:
        raise ValueError("relay list must not be empty")
    if not (1 <= rank <= n):
        raise ValueError(f"rank must lie in [1, {n}]")
    bottleneck = np.array([min(a, b) for a, b in samples], dtype=float)
    return int(np.argsort(bottleneck, kind="stable")[rank - 1])


def sndr_fg(g1, g2, zeta: float, mean_g1: float):
    """Fixed-gain SNDR: g1 g2 / (zeta g2 + E[g1] + zeta)."""
    _check_zeta(zeta)
    return g1 * g2 / (zeta * g2 + mean_g1 + zeta)


def sndr_vgi(g1, g2, g1_gain, zeta: float):
    """Variable-gain-I SNDR: the gain was set on the other (selection-time)
    hop-1 draw g1_gain, so it appears in the denominator in place of g1."""
    _check_zeta(zeta)
    return g1 * g2 / (zeta * g2 + g1_gain + zeta)


def sndr_vgii(g1, g2, zeta: float):
    """Variable-gain-II SNDR: gain tracks the transmission-time hop-1 draw."""
    _check_zeta(zeta)
    return g1 * g2 / (zeta * g2 + g1 + zeta)


def _check_zeta(zeta: float):
    if not zeta >= 1.0:
        raise ValueError("zeta must be >= 1")


def relay_gain(
    scheme: RelayScheme,
    sample: LinkSample,
    sigma_sq: float,
    p1: float,
    noise_var: float,
    mean_h1_sq: float,
) -> float:
    """Power-domain amplification gain G for the given policy.

    G = sigma^2 / (|h1|^2 P1 + sigma0^2) with |h1|^2 replaced by its
    statistical mean (FG), the outdated draw (VGI) or the current draw
    (VGII); the amplitude gain is sqrt(G).
    """
    if not (sigma_sq > 0 and p1 > 0 and noise_var > 0):
        raise ValueError("powers must be positive")
    if scheme is RelayScheme.FG:
        h1_sq = mean_h1_sq
    elif scheme is RelayScheme.VGI:
        h1_sq = sample.gamma1_outdated * noise_var / p1
    elif scheme is RelayScheme.VGII:
        h1_sq = sample.gamma1_current * noise_var / p1
    else:
        raise TypeError(f"unknown scheme: {scheme!r}")
    return sigma_sq / (h1_sq * p1 + noise_var)
