"""Deterministic vectorized Monte Carlo engine.

Trials are generated in fixed-size blocks, each block owning a private
counter-based Philox substream derived from (seed, stream, block index),
and per-block partial sums are reduced in block order. Results are
therefore bit-identical for any worker count, and a worker pool only
changes who computes which block.

One trial draws the (current, outdated) gain pairs of every relay on both
hops, ranks the outdated bottlenecks, and evaluates the selected link's
SNDR under the chosen fidelity: the Bussgang surrogate applies the frozen
design-point zeta inside the scheme formulas, while the full-nonlinearity
path recomputes (delta, sigma_tau^2) at the instantaneous amplifier input
power of each trial from per-model lookup tables built with the radial
Bussgang integrals (the actual AM/AM / AM/PM characteristics passed
through quadrature). Outage, BER (as the smooth alpha Q(sqrt(2 beta x))
estimator) and capacity 0.5 log2(1+x) come from the same trials.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import erfc as _vec_erfc

from . import hpa
from .channel import FadingConfig, hop_statistics, hop1_moment
from .metrics import (
    ModulationParams,
    PerformancePoint,
    ber as ber_closed,
    capacity as capacity_quadrature,
    capacity_ceiling,
    effective_zeta,
    outage as outage_closed,
    outage_asymptotic,
)
from .relaying import RelayScheme

if TYPE_CHECKING:  # cli owns SystemConfig; only attributes are used here
    from .cli import SystemConfig

__all__ = [
    "BLOCK_SIZE",
    "Estimate",
    "Fidelity",
    "McConfig",
    "PointModel",
    "block_rng",
    "estimate_ber",
    "estimate_capacity",
    "estimate_outage",
    "point_model",
    "run_sweep",
    "simulate_sndr_sums",
]

BLOCK_SIZE = 1 << 18


class Fidelity(enum.Enum):
    """How faithfully the amplifier is simulated per trial."""

    SURROGATE = "surrogate"
    FULL = "full"


@dataclass(frozen=True)
class McConfig:
    """Trial budget, seeding and parallelism."""

    samples: int = 1_000_000
    seed: int = 12345
    workers: int = 1
    fidelity: Fidelity = Fidelity.SURROGATE

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a 95% confidence half-width."""

    mean: float
    half_width_95: float
    samples_used: int

    def __post_init__(self):
        if self.half_width_95 < 0:
            raise ValueError("half_width_95 must be nonnegative")


@dataclass(frozen=True)
class PointModel:
    """Everything needed to simulate / evaluate one sweep point."""

    fading: FadingConfig
    scheme: RelayScheme
    hpa_model: hpa.HpaModel
    bussgang: hpa.BussgangParams
    zeta: float
    mean_g1: float
    sigma_sq: float = 1.0
    noise_var: float = 1.0


def point_model(sys: "SystemConfig", snr_db: float) -> PointModel:
    """Resolve a system config at one SNR point (gamma1 = gamma2 = axis)."""
    g = 10.0 ** (snr_db / 10.0)
    fading = FadingConfig(
        n_relays=sys.n_relays,
        rank=sys.rank,
        gamma1_bar=g,
        gamma2_bar=g,
        rho1=sys.rho1,
        rho2=sys.rho2,
    )
    stats = hop_statistics(fading)
    model = sys.hpa_model
    if isinstance(model, hpa.Ideal):
        bp = hpa.BussgangParams(1.0, 0.0)
    elif isinstance(model, hpa.SolidState) and model.smoothness != 1.0:
        bp = hpa.bussgang_numeric(model)
    else:
        bp = hpa.bussgang_closed_form(model)
    zeta = effective_zeta(bp, fading, stats)
    return PointModel(
        fading=fading,
        scheme=sys.scheme,
        hpa_model=model,
        bussgang=bp,
        zeta=zeta,
        mean_g1=hop1_moment(1, fading, stats),
    )


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    """Philox generator owning the (seed, stream, block) counter slice.

    The low 128 counter bits are left for in-block draws, so substreams
    can never overlap.
    """
    counter = ((int(stream) << 64) | int(block)) << 128
    return np.random.Generator(np.random.Philox(key=np.uint64(seed), counter=counter))


def draw_selected_link(rng: np.random.Generator, n: int, cfg: FadingConfig):
    """Vectorized trial block: returns (g1_cur, g2_cur, g1_out) of the
    selected relay, each shape (n,).

    Eight normal planes per relay are always consumed so the per-trial
    stream layout does not depend on the correlation values.
    """
    nr = cfg.n_relays
    z = rng.standard_normal((8, n, nr))
    half = 0.5  # per-component variance of a unit-power complex gain
    g1c = half * (z[0] ** 2 + z[1] ** 2)
    g2c = half * (z[2] ** 2 + z[3] ** 2)
    if cfg.rho1 == 1.0:
        g1o = g1c
    else:
        s, t = math.sqrt(cfg.rho1), math.sqrt(1.0 - cfg.rho1)
        g1o = half * ((s * z[0] + t * z[4]) ** 2 + (s * z[1] + t * z[5]) ** 2)
    if cfg.rho2 == 1.0:
        g2o = g2c
    else:
        s, t = math.sqrt(cfg.rho2), math.sqrt(1.0 - cfg.rho2)
        g2o = half * ((s * z[2] + t * z[6]) ** 2 + (s * z[3] + t * z[7]) ** 2)

    bneck = np.minimum(cfg.gamma1_bar * g1o, cfg.gamma2_bar * g2o)
    sel = np.argsort(bneck, axis=1, kind="stable")[:, cfg.rank - 1]
    rows = np.arange(n)
    return (
        cfg.gamma1_bar * g1c[rows, sel],
        cfg.gamma2_bar * g2c[rows, sel],
        cfg.gamma1_bar * g1o[rows, sel],
    )


# ----------------------------------------------------------------------
# Full-nonlinearity support: (delta, sigma_tau^2/p) vs A_sat^2/p tables
# ----------------------------------------------------------------------

_RATIO_LOG_GRID = np.linspace(-10.0, 10.0, 601)
_table_cache: dict = {}


def _unit_model(model: hpa.HpaModel, a_sat: float) -> hpa.HpaModel:
    if isinstance(model, hpa.SoftLimiter):
        return hpa.SoftLimiter(a_sat)
    if isinstance(model, hpa.SolidState):
        return hpa.SolidState(a_sat, model.smoothness)
    if isinstance(model, hpa.TravelingWave):
        return hpa.TravelingWave(a_sat, model.phi0)
    raise TypeError(f"no saturation parameter on {model!r}")


def _bussgang_tables(model: hpa.HpaModel):
    """log-log interpolation tables of delta and sigma_tau^2/p against the
    scale-free saturation ratio A_sat^2/p (p = instantaneous input power)."""
    if isinstance(model, hpa.SoftLimiter):
        key = ("sel",)
    elif isinstance(model, hpa.SolidState):
        key = ("sspa", model.smoothness)
    elif isinstance(model, hpa.TravelingWave):
        key = ("twta", model.phi0)
    else:
        raise TypeError(f"no Bussgang table for {model!r}")
    if key in _table_cache:
        return _table_cache[key]
    deltas = np.empty_like(_RATIO_LOG_GRID)
    vs = np.empty_like(_RATIO_LOG_GRID)
    for i, lr in enumerate(_RATIO_LOG_GRID):
        m = _unit_model(model, math.sqrt(10.0 ** lr))
        bp = hpa.bussgang_numeric(m, 1.0)
        deltas[i] = bp.delta
        vs[i] = max(bp.sigma_tau_sq, 1e-300)
    tables = (np.log10(deltas), np.log10(vs))
    _table_cache[key] = tables
    return tables


def _full_sndr(model: PointModel, g1c, g2c, g1o):
    """Per-trial SNDR with Bussgang parameters at the instantaneous input
    power of the selected trial's amplifier."""
    if model.scheme is RelayScheme.FG:
        q_ratio = model.mean_g1 + 1.0
    elif model.scheme is RelayScheme.VGI:
        q_ratio = g1o + 1.0
    else:
        q_ratio = g1c + 1.0
    if isinstance(model.hpa_model, hpa.Ideal):
        return g1c * g2c / (g2c + q_ratio)
    log_d, log_v = _bussgang_tables(model.hpa_model)
    a_sq = model.hpa_model.a_sat ** 2
    p_in = model.sigma_sq * (g1c + 1.0) / q_ratio
    lr = np.clip(np.log10(a_sq / p_in), _RATIO_LOG_GRID[0], _RATIO_LOG_GRID[-1])
    d_sq = 10.0 ** (2.0 * np.interp(lr, _RATIO_LOG_GRID, log_d))
    v = 10.0 ** np.interp(lr, _RATIO_LOG_GRID, log_v)
    zeta_i = 1.0 + v * (g1c + 1.0) / d_sq
    return g1c * g2c / (g2c * zeta_i + q_ratio / d_sq)


def _surrogate_sndr(model: PointModel, g1c, g2c, g1o):
    z = model.zeta
    if model.scheme is RelayScheme.FG:
        return g1c * g2c / (z * g2c + model.mean_g1 + z)
    if model.scheme is RelayScheme.VGI:
        return g1c * g2c / (z * g2c + g1o + z)
    return g1c * g2c / (z * g2c + g1c + z)


# ----------------------------------------------------------------------
# Estimators
# ----------------------------------------------------------------------


def simulate_sndr_sums(
    model: PointModel,
    mc: McConfig,
    gamma_th: float,
    modulation: ModulationParams,
    stream: int = 0,
):
    """Run all trials and return the ordered-reduced accumulator vector.

    Accumulators: [outage count, sum Q-estimator, sum Q^2, sum cap,
    sum cap^2]; used by the three estimate_* wrappers so one simulation
    feeds every metric of a sweep point.
    """
    n_blocks = (mc.samples + BLOCK_SIZE - 1) // BLOCK_SIZE
    sndr_fn = _full_sndr if mc.fidelity is Fidelity.FULL else _surrogate_sndr
    if mc.fidelity is Fidelity.FULL and not isinstance(model.hpa_model, hpa.Ideal):
        _bussgang_tables(model.hpa_model)  # build outside the worker pool

    def one_block(b: int):
        n = min(BLOCK_SIZE, mc.samples - b * BLOCK_SIZE)
        rng = block_rng(mc.seed, stream, b)
        g1c, g2c, g1o = draw_selected_link(rng, n, model.fading)
        sndr = sndr_fn(model, g1c, g2c, g1o)
        qest = modulation.alpha * 0.5 * _vec_erfc(np.sqrt(modulation.beta * sndr))
        cap = 0.5 * np.log2(1.0 + sndr)
        return np.array(
            [
                float(np.count_nonzero(sndr < gamma_th)),
                float(np.sum(qest)),
                float(np.sum(qest * qest)),
                float(np.sum(cap)),
                float(np.sum(cap * cap)),
            ]
        )

    partials = [None] * n_blocks
    if mc.workers == 1 or n_blocks == 1:
        for b in range(n_blocks):
            partials[b] = one_block(b)
    else:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            for b, res in zip(range(n_blocks), pool.map(one_block, range(n_blocks))):
                partials[b] = res
    total = np.zeros(5)
    for part in partials:          # fixed order => bit-identical reduction
        total += part
    return total


def _mean_ci(s: float, s2: float, n: int) -> Estimate:
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0)
    return Estimate(mean, 1.96 * math.sqrt(var / n), n)


def estimate_outage(
    sys: "SystemConfig",
    mc: McConfig,
    gamma_th: float,
    snr_db: float | None = None,
) -> Estimate:
    """Monte Carlo outage P[SNDR < gamma_th] with a binomial 95% CI.

    Uses the first grid SNR of the config unless snr_db is given.
    """
    if gamma_th < 0:
        raise ValueError("gamma_th must be nonnegative")
    model = point_model(sys, sys.snr_db[0] if snr_db is None else snr_db)
    sums = simulate_sndr_sums(model, mc, gamma_th, sys.modulation)
    n = mc.samples
    p = sums[0] / n
    return Estimate(p, 1.96 * math.sqrt(p * (1.0 - p) / n), n)


def estimate_ber(
    sys: "SystemConfig",
    mc: McConfig,
    modulation: ModulationParams | None = None,
    snr_db: float | None = None,
) -> Estimate:
    """Monte Carlo average BER: sample mean of alpha Q(sqrt(2 beta SNDR))."""
    mod = sys.modulation if modulation is None else modulation
    model = point_model(sys, sys.snr_db[0] if snr_db is None else snr_db)
    sums = simulate_sndr_sums(model, mc, 1.0, mod)
    return _mean_ci(sums[1], sums[2], mc.samples)


def estimate_capacity(
    sys: "SystemConfig",
    mc: McConfig,
    snr_db: float | None = None,
) -> Estimate:
    """Monte Carlo ergodic capacity: sample mean of 0.5 log2(1 + SNDR)."""
    model = point_model(sys, sys.snr_db[0] if snr_db is None else snr_db)
    sums = simulate_sndr_sums(model, mc, 1.0, sys.modulation)
    return _mean_ci(sums[3], sums[4], mc.samples)


def run_sweep(sys: "SystemConfig", mc: McConfig, snr_grid_db=None):
    """Analytic + MC evaluation over the SNR axis.

    Per-point failures are recorded in the point's error field and the
    sweep continues; each point derives its substreams from its grid
    index, so a sweep is reproducible point by point.
    """
    grid = list(sys.snr_db if snr_grid_db is None else snr_grid_db)
    if not grid:
        raise ValueError("SNR grid must not be empty")
    gamma_th = sys.gamma_th
    points = []
    for idx, snr_db in enumerate(grid):
        pt = PerformancePoint(snr_db=float(snr_db))
        try:
            model = point_model(sys, snr_db)
            stats = hop_statistics(model.fading)
            pt.outage_analytic = outage_closed(
                model.scheme, gamma_th, model.fading, stats, model.zeta
            )
            try:
                pt.outage_asymptotic = outage_asymptotic(
                    model.scheme, gamma_th, model.fading, stats, model.zeta
                )
            except ValueError:
                pt.outage_asymptotic = math.nan  # no VGI asymptote
            pt.ber_analytic = ber_closed(
                model.scheme, sys.modulation, model.fading, stats, model.zeta
            )
            pt.capacity_analytic = capacity_quadrature(
                model.scheme, model.fading, stats, model.zeta
            )
            pt.capacity_ceiling = capacity_ceiling(model.bussgang, model.sigma_sq)
            sums = simulate_sndr_sums(model, mc, gamma_th, sys.modulation, stream=idx)
            n = mc.samples
            p = sums[0] / n
            pt.outage_mc = p
            pt.outage_mc_ci = 1.96 * math.sqrt(p * (1.0 - p) / n)
            ber_est = _mean_ci(sums[1], sums[2], n)
            pt.ber_mc, pt.ber_mc_ci = ber_est.mean, ber_est.half_width_95
            cap_est = _mean_ci(sums[3], sums[4], n)
            pt.capacity_mc, pt.capacity_mc_ci = cap_est.mean, cap_est.half_width_95
        except (ArithmeticError, ValueError) as exc:
            pt.error = f"{type(exc).__name__}: {exc}"
        points.append(pt)
    return points
