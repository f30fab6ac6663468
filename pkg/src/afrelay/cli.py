"""Experiment front door: config files, sweeps, figure recipes, validation.

Configs are flat ``key = value`` text files (``#`` comments). Unknown keys
are rejected and every violation is reported with its line number and the
violated constraint. All output is CSV with a ``#``-prefixed metadata
preamble (full config echo, package version, seed and per-column
provenance) so a sweep is byte-reproducible for a fixed config+seed and a
plot can never silently mix engines.

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 validation
check failure.
"""

from __future__ import annotations

import argparse
import io
import math
import sys as _sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, hpa
from .channel import FadingConfig, hop_statistics, jakes_rho, ordered_pdf_hop1
from .metrics import (
    BPSK,
    ModulationParams,
    ber as ber_closed,
    ber_quadrature,
    capacity as capacity_quadrature,
    effective_zeta,
    hop1_moment,
    outage as outage_closed,
)
from .montecarlo import (
    Estimate,
    Fidelity,
    McConfig,
    estimate_capacity,
    estimate_outage,
    point_model,
    run_sweep,
)
from .relaying import RelayScheme
from .specfun import IntegrationError, QuadratureSpec, integrate

__all__ = [
    "ConfigError",
    "FIGURE_DEFAULTS",
    "SystemConfig",
    "cmd_bussgang",
    "cmd_figure",
    "cmd_sweep",
    "cmd_validate",
    "main",
    "parse_config",
    "parse_config_text",
]


class ConfigError(ValueError):
    """Config file rejected; message carries line/field context."""


_CONFIG_KEYS = (
    "n_relays", "rank", "rho1", "rho2", "doppler_hz", "delay_s", "scheme",
    "hpa", "ibo_db", "smoothness", "phi0", "modulation", "alpha", "beta",
    "snr_db", "gamma_th_db", "samples", "seed", "workers", "fidelity",
)


@dataclass(frozen=True)
class SystemConfig:
    """Fully-validated experiment parameterization.

    Powers are normalized: unit noise variance and unit nominal relay
    power, so the SNR axis directly sets the per-hop average SNRs.
    """

    n_relays: int = 1
    rank: int = 1
    rho1: float = 1.0
    rho2: float = 1.0
    scheme: RelayScheme = RelayScheme.FG
    hpa_kind: str = "ideal"
    ibo_db: float | None = None
    smoothness: float = 1.0
    phi0: float = 0.0
    modulation_name: str = "bpsk"
    modulation: ModulationParams = BPSK
    snr_db: tuple = (10.0, 20.0, 30.0)
    gamma_th_db: float = 0.0
    samples: int = 1_000_000
    seed: int = 12345
    workers: int = 1
    fidelity: Fidelity = Fidelity.SURROGATE
    sigma_sq: float = 1.0
    noise_var: float = 1.0

    @property
    def gamma_th(self) -> float:
        return 10.0 ** (self.gamma_th_db / 10.0)

    @property
    def hpa_model(self) -> hpa.HpaModel:
        if self.hpa_kind == "ideal":
            return hpa.Ideal()
        a_sat = hpa.ibo_to_asat(
            hpa.AmplifierOperatingPoint(ibo_db=self.ibo_db, sigma_sq=self.sigma_sq)
        )
        if self.hpa_kind == "sel":
            return hpa.SoftLimiter(a_sat)
        if self.hpa_kind == "sspa":
            return hpa.SolidState(a_sat, self.smoothness)
        if self.hpa_kind == "twta":
            return hpa.TravelingWave(a_sat, self.phi0)
        raise ValueError(f"unknown hpa kind {self.hpa_kind!r}")

    @property
    def mc(self) -> McConfig:
        return McConfig(
            samples=self.samples,
            seed=self.seed,
            workers=self.workers,
            fidelity=self.fidelity,
        )

    def echo_items(self):
        """Canonical (key, value) pairs for the CSV preamble, fixed order."""
        items = [
            ("n_relays", self.n_relays),
            ("rank", self.rank),
            ("rho1", _fmt(self.rho1)),
            ("rho2", _fmt(self.rho2)),
            ("scheme", self.scheme.value),
            ("hpa", self.hpa_kind),
        ]
        if self.hpa_kind != "ideal":
            items.append(("ibo_db", _fmt(self.ibo_db)))
        if self.hpa_kind == "sspa":
            items.append(("smoothness", _fmt(self.smoothness)))
        if self.hpa_kind == "twta":
            items.append(("phi0", _fmt(self.phi0)))
        items += [
            ("modulation", self.modulation_name),
            ("alpha", _fmt(self.modulation.alpha)),
            ("beta", _fmt(self.modulation.beta)),
            ("snr_db", ",".join(_fmt(v) for v in self.snr_db)),
            ("gamma_th_db", _fmt(self.gamma_th_db)),
            ("samples", self.samples),
            ("seed", self.seed),
            ("workers", self.workers),
            ("fidelity", self.fidelity.value),
        ]
        return items


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".10g")
    return str(x)


# ----------------------------------------------------------------------
# Config parsing
# ----------------------------------------------------------------------


def _parse_snr_axis(text: str, line_no: int):
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(
                f"line {line_no}: snr_db range must be start:step:stop, got {text!r}"
            )
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"line {line_no}: non-numeric snr_db range {text!r}")
        if step <= 0 or stop < start:
            raise ConfigError(
                f"line {line_no}: snr_db range needs step > 0 and stop >= start"
            )
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(n))
    try:
        vals = tuple(float(p) for p in text.split(",") if p.strip() != "")
    except ValueError:
        raise ConfigError(f"line {line_no}: non-numeric snr_db list {text!r}")
    if not vals:
        raise ConfigError(f"line {line_no}: snr_db list is empty")
    return vals


def parse_config_text(text: str, source: str = "<config>") -> SystemConfig:
    """Parse and validate config text; errors carry line numbers."""
    raw: dict = {}
    lines: dict = {}
    for no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{source}: line {no}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{source}: line {no}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(
                f"{source}: line {no}: duplicate key {key!r} (first on line {lines[key]})"
            )
        raw[key] = value
        lines[key] = no

    def want(key, conv, default):
        if key not in raw:
            return default
        try:
            return conv(raw[key])
        except (TypeError, ValueError):
            raise ConfigError(
                f"{source}: line {lines[key]}: invalid value for {key}: {raw[key]!r}"
            )

    def fail(key, msg):
        where = f"line {lines[key]}: " if key in lines else ""
        raise ConfigError(f"{source}: {where}{msg}")

    n_relays = want("n_relays", int, 1)
    rank = want("rank", int, n_relays)
    if n_relays < 1:
        fail("n_relays", "n_relays must be >= 1")
    if not (1 <= rank <= n_relays):
        fail("rank", f"rank k must satisfy 1 <= k <= N (k={rank}, N={n_relays})")

    has_rho = "rho1" in raw or "rho2" in raw
    has_jakes = "doppler_hz" in raw or "delay_s" in raw
    if has_rho and has_jakes:
        fail(
            "rho1" if "rho1" in raw else "rho2",
            "give either rho1/rho2 or the doppler_hz+delay_s pair, not both "
            "(exactly one specification path allowed)",
        )
    if has_jakes:
        if "doppler_hz" not in raw or "delay_s" not in raw:
            fail(
                "doppler_hz" if "doppler_hz" in raw else "delay_s",
                "the Jakes path needs both doppler_hz and delay_s",
            )
        fd = want("doppler_hz", float, None)
        td = want("delay_s", float, None)
        if fd < 0 or td < 0:
            fail("doppler_hz", "doppler_hz and delay_s must be nonnegative")
        rho = jakes_rho(fd, td)
        if not (0.0 <= rho <= 1.0):
            fail(
                "doppler_hz",
                f"derived rho = J0(2 pi fd Td) = {rho:.6f} lies outside [0, 1]; "
                "reduce the Doppler-delay product",
            )
        rho1 = rho2 = rho
    else:
        rho1 = want("rho1", float, 1.0)
        rho2 = want("rho2", float, 1.0)
    for key, val in (("rho1", rho1), ("rho2", rho2)):
        if not (0.0 <= val <= 1.0):
            fail(key, f"{key} must lie in [0, 1], got {val!r}")

    scheme_txt = want("scheme", str, "fg").lower()
    try:
        scheme = RelayScheme(scheme_txt)
    except ValueError:
        fail("scheme", f"scheme must be one of fg, vgi, vgii; got {scheme_txt!r}")

    hpa_kind = want("hpa", str, "ideal").lower()
    if hpa_kind not in ("ideal", "sel", "sspa", "twta"):
        fail("hpa", f"hpa must be one of ideal, sel, sspa, twta; got {hpa_kind!r}")
    ibo_db = want("ibo_db", float, None)
    if hpa_kind != "ideal" and ibo_db is None:
        fail("hpa", f"hpa = {hpa_kind} requires ibo_db")
    if hpa_kind == "ideal" and ibo_db is not None:
        fail("ibo_db", "ibo_db is meaningless for ideal hardware")
    smoothness = want("smoothness", float, 1.0)
    if "smoothness" in raw and hpa_kind != "sspa":
        fail("smoothness", "smoothness applies to the sspa model only")
    if smoothness < 1.0:
        fail("smoothness", "smoothness factor must be >= 1")
    phi0 = want("phi0", float, 0.0)
    if "phi0" in raw and hpa_kind != "twta":
        fail("phi0", "phi0 applies to the twta model only")

    mod_name = want("modulation", str, "bpsk").lower()
    has_ab = "alpha" in raw or "beta" in raw
    if mod_name == "bpsk":
        if has_ab and "modulation" in raw:
            fail(
                "alpha" if "alpha" in raw else "beta",
                "give either modulation = bpsk or raw alpha/beta, not both",
            )
        if has_ab:
            mod_name = "custom"
    elif mod_name != "custom":
        fail("modulation", f"modulation must be bpsk or custom, got {mod_name!r}")
    if mod_name == "custom":
        if "alpha" not in raw or "beta" not in raw:
            fail("modulation", "custom modulation needs both alpha and beta")
        alpha = want("alpha", float, None)
        beta = want("beta", float, None)
        if alpha <= 0 or beta <= 0:
            fail("alpha", "modulation parameters must be positive")
        modulation = ModulationParams(alpha, beta)
    else:
        modulation = BPSK

    snr_db = (
        _parse_snr_axis(raw["snr_db"], lines["snr_db"])
        if "snr_db" in raw
        else (10.0, 20.0, 30.0)
    )
    gamma_th_db = want("gamma_th_db", float, 0.0)
    samples = want("samples", int, 1_000_000)
    if samples < 1:
        fail("samples", "samples must be >= 1")
    seed = want("seed", int, 12345)
    workers = want("workers", int, 1)
    if workers < 1:
        fail("workers", "workers must be >= 1")
    fid_txt = want("fidelity", str, "surrogate").lower()
    try:
        fidelity = Fidelity(fid_txt)
    except ValueError:
        fail("fidelity", f"fidelity must be surrogate or full, got {fid_txt!r}")

    return SystemConfig(
        n_relays=n_relays,
        rank=rank,
        rho1=rho1,
        rho2=rho2,
        scheme=scheme,
        hpa_kind=hpa_kind,
        ibo_db=ibo_db,
        smoothness=smoothness,
        phi0=phi0,
        modulation_name=mod_name,
        modulation=modulation,
        snr_db=snr_db,
        gamma_th_db=gamma_th_db,
        samples=samples,
        seed=seed,
        workers=workers,
        fidelity=fidelity,
    )


def parse_config(path: str) -> SystemConfig:
    """Parse a config file (see parse_config_text for the rules)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}")
    return parse_config_text(text, source=path)


# ----------------------------------------------------------------------
# CSV emission
# ----------------------------------------------------------------------

_SWEEP_COLUMNS = (
    "snr_db", "outage_analytic", "outage_asymptotic", "outage_mc",
    "outage_mc_ci", "ber_analytic", "ber_mc", "ber_mc_ci",
    "capacity_analytic", "capacity_mc", "capacity_mc_ci", "capacity_ceiling",
)


def _write_preamble(fh, sys_cfg: SystemConfig, extra=()):
    fh.write(f"# afrelay {__version__}\n")
    for k, v in sys_cfg.echo_items():
        fh.write(f"# config {k} = {v}\n")
    fh.write(
        "# provenance outage_analytic=closed-form outage_asymptotic=asymptote "
        "ber_analytic=closed-form capacity_analytic=quadrature "
        "capacity_ceiling=closed-form outage_mc=mc ber_mc=mc capacity_mc=mc\n"
    )
    for line in extra:
        fh.write(f"# {line}\n")


def _write_points(fh, points, prefix=""):
    for pt in points:
        if pt.error is not None:
            fh.write(f"# point snr_db={_fmt(pt.snr_db)} failed: {pt.error}\n")
            continue
        row = [getattr(pt, col) for col in _SWEEP_COLUMNS]
        fh.write(prefix + ",".join(_fmt(v) for v in row) + "\n")


def cmd_sweep(sys_cfg: SystemConfig, out=None) -> int:
    """Run the analytic+MC sweep and emit the CSV."""
    fh = out or _sys.stdout
    points = run_sweep(sys_cfg, sys_cfg.mc)
    _write_preamble(fh, sys_cfg)
    fh.write(",".join(_SWEEP_COLUMNS) + "\n")
    _write_points(fh, points)
    if any(pt.error is not None for pt in points):
        return 2
    return 0


# ----------------------------------------------------------------------
# Figure recipes (defaults calibrated; the source text omits them)
# ----------------------------------------------------------------------

_FIG_BASE = dict(
    n_relays=3, rank=3, rho1=0.9, rho2=0.9, samples=1_000_000, seed=12345,
    workers=1, fidelity=Fidelity.SURROGATE,
)

FIGURE_DEFAULTS = {
    3: dict(
        title="outage of the three gain policies under a 3 dB soft limiter",
        metric="outage",
        base=dict(
            _FIG_BASE, hpa_kind="sel", ibo_db=3.0, gamma_th_db=3.0,
            snr_db=tuple(np.arange(0.0, 41.0, 2.0)),
        ),
        curves=[("fg", dict(scheme=RelayScheme.FG)),
                ("vgi", dict(scheme=RelayScheme.VGI)),
                ("vgii", dict(scheme=RelayScheme.VGII))],
    ),
    4: dict(
        title="variable-gain-II outage under the three amplifier models",
        metric="outage",
        base=dict(
            _FIG_BASE, scheme=RelayScheme.VGII, ibo_db=10.0, gamma_th_db=0.0,
            snr_db=tuple(np.arange(0.0, 41.0, 2.0)),
        ),
        curves=[("sel", dict(hpa_kind="sel")),
                ("sspa", dict(hpa_kind="sspa", smoothness=1.0)),
                ("twta", dict(hpa_kind="twta", phi0=0.0))],
    ),
    5: dict(
        title="fixed-gain outage for various relay counts (Rapp amplifier)",
        metric="outage",
        base=dict(
            _FIG_BASE, scheme=RelayScheme.FG, hpa_kind="sspa", smoothness=2.0,
            ibo_db=15.0, rho1=0.95, rho2=0.95, gamma_th_db=7.0,
            snr_db=tuple(np.arange(0.0, 45.0, 2.0)),
        ),
        curves=[("N=2", dict(n_relays=2, rank=2)),
                ("N=5", dict(n_relays=5, rank=5)),
                ("N=10", dict(n_relays=10, rank=10))],
    ),
    6: dict(
        title="variable-gain-II BER for two back-off levels (soft limiter)",
        metric="ber",
        base=dict(
            _FIG_BASE, scheme=RelayScheme.VGII, hpa_kind="sel",
            snr_db=tuple(np.arange(0.0, 41.0, 2.0)),
        ),
        curves=[("ibo=5dB", dict(ibo_db=5.0)), ("ibo=10dB", dict(ibo_db=10.0))],
    ),
    7: dict(
        title="fixed-gain BER for various CSI correlations (Rapp amplifier)",
        metric="ber",
        base=dict(
            _FIG_BASE, scheme=RelayScheme.FG, hpa_kind="sspa", smoothness=2.0,
            ibo_db=10.0, snr_db=tuple(np.arange(0.0, 41.0, 2.0)),
        ),
        curves=[("rho=0.5", dict(rho1=0.5, rho2=0.5)),
                ("rho=0.9", dict(rho1=0.9, rho2=0.9)),
                ("rho=1", dict(rho1=1.0, rho2=1.0))],
    ),
    8: dict(
        title="fixed-gain capacity vs selected rank, nearly uncorrelated CSI",
        metric="capacity",
        base=dict(
            _FIG_BASE, scheme=RelayScheme.FG, hpa_kind="sspa", smoothness=2.0,
            ibo_db=10.0, rho1=0.009, rho2=0.009,
            snr_db=tuple(np.arange(0.0, 41.0, 2.0)),
        ),
        curves=[("k=1", dict(rank=1)), ("k=2", dict(rank=2)), ("k=3", dict(rank=3))],
    ),
    9: dict(
        title="fixed-gain capacity vs selected rank, highly correlated CSI",
        metric="capacity",
        base=dict(
            _FIG_BASE, scheme=RelayScheme.FG, hpa_kind="sspa", smoothness=2.0,
            ibo_db=10.0, rho1=0.95, rho2=0.95,
            snr_db=tuple(np.arange(0.0, 41.0, 2.0)),
        ),
        curves=[("k=1", dict(rank=1)), ("k=2", dict(rank=2)), ("k=3", dict(rank=3))],
    ),
    10: dict(
        title="variable-gain-II capacity vs back-off (Saleh amplifier)",
        metric="capacity",
        base=dict(
            _FIG_BASE, scheme=RelayScheme.VGII, hpa_kind="twta", phi0=0.0,
            snr_db=tuple(np.arange(0.0, 61.0, 4.0)),
        ),
        curves=[("ibo=4dB", dict(ibo_db=4.0)),
                ("ibo=8dB", dict(ibo_db=8.0)),
                ("ibo=20dB", dict(ibo_db=20.0))],
    ),
}


def figure_config(fig_id: int, label: str) -> SystemConfig:
    """The resolved SystemConfig behind one curve of a figure recipe."""
    recipe = FIGURE_DEFAULTS[fig_id]
    overrides = dict(recipe["base"])
    for lab, cur in recipe["curves"]:
        if lab == label:
            overrides.update(cur)
            return SystemConfig(**overrides)
    raise KeyError(f"figure {fig_id} has no curve {label!r}")


def cmd_figure(fig_id: int, overrides: dict | None = None, out=None) -> int:
    """Emit the sweep CSV of one figure recipe (one block per curve)."""
    if fig_id not in FIGURE_DEFAULTS:
        raise ConfigError(
            f"unknown figure id {fig_id}; known: {sorted(FIGURE_DEFAULTS)}"
        )
    recipe = FIGURE_DEFAULTS[fig_id]
    fh = out or _sys.stdout
    first = True
    status = 0
    for label, _ in recipe["curves"]:
        sys_cfg = figure_config(fig_id, label)
        if overrides:
            sys_cfg = _apply_overrides(sys_cfg, overrides)
        points = run_sweep(sys_cfg, sys_cfg.mc)
        if first:
            _write_preamble(
                fh, sys_cfg,
                extra=[f"figure {fig_id}: {recipe['title']}",
                       f"figure metric of record: {recipe['metric']}",
                       "per-curve config deltas are in the curve labels"],
            )
            fh.write("curve," + ",".join(_SWEEP_COLUMNS) + "\n")
            first = False
        _write_points(fh, points, prefix=f"{label},")
        if any(pt.error is not None for pt in points):
            status = 2
    return status


def _apply_overrides(sys_cfg: SystemConfig, overrides: dict) -> SystemConfig:
    text = "\n".join(f"{k} = {v}" for k, v in overrides.items())
    partial = parse_config_text(text, source="<overrides>")
    fields = {}
    for key in overrides:
        if key in ("rho1", "rho2", "scheme", "snr_db", "gamma_th_db", "samples",
                   "seed", "workers", "fidelity", "n_relays", "rank", "ibo_db",
                   "smoothness", "phi0"):
            attr = {"scheme": "scheme", "fidelity": "fidelity"}.get(key, key)
            fields[attr] = getattr(partial, attr)
        elif key == "hpa":
            fields["hpa_kind"] = partial.hpa_kind
        elif key in ("modulation", "alpha", "beta"):
            fields["modulation"] = partial.modulation
            fields["modulation_name"] = partial.modulation_name
        elif key in ("doppler_hz", "delay_s"):
            fields["rho1"] = partial.rho1
            fields["rho2"] = partial.rho2
        else:
            raise ConfigError(f"cannot override key {key!r}")
    return replace(sys_cfg, **fields)


# ----------------------------------------------------------------------
# bussgang table dump
# ----------------------------------------------------------------------


def cmd_bussgang(sys_cfg: SystemConfig, ibo_grid=None, out=None) -> int:
    """Dump delta / sigma_tau^2 / zeta against back-off for the config."""
    if sys_cfg.hpa_kind == "ideal":
        raise ConfigError("bussgang tables need a nonlinear hpa in the config")
    fh = out or _sys.stdout
    grid = tuple(ibo_grid) if ibo_grid is not None else tuple(np.arange(0.0, 20.5, 1.0))
    _write_preamble(fh, sys_cfg, extra=["bussgang parameter table vs back-off"])
    fh.write("ibo_db,snr_db,delta,sigma_tau_sq,zeta\n")
    for ibo in grid:
        cfg_i = replace(sys_cfg, ibo_db=float(ibo))
        model = cfg_i.hpa_model
        if isinstance(model, hpa.SolidState) and model.smoothness != 1.0:
            bp = hpa.bussgang_numeric(model)
        else:
            bp = hpa.bussgang_closed_form(model)
        for snr_db in sys_cfg.snr_db:
            g = 10.0 ** (snr_db / 10.0)
            fading = FadingConfig(
                sys_cfg.n_relays, sys_cfg.rank, g, g, sys_cfg.rho1, sys_cfg.rho2
            )
            z = effective_zeta(bp, fading, hop_statistics(fading))
            fh.write(
                f"{_fmt(float(ibo))},{_fmt(float(snr_db))},{_fmt(bp.delta)},"
                f"{_fmt(bp.sigma_tau_sq)},{_fmt(z)}\n"
            )
    return 0


# ----------------------------------------------------------------------
# validation suite
# ----------------------------------------------------------------------


def run_validation(sys_cfg: SystemConfig, out=None, corrupt_stats=None):
    """Cross-engine invariant suite; returns (all_passed, report_lines).

    corrupt_stats is a test hook: a callable applied to each HopStatistics
    before the analytic evaluations, used to prove the suite fails loudly
    on corrupted coefficients.
    """
    fh = out or _sys.stdout
    lines = []
    ok_all = True

    def check(name, passed, detail):
        nonlocal ok_all
        ok_all = ok_all and passed
        line = f"CHECK {name} {'PASS' if passed else 'FAIL'} {detail}"
        lines.append(line)
        fh.write(line + "\n")

    # 1. Bussgang closed form vs the radial-integral oracle.
    model = sys_cfg.hpa_model
    if isinstance(model, hpa.Ideal):
        check("bussgang-oracle", True, "ideal hardware (delta=1, stau=0 by definition)")
    elif isinstance(model, hpa.SolidState) and model.smoothness != 1.0:
        check("bussgang-oracle", True, "no closed form for this smoothness; numeric path only")
    else:
        cf = hpa.bussgang_closed_form(model)
        nu = hpa.bussgang_numeric(model)
        rd = abs(cf.delta - nu.delta) / nu.delta
        rs = abs(cf.sigma_tau_sq - nu.sigma_tau_sq) / max(nu.sigma_tau_sq, 1e-30)
        passed = rd < 1e-6 and (rs < 1e-6 or nu.sigma_tau_sq < 1e-12)
        check("bussgang-oracle", passed, f"delta rel {rd:.2e}, stau rel {rs:.2e}")

    mc = sys_cfg.mc
    for snr_db in sys_cfg.snr_db[:2]:
        pm = point_model(sys_cfg, snr_db)
        stats = hop_statistics(pm.fading)
        if corrupt_stats is not None:
            stats = corrupt_stats(stats)

        # 2. pdf normalization and moment consistency.
        try:
            norm = integrate(
                lambda x: ordered_pdf_hop1(x, pm.fading, stats), 0.0, math.inf,
                QuadratureSpec(abs_tol=1e-12, rel_tol=1e-9, max_subdivisions=2000),
            )
            m1_quad = integrate(
                lambda x: x * ordered_pdf_hop1(x, pm.fading, stats), 0.0, math.inf,
                QuadratureSpec(abs_tol=1e-12, rel_tol=1e-9, max_subdivisions=2000),
            )
            m1 = hop1_moment(1, pm.fading, stats)
            ok = abs(norm - 1.0) < 1e-6 and abs(m1_quad - m1) / m1 < 1e-6
            check(
                f"hop1-stats@{snr_db:g}dB", ok,
                f"pdf norm {norm:.9f}, moment quad/closed rel "
                f"{abs(m1_quad - m1) / m1:.2e}",
            )
        except (ArithmeticError, ValueError) as exc:
            check(f"hop1-stats@{snr_db:g}dB", False, f"error: {exc}")

        # 3. analytic outage vs MC (3 sigma under the analytic null; the
        # variable-gain-I approximation gets 10% or 3 sigma, whichever is looser).
        try:
            p_an = outage_closed(pm.scheme, sys_cfg.gamma_th, pm.fading, stats, pm.zeta)
            est = estimate_outage(sys_cfg, mc, sys_cfg.gamma_th, snr_db=snr_db)
            sd = math.sqrt(max(p_an * (1.0 - p_an), 0.0) / mc.samples)
            tol = 3.0 * sd
            if pm.scheme is RelayScheme.VGI:
                tol = max(tol, 0.10 * p_an)
            ok = abs(p_an - est.mean) <= tol
            check(
                f"outage-mc@{snr_db:g}dB", ok,
                f"analytic {p_an:.4e}, mc {est.mean:.4e} "
                f"(gap {abs(p_an - est.mean):.2e}, tol {tol:.2e})",
            )
        except (ArithmeticError, ValueError) as exc:
            check(f"outage-mc@{snr_db:g}dB", False, f"error: {exc}")

        # 4. closed-form BER vs kernel quadrature.
        try:
            b_cf = ber_closed(pm.scheme, sys_cfg.modulation, pm.fading, stats, pm.zeta)
            b_q = ber_quadrature(pm.scheme, sys_cfg.modulation, pm.fading, stats, pm.zeta)
            tol = 1e-3 if pm.scheme is RelayScheme.FG else 5e-2
            rel = abs(b_cf - b_q) / max(b_q, 1e-30)
            check(
                f"ber-identity@{snr_db:g}dB", rel < tol,
                f"closed {b_cf:.4e}, quadrature {b_q:.4e}, rel {rel:.2e}",
            )
        except (ArithmeticError, ValueError) as exc:
            check(f"ber-identity@{snr_db:g}dB", False, f"error: {exc}")

        # 5. capacity quadrature vs MC.
        try:
            c_an = capacity_quadrature(pm.scheme, pm.fading, stats, pm.zeta)
            c_mc = estimate_capacity(sys_cfg, mc, snr_db=snr_db)
            tol = max(3.0 * c_mc.half_width_95 / 1.96, 0.01 * c_an)
            check(
                f"capacity-mc@{snr_db:g}dB", abs(c_an - c_mc.mean) <= tol,
                f"quadrature {c_an:.5f}, mc {c_mc.mean:.5f} +- {c_mc.half_width_95:.5f}",
            )
        except (ArithmeticError, ValueError, IntegrationError) as exc:
            check(f"capacity-mc@{snr_db:g}dB", False, f"error: {exc}")

    # 6. determinism spot check.
    small = replace(sys_cfg, samples=min(sys_cfg.samples, 100_000))
    a = estimate_outage(small, McConfig(small.samples, small.seed, 1), small.gamma_th)
    b = estimate_outage(small, McConfig(small.samples, small.seed, 4), small.gamma_th)
    check(
        "determinism", a == b,
        f"1-worker vs 4-worker estimates {'identical' if a == b else 'differ'}",
    )
    return ok_all, lines


def cmd_validate(sys_cfg: SystemConfig, out=None) -> int:
    ok, _ = run_validation(sys_cfg, out=out)
    return 0 if ok else 3


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # config-level exit code for usage errors
        self.print_usage(_sys.stderr)
        raise ConfigError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="afrelay", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="analytic + Monte Carlo sweep CSV")
    sp.add_argument("-c", "--config", required=True)
    sp.add_argument("-o", "--output", help="CSV path (default stdout)")

    fp = sub.add_parser("figure", help="reproduce one of the figure recipes (3..10)")
    fp.add_argument("id", type=int)
    fp.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a config key for every curve",
    )
    fp.add_argument("-o", "--output")

    vp = sub.add_parser("validate", help="run the cross-engine check suite")
    vp.add_argument("-c", "--config", required=True)

    bp = sub.add_parser("bussgang", help="dump delta/sigma_tau^2/zeta vs back-off")
    bp.add_argument("-c", "--config", required=True)
    bp.add_argument("--ibo-db", default="0:1:20", help="start:step:stop or list")
    bp.add_argument("-o", "--output")
    return p


def _open_out(path):
    return open(path, "w", encoding="utf-8", newline="") if path else None


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "sweep":
            sys_cfg = parse_config(args.config)
            out = _open_out(args.output)
            try:
                return cmd_sweep(sys_cfg, out=out)
            finally:
                if out:
                    out.close()
        if args.command == "figure":
            overrides = {}
            for item in args.set:
                if "=" not in item:
                    raise ConfigError(f"--set needs KEY=VALUE, got {item!r}")
                k, v = item.split("=", 1)
                overrides[k.strip()] = v.strip()
            out = _open_out(args.output)
            try:
                return cmd_figure(args.id, overrides or None, out=out)
            finally:
                if out:
                    out.close()
        if args.command == "validate":
            return cmd_validate(parse_config(args.config))
        if args.command == "bussgang":
            sys_cfg = parse_config(args.config)
            grid = _parse_snr_axis(args.ibo_db, 0)
            out = _open_out(args.output)
            try:
                return cmd_bussgang(sys_cfg, ibo_grid=grid, out=out)
            finally:
                if out:
                    out.close()
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 1
    except (IntegrationError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
