"""Memoryless high-power amplifier models and Bussgang linearization.

Three classical AM/AM / AM/PM characteristics are supported: the soft
envelope limiter (ideal clipper), the Rapp solid-state model with
smoothness factor, and the Saleh travelling-wave-tube model with its phase
rotation. For a circular Gaussian input of power sigma^2 the output
decomposes as psi = delta * phi + tau with tau uncorrelated distortion
noise; delta and sigma_tau^2 come either from the closed forms (clipper,
Rapp nu=1, Saleh with negligible AM/PM) or from the general radial-moment
integrals, which double as the oracle for the closed forms.

The operating point is set by the input back-off IBO = 10 log10(A_sat^2 /
sigma^2) against the mean power at the gain-block output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import (
    QuadratureSpec,
    erfc,
    erfcx,
    expint_e1_scaled,
    integrate,
)

__all__ = [
    "AmplifierOperatingPoint",
    "BussgangParams",
    "HpaModel",
    "Ideal",
    "SoftLimiter",
    "SolidState",
    "TravelingWave",
    "am_am",
    "am_pm",
    "apply_nonlinearity",
    "bussgang_closed_form",
    "bussgang_numeric",
    "ibo_to_asat",
    "zeta",
]


@dataclass(frozen=True)
class Ideal:
    """Distortion-free amplifier (identity characteristic)."""


@dataclass(frozen=True)
class SoftLimiter:
    """Ideal clipper: linear up to a_sat, hard-limited above."""

    a_sat: float

    def __post_init__(self):
        if not self.a_sat > 0:
            raise ValueError("a_sat must be positive")


@dataclass(frozen=True)
class SolidState:
    """Rapp model; smoothness controls the linear-to-saturation knee."""

    a_sat: float
    smoothness: float = 1.0

    def __post_init__(self):
        if not self.a_sat > 0:
            raise ValueError("a_sat must be positive")
        if not self.smoothness >= 1.0:
            raise ValueError("smoothness factor must be >= 1")


@dataclass(frozen=True)
class TravelingWave:
    """Saleh model; phi0 is the maximum AM/PM rotation (radians)."""

    a_sat: float
    phi0: float = 0.0

    def __post_init__(self):
        if not self.a_sat > 0:
            raise ValueError("a_sat must be positive")
        if not math.isfinite(self.phi0):
            raise ValueError("phi0 must be finite")


HpaModel = Ideal | SoftLimiter | SolidState | TravelingWave


@dataclass(frozen=True)
class BussgangParams:
    """Linear scale delta and distortion power sigma_tau^2."""

    delta: float
    sigma_tau_sq: float

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0 + 1e-12):
            raise ValueError(f"delta out of (0, 1]: {self.delta!r}")
        if self.sigma_tau_sq < -1e-15:
            raise ValueError(f"negative distortion power: {self.sigma_tau_sq!r}")


@dataclass(frozen=True)
class AmplifierOperatingPoint:
    """Mean gain-block output power and input back-off."""

    ibo_db: float
    sigma_sq: float = 1.0

    def __post_init__(self):
        if not self.sigma_sq > 0:
            raise ValueError("sigma_sq must be positive")


def ibo_to_asat(op: AmplifierOperatingPoint) -> float:
    """Saturation amplitude from the back-off: A_sat = sigma * 10^(IBO/20)."""
    return math.sqrt(op.sigma_sq) * 10.0 ** (op.ibo_db / 20.0)


def am_am(model: HpaModel, input_modulus):
    """AM/AM characteristic; scalar or array input modulus (>= 0)."""
    r = np.asarray(input_modulus, dtype=float)
    if np.any(r < 0):
        raise ValueError("input modulus must be nonnegative")
    if isinstance(model, Ideal):
        out = r
    elif isinstance(model, SoftLimiter):
        out = np.minimum(r, model.a_sat)
    elif isinstance(model, SolidState):
        nu = model.smoothness
        out = r * (1.0 + (r / model.a_sat) ** (2.0 * nu)) ** (-0.5 / nu)
    elif isinstance(model, TravelingWave):
        a2 = model.a_sat * model.a_sat
        out = a2 * r / (r * r + a2)
    else:
        raise TypeError(f"unknown HPA model: {model!r}")
    return float(out) if np.isscalar(input_modulus) else out


def am_pm(model: HpaModel, input_modulus):
    """AM/PM characteristic in radians; nonzero only for the Saleh model."""
    r = np.asarray(input_modulus, dtype=float)
    if np.any(r < 0):
        raise ValueError("input modulus must be nonnegative")
    if isinstance(model, TravelingWave):
        a2 = model.a_sat * model.a_sat
        out = model.phi0 * r * r / (r * r + a2)
    elif isinstance(model, (Ideal, SoftLimiter, SolidState)):
        out = np.zeros_like(r)
    else:
        raise TypeError(f"unknown HPA model: {model!r}")
    return float(out) if np.isscalar(input_modulus) else out


def apply_nonlinearity(model: HpaModel, sample):
    """Pass complex baseband samples through the amplifier.

    Output modulus is am_am(|x|) and the phase is arg(x) + am_pm(|x|);
    the ideal model returns the input bit-exactly.
    """
    if isinstance(model, Ideal):
        return sample
    z = np.asarray(sample, dtype=complex)
    r = np.abs(z)
    a = am_am(model, r)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(r > 0, z / np.where(r > 0, r, 1.0), 1.0 + 0.0j)
    out = a * unit
    if isinstance(model, TravelingWave) and model.phi0 != 0.0:
        out = out * np.exp(1j * am_pm(model, r))
    return complex(out) if np.isscalar(sample) else out


# ----------------------------------------------------------------------
# Bussgang parameters
# ----------------------------------------------------------------------

_BUSSGANG_QUAD = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-11, max_subdivisions=3000)


def bussgang_numeric(model: HpaModel, sigma_sq: float = 1.0) -> BussgangParams:
    """delta and sigma_tau^2 from the defining radial expectations.

    For a circular Gaussian input of power sigma^2 the modulus is Rayleigh,
    so delta = E[r F_a(r) e^{j F_p(r)}] / sigma^2 and E|psi|^2 = E[F_a(r)^2]
    reduce to 1-D integrals; with x = r^2/sigma^2 the weight is e^{-x}.
    This is the general path (any model, any smoothness/phase) and the
    oracle for the closed forms. A complex delta (AM/PM present) enters
    the distortion power through |delta|^2 and its magnitude is returned.
    """
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    if isinstance(model, Ideal):
        return BussgangParams(delta=1.0, sigma_tau_sq=0.0)
    sig = math.sqrt(sigma_sq)
    has_pm = isinstance(model, TravelingWave) and model.phi0 != 0.0

    def radial(f):
        return integrate(f, 0.0, math.inf, _BUSSGANG_QUAD)

    def r_of(x):
        return sig * math.sqrt(x)

    cross_re = radial(
        lambda x: math.exp(-x)
        * r_of(x)
        * am_am(model, r_of(x))
        * (math.cos(am_pm(model, r_of(x))) if has_pm else 1.0)
    )
    cross_im = 0.0
    if has_pm:
        cross_im = radial(
            lambda x: math.exp(-x)
            * r_of(x)
            * am_am(model, r_of(x))
            * math.sin(am_pm(model, r_of(x)))
        )
    out_pow = radial(lambda x: math.exp(-x) * am_am(model, r_of(x)) ** 2)
    delta_sq = (cross_re * cross_re + cross_im * cross_im) / (sigma_sq * sigma_sq)
    sigma_tau_sq = max(out_pow - delta_sq * sigma_sq, 0.0)
    return BussgangParams(delta=math.sqrt(delta_sq), sigma_tau_sq=sigma_tau_sq)


def bussgang_closed_form(model: HpaModel, sigma_sq: float = 1.0) -> BussgangParams:
    """Closed-form delta / sigma_tau^2 where the literature provides them.

    Soft limiter: any back-off; Rapp: smoothness 1 only (no closed form
    exists otherwise -- use bussgang_numeric); Saleh: valid premise is a
    negligible AM/PM (phi0 ~ 0), the formula ignores phi0. Scaled erfcx /
    e^x E1 forms keep everything finite at large back-off.
    """
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    if isinstance(model, Ideal):
        return BussgangParams(delta=1.0, sigma_tau_sq=0.0)
    if isinstance(model, SoftLimiter):
        rho = model.a_sat * model.a_sat / sigma_sq      # A^2/sigma^2
        z = math.sqrt(rho)
        delta = 1.0 - math.exp(-rho) + 0.5 * _SQRT_PI * z * erfc(z)
        stau = sigma_sq * max(1.0 - math.exp(-rho) - delta * delta, 0.0)
        return BussgangParams(delta=delta, sigma_tau_sq=stau)
    if isinstance(model, SolidState):
        if model.smoothness != 1.0:
            raise ValueError(
                "no closed form for Rapp smoothness != 1; use bussgang_numeric"
            )
        rho = model.a_sat * model.a_sat / sigma_sq
        z = math.sqrt(rho)
        # e^{rho} Ei(-rho) = -e^{rho} E1(rho), kept in scaled form.
        e1s = expint_e1_scaled(rho)
        delta = 0.5 * z * (2.0 * z - _SQRT_PI * erfcx(z) * (2.0 * rho - 1.0))
        stau = sigma_sq * max(rho * (1.0 - rho * e1s) - delta * delta, 0.0)
        return BussgangParams(delta=delta, sigma_tau_sq=stau)
    if isinstance(model, TravelingWave):
        rho = model.a_sat * model.a_sat / sigma_sq
        e1s = expint_e1_scaled(rho)
        delta = rho * (1.0 - rho * e1s)
        out_pow = sigma_sq * rho * rho * ((1.0 + rho) * e1s - 1.0)
        stau = max(out_pow - sigma_sq * delta * delta, 0.0)
        return BussgangParams(delta=delta, sigma_tau_sq=stau)
    raise TypeError(f"unknown HPA model: {model!r}")


_SQRT_PI = math.sqrt(math.pi)


def zeta(bp: BussgangParams, gain_power: float, noise_var: float) -> float:
    """Distortion inflation factor zeta = 1 + sigma_tau^2/(delta^2 G sigma0^2).

    G is the power-domain relaying gain (amplitude gain squared); ideal
    hardware gives exactly 1.
    """
    if not (gain_power > 0 and noise_var > 0):
        raise ValueError("gain_power and noise_var must be positive")
    return 1.0 + bp.sigma_tau_sq / (bp.delta * bp.delta * gain_power * noise_var)
