"""Joint spectral amplitude of a micro-ring SFWM pair source.

The biphoton amplitude is the product of Lorentzian field-enhancement factors
at the signal and idler resonances with a pump self-convolution integral:

    f(w_s, w_i) = L_s(w_s) L_i(w_i) * I(w_s + w_i)
    I(W) = integral a(w) a(W - w) L_p(w) L_p(W - w) dw

with a hyperbolic-secant pump spectrum a and unit-peak Lorentzian L.  Schmidt
decomposition of the sampled amplitude gives the heralded-photon purity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError, InfeasibleError

__all__ = [
    "RingResonance",
    "PumpPulse",
    "JsaGrid",
    "build_jsa",
    "apply_filter",
    "schmidt_purity",
]

_C_M_PER_S = 299_792_458.0
# sech(x)**2 = 1/2 at x = arccosh(sqrt(2)).
_SECH_HALF = math.acosh(math.sqrt(2.0))


def _fwhm_pm_to_ghz(fwhm_pm: float, center_nm: float) -> float:
    """Convert a wavelength FWHM (pm) at a given center into a frequency FWHM (GHz)."""
    lam = center_nm * 1e-9
    return _C_M_PER_S / lam**2 * (fwhm_pm * 1e-12) * 1e-9


@dataclass(frozen=True)
class RingResonance:
    """One ring resonance: Lorentzian field profile with unit peak."""

    center_nm: float
    fwhm_pm: float

    def __post_init__(self):
        if self.fwhm_pm <= 0:
            raise InfeasibleError("linewidth must be positive")

    @property
    def fwhm_ghz(self) -> float:
        return _fwhm_pm_to_ghz(self.fwhm_pm, self.center_nm)

    def field(self, detuning_ghz: np.ndarray) -> np.ndarray:
        """Complex Lorentzian field factor, |field| = 1 on resonance."""
        return 1.0 / (1.0 + 2.0j * np.asarray(detuning_ghz) / self.fwhm_ghz)


@dataclass(frozen=True)
class PumpPulse:
    """Transform-limited hyperbolic-secant pump spectrum."""

    center_nm: float
    fwhm_pm: float

    def __post_init__(self):
        if self.fwhm_pm <= 0:
            raise InfeasibleError("pump bandwidth must be positive")

    @property
    def fwhm_ghz(self) -> float:
        return _fwhm_pm_to_ghz(self.fwhm_pm, self.center_nm)

    def amplitude(self, detuning_ghz: np.ndarray) -> np.ndarray:
        """Sech spectral amplitude whose intensity FWHM equals fwhm_ghz (unit peak)."""
        scale = 2.0 * _SECH_HALF / self.fwhm_ghz
        x = np.abs(scale * np.asarray(detuning_ghz))
        # overflow-safe sech
        return 2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))


@dataclass(frozen=True)
class JsaGrid:
    """Sampled complex JSA on uniform signal/idler detuning axes (GHz)."""

    signal_ghz: np.ndarray
    idler_ghz: np.ndarray
    amplitude: np.ndarray

    def normalized(self) -> "JsaGrid":
        norm = np.linalg.norm(self.amplitude)
        if norm == 0.0:
            raise GridError("JSA has no support")
        return JsaGrid(self.signal_ghz, self.idler_ghz, self.amplitude / norm)


def build_jsa(
    pump: PumpPulse,
    pump_res: RingResonance,
    signal_res: RingResonance,
    idler_res: RingResonance,
    n_points: int = 512,
    span_linewidths: float = 20.0,
    n_pump_points: int = 1024,
) -> JsaGrid:
    """Sample the ring-SFWM joint spectral amplitude, L2-normalized.

    Both detuning axes share a common span of +-span_linewidths times the
    widest signal/idler linewidth, so the energy sum w_s + w_i lands on a
    uniform grid and the pump convolution is evaluated once per sum value.
    """
    width = max(signal_res.fwhm_ghz, idler_res.fwhm_ghz)
    half_span = span_linewidths * width
    narrowest = min(signal_res.fwhm_ghz, idler_res.fwhm_ghz)
    step = 2.0 * half_span / (n_points - 1)
    if narrowest / step < 8.0:
        raise GridError(
            "grid under-resolves the narrowest linewidth: "
            f"{narrowest / step:.2f} points per FWHM (need >= 8)"
        )
    axis = np.linspace(-half_span, half_span, n_points)

    # Pump self-convolution over all distinct energy sums w_s + w_i.
    sums = np.linspace(-2.0 * half_span, 2.0 * half_span, 2 * n_points - 1)
    pump_half = max(4.0 * pump.fwhm_ghz, 2.0 * half_span)
    w = np.linspace(-pump_half, pump_half, n_pump_points)
    dw = w[1] - w[0]
    f_w = pump.amplitude(w) * pump_res.field(w)
    rest = sums[:, None] - w[None, :]
    f_rest = pump.amplitude(rest) * pump_res.field(rest)
    conv = (f_rest * f_w[None, :]).sum(axis=1) * dw

    amp = (
        signal_res.field(axis)[:, None]
        * idler_res.field(axis)[None, :]
        * conv[np.arange(n_points)[:, None] + np.arange(n_points)[None, :]]
    )
    return JsaGrid(axis, axis, amp).normalized()


def apply_filter(grid: JsaGrid, width_ghz: float) -> JsaGrid:
    """Ideal rectangular passband of full width width_ghz on both channels."""
    if width_ghz <= 0:
        raise InfeasibleError("filter width must be positive")
    half = 0.5 * width_ghz
    keep_s = np.abs(grid.signal_ghz) <= half
    keep_i = np.abs(grid.idler_ghz) <= half
    amp = grid.amplitude * keep_s[:, None] * keep_i[None, :]
    if not np.any(amp):
        raise GridError("filter window excludes the whole JSA support")
    return JsaGrid(grid.signal_ghz, grid.idler_ghz, amp).normalized()


def schmidt_purity(grid: JsaGrid) -> tuple[float, np.ndarray]:
    """Heralded-photon purity and Schmidt weights of the sampled amplitude.

    Singular values sigma_k give weights mu_k = sigma_k**2 / sum(sigma**2);
    purity is sum(mu_k**2).  Weights are returned sorted descending.
    """
    if not np.any(grid.amplitude):
        raise GridError("cannot decompose an empty JSA")
    sigma = np.linalg.svd(grid.amplitude, compute_uv=False)
    mu = sigma**2 / np.sum(sigma**2)
    return float(np.sum(mu**2)), mu
