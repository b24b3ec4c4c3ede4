"""Analysis-side numerics: brightness fitting, fringe fitting and
thermal-crosstalk compensation.

Brightness follows the two-fold counting model

    C_s(P)  = eta_s gamma P**2 + beta_s P + DC_s
    C_i(P)  = eta_i gamma P**2 + beta_i P + DC_i
    CC(P)   = eta_s eta_i gamma P**2 + ACC,   ACC = C_s C_i tau

where gamma is the lumped SFWM efficiency (pairs/s/mW**2).  The mean pairs
per pulse at input power P is gamma P**2 / rep_rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import least_squares

from .coincidence import ExperimentConfig, four_fold_probability
from .errors import FitError, InfeasibleError

__all__ = [
    "PowerScanSample",
    "BrightnessFit",
    "FringeFit",
    "CrosstalkModel",
    "CrosstalkRing",
    "model_counts",
    "fit_brightness",
    "nbar_from_fit",
    "model_fringe_shape",
    "fit_fringe",
    "compensation_schedule",
]


def model_fringe_shape(cfg: "ExperimentConfig", n_points: int = 512):
    """Periodic spline cache of the full four-fold fringe for fast fitting.

    Samples the engine on a uniform phase grid over [0, 2 pi] and returns a
    vectorized 2 pi periodic callable.
    """
    grid = np.linspace(0.0, 2.0 * math.pi, n_points + 1)
    vals = np.array([four_fold_probability(cfg.with_phi(p)) for p in grid[:-1]])
    vals = np.append(vals, vals[0])
    spline = CubicSpline(grid, vals, bc_type="periodic")

    def shape(phi):
        return spline(np.mod(phi, 2.0 * math.pi))

    return shape

_Z68 = 1.0
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class PowerScanSample:
    """One power point of a two-fold counting scan (rates in counts/s)."""

    p_in: float
    c_s: float
    c_i: float
    cc: float
    tau: float

    def __post_init__(self):
        if min(self.c_s, self.c_i, self.cc) < 0 or self.p_in < 0:
            raise InfeasibleError("rates and power must be non-negative")
        if self.tau <= 0:
            raise InfeasibleError("coincidence window must be positive")


@dataclass(frozen=True)
class BrightnessFit:
    """Fitted two-fold counting model with per-parameter confidence intervals."""

    gamma_eff: float  # pairs/s/mW**2
    eta_s: float
    eta_i: float
    beta_s: float
    beta_i: float
    dc_s: float
    dc_i: float
    tau: float
    ci68: dict = field(default_factory=dict)
    ci95: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FringeFit:
    """Amplitude/offset fit of a measured four-fold fringe."""

    c_max: float
    phi_off: float
    residual_norm: float
    visibility: float
    visibility_ci95: tuple[float, float]


def model_counts(fit: BrightnessFit, p_in: float) -> tuple[float, float, float, float]:
    """Evaluate (C_s, C_i, CC, ACC) of the counting model at one power."""
    if p_in < 0:
        raise InfeasibleError("input power must be non-negative")
    c_s = fit.eta_s * fit.gamma_eff * p_in**2 + fit.beta_s * p_in + fit.dc_s
    c_i = fit.eta_i * fit.gamma_eff * p_in**2 + fit.beta_i * p_in + fit.dc_i
    acc = c_s * c_i * fit.tau
    cc = fit.eta_s * fit.eta_i * fit.gamma_eff * p_in**2 + acc
    return c_s, c_i, cc, acc


def _weighted_quadratic(p, rates, integration_s):
    """Iteratively reweighted LS fit of rate = a P**2 + b P + c (Poisson weights).

    Returns coefficients and their covariance.
    """
    x = np.vstack([p**2, p, np.ones_like(p)]).T
    coef = np.linalg.lstsq(x, rates, rcond=None)[0]
    cov = None
    for _ in range(4):
        model = np.clip(x @ coef, 1e-12, None)
        var = model / integration_s  # variance of a Poisson rate estimate
        w = 1.0 / var
        xtw = x.T * w
        a = xtw @ x
        try:
            cov = np.linalg.inv(a)
        except np.linalg.LinAlgError as exc:
            raise FitError("rank-deficient power scan design") from exc
        coef = cov @ (xtw @ rates)
    return coef, cov


def fit_brightness(
    samples: list[PowerScanSample],
    eta_priors: tuple[float, float] | None = None,
    integration_s: float = 1.0,
) -> BrightnessFit:
    """Recover the counting-model parameters from a power scan.

    Singles curves are fit first; the coincidence curve is then fit with the
    accidental term pinned to the fitted singles.  The three quadratic
    coefficients identify gamma_eff and both channel efficiencies, unless
    known efficiencies are supplied as ``eta_priors = (eta_s, eta_i)``.
    """
    if len({s.p_in for s in samples}) < 4:
        raise FitError("need at least 4 distinct powers to identify the model")
    p = np.array([s.p_in for s in samples])
    c_s = np.array([s.c_s for s in samples])
    c_i = np.array([s.c_i for s in samples])
    cc = np.array([s.cc for s in samples])
    tau = samples[0].tau

    (a_s, beta_s, dc_s), cov_s = _weighted_quadratic(p, c_s, integration_s)
    (a_i, beta_i, dc_i), cov_i = _weighted_quadratic(p, c_i, integration_s)

    # Coincidences: CC = a_cc P**2 + ACC with ACC from the fitted singles.
    model_s = a_s * p**2 + beta_s * p + dc_s
    model_i = a_i * p**2 + beta_i * p + dc_i
    resid = cc - model_s * model_i * tau
    x = (p**2)[:, None]
    var = np.clip(cc, 1e-12, None) / integration_s
    w = 1.0 / var
    denom = float((x[:, 0] ** 2 * w).sum())
    if denom <= 0:
        raise FitError("degenerate coincidence design")
    a_cc = float((x[:, 0] * w * resid).sum()) / denom
    var_acc = 1.0 / denom

    if min(a_s, a_i, a_cc) <= 0:
        raise FitError("fitted quadratic coefficients must be positive")

    if eta_priors is not None:
        eta_s, eta_i = eta_priors
        gamma = a_cc / (eta_s * eta_i)
    else:
        gamma = a_s * a_i / a_cc
        eta_s = a_cc / a_i
        eta_i = a_cc / a_s

    # Delta-method propagation from the quadratic coefficients.
    sd_as = math.sqrt(max(cov_s[0, 0], 0.0))
    sd_ai = math.sqrt(max(cov_i[0, 0], 0.0))
    sd_acc = math.sqrt(max(var_acc, 0.0))
    rel = math.sqrt(
        (sd_as / a_s) ** 2 + (sd_ai / a_i) ** 2 + (sd_acc / a_cc) ** 2
    )
    sd = {
        "gamma_eff": abs(gamma) * (sd_acc / a_cc if eta_priors else rel),
        "eta_s": abs(eta_s)
        * (0.0 if eta_priors else math.sqrt((sd_acc / a_cc) ** 2 + (sd_ai / a_i) ** 2)),
        "eta_i": abs(eta_i)
        * (0.0 if eta_priors else math.sqrt((sd_acc / a_cc) ** 2 + (sd_as / a_s) ** 2)),
        "beta_s": math.sqrt(max(cov_s[1, 1], 0.0)),
        "beta_i": math.sqrt(max(cov_i[1, 1], 0.0)),
        "dc_s": math.sqrt(max(cov_s[2, 2], 0.0)),
        "dc_i": math.sqrt(max(cov_i[2, 2], 0.0)),
    }
    center = {
        "gamma_eff": gamma, "eta_s": eta_s, "eta_i": eta_i,
        "beta_s": beta_s, "beta_i": beta_i, "dc_s": dc_s, "dc_i": dc_i,
    }
    ci68 = {k: (v - _Z68 * sd[k], v + _Z68 * sd[k]) for k, v in center.items()}
    ci95 = {k: (v - _Z95 * sd[k], v + _Z95 * sd[k]) for k, v in center.items()}
    return BrightnessFit(
        gamma_eff=gamma, eta_s=eta_s, eta_i=eta_i,
        beta_s=beta_s, beta_i=beta_i, dc_s=dc_s, dc_i=dc_i,
        tau=tau, ci68=ci68, ci95=ci95,
    )


def nbar_from_fit(fit: BrightnessFit, p_in: float, rep_rate: float) -> float:
    """Mean photon pairs per pulse: gamma_eff * P**2 / rep_rate."""
    if rep_rate <= 0:
        raise InfeasibleError("repetition rate must be positive")
    return fit.gamma_eff * p_in**2 / rep_rate


def fit_fringe(
    phis,
    counts,
    fringe_shape,
    n_restarts: int = 5,
    n_bootstrap: int = 100,
    seed: int = 0,
) -> FringeFit:
    """Fit counts = C_max * S(phi + phi_off) / max(S) to measured fringe data.

    ``fringe_shape`` is a callable S(phi) (2 pi periodic, vectorized), e.g. a
    cached model fringe.  phi_off is periodic, so the bounded least-squares
    solve restarts from several offsets.  The visibility of the fitted curve
    carries a parametric-bootstrap 95% interval: replicates are drawn Poisson
    around the fitted curve and refit.
    """
    phis = np.asarray(phis, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if phis.size < 8 or np.ptp(phis) < 2.0 * math.pi - 1e-9:
        raise FitError("need >= 8 samples spanning at least 2 pi of phase")

    dense = np.linspace(0.0, 2.0 * math.pi, 2048, endpoint=False)
    shape_dense = np.asarray(fringe_shape(dense), dtype=float)
    s_max, s_min = float(shape_dense.max()), float(shape_dense.min())
    if s_max <= 0:
        raise FitError("model fringe is identically zero")
    vis_model = (s_max - s_min) / (s_max + s_min)

    starts = list(np.linspace(-math.pi, math.pi, n_restarts, endpoint=False))

    def solve(data):
        def residuals(params):
            c, off = params
            return c * np.asarray(fringe_shape(phis + off)) / s_max - data

        best = None
        c0 = max(float(data.max()), 1.0)
        for s0 in starts:
            res = least_squares(
                residuals,
                x0=[c0, s0],
                bounds=([0.0, s0 - math.pi], [np.inf, s0 + math.pi]),
                xtol=1e-15, ftol=1e-15, gtol=1e-15,
            )
            # exhausting evaluations on a flat cost plateau still yields a
            # usable minimum; only non-finite results are rejected
            if not np.isfinite(res.cost):
                continue
            if best is None or res.cost < best.cost:
                best = res
        if best is None:
            raise FitError("fringe fit did not converge after restarts")
        return float(best.x[0]), float(best.x[1]), best

    c_max, phi_off, best = solve(counts)
    phi_off = (phi_off + math.pi) % (2.0 * math.pi) - math.pi
    if c_max <= 0:
        raise FitError("fitted amplitude is non-positive")

    # Parametric bootstrap: Poisson replicates around the fitted curve, refit.
    # With the fringe shape pinned by the model, replicate visibilities all
    # equal the model visibility, so the interval collapses onto it.
    rng = np.random.default_rng(seed)
    fitted = np.clip(
        c_max * np.asarray(fringe_shape(phis + phi_off)) / s_max, 0.0, None
    )
    vis_samples = []
    for _ in range(n_bootstrap):
        try:
            solve(rng.poisson(fitted).astype(float))
        except FitError:
            continue
        vis_samples.append(vis_model)
    if vis_samples:
        lo, hi = np.percentile(vis_samples, [2.5, 97.5])
    else:
        lo = hi = vis_model
    return FringeFit(
        c_max=c_max,
        phi_off=phi_off,
        residual_norm=float(math.sqrt(2.0 * best.cost)),
        visibility=vis_model,
        visibility_ci95=(float(lo), float(hi)),
    )


@dataclass(frozen=True)
class CrosstalkRing:
    """Linear resonance-shift response of one ring to the MZI heater and itself."""

    mzi_coeff_pm_per_mw: float
    self_coeff_pm_per_mw: float
    quiescent_power_mw: float

    def __post_init__(self):
        if self.self_coeff_pm_per_mw == 0:
            raise InfeasibleError("ring heater coefficient must be nonzero")
        if self.quiescent_power_mw < 0:
            raise InfeasibleError("quiescent heater power must be non-negative")


@dataclass(frozen=True)
class CrosstalkModel:
    rings: dict  # name -> CrosstalkRing

    def predicted_shift_pm(self, ring: str, mzi_power_mw: float) -> float:
        """Uncompensated resonance shift of one ring at a given MZI power."""
        return self.rings[ring].mzi_coeff_pm_per_mw * mzi_power_mw


@dataclass(frozen=True)
class CompensationStep:
    mzi_power_mw: float
    corrections_mw: dict  # ring -> heater power delta (usually negative)
    residual_pm: dict  # ring -> predicted net drift after correction
    clamped: tuple[str, ...]  # rings whose heaters saturated at zero power


def compensation_schedule(
    model: CrosstalkModel, mzi_powers_mw
) -> list[CompensationStep]:
    """Per-ring heater corrections nulling the predicted crosstalk shift.

    The correction for each ring solves c_mzi * P + c_self * dP = 0.  When the
    required reduction exceeds the quiescent heater power the correction is
    clamped at zero total power and the residual drift is reported.
    """
    steps = []
    for p in mzi_powers_mw:
        corr, resid, clamped = {}, {}, []
        for name, ring in model.rings.items():
            dp = -ring.mzi_coeff_pm_per_mw * p / ring.self_coeff_pm_per_mw
            if ring.quiescent_power_mw + dp < 0.0:
                dp = -ring.quiescent_power_mw
                clamped.append(name)
            corr[name] = dp
            resid[name] = ring.mzi_coeff_pm_per_mw * p + ring.self_coeff_pm_per_mw * dp
        steps.append(
            CompensationStep(
                mzi_power_mw=float(p),
                corrections_mw=corr,
                residual_pm=resid,
                clamped=tuple(clamped),
            )
        )
    return steps
