"""Sectioned key-value experiment files.

Flat INI-style documents with sections [source1], [source2], [mzi],
[detectors], [truncation], [sweep] and optional [jsa] and [crosstalk]
sections.  Unknown sections or keys are rejected; units are embedded in key
names.  Parsing then serializing then parsing again yields an identical
document model.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field

from .coincidence import DetectorModel, ExperimentConfig
from .errors import ConfigError
from .fock import SourceModel, TruncationPolicy, schmidt_from_purity
from .jsa import PumpPulse, RingResonance
from .mzi import MziModel

__all__ = ["ExperimentFile", "load_experiment", "loads_experiment", "dumps_experiment"]

_SOURCE_KEYS = {"nbar", "purity", "modes"}
_SCHEMA = {
    "source1": _SOURCE_KEYS,
    "source2": _SOURCE_KEYS,
    "mzi": {"theta_rad"},
    "detectors": {"eta_idler_1", "eta_idler_2", "eta_signal_c", "eta_signal_d"},
    "truncation": {"max_total_pairs"},
    "sweep": {"phi_start_rad", "phi_stop_rad", "points"},
    "jsa": {
        "pump_center_nm", "pump_fwhm_pm", "pump_res_fwhm_pm",
        "signal_center_nm", "signal_fwhm_pm",
        "idler_center_nm", "idler_fwhm_pm",
        "filter_ghz", "grid_points", "span_linewidths",
    },
    "crosstalk": None,  # validated separately (per-ring keys)
}
_REQUIRED = ("source1", "source2", "mzi", "detectors", "truncation", "sweep")
_CROSSTALK_RING_SUFFIXES = ("mzi_coeff_pm_per_mw", "self_coeff_pm_per_mw", "quiescent_mw")


@dataclass(frozen=True)
class SourceSpec:
    nbar: float
    purity: float
    modes: int


@dataclass(frozen=True)
class SweepSpec:
    phi_start_rad: float
    phi_stop_rad: float
    points: int


@dataclass(frozen=True)
class JsaSpec:
    pump_center_nm: float
    pump_fwhm_pm: float
    pump_res_fwhm_pm: float
    signal_center_nm: float
    signal_fwhm_pm: float
    idler_center_nm: float
    idler_fwhm_pm: float
    filter_ghz: float = 0.0  # 0 disables filtering
    grid_points: int = 512
    span_linewidths: float = 20.0


@dataclass(frozen=True)
class CrosstalkSpec:
    rings: dict  # name -> (mzi_coeff, self_coeff, quiescent)
    mzi_max_mw: float
    points: int


@dataclass(frozen=True)
class ExperimentFile:
    source1: SourceSpec
    source2: SourceSpec
    theta_rad: float
    eta_idler_1: float
    eta_idler_2: float
    eta_signal_c: float
    eta_signal_d: float
    max_total_pairs: int
    sweep: SweepSpec
    jsa: JsaSpec | None = None
    crosstalk: CrosstalkSpec | None = None

    def phis(self) -> list[float]:
        s = self.sweep
        if s.points < 1:
            raise ConfigError("sweep needs at least one point")
        if s.phi_stop_rad <= s.phi_start_rad:
            raise ConfigError("sweep stop phase must exceed start phase")
        step = (s.phi_stop_rad - s.phi_start_rad) / s.points
        return [s.phi_start_rad + i * step for i in range(s.points)]

    def experiment_config(
        self, distinguishable: bool = False, trunc_override: int | None = None
    ) -> ExperimentConfig:
        def src(s: SourceSpec) -> SourceModel:
            return SourceModel(schmidt_from_purity(s.purity, s.modes), s.nbar)

        if self.source1.modes != self.source2.modes:
            raise ConfigError("both sources must use the same Schmidt mode count")
        return ExperimentConfig(
            s1=src(self.source1),
            s2=src(self.source2),
            mzi=MziModel(theta=self.theta_rad),
            det_idler1=DetectorModel(self.eta_idler_1),
            det_idler2=DetectorModel(self.eta_idler_2),
            det_signal_c=DetectorModel(self.eta_signal_c),
            det_signal_d=DetectorModel(self.eta_signal_d),
            trunc=TruncationPolicy(trunc_override or self.max_total_pairs),
            distinguishable=distinguishable,
        )

    def jsa_inputs(self):
        if self.jsa is None:
            raise ConfigError("experiment file has no [jsa] section")
        j = self.jsa
        pump = PumpPulse(j.pump_center_nm, j.pump_fwhm_pm)
        pump_res = RingResonance(j.pump_center_nm, j.pump_res_fwhm_pm)
        signal_res = RingResonance(j.signal_center_nm, j.signal_fwhm_pm)
        idler_res = RingResonance(j.idler_center_nm, j.idler_fwhm_pm)
        return pump, pump_res, signal_res, idler_res


def _getfloat(sec, key):
    try:
        return float(sec[key])
    except KeyError:
        raise ConfigError(f"missing key {key!r} in section [{sec.name}]") from None
    except ValueError:
        raise ConfigError(f"key {key!r} in [{sec.name}] is not a number") from None


def _getint(sec, key):
    v = _getfloat(sec, key)
    if v != int(v):
        raise ConfigError(f"key {key!r} in [{sec.name}] must be an integer")
    return int(v)


def loads_experiment(text: str) -> ExperimentFile:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse experiment file: {exc}") from exc

    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        allowed = _SCHEMA[section]
        if allowed is not None:
            unknown = set(cp[section]) - allowed
            if unknown:
                raise ConfigError(
                    f"unknown keys in [{section}]: {', '.join(sorted(unknown))}"
                )
    for section in _REQUIRED:
        if section not in cp:
            raise ConfigError(f"missing section [{section}]")

    def source(name):
        sec = cp[name]
        return SourceSpec(
            nbar=_getfloat(sec, "nbar"),
            purity=_getfloat(sec, "purity"),
            modes=_getint(sec, "modes"),
        )

    sweep = SweepSpec(
        phi_start_rad=_getfloat(cp["sweep"], "phi_start_rad"),
        phi_stop_rad=_getfloat(cp["sweep"], "phi_stop_rad"),
        points=_getint(cp["sweep"], "points"),
    )
    jsa = None
    if "jsa" in cp:
        sec = cp["jsa"]
        jsa = JsaSpec(
            pump_center_nm=_getfloat(sec, "pump_center_nm"),
            pump_fwhm_pm=_getfloat(sec, "pump_fwhm_pm"),
            pump_res_fwhm_pm=_getfloat(sec, "pump_res_fwhm_pm"),
            signal_center_nm=_getfloat(sec, "signal_center_nm"),
            signal_fwhm_pm=_getfloat(sec, "signal_fwhm_pm"),
            idler_center_nm=_getfloat(sec, "idler_center_nm"),
            idler_fwhm_pm=_getfloat(sec, "idler_fwhm_pm"),
            filter_ghz=float(sec.get("filter_ghz", 0.0)),
            grid_points=int(sec.get("grid_points", 512)),
            span_linewidths=float(sec.get("span_linewidths", 20.0)),
        )
    crosstalk = None
    if "crosstalk" in cp:
        sec = cp["crosstalk"]
        if "rings" not in sec:
            raise ConfigError("[crosstalk] must list ring names under 'rings'")
        # configparser lowercases keys, so ring names are case-insensitive
        names = [n.strip().lower() for n in sec["rings"].split(",") if n.strip()]
        allowed = {"rings", "mzi_max_mw", "points"} | {
            f"{n}_{suffix}" for n in names for suffix in _CROSSTALK_RING_SUFFIXES
        }
        unknown = set(sec) - allowed
        if unknown:
            raise ConfigError(
                f"unknown keys in [crosstalk]: {', '.join(sorted(unknown))}"
            )
        rings = {}
        for n in names:
            rings[n] = (
                _getfloat(sec, f"{n}_mzi_coeff_pm_per_mw"),
                _getfloat(sec, f"{n}_self_coeff_pm_per_mw"),
                _getfloat(sec, f"{n}_quiescent_mw"),
            )
        crosstalk = CrosstalkSpec(
            rings=rings,
            mzi_max_mw=_getfloat(sec, "mzi_max_mw"),
            points=_getint(sec, "points"),
        )

    return ExperimentFile(
        source1=source("source1"),
        source2=source("source2"),
        theta_rad=_getfloat(cp["mzi"], "theta_rad"),
        eta_idler_1=_getfloat(cp["detectors"], "eta_idler_1"),
        eta_idler_2=_getfloat(cp["detectors"], "eta_idler_2"),
        eta_signal_c=_getfloat(cp["detectors"], "eta_signal_c"),
        eta_signal_d=_getfloat(cp["detectors"], "eta_signal_d"),
        max_total_pairs=_getint(cp["truncation"], "max_total_pairs"),
        sweep=sweep,
        jsa=jsa,
        crosstalk=crosstalk,
    )


def load_experiment(path) -> ExperimentFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return loads_experiment(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def dumps_experiment(exp: ExperimentFile) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp["source1"] = {
        "nbar": _fmt(exp.source1.nbar),
        "purity": _fmt(exp.source1.purity),
        "modes": str(exp.source1.modes),
    }
    cp["source2"] = {
        "nbar": _fmt(exp.source2.nbar),
        "purity": _fmt(exp.source2.purity),
        "modes": str(exp.source2.modes),
    }
    cp["mzi"] = {"theta_rad": _fmt(exp.theta_rad)}
    cp["detectors"] = {
        "eta_idler_1": _fmt(exp.eta_idler_1),
        "eta_idler_2": _fmt(exp.eta_idler_2),
        "eta_signal_c": _fmt(exp.eta_signal_c),
        "eta_signal_d": _fmt(exp.eta_signal_d),
    }
    cp["truncation"] = {"max_total_pairs": str(exp.max_total_pairs)}
    cp["sweep"] = {
        "phi_start_rad": _fmt(exp.sweep.phi_start_rad),
        "phi_stop_rad": _fmt(exp.sweep.phi_stop_rad),
        "points": str(exp.sweep.points),
    }
    if exp.jsa is not None:
        j = exp.jsa
        cp["jsa"] = {
            "pump_center_nm": _fmt(j.pump_center_nm),
            "pump_fwhm_pm": _fmt(j.pump_fwhm_pm),
            "pump_res_fwhm_pm": _fmt(j.pump_res_fwhm_pm),
            "signal_center_nm": _fmt(j.signal_center_nm),
            "signal_fwhm_pm": _fmt(j.signal_fwhm_pm),
            "idler_center_nm": _fmt(j.idler_center_nm),
            "idler_fwhm_pm": _fmt(j.idler_fwhm_pm),
            "filter_ghz": _fmt(j.filter_ghz),
            "grid_points": str(j.grid_points),
            "span_linewidths": _fmt(j.span_linewidths),
        }
    if exp.crosstalk is not None:
        c = exp.crosstalk
        sec = {"rings": ", ".join(c.rings)}
        for name, (mzi_c, self_c, quiescent) in c.rings.items():
            sec[f"{name}_mzi_coeff_pm_per_mw"] = _fmt(mzi_c)
            sec[f"{name}_self_coeff_pm_per_mw"] = _fmt(self_c)
            sec[f"{name}_quiescent_mw"] = _fmt(quiescent)
        sec["mzi_max_mw"] = _fmt(c.mzi_max_mw)
        sec["points"] = str(c.points)
        cp["crosstalk"] = sec
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
