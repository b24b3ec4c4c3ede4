"""Command-line front end.

Subcommands: fringe, visibility-sweep, jsa, fit brightness, fit fringe,
compensate.  Each report path writes delimited output (CSV/JSON) and, unless
--no-fig is given, a PNG figure alongside it.

Exit codes: 0 success, 2 usage or parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import calibration, plots
from .coincidence import fringe_sweep, fringe_visibility, visibility_vs_nbar
from .errors import ConfigError, FitError, GridError, HeraldError, InfeasibleError
from .expfile import load_experiment
from .jsa import apply_filter, build_jsa, schmidt_purity
from .mzi import fringe_extrema_phase

_FLOAT_FMT = ".17g"


def _fmt(v) -> str:
    return format(float(v), _FLOAT_FMT)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sidecar(out: Path, suffix: str) -> Path:
    return out.with_suffix(suffix)


def cmd_fringe(args) -> int:
    exp = load_experiment(args.config)
    phis = exp.phis()
    if args.grid:
        start, stop = exp.sweep.phi_start_rad, exp.sweep.phi_stop_rad
        step = (stop - start) / args.grid
        phis = [start + i * step for i in range(args.grid)]
    cfg_ind = exp.experiment_config(distinguishable=False, trunc_override=args.trunc)
    cfg_dist = exp.experiment_config(distinguishable=True, trunc_override=args.trunc)
    curve_ind = fringe_sweep(cfg_ind, phis)
    curve_dist = fringe_sweep(cfg_dist, phis)

    out = Path(args.out)
    _write_csv(
        out,
        ["phi_rad", "p4f_indistinguishable", "p4f_distinguishable"],
        zip(phis, curve_ind.p4f, curve_dist.p4f),
    )
    summary = {
        "visibility": {
            "indistinguishable": fringe_visibility(cfg_ind),
            "distinguishable": fringe_visibility(cfg_dist),
        },
        "minimum_phase_rad": fringe_extrema_phase(exp.theta_rad),
        "theta_rad": exp.theta_rad,
    }
    _write_json(_sidecar(out, ".json"), summary)
    if not args.no_fig:
        plots.plot_fringe(phis, curve_ind.p4f, curve_dist.p4f, _sidecar(out, ".png"))
    return 0


def cmd_visibility_sweep(args) -> int:
    exp = load_experiment(args.config)
    if args.points < 1:
        raise ConfigError("need at least one sweep point")
    nbars = np.linspace(args.nbar_min, args.nbar_max, args.points)
    detectors = (
        exp.eta_idler_1, exp.eta_idler_2, exp.eta_signal_c, exp.eta_signal_d,
    )
    rows = visibility_vs_nbar(
        exp.source1.purity,
        exp.theta_rad,
        detectors,
        nbars,
        modes=exp.source1.modes,
        max_total_pairs=args.trunc or exp.max_total_pairs,
    )
    out = Path(args.out)
    _write_csv(out, ["nbar", "visibility"], rows)
    if not args.no_fig:
        plots.plot_visibility_sweep(
            [r[0] for r in rows], [r[1] for r in rows], _sidecar(out, ".png")
        )
    return 0


def cmd_jsa(args) -> int:
    exp = load_experiment(args.config)
    pump, pump_res, signal_res, idler_res = exp.jsa_inputs()
    spec = exp.jsa
    grid = build_jsa(
        pump, pump_res, signal_res, idler_res,
        n_points=args.grid or spec.grid_points,
        span_linewidths=spec.span_linewidths,
    )
    if spec.filter_ghz > 0:
        grid = apply_filter(grid, spec.filter_ghz)
    purity, mu = schmidt_purity(grid)
    out = Path(args.out)
    _write_json(
        out,
        {
            "purity": purity,
            "schmidt_weights": [float(v) for v in mu[:8]],
            "two_mode_weight_fraction": float(mu[:2].sum()),
            "filter_ghz": spec.filter_ghz,
        },
    )
    if args.matrix_out:
        np.savetxt(args.matrix_out, np.abs(grid.amplitude), delimiter=",", fmt="%.17g")
    if not args.no_fig:
        plots.plot_jsa(grid, _sidecar(out, ".png"))
    return 0


def _read_csv(path, columns):
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = set(columns) - set(reader.fieldnames or ())
            if missing:
                raise ConfigError(
                    f"{path}: missing columns: {', '.join(sorted(missing))}"
                )
            rows = []
            for i, row in enumerate(reader, start=2):
                try:
                    rows.append([float(row[c]) for c in columns])
                except (TypeError, ValueError):
                    raise ConfigError(f"{path}:{i}: non-numeric value") from None
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    return np.array(rows)


def cmd_fit_brightness(args) -> int:
    data = _read_csv(args.data, ["p_in_mw", "c_s", "c_i", "cc", "tau_s"])
    samples = [
        calibration.PowerScanSample(p, cs, ci, cc, tau)
        for p, cs, ci, cc, tau in data
    ]
    fit = calibration.fit_brightness(samples, integration_s=args.integration_s)
    nbar = calibration.nbar_from_fit(fit, args.power_mw, args.rep_rate_hz)
    out = Path(args.out)
    _write_json(
        out,
        {
            "gamma_eff_pairs_per_s_mw2": fit.gamma_eff,
            "eta_s": fit.eta_s,
            "eta_i": fit.eta_i,
            "beta_s": fit.beta_s,
            "beta_i": fit.beta_i,
            "dc_s": fit.dc_s,
            "dc_i": fit.dc_i,
            "ci68": {k: list(v) for k, v in fit.ci68.items()},
            "ci95": {k: list(v) for k, v in fit.ci95.items()},
            "nbar_per_pulse": nbar,
            "at_power_mw": args.power_mw,
            "rep_rate_hz": args.rep_rate_hz,
        },
    )
    if not args.no_fig:
        plots.plot_brightness_fit(samples, fit, _sidecar(out, ".png"))
    return 0


def cmd_fit_fringe(args) -> int:
    data = _read_csv(args.data, ["phi_rad", "counts", "integration_s"])
    exp = load_experiment(args.config)
    cfg = exp.experiment_config(trunc_override=args.trunc)
    shape = calibration.model_fringe_shape(cfg)
    fit = calibration.fit_fringe(
        data[:, 0], data[:, 1], shape, seed=args.seed
    )
    out = Path(args.out)
    _write_json(
        out,
        {
            "c_max": fit.c_max,
            "phi_off_rad": fit.phi_off,
            "residual_norm": fit.residual_norm,
            "visibility": fit.visibility,
            "visibility_ci95": list(fit.visibility_ci95),
        },
    )
    if not args.no_fig:
        dense = np.linspace(0.0, 2.0 * math.pi, 2048)
        s_max = float(np.max(shape(dense)))
        fitted = fit.c_max * shape(data[:, 0] + fit.phi_off) / s_max
        plots.plot_fringe_fit(data[:, 0], data[:, 1], fitted, _sidecar(out, ".png"))
    return 0


def cmd_compensate(args) -> int:
    exp = load_experiment(args.config)
    if exp.crosstalk is None:
        raise ConfigError("experiment file has no [crosstalk] section")
    ct = exp.crosstalk
    model = calibration.CrosstalkModel(
        rings={
            name: calibration.CrosstalkRing(*coeffs)
            for name, coeffs in ct.rings.items()
        }
    )
    powers = np.linspace(0.0, ct.mzi_max_mw, ct.points)
    steps = calibration.compensation_schedule(model, powers)
    out = Path(args.out)
    names = list(ct.rings)
    header = ["mzi_power_mw"]
    for n in names:
        header += [f"{n}_correction_mw", f"{n}_residual_pm"]
    rows = []
    for s in steps:
        row = [s.mzi_power_mw]
        for n in names:
            row += [s.corrections_mw[n], s.residual_pm[n]]
        rows.append(row)
    _write_csv(out, header, rows)
    if not args.no_fig:
        plots.plot_compensation(powers, steps, _sidecar(out, ".png"))
    for s in steps:
        if s.clamped:
            print(
                f"warning: heater saturated at zero power for {', '.join(s.clamped)} "
                f"at MZI power {s.mzi_power_mw:g} mW",
                file=sys.stderr,
            )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringmzi",
        description="Heralded-photon MZI interference simulator and calibration fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="experiment file path")
        p.add_argument("--out", required=True, help="output path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--grid", type=int, default=0, help="override grid size")
        p.add_argument("--trunc", type=int, default=0, help="override pair truncation")
        p.add_argument("--no-fig", action="store_true", help="skip PNG rendering")

    p = sub.add_parser("fringe", help="simulate four-fold fringes")
    common(p)
    p.set_defaults(func=cmd_fringe)

    p = sub.add_parser("visibility-sweep", help="visibility vs brightness")
    common(p)
    p.add_argument("--nbar-min", type=float, default=1e-3)
    p.add_argument("--nbar-max", type=float, default=0.2)
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(func=cmd_visibility_sweep)

    p = sub.add_parser("jsa", help="joint spectral amplitude and purity")
    common(p)
    p.add_argument("--matrix-out", help="also write |JSA| matrix CSV")
    p.set_defaults(func=cmd_jsa)

    fit = sub.add_parser("fit", help="fit measured data")
    fit_sub = fit.add_subparsers(dest="fit_kind", required=True)

    p = fit_sub.add_parser("brightness", help="fit a power-scan CSV")
    common(p, config=False)
    p.add_argument("--data", required=True, help="CSV: p_in_mw,c_s,c_i,cc,tau_s")
    p.add_argument("--rep-rate-hz", type=float, default=50e6)
    p.add_argument("--power-mw", type=float, default=1.0)
    p.add_argument("--integration-s", type=float, default=1.0)
    p.set_defaults(func=cmd_fit_brightness)

    p = fit_sub.add_parser("fringe", help="fit a fringe-count CSV")
    common(p)
    p.add_argument("--data", required=True, help="CSV: phi_rad,counts,integration_s")
    p.set_defaults(func=cmd_fit_fringe)

    p = sub.add_parser("compensate", help="thermal-crosstalk heater schedule")
    common(p)
    p.set_defaults(func=cmd_compensate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GridError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FitError, HeraldError, InfeasibleError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
