"""Command-line front end.

Subcommands: threshold, report, sweep, gainmap, validate. Parameters come
from an optional JSON config file plus flag overrides (flags win). Lengths
may be given in meters or in wavelength multiples with a `lambda` suffix
(e.g. `12.65lambda`); they are resolved to meters exactly once, at config
load. Nothing in the pipeline is random.

Exit codes: 0 success, 1 validation failure, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import beamfocus, experiments, spectrum as sp
from .beamfocus import GainMode
from .channel import SystemGeometry, build_channel
from .geometry import build_upa

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


@dataclass(frozen=True)
class RunConfig:
    """Resolved single-point run parameters (all lengths in meters)."""

    wavelength: float
    side_count: int
    spacing: float
    separation: float
    energy_fraction: float = sp.DEFAULT_ENERGY_FRACTION
    power: float | None = None  # None: auto, focused single-antenna SNR = 10 dB
    noise_variance: float = 1.0
    output: str | None = None

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.side_count < 1:
            raise ValueError("side_count must be >= 1")
        if not self.spacing > 0 and self.side_count > 1:
            raise ValueError("spacing must be positive")
        if not self.separation > 0:
            raise ValueError("separation must be positive")
        if not 0 < self.energy_fraction < 1:
            raise ValueError("energy_fraction must be in (0, 1)")
        if self.power is not None and self.power < 0:
            raise ValueError("power must be >= 0")
        if not self.noise_variance > 0:
            raise ValueError("noise_variance must be positive")

    @property
    def n_antennas(self) -> int:
        return self.side_count**2

    def resolved_power(self) -> float:
        if self.power is not None:
            return self.power
        return experiments.auto_power(self.n_antennas, self.separation, self.noise_variance)


def parse_length(text, wavelength: float) -> float:
    """Parse a length in meters or in wavelength multiples (`lambda` suffix)."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    if s.endswith("lambda"):
        return float(s[: -len("lambda")]) * wavelength
    return float(s)


CONFIG_FIELDS = (
    "wavelength",
    "side_count",
    "spacing",
    "separation",
    "energy_fraction",
    "power",
    "noise_variance",
    "output",
)

DEFAULTS = {
    "wavelength": 0.01,
    "side_count": 25,
    "spacing": "0.5lambda",
    "separation": "4000lambda",
}


def load_config(args) -> RunConfig:
    """Merge defaults, an optional JSON config file and flag overrides."""
    merged = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        unknown = set(data) - set(CONFIG_FIELDS)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        merged.update(data)
    for name in CONFIG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value

    wavelength = float(merged["wavelength"])
    return RunConfig(
        wavelength=wavelength,
        side_count=int(merged["side_count"]),
        spacing=parse_length(merged["spacing"], wavelength),
        separation=parse_length(merged["separation"], wavelength),
        energy_fraction=float(merged.get("energy_fraction", sp.DEFAULT_ENERGY_FRACTION)),
        power=None if merged.get("power") is None else float(merged["power"]),
        noise_variance=float(merged.get("noise_variance", 1.0)),
        output=merged.get("output"),
    )


def _system(config: RunConfig) -> SystemGeometry:
    tx = build_upa(config.side_count, config.spacing, 0.0)
    rx = build_upa(config.side_count, config.spacing, config.separation)
    return SystemGeometry(tx=tx, rx=rx, wavelength=config.wavelength)


def cmd_threshold(config: RunConfig) -> int:
    d_th = beamfocus.spacing_threshold(config.n_antennas, config.wavelength, config.separation)
    eps = beamfocus.paraxial_parameter(
        config.n_antennas, config.spacing, config.wavelength, config.separation
    )
    print(f"d_threshold = {d_th:.4g} m = {d_th / config.wavelength:.4g} lambda")
    print(f"configured spacing = {config.spacing:.4g} m -> epsilon = {eps:.4g}")
    return EXIT_OK


def cmd_report(config: RunConfig, as_json: bool) -> int:
    geometry = _system(config)
    spec_vals = sp.eigen_spectrum(build_channel(geometry))
    report = sp.edof_report(
        spec_vals,
        sp.plane_area(geometry.tx),
        sp.plane_area(geometry.rx),
        config.wavelength,
        config.separation,
        fraction=config.energy_fraction,
    )
    power = config.resolved_power()
    cap_full = sp.capacity(spec_vals, power, config.noise_variance, config.n_antennas)
    cap_edof = sp.capacity(
        spec_vals, power, config.noise_variance, config.n_antennas, report.n_edof_exact
    )
    payload = report.to_dict()
    payload["capacity_full"] = cap_full
    payload["capacity_edof_exact"] = cap_edof
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"n_dof           = {report.n_dof}")
        print(f"n_edof_exact    = {report.n_edof_exact}")
        print(f"n_edof_fringes  = {report.n_edof_fringes:.4g}")
        print(f"n_edof_trace    = {report.n_edof_trace:.4g}")
        print(f"energy_fraction = {report.energy_fraction_used:.4g}")
        print(f"capacity_full       = {cap_full:.4g} bits/s/Hz")
        print(f"capacity_edof_exact = {cap_edof:.4g} bits/s/Hz")
    if config.output:
        with open(config.output, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    target = args.preset
    if target in experiments.preset_names():
        kind, payload, notes = experiments.load_preset(target)
        default_output = f"{target}.csv"
    else:
        with open(target) as fh:
            data = json.load(fh)
        kind = "sweep"
        payload = experiments.SweepSpec.from_dict(data)
        notes = data.get("notes")
        stem = target.rsplit(".", 1)[0]
        default_output = f"{stem}.out.csv"
    output = args.output or default_output

    if kind == "profile":
        profile = experiments.eigen_profile(payload)
        experiments.write_profile_csv(profile, output)
        print(f"wrote {len(profile)} eigenvalues to {output}")
        return EXIT_OK

    records = experiments.run_sweep(payload)
    experiments.write_sweep_csv(records, output, spec=payload, notes=notes)
    print(f"wrote {len(records)} records to {output} (+ sidecar {output}.spec.json)")
    return EXIT_OK


def cmd_gainmap(config: RunConfig, args) -> int:
    geometry = _system(config)
    setup = beamfocus.make_focus_setup(geometry)
    mode = GainMode(args.mode)
    extent = (
        parse_length(args.extent, config.wavelength)
        if args.extent is not None
        else 2
        * beamfocus.spacing_threshold(config.n_antennas, config.wavelength, config.separation)
    )
    coords = np.linspace(-extent, extent, args.points)
    probes = [(x, y) for x in coords for y in coords]
    rows = beamfocus.gain_map(setup, probes, mode)
    output = config.output or "gainmap.csv"
    beamfocus.write_gain_map_csv(rows, output)
    print(f"wrote {len(rows)} probes to {output}")
    return EXIT_OK


def cmd_validate(config: RunConfig) -> int:
    d_th = beamfocus.spacing_threshold(config.n_antennas, config.wavelength, config.separation)
    grid = [f * d_th for f in np.linspace(0.2, 1.0, 17)]
    report = experiments.validate_closed_form(
        [config.side_count], grid, config.wavelength, config.separation
    )
    print(f"max normalized closed-form error: {report['max_normalized_error']:.4g}")
    print("PASS" if report["passes"] else "FAIL")
    return EXIT_OK if report["passes"] else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfmimo",
        description="Near-field XL-MIMO channel metrics: EDoF, capacity, "
        "beam-focusing gains and the optimal antenna spacing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--wavelength", type=float, help="carrier wavelength in meters")
        p.add_argument("--side-count", dest="side_count", type=int, help="antennas per side")
        p.add_argument("--spacing", help="antenna spacing (meters or e.g. 0.5lambda)")
        p.add_argument("--separation", help="plane separation (meters or e.g. 4000lambda)")
        p.add_argument("--energy-fraction", dest="energy_fraction", type=float)
        p.add_argument("--power", type=float, help="total transmit power")
        p.add_argument("--noise-variance", dest="noise_variance", type=float)
        p.add_argument("--output", help="output file path")

    add_config_flags(sub.add_parser("threshold", help="print the optimal spacing threshold"))

    p_report = sub.add_parser("report", help="DoF/EDoF/capacity report for one configuration")
    add_config_flags(p_report)
    p_report.add_argument("--json", action="store_true", help="print machine-readable JSON")

    p_sweep = sub.add_parser("sweep", help="run a preset or spec-file sweep to CSV")
    p_sweep.add_argument("preset", help=f"preset name ({', '.join(experiments.preset_names())}) or spec file")
    p_sweep.add_argument("--output", help="output CSV path")

    p_map = sub.add_parser("gainmap", help="focal-spot gain map over the receive plane")
    add_config_flags(p_map)
    p_map.add_argument("--mode", choices=[m.value for m in GainMode], default="phase_only")
    p_map.add_argument("--extent", help="half-width of the probe grid (meters or lambda)")
    p_map.add_argument("--points", type=int, default=41, help="probes per axis")

    p_val = sub.add_parser("validate", help="check the closed-form gain against the phasor sum")
    add_config_flags(p_val)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            return cmd_sweep(args)
        config = load_config(args)
        if args.command == "threshold":
            return cmd_threshold(config)
        if args.command == "report":
            return cmd_report(config, args.json)
        if args.command == "gainmap":
            return cmd_gainmap(config, args)
        if args.command == "validate":
            return cmd_validate(config)
        raise AssertionError(f"unhandled command {args.command}")
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (np.linalg.LinAlgError, experiments.SweepError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
