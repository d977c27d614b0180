"""Preset-driven sweep engine reproducing the reference figure datasets.

A sweep varies one of {spacing, antennas_per_side, separation} over a grid
while holding the rest of the system fixed, and emits one record per grid
point with every DoF / EDoF / gain / capacity metric. Sweeps are fully
deterministic: the same spec yields byte-identical CSV output.

When no transmit power is given it is resolved per point so that the
focused single-antenna SNR is 10 dB (the reference figures omit the SNR
setting, so capacity curves are shape-level reproductions only).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import beamfocus, spectrum as sp
from .beamfocus import GainMode
from .channel import SystemGeometry, build_channel
from .geometry import build_upa

SWEPT_VARIABLES = ("spacing", "antennas_per_side", "separation")
DEFAULT_MAX_POINTS = 200
DEFAULT_FOCUSED_SNR_DB = 10.0

RECORD_FIELDS = (
    "swept_value",
    "n_dof",
    "n_edof_exact",
    "n_edof_fringes",
    "n_edof_trace",
    "rho1_closed",
    "rho1_phase_only",
    "capacity_full",
    "capacity_edof_exact",
    "capacity_edof_fringes",
    "capacity_edof_trace",
    "epsilon",
)


class SweepError(RuntimeError):
    """A sweep point failed; carries the offending grid value."""

    def __init__(self, swept_value, cause):
        super().__init__(f"sweep failed at grid value {swept_value!r}: {cause}")
        self.swept_value = swept_value


@dataclass(frozen=True)
class SweepSpec:
    """One-variable sweep over an otherwise fixed two-UPA system."""

    swept_variable: str
    grid: tuple
    wavelength: float
    side_count: int | None = None
    spacing: float | None = None
    separation: float | None = None
    energy_fraction: float = sp.DEFAULT_ENERGY_FRACTION
    power: float | None = None  # None: auto, focused single-antenna SNR = 10 dB
    noise_variance: float = 1.0
    area_convention: str = "cell"
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        if self.swept_variable not in SWEPT_VARIABLES:
            raise ValueError(f"swept_variable must be one of {SWEPT_VARIABLES}")
        grid = tuple(self.grid)
        object.__setattr__(self, "grid", grid)
        if len(grid) == 0:
            raise ValueError("sweep grid is empty")
        if len(grid) > self.max_points:
            raise ValueError(f"sweep grid has {len(grid)} points, cap is {self.max_points}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if not 0 < self.energy_fraction < 1:
            raise ValueError("energy_fraction must be in (0, 1)")
        if self.power is not None and self.power < 0:
            raise ValueError("power must be >= 0")
        if not self.noise_variance > 0:
            raise ValueError("noise_variance must be positive")
        fixed = {
            "spacing": self.spacing,
            "antennas_per_side": self.side_count,
            "separation": self.separation,
        }
        if fixed[self.swept_variable] is not None:
            raise ValueError(f"{self.swept_variable} is swept and must not also be fixed")
        for name, value in fixed.items():
            if name != self.swept_variable:
                if value is None:
                    raise ValueError(f"fixed parameter {name} is missing")
                if not value > 0:
                    raise ValueError(f"fixed parameter {name} must be positive")

    def to_dict(self) -> dict:
        return {
            "swept_variable": self.swept_variable,
            "grid": list(self.grid),
            "wavelength": self.wavelength,
            "side_count": self.side_count,
            "spacing": self.spacing,
            "separation": self.separation,
            "energy_fraction": self.energy_fraction,
            "power": self.power,
            "noise_variance": self.noise_variance,
            "area_convention": self.area_convention,
            "max_points": self.max_points,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known - {"preset", "notes"}
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        kwargs = {k: v for k, v in data.items() if k in known}
        if "grid" in kwargs:
            kwargs["grid"] = tuple(kwargs["grid"])
        return cls(**kwargs)


@dataclass(frozen=True)
class SweepRecord:
    swept_value: float
    n_dof: int
    n_edof_exact: int
    n_edof_fringes: float
    n_edof_trace: float
    rho1_closed: float
    rho1_phase_only: float
    capacity_full: float
    capacity_edof_exact: float
    capacity_edof_fringes: float
    capacity_edof_trace: float
    epsilon: float

    def as_row(self) -> tuple:
        return tuple(getattr(self, f) for f in RECORD_FIELDS)


def auto_power(n_antennas: int, separation: float, noise_variance: float) -> float:
    """Power making the focused single-antenna SNR equal 10 dB."""
    target = 10 ** (DEFAULT_FOCUSED_SNR_DB / 10)
    return target * noise_variance * (4 * math.pi * separation) ** 2 / n_antennas


def _estimator_truncation(estimate: float, n_values: int) -> int:
    """Map a real-valued EDoF estimate to a capacity truncation index."""
    return min(n_values, max(1, math.ceil(estimate)))


def _point_record(spec: SweepSpec, value) -> SweepRecord:
    side = spec.side_count
    spacing = spec.spacing
    separation = spec.separation
    if spec.swept_variable == "spacing":
        spacing = float(value)
    elif spec.swept_variable == "antennas_per_side":
        side = int(value)
    else:
        separation = float(value)

    tx = build_upa(side, spacing, 0.0)
    rx = build_upa(side, spacing, separation)
    geometry = SystemGeometry(tx=tx, rx=rx, wavelength=spec.wavelength)
    channel = build_channel(geometry)
    spec_vals = sp.eigen_spectrum(channel)

    n = tx.size
    area_tx = sp.plane_area(tx, spec.area_convention)
    area_rx = sp.plane_area(rx, spec.area_convention)
    n_dof = sp.count_dof(spec_vals)
    n_exact = sp.edof_exact(spec_vals, spec.energy_fraction)
    n_fringes = sp.edof_fringes(area_tx, area_rx, spec.wavelength, separation)
    n_trace = sp.edof_trace(spec_vals)

    setup = beamfocus.make_focus_setup(geometry)
    r1 = (spacing, 0.0, rx.plane_offset)
    rho1_closed = beamfocus.array_gain_closed_form(n, spacing, spec.wavelength, separation)
    rho1_phase = beamfocus.array_gain(setup, r1, GainMode.PHASE_ONLY)

    power = spec.power
    if power is None:
        power = auto_power(n, separation, spec.noise_variance)
    n_values = spec_vals.values.size

    def cap(truncate_to=None):
        return sp.capacity(spec_vals, power, spec.noise_variance, n, truncate_to)

    return SweepRecord(
        swept_value=float(value),
        n_dof=n_dof,
        n_edof_exact=n_exact,
        n_edof_fringes=n_fringes,
        n_edof_trace=n_trace,
        rho1_closed=rho1_closed,
        rho1_phase_only=rho1_phase,
        capacity_full=cap(),
        capacity_edof_exact=cap(n_exact),
        capacity_edof_fringes=cap(_estimator_truncation(n_fringes, n_values)),
        capacity_edof_trace=cap(_estimator_truncation(n_trace, n_values)),
        epsilon=beamfocus.paraxial_parameter(n, spacing, spec.wavelength, separation),
    )


def run_sweep(spec: SweepSpec) -> list[SweepRecord]:
    """Run the sweep, emitting records in grid order."""
    records = []
    for value in spec.grid:
        try:
            records.append(_point_record(spec, value))
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise SweepError(value, exc) from exc
    return records


def eigen_profile(geometry: SystemGeometry) -> list[tuple[int, float]]:
    """Full descending Gram spectrum with 1-based indices."""
    spec_vals = sp.eigen_spectrum(build_channel(geometry))
    return [(i + 1, float(v)) for i, v in enumerate(spec_vals.values)]


def validate_closed_form(n_side_values, spacing_grid, wavelength, separation) -> dict:
    """Compare the Dirichlet closed form against the phase-only double sum.

    For each (side_count, spacing) pair reports |rho1_closed -
    rho1_phase_only| / N; passes when the worst error over points with
    epsilon <= 1 stays within 0.05. The grid must stay in the paraxial
    regime (epsilon <= 1.2).
    """
    rows = []
    for side in n_side_values:
        n = side * side
        for d in spacing_grid:
            eps = beamfocus.paraxial_parameter(n, d, wavelength, separation)
            if eps > 1.2:
                raise ValueError(
                    f"grid point side={side}, spacing={d} has epsilon={eps:.3f} > 1.2"
                )
            closed = beamfocus.array_gain_closed_form(n, d, wavelength, separation)
            tx = build_upa(side, d, 0.0)
            rx = build_upa(side, d, separation)
            geometry = SystemGeometry(tx=tx, rx=rx, wavelength=wavelength)
            setup = beamfocus.make_focus_setup(geometry)
            phase_only = beamfocus.array_gain(setup, (d, 0.0, separation), GainMode.PHASE_ONLY)
            rows.append(
                {
                    "side_count": side,
                    "spacing": d,
                    "epsilon": eps,
                    "rho1_closed": closed,
                    "rho1_phase_only": phase_only,
                    "normalized_error": abs(closed - phase_only) / n,
                }
            )
    paraxial = [r["normalized_error"] for r in rows if r["epsilon"] <= 1.0]
    max_err = max(paraxial) if paraxial else 0.0
    return {
        "max_normalized_error": max_err,
        "passes": max_err <= 0.05,
        "rows": rows,
    }


def write_sweep_csv(records, path, spec: SweepSpec | None = None, notes=None) -> None:
    """Write records as CSV (17 significant digits) plus a JSON sidecar.

    The sidecar at <path>.spec.json holds the resolved spec; feeding it back
    through run_sweep reproduces the identical CSV.
    """

    def fmt(v):
        if isinstance(v, int):
            return str(v)
        return f"{v:.17g}"

    with open(path, "w", newline="") as fh:
        fh.write(",".join(RECORD_FIELDS) + "\n")
        for rec in records:
            fh.write(",".join(fmt(v) for v in rec.as_row()) + "\n")
    if spec is not None:
        sidecar = spec.to_dict()
        if notes:
            sidecar["notes"] = notes
        with open(str(path) + ".spec.json", "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")


def write_profile_csv(profile, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("index,eigenvalue\n")
        for idx, val in profile:
            fh.write(f"{idx},{val:.17g}\n")


def _fig5_grid(wavelength: float, separation: float, side_count: int):
    # quarter-wavelength steps plus the exact threshold point: the
    # half-wavelength grid misses the EDoF peak and aliases the secondary
    # gain null near epsilon = 2 into a spurious global maximum
    grid = set((np.arange(8, 80.001, 1) * 0.25 * wavelength).tolist())
    grid.add(beamfocus.spacing_threshold(side_count**2, wavelength, separation))
    return tuple(sorted(grid))


def _preset_fig2() -> tuple[SweepSpec, dict]:
    notes = {
        "inferred": "wavelength and separation are not given for this figure; "
        "the fig5 values (0.01 m, 40 m) are used"
    }
    spec = SweepSpec(
        swept_variable="antennas_per_side",
        grid=(5, 10, 20, 40),
        wavelength=0.01,
        spacing=0.005,
        separation=40.0,
    )
    return spec, notes


def _preset_fig3() -> tuple[SweepSpec, dict]:
    # 20 x 20 arrays with the spacing threshold at 3.2 lambda fixes
    # L = sqrt(N) d_threshold^2 / lambda = 2.048 m
    lam = 0.01
    sep = 20 * (3.2 * lam) ** 2 / lam
    notes = {
        "inferred": "separation is not given for this figure; it is derived from "
        "the stated threshold d = 3.2 lambda for 20x20 arrays (L = 2.048 m)"
    }
    spec = SweepSpec(
        swept_variable="spacing",
        grid=tuple((np.arange(4, 20.001, 1) * 0.25 * lam).tolist()),
        wavelength=lam,
        side_count=20,
        separation=sep,
    )
    return spec, notes


def _preset_fig5() -> tuple[SweepSpec, dict]:
    lam, sep, side = 0.01, 40.0, 25
    notes = {
        "grid": "0.25 lambda steps over [2, 20] lambda plus the exact threshold "
        "spacing, so the sweep samples the predicted EDoF peak"
    }
    spec = SweepSpec(
        swept_variable="spacing",
        grid=_fig5_grid(lam, sep, side),
        wavelength=lam,
        side_count=side,
        separation=sep,
    )
    return spec, notes


def _profile_spec(spacing_factor: float) -> SystemGeometry:
    lam, sep, side = 0.01, 40.0, 25
    d = spacing_factor * beamfocus.spacing_threshold(side**2, lam, sep)
    tx = build_upa(side, d, 0.0)
    rx = build_upa(side, d, sep)
    return SystemGeometry(tx=tx, rx=rx, wavelength=lam)


SWEEP_PRESETS = {
    "fig2": _preset_fig2,
    "fig3": _preset_fig3,
    "fig5": _preset_fig5,
    "fig6": _preset_fig5,
    "fig9": _preset_fig5,
}

PROFILE_PRESETS = {
    "fig7": lambda: _profile_spec(0.8),
    "fig8": lambda: _profile_spec(1.5),
}


def preset_names() -> list[str]:
    return sorted(SWEEP_PRESETS) + sorted(PROFILE_PRESETS)


def load_preset(name: str):
    """Return ("sweep", SweepSpec, notes) or ("profile", SystemGeometry, notes)."""
    if name in SWEEP_PRESETS:
        spec, notes = SWEEP_PRESETS[name]()
        return "sweep", spec, notes
    if name in PROFILE_PRESETS:
        return "profile", PROFILE_PRESETS[name](), {}
    raise ValueError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
