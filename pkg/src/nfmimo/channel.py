"""Free-space scalar Green's function and channel-matrix assembly.

The channel entry between a transmit antenna at r_S and a receive antenna
at r_R is -exp(ik|r_R - r_S|) / (4 pi |r_R - r_S|), evaluated with the exact
distance. No amplitude or phase approximation is applied here; approximate
propagation models live in `beamfocus` behind explicit mode labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import PlanarArray


@dataclass(frozen=True)
class SystemGeometry:
    """Transmit and receive UPAs in parallel planes, plus the carrier wavelength."""

    tx: PlanarArray
    rx: PlanarArray
    wavelength: float

    def __post_init__(self):
        if not math.isfinite(self.wavelength) or self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if self.separation <= 0:
            raise ValueError(
                "receive plane must be strictly beyond the transmit plane "
                f"(separation {self.separation})"
            )

    @property
    def separation(self) -> float:
        return self.rx.plane_offset - self.tx.plane_offset

    @property
    def wavenumber(self) -> float:
        return 2 * np.pi / self.wavelength


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex (N_R, N_S) matrix of Green's-function coefficients."""

    entries: np.ndarray
    geometry: SystemGeometry

    @property
    def n_rx(self) -> int:
        return self.entries.shape[0]

    @property
    def n_tx(self) -> int:
        return self.entries.shape[1]


def greens(receive_point, source_point, wavelength: float) -> complex:
    """Scalar free-space Green's function between two points.

    Returns -exp(i k r) / (4 pi r) with k = 2 pi / wavelength and
    r the Euclidean distance. The magnitude is exactly 1 / (4 pi r).
    """
    if not math.isfinite(wavelength) or wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    rp = np.asarray(receive_point, dtype=float)
    sp = np.asarray(source_point, dtype=float)
    if rp.shape != (3,) or sp.shape != (3,):
        raise ValueError("points must be 3D")
    if not (np.isfinite(rp).all() and np.isfinite(sp).all()):
        raise ValueError("points must have finite coordinates")
    r = float(np.linalg.norm(rp - sp))
    if r == 0.0:
        raise ValueError("Green's function is singular for coincident points")
    k = 2 * np.pi / wavelength
    return complex(-np.exp(1j * k * r) / (4 * np.pi * r))


def build_channel(geometry: SystemGeometry) -> ChannelMatrix:
    """Assemble the exact Green's-function channel matrix.

    entries[i, j] couples receive antenna i to transmit antenna j, using
    the array ordering fixed by `geometry`'s PlanarArrays.
    """
    diff = geometry.rx.positions[:, None, :] - geometry.tx.positions[None, :, :]
    r = np.linalg.norm(diff, axis=2)
    if not (r > 0).all():
        raise ValueError("coincident transmit/receive antennas")
    entries = -np.exp(1j * geometry.wavenumber * r) / (4 * np.pi * r)
    entries.setflags(write=False)
    return ChannelMatrix(entries=entries, geometry=geometry)


def received_field(channel: ChannelMatrix, sources) -> np.ndarray:
    """Noiseless received field G @ s for source amplitudes s."""
    s = np.asarray(sources, dtype=complex)
    if s.shape != (channel.n_tx,):
        raise ValueError(f"expected {channel.n_tx} source amplitudes, got shape {s.shape}")
    return channel.entries @ s


def channel_to_csv(channel: ChannelMatrix, path) -> None:
    """Export entries as CSV, one row per receive antenna, `re+imj` cells."""
    with open(path, "w", newline="") as fh:
        for row in channel.entries:
            fh.write(",".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
            fh.write("\n")
