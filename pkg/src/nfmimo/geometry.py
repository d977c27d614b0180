"""Uniform planar array geometry.

Arrays are square grids of point antennas lying in a plane z = const,
centered on the z axis. Positions are stored in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def relative_coordinate(index: int, side_count: int, spacing: float) -> float:
    """Signed offset of grid index `index` (1-based) from the array center.

    Antisymmetric about the center: index n and side_count + 1 - n map to
    coordinates of opposite sign.
    """
    if side_count < 1:
        raise ValueError(f"side_count must be >= 1, got {side_count}")
    if not 1 <= index <= side_count:
        raise ValueError(f"index {index} out of range [1, {side_count}]")
    return (index - (side_count + 1) / 2) * spacing


@dataclass(frozen=True)
class PlanarArray:
    """Square uniform planar array of point antennas.

    `positions` has shape (side_count**2, 3) and is row-major in the grid
    indices (n, m): antenna (n, m) sits at flat index (n-1)*side_count + (m-1).
    This ordering is part of the public contract; channel-matrix indices
    depend on it.
    """

    side_count: int
    spacing: float
    plane_offset: float
    positions: np.ndarray

    @property
    def size(self) -> int:
        return self.side_count**2

    @property
    def side_length(self) -> float:
        """Aperture side: each antenna owns a spacing x spacing cell."""
        return self.side_count * self.spacing

    @property
    def area(self) -> float:
        return self.side_length**2


def build_upa(side_count: int, spacing: float, plane_offset: float = 0.0) -> PlanarArray:
    """Build a centered square UPA in the plane z = plane_offset.

    spacing must be positive, except that a single antenna (side_count = 1)
    may use spacing 0.
    """
    if side_count < 1:
        raise ValueError(f"side_count must be >= 1, got {side_count}")
    if not math.isfinite(spacing) or spacing < 0:
        raise ValueError(f"spacing must be finite and non-negative, got {spacing}")
    if spacing == 0 and side_count > 1:
        raise ValueError("spacing 0 is only allowed for a single antenna")
    if not math.isfinite(plane_offset):
        raise ValueError(f"plane_offset must be finite, got {plane_offset}")

    coords = (np.arange(1, side_count + 1) - (side_count + 1) / 2) * spacing
    x, y = np.meshgrid(coords, coords, indexing="ij")
    positions = np.column_stack(
        [x.ravel(), y.ravel(), np.full(side_count**2, float(plane_offset))]
    )
    positions.setflags(write=False)
    return PlanarArray(
        side_count=side_count,
        spacing=float(spacing),
        plane_offset=float(plane_offset),
        positions=positions,
    )
