"""Axis-aligned box primitives shared across the toolkit.

All geometry lives in normalized model units: the bounding box's longest
side spans [-1, 1]. A plank is a box; a DOF is one of its six boundary
coordinates in the fixed order (x_min, y_min, z_min, x_max, y_max, z_max).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

AXES = ("x", "y", "z")
DOF_NAMES = ("x_min", "y_min", "z_min", "x_max", "y_max", "z_max")


def dof_axis(dof: int) -> int:
    """Axis index (0=x, 1=y, 2=z) of a DOF."""
    return dof % 3


def dof_is_max(dof: int) -> bool:
    return dof >= 3


def opposite_dof(dof: int) -> int:
    """Same axis, other side: x_min <-> x_max, etc."""
    return (dof + 3) % 6


@dataclass(frozen=True, order=True)
class Box:
    """Closed axis-aligned box given by its six boundary coordinates."""

    x0: float
    y0: float
    z0: float
    x1: float
    y1: float
    z1: float

    @classmethod
    def from_bounds(cls, bounds: Iterable[float]) -> "Box":
        return cls(*(float(v) for v in bounds))

    def bounds(self) -> tuple[float, float, float, float, float, float]:
        return (self.x0, self.y0, self.z0, self.x1, self.y1, self.z1)

    def coord(self, dof: int) -> float:
        return self.bounds()[dof]

    def lo(self, axis: int) -> float:
        return self.bounds()[axis]

    def hi(self, axis: int) -> float:
        return self.bounds()[axis + 3]

    def extent(self, axis: int) -> float:
        return self.hi(axis) - self.lo(axis)

    def volume(self) -> float:
        v = 1.0
        for a in range(3):
            v *= self.extent(a)
        return v

    def is_valid(self) -> bool:
        """min < max on every axis."""
        return all(self.lo(a) < self.hi(a) for a in range(3))

    def thickness_axis(self) -> int:
        """Axis of minimum extent; ties break toward x, then y, then z."""
        extents = [self.extent(a) for a in range(3)]
        return extents.index(min(extents))

    def contains_point(self, p: tuple[float, float, float], open_: bool = False) -> bool:
        if open_:
            return all(self.lo(a) < p[a] < self.hi(a) for a in range(3))
        return all(self.lo(a) <= p[a] <= self.hi(a) for a in range(3))

    def intersection_volume(self, other: "Box") -> float:
        v = 1.0
        for a in range(3):
            overlap = min(self.hi(a), other.hi(a)) - max(self.lo(a), other.lo(a))
            if overlap <= 0.0:
                return 0.0
            v *= overlap
        return v

    def overlaps_open(self, other: "Box") -> bool:
        """True when the open interiors intersect (positive-volume overlap)."""
        return all(
            min(self.hi(a), other.hi(a)) > max(self.lo(a), other.lo(a))
            for a in range(3)
        )


def union_aabb(boxes: Iterable[Box]) -> Box:
    boxes = list(boxes)
    if not boxes:
        raise ValueError("union_aabb of an empty box set")
    return Box(
        min(b.x0 for b in boxes),
        min(b.y0 for b in boxes),
        min(b.z0 for b in boxes),
        max(b.x1 for b in boxes),
        max(b.y1 for b in boxes),
        max(b.z1 for b in boxes),
    )
