"""Mesh export for plank assemblies."""

from __future__ import annotations

from .boxes import Box

# Two triangles per face, outward winding, on the unit box corner indexing
# (bit 0 -> x, bit 1 -> y, bit 2 -> z).
_BOX_TRIANGLES = (
    (0, 2, 1), (1, 2, 3),  # z min
    (4, 5, 6), (5, 7, 6),  # z max
    (0, 1, 4), (1, 5, 4),  # y min
    (2, 6, 3), (3, 6, 7),  # y max
    (0, 4, 2), (2, 4, 6),  # x min
    (1, 3, 5), (3, 7, 5),  # x max
)


def boxes_to_obj(boxes: list[Box]) -> str:
    """Wavefront OBJ with 12 triangles per box."""
    lines = []
    for bi, box in enumerate(boxes):
        lines.append(f"o plank{bi + 1}")
        for corner in range(8):
            x = box.x1 if corner & 1 else box.x0
            y = box.y1 if corner & 2 else box.y0
            z = box.z1 if corner & 4 else box.z0
            lines.append(f"v {x:.6f} {y:.6f} {z:.6f}")
        base = bi * 8 + 1
        for a, b, c in _BOX_TRIANGLES:
            lines.append(f"f {base + a} {base + b} {base + c}")
    return "\n".join(lines) + "\n"
