"""Exact three-view line drawings with hidden-line classification.

Views are first-angle style: front maps (x, z) looking along +y (smaller y
is nearer), top maps (x, y) looking along -z (larger z is nearer), side
maps (y, z) looking along -x (larger x is nearer). Each solid contributes
its boundary edges; all candidate segments are split at every incidence,
classified by midpoint depth tests against open footprint interiors, then
merged back into maximal runs of constant visibility. Coincident collinear
edges from different solids collapse into one drawing edge, visible when
any contributor is unoccluded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .arrangement import SNAP_TOL, merge_adjacent, snap_values, split_segments
from .boxes import Box
from .program import DEFAULT_SCALE_MM_PER_UNIT, ProgramError

VIEW_NAMES = ("front", "top", "side")

# (u axis, v axis, depth axis, near sign): near sign -1 means smaller depth
# coordinates are nearer to the viewer.
_VIEW_AXES = {
    "front": (0, 2, 1, -1),
    "top": (0, 1, 2, +1),
    "side": (1, 2, 0, +1),
}

AXIS_MAP = {"front": ["x", "z"], "top": ["x", "y"], "side": ["y", "z"]}


@dataclass(frozen=True, order=True)
class Edge2D:
    x1: float
    y1: float
    x2: float
    y2: float
    visible: bool

    def __post_init__(self):
        if (self.x1, self.y1) >= (self.x2, self.y2):
            raise ValueError("Edge2D endpoints must be ordered (lowest x, then y)")

    @classmethod
    def make(cls, p1: tuple[float, float], p2: tuple[float, float], visible: bool) -> "Edge2D":
        if p1 > p2:
            p1, p2 = p2, p1
        return cls(p1[0], p1[1], p2[0], p2[1], visible)

    @property
    def p1(self) -> tuple[float, float]:
        return (self.x1, self.y1)

    @property
    def p2(self) -> tuple[float, float]:
        return (self.x2, self.y2)

    def length(self) -> float:
        return abs(self.x2 - self.x1) + abs(self.y2 - self.y1)


@dataclass(frozen=True)
class ViewDrawing:
    name: str
    edges: tuple[Edge2D, ...]


@dataclass(frozen=True)
class DrawingSet:
    front: ViewDrawing
    top: ViewDrawing
    side: ViewDrawing
    scale_mm_per_unit: float = DEFAULT_SCALE_MM_PER_UNIT

    def views(self) -> tuple[ViewDrawing, ViewDrawing, ViewDrawing]:
        return (self.front, self.top, self.side)

    def replace_views(self, views: Sequence[ViewDrawing]) -> "DrawingSet":
        by_name = {v.name: v for v in views}
        return DrawingSet(
            front=by_name["front"],
            top=by_name["top"],
            side=by_name["side"],
            scale_mm_per_unit=self.scale_mm_per_unit,
        )


Solid = tuple[Box, ...]  # disjoint axis-aligned cells of one solid


def _snap_solids(solids: Sequence[Iterable[Box]]) -> list[Solid]:
    pools: list[set[float]] = [set(), set(), set()]
    solids = [tuple(s) for s in solids]
    for solid in solids:
        for box in solid:
            for a in range(3):
                pools[a].add(box.lo(a))
                pools[a].add(box.hi(a))
    maps = [snap_values(p, SNAP_TOL) for p in pools]
    out = []
    for solid in solids:
        out.append(
            tuple(
                Box(
                    maps[0][b.x0], maps[1][b.y0], maps[2][b.z0],
                    maps[0][b.x1], maps[1][b.y1], maps[2][b.z1],
                )
                for b in solid
            )
        )
    return out


def _solid_boundary_edges(solid: Solid) -> list[tuple[int, float, float, float, float]]:
    """Boundary edges of a union of disjoint cells.

    Returns (axis, c1, c2, t0, t1): the edge runs along `axis` from t0 to
    t1, at the two cross-axis coordinates c1 < c2 in axis order. An edge
    exists where the four cells around the line are solid in a pattern with
    an odd count or a diagonal pair.
    """
    coords = [sorted({v for b in solid for v in (b.lo(a), b.hi(a))}) for a in range(3)]

    def occupied(i: int, j: int, k: int) -> bool:
        if not (0 <= i < len(coords[0]) - 1 and 0 <= j < len(coords[1]) - 1
                and 0 <= k < len(coords[2]) - 1):
            return False
        mid = (
            (coords[0][i] + coords[0][i + 1]) / 2.0,
            (coords[1][j] + coords[1][j + 1]) / 2.0,
            (coords[2][k] + coords[2][k + 1]) / 2.0,
        )
        return any(b.contains_point(mid, open_=True) for b in solid)

    edges = []
    for axis in range(3):
        b_axis, c_axis = [a for a in range(3) if a != axis]
        ts = coords[axis]
        for jb in range(len(coords[b_axis])):
            for kc in range(len(coords[c_axis])):
                for it in range(len(ts) - 1):
                    cell = [0, 0, 0]
                    cell[axis] = it
                    quads = 0
                    pattern = []
                    for db in (-1, 0):
                        for dc in (-1, 0):
                            cell[b_axis] = jb + db
                            cell[c_axis] = kc + dc
                            solid_here = occupied(*cell)
                            pattern.append(solid_here)
                            quads += solid_here
                    is_edge = quads in (1, 3) or (
                        quads == 2 and pattern[0] == pattern[3]
                    )
                    if is_edge:
                        edges.append(
                            (axis, coords[b_axis][jb], coords[c_axis][kc], ts[it], ts[it + 1])
                        )
    return edges


def _project_view(
    name: str,
    solids: Sequence[Solid],
    edges_by_solid: Sequence[list[tuple[int, float, float, float, float]]],
) -> ViewDrawing:
    u_axis, v_axis, depth_axis, near_sign = _VIEW_AXES[name]

    segments = []
    for solid_edges in edges_by_solid:
        for axis, c1, c2, t0, t1 in solid_edges:
            if axis == depth_axis:
                continue
            fixed = {}
            b_axis, c_axis = [a for a in range(3) if a != axis]
            fixed[b_axis], fixed[c_axis] = c1, c2
            depth = fixed[depth_axis]
            if axis == u_axis:
                segments.append(("h", fixed[v_axis], t0, t1, depth))
            else:
                segments.append(("v", fixed[u_axis], t0, t1, depth))

    # Occluders: every cell of every solid, reduced to footprint + near face.
    occluders = []
    for solid in solids:
        for box in solid:
            near = box.lo(depth_axis) if near_sign < 0 else box.hi(depth_axis)
            occluders.append(
                (box.lo(u_axis), box.hi(u_axis), box.lo(v_axis), box.hi(v_axis), near)
            )

    def occluded(um: float, vm: float, depth: float) -> bool:
        for u0, u1, v0, v1, near in occluders:
            if u0 < um < u1 and v0 < vm < v1:
                if (near < depth) if near_sign < 0 else (near > depth):
                    return True
        return False

    atoms = split_segments(segments)
    pieces = []
    for (orient, c, lo, hi), depths in atoms.items():
        if orient == "h":
            um, vm = (lo + hi) / 2.0, c
        else:
            um, vm = c, (lo + hi) / 2.0
        visible = any(not occluded(um, vm, d) for d in depths)
        pieces.append((orient, c, lo, hi, visible))

    edges = []
    for orient, c, lo, hi, visible in merge_adjacent(pieces):
        if orient == "h":
            edges.append(Edge2D.make((lo, c), (hi, c), visible))
        else:
            edges.append(Edge2D.make((c, lo), (c, hi), visible))
    return ViewDrawing(name=name, edges=tuple(sorted(edges)))


def project_solids(
    solids: Sequence[Iterable[Box]],
    scale_mm_per_unit: float = DEFAULT_SCALE_MM_PER_UNIT,
) -> DrawingSet:
    """Three-view drawing of a collection of solids, each a set of disjoint
    cells rendered with its own boundary edges (compound semantics)."""
    snapped = _snap_solids(solids)
    edges_by_solid = [_solid_boundary_edges(s) for s in snapped]
    views = [_project_view(name, snapped, edges_by_solid) for name in VIEW_NAMES]
    return DrawingSet(
        front=views[0], top=views[1], side=views[2], scale_mm_per_unit=scale_mm_per_unit
    )


def project(
    planks: Sequence[Box],
    scale_mm_per_unit: float = DEFAULT_SCALE_MM_PER_UNIT,
) -> DrawingSet:
    """Drawing of a plank assembly: one cuboid solid per plank."""
    if not planks:
        raise ProgramError("cannot project an empty assembly")
    for i, p in enumerate(planks):
        if not p.is_valid():
            raise ProgramError(f"plank {i} has non-positive volume")
    return project_solids([(p,) for p in planks], scale_mm_per_unit)


def normalize_drawing(d: DrawingSet) -> DrawingSet:
    """Re-run arrangement normalization on an existing drawing: split at all
    incidences, let visible dominate on coincident pieces, merge back."""
    views = []
    for view in d.views():
        segments = []
        for e in view.edges:
            if e.y1 == e.y2:
                segments.append(("h", e.y1, e.x1, e.x2, e.visible))
            elif e.x1 == e.x2:
                segments.append(("v", e.x1, e.y1, e.y2, e.visible))
            else:
                raise ProgramError("drawing edges must be axis-aligned")
        atoms = split_segments(segments)
        pieces = [
            (orient, c, lo, hi, any(flags))
            for (orient, c, lo, hi), flags in atoms.items()
        ]
        edges = []
        for orient, c, lo, hi, visible in merge_adjacent(pieces):
            if orient == "h":
                edges.append(Edge2D.make((lo, c), (hi, c), visible))
            else:
                edges.append(Edge2D.make((c, lo), (c, hi), visible))
        views.append(ViewDrawing(name=view.name, edges=tuple(sorted(edges))))
    return d.replace_views(views)


def count_edges(d: DrawingSet) -> int:
    return sum(len(v.edges) for v in d.views())


def hidden_fraction(d: DrawingSet) -> float:
    total = count_edges(d)
    if total == 0:
        return 0.0
    hidden = sum(1 for v in d.views() for e in v.edges if not e.visible)
    return hidden / total


def drawing_to_json(d: DrawingSet) -> str:
    doc = {
        "scale_mm_per_unit": d.scale_mm_per_unit,
        "axis_map": AXIS_MAP,
        "views": [
            {
                "name": v.name,
                "edges": [
                    {"x1": e.x1, "y1": e.y1, "x2": e.x2, "y2": e.y2, "visible": e.visible}
                    for e in v.edges
                ],
            }
            for v in d.views()
        ],
    }
    return json.dumps(doc, sort_keys=True)


def drawing_from_json(text: str) -> DrawingSet:
    doc = json.loads(text)
    views = {}
    for v in doc["views"]:
        edges = tuple(
            Edge2D.make((e["x1"], e["y1"]), (e["x2"], e["y2"]), bool(e["visible"]))
            for e in v["edges"]
        )
        views[v["name"]] = ViewDrawing(name=v["name"], edges=edges)
    return DrawingSet(
        front=views["front"],
        top=views["top"],
        side=views["side"],
        scale_mm_per_unit=float(doc.get("scale_mm_per_unit", DEFAULT_SCALE_MM_PER_UNIT)),
    )


def drawing_to_svg(d: DrawingSet, stroke_width: float = 0.01) -> str:
    """Presentation export: solid strokes for visible, dashed for hidden."""
    panels = []
    offset = 0.0
    gap = 0.4
    min_y = 0.0
    max_y = 0.0
    for view in d.views():
        if not view.edges:
            offset += 2.0 + gap
            continue
        xs = [x for e in view.edges for x in (e.x1, e.x2)]
        ys = [y for e in view.edges for y in (e.y1, e.y2)]
        shift = offset - min(xs)
        lines = []
        for e in view.edges:
            dash = "" if e.visible else ' stroke-dasharray="0.05,0.03"'
            lines.append(
                f'<line x1="{e.x1 + shift:.6f}" y1="{-e.y1:.6f}" '
                f'x2="{e.x2 + shift:.6f}" y2="{-e.y2:.6f}"{dash}/>'
            )
        panels.append("\n".join(lines))
        offset += (max(xs) - min(xs)) + gap
        min_y = min(min_y, -max(ys))
        max_y = max(max_y, -min(ys))
    body = "\n".join(panels)
    pad = 0.1
    width = offset + 2 * pad
    height = (max_y - min_y) + 2 * pad
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{-pad} {min_y - pad} {width:.6f} {height:.6f}">\n'
        f'<g fill="none" stroke="black" stroke-width="{stroke_width}">\n'
        f"{body}\n</g>\n</svg>\n"
    )
