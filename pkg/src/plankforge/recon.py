"""Classical four-stage reconstruction from a three-view drawing.

Candidate 3D vertices come from cross-view node agreement, candidate edges
from projection coverage, candidate faces from minimal closed regions of
each plane's edge arrangement, and candidate blocks from flood-filling the
vertex grid against the candidate faces. Variant one searches block
subsets whose re-projection reproduces the input exactly (edges and
visibility); variant two simply returns the union of all blocks.
"""

from __future__ import annotations

import json
import time
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .arrangement import IntervalSet, snap_values, split_segments
from .boxes import Box, union_aabb
from .program import DEFAULT_SCALE_MM_PER_UNIT
from .projection import (
    DrawingSet,
    Edge2D,
    ViewDrawing,
    _solid_boundary_edges,
    _VIEW_AXES,
    normalize_drawing,
    project_solids,
)

DEFAULT_SNAP_TOL = 1.0 / 511.0  # half a quantization bin

STATUS_VERIFIED = "verified"
STATUS_UNION = "union_fallback"
STATUS_NO_MATCH = "no_match"
STATUS_TIMEOUT = "timeout"


@dataclass(frozen=True)
class CandidateVertex:
    position: tuple[float, float, float]


@dataclass(frozen=True)
class CandidateEdge:
    v1: int
    v2: int
    axis: int
    p1: tuple[float, float, float]
    p2: tuple[float, float, float]


@dataclass(frozen=True)
class CandidateFace:
    axis: int  # plane normal
    offset: float
    rects: tuple[tuple[float, float, float, float], ...]  # (u0, v0, u1, v1) cross-axis rects
    boundary_edges: tuple[int, ...]


@dataclass(frozen=True)
class CandidateBlock:
    cells: tuple[Box, ...]
    boundary_faces: tuple[int, ...]

    def aabb(self) -> Box:
        return union_aabb(self.cells)

    def volume(self) -> float:
        return sum(c.volume() for c in self.cells)


@dataclass(frozen=True)
class ReconSolution:
    status: str
    blocks: tuple[CandidateBlock, ...]


def snap_drawing(d: DrawingSet, tol: float = DEFAULT_SNAP_TOL) -> DrawingSet:
    """Cluster coordinates consistently across views (front and top share x,
    top and side share y, front and side share z), then arrangement-
    normalize each view."""
    pools: dict[int, set[float]] = {0: set(), 1: set(), 2: set()}
    for view in d.views():
        u_axis, v_axis, _, _ = _VIEW_AXES[view.name]
        for e in view.edges:
            pools[u_axis].update((e.x1, e.x2))
            pools[v_axis].update((e.y1, e.y2))
    maps = {a: snap_values(p, tol) for a, p in pools.items()}
    views = []
    for view in d.views():
        u_axis, v_axis, _, _ = _VIEW_AXES[view.name]
        edges = []
        for e in view.edges:
            p1 = (maps[u_axis][e.x1], maps[v_axis][e.y1])
            p2 = (maps[u_axis][e.x2], maps[v_axis][e.y2])
            if p1 != p2:
                edges.append(Edge2D.make(p1, p2, e.visible))
        views.append(ViewDrawing(name=view.name, edges=tuple(edges)))
    return normalize_drawing(d.replace_views(views))


def _view_nodes(view: ViewDrawing) -> set[tuple[float, float]]:
    """All segment endpoints and pairwise intersection points."""
    segments = []
    for e in view.edges:
        if e.y1 == e.y2:
            segments.append(("h", e.y1, e.x1, e.x2, None))
        else:
            segments.append(("v", e.x1, e.y1, e.y2, None))
    nodes: set[tuple[float, float]] = set()
    for (orient, c, lo, hi) in split_segments(segments).keys():
        if orient == "h":
            nodes.add((lo, c))
            nodes.add((hi, c))
        else:
            nodes.add((c, lo))
            nodes.add((c, hi))
    return nodes


def gen_vertices(d: DrawingSet) -> list[CandidateVertex]:
    """(x, y, z) is a candidate iff (x, z) is a front node, (x, y) a top
    node, and (y, z) a side node."""
    front = _view_nodes(d.front)
    top = _view_nodes(d.top)
    side = _view_nodes(d.side)
    top_by_x: dict[float, list[float]] = defaultdict(list)
    for x, y in top:
        top_by_x[x].append(y)
    out = []
    for x, z in front:
        for y in top_by_x.get(x, ()):
            if (y, z) in side:
                out.append(CandidateVertex((x, y, z)))
    out.sort(key=lambda v: v.position)
    return out


def _coverage_index(d: DrawingSet) -> dict[str, dict[tuple[str, float], IntervalSet]]:
    """Per view, per line: union of drawn intervals regardless of visibility."""
    cov: dict[str, dict[tuple[str, float], IntervalSet]] = {}
    for view in d.views():
        lines: dict[tuple[str, float], IntervalSet] = defaultdict(IntervalSet)
        for e in view.edges:
            if e.y1 == e.y2:
                lines[("h", e.y1)].add(e.x1, e.x2)
            else:
                lines[("v", e.x1)].add(e.y1, e.y2)
        cov[view.name] = lines
    return cov


def _projected_span(
    p1: tuple[float, float, float], p2: tuple[float, float, float], view_name: str
) -> tuple[str, float, float, float] | None:
    """2D projection of an axis-aligned 3D segment; None when it is a point."""
    u_axis, v_axis, _, _ = _VIEW_AXES[view_name]
    u1, v1 = p1[u_axis], p1[v_axis]
    u2, v2 = p2[u_axis], p2[v_axis]
    if (u1, v1) == (u2, v2):
        return None
    if v1 == v2:
        return ("h", v1, min(u1, u2), max(u1, u2))
    return ("v", u1, min(v1, v2), max(v1, v2))


def gen_edges(vertices: list[CandidateVertex], d: DrawingSet) -> list[CandidateEdge]:
    """Axis-aligned segments between consecutive collinear vertices whose
    projection in every view is a point or fully drawn."""
    cov = _coverage_index(d)
    by_line: dict[tuple[int, float, float], list[tuple[float, int]]] = defaultdict(list)
    for idx, v in enumerate(vertices):
        x, y, z = v.position
        by_line[(0, y, z)].append((x, idx))
        by_line[(1, x, z)].append((y, idx))
        by_line[(2, x, y)].append((z, idx))
    edges = []
    for (axis, c1, c2), entries in by_line.items():
        entries.sort()
        for (t1, i1), (t2, i2) in zip(entries, entries[1:]):
            p1 = list(vertices[i1].position)
            p2 = list(vertices[i2].position)
            ok = True
            for name in ("front", "top", "side"):
                span = _projected_span(tuple(p1), tuple(p2), name)
                if span is None:
                    continue
                orient, c, lo, hi = span
                if not cov[name].get((orient, c), IntervalSet()).covers(lo, hi):
                    ok = False
                    break
            if ok:
                edges.append(
                    CandidateEdge(v1=i1, v2=i2, axis=axis, p1=tuple(p1), p2=tuple(p2))
                )
    edges.sort(key=lambda e: (e.axis, e.p1, e.p2))
    return edges


def _axis_pair(axis: int) -> tuple[int, int]:
    b, c = [a for a in range(3) if a != axis]
    return b, c


def gen_faces(edges: list[CandidateEdge]) -> list[CandidateFace]:
    """Minimal closed regions per plane holding at least four coplanar edges."""
    planes: dict[tuple[int, float], list[int]] = defaultdict(list)
    for ei, e in enumerate(edges):
        for a in _axis_pair(e.axis):
            planes[(a, e.p1[a])].append(ei)

    faces = []
    for (axis, offset), edge_ids in sorted(planes.items()):
        if len(edge_ids) < 4:
            continue
        b_axis, c_axis = _axis_pair(axis)
        h_lines: dict[float, list[tuple[float, float, int]]] = defaultdict(list)
        v_lines: dict[float, list[tuple[float, float, int]]] = defaultdict(list)
        us: set[float] = set()
        vs: set[float] = set()
        for ei in edge_ids:
            e = edges[ei]
            u1, v1 = e.p1[b_axis], e.p1[c_axis]
            u2, v2 = e.p2[b_axis], e.p2[c_axis]
            us.update((u1, u2))
            vs.update((v1, v2))
            if e.axis == b_axis:
                h_lines[v1].append((min(u1, u2), max(u1, u2), ei))
            else:
                v_lines[u1].append((min(v1, v2), max(v1, v2), ei))
        ug = sorted(us)
        vg = sorted(vs)
        if len(ug) < 2 or len(vg) < 2:
            continue
        h_cov = {v: _spans_to_set(items) for v, items in h_lines.items()}
        v_cov = {u: _spans_to_set(items) for u, items in v_lines.items()}

        regions = _closed_regions_2d(ug, vg, h_cov, v_cov)
        for cell_set in regions:
            rects = tuple(
                (ug[i], vg[j], ug[i + 1], vg[j + 1]) for i, j in sorted(cell_set)
            )
            boundary = _region_boundary_edges(
                cell_set, ug, vg, h_lines, v_lines
            )
            faces.append(
                CandidateFace(axis=axis, offset=offset, rects=rects, boundary_edges=boundary)
            )
    return faces


def _spans_to_set(items: list[tuple[float, float, int]]) -> IntervalSet:
    s = IntervalSet()
    for lo, hi, _ in items:
        s.add(lo, hi)
    return s


def _closed_regions_2d(
    ug: list[float],
    vg: list[float],
    h_cov: dict[float, IntervalSet],
    v_cov: dict[float, IntervalSet],
) -> list[set[tuple[int, int]]]:
    """Bounded connected cell components of the grid, walls given by drawn
    segments; components reachable from outside the grid are discarded."""
    nu, nv = len(ug) - 1, len(vg) - 1

    def h_blocked(i: int, j: int) -> bool:  # wall below cell (i, j) at v = vg[j]
        cov = h_cov.get(vg[j])
        return cov is not None and cov.covers(ug[i], ug[i + 1])

    def v_blocked(i: int, j: int) -> bool:  # wall left of cell (i, j) at u = ug[i]
        cov = v_cov.get(ug[i])
        return cov is not None and cov.covers(vg[j], vg[j + 1])

    outside: set[tuple[int, int]] = set()
    stack: list[tuple[int, int]] = []
    for i in range(nu):
        if not h_blocked(i, 0):
            stack.append((i, 0))
        if not h_blocked(i, nv):
            stack.append((i, nv - 1))
    for j in range(nv):
        if not v_blocked(0, j):
            stack.append((0, j))
        if not v_blocked(nu, j):
            stack.append((nu - 1, j))
    while stack:
        cell = stack.pop()
        if cell in outside:
            continue
        outside.add(cell)
        i, j = cell
        if i > 0 and not v_blocked(i, j) and (i - 1, j) not in outside:
            stack.append((i - 1, j))
        if i + 1 < nu and not v_blocked(i + 1, j) and (i + 1, j) not in outside:
            stack.append((i + 1, j))
        if j > 0 and not h_blocked(i, j) and (i, j - 1) not in outside:
            stack.append((i, j - 1))
        if j + 1 < nv and not h_blocked(i, j + 1) and (i, j + 1) not in outside:
            stack.append((i, j + 1))

    regions = []
    seen: set[tuple[int, int]] = set(outside)
    for i0 in range(nu):
        for j0 in range(nv):
            if (i0, j0) in seen:
                continue
            comp: set[tuple[int, int]] = set()
            stack = [(i0, j0)]
            while stack:
                cell = stack.pop()
                if cell in comp:
                    continue
                comp.add(cell)
                i, j = cell
                if i > 0 and not v_blocked(i, j) and (i - 1, j) not in comp:
                    stack.append((i - 1, j))
                if i + 1 < nu and not v_blocked(i + 1, j) and (i + 1, j) not in comp:
                    stack.append((i + 1, j))
                if j > 0 and not h_blocked(i, j) and (i, j - 1) not in comp:
                    stack.append((i, j - 1))
                if j + 1 < nv and not h_blocked(i, j + 1) and (i, j + 1) not in comp:
                    stack.append((i, j + 1))
            seen |= comp
            regions.append(comp)
    return regions


def _region_boundary_edges(
    cells: set[tuple[int, int]],
    ug: list[float],
    vg: list[float],
    h_lines: dict[float, list[tuple[float, float, int]]],
    v_lines: dict[float, list[tuple[float, float, int]]],
) -> tuple[int, ...]:
    ids: set[int] = set()
    for i, j in cells:
        walls = []
        if (i, j - 1) not in cells:
            walls.append(("h", vg[j], ug[i], ug[i + 1]))
        if (i, j + 1) not in cells:
            walls.append(("h", vg[j + 1], ug[i], ug[i + 1]))
        if (i - 1, j) not in cells:
            walls.append(("v", ug[i], vg[j], vg[j + 1]))
        if (i + 1, j) not in cells:
            walls.append(("v", ug[i + 1], vg[j], vg[j + 1]))
        for orient, c, lo, hi in walls:
            table = h_lines if orient == "h" else v_lines
            for a, b, ei in table.get(c, ()):
                if a < hi and b > lo:
                    ids.add(ei)
    return tuple(sorted(ids))


def gen_blocks(
    faces: list[CandidateFace], vertices: list[CandidateVertex]
) -> list[CandidateBlock]:
    """Flood-fill the vertex grid; cells merge across any grid face not
    covered by a candidate face. Bounded components fully enclosed by
    candidate faces become blocks; blocks sharing a face stay separate."""
    if not vertices:
        return []
    coords = [sorted({v.position[a] for v in vertices}) for a in range(3)]
    if any(len(c) < 2 for c in coords):
        return []

    # (axis, plane index, cross cell i, cross cell j) -> covering face ids
    covered: dict[tuple[int, int, int, int], list[int]] = defaultdict(list)
    for fi, face in enumerate(faces):
        axis = face.axis
        b_axis, c_axis = _axis_pair(axis)
        pi = bisect_left(coords[axis], face.offset)
        if pi >= len(coords[axis]) or coords[axis][pi] != face.offset:
            continue
        for u0, v0, u1, v1 in face.rects:
            i0 = bisect_left(coords[b_axis], u0)
            i1 = bisect_left(coords[b_axis], u1)
            j0 = bisect_left(coords[c_axis], v0)
            j1 = bisect_left(coords[c_axis], v1)
            for i in range(i0, i1):
                for j in range(j0, j1):
                    covered[(axis, pi, i, j)].append(fi)

    dims = [len(c) - 1 for c in coords]

    def wall_key(axis: int, cell: tuple[int, int, int], side: int) -> tuple[int, int, int, int]:
        b_axis, c_axis = _axis_pair(axis)
        return (axis, cell[axis] + side, cell[b_axis], cell[c_axis])

    def neighbors(cell: tuple[int, int, int]):
        for axis in range(3):
            for side in (0, 1):
                nxt = list(cell)
                nxt[axis] += -1 if side == 0 else 1
                blocked = wall_key(axis, cell, side) in covered
                inside = 0 <= nxt[axis] < dims[axis]
                yield tuple(nxt) if inside else None, blocked

    outside: set[tuple[int, int, int]] = set()
    stack = []
    for i in range(dims[0]):
        for j in range(dims[1]):
            for k in range(dims[2]):
                cell = (i, j, k)
                if i in (0, dims[0] - 1) or j in (0, dims[1] - 1) or k in (0, dims[2] - 1):
                    for nxt, blocked in neighbors(cell):
                        if nxt is None and not blocked:
                            stack.append(cell)
                            break
    while stack:
        cell = stack.pop()
        if cell in outside:
            continue
        outside.add(cell)
        for nxt, blocked in neighbors(cell):
            if nxt is not None and not blocked and nxt not in outside:
                stack.append(nxt)

    blocks = []
    seen = set(outside)
    for i in range(dims[0]):
        for j in range(dims[1]):
            for k in range(dims[2]):
                if (i, j, k) in seen:
                    continue
                comp: set[tuple[int, int, int]] = set()
                stack = [(i, j, k)]
                while stack:
                    cell = stack.pop()
                    if cell in comp:
                        continue
                    comp.add(cell)
                    for nxt, blocked in neighbors(cell):
                        if nxt is not None and not blocked and nxt not in comp:
                            stack.append(nxt)
                seen |= comp
                boundary_faces: set[int] = set()
                for cell in comp:
                    for axis in range(3):
                        for side in (0, 1):
                            nxt = list(cell)
                            nxt[axis] += -1 if side == 0 else 1
                            if tuple(nxt) in comp:
                                continue
                            boundary_faces.update(covered.get(wall_key(axis, cell, side), ()))
                cells = _merge_cells(
                    [
                        Box(
                            coords[0][c[0]], coords[1][c[1]], coords[2][c[2]],
                            coords[0][c[0] + 1], coords[1][c[1] + 1], coords[2][c[2] + 1],
                        )
                        for c in sorted(comp)
                    ]
                )
                blocks.append(
                    CandidateBlock(cells=tuple(cells), boundary_faces=tuple(sorted(boundary_faces)))
                )
    blocks.sort(key=lambda b: (b.volume(), b.aabb().bounds()))
    return blocks


def _merge_cells(cells: list[Box]) -> list[Box]:
    """Greedy compaction of unit cells into larger boxes (exact union)."""
    def merge_along(boxes: list[Box], axis: int) -> list[Box]:
        keyed: dict[tuple, list[Box]] = defaultdict(list)
        for b in boxes:
            key = tuple(
                v for a in range(3) if a != axis for v in (b.lo(a), b.hi(a))
            )
            keyed[key].append(b)
        out = []
        for group in keyed.values():
            group.sort(key=lambda b: b.lo(axis))
            cur = group[0]
            for nxt in group[1:]:
                if nxt.lo(axis) == cur.hi(axis):
                    bounds = list(cur.bounds())
                    bounds[axis + 3] = nxt.hi(axis)
                    cur = Box.from_bounds(bounds)
                else:
                    out.append(cur)
                    cur = nxt
            out.append(cur)
        return out

    for axis in (0, 1, 2):
        cells = merge_along(cells, axis)
    return cells


def _drawing_geometry(d: DrawingSet) -> dict[tuple[str, str, float], IntervalSet]:
    geom: dict[tuple[str, str, float], IntervalSet] = defaultdict(IntervalSet)
    for view in d.views():
        for e in view.edges:
            if e.y1 == e.y2:
                geom[(view.name, "h", e.y1)].add(e.x1, e.x2)
            else:
                geom[(view.name, "v", e.x1)].add(e.y1, e.y2)
    return geom


def _block_geometry(block: CandidateBlock) -> dict[tuple[str, str, float], IntervalSet]:
    geom: dict[tuple[str, str, float], IntervalSet] = defaultdict(IntervalSet)
    boundary = _solid_boundary_edges(block.cells)
    for name in ("front", "top", "side"):
        u_axis, v_axis, depth_axis, _ = _VIEW_AXES[name]
        for axis, c1, c2, t0, t1 in boundary:
            if axis == depth_axis:
                continue
            b_axis, c_axis = _axis_pair(axis)
            fixed = {b_axis: c1, c_axis: c2}
            if axis == u_axis:
                geom[(name, "h", fixed[v_axis])].add(t0, t1)
            else:
                geom[(name, "v", fixed[u_axis])].add(t0, t1)
    return geom


def _geometry_contains(
    outer: dict[tuple[str, str, float], IntervalSet],
    inner: dict[tuple[str, str, float], IntervalSet],
) -> bool:
    for key, ivs in inner.items():
        cover = outer.get(key)
        if cover is None:
            return False
        for lo, hi in ivs.intervals():
            if not cover.covers(lo, hi):
                return False
    return True


def drawings_equal(a: DrawingSet, b: DrawingSet) -> bool:
    for va, vb in zip(a.views(), b.views()):
        ea = {(e.x1, e.y1, e.x2, e.y2, e.visible) for e in va.edges}
        eb = {(e.x1, e.y1, e.x2, e.y2, e.visible) for e in vb.edges}
        if ea != eb:
            return False
    return True


def re_project(blocks: list[CandidateBlock] | tuple[CandidateBlock, ...],
               scale_mm_per_unit: float = DEFAULT_SCALE_MM_PER_UNIT) -> DrawingSet:
    return project_solids([b.cells for b in blocks], scale_mm_per_unit)


def verify_search(
    blocks: list[CandidateBlock],
    d: DrawingSet,
    timeout_secs: float = 300.0,
    sample_seed: int | None = None,
) -> ReconSolution:
    """Find the smallest block subset whose re-projection equals the input
    exactly (edge sets and visibility).

    Blocks drawing anything absent from the input can never belong to a
    match (edges only accumulate) and are discarded up front. The input is
    atomized against the block geometries so coverage is a bitmask OR: a
    block solely covering some atom is mandatory, and the optional rest is
    enumerated by increasing cardinality (volume-ascending order, which
    prefers board-like solids over compartment complements when several
    exact matches tie) with suffix-coverage pruning. The full projection
    runs only on subsets that cover every input atom.
    """
    deadline = time.monotonic() + timeout_secs
    input_geom = _drawing_geometry(d)

    usable: list[CandidateBlock] = []
    geoms: list[dict[tuple[str, str, float], IntervalSet]] = []
    for block in blocks:
        g = _block_geometry(block)
        if _geometry_contains(input_geom, g):
            usable.append(block)
            geoms.append(g)

    # Atomize the input geometry at every block-interval endpoint so each
    # block covers any given atom either fully or not at all.
    atoms: list[tuple[tuple[str, str, float], float, float]] = []
    for key, ivs in sorted(input_geom.items(), key=lambda kv: kv[0]):
        cuts: set[float] = set()
        for g in geoms:
            block_ivs = g.get(key)
            if block_ivs is not None:
                for lo, hi in block_ivs.intervals():
                    cuts.add(lo)
                    cuts.add(hi)
        for lo, hi in ivs.intervals():
            inner = sorted({lo, hi} | {c for c in cuts if lo < c < hi})
            atoms.extend((key, a, b) for a, b in zip(inner, inner[1:]))

    full_mask = (1 << len(atoms)) - 1
    masks = []
    for g in geoms:
        mask = 0
        for bit, (key, lo, hi) in enumerate(atoms):
            block_ivs = g.get(key)
            if block_ivs is not None and block_ivs.covers(lo, hi):
                mask |= 1 << bit
        masks.append(mask)

    coverage_or = 0
    for mask in masks:
        coverage_or |= mask
    if coverage_or != full_mask:
        return ReconSolution(status=STATUS_NO_MATCH, blocks=())

    counts = [0] * len(atoms)
    for mask in masks:
        m = mask
        while m:
            bit = (m & -m).bit_length() - 1
            counts[bit] += 1
            m &= m - 1
    mandatory = sorted(
        {bi for bi, mask in enumerate(masks) if any(counts[bit] == 1 and (mask >> bit) & 1 for bit in range(len(atoms)))}
    )
    base_mask = 0
    for bi in mandatory:
        base_mask |= masks[bi]
    optional = [i for i in range(len(usable)) if i not in set(mandatory)]
    suffix_or = [0] * (len(optional) + 1)
    for s in range(len(optional) - 1, -1, -1):
        suffix_or[s] = suffix_or[s + 1] | masks[optional[s]]

    matches_at_k: list[tuple[CandidateBlock, ...]] = []

    def try_subset(chosen: list[int]) -> tuple[CandidateBlock, ...] | None:
        if not chosen:
            return None
        subset = tuple(usable[i] for i in chosen)
        if drawings_equal(re_project(subset, d.scale_mm_per_unit), d):
            return subset
        return None

    def search(start: int, remaining: int, mask: int, chosen: list[int]) -> bool:
        """Returns True to stop (found, in first-match mode, or timed out)."""
        if time.monotonic() > deadline:
            raise TimeoutError
        if remaining == 0:
            if mask == full_mask:
                subset = try_subset(mandatory + chosen)
                if subset is not None:
                    matches_at_k.append(subset)
                    if sample_seed is None:
                        return True
            return False
        if mask | suffix_or[start] != full_mask:
            return False
        for idx in range(start, len(optional) - remaining + 1):
            chosen.append(optional[idx])
            if search(idx + 1, remaining - 1, mask | masks[optional[idx]], chosen):
                return True
            chosen.pop()
        return False

    try:
        for k in range(len(optional) + 1):
            if search(0, k, base_mask, []):
                break
            if matches_at_k:
                break
    except TimeoutError:
        return ReconSolution(status=STATUS_TIMEOUT, blocks=())

    if matches_at_k:
        if sample_seed is None:
            return ReconSolution(status=STATUS_VERIFIED, blocks=matches_at_k[0])
        rng = np.random.default_rng(sample_seed)
        pick = int(rng.integers(len(matches_at_k)))
        return ReconSolution(status=STATUS_VERIFIED, blocks=matches_at_k[pick])
    return ReconSolution(status=STATUS_NO_MATCH, blocks=())


def union_all(blocks: list[CandidateBlock]) -> ReconSolution:
    return ReconSolution(status=STATUS_UNION, blocks=tuple(blocks))


def group_blocks(sol: ReconSolution, gt_planks: list[Box]) -> list[Box]:
    """Evaluation-time grouping: blocks overlapping the same ground-truth
    plank merge into one AABB prediction; stray blocks stay singletons."""
    groups: dict[int, list[CandidateBlock]] = defaultdict(list)
    singles: list[CandidateBlock] = []
    for block in sol.blocks:
        overlaps = [
            sum(cell.intersection_volume(gt) for cell in block.cells) for gt in gt_planks
        ]
        best = int(np.argmax(overlaps)) if overlaps else -1
        if best >= 0 and overlaps[best] > 0.0:
            groups[best].append(block)
        else:
            singles.append(block)
    predictions = []
    for gt_idx in sorted(groups):
        predictions.append(union_aabb([b.aabb() for b in groups[gt_idx]]))
    predictions.extend(b.aabb() for b in singles)
    return predictions


def reconstruct(
    d: DrawingSet,
    variant: str = "verify",
    timeout_secs: float = 300.0,
    snap_tol: float = DEFAULT_SNAP_TOL,
    sample_seed: int | None = None,
) -> ReconSolution:
    """Full pipeline: snap, candidates, then the requested variant."""
    snapped = snap_drawing(d, snap_tol)
    vertices = gen_vertices(snapped)
    edges = gen_edges(vertices, snapped)
    faces = gen_faces(edges)
    blocks = gen_blocks(faces, vertices)
    if variant == "verify":
        return verify_search(blocks, snapped, timeout_secs, sample_seed)
    if variant == "union":
        return union_all(blocks)
    raise ValueError(f"unknown variant {variant!r}")


def solution_to_json(sol: ReconSolution) -> str:
    doc = {
        "status": sol.status,
        "blocks": [list(b.aabb().bounds()) for b in sol.blocks],
        "cells": [[list(c.bounds()) for c in b.cells] for b in sol.blocks],
    }
    return json.dumps(doc, sort_keys=True)


def solution_from_json(text: str) -> ReconSolution:
    doc = json.loads(text)
    blocks = []
    for cell_list in doc["cells"]:
        cells = tuple(Box.from_bounds(c) for c in cell_list)
        blocks.append(CandidateBlock(cells=cells, boundary_faces=()))
    return ReconSolution(status=doc["status"], blocks=tuple(blocks))
