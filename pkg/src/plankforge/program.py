"""Shape programs for plank assemblies.

A program is an ordered list of cuboids. Cuboid 0 is the bounding box and
carries six numeric coordinates; every later cuboid (a plank) gives each of
its six DOFs either as a numeric literal or as a reference to an earlier
cuboid's DOF. References to a plank land on the opposite side of the same
axis (a plank's x_min can only take another plank's x_max); references to
the bounding box land on the same side, because planks sit flush against
the box's inside.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .boxes import Box, DOF_NAMES, dof_axis, opposite_dof

DEFAULT_SCALE_MM_PER_UNIT = 1000.0


class ProgramError(Exception):
    pass


class ZeroVolumeError(ProgramError):
    def __init__(self, cuboid_index: int, axis: int):
        self.cuboid_index = cuboid_index
        self.axis = axis
        super().__init__(f"cuboid {cuboid_index} has zero volume on axis {axis}")


class EditOnAttachmentError(ProgramError):
    pass


class GraphError(ProgramError):
    pass


@dataclass(frozen=True)
class Coord:
    """One DOF: a numeric value, or a reference to (cuboid index, dof)."""

    value: float | None = None
    ref: tuple[int, int] | None = None

    def __post_init__(self):
        if (self.value is None) == (self.ref is None):
            raise ValueError("Coord takes exactly one of value / ref")

    @classmethod
    def lit(cls, value: float) -> "Coord":
        return cls(value=float(value))

    @classmethod
    def attach(cls, cuboid: int, dof: int) -> "Coord":
        return cls(ref=(int(cuboid), int(dof)))

    @property
    def is_ref(self) -> bool:
        return self.ref is not None


@dataclass(frozen=True)
class Plank:
    coords: tuple[Coord, Coord, Coord, Coord, Coord, Coord]

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "Plank":
        vals = tuple(Coord.lit(v) for v in values)
        if len(vals) != 6:
            raise ValueError("a plank needs exactly 6 coordinates")
        return cls(vals)


@dataclass(frozen=True)
class Program:
    bbox: Plank
    planks: tuple[Plank, ...]
    scale_mm_per_unit: float = DEFAULT_SCALE_MM_PER_UNIT

    def cuboids(self) -> tuple[Plank, ...]:
        """All cuboids with global indices: 0 is the bbox."""
        return (self.bbox,) + self.planks

    @property
    def n_planks(self) -> int:
        return len(self.planks)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    cuboid: int
    dof: int | None
    message: str

    def __str__(self) -> str:
        where = f"cuboid {self.cuboid}"
        if self.dof is not None:
            where += f".{DOF_NAMES[self.dof]}"
        return f"{self.code} at {where}: {self.message}"


def resolve(p: Program, include_bbox: bool = False) -> list[Box]:
    """Execute the program: literals copy, references take the target's
    already-resolved value. Raises ZeroVolumeError on any degenerate cuboid."""
    resolved: list[list[float]] = []
    for i, cuboid in enumerate(p.cuboids()):
        vals: list[float] = []
        for d, coord in enumerate(cuboid.coords):
            if coord.is_ref:
                j, e = coord.ref
                if not (0 <= j < i):
                    raise ProgramError(
                        f"cuboid {i}.{DOF_NAMES[d]} references cuboid {j}, "
                        "which is not earlier in the program"
                    )
                vals.append(resolved[j][e])
            else:
                vals.append(coord.value)
        for a in range(3):
            if vals[a] >= vals[a + 3]:
                raise ZeroVolumeError(i, a)
        resolved.append(vals)
    boxes = [Box.from_bounds(v) for v in resolved]
    return boxes if include_bbox else boxes[1:]


def validate(p: Program) -> list[Diagnostic]:
    """Structural diagnostics; an empty list means the program is well formed."""
    diags: list[Diagnostic] = []
    cuboids = p.cuboids()
    for d, coord in enumerate(p.bbox.coords):
        if coord.is_ref:
            diags.append(Diagnostic("bbox-attachment", 0, d, "bbox coordinates must be numeric"))
    for i, plank in enumerate(cuboids[1:], start=1):
        for d, coord in enumerate(plank.coords):
            if not coord.is_ref:
                continue
            j, e = coord.ref
            if not (0 <= j < len(cuboids)):
                diags.append(Diagnostic("bad-target", i, d, f"no cuboid {j}"))
                continue
            if not (0 <= e < 6):
                diags.append(Diagnostic("bad-target", i, d, f"no dof {e}"))
                continue
            if j >= i:
                kind = "self-reference" if j == i else "forward-reference"
                diags.append(Diagnostic(kind, i, d, f"target cuboid {j} is not earlier"))
            if dof_axis(e) != dof_axis(d):
                diags.append(
                    Diagnostic("axis-mismatch", i, d, f"references {DOF_NAMES[e]} on another axis")
                )
            elif j == 0:
                if e != d:
                    diags.append(
                        Diagnostic(
                            "bbox-side", i, d,
                            f"bbox attachments keep the same side, got {DOF_NAMES[e]}",
                        )
                    )
            elif e != opposite_dof(d):
                diags.append(
                    Diagnostic(
                        "same-side-attachment", i, d,
                        f"plank attachments take the opposite side, got {DOF_NAMES[e]}",
                    )
                )
    if any(d.code in ("bad-target", "forward-reference", "self-reference") for d in diags):
        return diags
    try:
        resolve(p, include_bbox=True)
    except ZeroVolumeError as exc:
        diags.append(
            Diagnostic("zero-volume", exc.cuboid_index, None, f"degenerate on axis {exc.axis}")
        )
    return diags


def with_edit(p: Program, cuboid_index: int, dof: int, new_value: float) -> Program:
    """Replace one literal coordinate, keeping the attachment topology."""
    cuboids = p.cuboids()
    if not (0 <= cuboid_index < len(cuboids)):
        raise ProgramError(f"no cuboid {cuboid_index}")
    target = cuboids[cuboid_index].coords[dof]
    if target.is_ref:
        raise EditOnAttachmentError(
            f"cuboid {cuboid_index}.{DOF_NAMES[dof]} is an attachment; edit its target instead"
        )
    coords = list(cuboids[cuboid_index].coords)
    coords[dof] = Coord.lit(new_value)
    edited = Plank(tuple(coords))
    if cuboid_index == 0:
        return replace(p, bbox=edited)
    planks = list(p.planks)
    planks[cuboid_index - 1] = edited
    return replace(p, planks=tuple(planks))


def edit_propagate(p: Program, cuboid_index: int, dof: int, new_value: float) -> list[Box]:
    """Edit one literal and re-execute; attached planks follow automatically."""
    return resolve(with_edit(p, cuboid_index, dof, new_value))


@dataclass(frozen=True)
class AttachmentGraph:
    """Faces-as-vertices view of a program: face id = cuboid*6 + dof."""

    n_faces: int
    edges: tuple[tuple[int, int], ...]  # (src face, dst face)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n_faces, self.n_faces), dtype=np.int8)
        for src, dst in self.edges:
            a[src, dst] = 1
        return a

    def out_degrees(self) -> dict[int, int]:
        deg: dict[int, int] = {}
        for src, _ in self.edges:
            deg[src] = deg.get(src, 0) + 1
        return deg


def to_graph(p: Program) -> AttachmentGraph:
    edges = []
    for i, cuboid in enumerate(p.cuboids()):
        for d, coord in enumerate(cuboid.coords):
            if coord.is_ref:
                j, e = coord.ref
                edges.append((i * 6 + d, j * 6 + e))
    return AttachmentGraph(n_faces=6 * (1 + p.n_planks), edges=tuple(edges))


def literal_table(p: Program) -> dict[int, float]:
    """Face id -> literal value, for every face without an outgoing edge."""
    table = {}
    for i, cuboid in enumerate(p.cuboids()):
        for d, coord in enumerate(cuboid.coords):
            if not coord.is_ref:
                table[i * 6 + d] = coord.value
    return table


def from_graph(
    g: AttachmentGraph,
    literals: Mapping[int, float],
    scale_mm_per_unit: float = DEFAULT_SCALE_MM_PER_UNIT,
) -> Program:
    if g.n_faces % 6 != 0 or g.n_faces < 6:
        raise GraphError(f"face count {g.n_faces} is not a positive multiple of 6")
    out: dict[int, int] = {}
    for src, dst in g.edges:
        if src in out:
            raise GraphError(f"face {src} has out-degree > 1")
        if not (0 <= src < g.n_faces and 0 <= dst < g.n_faces):
            raise GraphError(f"edge ({src}, {dst}) outside face range")
        out[src] = dst
    cuboids = []
    for i in range(g.n_faces // 6):
        coords = []
        for d in range(6):
            face = i * 6 + d
            if face in out:
                dst = out[face]
                coords.append(Coord.attach(dst // 6, dst % 6))
            elif face in literals:
                coords.append(Coord.lit(literals[face]))
            else:
                raise GraphError(f"face {face} has neither an edge nor a literal")
        cuboids.append(Plank(tuple(coords)))
    return Program(bbox=cuboids[0], planks=tuple(cuboids[1:]), scale_mm_per_unit=scale_mm_per_unit)


def canonical_order(p: Program) -> Program:
    """Reorder planks so attachment targets precede their referencers and
    incomparable planks sort by their resolved coordinate tuple."""
    boxes = resolve(p, include_bbox=True)
    n = p.n_planks
    deps: list[set[int]] = [set() for _ in range(n + 1)]
    dependents: list[set[int]] = [set() for _ in range(n + 1)]
    for i, cuboid in enumerate(p.cuboids()):
        for coord in cuboid.coords:
            if coord.is_ref:
                j = coord.ref[0]
                if j != 0:
                    deps[i].add(j)
                    dependents[j].add(i)
    order: list[int] = []
    ready = [
        (boxes[i].bounds(), i)
        for i in range(1, n + 1)
        if not deps[i]
    ]
    heapq.heapify(ready)
    remaining = {i: set(d) for i, d in enumerate(deps) if i >= 1}
    while ready:
        _, i = heapq.heappop(ready)
        order.append(i)
        for k in dependents[i]:
            remaining[k].discard(i)
            if not remaining[k]:
                heapq.heappush(ready, (boxes[k].bounds(), k))
    if len(order) != n:
        raise ProgramError("cyclic attachment structure")
    index_map = {0: 0}
    for new_i, old_i in enumerate(order, start=1):
        index_map[old_i] = new_i
    new_planks = []
    for old_i in order:
        coords = []
        for coord in p.cuboids()[old_i].coords:
            if coord.is_ref:
                j, e = coord.ref
                coords.append(Coord.attach(index_map[j], e))
            else:
                coords.append(coord)
        new_planks.append(Plank(tuple(coords)))
    return replace(p, planks=tuple(new_planks))


def structurally_equal(a: Program, b: Program, tol: float = 0.0) -> bool:
    """Same shape: identical reference structure, literals within tol."""
    if a.n_planks != b.n_planks:
        return False
    for ca, cb in zip(a.cuboids(), b.cuboids()):
        for xa, xb in zip(ca.coords, cb.coords):
            if xa.is_ref != xb.is_ref:
                return False
            if xa.is_ref:
                if xa.ref != xb.ref:
                    return False
            elif abs(xa.value - xb.value) > tol:
                return False
    return True


def _coord_to_json(c: Coord):
    if c.is_ref:
        return {"p": [c.ref[0], c.ref[1]]}
    return {"v": c.value}


def _coord_from_json(obj) -> Coord:
    if "p" in obj:
        return Coord.attach(obj["p"][0], obj["p"][1])
    return Coord.lit(obj["v"])


def program_to_json(p: Program) -> str:
    doc = {
        "scale_mm_per_unit": p.scale_mm_per_unit,
        "bbox": [c.value for c in p.bbox.coords],
        "planks": [[_coord_to_json(c) for c in plank.coords] for plank in p.planks],
    }
    return json.dumps(doc, sort_keys=True)


def program_from_json(text: str) -> Program:
    doc = json.loads(text)
    bbox = Plank.from_values(doc["bbox"])
    planks = tuple(
        Plank(tuple(_coord_from_json(c) for c in coords)) for coords in doc["planks"]
    )
    return Program(
        bbox=bbox,
        planks=planks,
        scale_mm_per_unit=float(doc.get("scale_mm_per_unit", DEFAULT_SCALE_MM_PER_UNIT)),
    )
