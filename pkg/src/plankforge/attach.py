"""Recover attachment structure from raw plank geometry.

A plank's two large faces (normal to its thickness axis) are sidefaces and
its four thin faces are endfaces. An endface of one plank attaches to a
sideface of another when their planes are parallel, within the distance
threshold, and the face rectangles overlap with positive area. Any face
flush with the bounding box attaches to the box's same-side face.
"""

from __future__ import annotations

from .boxes import Box, dof_axis, opposite_dof, union_aabb
from .program import (
    Coord,
    DEFAULT_SCALE_MM_PER_UNIT,
    Plank,
    Program,
    ProgramError,
)


class CyclicAttachmentError(ProgramError):
    def __init__(self, cycle: list[int]):
        self.cycle = cycle
        super().__init__(
            "attachment constraints form a cycle through planks "
            + " -> ".join(str(i) for i in cycle)
        )


def _rect_overlap_positive(a: Box, b: Box, skip_axis: int) -> bool:
    for axis in range(3):
        if axis == skip_axis:
            continue
        if min(a.hi(axis), b.hi(axis)) <= max(a.lo(axis), b.lo(axis)):
            return False
    return True


def infer_attachments(
    planks: list[Box],
    threshold: float,
    scale_mm_per_unit: float = DEFAULT_SCALE_MM_PER_UNIT,
    attach_bbox: bool = False,
) -> Program:
    """Turn raw boxes into a program whose flush faces are attachments.

    The bounding box is the hull of the input planks. Plank order is kept
    except where a reference would run forward, in which case planks are
    topologically reordered (stable by input index). With attach_bbox,
    faces flush with the bounding box additionally attach to its same-side
    face, the way hand-modelled programs reference the invisible box.
    """
    if not planks:
        raise ProgramError("cannot infer attachments for an empty assembly")
    bbox = union_aabb(planks)
    n = len(planks)
    thickness = [p.thickness_axis() for p in planks]

    # For plank a, dof d: chosen target as (cuboid index, dof) with cuboid
    # index 0 = bbox and i+1 = input plank i.
    chosen: list[list[tuple[int, int] | None]] = [[None] * 6 for _ in range(n)]
    for a in range(n):
        pa = planks[a]
        for d in range(6):
            axis = dof_axis(d)
            best: tuple[float, int, int] | None = None  # distance, target cuboid, target dof
            if attach_bbox:
                dist_bbox = abs(pa.coord(d) - bbox.coord(d))
                if dist_bbox <= threshold:
                    best = (dist_bbox, 0, d)
            if axis != thickness[a]:  # endfaces only, for plank-to-plank
                for b in range(n):
                    if b == a or thickness[b] != axis:
                        continue
                    pb = planks[b]
                    dist = abs(pa.coord(d) - pb.coord(opposite_dof(d)))
                    if dist > threshold:
                        continue
                    if not _rect_overlap_positive(pa, pb, axis):
                        continue
                    cand = (dist, b + 1, opposite_dof(d))
                    if best is None or (cand[0], cand[1]) < (best[0], best[1]):
                        best = cand
            if best is not None:
                chosen[a][d] = (best[1], best[2])

    # Topological order over plank-to-plank constraints, stable by index.
    deps: list[set[int]] = [set() for _ in range(n)]
    for a in range(n):
        for target in chosen[a]:
            if target is not None and target[0] != 0:
                deps[a].add(target[0] - 1)
    order: list[int] = []
    done: set[int] = set()
    pending = set(range(n))
    while pending:
        ready = sorted(i for i in pending if deps[i] <= done)
        if not ready:
            cycle = _find_cycle(deps, pending)
            raise CyclicAttachmentError(cycle)
        for i in ready:
            order.append(i)
            done.add(i)
            pending.discard(i)

    new_index = {old: new + 1 for new, old in enumerate(order)}
    out_planks = []
    for old in order:
        coords = []
        for d in range(6):
            target = chosen[old][d]
            if target is None:
                coords.append(Coord.lit(planks[old].coord(d)))
            else:
                cuboid, dof = target
                mapped = 0 if cuboid == 0 else new_index[cuboid - 1]
                coords.append(Coord.attach(mapped, dof))
        out_planks.append(Plank(tuple(coords)))
    return Program(
        bbox=Plank.from_values(bbox.bounds()),
        planks=tuple(out_planks),
        scale_mm_per_unit=scale_mm_per_unit,
    )


def _find_cycle(deps: list[set[int]], pending: set[int]) -> list[int]:
    start = min(pending)
    seen: list[int] = []
    node = start
    while node not in seen:
        seen.append(node)
        successors = sorted(d for d in deps[node] if d in pending)
        if not successors:
            break
        node = successors[0]
    if node in seen:
        return seen[seen.index(node):] + [node]
    return seen
