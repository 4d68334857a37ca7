"""Token sequences for drawings and programs.

Coordinates quantize to 9-bit bins over [-1, 1]. A drawing becomes a flat
run of 4 tokens per edge (x1, y1, x2, y2) with view/edge/coord/visibility
metadata, views in front/top/side order and edges sorted by their quantized
(x1, x2, y1, y2). A program becomes SOS + 6 tokens per cuboid + EOS, planks
in dependency order (attachment targets first, ties by resolved coordinate
tuple); literal DOFs emit value bins and attached DOFs emit pointers to the
absolute output position of their target DOF token.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .boxes import dof_axis, opposite_dof
from .program import (
    Coord,
    DEFAULT_SCALE_MM_PER_UNIT,
    Plank,
    Program,
    canonical_order,
)
from .projection import DrawingSet

N_BINS = 512
MAX_BIN = N_BINS - 1
VOCAB_EOS = 512
VOCAB_SOS = 513
VOCAB_SIZE = 514

KIND_SOS = 0
KIND_EOS = 1
KIND_VAL = 2
KIND_PTR = 3

SCHEMA_VERSION = 1

DEFAULT_BBOX_VALUES = (-1.0, -1.0, -1.0, 1.0, 1.0, 1.0)


class CodecError(Exception):
    pass


class MalformedPointerError(CodecError):
    pass


class CoordinateRangeWarning(UserWarning):
    pass


def quantize(x):
    """Map [-1, 1] to integer bins 0..511 (half-up rounding); out-of-range
    values clamp with a warning."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -1.0) or np.any(arr > 1.0):
        warnings.warn("coordinate outside [-1, 1] clamped", CoordinateRangeWarning)
        arr = np.clip(arr, -1.0, 1.0)
    bins = np.floor((arr + 1.0) / 2.0 * MAX_BIN + 0.5).astype(int)
    return int(bins) if np.isscalar(x) or bins.ndim == 0 else bins


def dequantize(bin_):
    """Bin center of a 9-bit bin."""
    arr = np.asarray(bin_, dtype=float)
    out = 2.0 * arr / MAX_BIN - 1.0
    return float(out) if np.isscalar(bin_) or out.ndim == 0 else out


@dataclass(frozen=True)
class InputToken:
    value_bin: int
    view: int  # 0 front, 1 top, 2 side
    edge_idx: int  # ordinal of the edge within its view
    coord_idx: int  # 0..3 for x1, y1, x2, y2
    vis_type: int  # 0 visible, 1 hidden


@dataclass(frozen=True)
class OutputToken:
    kind: int
    arg: int = 0  # value bin for VAL, target position for PTR
    plank_idx: int = 0
    face_idx: int = 0

    @classmethod
    def sos(cls) -> "OutputToken":
        return cls(KIND_SOS)

    @classmethod
    def eos(cls) -> "OutputToken":
        return cls(KIND_EOS)

    @classmethod
    def val(cls, bin_: int, plank: int, face: int) -> "OutputToken":
        return cls(KIND_VAL, bin_, plank, face)

    @classmethod
    def ptr(cls, position: int, plank: int, face: int) -> "OutputToken":
        return cls(KIND_PTR, position, plank, face)


def encode_input(d: DrawingSet) -> list[InputToken]:
    tokens: list[InputToken] = []
    for view_idx, view in enumerate(d.views()):
        quantized = []
        for e in view.edges:
            x1, y1, x2, y2 = quantize(e.x1), quantize(e.y1), quantize(e.x2), quantize(e.y2)
            if (x1, y1) > (x2, y2):
                x1, y1, x2, y2 = x2, y2, x1, y1
            quantized.append((x1, x2, y1, y2, 0 if e.visible else 1))
        quantized.sort()
        for edge_idx, (x1, x2, y1, y2, vis) in enumerate(quantized):
            for coord_idx, value in enumerate((x1, y1, x2, y2)):
                tokens.append(InputToken(value, view_idx, edge_idx, coord_idx, vis))
    return tokens


def encode_output(p: Program) -> list[OutputToken]:
    ordered = canonical_order(p)
    tokens = [OutputToken.sos()]
    for i, cuboid in enumerate(ordered.cuboids()):
        for d, coord in enumerate(cuboid.coords):
            if coord.is_ref:
                j, e = coord.ref
                position = 1 + 6 * j + e
                tokens.append(OutputToken.ptr(position, i, d))
            else:
                tokens.append(OutputToken.val(quantize(coord.value), i, d))
    tokens.append(OutputToken.eos())
    return tokens


def _position_target(position: int) -> tuple[int, int]:
    return (position - 1) // 6, (position - 1) % 6


def decode_output(
    tokens: list[OutputToken],
    scale_mm_per_unit: float = DEFAULT_SCALE_MM_PER_UNIT,
    diagnostics: list[str] | None = None,
) -> Program:
    """Invert encode_output. Truncates at EOS, drops incomplete trailing
    cuboids and zero-volume planks (references into dropped cuboids turn
    into literals at their resolved values), and substitutes a default
    bounding box when the decoded one is missing or degenerate."""
    diags = diagnostics if diagnostics is not None else []
    if not tokens or tokens[0].kind != KIND_SOS:
        raise CodecError("output stream must start with SOS")

    body: list[OutputToken] = []
    for tok in tokens[1:]:
        if tok.kind == KIND_EOS:
            break
        if tok.kind == KIND_SOS:
            raise CodecError("unexpected SOS inside the output stream")
        body.append(tok)

    if len(body) % 6 != 0:
        diags.append(f"dropping incomplete trailing cuboid ({len(body) % 6} tokens)")
        body = body[: len(body) - (len(body) % 6)]

    n_cuboids = len(body) // 6
    resolved: list[list[float]] = []
    coords: list[list[Coord]] = []
    for i in range(n_cuboids):
        row_vals: list[float] = []
        row_coords: list[Coord] = []
        for d in range(6):
            position = 1 + 6 * i + d
            tok = body[position - 1]
            if tok.kind == KIND_VAL:
                value = dequantize(tok.arg)
                row_coords.append(Coord.lit(value))
                row_vals.append(value)
            elif tok.kind == KIND_PTR:
                target = tok.arg
                if not (1 <= target < position):
                    raise MalformedPointerError(
                        f"pointer at position {position} targets {target}"
                    )
                j, e = _position_target(target)
                if body[target - 1].kind not in (KIND_VAL, KIND_PTR):
                    raise MalformedPointerError(
                        f"pointer at position {position} targets a non-DOF token"
                    )
                if j == i:
                    diags.append(f"self-pointer at position {position} literalized")
                    value = row_vals[e]
                    row_coords.append(Coord.lit(value))
                    row_vals.append(value)
                else:
                    row_coords.append(Coord.attach(j, e))
                    row_vals.append(resolved[j][e])
            else:
                raise MalformedPointerError(f"unexpected token kind {tok.kind}")
        resolved.append(row_vals)
        coords.append(row_coords)

    def degenerate(vals: list[float]) -> bool:
        return any(vals[a] >= vals[a + 3] for a in range(3))

    keep: list[bool] = []
    for i in range(n_cuboids):
        bad = degenerate(resolved[i])
        if bad:
            diags.append(
                "bbox is degenerate; replaced with the default"
                if i == 0
                else f"dropped zero-volume plank (cuboid {i})"
            )
        keep.append(not bad)

    if n_cuboids == 0:
        diags.append("bbox absent; using the default bounding box")

    bbox_ok = n_cuboids > 0 and keep[0]
    new_index: dict[int, int] = {}
    if bbox_ok:
        new_index[0] = 0
    cursor = 1
    for i in range(1, n_cuboids):
        if keep[i]:
            new_index[i] = cursor
            cursor += 1

    bbox = (
        Plank.from_values(resolved[0])
        if bbox_ok
        else Plank.from_values(DEFAULT_BBOX_VALUES)
    )
    planks = []
    for i in range(1, n_cuboids):
        if not keep[i]:
            continue
        row = []
        for d, coord in enumerate(coords[i]):
            if coord.is_ref and coord.ref[0] in new_index:
                j, e = coord.ref
                row.append(Coord.attach(new_index[j], e))
            elif coord.is_ref:
                row.append(Coord.lit(resolved[coord.ref[0]][coord.ref[1]]))
            else:
                row.append(coord)
        planks.append(Plank(tuple(row)))
    return Program(bbox=bbox, planks=tuple(planks), scale_mm_per_unit=scale_mm_per_unit)


def legal_pointer_mask(prefix: list[OutputToken]) -> np.ndarray:
    """Boolean mask over [vocabulary | prior positions] for the next token.

    Layout: indices 0..511 are value bins (always legal), 512 is EOS (legal
    only at a cuboid boundary), 513 is SOS (never legal); index 514 + (j-1)
    is output position j, legal when it holds a DOF token on the same axis,
    on the opposite side for a plank target or the same side for a bounding
    box target, and belongs to a different cuboid.
    """
    t = len(prefix)
    if t < 1 or prefix[0].kind != KIND_SOS:
        raise CodecError("prefix must start with SOS")
    mask = np.zeros(VOCAB_SIZE + (t - 1), dtype=bool)
    mask[:N_BINS] = True
    face = (t - 1) % 6
    cuboid = (t - 1) // 6
    mask[VOCAB_EOS] = face == 0
    for j in range(1, t):
        tok = prefix[j]
        if tok.kind not in (KIND_VAL, KIND_PTR):
            continue
        tj, te = _position_target(j)
        if tj == cuboid or dof_axis(te) != dof_axis(face):
            continue
        wanted = face if tj == 0 else opposite_dof(face)
        if te == wanted:
            mask[VOCAB_SIZE + (j - 1)] = True
    return mask


def quantize_program(p: Program) -> Program:
    """Snap every literal to its bin center; references are untouched."""
    def snap(plank: Plank) -> Plank:
        return Plank(
            tuple(
                c if c.is_ref else Coord.lit(dequantize(quantize(c.value)))
                for c in plank.coords
            )
        )

    return Program(
        bbox=snap(p.bbox),
        planks=tuple(snap(pl) for pl in p.planks),
        scale_mm_per_unit=p.scale_mm_per_unit,
    )


@dataclass(frozen=True)
class SequenceSample:
    id: str
    input: tuple[InputToken, ...]
    output: tuple[OutputToken, ...]
    scale_mm_per_unit: float


def encode_sample(sample_id: str, drawing: DrawingSet, program: Program) -> SequenceSample:
    return SequenceSample(
        id=sample_id,
        input=tuple(encode_input(drawing)),
        output=tuple(encode_output(program)),
        scale_mm_per_unit=program.scale_mm_per_unit,
    )


def sample_to_json(s: SequenceSample) -> str:
    doc = {
        "id": s.id,
        "v": SCHEMA_VERSION,
        "scale": s.scale_mm_per_unit,
        "input": [
            [t.value_bin, t.view, t.edge_idx, t.coord_idx, t.vis_type] for t in s.input
        ],
        "output": [[t.kind, t.arg, t.plank_idx, t.face_idx] for t in s.output],
    }
    return json.dumps(doc, sort_keys=True)


def sample_from_json(line: str) -> SequenceSample:
    doc = json.loads(line)
    if doc.get("v") != SCHEMA_VERSION:
        raise CodecError(f"unsupported schema version {doc.get('v')!r}")
    return SequenceSample(
        id=str(doc["id"]),
        input=tuple(InputToken(*row) for row in doc["input"]),
        output=tuple(OutputToken(*row) for row in doc["output"]),
        scale_mm_per_unit=float(doc["scale"]),
    )
