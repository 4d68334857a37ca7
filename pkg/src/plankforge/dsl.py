"""Text form of shape programs.

One statement per line: `name = Cuboid(a1, a2, a3, a4, a5, a6)`. Each
argument is a decimal literal or `name_k` with k in 1..6 picking that
cuboid's k-th coordinate. `#` starts a comment; whitespace is free. The
first statement is the bounding box. A comment of the form
`# scale_mm_per_unit = 1234.5` carries the model scale.
"""

from __future__ import annotations

import re

from .program import Coord, DEFAULT_SCALE_MM_PER_UNIT, Plank, Program

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_REF_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)_(\d+)$")
_HEAD_RE = re.compile(
    r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*=\s*Cuboid\s*\(\s*(?P<args>.*?)\s*\)\s*$"
)
_SCALE_RE = re.compile(r"#\s*scale_mm_per_unit\s*[:=]\s*([0-9.eE+-]+)")


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")


def _strip_comment(line: str) -> str:
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def parse_program(text: str) -> Program:
    scale = DEFAULT_SCALE_MM_PER_UNIT
    m = _SCALE_RE.search(text)
    if m:
        scale = float(m.group(1))

    statements: list[tuple[int, str, str, int]] = []  # line no, name, args, args col
    names: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        head = _HEAD_RE.match(line)
        if head is None:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected `name = Cuboid(a1, ..., a6)`", lineno, col)
        name = head.group("name")
        if name in names:
            raise ParseError(f"duplicate identifier '{name}'", lineno, head.start("name") + 1)
        names[name] = len(statements)
        statements.append((lineno, name, head.group("args"), head.start("args") + 1))

    if not statements:
        raise ParseError("empty program: the first statement must define the bounding box", 1, 1)

    cuboids: list[Plank] = []
    for stmt_index, (lineno, name, args_text, args_col) in enumerate(statements):
        coords: list[Coord] = []
        parts = args_text.split(",") if args_text.strip() else []
        if len(parts) != 6:
            raise ParseError(f"Cuboid takes 6 arguments, got {len(parts)}", lineno, args_col)
        offset = 0
        for k, part in enumerate(parts):
            token = part.strip()
            col = args_col + offset + part.index(token) if token else args_col + offset
            offset += len(part) + 1
            if not token:
                raise ParseError(f"empty argument {k + 1}", lineno, col)
            if _NUMBER_RE.match(token):
                coords.append(Coord.lit(float(token)))
                continue
            ref = _REF_RE.match(token)
            if ref is None:
                raise ParseError(
                    f"expected a number or name_k reference, got '{token}'", lineno, col
                )
            target_name, subscript = ref.group(1), int(ref.group(2))
            if target_name not in names:
                raise ParseError(f"unknown identifier '{target_name}'", lineno, col)
            target_index = names[target_name]
            if target_index >= stmt_index:
                raise ParseError(
                    f"forward reference to '{target_name}' (defined at or after this line)",
                    lineno,
                    col,
                )
            if not (1 <= subscript <= 6):
                raise ParseError(f"subscript {subscript} outside 1..6", lineno, col)
            coords.append(Coord.attach(target_index, subscript - 1))
        cuboids.append(Plank(tuple(coords)))

    bbox = cuboids[0]
    for d, coord in enumerate(bbox.coords):
        if coord.is_ref:  # unreachable via grammar: nothing precedes the bbox
            raise ParseError("bounding box coordinates must be numeric", statements[0][0], 1)
    return Program(bbox=bbox, planks=tuple(cuboids[1:]), scale_mm_per_unit=scale)


def _cuboid_name(index: int) -> str:
    return "bbox" if index == 0 else f"plank{index}"


def _fmt(value: float) -> str:
    out = f"{value:.6f}"
    return "0.000000" if out == "-0.000000" else out


def print_program(p: Program) -> str:
    lines = []
    if p.scale_mm_per_unit != DEFAULT_SCALE_MM_PER_UNIT:
        lines.append(f"# scale_mm_per_unit = {p.scale_mm_per_unit!r}")
    for i, cuboid in enumerate(p.cuboids()):
        args = []
        for coord in cuboid.coords:
            if coord.is_ref:
                j, e = coord.ref
                args.append(f"{_cuboid_name(j)}_{e + 1}")
            else:
                args.append(_fmt(coord.value))
        lines.append(f"{_cuboid_name(i)} = Cuboid({', '.join(args)})")
    return "\n".join(lines) + "\n"
