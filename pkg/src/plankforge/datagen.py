"""Synthetic cabinet corpus.

Cabinets are built in quantization-bin space so every literal sits exactly
on a bin center: a shell (two side panels, bottom, top, usually a back)
attached to the bounding box, then recursive shelf/divider splits of the
interior compartments whose end DOFs attach to the bounding planks.
Axes: x is width, y is depth (front at y_min), z is height.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import (
    MAX_BIN,
    SequenceSample,
    dequantize,
    encode_input,
    encode_sample,
    sample_to_json,
)
from .degrade import NoiseConfig, inject_noise
from .dsl import print_program
from .program import Coord, Plank, Program, validate
from .projection import count_edges, drawing_to_json, hidden_fraction, project
from .program import canonical_order, resolve


class RetryExhaustedError(Exception):
    pass


@dataclass(frozen=True)
class GenConfig:
    n_planks: tuple[int, int] = (4, 20)
    max_edges: int | None = 300
    width_mm: tuple[float, float] = (600.0, 2400.0)
    depth_mm: tuple[float, float] = (250.0, 650.0)
    height_mm: tuple[float, float] = (600.0, 2400.0)
    thickness_mm: tuple[float, float] = (12.0, 30.0)
    back_prob: float = 0.85
    # Inset (recessed-front) shelves make the drawing genuinely ambiguous:
    # the air complement of the interior re-projects identically, so exact
    # re-projection search cannot recover the boards. Off by default.
    inset_prob: float = 0.0
    min_gap_bins: int = 8
    max_tries: int = 60

    def __post_init__(self):
        lo, hi = self.n_planks
        if not (4 <= lo <= hi <= 20):
            raise ValueError("plank count range must sit inside [4, 20]")
        if self.max_edges is not None and self.max_edges <= 0:
            raise ValueError("max_edges must be positive")


@dataclass
class _Compartment:
    x0: int
    x1: int
    z0: int
    z1: int
    left: tuple[int, int]
    right: tuple[int, int]
    bottom: tuple[int, int]
    top: tuple[int, int]


def _lit(bin_: int) -> Coord:
    return Coord.lit(dequantize(bin_))


def gen_cabinet(rng: np.random.Generator, config: GenConfig = GenConfig()) -> Program:
    """Sample one cabinet program passing the plank-count and edge-count
    filters; raises RetryExhaustedError when max_tries samples all fail."""
    for _ in range(config.max_tries):
        program = _sample_cabinet(rng, config)
        if program is None:
            continue
        if config.max_edges is not None:
            drawing = project(resolve(program), program.scale_mm_per_unit)
            if count_edges(drawing) > config.max_edges:
                continue
        return program
    raise RetryExhaustedError(f"no admissible cabinet in {config.max_tries} tries")


def _sample_cabinet(rng: np.random.Generator, config: GenConfig) -> Program | None:
    dims = np.array(
        [
            rng.uniform(*config.width_mm),
            rng.uniform(*config.depth_mm),
            rng.uniform(*config.height_mm),
        ]
    )
    longest = float(dims.max())
    scale = longest / 2.0  # mm per normalized unit; longest side spans [-1, 1]
    extent_bins = np.maximum(np.round(dims / longest * MAX_BIN).astype(int), 64)
    extent_bins[int(dims.argmax())] = MAX_BIN
    lo = [(MAX_BIN - int(e)) // 2 for e in extent_bins]
    hi = [l + int(e) for l, e in zip(lo, extent_bins)]

    def t_bins() -> int:
        t_mm = rng.uniform(*config.thickness_mm)
        return int(np.clip(round(t_mm * MAX_BIN / longest), 2, 10))

    n_target = int(rng.integers(config.n_planks[0], config.n_planks[1] + 1))
    use_back = n_target >= 5 and rng.random() < config.back_prob
    n_interior = n_target - 4 - int(use_back)

    mg = config.min_gap_bins
    tx, tz = t_bins(), t_bins()
    if hi[0] - lo[0] < 2 * tx + mg or hi[2] - lo[2] < 2 * tz + mg:
        return None

    bbox = Plank(tuple(_lit(b) for b in (lo[0], lo[1], lo[2], hi[0], hi[1], hi[2])))
    planks: list[Plank] = []
    bounds_bins: list[tuple[int, int, int, int, int, int]] = []

    def add(coords: list[Coord], bins: tuple[int, int, int, int, int, int]) -> int:
        planks.append(Plank(tuple(coords)))
        bounds_bins.append(bins)
        return len(planks)  # cuboid index (bbox is 0)

    ref = Coord.attach
    left = add(
        [ref(0, 0), ref(0, 1), ref(0, 2), _lit(lo[0] + tx), ref(0, 4), ref(0, 5)],
        (lo[0], lo[1], lo[2], lo[0] + tx, hi[1], hi[2]),
    )
    right = add(
        [_lit(hi[0] - tx), ref(0, 1), ref(0, 2), ref(0, 3), ref(0, 4), ref(0, 5)],
        (hi[0] - tx, lo[1], lo[2], hi[0], hi[1], hi[2]),
    )
    bottom = add(
        [ref(left, 3), ref(0, 1), ref(0, 2), ref(right, 0), ref(0, 4), _lit(lo[2] + tz)],
        (lo[0] + tx, lo[1], lo[2], hi[0] - tx, hi[1], lo[2] + tz),
    )
    top = add(
        [ref(left, 3), ref(0, 1), _lit(hi[2] - tz), ref(right, 0), ref(0, 4), ref(0, 5)],
        (lo[0] + tx, lo[1], hi[2] - tz, hi[0] - tx, hi[1], hi[2]),
    )
    back = None
    if use_back:
        tb = t_bins()
        if hi[1] - lo[1] < tb + 4:
            return None
        back = add(
            [ref(left, 3), _lit(hi[1] - tb), ref(bottom, 5), ref(right, 0), ref(0, 4), ref(top, 2)],
            (lo[0] + tx, hi[1] - tb, lo[2] + tz, hi[0] - tx, hi[1], hi[2] - tz),
        )

    def shelf_y() -> tuple[Coord, Coord, int, int]:
        if rng.random() < config.inset_prob and hi[1] - lo[1] > 12:
            inset = int(rng.integers(2, 7))
            y_min, y0b = _lit(lo[1] + inset), lo[1] + inset
        else:
            y_min, y0b = ref(0, 1), lo[1]
        if back is not None:
            y_max, y1b = ref(back, 1), bounds_bins[back - 1][1]
        else:
            y_max, y1b = ref(0, 4), hi[1]
        return y_min, y_max, y0b, y1b

    compartments = [
        _Compartment(
            x0=lo[0] + tx,
            x1=hi[0] - tx,
            z0=lo[2] + tz,
            z1=hi[2] - tz,
            left=(left, 3),
            right=(right, 0),
            bottom=(bottom, 5),
            top=(top, 2),
        )
    ]

    made = 0
    stall = 0
    while made < n_interior and compartments and stall < 40:
        weights = np.array([(c.x1 - c.x0) * (c.z1 - c.z0) for c in compartments], dtype=float)
        ci = int(rng.choice(len(compartments), p=weights / weights.sum()))
        comp = compartments[ci]
        t = t_bins()
        x_room = comp.x1 - comp.x0 - 2 * mg - t
        z_room = comp.z1 - comp.z0 - 2 * mg - t
        if x_room < 0 and z_room < 0:
            compartments.pop(ci)
            stall += 1
            continue
        make_shelf = z_room >= 0 and (x_room < 0 or rng.random() < 0.6)
        y_min, y_max, y0b, y1b = shelf_y()
        if make_shelf:
            p = int(rng.integers(comp.z0 + mg, comp.z1 - mg - t + 1))
            idx = add(
                [ref(*comp.left), y_min, _lit(p), ref(*comp.right), y_max, _lit(p + t)],
                (comp.x0, y0b, p, comp.x1, y1b, p + t),
            )
            compartments[ci] = _Compartment(
                comp.x0, comp.x1, comp.z0, p, comp.left, comp.right, comp.bottom, (idx, 2)
            )
            compartments.append(
                _Compartment(
                    comp.x0, comp.x1, p + t, comp.z1, comp.left, comp.right, (idx, 5), comp.top
                )
            )
        else:
            p = int(rng.integers(comp.x0 + mg, comp.x1 - mg - t + 1))
            idx = add(
                [_lit(p), y_min, ref(*comp.bottom), _lit(p + t), y_max, ref(*comp.top)],
                (comp.x0, y0b, comp.z0, comp.x1, y1b, comp.z1),
            )
            compartments[ci] = _Compartment(
                comp.x0, p, comp.z0, comp.z1, comp.left, (idx, 0), comp.bottom, comp.top
            )
            compartments.append(
                _Compartment(
                    p + t, comp.x1, comp.z0, comp.z1, (idx, 3), comp.right, comp.bottom, comp.top
                )
            )
        made += 1

    if len(planks) < config.n_planks[0]:
        return None
    program = canonical_order(
        Program(bbox=bbox, planks=tuple(planks), scale_mm_per_unit=scale)
    )
    if validate(program):
        return None  # defensive; construction should always be clean
    return program


def _split_counts(n: int, fractions: tuple[float, ...]) -> list[int]:
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("split fractions must sum to 1")
    counts = [int(n * f) for f in fractions]
    counts[0] += n - sum(counts)
    return counts


def build_dataset(
    n: int,
    out_dir: str | Path,
    seed: int = 0,
    splits: tuple[float, float, float] = (0.8, 0.1, 0.1),
    config: GenConfig = GenConfig(),
    noise_ratios: tuple[float, ...] = (),
    noise_delete_prob: float = 0.5,
    noise_max_shift_frac: float = 0.1,
) -> dict[str, list[str]]:
    """Generate n unique cabinets with drawings and token streams.

    Near-duplicates (identical output token streams) are dropped and
    resampled. Deterministic for a given seed: file contents depend only on
    (seed, sample index, attempt)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = Path(out_dir)
    split_names = ("train", "val", "test")
    counts = _split_counts(n, splits)
    manifest: dict[str, list[str]] = {name: [] for name in split_names}

    seen: set[tuple] = set()
    jsonl: dict[tuple[str, float | None], list[str]] = {}
    sample_index = 0
    for split, count in zip(split_names, counts):
        split_dir = out / split
        split_dir.mkdir(parents=True, exist_ok=True)
        for _ in range(count):
            for attempt in range(200):
                rng = np.random.default_rng([seed, sample_index, attempt])
                try:
                    program = gen_cabinet(rng, config)
                except RetryExhaustedError:
                    continue
                drawing = project(resolve(program), program.scale_mm_per_unit)
                sample_id = f"{sample_index:06d}"
                sample = encode_sample(sample_id, drawing, program)
                key = sample.output
                if key in seen:
                    continue
                seen.add(key)
                break
            else:
                raise RetryExhaustedError(f"could not generate sample {sample_index}")
            (split_dir / f"{sample_id}.plank").write_text(print_program(program))
            (split_dir / f"{sample_id}.drawing.json").write_text(drawing_to_json(drawing))
            jsonl.setdefault((split, None), []).append(sample_to_json(sample))
            for ri, ratio in enumerate(noise_ratios):
                noisy = inject_noise(
                    drawing,
                    NoiseConfig(
                        ratio=ratio,
                        delete_prob=noise_delete_prob,
                        max_shift_frac=noise_max_shift_frac,
                        seed=int(np.random.default_rng([seed, sample_index, 1000 + ri]).integers(2**31)),
                    ),
                )
                noisy_sample = SequenceSample(
                    id=sample_id,
                    input=tuple(encode_input(noisy)),
                    output=sample.output,
                    scale_mm_per_unit=sample.scale_mm_per_unit,
                )
                jsonl.setdefault((split, ratio), []).append(sample_to_json(noisy_sample))
            manifest[split].append(sample_id)
            sample_index += 1

    for (split, ratio), lines in jsonl.items():
        name = f"{split}.jsonl" if ratio is None else f"{split}.noise{round(ratio * 100):02d}.jsonl"
        (out / name).write_text("\n".join(lines) + "\n")
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1))
    return manifest


def corpus_stats(dataset_dir: str | Path) -> dict:
    """Plank/edge/hidden-fraction statistics over every generated sample."""
    from .dsl import parse_program
    from .projection import drawing_from_json

    root = Path(dataset_dir)
    plank_counts: list[int] = []
    edge_counts: list[int] = []
    hidden_fracs: list[float] = []
    for plank_file in sorted(root.glob("*/*.plank")):
        program = parse_program(plank_file.read_text())
        plank_counts.append(program.n_planks)
        drawing_file = plank_file.with_name(plank_file.stem + ".drawing.json")
        if drawing_file.exists():
            drawing = drawing_from_json(drawing_file.read_text())
            edge_counts.append(count_edges(drawing))
            hidden_fracs.append(hidden_fraction(drawing))
    def hist(values: list[int]) -> dict[str, int]:
        out: dict[str, int] = {}
        for v in values:
            out[str(v)] = out.get(str(v), 0) + 1
        return dict(sorted(out.items(), key=lambda kv: int(kv[0])))

    return {
        "samples": len(plank_counts),
        "planks": hist(plank_counts),
        "edges_min": min(edge_counts) if edge_counts else 0,
        "edges_max": max(edge_counts) if edge_counts else 0,
        "edges_mean": float(np.mean(edge_counts)) if edge_counts else 0.0,
        "hidden_fraction_mean": float(np.mean(hidden_fracs)) if hidden_fracs else 0.0,
    }
