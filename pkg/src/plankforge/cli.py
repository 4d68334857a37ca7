"""Command-line front end for the full pipeline.

Subcommands: gen, project, noise, encode, decode, recon, eval, export,
stats. Machine-readable output goes to stdout or --out; seeds are echoed
to stderr; the PLANKFORGE_SEED environment variable overrides --seed.
Exit codes: 0 success, 1 input/validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import (
    GenConfig,
    NoiseConfig,
    build_dataset,
    count_edges,
    decode_output,
    drawing_from_json,
    drawing_to_json,
    drawing_to_svg,
    encode_sample,
    hidden_fraction,
    inject_noise,
    parse_program,
    print_program,
    prf,
    project,
    resolve,
    strip_hidden,
)
from .codec import sample_from_json, sample_to_json
from .datagen import corpus_stats
from .dsl import ParseError
from .evaluation import aggregate, failed_score
from .export import boxes_to_obj
from .program import ProgramError
from .recon import group_blocks, reconstruct, solution_from_json, solution_to_json


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _seed_value(args) -> int:
    env = os.environ.get("PLANKFORGE_SEED")
    seed = int(env) if env else args.seed
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_drawing(path: str):
    return drawing_from_json(Path(path).read_text())


def _load_program(path: str):
    return parse_program(Path(path).read_text())


def _cmd_gen(args) -> int:
    seed = _seed_value(args)
    config = GenConfig(
        n_planks=(args.min_planks, args.max_planks),
        max_edges=args.max_edges,
    )
    splits = tuple(float(f) for f in args.splits.split("/"))
    manifest = build_dataset(
        n=args.n,
        out_dir=args.out,
        seed=seed,
        splits=splits,
        config=config,
        noise_ratios=tuple(args.noise_ratios),
    )
    _emit(json.dumps(manifest, sort_keys=True), None)
    return 0


def _cmd_project(args) -> int:
    program = _load_program(args.program)
    drawing = project(resolve(program), program.scale_mm_per_unit)
    _emit(drawing_to_json(drawing), args.out)
    if args.svg:
        Path(args.svg).write_text(drawing_to_svg(drawing))
    return 0


def _cmd_noise(args) -> int:
    drawing = _load_drawing(args.drawing)
    if args.visible_only:
        drawing = strip_hidden(drawing)
    if args.noise_ratio > 0.0:
        seed = _seed_value(args)
        drawing = inject_noise(
            drawing,
            NoiseConfig(
                ratio=args.noise_ratio,
                delete_prob=args.delete_prob,
                max_shift_frac=args.max_shift_frac,
                seed=seed,
            ),
        )
    _emit(drawing_to_json(drawing), args.out)
    return 0


def _cmd_encode(args) -> int:
    program = _load_program(args.program)
    drawing = (
        _load_drawing(args.drawing)
        if args.drawing
        else project(resolve(program), program.scale_mm_per_unit)
    )
    sample = encode_sample(args.id, drawing, program)
    _emit(sample_to_json(sample), args.out)
    return 0


def _cmd_decode(args) -> int:
    lines = Path(args.tokens).read_text().splitlines()
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for line in lines:
        if not line.strip():
            continue
        sample = sample_from_json(line)
        program = decode_output(list(sample.output), sample.scale_mm_per_unit)
        text = print_program(program)
        if out_dir:
            (out_dir / f"{sample.id}.plank").write_text(text)
        else:
            sys.stdout.write(text)
    return 0


def _recon_one(src: Path, args, out_path: Path | None) -> str:
    drawing = drawing_from_json(src.read_text())
    solution = reconstruct(
        drawing,
        variant=args.variant,
        timeout_secs=args.timeout_secs,
        sample_seed=args.sample_solution,
    )
    text = solution_to_json(solution)
    if out_path:
        out_path.write_text(text + "\n")
    if args.obj:
        boxes = [cell for block in solution.blocks for cell in block.cells]
        Path(args.obj).write_text(boxes_to_obj(boxes))
    return text


def _cmd_recon(args) -> int:
    src = Path(args.drawing)
    if src.is_dir():
        out_dir = Path(args.out_dir or src)
        out_dir.mkdir(parents=True, exist_ok=True)
        files = sorted(src.glob("*.drawing.json"))
        tasks = [
            (f, out_dir / (f.name.replace(".drawing.json", ".solution.json")))
            for f in files
        ]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                list(pool.map(_recon_worker, [(str(f), vars(args), str(o)) for f, o in tasks]))
        else:
            for f, o in tasks:
                _recon_one(f, args, o)
        return 0
    text = _recon_one(src, args, None)
    _emit(text, args.out)
    return 0


def _recon_worker(payload):
    path, arg_dict, out_path = payload
    args = argparse.Namespace(**arg_dict)
    return _recon_one(Path(path), args, Path(out_path))


def _cmd_eval(args) -> int:
    pred_dir = Path(args.pred)
    gt_dir = Path(args.gt)
    scores = []
    for gt_file in sorted(gt_dir.glob("*.plank")):
        model_id = gt_file.stem
        gt_boxes = resolve(parse_program(gt_file.read_text()))
        plank_pred = pred_dir / f"{model_id}.plank"
        solution_pred = pred_dir / f"{model_id}.solution.json"
        if plank_pred.exists():
            pred_boxes = resolve(parse_program(plank_pred.read_text()))
        elif solution_pred.exists():
            solution = solution_from_json(solution_pred.read_text())
            if solution.status in ("no_match", "timeout") or not solution.blocks:
                scores.append(failed_score(model_id, len(gt_boxes)))
                continue
            pred_boxes = group_blocks(solution, gt_boxes)
        else:
            scores.append(failed_score(model_id, len(gt_boxes)))
            continue
        scores.append(prf(pred_boxes, gt_boxes, model_id, args.iou_thresh))
    report = aggregate(scores)
    _emit(report.to_json(), args.out)
    print(report.table(), file=sys.stderr)
    return 0


def _cmd_export(args) -> int:
    program = _load_program(args.program)
    boxes = resolve(program)
    if args.obj:
        Path(args.obj).write_text(boxes_to_obj(boxes))
    if args.svg:
        drawing = project(boxes, program.scale_mm_per_unit)
        Path(args.svg).write_text(drawing_to_svg(drawing))
    if not (args.obj or args.svg):
        raise _UsageError("export: pass --obj and/or --svg")
    return 0


def _cmd_stats(args) -> int:
    stats = corpus_stats(args.dataset)
    _emit(json.dumps(stats, sort_keys=True), args.out)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="plankforge")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[], help="generate a synthetic cabinet dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--min-planks", type=int, default=4)
    p.add_argument("--max-planks", type=int, default=20)
    p.add_argument("--max-edges", type=int, default=300)
    p.add_argument("--splits", default="0.8/0.1/0.1")
    p.add_argument("--noise-ratios", type=float, nargs="*", default=[])
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("project", help="render a program to a three-view drawing")
    p.add_argument("--program", required=True)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("noise", help="corrupt a drawing")
    p.add_argument("--drawing", required=True)
    p.add_argument("--out")
    p.add_argument("--noise-ratio", type=float, default=0.0)
    p.add_argument("--delete-prob", type=float, default=0.5)
    p.add_argument("--max-shift-frac", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--visible-only", action="store_true")
    p.set_defaults(func=_cmd_noise)

    p = sub.add_parser("encode", help="encode a program + drawing to token JSON")
    p.add_argument("--program", required=True)
    p.add_argument("--drawing")
    p.add_argument("--id", default="sample")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="decode token JSONL into .plank programs")
    p.add_argument("--tokens", required=True)
    p.add_argument("--out-dir")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("recon", help="reconstruct blocks from a drawing")
    p.add_argument("--drawing", required=True)
    p.add_argument("--variant", choices=("verify", "union"), default="verify")
    p.add_argument("--timeout-secs", type=float, default=300.0)
    p.add_argument("--out")
    p.add_argument("--out-dir")
    p.add_argument("--obj")
    p.add_argument("--sample-solution", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_recon)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--iou-thresh", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("export", help="export OBJ / SVG for a program")
    p.add_argument("--program", required=True)
    p.add_argument("--obj")
    p.add_argument("--svg")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ParseError, ProgramError, FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
