"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
summary lines as they complete.
"""

import itertools
import time

import numpy as np
import pytest
from scipy.stats import qmc

from plankforge.boxes import Box
from plankforge.codec import (
    decode_output,
    dequantize,
    encode_output,
    quantize,
    quantize_program,
)
from plankforge.datagen import GenConfig, gen_cabinet
from plankforge.degrade import NoiseConfig, inject_noise
from plankforge.dsl import parse_program
from plankforge.evaluation import aggregate, iou, match_planks, prf
from plankforge.program import canonical_order, resolve, structurally_equal, validate
from plankforge.projection import count_edges, project
from plankforge.recon import (
    STATUS_VERIFIED,
    drawings_equal,
    group_blocks,
    re_project,
    reconstruct,
    snap_drawing,
)

from conftest import CABINET_TEXT


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _batch(n, seed, config):
    for i in range(n):
        yield gen_cabinet(np.random.default_rng([seed, i]), config)


def test_round_trip_soundness():
    started = time.monotonic()
    scores = []
    exact = 0
    verified = 0
    for program in _batch(200, 2024, GenConfig()):
        boxes = resolve(program)
        drawing = project(boxes, program.scale_mm_per_unit)
        solution = reconstruct(drawing, variant="verify", timeout_secs=60)
        if solution.status == STATUS_VERIFIED:
            verified += 1
            if drawings_equal(
                re_project(solution.blocks, drawing.scale_mm_per_unit),
                snap_drawing(drawing),
            ):
                exact += 1
            predictions = group_blocks(solution, boxes)
            scores.append(prf(predictions, boxes))
        else:
            scores.append(prf([], boxes))
    elapsed = time.monotonic() - started
    mean_f1 = aggregate(scores).f1
    ok = mean_f1 >= 0.95 and exact == verified and elapsed <= 600
    _report(
        "round-trip soundness",
        ok,
        f"mean F1 {mean_f1:.4f} (>=0.95), exact re-projections {exact}/{verified}, "
        f"{elapsed:.1f}s (<=600s)",
    )


def test_noise_direction():
    config = GenConfig()
    verified_noisy = 0
    clean_scores = []
    noisy_scores = []
    for i, program in enumerate(_batch(100, 777, config)):
        boxes = resolve(program)
        drawing = project(boxes, program.scale_mm_per_unit)

        deletion = inject_noise(
            drawing, NoiseConfig(ratio=0.10, delete_prob=1.0, seed=1000 + i)
        )
        sol = reconstruct(deletion, variant="verify", timeout_secs=60)
        if sol.status == STATUS_VERIFIED:
            verified_noisy += 1

        union_clean = reconstruct(drawing, variant="union")
        clean_scores.append(prf(group_blocks(union_clean, boxes), boxes))
        noisy = inject_noise(drawing, NoiseConfig(ratio=0.30, seed=2000 + i))
        union_noisy = reconstruct(noisy, variant="union")
        noisy_scores.append(prf(group_blocks(union_noisy, boxes), boxes))

    rate = verified_noisy / 100
    clean_f1 = aggregate(clean_scores).f1
    noisy_f1 = aggregate(noisy_scores).f1
    drop = (clean_f1 - noisy_f1) * 100
    ok = rate <= 0.05 and drop >= 40
    _report(
        "noise direction",
        ok,
        f"verified rate at 10% deletion {rate:.2%} (<=5%), union F1 "
        f"{clean_f1:.3f} clean vs {noisy_f1:.3f} at 30% noise (drop {drop:.1f} >= 40 pts)",
    )


def test_codec_exactness():
    failures = 0
    config = GenConfig(max_edges=None)
    for i in range(10_000):
        program = gen_cabinet(np.random.default_rng([31337, i]), config)
        decoded = decode_output(encode_output(program), program.scale_mm_per_unit)
        if not structurally_equal(decoded, program, tol=0.0):
            failures += 1
    rng = np.random.default_rng(5)
    xs = rng.uniform(-1.0, 1.0, size=1_000_000)
    max_err = float(np.max(np.abs(xs - dequantize(quantize(xs)))))
    ok = failures == 0 and max_err <= 1.0 / 511.0
    _report(
        "codec exactness",
        ok,
        f"identity failures {failures}/10000, quantization max error "
        f"{max_err:.3e} (<= {1/511:.3e})",
    )


def _qmc_points():
    return qmc.Sobol(d=3, scramble=True, seed=7).random(2**16)


def _sample_box_pair(rng):
    mode = rng.random()
    lo1 = rng.uniform(-1, 0.4, 3)
    ext1 = rng.uniform(0.15, 1.0, 3)
    if mode < 0.7:
        lo2 = lo1 + rng.uniform(-0.4, 0.4, 3)
        ext2 = rng.uniform(0.15, 1.0, 3)
    elif mode < 0.9:
        lo2 = lo1 + rng.uniform(0.0, 0.2, 3)
        ext2 = ext1 * rng.uniform(0.3, 0.9, 3)
    else:
        lo2 = lo1 + ext1 + rng.uniform(0.05, 0.5, 3)
        ext2 = rng.uniform(0.15, 1.0, 3)
    return Box(*lo1, *(lo1 + ext1)), Box(*lo2, *(lo2 + ext2))


def _random_eval_box(rng):
    lo = rng.uniform(-1, 0.5, size=3)
    ext = rng.uniform(0.1, 0.8, size=3)
    return Box(*lo, *(lo + ext))


def _brute_force_tp(pred, gt, threshold=0.5):
    if not pred or not gt:
        return 0
    k = min(len(pred), len(gt))
    small, large, swapped = (
        (pred, gt, False) if len(pred) <= len(gt) else (gt, pred, True)
    )
    best_sum, best_tp = -1.0, 0
    for assignment in itertools.permutations(range(len(large)), k):
        total, tp = 0.0, 0
        for i, j in enumerate(assignment):
            p, g = (small[i], large[j]) if not swapped else (large[j], small[i])
            v = iou(p, g)
            total += v
            if v > threshold:
                tp += 1
        if total > best_sum + 1e-12:
            best_sum, best_tp = total, tp
    return best_tp


def test_iou_oracle():
    pts = _qmc_points()
    rng = np.random.default_rng(88)
    max_err = 0.0
    for _ in range(1000):
        a, b = _sample_box_pair(rng)
        lo = np.minimum(a.bounds()[:3], b.bounds()[:3])
        hi = np.maximum(a.bounds()[3:], b.bounds()[3:])
        p = lo + pts * (hi - lo)

        def inside(box):
            bb = np.array(box.bounds())
            return np.all((p >= bb[:3]) & (p <= bb[3:]), axis=1)

        both = np.count_nonzero(inside(a) & inside(b))
        either = np.count_nonzero(inside(a) | inside(b))
        estimate = 0.0 if both == 0 else both / either
        max_err = max(max_err, abs(iou(a, b) - estimate))

    mismatches = 0
    for _ in range(500):
        pred = [_random_eval_box(rng) for _ in range(rng.integers(0, 7))]
        gt = [_random_eval_box(rng) for _ in range(rng.integers(1, 7))]
        if len(match_planks(pred, gt)) != _brute_force_tp(pred, gt):
            mismatches += 1

    ok = max_err <= 2e-3 and mismatches == 0
    _report(
        "iou oracle",
        ok,
        f"analytic vs QMC max |err| {max_err:.2e} (<=2e-3) on 1000 pairs, "
        f"matching mismatches {mismatches}/500",
    )


def test_projection_invariants():
    config = GenConfig(max_edges=None)
    breakpoint_failures = 0
    length_failures = 0
    for i in range(1000):
        program = gen_cabinet(np.random.default_rng([4242, i]), config)
        boxes = resolve(program)
        drawing = project(boxes, program.scale_mm_per_unit)
        front, top, side = drawing.views()

        def coords(view, idx):
            vals = set()
            for e in view.edges:
                vals.add((e.x1, e.y1)[idx])
                vals.add((e.x2, e.y2)[idx])
            return vals

        if not (
            coords(front, 0) == coords(top, 0)
            and coords(top, 1) == coords(side, 0)
            and coords(front, 1) == coords(side, 1)
        ):
            breakpoint_failures += 1

        for view in drawing.views():
            raw_lines = {}
            for b in boxes:
                segs = _raw_segments(b, view.name)
                for key, lo_, hi_ in segs:
                    raw_lines.setdefault(key, []).append((lo_, hi_))
            total_raw = 0.0
            for spans in raw_lines.values():
                spans.sort()
                cursor = None
                for lo_, hi_ in spans:
                    if cursor is None or lo_ > cursor[1]:
                        if cursor:
                            total_raw += cursor[1] - cursor[0]
                        cursor = [lo_, hi_]
                    else:
                        cursor[1] = max(cursor[1], hi_)
                if cursor:
                    total_raw += cursor[1] - cursor[0]
            total_out = sum(e.length() for e in view.edges)
            if abs(total_raw - total_out) > 1e-9:
                length_failures += 1
    ok = breakpoint_failures == 0 and length_failures == 0
    _report(
        "projection invariants",
        ok,
        f"breakpoint mismatches {breakpoint_failures}/1000, "
        f"length conservation failures {length_failures}/3000 view checks",
    )


def _raw_segments(box, view_name):
    from plankforge.projection import _VIEW_AXES

    u_axis, v_axis, depth_axis, _ = _VIEW_AXES[view_name]
    lo = box.bounds()[:3]
    hi = box.bounds()[3:]
    out = []
    for axis in range(3):
        if axis == depth_axis:
            continue
        o1, o2 = [a for a in range(3) if a != axis]
        for c1 in (lo[o1], hi[o1]):
            for c2 in (lo[o2], hi[o2]):
                fixed = {o1: c1, o2: c2}
                if axis == u_axis:
                    out.append((("h", fixed[v_axis]), lo[axis], hi[axis]))
                else:
                    out.append((("v", fixed[u_axis]), lo[axis], hi[axis]))
    return out


def test_cabinet_fixture_bit_exact():
    program = parse_program(CABINET_TEXT)
    assert validate(program) == []
    boxes = resolve(program)
    assert boxes[2] == Box(-0.34, -0.23, -0.70, 0.34, 0.23, -0.69)
    drawing = project(boxes, program.scale_mm_per_unit)
    assert count_edges(drawing) > 0
    decoded = decode_output(encode_output(program), program.scale_mm_per_unit)
    target = quantize_program(canonical_order(program))
    ok = structurally_equal(decoded, target, tol=0.0) and sorted(
        b.bounds() for b in resolve(decoded)
    ) == sorted(b.bounds() for b in resolve(target))
    _report(
        "cabinet fixture",
        ok,
        "parse -> resolve -> project -> encode -> decode reproduces the program "
        "bit-exactly at quantized precision (canonical plank order)",
    )
