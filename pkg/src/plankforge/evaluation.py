"""Scoring predicted plank sets against ground truth.

Predictions and ground truth are matched per model with maximum-weight
bipartite matching on 3D IoU; matched pairs above the threshold are true
positives. Corpus numbers are unweighted means over models, with failed
reconstructions contributing zeros.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .boxes import Box

IOU_THRESHOLD = 0.5


def iou(a: Box, b: Box) -> float:
    inter = a.intersection_volume(b)
    if inter == 0.0:
        return 0.0
    union = a.volume() + b.volume() - inter
    return inter / union


def match_planks(
    pred: list[Box], gt: list[Box], iou_threshold: float = IOU_THRESHOLD
) -> list[tuple[int, int, float]]:
    """Maximum-IoU-sum assignment; pairs at or below the threshold are
    discarded. Returns (pred index, gt index, iou) triples."""
    if not pred or not gt:
        return []
    weights = np.array([[iou(p, g) for g in gt] for p in pred])
    rows, cols = linear_sum_assignment(weights, maximize=True)
    return [
        (int(r), int(c), float(weights[r, c]))
        for r, c in zip(rows, cols)
        if weights[r, c] > iou_threshold
    ]


@dataclass(frozen=True)
class ModelScore:
    model_id: str
    n_pred: int
    n_gt: int
    matches: tuple[tuple[int, int, float], ...]

    @property
    def tp(self) -> int:
        return len(self.matches)

    @property
    def precision(self) -> float:
        if self.n_pred == 0:
            return 1.0 if self.n_gt == 0 else 0.0
        return self.tp / self.n_pred

    @property
    def recall(self) -> float:
        if self.n_gt == 0:
            return 1.0 if self.n_pred == 0 else 0.0
        return self.tp / self.n_gt

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 0.0 if p + r == 0.0 else 2.0 * p * r / (p + r)


def prf(
    pred: list[Box],
    gt: list[Box],
    model_id: str = "",
    iou_threshold: float = IOU_THRESHOLD,
) -> ModelScore:
    matches = match_planks(pred, gt, iou_threshold)
    return ModelScore(model_id=model_id, n_pred=len(pred), n_gt=len(gt), matches=tuple(matches))


def failed_score(model_id: str, n_gt: int) -> ModelScore:
    """Zero-credit entry for a reconstruction that produced no usable output."""
    return ModelScore(model_id=model_id, n_pred=0, n_gt=max(n_gt, 1), matches=())


@dataclass(frozen=True)
class MatchReport:
    scores: tuple[ModelScore, ...]

    @property
    def precision(self) -> float:
        return float(np.mean([s.precision for s in self.scores])) if self.scores else 0.0

    @property
    def recall(self) -> float:
        return float(np.mean([s.recall for s in self.scores])) if self.scores else 0.0

    @property
    def f1(self) -> float:
        return float(np.mean([s.f1 for s in self.scores])) if self.scores else 0.0

    def to_json(self) -> str:
        doc = {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "models": [
                {
                    "id": s.model_id,
                    "n_pred": s.n_pred,
                    "n_gt": s.n_gt,
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "matches": [[r, c, v] for r, c, v in s.matches],
                }
                for s in self.scores
            ],
        }
        return json.dumps(doc, sort_keys=True)

    def table(self) -> str:
        lines = [f"{'model':<12} {'P':>7} {'R':>7} {'F1':>7}"]
        for s in self.scores:
            lines.append(
                f"{s.model_id:<12} {s.precision:7.4f} {s.recall:7.4f} {s.f1:7.4f}"
            )
        lines.append(
            f"{'mean':<12} {self.precision:7.4f} {self.recall:7.4f} {self.f1:7.4f}"
        )
        return "\n".join(lines)


def aggregate(scores: list[ModelScore]) -> MatchReport:
    return MatchReport(scores=tuple(scores))
