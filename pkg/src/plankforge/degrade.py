"""Drawing corruption: random edge deletion/perturbation and visible-only
variants. Outputs are deliberately not re-normalized; inconsistent
drawings are the point of the exercise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .projection import DrawingSet, Edge2D, ViewDrawing


@dataclass(frozen=True)
class NoiseConfig:
    ratio: float
    delete_prob: float = 0.5
    max_shift_frac: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.ratio <= 1.0):
            raise ValueError("ratio must be in [0, 1]")
        if not (0.0 <= self.delete_prob <= 1.0):
            raise ValueError("delete_prob must be in [0, 1]")
        if self.max_shift_frac < 0.0:
            raise ValueError("max_shift_frac must be >= 0")


def inject_noise(d: DrawingSet, config: NoiseConfig) -> DrawingSet:
    """Corrupt ceil(ratio * N) edges chosen without replacement across all
    views: each is deleted with delete_prob, otherwise both endpoints shift
    independently along the edge direction by up to max_shift_frac of its
    length. Deterministic in the seed; edges that collapse are deleted."""
    rng = np.random.default_rng(config.seed)
    flat: list[tuple[int, int]] = []  # (view index, edge index)
    views = d.views()
    for vi, view in enumerate(views):
        flat.extend((vi, ei) for ei in range(len(view.edges)))
    n_affected = math.ceil(config.ratio * len(flat))
    selected_idx = sorted(rng.choice(len(flat), size=n_affected, replace=False)) if n_affected else []
    selected = {flat[i] for i in selected_idx}

    new_views = []
    for vi, view in enumerate(views):
        kept: list[Edge2D] = []
        for ei, edge in enumerate(view.edges):
            if (vi, ei) not in selected:
                kept.append(edge)
                continue
            if rng.random() < config.delete_prob:
                continue
            dx, dy = edge.x2 - edge.x1, edge.y2 - edge.y1
            length = math.hypot(dx, dy)
            ux, uy = dx / length, dy / length
            bound = config.max_shift_frac * length
            s1, s2 = rng.uniform(-bound, bound, size=2)
            if length + s2 - s1 <= 0.0:  # endpoints collapsed or crossed
                continue
            kept.append(
                Edge2D.make(
                    (edge.x1 + s1 * ux, edge.y1 + s1 * uy),
                    (edge.x2 + s2 * ux, edge.y2 + s2 * uy),
                    edge.visible,
                )
            )
        new_views.append(ViewDrawing(name=view.name, edges=tuple(kept)))
    return d.replace_views(new_views)


def strip_hidden(d: DrawingSet) -> DrawingSet:
    """Keep only the visible edges of every view."""
    views = [
        ViewDrawing(name=v.name, edges=tuple(e for e in v.edges if e.visible))
        for v in d.views()
    ]
    return d.replace_views(views)
