"""Snap-and-split machinery for axis-aligned segment arrangements.

Every 2D segment in a view is horizontal or vertical. A segment is written
as (orient, c, lo, hi): orient "h" means the segment varies in u at fixed
v=c, orient "v" varies in v at fixed u=c. Coordinates are snapped to
cluster representatives before any arrangement work so that all later
comparisons are exact float equality.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right, insort
from collections import defaultdict
from typing import Hashable, Iterable, Sequence

SNAP_TOL = 1e-9


def snap_values(values: Iterable[float], tol: float = SNAP_TOL) -> dict[float, float]:
    """Cluster values within tol of a cluster anchor; map each to the anchor.

    Anchors are the smallest value of each cluster, which keeps the mapping
    deterministic and prevents chained drift.
    """
    out: dict[float, float] = {}
    anchor = None
    for v in sorted(set(values)):
        if anchor is None or v - anchor > tol:
            anchor = v
        out[v] = anchor
    return out


class IntervalSet:
    """Union of closed 1D intervals with exact endpoint arithmetic."""

    def __init__(self) -> None:
        self._ivs: list[tuple[float, float]] = []

    def add(self, lo: float, hi: float) -> None:
        if hi <= lo:
            return
        merged: list[tuple[float, float]] = []
        for a, b in self._ivs:
            if b < lo or a > hi:
                merged.append((a, b))
            else:
                lo = min(lo, a)
                hi = max(hi, b)
        insort(merged, (lo, hi))
        self._ivs = merged

    def intervals(self) -> list[tuple[float, float]]:
        return list(self._ivs)

    def covers(self, lo: float, hi: float, eps: float = 0.0) -> bool:
        """True when [lo, hi] is inside the union, up to eps slack."""
        for a, b in self._ivs:
            if a - eps <= lo and hi <= b + eps:
                return True
        return hi - lo <= 0

    def covers_point(self, x: float, eps: float = 0.0) -> bool:
        return any(a - eps <= x <= b + eps for a, b in self._ivs)

    def gaps_within(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Subintervals of [lo, hi] not covered by the set."""
        gaps = []
        cursor = lo
        for a, b in self._ivs:
            if b <= cursor:
                continue
            if a >= hi:
                break
            if a > cursor:
                gaps.append((cursor, min(a, hi)))
            cursor = max(cursor, b)
            if cursor >= hi:
                break
        if cursor < hi:
            gaps.append((cursor, hi))
        return gaps

    def total_length(self) -> float:
        return sum(b - a for a, b in self._ivs)


Segment = tuple[str, float, float, float, Hashable]  # orient, c, lo, hi, payload


def split_segments(
    segments: Sequence[Segment],
) -> dict[tuple[str, float, float, float], list[Hashable]]:
    """Split segments at every pairwise intersection and endpoint incidence.

    Returns atomic pieces keyed by geometry, each with the payloads of all
    contributing input segments (coincident segments collapse to one key).
    Inputs must already be snapped; zero-length segments are ignored.
    """
    perp = {"h": "v", "v": "h"}
    by_line: dict[tuple[str, float], list[tuple[float, float, Hashable]]] = defaultdict(list)
    for orient, c, lo, hi, payload in segments:
        if hi <= lo:
            continue
        by_line[(orient, c)].append((lo, hi, payload))

    # Break coordinates per line: collinear endpoints plus perpendicular
    # segments whose span reaches the line (crossings and T-junctions).
    cross_positions: dict[str, list[tuple[float, float, float]]] = {"h": [], "v": []}
    for (orient, c), items in by_line.items():
        for lo, hi, _ in items:
            cross_positions[orient].append((c, lo, hi))

    atoms: dict[tuple[str, float, float, float], list[Hashable]] = defaultdict(list)
    for (orient, c), items in by_line.items():
        cuts: set[float] = set()
        for lo, hi, _ in items:
            cuts.add(lo)
            cuts.add(hi)
        for pc, plo, phi in cross_positions[perp[orient]]:
            if plo <= c <= phi:
                cuts.add(pc)
        ordered = sorted(cuts)
        for lo, hi, payload in items:
            i = bisect_left(ordered, lo)
            j = bisect_right(ordered, hi)
            pts = ordered[i:j]
            for a, b in zip(pts, pts[1:]):
                atoms[(orient, c, a, b)].append(payload)
    return dict(atoms)


def merge_adjacent(
    pieces: Iterable[tuple[str, float, float, float, Hashable]],
) -> list[tuple[str, float, float, float, Hashable]]:
    """Merge collinear touching pieces that share the same payload."""
    by_line: dict[tuple[str, float, Hashable], list[tuple[float, float]]] = defaultdict(list)
    for orient, c, lo, hi, payload in pieces:
        by_line[(orient, c, payload)].append((lo, hi))
    out = []
    for (orient, c, payload), spans in by_line.items():
        spans.sort()
        cur_lo, cur_hi = spans[0]
        for lo, hi in spans[1:]:
            if lo <= cur_hi:
                cur_hi = max(cur_hi, hi)
            else:
                out.append((orient, c, cur_lo, cur_hi, payload))
                cur_lo, cur_hi = lo, hi
        out.append((orient, c, cur_lo, cur_hi, payload))
    return out
