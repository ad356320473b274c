"""Geometric observation and the detection statistics built on it.

A drone observes a collision when its ground distance to the event at the
event's tick is at most its detection radius, boundary inclusive. Because
events and positions are exact here, false positives cannot occur, so
"detection accuracy" is a recall: detected events over all events.

Aggregations: per-event observer-count breakdowns, coverage curves
averaged over repetitions, and the single-view-vs-multi-view gap
statistics between those curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .geometry import distance
from .state import CollisionEvent, Drone


@dataclass(frozen=True)
class DetectionLedger:
    """Per-tick detected and total event counts over one run."""

    detect: tuple[int, ...]
    total: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.detect) != len(self.total):
            raise ValueError("detect and total must have equal length")
        for d, t in zip(self.detect, self.total):
            if not 0 <= d <= t:
                raise ValueError(f"need 0 <= detect <= total, got {d} > {t}")

    @property
    def horizon(self) -> int:
        return len(self.total)

    @classmethod
    def from_arrays(cls, detect, total) -> "DetectionLedger":
        return cls(tuple(int(v) for v in detect), tuple(int(v) for v in total))


@dataclass(frozen=True)
class MultiViewBreakdown:
    """Percentages of all collisions by observer count; sums to 100."""

    pct_exactly_1: float
    pct_exactly_2: float
    pct_exactly_3: float
    pct_more_than_3: float
    pct_missed: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (
            self.pct_exactly_1,
            self.pct_exactly_2,
            self.pct_exactly_3,
            self.pct_more_than_3,
            self.pct_missed,
        )


@dataclass(frozen=True)
class CoverageCurvePoint:
    n_drones: int
    mean_seen_ge1: float
    mean_seen_ge2: float
    mean_total: float

    @property
    def diff(self) -> float:
        """Mean collisions observed but without the multi-view property."""
        return self.mean_seen_ge1 - self.mean_seen_ge2


@dataclass(frozen=True)
class GapStatistics:
    """Single-view vs multi-view curve comparison over drone counts."""

    mean_difference_pct: float
    max_positive_difference: float
    max_positive_at: int
    max_negative_difference: float
    max_negative_at: int


@dataclass(frozen=True)
class RunCounts:
    """Observer-count tallies for one run's event log (counts, not %)."""

    total: int
    seen_ge1: int
    seen_ge2: int
    exactly1: int
    exactly2: int
    exactly3: int
    more_than_3: int
    missed: int

    @classmethod
    def from_events(cls, events: Sequence[CollisionEvent]) -> "RunCounts":
        buckets = [0, 0, 0, 0, 0]  # 0, 1, 2, 3, >3 observers
        for ev in events:
            k = len(ev.observers)
            buckets[min(k, 4)] += 1
        total = len(events)
        return cls(
            total=total,
            seen_ge1=total - buckets[0],
            seen_ge2=buckets[2] + buckets[3] + buckets[4],
            exactly1=buckets[1],
            exactly2=buckets[2],
            exactly3=buckets[3],
            more_than_3=buckets[4],
            missed=buckets[0],
        )


def observers_of(event: CollisionEvent, drones: Iterable[Drone]) -> tuple[int, ...]:
    """Ids of all drones within detection radius of the event, ascending.

    Boundary inclusive: distance exactly equal to the radius counts.
    Positions must be the drones' positions at the event's tick.
    """
    return tuple(
        sorted(
            d.id for d in drones if distance(d.pos, event.pos) <= d.detect_radius
        )
    )


def detection_accuracy(ledger: DetectionLedger) -> Optional[float]:
    """Detected over total events across the horizon.

    Returns None (the no-collisions sentinel) when no events occurred at
    all — never 0 or 1, which would fake a measurement.
    """
    total = sum(ledger.total)
    if total == 0:
        return None
    return sum(ledger.detect) / total


def multiview_breakdown(
    events: Sequence[CollisionEvent],
) -> Optional[MultiViewBreakdown]:
    """Bucket events by observer count into percentages of all events;
    None for an empty log (the no-collisions sentinel)."""
    if not events:
        return None
    c = RunCounts.from_events(events)
    scale = 100.0 / c.total
    return MultiViewBreakdown(
        pct_exactly_1=c.exactly1 * scale,
        pct_exactly_2=c.exactly2 * scale,
        pct_exactly_3=c.exactly3 * scale,
        pct_more_than_3=c.more_than_3 * scale,
        pct_missed=c.missed * scale,
    )


def coverage_curves(
    per_rep_counts: Mapping[int, Sequence[tuple[float, float, float]]],
) -> list[CoverageCurvePoint]:
    """Mean (seen_ge1, seen_ge2, total) per drone count, ascending count.

    Input maps each drone count to its per-repetition count triples; the
    mean is arithmetic over repetitions. The diff curve ge1 - ge2 is a
    derived property of each returned point.
    """
    curve = []
    for n in sorted(per_rep_counts):
        reps = per_rep_counts[n]
        if not reps:
            raise ValueError(f"drone count {n} has no repetitions")
        m = len(reps)
        curve.append(
            CoverageCurvePoint(
                n_drones=n,
                mean_seen_ge1=math.fsum(r[0] for r in reps) / m,
                mean_seen_ge2=math.fsum(r[1] for r in reps) / m,
                mean_total=math.fsum(r[2] for r in reps) / m,
            )
        )
    return curve


def gap_statistics(curve: Sequence[CoverageCurvePoint]) -> GapStatistics:
    """Compare the single-view and multi-view curves point by point.

    D(x) = mean_seen_ge1(x) - mean_seen_ge2(x). The mean difference is
    100 * sum D / sum mean_seen_ge1; the extrema report their drone-count
    argument, ties resolved toward the lower count.
    """
    if not curve:
        raise ValueError("gap_statistics needs a nonempty curve")
    ge1_sum = math.fsum(p.mean_seen_ge1 for p in curve)
    if ge1_sum == 0.0:
        raise ValueError("mean_seen_ge1 is zero everywhere; gap undefined")
    pts = sorted(curve, key=lambda p: p.n_drones)
    d_sum = math.fsum(p.diff for p in pts)
    max_pos = max_neg = pts[0].diff
    max_pos_at = max_neg_at = pts[0].n_drones
    for p in pts[1:]:
        if p.diff > max_pos:
            max_pos = p.diff
            max_pos_at = p.n_drones
        if p.diff < max_neg:
            max_neg = p.diff
            max_neg_at = p.n_drones
    return GapStatistics(
        mean_difference_pct=100.0 * d_sum / ge1_sum,
        max_positive_difference=max_pos,
        max_positive_at=max_pos_at,
        max_negative_difference=max_neg,
        max_negative_at=max_neg_at,
    )


def unpaired_gap_statistics(
    single_curve: Sequence[CoverageCurvePoint],
    multi_curve: Sequence[CoverageCurvePoint],
) -> GapStatistics:
    """Gap statistics with the two curves taken from independent run sets.

    Paired curves (same runs) satisfy D(x) >= 0 by the subset law; with
    independent runs, sampling noise can push D(x) below zero near
    saturation, which is exactly what this mode exists to expose. Both
    curves must cover the same drone counts.
    """
    by_n = {p.n_drones: p for p in multi_curve}
    if sorted(by_n) != sorted(p.n_drones for p in single_curve):
        raise ValueError("curves cover different drone counts")
    merged = [
        CoverageCurvePoint(
            n_drones=p.n_drones,
            mean_seen_ge1=p.mean_seen_ge1,
            mean_seen_ge2=by_n[p.n_drones].mean_seen_ge2,
            mean_total=p.mean_total,
        )
        for p in single_curve
    ]
    return gap_statistics(merged)
