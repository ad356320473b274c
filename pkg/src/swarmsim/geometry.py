"""Bounded 2-D field geometry: vectors, distances, clamping.

Distances are Euclidean, in patches (1 patch is roughly 1 m on the default
pitch). The field origin sits at a corner, x along the long side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


@dataclass(frozen=True)
class FieldSpec:
    """Playing field extents and the real-time length of one tick."""

    length: float = 100.0
    width: float = 70.0
    tick_duration: float = 0.1

    def __post_init__(self) -> None:
        if self.length <= 0 or self.width <= 0:
            raise ValueError(f"field extents must be positive, got {self.length}x{self.width}")
        if self.tick_duration <= 0:
            raise ValueError(f"tick_duration must be positive, got {self.tick_duration}")

    def contains(self, p: Vec2) -> bool:
        return 0.0 <= p.x <= self.length and 0.0 <= p.y <= self.width


def distance(a: Vec2, b: Vec2) -> float:
    """Euclidean distance between two points, in patches."""
    dx = a.x - b.x
    dy = a.y - b.y
    return math.sqrt(dx * dx + dy * dy)


def clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def clamp_to_field(p: Vec2, field: FieldSpec) -> Vec2:
    """Clamp each coordinate into [0, extent]; interior points pass through."""
    return Vec2(clamp(p.x, 0.0, field.length), clamp(p.y, 0.0, field.width))
