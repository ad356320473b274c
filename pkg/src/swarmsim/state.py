"""Simulation state: agents, ball, clock, events, and the world snapshot."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import IntEnum
from typing import Optional

from .geometry import FieldSpec, Vec2


class Team(IntEnum):
    A = 0
    B = 1

    @property
    def opponent(self) -> "Team":
        return Team(1 - self.value)


class Role(IntEnum):
    ATTACKER = 0
    DEFENDER = 1


class Style(IntEnum):
    TEAM_ORIENTED = 0
    SELFISH = 1


class BallState(IntEnum):
    HELD = 0
    IN_FLIGHT = 1
    LOOSE = 2


@dataclass
class Player:
    id: int
    team: Team
    role: Role
    style: Style
    pos: Vec2
    vel: Vec2 = Vec2(0.0, 0.0)
    max_speed: float = 1.0


@dataclass
class Ball:
    pos: Vec2
    holder: Optional[int] = None
    vel: Vec2 = Vec2(0.0, 0.0)
    state: BallState = BallState.LOOSE
    # In-flight bookkeeping: who the pass is for and where it lands.
    receiver: Optional[int] = None
    flight_target: Optional[Vec2] = None


@dataclass
class Drone:
    """A swarm member; pos is the ground projection of its fixed-altitude hover."""

    id: int
    pos: Vec2
    speed: float = 10.0
    detect_radius: float = 5.0
    target: Vec2 = Vec2(0.0, 0.0)
    # Tick at which the current target was adopted (random-mode waypoint age).
    target_tick: int = -(10**9)


@dataclass
class SimClock:
    tick: int = 0
    max_ticks: int = 1800

    def __post_init__(self) -> None:
        if self.max_ticks <= 0:
            raise ValueError(f"max_ticks must be positive, got {self.max_ticks}")
        if not 0 <= self.tick <= self.max_ticks:
            raise ValueError(f"tick {self.tick} outside [0, {self.max_ticks}]")


@dataclass
class CollisionEvent:
    """One ground-truth collision between opposing players."""

    event_id: int
    tick: int
    pos: Vec2
    players: tuple[int, int]
    severity: float
    observers: tuple[int, ...] = ()
    clip_window: tuple[int, int] = (0, 0)


CLIP_HALF_WIDTH = 50  # ticks either side of the event; 10 s of footage at 0.1 s/tick


def clip_window_for(tick: int, max_ticks: int) -> tuple[int, int]:
    """Footage window around an event, clamped to valid tick indices."""
    return (max(0, tick - CLIP_HALF_WIDTH), min(max_ticks - 1, tick + CLIP_HALF_WIDTH))


@dataclass
class WorldState:
    clock: SimClock
    players: list[Player]
    ball: Ball
    drones: list[Drone]
    field: FieldSpec = dc_field(default_factory=FieldSpec)
