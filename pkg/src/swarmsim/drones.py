"""The six self-organising drone positioning strategies.

Every strategy is a pure function of the world snapshot, the strategy
parameters, and (for the random mode only) each drone's own draw stream —
drones never read each other's decisions, only observable positions. The
heavy lifting is done by the compiled kernels in ``_kernels``; this module
is the typed, object-level face used by tests and by the engine's
single-tick path.

Target lists are indexed by ascending drone id, and every documented
tie-break (lower id, lower cluster index) follows that ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConfigError
from .geometry import FieldSpec, Vec2, clamp_to_field
from .params import ModelParams, StrategyParams
from .rng import RngHandle
from .state import Drone, Player, WorldState

# Canonical mode order; the index doubles as the strategy id fed to
# derive_run_seed, so this tuple is part of the determinism contract.
STRATEGIES = (
    "fixed",
    "follow_ball",
    "repulsive",
    "follow_players",
    "density",
    "random",
)


def strategy_id(mode: str) -> int:
    try:
        return STRATEGIES.index(mode)
    except ValueError:
        raise ConfigError(
            f"unknown strategy {mode!r}; expected one of {', '.join(STRATEGIES)}"
        ) from None


@dataclass(frozen=True)
class StrategySpec:
    """Parameters for one positioning mode."""

    mode: str
    orbit_radius: float = 5.0
    separation_distance: float = 4.0
    risk_radius: float = 3.0
    retarget_period: int = 50
    players_per_cluster: int = 5
    hotspots: tuple[Vec2, ...] = ()

    def __post_init__(self) -> None:
        strategy_id(self.mode)
        if self.orbit_radius <= 0:
            raise ConfigError("orbit_radius must be positive")
        if self.separation_distance <= 0:
            raise ConfigError("separation_distance must be positive")

    @classmethod
    def from_model(cls, model, mode: str) -> "StrategySpec":
        s = model.strategy
        return cls(
            mode=mode,
            orbit_radius=s.orbit_radius,
            separation_distance=s.separation_distance,
            risk_radius=s.risk_radius,
            retarget_period=s.retarget_period,
            players_per_cluster=s.players_per_cluster,
            hotspots=model.hotspots(),
        )


@dataclass(frozen=True)
class ClusterAssignment:
    centroids: tuple[Vec2, ...]
    sizes: tuple[int, ...]
    drone_allocation: tuple[int, ...] = ()


# ---------------------------------------------------------------------------
# array bridging
# ---------------------------------------------------------------------------


def _sorted_players(world: WorldState) -> list[Player]:
    return sorted(world.players, key=lambda p: p.id)


def _sorted_drones(world: WorldState) -> list[Drone]:
    return sorted(world.drones, key=lambda d: d.id)


def _player_arrays(players: list[Player]):
    n = len(players)
    ppos = np.empty((n, 2))
    pvel = np.empty((n, 2))
    pteam = np.empty(n, np.int64)
    for i, p in enumerate(players):
        ppos[i, 0], ppos[i, 1] = p.pos
        pvel[i, 0], pvel[i, 1] = p.vel
        pteam[i] = int(p.team)
    return ppos, pvel, pteam


def _kp_for_targets(spec: StrategySpec, field: FieldSpec):
    """Kernel parameter tuple carrying only what target computation reads."""
    model = ModelParams(
        strategy=StrategyParams(
            orbit_radius=spec.orbit_radius,
            separation_distance=spec.separation_distance,
            risk_radius=spec.risk_radius,
            retarget_period=spec.retarget_period,
            players_per_cluster=spec.players_per_cluster,
        )
    )
    return K.kernel_params(model, field=field)


def _targets_arrays(spec: StrategySpec, world: WorldState, rng, mode: int):
    """Run the target kernel; returns (targets, waypoints, waypoint_ticks).

    The waypoint arrays only change in random mode, where each drone's
    stream (rng.drones, by ascending-id position) supplies the draws; the
    consumed state is written back into the handles.
    """
    drones = _sorted_drones(world)
    n = len(drones)
    if n == 0:
        return [], np.empty((0, 2)), np.empty(0, np.int64)
    players = _sorted_players(world)
    ppos, pvel, pteam = _player_arrays(players)
    dpos = np.empty((n, 2))
    dtar = np.empty((n, 2))
    dtick = np.empty(n, np.int64)
    for i, d in enumerate(drones):
        dpos[i, 0], dpos[i, 1] = d.pos
        dtar[i, 0], dtar[i, 1] = d.target
        dtick[i] = d.target_tick
    bpos = np.array([world.ball.pos.x, world.ball.pos.y], np.float64)
    hot = np.array([[h.x, h.y] for h in spec.hotspots], np.float64).reshape(
        len(spec.hotspots), 2
    )
    states = np.zeros(1 + n, np.uint64)
    handles: tuple[RngHandle, ...] = ()
    if mode == K.MODE_RANDOM:
        handles = getattr(rng, "drones", ())
        if len(handles) < n:
            raise ConfigError(
                "random strategy needs one rng stream per drone; got "
                f"{len(handles)} for {n} drones"
            )
        for i in range(n):
            states[1 + i] = handles[i].state
    tg = np.empty((n, 2))
    kp = _kp_for_targets(spec, world.field)
    K._drone_targets(
        mode, world.clock.tick, dpos, dtar, dtick, ppos, pvel, pteam,
        bpos, kp, hot, states, tg,
    )
    if mode == K.MODE_RANDOM:
        for i in range(n):
            handles[i].state = int(states[1 + i])
    targets = [Vec2(float(tg[i, 0]), float(tg[i, 1])) for i in range(n)]
    return targets, dtar, dtick


def _targets(spec: StrategySpec, world: WorldState, rng, mode: int) -> list[Vec2]:
    targets, _, _ = _targets_arrays(spec, world, rng, mode)
    return targets


# ---------------------------------------------------------------------------
# strategy operations
# ---------------------------------------------------------------------------


def compute_targets(spec: StrategySpec, world: WorldState, rng=None) -> list[Vec2]:
    """One clamped target per drone (ascending id) under spec.mode."""
    return _targets(spec, world, rng, strategy_id(spec.mode))


def targets_fixed(spec: StrategySpec, world: WorldState) -> list[Vec2]:
    """Hotspots first, then uniform-grid cell centers for surplus drones."""
    return _targets(spec, world, None, K.MODE_FIXED)


def targets_follow_ball(spec: StrategySpec, world: WorldState) -> list[Vec2]:
    """Evenly spaced orbit slots around the ball at orbit_radius."""
    return _targets(spec, world, None, K.MODE_FOLLOW_BALL)


def targets_repulsive(spec: StrategySpec, world: WorldState) -> list[Vec2]:
    """Follow-ball slots plus pairwise separation pushes between drones."""
    return _targets(spec, world, None, K.MODE_REPULSIVE)


def targets_follow_players(spec: StrategySpec, world: WorldState) -> list[Vec2]:
    """Greedy nearest-drone coverage of the riskiest players, follow-ball
    slots for everyone left over (or everyone, when no player is risky)."""
    return _targets(spec, world, None, K.MODE_FOLLOW_PLAYERS)


def targets_density(spec: StrategySpec, world: WorldState, rng=None) -> list[Vec2]:
    """Cluster players, allocate drones by cluster size, orbit centroids."""
    return _targets(spec, world, rng, K.MODE_DENSITY)


def targets_random(spec: StrategySpec, world: WorldState, rng) -> list[Vec2]:
    """Persistent uniform waypoints with separation-respecting redraws."""
    return _targets(spec, world, rng, K.MODE_RANDOM)


def risk_score(player: Player, world: WorldState, risk_radius: float) -> float:
    """Threat score for one player: opposing players within risk_radius,
    each weighted by max(0, 1 + the opponent's velocity component toward
    this player)."""
    players = _sorted_players(world)
    idx = next((i for i, p in enumerate(players) if p.id == player.id), None)
    if idx is None:
        raise ValueError(f"player {player.id} is not part of this world")
    ppos, pvel, pteam = _player_arrays(players)
    out = np.empty(len(players))
    K._risk_scores(ppos, pvel, pteam, float(risk_radius), out)
    return float(out[idx])


def cluster_players(positions: list[Vec2], k: int, rng=None) -> ClusterAssignment:
    """Deterministic Lloyd's k-means over player positions.

    Centroids start at the first k positions (callers pass positions in
    ascending player-id order), run at most 10 iterations with exact
    fixpoint stopping, and assignment ties go to the lower centroid index.
    The rng argument is accepted for signature stability but never drawn
    from — initialization is deterministic by contract.
    """
    if not positions:
        raise ValueError("cluster_players needs at least one position")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k = min(k, len(positions))
    pts = np.array([[p.x, p.y] for p in positions], np.float64)
    cent = np.empty((k, 2))
    assign = np.empty(len(positions), np.int64)
    sizes = K._kmeans(pts, k, cent, assign)
    return ClusterAssignment(
        centroids=tuple(Vec2(float(cent[c, 0]), float(cent[c, 1])) for c in range(k)),
        sizes=tuple(int(s) for s in sizes),
    )


def allocate_drones(cluster_sizes: list[int], n_drones: int) -> list[int]:
    """Largest-remainder split of n_drones proportional to cluster sizes;
    remainder ties go to the lower cluster index."""
    if not cluster_sizes:
        raise ValueError("cluster_sizes must be nonempty")
    if any(s < 0 for s in cluster_sizes):
        raise ValueError("cluster sizes must be nonnegative")
    if sum(cluster_sizes) == 0:
        raise ValueError("cluster sizes must not all be zero")
    if n_drones < 0:
        raise ValueError(f"n_drones must be >= 0, got {n_drones}")
    sizes = np.array(cluster_sizes, np.int64)
    out = np.empty(len(cluster_sizes), np.int64)
    K._allocate(sizes, n_drones, out)
    return [int(v) for v in out]


def move_drones(
    drones: list[Drone], targets: list[Vec2], field: FieldSpec = FieldSpec()
) -> list[Drone]:
    """Step each drone min(speed, distance) straight at its target.

    Straight-line Python so per-drone speeds are honored; the compiled
    match loop applies the identical rule with the model's uniform speed,
    and a property test holds the two paths together.
    """
    if len(drones) != len(targets):
        raise ValueError(
            f"got {len(drones)} drones but {len(targets)} targets"
        )
    moved = []
    for d, t in zip(drones, targets):
        delta = t - d.pos
        dist = delta.norm()
        if dist > 1e-12:
            step = min(d.speed, dist)
            new_pos = d.pos + delta.scaled(step / dist)
        else:
            new_pos = d.pos
        moved.append(
            Drone(
                id=d.id,
                pos=clamp_to_field(new_pos, field),
                speed=d.speed,
                detect_radius=d.detect_radius,
                target=t,
                target_tick=d.target_tick,
            )
        )
    return moved
