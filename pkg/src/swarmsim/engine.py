"""Deterministic tick engine and the compiled whole-match fast path.

The frozen per-tick phase order is: players step, ball steps (scores reset
to kickoff), collisions are detected (a tackled holder loses the ball),
drone targets are computed from the post-move world, drones move, and
observers are assigned to this tick's events; then the clock increments.
`advance_tick` runs exactly one such tick on a WorldState; `run_match`
runs a whole match through the same compiled kernels without leaving
machine code, so the two paths produce identical logs draw for draw.

The engine treats the swarm as homogeneous (speed and detection radius
from ModelParams); the standalone kinematics and observation helpers
honor per-drone attributes for ad-hoc use.

Randomness is a bundle of independent SplitMix64 streams per run: one for
the match model, one per drone (waypoint draws), plus a channel stream
consumed outside the engine. Drone streams are matched to drones in
ascending-id order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as K
from .drones import StrategySpec, strategy_id, _sorted_drones
from .errors import ConfigError, TickOverflowError
from .geometry import Vec2
from .params import ModelParams
from .rng import RngHandle, drone_stream, rugby_stream
from .rugby import _pack_ball, _pack_players, _sorted_players, _unpack_ball, _unpack_players, build_players
from .state import (
    Ball,
    BallState,
    CollisionEvent,
    Drone,
    SimClock,
    WorldState,
    clip_window_for,
)


@dataclass
class RngBundle:
    """Independent streams for one run: the match stream plus one per drone."""

    rugby: RngHandle
    drones: tuple[RngHandle, ...] = ()

    @classmethod
    def for_run(cls, run_seed: int, n_drones: int) -> "RngBundle":
        return cls(
            rugby=rugby_stream(run_seed),
            drones=tuple(drone_stream(run_seed, i) for i in range(n_drones)),
        )


def _as_bundle(rng) -> RngBundle:
    if isinstance(rng, RngBundle):
        return rng
    if isinstance(rng, RngHandle):
        return RngBundle(rugby=rng)
    raise TypeError(f"expected RngHandle or RngBundle, got {type(rng).__name__}")


def new_match_world(
    model: ModelParams,
    n_drones: int,
    rng,
    ticks: int = 1800,
) -> WorldState:
    """Kickoff-ready world: full rosters in restart formation (team A in
    possession) and all drones parked at the ground station."""
    from .rugby import kickoff

    bundle = _as_bundle(rng)
    players = build_players(model.rugby)
    gcs = model.gcs_pos()
    drones = [
        Drone(
            id=i,
            pos=gcs,
            speed=model.drone.speed,
            detect_radius=model.drone.detect_radius,
            target=gcs,
            target_tick=K.NEVER,
        )
        for i in range(n_drones)
    ]
    world = WorldState(
        clock=SimClock(0, ticks),
        players=players,
        ball=Ball(pos=Vec2(model.field.length / 2.0, model.field.width / 2.0)),
        drones=drones,
        field=model.field,
    )
    return kickoff(world, bundle.rugby, model=model)


def advance_tick(
    world: WorldState,
    rng,
    *,
    strategy: str = "follow_ball",
    model: ModelParams | None = None,
    cooldowns: dict[tuple[int, int], int] | None = None,
    event_id_start: int = 0,
) -> tuple[WorldState, list[CollisionEvent]]:
    """One tick of the fixed phase order; returns the successor world and
    this tick's collision events with observers already assigned.

    The cooldown map (ordered player-id pair -> last event tick) is
    updated in place when given; without one, every contact pair is
    treated as cold.
    """
    if world.clock.tick >= world.clock.max_ticks:
        raise TickOverflowError(
            f"tick {world.clock.tick} is already at max_ticks {world.clock.max_ticks}"
        )
    bundle = _as_bundle(rng)
    model = model if model is not None else ModelParams()
    mode = strategy_id(strategy)
    spec = StrategySpec.from_model(model, strategy)

    players = _sorted_players(world)
    drones = _sorted_drones(world)
    n = len(players)
    nd = len(drones)
    if mode == K.MODE_RANDOM and nd > len(bundle.drones):
        raise ConfigError(
            f"random strategy needs one rng stream per drone; got "
            f"{len(bundle.drones)} for {nd} drones"
        )

    ppos, pvel, pteam, prole, pstyle = _pack_players(players)
    bpos, bvel, bint, bflt = _pack_ball(world.ball, players)
    dpos = np.empty((nd, 2))
    dtar = np.empty((nd, 2))
    dtick = np.empty(nd, np.int64)
    for i, d in enumerate(drones):
        dpos[i, 0], dpos[i, 1] = d.pos
        dtar[i, 0], dtar[i, 1] = d.target
        dtick[i] = d.target_tick
    states = np.zeros(1 + nd, np.uint64)
    states[0] = bundle.rugby.state
    for i in range(min(nd, len(bundle.drones))):
        states[1 + i] = bundle.drones[i].state

    kp = K.kernel_params(model, field=world.field)
    tick = world.clock.tick
    index_of = {p.id: i for i, p in enumerate(players)}
    cool = np.full((n, n), K.NEVER, np.int64)
    if cooldowns:
        for (a, b), last in cooldowns.items():
            ia = index_of.get(a)
            ib = index_of.get(b)
            if ia is None or ib is None:
                continue
            lo, hi = (ia, ib) if ia < ib else (ib, ia)
            cool[lo, hi] = last
    n_a = int(np.sum(pteam == 0))
    cap = max(1, n_a * (n - n_a))
    ev_i = np.empty((cap, 3), np.int64)
    ev_f = np.empty((cap, 3))
    obs = np.zeros((cap, nd), np.bool_)
    det_t = np.zeros(tick + 1, np.int64)
    tot_t = np.zeros(tick + 1, np.int64)
    hot = np.array([[h.x, h.y] for h in spec.hotspots], np.float64).reshape(
        len(spec.hotspots), 2
    )
    tg = np.empty((nd, 2))

    if n > 0:
        K._step_players(ppos, pvel, pteam, prole, pstyle, bpos, bflt, bint,
                        kp, states)
    scored = K._step_ball(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt, kp, states)
    if scored >= 0:
        K._kickoff(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt,
                   1 - int(scored), kp, states)
    n_ev = K._detect_collisions(ppos, pvel, pteam, tick, cool, ev_i, ev_f, 0, kp)
    K._apply_knock_on(ev_i, 0, n_ev, bpos, bvel, bint, kp, states)
    if nd > 0:
        K._drone_targets(mode, tick, dpos, dtar, dtick, ppos, pvel, pteam,
                         bpos, kp, hot, states, tg)
        K._move_drones(dpos, tg, kp)
    K._observe(ev_f, 0, n_ev, dpos, obs, det_t, tot_t, tick, kp)

    bundle.rugby.state = int(states[0])
    for i in range(min(nd, len(bundle.drones))):
        bundle.drones[i].state = int(states[1 + i])

    new_players = _unpack_players(players, ppos, pvel)
    new_drones = [
        replace(
            d,
            pos=Vec2(float(dpos[i, 0]), float(dpos[i, 1])),
            target=Vec2(float(tg[i, 0]), float(tg[i, 1])),
            target_tick=int(dtick[i]),
        )
        for i, d in enumerate(drones)
    ]
    events = []
    for e in range(n_ev):
        lo = players[int(ev_i[e, 1])].id
        hi = players[int(ev_i[e, 2])].id
        observers = tuple(drones[j].id for j in range(nd) if obs[e, j])
        events.append(
            CollisionEvent(
                event_id=event_id_start + e,
                tick=tick,
                pos=Vec2(float(ev_f[e, 0]), float(ev_f[e, 1])),
                players=(lo, hi),
                severity=float(ev_f[e, 2]),
                observers=observers,
                clip_window=clip_window_for(tick, world.clock.max_ticks),
            )
        )
        if cooldowns is not None:
            cooldowns[(lo, hi)] = tick
    new_world = replace(
        world,
        clock=SimClock(tick + 1, world.clock.max_ticks),
        players=new_players,
        ball=_unpack_ball(new_players, bpos, bvel, bint, bflt),
        drones=new_drones,
    )
    return new_world, events


@dataclass
class MatchResult:
    """Everything one match produces: the event log with observers, the
    per-tick detection ledger, and optionally the drone trajectory."""

    strategy: str
    n_drones: int
    seed: int
    ticks: int
    events: list[CollisionEvent]
    detect_per_tick: np.ndarray
    total_per_tick: np.ndarray
    drone_traj: np.ndarray | None = None

    def drones_at(self, tick: int, model: ModelParams) -> list[Drone]:
        """Swarm snapshot (post-move) at a tick of a trajectory-recording run."""
        if self.drone_traj is None:
            raise ValueError("run was not recorded with record_traj=True")
        return [
            Drone(
                id=i,
                pos=Vec2(float(self.drone_traj[tick, i, 0]),
                         float(self.drone_traj[tick, i, 1])),
                speed=model.drone.speed,
                detect_radius=model.drone.detect_radius,
            )
            for i in range(self.n_drones)
        ]


def run_match(
    model: ModelParams,
    strategy: str,
    n_drones: int,
    seed: int,
    ticks: int = 1800,
    record_traj: bool = False,
) -> MatchResult:
    """One complete deterministic match, entirely inside compiled kernels.

    Identical (model, strategy, n_drones, seed, ticks) give an identical
    event log; the object-level advance_tick path reproduces it draw for
    draw because both run the same kernels in the same order.
    """
    if n_drones < 0:
        raise ConfigError(f"n_drones must be >= 0, got {n_drones}")
    if ticks < 1:
        raise ConfigError(f"ticks must be >= 1, got {ticks}")
    mode = strategy_id(strategy)
    spec = StrategySpec.from_model(model, strategy)
    players = build_players(model.rugby)
    ppos, pvel, pteam, prole, pstyle = _pack_players(players)
    n = len(players)
    bpos = np.array([model.field.length / 2.0, model.field.width / 2.0], np.float64)
    bvel = np.zeros(2)
    bint = np.array([int(BallState.LOOSE), -1, -1], np.int64)
    bflt = bpos.copy()
    gcs = model.gcs_pos()
    dpos = np.tile(np.array([gcs.x, gcs.y], np.float64), (n_drones, 1))
    dtar = dpos.copy()
    dtick = np.full(n_drones, K.NEVER, np.int64)
    cool = np.full((n, n), K.NEVER, np.int64)
    n_a = int(np.sum(pteam == 0))
    per_pair = ticks // max(1, model.rugby.pair_cooldown) + 1
    cap = max(1, n_a * (n - n_a) * per_pair)
    ev_i = np.empty((cap, 3), np.int64)
    ev_f = np.empty((cap, 3))
    obs = np.zeros((cap, n_drones), np.bool_)
    det_t = np.zeros(ticks, np.int64)
    tot_t = np.zeros(ticks, np.int64)
    hot = np.array([[h.x, h.y] for h in spec.hotspots], np.float64).reshape(
        len(spec.hotspots), 2
    )
    bundle = RngBundle.for_run(seed, n_drones)
    states = np.zeros(1 + n_drones, np.uint64)
    states[0] = bundle.rugby.state
    for i in range(n_drones):
        states[1 + i] = bundle.drones[i].state
    kp = K.kernel_params(model)
    K._kickoff(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt, 0, kp, states)
    traj = np.zeros((ticks, n_drones, 2)) if record_traj else np.zeros((0, 0, 2))
    n_ev = K._run_ticks(
        mode, 0, ticks, 0, ppos, pvel, pteam, prole, pstyle,
        bpos, bvel, bint, bflt, dpos, dtar, dtick, cool,
        ev_i, ev_f, obs, det_t, tot_t, kp, hot, states, traj, record_traj,
    )
    events = []
    for e in range(n_ev):
        tick = int(ev_i[e, 0])
        observers = tuple(int(j) for j in range(n_drones) if obs[e, j])
        events.append(
            CollisionEvent(
                event_id=e,
                tick=tick,
                pos=Vec2(float(ev_f[e, 0]), float(ev_f[e, 1])),
                players=(int(ev_i[e, 1]), int(ev_i[e, 2])),
                severity=float(ev_f[e, 2]),
                observers=observers,
                clip_window=clip_window_for(tick, ticks),
            )
        )
    return MatchResult(
        strategy=strategy,
        n_drones=n_drones,
        seed=seed,
        ticks=ticks,
        events=events,
        detect_per_tick=det_t,
        total_per_tick=tot_t,
        drone_traj=traj if record_traj else None,
    )
