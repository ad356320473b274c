"""Rugby match model: role-driven players, ball phases, collision events.

Fifteen a side. Each team's first `attackers_per_team` ids are attackers
(styles alternating team-oriented / selfish by attacker rank), the rest
defenders. Team A attacks toward x = length, team B toward x = 0. The
behavioral rules themselves are compiled once in ``_kernels`` and shared
with the fast match loop; the functions here are the typed single-phase
wrappers: they pack a WorldState into arrays, run one kernel, and unpack.

Collisions are contact events between opposing players: distance at most
contact_distance, position at the pair midpoint, severity the magnitude of
the relative velocity, rate-limited per pair by pair_cooldown.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as K
from .geometry import Vec2
from .params import ModelParams, RugbyParams
from .rng import RngHandle
from .state import (
    Ball,
    BallState,
    CollisionEvent,
    Player,
    Role,
    Style,
    Team,
    WorldState,
    clip_window_for,
)


@dataclass(frozen=True)
class CollisionRule:
    contact_distance: float = 1.0
    pair_cooldown: int = 10

    def __post_init__(self) -> None:
        if self.contact_distance <= 0:
            raise ValueError("contact_distance must be positive")
        if self.pair_cooldown < 0:
            raise ValueError("pair_cooldown must be >= 0")


def build_players(params: RugbyParams) -> list[Player]:
    """Both rosters with ids 0..2*team_size-1; positions start at origin
    and are only meaningful after a kickoff."""
    players = []
    for team in (Team.A, Team.B):
        base = int(team) * params.team_size
        for j in range(params.team_size):
            if j < params.attackers_per_team:
                role = Role.ATTACKER
                style = Style.TEAM_ORIENTED if j % 2 == 0 else Style.SELFISH
            else:
                role = Role.DEFENDER
                style = Style.TEAM_ORIENTED
            players.append(
                Player(
                    id=base + j,
                    team=team,
                    role=role,
                    style=style,
                    pos=Vec2(0.0, 0.0),
                    max_speed=params.max_speed,
                )
            )
    return players


# ---------------------------------------------------------------------------
# world <-> array bridging
# ---------------------------------------------------------------------------


def _sorted_players(world: WorldState) -> list[Player]:
    return sorted(world.players, key=lambda p: p.id)


def _pack_players(players: list[Player]):
    n = len(players)
    ppos = np.empty((n, 2))
    pvel = np.empty((n, 2))
    pteam = np.empty(n, np.int64)
    prole = np.empty(n, np.int64)
    pstyle = np.empty(n, np.int64)
    for i, p in enumerate(players):
        ppos[i, 0], ppos[i, 1] = p.pos
        pvel[i, 0], pvel[i, 1] = p.vel
        pteam[i] = int(p.team)
        prole[i] = int(p.role)
        pstyle[i] = int(p.style)
    return ppos, pvel, pteam, prole, pstyle


def _pack_ball(ball: Ball, players: list[Player]):
    index_of = {p.id: i for i, p in enumerate(players)}
    bpos = np.array([ball.pos.x, ball.pos.y], np.float64)
    bvel = np.array([ball.vel.x, ball.vel.y], np.float64)
    bint = np.array(
        [
            int(ball.state),
            index_of.get(ball.holder, -1) if ball.holder is not None else -1,
            index_of.get(ball.receiver, -1) if ball.receiver is not None else -1,
        ],
        np.int64,
    )
    ft = ball.flight_target if ball.flight_target is not None else ball.pos
    bflt = np.array([ft.x, ft.y], np.float64)
    return bpos, bvel, bint, bflt


def _unpack_players(players: list[Player], ppos, pvel) -> list[Player]:
    return [
        replace(
            p,
            pos=Vec2(float(ppos[i, 0]), float(ppos[i, 1])),
            vel=Vec2(float(pvel[i, 0]), float(pvel[i, 1])),
        )
        for i, p in enumerate(players)
    ]


def _unpack_ball(players: list[Player], bpos, bvel, bint, bflt) -> Ball:
    holder = int(bint[1])
    receiver = int(bint[2])
    return Ball(
        pos=Vec2(float(bpos[0]), float(bpos[1])),
        holder=players[holder].id if holder >= 0 else None,
        vel=Vec2(float(bvel[0]), float(bvel[1])),
        state=BallState(int(bint[0])),
        receiver=players[receiver].id if receiver >= 0 else None,
        flight_target=Vec2(float(bflt[0]), float(bflt[1])),
    )


def _kp(world: WorldState, model: ModelParams | None) -> K.KernelParams:
    return K.kernel_params(model if model is not None else ModelParams(),
                           field=world.field)


# ---------------------------------------------------------------------------
# match-phase operations
# ---------------------------------------------------------------------------


def kickoff(
    world: WorldState,
    rng: RngHandle,
    possession: Team = Team.A,
    model: ModelParams | None = None,
) -> WorldState:
    """Restart formation with the ball held by the possession team's
    lowest-id attacker. Consumes two jitter draws per player."""
    players = _sorted_players(world)
    ppos, pvel, pteam, prole, pstyle = _pack_players(players)
    bpos, bvel, bint, bflt = _pack_ball(world.ball, players)
    states = np.array([rng.state], np.uint64)
    K._kickoff(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt,
               int(possession), _kp(world, model), states)
    rng.state = int(states[0])
    new_players = _unpack_players(players, ppos, pvel)
    return replace(
        world,
        players=new_players,
        ball=_unpack_ball(new_players, bpos, bvel, bint, bflt),
    )


def step_players(
    world: WorldState, rng: RngHandle, model: ModelParams | None = None
) -> WorldState:
    """Advance every player one tick of role-driven movement."""
    players = _sorted_players(world)
    if not players:
        return replace(world, players=[])
    ppos, pvel, pteam, prole, pstyle = _pack_players(players)
    bpos, bvel, bint, bflt = _pack_ball(world.ball, players)
    states = np.array([rng.state], np.uint64)
    K._step_players(ppos, pvel, pteam, prole, pstyle, bpos, bflt, bint,
                    _kp(world, model), states)
    rng.state = int(states[0])
    return replace(world, players=_unpack_players(players, ppos, pvel))


def step_ball(
    world: WorldState, rng: RngHandle, model: ModelParams | None = None
) -> WorldState:
    """Advance the ball one tick; a score resets play to a kickoff held by
    the conceding team."""
    players = _sorted_players(world)
    ppos, pvel, pteam, prole, pstyle = _pack_players(players)
    bpos, bvel, bint, bflt = _pack_ball(world.ball, players)
    states = np.array([rng.state], np.uint64)
    kp = _kp(world, model)
    scored = K._step_ball(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt,
                          kp, states)
    if scored >= 0:
        K._kickoff(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt,
                   1 - int(scored), kp, states)
    rng.state = int(states[0])
    new_players = _unpack_players(players, ppos, pvel)
    return replace(
        world,
        players=new_players,
        ball=_unpack_ball(new_players, bpos, bvel, bint, bflt),
    )


def detect_collisions(
    world: WorldState,
    rule: CollisionRule = CollisionRule(),
    cooldowns: dict[tuple[int, int], int] | None = None,
) -> list[CollisionEvent]:
    """This tick's collision events, ids numbered from 0 in scan order.

    The cooldown map (ordered id pair -> last event tick) is read and
    updated in place so callers can carry it across ticks.
    """
    players = _sorted_players(world)
    n = len(players)
    if n == 0:
        return []
    ppos, pvel, pteam, prole, pstyle = _pack_players(players)
    cool = np.full((n, n), K.NEVER, np.int64)
    if cooldowns:
        index_of = {p.id: i for i, p in enumerate(players)}
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
    model = ModelParams()
    kp = K.kernel_params(
        replace(
            model,
            rugby=replace(
                model.rugby,
                contact_distance=rule.contact_distance,
                pair_cooldown=rule.pair_cooldown,
            ),
        ),
        field=world.field,
    )
    tick = world.clock.tick
    n_ev = K._detect_collisions(ppos, pvel, pteam, tick, cool, ev_i, ev_f, 0, kp)
    events = []
    for e in range(n_ev):
        lo = players[int(ev_i[e, 1])].id
        hi = players[int(ev_i[e, 2])].id
        events.append(
            CollisionEvent(
                event_id=e,
                tick=tick,
                pos=Vec2(float(ev_f[e, 0]), float(ev_f[e, 1])),
                players=(lo, hi),
                severity=float(ev_f[e, 2]),
                clip_window=clip_window_for(tick, world.clock.max_ticks),
            )
        )
        if cooldowns is not None:
            cooldowns[(lo, hi)] = tick
    return events
