"""Compiled array core shared by the object API and the fast match loop.

Everything that runs once per tick lives here as numba kernels over flat
arrays, so the same machine code backs both `engine.advance_tick` (object
world in, object world out) and `engine.run_match` (whole match in one
call). There is deliberately no second implementation of any rule.

Array conventions
-----------------
players   ppos (N,2) f8, pvel (N,2) f8, pteam/prole/pstyle (N,) i8
ball      bpos (2,) f8, bvel (2,) f8, bflt (2,) f8 flight target,
          bint (3,) i8 = [state, holder, receiver] with -1 for "none"
drones    dpos (n,2) f8, dtar (n,2) f8 waypoints, dtick (n,) i8 waypoint age
events    ev_i (cap,3) i8 = [tick, lo_id, hi_id]; ev_f (cap,3) f8 = [x,y,sev]
          obs (cap,n) bool observer matrix
rng       states (1+n,) u64; index 0 is the match stream, 1+i drone i's

RNG contract (must match rng.RngHandle draw for draw): a stream advances
state by the 64-bit golden-ratio constant, finalizes with the SplitMix64
mixer, and maps to [lo,hi) via the top 53 bits. Draw order per tick is
frozen: one jitter draw per player ascending id, one pass draw while the
ball is held, one knock-on draw when a collision strips the holder, and
two kickoff draws per player ascending id on every restart.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numba import njit

MODE_FIXED = 0
MODE_FOLLOW_BALL = 1
MODE_REPULSIVE = 2
MODE_FOLLOW_PLAYERS = 3
MODE_DENSITY = 4
MODE_RANDOM = 5

GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53
_TWO_PI = 6.283185307179586

NEVER = -(10**9)  # sentinel tick for "no previous event / no waypoint yet"


class KernelParams(NamedTuple):
    """Flat numeric view of ModelParams consumed by the kernels.

    Plain namedtuple so numba can type it; integers stay integers (tick
    comparisons), everything else is float64.
    """

    length: float
    width: float
    max_speed: float
    pass_speed: float
    pressure_radius: float
    catch_radius: float
    p_pass: float
    pass_min: float
    pass_range: float
    contact_distance: float
    pair_cooldown: int
    direction_jitter: float
    support_back: float
    lane_gap: float
    marking_standoff: float
    tackle_chasers: int
    body_spacing: float
    attacker_depth: float
    defender_depth: float
    kickoff_jitter: float
    loose_decay: float
    knock_speed: float
    chase_lead: float
    orbit_radius: float
    separation_distance: float
    risk_radius: float
    retarget_period: int
    players_per_cluster: int
    drone_speed: float
    detect_radius: float


def kernel_params(model, field=None) -> KernelParams:
    """Build the kernel parameter tuple, optionally overriding the field
    extents with a specific world's FieldSpec."""
    f = field if field is not None else model.field
    r = model.rugby
    s = model.strategy
    d = model.drone
    return KernelParams(
        length=float(f.length),
        width=float(f.width),
        max_speed=float(r.max_speed),
        pass_speed=float(r.pass_speed),
        pressure_radius=float(r.pressure_radius),
        catch_radius=float(r.catch_radius),
        p_pass=float(r.p_pass),
        pass_min=float(r.pass_min),
        pass_range=float(r.pass_range),
        contact_distance=float(r.contact_distance),
        pair_cooldown=int(r.pair_cooldown),
        direction_jitter=float(r.direction_jitter),
        support_back=float(r.support_back),
        lane_gap=float(r.lane_gap),
        marking_standoff=float(r.marking_standoff),
        tackle_chasers=int(r.tackle_chasers),
        body_spacing=float(r.body_spacing),
        attacker_depth=float(r.attacker_depth),
        defender_depth=float(r.defender_depth),
        kickoff_jitter=float(r.kickoff_jitter),
        loose_decay=float(r.loose_decay),
        knock_speed=float(r.knock_speed),
        chase_lead=float(r.chase_lead),
        orbit_radius=float(s.orbit_radius),
        separation_distance=float(s.separation_distance),
        risk_radius=float(s.risk_radius),
        retarget_period=int(s.retarget_period),
        players_per_cluster=int(s.players_per_cluster),
        drone_speed=float(d.speed),
        detect_radius=float(d.detect_radius),
    )


@njit(cache=True)
def _mix64(z):
    z ^= z >> _S30
    z *= _M1
    z ^= z >> _S27
    z *= _M2
    z ^= z >> _S31
    return z


@njit(cache=True)
def _next_u64(states, k):
    states[k] = states[k] + GOLD
    return _mix64(states[k])


@njit(cache=True)
def _unif(states, k, lo, hi):
    u = _next_u64(states, k) >> _S11
    return lo + (hi - lo) * (np.float64(u) * _INV53)


# ---------------------------------------------------------------------------
# match model
# ---------------------------------------------------------------------------


@njit(cache=True)
def _kickoff(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt, possession, kp, states):
    """Reset both teams to their restart lines and hand the ball over.

    Attackers and defenders form evenly spaced lines at their team's side
    of halfway, jittered by two uniform draws per player (ascending id).
    The ball goes to the possession attacker closest to the field's long
    axis (ties to the lower id), so play restarts near the middle.
    """
    n = ppos.shape[0]
    mid = kp.length * 0.5
    for i in range(n):
        team = pteam[i]
        sgn = 1.0 if team == 0 else -1.0
        rank = 0
        cnt = 0
        for j in range(n):
            if pteam[j] == team and prole[j] == prole[i]:
                if j < i:
                    rank += 1
                cnt += 1
        if prole[i] == 0:
            x = mid - sgn * kp.attacker_depth
        else:
            x = mid - sgn * kp.defender_depth
        y = kp.width * (rank + 1.0) / (cnt + 1.0)
        x += _unif(states, 0, -kp.kickoff_jitter, kp.kickoff_jitter)
        y += _unif(states, 0, -kp.kickoff_jitter, kp.kickoff_jitter)
        ppos[i, 0] = min(max(x, 0.0), kp.length)
        ppos[i, 1] = min(max(y, 0.0), kp.width)
        pvel[i, 0] = 0.0
        pvel[i, 1] = 0.0
    holder = -1
    bd = 1e300
    for i in range(n):
        if pteam[i] == possession and prole[i] == 0:
            d = abs(ppos[i, 1] - kp.width * 0.5)
            if d < bd:
                bd = d
                holder = i
    if holder < 0:
        for i in range(n):
            if pteam[i] == possession:
                holder = i
                break
    if holder >= 0:
        bint[0] = 0
        bint[1] = holder
        bint[2] = -1
        bpos[0] = ppos[holder, 0]
        bpos[1] = ppos[holder, 1]
    else:
        bint[0] = 2
        bint[1] = -1
        bint[2] = -1
        bpos[0] = mid
        bpos[1] = kp.width * 0.5
    bvel[0] = 0.0
    bvel[1] = 0.0
    bflt[0] = bpos[0]
    bflt[1] = bpos[1]


@njit(cache=True)
def _mark_nearest(flags, ppos, pteam, team, x, y, k, exclude):
    """Flag the k nearest players of `team` to (x,y); ties go to lower id."""
    for _ in range(k):
        best = -1
        bd = 1e300
        for i in range(ppos.shape[0]):
            if pteam[i] != team or i == exclude or flags[i]:
                continue
            dx = ppos[i, 0] - x
            dy = ppos[i, 1] - y
            d = dx * dx + dy * dy
            if d < bd:
                bd = d
                best = i
        if best < 0:
            return
        flags[best] = True


@njit(cache=True)
def _role_rank(i, pteam, prole):
    """Index of player i among same-team same-role players, by ascending id."""
    rank = 0
    for j in range(i):
        if pteam[j] == pteam[i] and prole[j] == prole[i]:
            rank += 1
    return rank


@njit(cache=True)
def _role_count(team, role, pteam, prole):
    cnt = 0
    for j in range(pteam.shape[0]):
        if pteam[j] == team and prole[j] == role:
            cnt += 1
    return cnt


@njit(cache=True)
def _step_players(ppos, pvel, pteam, prole, pstyle, bpos, bflt, bint, kp,
                  states):
    """Advance every player one tick from a frozen start-of-tick snapshot.

    Role logic: the holder runs at the try line, swerving off the nearest
    presser; team-oriented attackers hold support lanes behind the holder
    while selfish ones crowd the ball; possession-side defenders sweep deep.
    Against the ball, the nearest `tackle_chasers` players pursue the
    holder with a velocity lead, remaining defenders man-mark opposing
    attackers goal-side, and remaining attackers form a flat wall ahead of
    the holder. A loose or flying ball draws the nearest two players per
    team; everyone else holds. After moving, overlapping bodies are pushed
    apart pairwise and positions are clamped to the field.
    """
    n = ppos.shape[0]
    if n == 0:
        return
    jit = np.empty(n)
    for i in range(n):
        jit[i] = _unif(states, 0, -kp.direction_jitter, kp.direction_jitter)

    ppos0 = ppos.copy()
    pvel0 = pvel.copy()
    bstate = bint[0]
    holder = bint[1]
    receiver = bint[2]
    ball_team = -1
    if bstate == 0 and holder >= 0:
        ball_team = pteam[holder]

    chase = np.zeros(n, np.bool_)
    if bstate == 0 and holder >= 0:
        opp = 1 - ball_team
        _mark_nearest(
            chase, ppos0, pteam, opp, ppos0[holder, 0], ppos0[holder, 1],
            kp.tackle_chasers, holder,
        )
    else:
        for team in range(2):
            _mark_nearest(
                chase, ppos0, pteam, team, bpos[0], bpos[1],
                kp.tackle_chasers, receiver,
            )

    # greedy unique man-marking: each non-chasing defender of the defending
    # team claims its nearest unclaimed opposing attacker (ascending
    # defender id); once all are claimed, fall back to nearest-any.
    mark_of = np.full(n, -1, np.int64)
    if bstate == 0 and holder >= 0:
        claimed = np.zeros(n, np.bool_)
        for i in range(n):
            if pteam[i] == ball_team or prole[i] != 1 or chase[i]:
                continue
            best = -1
            bd = 1e300
            for j in range(n):
                if pteam[j] != ball_team or prole[j] != 0 or claimed[j]:
                    continue
                dx = ppos0[j, 0] - ppos0[i, 0]
                dy = ppos0[j, 1] - ppos0[i, 1]
                d = dx * dx + dy * dy
                if d < bd:
                    bd = d
                    best = j
            if best < 0:
                for j in range(n):
                    if pteam[j] != ball_team or prole[j] != 0:
                        continue
                    dx = ppos0[j, 0] - ppos0[i, 0]
                    dy = ppos0[j, 1] - ppos0[i, 1]
                    d = dx * dx + dy * dy
                    if d < bd:
                        bd = d
                        best = j
            else:
                claimed[best] = True
            mark_of[i] = best

    for i in range(n):
        team = pteam[i]
        sgn = 1.0 if team == 0 else -1.0
        dirx = 0.0
        diry = 0.0
        step = 0.0
        if bstate == 0 and holder >= 0 and i == holder:
            # straight at the try line, bent away from the nearest presser
            ex = 0.0
            ey = 0.0
            bd = 1e300
            bj = -1
            for j in range(n):
                if pteam[j] == team:
                    continue
                dx = ppos0[i, 0] - ppos0[j, 0]
                dy = ppos0[i, 1] - ppos0[j, 1]
                d = dx * dx + dy * dy
                if d < bd:
                    bd = d
                    bj = j
            if bj >= 0:
                d = np.sqrt(bd)
                if d < kp.pressure_radius and d > 1e-12:
                    w = 1.0 - d / kp.pressure_radius
                    ex = w * (ppos0[i, 0] - ppos0[bj, 0]) / d
                    ey = w * (ppos0[i, 1] - ppos0[bj, 1]) / d
            dirx = sgn + ex
            diry = ey
            norm = np.sqrt(dirx * dirx + diry * diry)
            if norm > 1e-12:
                dirx /= norm
                diry /= norm
            step = kp.max_speed
        else:
            tx = ppos0[i, 0]
            ty = ppos0[i, 1]
            if bstate == 0 and holder >= 0:
                hx = ppos0[holder, 0]
                hy = ppos0[holder, 1]
                if team == ball_team:
                    if prole[i] == 0:
                        if pstyle[i] == 1:
                            tx = bpos[0]
                            ty = bpos[1]
                        else:
                            rank = _role_rank(i, pteam, prole)
                            cnt = _role_count(team, 0, pteam, prole)
                            tx = hx - sgn * kp.support_back
                            ty = hy + (rank - (cnt - 1) * 0.5) * kp.lane_gap
                    else:
                        rank = _role_rank(i, pteam, prole)
                        cnt = _role_count(team, 1, pteam, prole)
                        tx = hx - sgn * kp.defender_depth * 0.5
                        ty = kp.width * (rank + 1.0) / (cnt + 1.0)
                else:
                    if chase[i]:
                        tx = hx + pvel0[holder, 0] * kp.chase_lead
                        ty = hy + pvel0[holder, 1] * kp.chase_lead
                    elif prole[i] == 1:
                        m = mark_of[i]
                        if m >= 0:
                            # goal-side: stand in the attacker's path
                            tx = ppos0[m, 0] - sgn * kp.marking_standoff
                            ty = ppos0[m, 1]
                    else:
                        rank = _role_rank(i, pteam, prole)
                        cnt = _role_count(team, 0, pteam, prole)
                        tx = hx - sgn * kp.support_back
                        ty = hy + (rank - (cnt - 1) * 0.5) * kp.lane_gap
            else:
                if bstate == 1 and i == receiver:
                    tx = bflt[0]
                    ty = bflt[1]
                elif chase[i]:
                    tx = bpos[0]
                    ty = bpos[1]
            dx = tx - ppos0[i, 0]
            dy = ty - ppos0[i, 1]
            dist = np.sqrt(dx * dx + dy * dy)
            if dist > 1e-12:
                dirx = dx / dist
                diry = dy / dist
                step = min(kp.max_speed, dist)
        c = np.cos(jit[i])
        s = np.sin(jit[i])
        rx = c * dirx - s * diry
        ry = s * dirx + c * diry
        pvel[i, 0] = rx * step
        pvel[i, 1] = ry * step
        ppos[i, 0] = ppos0[i, 0] + pvel[i, 0]
        ppos[i, 1] = ppos0[i, 1] + pvel[i, 1]

    # soft body separation: sequential pass over ascending pairs
    for i in range(n):
        for j in range(i + 1, n):
            dx = ppos[j, 0] - ppos[i, 0]
            dy = ppos[j, 1] - ppos[i, 1]
            d = np.sqrt(dx * dx + dy * dy)
            if d < kp.body_spacing:
                if d > 1e-12:
                    ux = dx / d
                    uy = dy / d
                else:
                    ux = 1.0
                    uy = 0.0
                push = 0.5 * (kp.body_spacing - d)
                ppos[i, 0] -= ux * push
                ppos[i, 1] -= uy * push
                ppos[j, 0] += ux * push
                ppos[j, 1] += uy * push
    for i in range(n):
        ppos[i, 0] = min(max(ppos[i, 0], 0.0), kp.length)
        ppos[i, 1] = min(max(ppos[i, 1], 0.0), kp.width)


@njit(cache=True)
def _step_ball(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt, kp, states):
    """Advance the ball one tick; returns the scoring team or -1.

    Held: ride the holder, then one pass draw — under pressure the holder
    offloads to the most advanced teammate inside the pass band. In
    flight: fly at the frozen landing point, caught by the receiver inside
    catch_radius, else drop loose on landing. Loose: drift with decaying
    velocity until the nearest player inside catch_radius (tie: lower id)
    picks it up.
    """
    n = ppos.shape[0]
    st = bint[0]
    holder = bint[1]
    receiver = bint[2]
    if st == 0 and holder >= 0:
        bpos[0] = ppos[holder, 0]
        bpos[1] = ppos[holder, 1]
        bvel[0] = 0.0
        bvel[1] = 0.0
        team = pteam[holder]
        if (team == 0 and bpos[0] >= kp.length - 1e-9) or (
            team == 1 and bpos[0] <= 1e-9
        ):
            return team
        u = _unif(states, 0, 0.0, 1.0)
        if u < kp.p_pass:
            pressed = False
            pr2 = kp.pressure_radius * kp.pressure_radius
            for j in range(n):
                if pteam[j] != team:
                    dx = ppos[j, 0] - bpos[0]
                    dy = ppos[j, 1] - bpos[1]
                    if dx * dx + dy * dy <= pr2:
                        pressed = True
                        break
            if pressed:
                sgn = 1.0 if team == 0 else -1.0
                best = -1
                bestprog = -1e300
                for j in range(n):
                    if j == holder or pteam[j] != team:
                        continue
                    dx = ppos[j, 0] - bpos[0]
                    dy = ppos[j, 1] - bpos[1]
                    d = np.sqrt(dx * dx + dy * dy)
                    if d < kp.pass_min or d > kp.pass_range:
                        continue
                    prog = sgn * ppos[j, 0]
                    if prog > bestprog:
                        bestprog = prog
                        best = j
                if best >= 0:
                    bflt[0] = ppos[best, 0]
                    bflt[1] = ppos[best, 1]
                    dx = bflt[0] - bpos[0]
                    dy = bflt[1] - bpos[1]
                    dd = np.sqrt(dx * dx + dy * dy)
                    bint[0] = 1
                    bint[1] = -1
                    bint[2] = best
                    bvel[0] = kp.pass_speed * dx / dd
                    bvel[1] = kp.pass_speed * dy / dd
        return -1
    if st == 1:
        dx = bflt[0] - bpos[0]
        dy = bflt[1] - bpos[1]
        rem = np.sqrt(dx * dx + dy * dy)
        landed = rem <= kp.pass_speed
        if landed:
            bpos[0] = bflt[0]
            bpos[1] = bflt[1]
        else:
            bpos[0] += bvel[0]
            bpos[1] += bvel[1]
        if receiver >= 0:
            dx = ppos[receiver, 0] - bpos[0]
            dy = ppos[receiver, 1] - bpos[1]
            if dx * dx + dy * dy <= kp.catch_radius * kp.catch_radius:
                bint[0] = 0
                bint[1] = receiver
                bint[2] = -1
                bpos[0] = ppos[receiver, 0]
                bpos[1] = ppos[receiver, 1]
                bvel[0] = 0.0
                bvel[1] = 0.0
                return -1
        if landed:
            bint[0] = 2
            bint[1] = -1
            bint[2] = -1
            bvel[0] = 0.0
            bvel[1] = 0.0
        return -1
    bvel[0] *= kp.loose_decay
    bvel[1] *= kp.loose_decay
    bpos[0] = min(max(bpos[0] + bvel[0], 0.0), kp.length)
    bpos[1] = min(max(bpos[1] + bvel[1], 0.0), kp.width)
    best = -1
    bd = 1e300
    cr2 = kp.catch_radius * kp.catch_radius
    for j in range(n):
        dx = ppos[j, 0] - bpos[0]
        dy = ppos[j, 1] - bpos[1]
        d = dx * dx + dy * dy
        if d <= cr2 and d < bd:
            bd = d
            best = j
    if best >= 0:
        bint[0] = 0
        bint[1] = best
        bint[2] = -1
        bpos[0] = ppos[best, 0]
        bpos[1] = ppos[best, 1]
        bvel[0] = 0.0
        bvel[1] = 0.0
    return -1


@njit(cache=True)
def _detect_collisions(ppos, pvel, pteam, tick, cool, ev_i, ev_f, n_ev, kp):
    """Append this tick's collision events; returns the new event count.

    Scans ascending unordered pairs; an opposing pair in contact emits an
    event at its midpoint with severity |relative velocity| unless its
    last event is fewer than pair_cooldown ticks old.
    """
    n = ppos.shape[0]
    cd2 = kp.contact_distance * kp.contact_distance
    m = n_ev
    for i in range(n):
        for j in range(i + 1, n):
            if pteam[i] == pteam[j]:
                continue
            dx = ppos[j, 0] - ppos[i, 0]
            dy = ppos[j, 1] - ppos[i, 1]
            if dx * dx + dy * dy > cd2:
                continue
            if tick - cool[i, j] < kp.pair_cooldown:
                continue
            cool[i, j] = tick
            rvx = pvel[i, 0] - pvel[j, 0]
            rvy = pvel[i, 1] - pvel[j, 1]
            ev_i[m, 0] = tick
            ev_i[m, 1] = i
            ev_i[m, 2] = j
            ev_f[m, 0] = 0.5 * (ppos[i, 0] + ppos[j, 0])
            ev_f[m, 1] = 0.5 * (ppos[i, 1] + ppos[j, 1])
            ev_f[m, 2] = np.sqrt(rvx * rvx + rvy * rvy)
            m += 1
    return m


@njit(cache=True)
def _apply_knock_on(ev_i, n0, n1, bpos, bvel, bint, kp, states):
    """Strip the ball from a tackled holder.

    If any event in [n0,n1) involves the current holder, the ball comes
    loose at the holder's position with one knock-direction draw.
    """
    if bint[0] != 0 or bint[1] < 0:
        return
    holder = bint[1]
    for e in range(n0, n1):
        if ev_i[e, 1] == holder or ev_i[e, 2] == holder:
            ang = _unif(states, 0, 0.0, _TWO_PI)
            bint[0] = 2
            bint[1] = -1
            bint[2] = -1
            bvel[0] = kp.knock_speed * np.cos(ang)
            bvel[1] = kp.knock_speed * np.sin(ang)
            return


# ---------------------------------------------------------------------------
# drone strategies
# ---------------------------------------------------------------------------


@njit(cache=True)
def _orbit_slot(bx, by, i, n, radius, out):
    ang = _TWO_PI * i / n
    out[0] = bx + radius * np.cos(ang)
    out[1] = by + radius * np.sin(ang)


@njit(cache=True)
def _risk_scores(ppos, pvel, pteam, risk_radius, out):
    """Per-player threat score: opposing players inside risk_radius, each
    weighted by max(0, 1 + closing speed toward this player).

    Closing speed is the opponent's own velocity projected on the line
    from the opponent to the player — a charging opponent raises the
    score, a retreating one lowers it toward the floor. (Relative
    velocity would make the weight symmetric within every pair, so a
    contested pair could never contain exactly one at-risk player.)
    """
    n = ppos.shape[0]
    r2 = risk_radius * risk_radius
    for p in range(n):
        score = 0.0
        for q in range(n):
            if pteam[q] == pteam[p]:
                continue
            dx = ppos[p, 0] - ppos[q, 0]
            dy = ppos[p, 1] - ppos[q, 1]
            d2 = dx * dx + dy * dy
            if d2 > r2:
                continue
            d = np.sqrt(d2)
            if d > 1e-12:
                closing = (pvel[q, 0] * dx + pvel[q, 1] * dy) / d
            else:
                closing = np.sqrt(pvel[q, 0] ** 2 + pvel[q, 1] ** 2)
            w = 1.0 + closing
            if w > 0.0:
                score += w
        out[p] = score


@njit(cache=True)
def _kmeans(pts, k, cent, assign):
    """Lloyd's clustering with frozen determinism rules; returns sizes.

    Centroids start at the first k points, run exactly 10 iterations or
    stop at an exact fixpoint, assignment ties go to the lower centroid
    index, and an emptied cluster keeps its previous centroid.
    """
    npts = pts.shape[0]
    for c in range(k):
        cent[c, 0] = pts[c, 0]
        cent[c, 1] = pts[c, 1]
    newc = np.empty((k, 2))
    cnt = np.zeros(k, np.int64)
    for _ in range(10):
        for c in range(k):
            newc[c, 0] = 0.0
            newc[c, 1] = 0.0
            cnt[c] = 0
        for p in range(npts):
            bc = 0
            bd = 1e300
            for c in range(k):
                dx = pts[p, 0] - cent[c, 0]
                dy = pts[p, 1] - cent[c, 1]
                d = dx * dx + dy * dy
                if d < bd:
                    bd = d
                    bc = c
            assign[p] = bc
            newc[bc, 0] += pts[p, 0]
            newc[bc, 1] += pts[p, 1]
            cnt[bc] += 1
        same = True
        for c in range(k):
            if cnt[c] > 0:
                nx = newc[c, 0] / cnt[c]
                ny = newc[c, 1] / cnt[c]
            else:
                nx = cent[c, 0]
                ny = cent[c, 1]
            if nx != cent[c, 0] or ny != cent[c, 1]:
                same = False
            cent[c, 0] = nx
            cent[c, 1] = ny
        if same:
            break
    sizes = np.zeros(k, np.int64)
    for p in range(npts):
        bc = 0
        bd = 1e300
        for c in range(k):
            dx = pts[p, 0] - cent[c, 0]
            dy = pts[p, 1] - cent[c, 1]
            d = dx * dx + dy * dy
            if d < bd:
                bd = d
                bc = c
        assign[p] = bc
        sizes[bc] += 1
    return sizes


@njit(cache=True)
def _allocate(sizes, n_drones, out):
    """Largest-remainder split of n_drones proportional to sizes.

    Integer arithmetic throughout so remainder ties are exact; ties and
    the quota comparison both resolve toward the lower cluster index.
    """
    k = sizes.shape[0]
    tot = 0
    for c in range(k):
        tot += sizes[c]
    rem = np.empty(k, np.int64)
    given = 0
    for c in range(k):
        num = n_drones * sizes[c]
        f = num // tot
        out[c] = f
        rem[c] = num - f * tot
        given += f
    for _ in range(n_drones - given):
        bc = -1
        br = np.int64(-1)
        for c in range(k):
            if rem[c] > br:
                br = rem[c]
                bc = c
        out[bc] += 1
        rem[bc] = -1


@njit(cache=True)
def _drone_targets(mode, tick, dpos, dtar, dtick, ppos, pvel, pteam,
                   bpos, kp, hot, states, tg):
    """Fill tg with every drone's target under the given strategy mode.

    Pure over the world snapshot except for the random mode, which renews
    per-drone waypoints from each drone's own stream (states[1+i]). All
    targets are clamped to the field at the end.
    """
    n = dpos.shape[0]
    if n == 0:
        return
    npl = ppos.shape[0]
    slot = np.empty(2)
    if mode == MODE_FIXED:
        nh = hot.shape[0]
        surplus = n - nh
        if surplus > 0:
            cols = int(np.ceil(np.sqrt(surplus)))
            rows = (surplus + cols - 1) // cols
        else:
            cols = 1
            rows = 1
        for i in range(n):
            if i < nh:
                tg[i, 0] = hot[i, 0]
                tg[i, 1] = hot[i, 1]
            else:
                idx = i - nh
                r = idx // cols
                c = idx % cols
                tg[i, 0] = kp.length * (c + 0.5) / cols
                tg[i, 1] = kp.width * (r + 0.5) / rows
    elif mode == MODE_FOLLOW_BALL or mode == MODE_REPULSIVE:
        for i in range(n):
            _orbit_slot(bpos[0], bpos[1], i, n, kp.orbit_radius, slot)
            tg[i, 0] = min(max(slot[0], 0.0), kp.length)
            tg[i, 1] = min(max(slot[1], 0.0), kp.width)
        if mode == MODE_REPULSIVE:
            for i in range(n):
                px = 0.0
                py = 0.0
                for j in range(n):
                    if j == i:
                        continue
                    dx = dpos[i, 0] - dpos[j, 0]
                    dy = dpos[i, 1] - dpos[j, 1]
                    d = np.sqrt(dx * dx + dy * dy)
                    if d >= kp.separation_distance:
                        continue
                    if d > 1e-12:
                        ux = dx / d
                        uy = dy / d
                    else:
                        # coincident pair: deterministic split along x,
                        # lower id pushed toward -x
                        ux = -1.0 if i < j else 1.0
                        uy = 0.0
                    px += ux * (kp.separation_distance - d)
                    py += uy * (kp.separation_distance - d)
                tg[i, 0] += px
                tg[i, 1] += py
    elif mode == MODE_FOLLOW_PLAYERS:
        risk = np.empty(npl)
        if npl > 0:
            _risk_scores(ppos, pvel, pteam, kp.risk_radius, risk)
        used_p = np.zeros(npl, np.bool_)
        used_d = np.zeros(n, np.bool_)
        nslots = n if n < npl else npl
        for _ in range(nslots):
            bp = -1
            br = 0.0
            for p in range(npl):
                if not used_p[p] and risk[p] > br:
                    br = risk[p]
                    bp = p
            if bp < 0:
                break
            used_p[bp] = True
            bd = -1
            bdd = 1e300
            for d_ in range(n):
                if used_d[d_]:
                    continue
                dx = dpos[d_, 0] - ppos[bp, 0]
                dy = dpos[d_, 1] - ppos[bp, 1]
                d2 = dx * dx + dy * dy
                if d2 < bdd:
                    bdd = d2
                    bd = d_
            used_d[bd] = True
            tg[bd, 0] = ppos[bp, 0]
            tg[bd, 1] = ppos[bp, 1]
        for i in range(n):
            if not used_d[i]:
                _orbit_slot(bpos[0], bpos[1], i, n, kp.orbit_radius, slot)
                tg[i, 0] = slot[0]
                tg[i, 1] = slot[1]
    elif mode == MODE_DENSITY:
        if npl == 0:
            for i in range(n):
                _orbit_slot(bpos[0], bpos[1], i, n, kp.orbit_radius, slot)
                tg[i, 0] = slot[0]
                tg[i, 1] = slot[1]
        else:
            k = (npl + kp.players_per_cluster - 1) // kp.players_per_cluster
            if k > n:
                k = n
            if k < 1:
                k = 1
            if k > npl:
                k = npl
            cent = np.empty((k, 2))
            assign = np.empty(npl, np.int64)
            sizes = _kmeans(ppos, k, cent, assign)
            alloc = np.empty(k, np.int64)
            _allocate(sizes, n, alloc)
            d_ = 0
            for c in range(k):
                m = alloc[c]
                for j in range(m):
                    _orbit_slot(cent[c, 0], cent[c, 1], j, m, kp.orbit_radius, slot)
                    tg[d_, 0] = slot[0]
                    tg[d_, 1] = slot[1]
                    d_ += 1
    elif mode == MODE_RANDOM:
        sep2 = kp.separation_distance * kp.separation_distance
        for i in range(n):
            dx = dtar[i, 0] - dpos[i, 0]
            dy = dtar[i, 1] - dpos[i, 1]
            arrived = dx * dx + dy * dy <= 1.0
            if arrived or tick - dtick[i] >= kp.retarget_period:
                for attempt in range(21):
                    wx = _unif(states, 1 + i, 0.0, kp.length)
                    wy = _unif(states, 1 + i, 0.0, kp.width)
                    ok = True
                    for j in range(n):
                        if j == i:
                            continue
                        ddx = dtar[j, 0] - wx
                        ddy = dtar[j, 1] - wy
                        if ddx * ddx + ddy * ddy < sep2:
                            ok = False
                            break
                    if ok or attempt == 20:
                        dtar[i, 0] = wx
                        dtar[i, 1] = wy
                        dtick[i] = tick
                        break
            tg[i, 0] = dtar[i, 0]
            tg[i, 1] = dtar[i, 1]
    for i in range(n):
        tg[i, 0] = min(max(tg[i, 0], 0.0), kp.length)
        tg[i, 1] = min(max(tg[i, 1], 0.0), kp.width)


@njit(cache=True)
def _move_drones(dpos, tg, kp):
    n = dpos.shape[0]
    for i in range(n):
        dx = tg[i, 0] - dpos[i, 0]
        dy = tg[i, 1] - dpos[i, 1]
        d = np.sqrt(dx * dx + dy * dy)
        if d > 1e-12:
            step = min(kp.drone_speed, d)
            dpos[i, 0] += dx / d * step
            dpos[i, 1] += dy / d * step
        dpos[i, 0] = min(max(dpos[i, 0], 0.0), kp.length)
        dpos[i, 1] = min(max(dpos[i, 1], 0.0), kp.width)


@njit(cache=True)
def _observe(ev_f, n0, n1, dpos, obs, det_t, tot_t, tick, kp):
    """Assign observers to this tick's events, boundary inclusive."""
    n = dpos.shape[0]
    r2 = kp.detect_radius * kp.detect_radius
    for e in range(n0, n1):
        seen = False
        for d_ in range(n):
            dx = dpos[d_, 0] - ev_f[e, 0]
            dy = dpos[d_, 1] - ev_f[e, 1]
            if dx * dx + dy * dy <= r2:
                obs[e, d_] = True
                seen = True
        tot_t[tick] += 1
        if seen:
            det_t[tick] += 1


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


@njit(cache=True)
def _run_ticks(mode, start_tick, end_tick, n_ev, ppos, pvel, pteam, prole,
               pstyle, bpos, bvel, bint, bflt, dpos, dtar, dtick, cool,
               ev_i, ev_f, obs, det_t, tot_t, kp, hot, states,
               traj, record_traj):
    """Advance the match from start_tick to end_tick; returns event count."""
    tg = np.empty_like(dpos)
    for tick in range(start_tick, end_tick):
        _step_players(ppos, pvel, pteam, prole, pstyle, bpos, bflt, bint, kp,
                      states)
        scored = _step_ball(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt,
                            kp, states)
        if scored >= 0:
            _kickoff(ppos, pvel, pteam, prole, bpos, bvel, bint, bflt,
                     1 - scored, kp, states)
        n0 = n_ev
        n_ev = _detect_collisions(ppos, pvel, pteam, tick, cool, ev_i, ev_f,
                                  n_ev, kp)
        _apply_knock_on(ev_i, n0, n_ev, bpos, bvel, bint, kp, states)
        _drone_targets(mode, tick, dpos, dtar, dtick, ppos, pvel, pteam,
                       bpos, kp, hot, states, tg)
        _move_drones(dpos, tg, kp)
        _observe(ev_f, n0, n_ev, dpos, obs, det_t, tot_t, tick, kp)
        if record_traj:
            for i in range(dpos.shape[0]):
                traj[tick, i, 0] = dpos[i, 0]
                traj[tick, i, 1] = dpos[i, 1]
    return n_ev
