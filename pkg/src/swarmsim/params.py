"""The single ledger of model parameters and their defaults.

Every number the simulation depends on lives here so a sweep config can
override any of them through the dotted keys in OVERRIDE_KEYS (for example
``rugby.p_pass=0.1``). Drone detection range 5 and speed 10 follow the
source system's fixed operating point; most rugby-side values are declared
defaults chosen to yield tens of well-spread collisions per 1800-tick match.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, fields as dc_fields, replace
from typing import Callable

from .errors import ConfigError
from .fusion import ChannelParams, EnergyParams, LinkBudget
from .geometry import FieldSpec, Vec2


@dataclass(frozen=True)
class RugbyParams:
    team_size: int = 15
    attackers_per_team: int = 8
    max_speed: float = 1.0
    pass_speed: float = 4.0
    pressure_radius: float = 3.0
    catch_radius: float = 1.0
    p_pass: float = 0.05
    pass_min: float = 2.0
    pass_range: float = 15.0
    contact_distance: float = 1.0
    pair_cooldown: int = 10
    direction_jitter: float = 0.3
    support_back: float = 5.0
    lane_gap: float = 6.0
    marking_standoff: float = 1.3
    tackle_chasers: int = 2
    body_spacing: float = 1.6
    attacker_depth: float = 12.0
    defender_depth: float = 30.0
    kickoff_jitter: float = 2.0
    loose_decay: float = 0.8
    knock_speed: float = 2.0
    chase_lead: float = 3.0

    def __post_init__(self) -> None:
        if self.team_size < 1:
            raise ConfigError(f"team_size must be >= 1, got {self.team_size}")
        if not 0 < self.attackers_per_team <= self.team_size:
            raise ConfigError("attackers_per_team must be in [1, team_size]")
        if self.contact_distance <= 0:
            raise ConfigError("contact_distance must be positive")
        if self.pair_cooldown < 0:
            raise ConfigError("pair_cooldown must be >= 0")
        if not 0.0 <= self.p_pass <= 1.0:
            raise ConfigError("p_pass must be a probability")


@dataclass(frozen=True)
class DroneParams:
    speed: float = 10.0
    detect_radius: float = 5.0


@dataclass(frozen=True)
class StrategyParams:
    orbit_radius: float = 5.0
    separation_distance: float = 4.0
    risk_radius: float = 3.0
    retarget_period: int = 50
    players_per_cluster: int = 5
    hotspots: tuple[Vec2, ...] | None = None  # None: derived from the field

    def __post_init__(self) -> None:
        if self.orbit_radius <= 0:
            raise ConfigError("orbit_radius must be positive")
        if self.separation_distance <= 0:
            raise ConfigError("separation_distance must be positive")
        if self.players_per_cluster < 1:
            raise ConfigError("players_per_cluster must be >= 1")


def default_hotspots(field: FieldSpec) -> tuple[Vec2, ...]:
    """Both 22-m-line midpoints plus field center."""
    mid = field.width / 2.0
    return (
        Vec2(22.0, mid),
        Vec2(field.length - 22.0, mid),
        Vec2(field.length / 2.0, mid),
    )


@dataclass(frozen=True)
class ModelParams:
    field: FieldSpec = dc_field(default_factory=FieldSpec)
    rugby: RugbyParams = dc_field(default_factory=RugbyParams)
    drone: DroneParams = dc_field(default_factory=DroneParams)
    strategy: StrategyParams = dc_field(default_factory=StrategyParams)
    channel: ChannelParams = dc_field(default_factory=ChannelParams)
    energy: EnergyParams = dc_field(default_factory=lambda: EnergyParams(0.5, 10.0, 10.0, 1.1))
    link: LinkBudget = dc_field(default_factory=lambda: LinkBudget(120e6, 10.0, 0.5, 1.0, 0.05))
    fusion_threshold: float = 0.5
    control_channel_bits: float = 1e6

    def gcs_pos(self) -> Vec2:
        """Ground control station: midline point on the near sideline."""
        return Vec2(self.field.length / 2.0, 0.0)

    def hotspots(self) -> tuple[Vec2, ...]:
        if self.strategy.hotspots is not None:
            return self.strategy.hotspots
        return default_hotspots(self.field)

    def with_overrides(self, overrides: dict[str, str]) -> "ModelParams":
        params = self
        for key, raw in overrides.items():
            params = _apply_override(params, key, raw)
        return params


def _parse_hotspots(raw: str) -> tuple[Vec2, ...]:
    pts = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            xs, ys = chunk.split(":")
            pts.append(Vec2(float(xs), float(ys)))
        except ValueError as exc:
            raise ConfigError(f"bad hotspot {chunk!r}: expected x:y") from exc
    return tuple(pts)


_CASTERS: dict[str, Callable[[str], object]] = {}
OVERRIDE_KEYS: dict[str, tuple[str, str]] = {}

for _group, _cls in (
    ("field", FieldSpec),
    ("rugby", RugbyParams),
    ("drone", DroneParams),
    ("strategy", StrategyParams),
    ("channel", ChannelParams),
    ("energy", EnergyParams),
    ("link", LinkBudget),
):
    for _f in dc_fields(_cls):
        _key = f"{_group}.{_f.name}"
        OVERRIDE_KEYS[_key] = (_group, _f.name)
        if _f.name == "hotspots":
            _CASTERS[_key] = _parse_hotspots
        elif _f.type in ("int",):
            _CASTERS[_key] = lambda s: int(s)
        else:
            _CASTERS[_key] = lambda s: float(s)

OVERRIDE_KEYS["fusion.threshold"] = ("", "fusion_threshold")
_CASTERS["fusion.threshold"] = lambda s: float(s)
OVERRIDE_KEYS["scenario.control_bits"] = ("", "control_channel_bits")
_CASTERS["scenario.control_bits"] = lambda s: float(s)


def _apply_override(params: ModelParams, key: str, raw: str) -> ModelParams:
    if key not in OVERRIDE_KEYS:
        raise ConfigError(f"unknown parameter key {key!r}")
    group, name = OVERRIDE_KEYS[key]
    try:
        value = _CASTERS[key](raw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value {raw!r} for {key}") from exc
    if group == "":
        return replace(params, **{name: value})
    sub = getattr(params, group)
    return replace(params, **{group: replace(sub, **{name: value})})
