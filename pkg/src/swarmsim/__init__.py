"""Deterministic rugby-match collision simulator with a UAV observer swarm.

The package simulates 15-a-side matches on a 100 m x 70 m field, flies a
configurable drone swarm over the play with one of six positioning
strategies, scores which player collisions each drone observes, and
aggregates multi-view detection statistics, channel-aware fusion
verdicts, and edge-vs-cloud resource budgets across seeded experiment
sweeps. Every run is a pure function of its seed.
"""

from __future__ import annotations

from .drones import (
    STRATEGIES,
    ClusterAssignment,
    StrategySpec,
    allocate_drones,
    cluster_players,
    compute_targets,
    move_drones,
    risk_score,
    strategy_id,
)
from .engine import (
    MatchResult,
    RngBundle,
    advance_tick,
    new_match_world,
    run_match,
)
from .errors import (
    ConfigError,
    DegenerateWeightsError,
    SwarmSimError,
    TickOverflowError,
)
from .fusion import (
    ChannelParams,
    ChannelSample,
    EnergyParams,
    FusionResult,
    LinkBudget,
    ScenarioRecord,
    compute_energy,
    fuse_confidence,
    link_bandwidth,
    sample_channel,
    scenario_sweep,
)
from .geometry import FieldSpec, Vec2, clamp, clamp_to_field, distance
from .harness import (
    ExperimentConfig,
    SweepRecord,
    emit_table1,
    emit_table2,
    load_config,
    load_sweep,
    parse_config,
    run_single,
    run_sweep,
    save_config,
)
from .metrics import (
    CoverageCurvePoint,
    DetectionLedger,
    GapStatistics,
    MultiViewBreakdown,
    RunCounts,
    coverage_curves,
    detection_accuracy,
    gap_statistics,
    multiview_breakdown,
    observers_of,
    unpaired_gap_statistics,
)
from .params import DroneParams, ModelParams, RugbyParams, StrategyParams
from .rng import (
    RngHandle,
    channel_stream,
    derive_run_seed,
    derive_stream,
    drone_stream,
    mix64,
    rugby_stream,
)
from .rugby import (
    CollisionRule,
    build_players,
    detect_collisions,
    kickoff,
    step_ball,
    step_players,
)
from .state import (
    Ball,
    BallState,
    CollisionEvent,
    Drone,
    Player,
    Role,
    SimClock,
    Style,
    Team,
    WorldState,
    clip_window_for,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BallState",
    "ChannelParams",
    "ChannelSample",
    "ClusterAssignment",
    "CollisionEvent",
    "CollisionRule",
    "ConfigError",
    "CoverageCurvePoint",
    "DegenerateWeightsError",
    "DetectionLedger",
    "Drone",
    "DroneParams",
    "EnergyParams",
    "ExperimentConfig",
    "FieldSpec",
    "FusionResult",
    "GapStatistics",
    "LinkBudget",
    "MatchResult",
    "ModelParams",
    "MultiViewBreakdown",
    "Player",
    "RngBundle",
    "RngHandle",
    "Role",
    "RugbyParams",
    "RunCounts",
    "STRATEGIES",
    "ScenarioRecord",
    "SimClock",
    "StrategyParams",
    "StrategySpec",
    "Style",
    "SwarmSimError",
    "SweepRecord",
    "Team",
    "TickOverflowError",
    "Vec2",
    "WorldState",
    "advance_tick",
    "allocate_drones",
    "build_players",
    "channel_stream",
    "clamp",
    "clamp_to_field",
    "clip_window_for",
    "cluster_players",
    "compute_energy",
    "compute_targets",
    "coverage_curves",
    "derive_run_seed",
    "derive_stream",
    "detect_collisions",
    "detection_accuracy",
    "distance",
    "drone_stream",
    "emit_table1",
    "emit_table2",
    "fuse_confidence",
    "gap_statistics",
    "kickoff",
    "link_bandwidth",
    "load_config",
    "load_sweep",
    "mix64",
    "move_drones",
    "multiview_breakdown",
    "new_match_world",
    "observers_of",
    "parse_config",
    "risk_score",
    "rugby_stream",
    "run_match",
    "run_single",
    "run_sweep",
    "sample_channel",
    "save_config",
    "scenario_sweep",
    "step_ball",
    "step_players",
    "strategy_id",
    "unpaired_gap_statistics",
]
