"""Experiment orchestration: config files, sweeps, persistence, tables.

The config format is flat ``key=value`` lines with ``#`` comments. Lists
are comma-separated, integer ranges use ``a..b`` inclusive, and any key
containing a dot is a model-parameter override (``rugby.p_pass=0.1``).
Unknown keys are rejected with their line number.

A sweep runs every (strategy, drone_count, repetition) cell with a seed
derived purely from those coordinates and the master seed, so any
execution order yields byte-identical outputs:

    summary.csv   one row per run (counts, not percentages)
    sweep.csv     one row per (strategy, n_drones) with repetition means
    events/*.csv  per (strategy, n_drones) event logs, one row per event

All CSVs have a header row, LF line endings, ``.`` decimals and fixed
six-decimal floats, making reruns byte-comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .drones import STRATEGIES, strategy_id
from .engine import MatchResult, run_match
from .errors import ConfigError
from .fusion import (
    ChannelSample,
    FusionResult,
    ScenarioRecord,
    fuse_confidence,
    sample_channel,
)
from .metrics import (
    CoverageCurvePoint,
    GapStatistics,
    RunCounts,
    gap_statistics,
)
from .params import OVERRIDE_KEYS, ModelParams
from .rng import channel_stream, derive_run_seed

# Seed-derivation tags for the common-random-numbers mode: the match seed
# depends only on the repetition, never on strategy or drone count.
CRN_STRATEGY_TAG = 63
CRN_COUNT_TAG = 0

SUMMARY_HEADER = (
    "strategy,n_drones,rep,total_collisions,seen_ge1,seen_ge2,"
    "exactly1,exactly2,exactly3,more_than_3,missed"
)
SWEEP_HEADER = (
    "strategy,n_drones,reps,mean_total,mean_seen_ge1,mean_seen_ge2,"
    "pct_exactly1,pct_exactly2,pct_exactly3,pct_more_than_3,pct_missed"
)
EVENTS_HEADER = "run_id,event_id,tick,x,y,severity,n_observers,observer_ids"
CHANNELS_HEADER = "event_id,drone_id,snr,dos,gamma"
FUSION_HEADER = "event_id,n_observers,gamma_list,weight_list,confidence,declared"
SCENARIO_HEADER = "n_drones,edge_energy_j,cloud_bits,cloud_bits_per_s"


@dataclass(frozen=True)
class ExperimentConfig:
    strategies: tuple[str, ...] = STRATEGIES
    drone_counts: tuple[int, ...] = tuple(range(1, 41))
    reps: int = 100
    ticks: int = 1800
    master_seed: int = 42
    output_dir: Path = Path("out")
    overrides: dict[str, str] = dc_field(default_factory=dict)
    common_random_numbers: bool = False
    write_events: bool = True

    def __post_init__(self) -> None:
        if not self.strategies:
            raise ConfigError("strategies must be nonempty")
        for s in self.strategies:
            strategy_id(s)
        if not self.drone_counts:
            raise ConfigError("drone_counts must be nonempty")
        if any(n < 0 for n in self.drone_counts):
            raise ConfigError("drone_counts must be >= 0")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if self.ticks < 1:
            raise ConfigError(f"ticks must be >= 1, got {self.ticks}")

    def model(self) -> ModelParams:
        return ModelParams().with_overrides(self.overrides)

    def run_seed(self, strategy: str, n_drones: int, rep: int) -> int:
        """Seed for one cell; in common-random-numbers mode every strategy
        and drone count shares the same match at a given repetition."""
        if self.common_random_numbers:
            return derive_run_seed(self.master_seed, CRN_STRATEGY_TAG,
                                   CRN_COUNT_TAG, rep)
        return derive_run_seed(self.master_seed, strategy_id(strategy),
                               n_drones, rep)


# ---------------------------------------------------------------------------
# config file format
# ---------------------------------------------------------------------------


def _parse_counts(raw: str) -> tuple[int, ...]:
    counts: list[int] = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ".." in chunk:
            lo_s, _, hi_s = chunk.partition("..")
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError as exc:
                raise ConfigError(f"bad range {chunk!r}") from exc
            if hi < lo:
                raise ConfigError(f"descending range {chunk!r}")
            counts.extend(range(lo, hi + 1))
        else:
            try:
                counts.append(int(chunk))
            except ValueError as exc:
                raise ConfigError(f"bad drone count {chunk!r}") from exc
    return tuple(counts)


def _parse_bool(raw: str) -> bool:
    if raw.lower() == "true":
        return True
    if raw.lower() == "false":
        return False
    raise ConfigError(f"expected true or false, got {raw!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key=value config format; see the module docstring."""
    fields: dict[str, object] = {}
    overrides: dict[str, str] = {}
    seen: set[str] = set()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        try:
            if "." in key:
                if key not in OVERRIDE_KEYS:
                    raise ConfigError(f"unknown parameter key {key!r}")
                overrides[key] = value
            elif key == "strategies":
                fields["strategies"] = tuple(
                    s.strip() for s in value.split(",") if s.strip()
                )
            elif key == "drone_counts":
                fields["drone_counts"] = _parse_counts(value)
            elif key == "reps":
                fields["reps"] = int(value)
            elif key == "ticks":
                fields["ticks"] = int(value)
            elif key == "master_seed":
                fields["master_seed"] = int(value)
            elif key == "output_dir":
                fields["output_dir"] = Path(value)
            elif key == "common_random_numbers":
                fields["common_random_numbers"] = _parse_bool(value)
            elif key == "write_events":
                fields["write_events"] = _parse_bool(value)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    config = ExperimentConfig(overrides=overrides, **fields)
    config.model()  # fail fast on bad override values
    return config


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    """Write a config that load_config parses back to an equal value."""
    lines = [
        f"strategies={','.join(config.strategies)}",
        f"drone_counts={','.join(str(n) for n in config.drone_counts)}",
        f"reps={config.reps}",
        f"ticks={config.ticks}",
        f"master_seed={config.master_seed}",
        f"output_dir={config.output_dir}",
        f"common_random_numbers={str(config.common_random_numbers).lower()}",
        f"write_events={str(config.write_events).lower()}",
    ]
    lines.extend(f"{k}={v}" for k, v in sorted(config.overrides.items()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# sweep execution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    """One sweep.csv row: repetition means for a (strategy, count) cell."""

    strategy: str
    n_drones: int
    reps: int
    mean_total: float
    mean_seen_ge1: float
    mean_seen_ge2: float
    pct_exactly1: float
    pct_exactly2: float
    pct_exactly3: float
    pct_more_than_3: float
    pct_missed: float

    def curve_point(self) -> CoverageCurvePoint:
        return CoverageCurvePoint(
            n_drones=self.n_drones,
            mean_seen_ge1=self.mean_seen_ge1,
            mean_seen_ge2=self.mean_seen_ge2,
            mean_total=self.mean_total,
        )


def _f(x: float) -> str:
    return f"{x:.6f}"


def _aggregate(strategy: str, n_drones: int, counts: Sequence[RunCounts]) -> SweepRecord:
    m = len(counts)
    mean_total = math.fsum(c.total for c in counts) / m
    mean_ge1 = math.fsum(c.seen_ge1 for c in counts) / m
    mean_ge2 = math.fsum(c.seen_ge2 for c in counts) / m
    # Breakdown percentages are per-repetition percentages averaged over
    # the repetitions that had any events (a no-event run has no defined
    # percentage split, so it contributes nothing).
    pct = [0.0] * 5
    with_events = [c for c in counts if c.total > 0]
    if with_events:
        for c in with_events:
            scale = 100.0 / c.total
            pct[0] += c.exactly1 * scale
            pct[1] += c.exactly2 * scale
            pct[2] += c.exactly3 * scale
            pct[3] += c.more_than_3 * scale
            pct[4] += c.missed * scale
        pct = [p / len(with_events) for p in pct]
    return SweepRecord(
        strategy=strategy,
        n_drones=n_drones,
        reps=m,
        mean_total=mean_total,
        mean_seen_ge1=mean_ge1,
        mean_seen_ge2=mean_ge2,
        pct_exactly1=pct[0],
        pct_exactly2=pct[1],
        pct_exactly3=pct[2],
        pct_more_than_3=pct[3],
        pct_missed=pct[4],
    )


def run_sweep(
    config: ExperimentConfig,
    progress: Callable[[str, int, int], None] | None = None,
) -> list[SweepRecord]:
    """Run the full sweep and write summary.csv, sweep.csv and events/*.

    Cells run in config order (strategies as listed, counts as listed,
    repetitions ascending), but every run's seed depends only on its
    coordinates, so the output files are schedule-independent.
    """
    model = config.model()
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    events_dir = out / "events"
    if config.write_events:
        events_dir.mkdir(exist_ok=True)
    records: list[SweepRecord] = []
    summary_lines = [SUMMARY_HEADER]
    for strategy in config.strategies:
        for n in config.drone_counts:
            rep_counts: list[RunCounts] = []
            event_lines = [EVENTS_HEADER]
            for rep in range(config.reps):
                seed = config.run_seed(strategy, n, rep)
                result = run_match(model, strategy, n, seed, ticks=config.ticks)
                counts = RunCounts.from_events(result.events)
                rep_counts.append(counts)
                summary_lines.append(
                    f"{strategy},{n},{rep},{counts.total},{counts.seen_ge1},"
                    f"{counts.seen_ge2},{counts.exactly1},{counts.exactly2},"
                    f"{counts.exactly3},{counts.more_than_3},{counts.missed}"
                )
                if config.write_events:
                    run_id = f"{strategy}-n{n}-r{rep}"
                    for ev in result.events:
                        obs = ";".join(str(d) for d in ev.observers)
                        event_lines.append(
                            f"{run_id},{ev.event_id},{ev.tick},{_f(ev.pos.x)},"
                            f"{_f(ev.pos.y)},{_f(ev.severity)},"
                            f"{len(ev.observers)},{obs}"
                        )
            records.append(_aggregate(strategy, n, rep_counts))
            if config.write_events:
                path = events_dir / f"{strategy}_n{n:02d}.csv"
                path.write_text("\n".join(event_lines) + "\n", encoding="utf-8")
            if progress is not None:
                progress(strategy, n, config.reps)
    (out / "summary.csv").write_text("\n".join(summary_lines) + "\n",
                                     encoding="utf-8")
    sweep_lines = [SWEEP_HEADER]
    for r in records:
        sweep_lines.append(
            f"{r.strategy},{r.n_drones},{r.reps},{_f(r.mean_total)},"
            f"{_f(r.mean_seen_ge1)},{_f(r.mean_seen_ge2)},{_f(r.pct_exactly1)},"
            f"{_f(r.pct_exactly2)},{_f(r.pct_exactly3)},"
            f"{_f(r.pct_more_than_3)},{_f(r.pct_missed)}"
        )
    (out / "sweep.csv").write_text("\n".join(sweep_lines) + "\n",
                                   encoding="utf-8")
    return records


def load_sweep(path: str | Path) -> list[SweepRecord]:
    """Read sweep.csv back into records, validating the header."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != SWEEP_HEADER:
        raise ConfigError(f"{path}: not a sweep.csv (unexpected header)")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 11:
            raise ConfigError(f"{path}:{lineno}: expected 11 fields")
        try:
            records.append(
                SweepRecord(
                    strategy=parts[0],
                    n_drones=int(parts[1]),
                    reps=int(parts[2]),
                    mean_total=float(parts[3]),
                    mean_seen_ge1=float(parts[4]),
                    mean_seen_ge2=float(parts[5]),
                    pct_exactly1=float(parts[6]),
                    pct_exactly2=float(parts[7]),
                    pct_exactly3=float(parts[8]),
                    pct_more_than_3=float(parts[9]),
                    pct_missed=float(parts[10]),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return records


# ---------------------------------------------------------------------------
# table emitters
# ---------------------------------------------------------------------------


def strategy_curves(records: Iterable[SweepRecord]) -> dict[str, list[CoverageCurvePoint]]:
    """Coverage curve per strategy, keyed in first-appearance order."""
    curves: dict[str, list[CoverageCurvePoint]] = {}
    for r in records:
        curves.setdefault(r.strategy, []).append(r.curve_point())
    for pts in curves.values():
        pts.sort(key=lambda p: p.n_drones)
    return curves


def emit_table1(records: Sequence[SweepRecord]) -> str:
    """Gap-statistics table: one row per strategy.

    Columns: mean difference %, max positive difference and its drone
    count, max negative difference and its drone count; two-decimal
    formatting to mirror the reported style.
    """
    curves = strategy_curves(records)
    lines = ["strategy,mean_difference_pct,max_positive,x_positive,"
             "max_negative,x_negative"]
    for strategy, curve in curves.items():
        if len(curve) < 2:
            raise ConfigError(
                f"strategy {strategy!r} has fewer than 2 drone counts"
            )
        g = gap_statistics(curve)
        lines.append(
            f"{strategy},{g.mean_difference_pct:.2f},"
            f"{g.max_positive_difference:.2f},{g.max_positive_at},"
            f"{g.max_negative_difference:.2f},{g.max_negative_at}"
        )
    return "\n".join(lines) + "\n"


def _display_name(strategy: str) -> str:
    return strategy.capitalize().replace("_", "-")


def emit_table2(
    records: Sequence[SweepRecord],
    counts: Sequence[int] = (1, 4, 10, 20),
) -> str:
    """Multi-view breakdown table at the requested drone counts.

    One row per (strategy, count): the mean exactly-1/2/3 and more-than-3
    percentages, one-decimal formatting. A requested count missing from
    the sweep is an error naming the count.
    """
    by_cell = {(r.strategy, r.n_drones): r for r in records}
    strategies = list(dict.fromkeys(r.strategy for r in records))
    lines = ["strategy,n_drones,exactly1,exactly2,exactly3,more_than_3"]
    for strategy in strategies:
        for n in counts:
            r = by_cell.get((strategy, n))
            if r is None:
                raise ConfigError(
                    f"drone count {n} not present in sweep for {strategy!r}"
                )
            lines.append(
                f"{_display_name(strategy)},{n},{r.pct_exactly1:.1f},"
                f"{r.pct_exactly2:.1f},{r.pct_exactly3:.1f},"
                f"{r.pct_more_than_3:.1f}"
            )
    return "\n".join(lines) + "\n"


def sweep_gap_table(records: Sequence[SweepRecord]) -> dict[str, GapStatistics]:
    """Per-strategy gap statistics from one sweep's paired curves."""
    return {
        strategy: gap_statistics(curve)
        for strategy, curve in strategy_curves(records).items()
    }


# ---------------------------------------------------------------------------
# single runs and the fusion pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunArtifacts:
    """Everything one match produces: events, per-event channel samples
    keyed by event id (observers ascending), and fusion verdicts."""

    result: MatchResult
    counts: RunCounts
    samples: dict[int, list[ChannelSample]]
    fusion: list[tuple[int, FusionResult]]


def sample_run_channels(
    result: MatchResult, model: ModelParams
) -> dict[int, list[ChannelSample]]:
    """Draw one channel sample per (event, observer).

    Draws are consumed in ascending event id, then ascending observer
    drone id, from a stream derived from the match seed — so the samples
    are a pure function of (model, match). Unobserved events consume no
    draws and get no entry. Requires a trajectory-recording run, since
    the sample depends on where the drone stood at the event tick.
    """
    if result.drone_traj is None and result.n_drones > 0:
        raise ValueError("channel sampling needs record_traj=True")
    rng = channel_stream(result.seed)
    gcs = model.gcs_pos()
    samples: dict[int, list[ChannelSample]] = {}
    for ev in result.events:
        if not ev.observers:
            continue
        drones = result.drones_at(ev.tick, model)
        by_id = {d.id: d for d in drones}
        samples[ev.event_id] = [
            sample_channel(rng, by_id[did], gcs, ev, model.channel)
            for did in ev.observers
        ]
    return samples


def fuse_run(
    samples: dict[int, list[ChannelSample]], threshold: float
) -> list[tuple[int, FusionResult]]:
    return [
        (event_id, fuse_confidence(group, threshold=threshold))
        for event_id, group in sorted(samples.items())
    ]


def run_single(
    model: ModelParams,
    strategy: str,
    n_drones: int,
    seed: int,
    ticks: int,
    out_dir: str | Path,
) -> RunArtifacts:
    """Run one match and write events.csv, summary.csv, channels.csv and
    fusion.csv under out_dir."""
    result = run_match(model, strategy, n_drones, seed, ticks=ticks,
                       record_traj=True)
    counts = RunCounts.from_events(result.events)
    samples = sample_run_channels(result, model)
    fused = fuse_run(samples, model.fusion_threshold)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_id = f"{strategy}-n{n_drones}-r0"
    event_lines = [EVENTS_HEADER]
    for ev in result.events:
        obs = ";".join(str(d) for d in ev.observers)
        event_lines.append(
            f"{run_id},{ev.event_id},{ev.tick},{_f(ev.pos.x)},{_f(ev.pos.y)},"
            f"{_f(ev.severity)},{len(ev.observers)},{obs}"
        )
    (out / "events.csv").write_text("\n".join(event_lines) + "\n",
                                    encoding="utf-8")
    (out / "summary.csv").write_text(
        SUMMARY_HEADER + "\n"
        f"{strategy},{n_drones},0,{counts.total},{counts.seen_ge1},"
        f"{counts.seen_ge2},{counts.exactly1},{counts.exactly2},"
        f"{counts.exactly3},{counts.more_than_3},{counts.missed}\n",
        encoding="utf-8",
    )
    chan_lines = [CHANNELS_HEADER]
    for event_id, group in sorted(samples.items()):
        for s in group:
            chan_lines.append(
                f"{event_id},{s.drone_id},{_f(s.snr)},{_f(s.dos)},{_f(s.gamma)}"
            )
    (out / "channels.csv").write_text("\n".join(chan_lines) + "\n",
                                      encoding="utf-8")
    (out / "fusion.csv").write_text(emit_fusion(samples, fused),
                                    encoding="utf-8")
    return RunArtifacts(result=result, counts=counts, samples=samples,
                        fusion=fused)


def emit_fusion(
    samples: dict[int, list[ChannelSample]],
    fused: Sequence[tuple[int, FusionResult]],
) -> str:
    lines = [FUSION_HEADER]
    verdicts = dict(fused)
    for event_id, group in sorted(samples.items()):
        fr = verdicts[event_id]
        gammas = ";".join(_f(s.gamma) for s in group)
        weights = ";".join(_f(w) for w in fr.weights)
        declared = "true" if fr.declared else "false"
        lines.append(
            f"{event_id},{len(group)},{gammas},{weights},"
            f"{_f(fr.confidence)},{declared}"
        )
    return "\n".join(lines) + "\n"


def load_channels(path: str | Path) -> dict[int, list[ChannelSample]]:
    """Read a channels.csv back into per-event sample groups."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CHANNELS_HEADER:
        raise ConfigError(f"{path}: not a channels.csv (unexpected header)")
    samples: dict[int, list[ChannelSample]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ConfigError(f"{path}:{lineno}: expected 5 fields")
        try:
            sample = ChannelSample(
                drone_id=int(parts[1]),
                snr=float(parts[2]),
                dos=float(parts[3]),
                gamma=float(parts[4]),
            )
            samples.setdefault(int(parts[0]), []).append(sample)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return samples


def emit_scenario(records: Sequence[ScenarioRecord]) -> str:
    """Render the edge-vs-cloud records; only the four comparison columns
    go in the CSV (the edge control-channel constant stays in the API)."""
    lines = [SCENARIO_HEADER]
    for r in records:
        lines.append(
            f"{r.n_drones},{_f(r.edge_energy_j)},{_f(r.cloud_bits)},"
            f"{_f(r.cloud_bits_per_s)}"
        )
    return "\n".join(lines) + "\n"
