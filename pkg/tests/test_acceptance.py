"""End-to-end acceptance gate.

One test per release criterion, each printing a single [PASS]/[FAIL] line
with the measured numbers so the gate can be read off a terminal. The two
expensive fixtures (a 100-rep common-random-numbers sweep over counts 1..20
and a pair of independently seeded saturation sweeps) are shared across
tests; together they dominate the suite's runtime (~80 s).
"""

from __future__ import annotations

import math
import random
from pathlib import Path

import pytest
from scipy.stats import spearmanr

from swarmsim import cli
from swarmsim.fusion import (
    ChannelSample,
    EnergyParams,
    LinkBudget,
    compute_energy,
    fuse_confidence,
    link_bandwidth,
)
from swarmsim.geometry import Vec2
from swarmsim.harness import ExperimentConfig, run_sweep, strategy_curves
from swarmsim.metrics import (
    CoverageCurvePoint,
    DetectionLedger,
    RunCounts,
    detection_accuracy,
    gap_statistics,
    multiview_breakdown,
    unpaired_gap_statistics,
)
from swarmsim.state import CollisionEvent

TOL = 1e-9
TREND_STRATEGIES = ("density", "follow_players", "random")
UNPAIRED_SEEDS = (1001, 2002)
UNPAIRED_COUNTS = (30, 35, 40)


def _verdict(capsys, ok: bool, label: str, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


def _event(i: int, n_observers: int) -> CollisionEvent:
    return CollisionEvent(
        event_id=i,
        tick=i,
        pos=Vec2(1.0, 1.0),
        players=(0, 15),
        severity=1.0,
        observers=tuple(range(n_observers)),
    )


@pytest.fixture(scope="module")
def trend_sweep(tmp_path_factory):
    """100-rep sweep, counts 1..20, same matches at every cell (CRN)."""
    config = ExperimentConfig(
        strategies=TREND_STRATEGIES,
        drone_counts=tuple(range(1, 21)),
        reps=100,
        ticks=1800,
        master_seed=42,
        output_dir=tmp_path_factory.mktemp("trend"),
        common_random_numbers=True,
        write_events=False,
    )
    return run_sweep(config)


@pytest.fixture(scope="module")
def unpaired_curves(tmp_path_factory):
    """Two saturation sweeps with independent seeds per cell (no CRN)."""
    sweeps = []
    for seed in UNPAIRED_SEEDS:
        config = ExperimentConfig(
            strategies=TREND_STRATEGIES,
            drone_counts=UNPAIRED_COUNTS,
            reps=100,
            ticks=1800,
            master_seed=seed,
            output_dir=tmp_path_factory.mktemp(f"unpaired_{seed}"),
            common_random_numbers=False,
            write_events=False,
        )
        sweeps.append(strategy_curves(run_sweep(config)))
    return tuple(sweeps)


def _cells(records):
    return {(r.strategy, r.n_drones): r for r in records}


def _pct_ge1(rec) -> float:
    return 100.0 * rec.mean_seen_ge1 / rec.mean_total


def test_sweep_rerun_is_byte_identical(tmp_path, capsys):
    config_path = tmp_path / "sweep.cfg"
    config_path.write_text(
        "strategies = density, random\n"
        "drone_counts = 1, 10, 20\n"
        "reps = 10\n"
        "ticks = 1800\n"
        "master_seed = 42\n"
        "write_events = false\n",
        encoding="utf-8",
    )
    blobs = []
    for run_dir in ("first", "second"):
        out = tmp_path / run_dir
        code = cli.main(
            ["sweep", "--config", str(config_path), "--out", str(out), "--quiet"]
        )
        assert code == 0
        blobs.append(
            (
                (out / "summary.csv").read_bytes(),
                (out / "sweep.csv").read_bytes(),
            )
        )
    ok = blobs[0] == blobs[1]
    _verdict(
        capsys,
        ok,
        "determinism",
        "summary.csv and sweep.csv byte-identical across two sweep runs"
        if ok
        else "rerun produced different bytes",
    )


def test_metric_oracles(capsys):
    checks: list[tuple[str, float, float]] = []

    acc = detection_accuracy(DetectionLedger.from_arrays([1, 0, 1], [1, 1, 1]))
    checks.append(("accuracy ratio", acc, 2.0 / 3.0))
    checks.append(
        ("accuracy perfect", detection_accuracy(DetectionLedger.from_arrays([2, 3], [2, 3])), 1.0)
    )
    checks.append(
        ("accuracy zero", detection_accuracy(DetectionLedger.from_arrays([0, 0], [1, 2])), 0.0)
    )

    one_per_bucket = [_event(0, 0), _event(1, 1), _event(2, 2), _event(3, 3)]
    for got, want, name in zip(
        multiview_breakdown(one_per_bucket).as_tuple(),
        (25.0, 25.0, 25.0, 0.0, 25.0),
        ("x1", "x2", "x3", "more", "missed"),
    ):
        checks.append((f"breakdown {name}", got, want))
    checks.append(
        ("breakdown all-five", multiview_breakdown([_event(i, 5) for i in range(3)]).pct_more_than_3, 100.0)
    )
    hand = multiview_breakdown([_event(0, 1), _event(1, 1), _event(2, 2), _event(3, 0)])
    checks.append(("breakdown hand x1", hand.pct_exactly_1, 50.0))
    checks.append(("breakdown hand x2", hand.pct_exactly_2, 25.0))
    checks.append(("breakdown hand missed", hand.pct_missed, 25.0))

    curve = [
        CoverageCurvePoint(1, 10.0, 5.0, 30.0),
        CoverageCurvePoint(2, 20.0, 18.0, 30.0),
        CoverageCurvePoint(3, 30.0, 30.0, 30.0),
    ]
    gs = gap_statistics(curve)
    checks.append(("gap mean%", gs.mean_difference_pct, 100.0 * 7.0 / 60.0))
    checks.append(("gap max-pos", gs.max_positive_difference, 5.0))
    checks.append(("gap max-pos-at", float(gs.max_positive_at), 1.0))
    checks.append(("gap max-neg", gs.max_negative_difference, 0.0))
    checks.append(("gap max-neg-at", float(gs.max_negative_at), 3.0))
    flat = gap_statistics(
        [CoverageCurvePoint(1, 10.0, 10.0, 20.0), CoverageCurvePoint(2, 12.0, 12.0, 20.0)]
    )
    checks.append(("gap identical mean", flat.mean_difference_pct, 0.0))
    checks.append(("gap identical extrema", flat.max_positive_difference, 0.0))
    single = gap_statistics([CoverageCurvePoint(4, 50.0, 40.0, 60.0)])
    checks.append(("gap single mean%", single.mean_difference_pct, 20.0))
    checks.append(("gap single pos", single.max_positive_difference, 10.0))
    checks.append(("gap single neg", single.max_negative_difference, 10.0))

    lone = fuse_confidence([ChannelSample(0, 5.0, 0.8, 0.7)])
    checks.append(("fuse single conf", lone.confidence, 0.7))
    checks.append(("fuse single undeclared", float(lone.declared), 0.0))
    even = fuse_confidence(
        [ChannelSample(0, 2.0, 0.5, 0.8), ChannelSample(1, 1.0, 1.0, 0.6)]
    )
    checks.append(("fuse symmetric", even.confidence, 0.7))
    skew = fuse_confidence(
        [ChannelSample(0, 3.0, 1.0, 1.0), ChannelSample(1, 1.0, 1.0, 0.0)]
    )
    checks.append(("fuse weights hi", skew.weights[0], 0.75))
    checks.append(("fuse weights lo", skew.weights[1], 0.25))
    checks.append(("fuse gamma", skew.confidence, 0.75))

    checks.append(("energy zero-time", compute_energy(EnergyParams(0.5, 10.0, 0.0, 1.1)), 0.0))
    checks.append(("energy identity", compute_energy(EnergyParams(1.0, 1.0, 1.0, 1.0)), 1.0))
    checks.append(("energy product", compute_energy(EnergyParams(2.0, 3.0, 4.0, 2.0)), 96.0))

    unit = LinkBudget(r_enc=2.0, t_obs=3.0, p_t=1.0, h=1.0, n0b=1.0)
    checks.append(("bandwidth log2(2)", link_bandwidth([unit]), 6.0))
    checks.append(
        ("bandwidth dead link", link_bandwidth([LinkBudget(2.0, 3.0, 1.0, 0.0, 1.0)]), 0.0)
    )
    checks.append(("bandwidth additivity", link_bandwidth([unit, unit]), 2.0 * link_bandwidth([unit])))

    bad = [(name, got, want) for name, got, want in checks if abs(got - want) > TOL]
    _verdict(
        capsys,
        not bad,
        "metric-oracles",
        f"{len(checks)} closed-form examples within {TOL:g}"
        if not bad
        else f"failed: {bad}",
    )


def test_randomized_invariant_suite(capsys):
    rnd = random.Random(12345)
    palette = (0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 4, 5, 6)
    events_checked = 0
    runs = 0
    while events_checked < 10_000:
        size = rnd.randint(1, 60)
        events = [_event(i, rnd.choice(palette)) for i in range(size)]
        counts = RunCounts.from_events(events)
        assert counts.seen_ge2 <= counts.seen_ge1 <= counts.total
        total_pct = math.fsum(multiview_breakdown(events).as_tuple())
        assert abs(total_pct - 100.0) <= 1e-9
        events_checked += size
        runs += 1

    fusion_sets = 0
    for _ in range(800):
        m = rnd.randint(1, 8)
        samples = [
            ChannelSample(j, rnd.uniform(1e-3, 300.0), rnd.uniform(0.01, 1.0), rnd.random())
            for j in range(m)
        ]
        result = fuse_confidence(samples)
        assert abs(math.fsum(result.weights) - 1.0) <= 1e-9
        lo = min(s.gamma for s in samples)
        hi = max(s.gamma for s in samples)
        assert lo - 1e-12 <= result.confidence <= hi + 1e-12
        for scale in (1e-6, 0.37, 4.0, 1e6):
            rescaled = [
                ChannelSample(s.drone_id, s.snr * scale, s.dos, s.gamma) for s in samples
            ]
            assert abs(fuse_confidence(rescaled).confidence - result.confidence) <= 1e-12
        fusion_sets += 1

    _verdict(
        capsys,
        True,
        "randomized-invariants",
        f"{events_checked} events over {runs} runs (subset law, breakdown=100) "
        f"and {fusion_sets} fusion sets (weights sum 1, bounded confidence, "
        "SNR-scale invariant)",
    )


def test_coverage_trend_monotone(trend_sweep, capsys):
    rhos = {}
    for strategy, points in strategy_curves(trend_sweep).items():
        ns = [p.n_drones for p in points]
        rhos[strategy] = spearmanr(ns, [p.mean_seen_ge1 for p in points]).statistic
    ok = all(r >= 0.95 for r in rhos.values())
    detail = ", ".join(f"{s} rho={r:.4f}" for s, r in rhos.items())
    _verdict(capsys, ok, "coverage-trend", detail + " (need >= 0.95 each)")


def test_selforganising_dominance_at_ten(trend_sweep, capsys):
    cells = _cells(trend_sweep)
    base = _pct_ge1(cells[("random", 10)])
    margins = {
        s: _pct_ge1(cells[(s, 10)]) - base for s in ("density", "follow_players")
    }
    ok = all(m >= 5.0 for m in margins.values())
    detail = ", ".join(f"{s} +{m:.1f}pp over random" for s, m in margins.items())
    _verdict(capsys, ok, "strategy-dominance", detail + " at n=10 (need >= 5pp)")


def test_multiview_majority_at_twenty(trend_sweep, capsys):
    cells = _cells(trend_sweep)
    parts = []
    ok = True
    for s in ("density", "follow_players"):
        rec = cells[(s, 20)]
        ge2 = 100.0 * rec.mean_seen_ge2 / rec.mean_total
        ok = ok and ge2 >= 70.0 and rec.pct_exactly1 < 15.0
        parts.append(f"{s} ge2={ge2:.1f}% x1={rec.pct_exactly1:.1f}%")
    _verdict(
        capsys, ok, "multiview-fidelity", ", ".join(parts) + " at n=20 (need ge2 >= 70, x1 < 15)"
    )


def test_follow_players_bucket_convergence(trend_sweep, capsys):
    rec = _cells(trend_sweep)[("follow_players", 20)]
    others = {
        "x1": rec.pct_exactly1,
        "x2": rec.pct_exactly2,
        "x3": rec.pct_exactly3,
        "missed": rec.pct_missed,
    }
    more = rec.pct_more_than_3
    ok = more > 50.0 and all(more > v for v in others.values())
    detail = f"more_than_3={more:.1f}% vs " + ", ".join(
        f"{k}={v:.1f}%" for k, v in others.items()
    )
    _verdict(capsys, ok, "follow-players-convergence", detail + " at n=20")


def test_density_high_coverage_small_swarm(trend_sweep, capsys):
    cells = _cells(trend_sweep)
    achieved = None
    for n in range(1, 11):
        if _pct_ge1(cells[("density", n)]) >= 90.0:
            achieved = n
            break
    ok = achieved is not None
    detail = (
        f"density reaches {_pct_ge1(cells[('density', achieved)]):.1f}% ge1 coverage at n={achieved}"
        if ok
        else f"never reaches 90% by n=10 (best {max(_pct_ge1(cells[('density', n)]) for n in range(1, 11)):.1f}%)"
    )
    _verdict(capsys, ok, "density-high-coverage", detail)


def test_gap_sign_paired_vs_unpaired(trend_sweep, unpaired_curves, capsys):
    worst_paired = {
        s: min(p.diff for p in pts) for s, pts in strategy_curves(trend_sweep).items()
    }
    paired_ok = all(v >= -1e-12 for v in worst_paired.values())

    first, second = unpaired_curves
    negatives = {}
    for strategy in TREND_STRATEGIES:
        gs = unpaired_gap_statistics(first[strategy], second[strategy])
        negatives[strategy] = (gs.max_negative_difference, gs.max_negative_at)
    unpaired_ok = any(v < 0.0 for v, _ in negatives.values())

    detail = (
        "paired min D: "
        + ", ".join(f"{s}={v:.3f}" for s, v in worst_paired.items())
        + "; unpaired max-negative: "
        + ", ".join(f"{s}={v:+.2f}@{at}" for s, (v, at) in negatives.items())
    )
    _verdict(capsys, paired_ok and unpaired_ok, "gap-sign", detail)
