"""Render sweep.csv cells as coverage curves or stacked breakdown bands.

Nothing here recomputes simulation results: every plotted value is either
a cell of the input CSV or the row-local difference ge1 - ge2. Each render
also writes the plotted numbers to a sidecar CSV next to the image so a
figure can be diffed against its source without pixel inspection.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

FIGURE_KINDS = ("coverage_curves", "breakdown_stack")
PNG_WIDTH = 1200
PNG_HEIGHT = 800
DPI = 100

SWEEP_COLUMNS = (
    "strategy",
    "n_drones",
    "reps",
    "mean_total",
    "mean_seen_ge1",
    "mean_seen_ge2",
    "pct_exactly1",
    "pct_exactly2",
    "pct_exactly3",
    "pct_more_than_3",
    "pct_missed",
)

BAND_COLUMNS = (
    "pct_exactly1",
    "pct_exactly2",
    "pct_exactly3",
    "pct_more_than_3",
    "pct_missed",
)
BAND_LABELS = ("exactly-1", "exactly-2", "exactly-3", "more-than-3", "missed")


class FigkitError(Exception):
    """Raised for malformed inputs or bad figure specifications."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    kind: str
    output: Path
    strategies: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise FigkitError(
                f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}"
            )
        if not Path(self.input_csv).is_file():
            raise FigkitError(f"input CSV not found: {self.input_csv}")

    def sidecar_path(self) -> Path:
        return Path(self.output).with_suffix(".csv")


@dataclass(frozen=True)
class RenderResult:
    """What a render produced: the image, its data sidecar, and the series
    (coverage) or panel-per-strategy (breakdown) labels that were drawn."""

    image: Path
    sidecar: Path
    series: tuple[str, ...]


def load_sweep(path: Path | str) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, dtype={"strategy": str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise FigkitError(f"malformed sweep CSV {path}: {exc}") from None
    missing = [c for c in SWEEP_COLUMNS if c not in df.columns]
    if missing:
        raise FigkitError(f"sweep CSV {path} is missing columns: {', '.join(missing)}")
    if df.empty:
        raise FigkitError(f"sweep CSV {path} has no data rows")
    numeric = [c for c in SWEEP_COLUMNS if c != "strategy"]
    try:
        df[numeric] = df[numeric].apply(pd.to_numeric)
    except (ValueError, TypeError) as exc:
        raise FigkitError(f"non-numeric cell in sweep CSV {path}: {exc}") from None
    if df[numeric].isna().any().any():
        raise FigkitError(f"empty or non-numeric cell in sweep CSV {path}")
    return df


def _select_strategies(df: pd.DataFrame, wanted: tuple[str, ...]) -> list[str]:
    available = list(dict.fromkeys(df["strategy"]))
    if not wanted:
        return available
    unknown = [s for s in wanted if s not in available]
    if unknown:
        raise FigkitError(
            f"unknown strategies: {', '.join(unknown)}; "
            f"available: {', '.join(available)}"
        )
    return list(wanted)


def _write_sidecar(path: Path, header: str, rows: list[str]) -> None:
    path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")


def plot_coverage(spec: FigureSpec) -> RenderResult:
    """Three lines per strategy: collisions seen by >=1 drone, by >=2
    drones, and their pointwise difference, against swarm size."""
    if spec.kind != "coverage_curves":
        raise FigkitError(f"plot_coverage needs kind 'coverage_curves', got {spec.kind!r}")
    df = load_sweep(spec.input_csv)
    strategies = _select_strategies(df, spec.strategies)

    fig, ax = plt.subplots(figsize=(PNG_WIDTH / DPI, PNG_HEIGHT / DPI), dpi=DPI)
    labels: list[str] = []
    rows: list[str] = []
    for strategy in strategies:
        block = df[df["strategy"] == strategy].sort_values("n_drones")
        ns = block["n_drones"].to_numpy()
        ge1 = block["mean_seen_ge1"].to_numpy()
        ge2 = block["mean_seen_ge2"].to_numpy()
        diff = ge1 - ge2
        for series, values, style in (
            ("-1", ge1, "-"),
            ("-more", ge2, "--"),
            ("-diff", diff, ":"),
        ):
            label = f"{strategy}{series}"
            ax.plot(ns, values, style, marker="o", markersize=3, label=label)
            labels.append(label)
        rows.extend(
            f"{strategy},{int(n)},{g1:.6f},{g2:.6f},{d:.6f}"
            for n, g1, g2, d in zip(ns, ge1, ge2, diff)
        )

    ax.set_xlabel("number of drones")
    ax.set_ylabel("mean collisions per match")
    ax.set_title("Collision coverage vs swarm size")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.savefig(spec.output, dpi=DPI)
    plt.close(fig)

    sidecar = spec.sidecar_path()
    _write_sidecar(sidecar, "strategy,n_drones,ge1,ge2,diff", rows)
    return RenderResult(Path(spec.output), sidecar, tuple(labels))


def plot_breakdown(spec: FigureSpec) -> RenderResult:
    """One panel per strategy: stacked observer-count percentage bands
    (exactly 1/2/3, more than 3, missed) against swarm size."""
    if spec.kind != "breakdown_stack":
        raise FigkitError(f"plot_breakdown needs kind 'breakdown_stack', got {spec.kind!r}")
    df = load_sweep(spec.input_csv)
    strategies = _select_strategies(df, spec.strategies)

    ncols = len(strategies)
    fig, axes = plt.subplots(
        1, ncols, figsize=(PNG_WIDTH / DPI, PNG_HEIGHT / DPI), dpi=DPI,
        sharey=True, squeeze=False,
    )
    rows: list[str] = []
    for ax, strategy in zip(axes[0], strategies):
        block = df[df["strategy"] == strategy].sort_values("n_drones")
        ns = block["n_drones"].to_numpy()
        bands = [block[c].to_numpy() for c in BAND_COLUMNS]
        ax.stackplot(ns, *bands, labels=BAND_LABELS, alpha=0.85)
        ax.set_title(strategy)
        ax.set_xlabel("number of drones")
        ax.set_ylim(0, 100)
        rows.extend(
            f"{strategy},{int(n)}," + ",".join(f"{band[i]:.6f}" for band in bands)
            for i, n in enumerate(ns)
        )
    axes[0][0].set_ylabel("% of collisions")
    axes[0][-1].legend(loc="lower right", fontsize=8)
    fig.suptitle("Observer-count breakdown vs swarm size")
    fig.savefig(spec.output, dpi=DPI)
    plt.close(fig)

    sidecar = spec.sidecar_path()
    _write_sidecar(sidecar, "strategy,n_drones," + ",".join(BAND_COLUMNS), rows)
    return RenderResult(Path(spec.output), sidecar, tuple(strategies))


def render(spec: FigureSpec) -> RenderResult:
    if spec.kind == "coverage_curves":
        return plot_coverage(spec)
    return plot_breakdown(spec)
