"""Figure rendering for swarmsim sweep outputs."""

from .figures import (
    FigkitError,
    FigureSpec,
    RenderResult,
    load_sweep,
    plot_breakdown,
    plot_coverage,
    render,
)

__all__ = [
    "FigkitError",
    "FigureSpec",
    "RenderResult",
    "load_sweep",
    "plot_breakdown",
    "plot_coverage",
    "render",
]
