"""Figure rendering for the report paths (matplotlib, file output only)."""

from __future__ import annotations

from pathlib import Path

from .bench import BenchReport, DIMENSIONS
from .codec import CodeStats


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_bench_figure(report: BenchReport, path: str | Path) -> Path:
    """Bar chart of the mean dimension scores; CLIP on its native axis."""
    plt = _plt()
    dims_100 = [d for d in DIMENSIONS if d != "clip"]
    fig, (ax, ax_clip) = plt.subplots(
        1, 2, figsize=(9, 3.2), width_ratios=(6, 1))
    values = [report.means[d] for d in dims_100]
    ax.bar(range(len(dims_100)), values, color="#4878b0")
    ax.set_xticks(range(len(dims_100)))
    ax.set_xticklabels(dims_100, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0, 100)
    ax.set_ylabel("mean score")
    for i, v in enumerate(values):
        ax.text(i, v + 1.5, f"{v:.1f}", ha="center", fontsize=7)

    ax_clip.bar([0], [report.means["clip"]], color="#b04848")
    ax_clip.set_xticks([0])
    ax_clip.set_xticklabels(["clip"], fontsize=8)
    ax_clip.set_ylim(0, 1)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_alignment_figure(pairs: dict[str, tuple[list, list]],
                            stats: dict[str, tuple[float, float]],
                            path: str | Path) -> Path:
    """Scatter of benchmark vs human scores per dimension with rho/r labels."""
    plt = _plt()
    dims = sorted(pairs)
    cols = min(3, max(1, len(dims)))
    rows = (len(dims) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 2.8 * rows),
                             squeeze=False)
    for i, dim in enumerate(dims):
        ax = axes[i // cols][i % cols]
        bench, human = pairs[dim]
        ax.scatter(bench, human, s=18, color="#4878b0")
        rho, r = stats[dim]
        ax.set_title(f"{dim}  rho={rho:.3f} r={r:.3f}", fontsize=8)
        ax.set_xlabel("benchmark", fontsize=7)
        ax.set_ylabel("human", fontsize=7)
        ax.tick_params(labelsize=7)
    for i in range(len(dims), rows * cols):
        axes[i // cols][i % cols].axis("off")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_stats_figure(labels: list[str], stats: list[CodeStats],
                        path: str | Path) -> Path:
    """Grouped bars: template vs plain-RLE vs voxel-index token counts."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(labels)), 3.2))
    x = range(len(labels))
    width = 0.27
    series = (
        ("template", [s.token_count for s in stats], "#4878b0"),
        ("plain RLE", [s.plain_rle_tokens for s in stats], "#7aa874"),
        ("voxel index", [s.voxel_index_tokens for s in stats], "#b04848"),
    )
    for k, (name, values, color) in enumerate(series):
        ax.bar([i + (k - 1) * width for i in x], values, width,
               label=name, color=color)
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=7)
    ax.set_ylabel("tokens")
    ax.set_yscale("log")
    ax.legend(fontsize=7)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
