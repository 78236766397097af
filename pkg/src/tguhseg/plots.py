"""Matplotlib figure rendering for the report paths of the CLI."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import EvalReport, RocResult  # noqa: E402

_SAVEFIG_KW = {"dpi": 150, "metadata": {"Date": None}}

_METRICS = [
    ("atpr", "aTPR"),
    ("afpr", "aFPR"),
    ("atprsh", "aTPRsh"),
    ("amse", "aMSE"),
]


def plot_metrics(report: EvalReport, path) -> None:
    """2x2 panel of each aggregate metric against sigma, one line per config."""
    configs = sorted({row["config"] for row in report.rows})
    fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=True)
    for ax, (key, title) in zip(axes.ravel(), _METRICS):
        for config in configs:
            pts = [
                (row["sigma"], row[key])
                for row in report.rows
                if row["config"] == config and row[key] is not None
            ]
            if pts:
                xs, ys = zip(*sorted(pts))
                ax.plot(xs, ys, marker="o", label=config)
        ax.set_title(title)
        ax.set_xlabel(r"$\sigma$")
        ax.grid(True, alpha=0.3)
    axes[0, 0].legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG_KW)
    plt.close(fig)


def plot_roc(results: dict[float, RocResult], path) -> None:
    """ROC curves, one line per noise level."""
    fig, ax = plt.subplots(figsize=(6, 5))
    for sigma in sorted(results):
        res = results[sigma]
        pts = sorted((p.mean_fpr, p.mean_tpr) for p in res.points)
        xs = [0.0] + [p[0] for p in pts] + [1.0]
        ys = [0.0] + [p[1] for p in pts] + [1.0]
        ax.plot(xs, ys, marker=".", label=rf"$\sigma$={sigma:g} (AUC={res.auc:.3f})")
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=0.8)
    ax.set_xlabel("mean FPR")
    ax.set_ylabel("mean TPR")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG_KW)
    plt.close(fig)
