"""Render report figures to files alongside the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _stem(out_path: Path) -> Path:
    return out_path.with_suffix("") if out_path.suffix == ".json" else out_path


def _sweep_figure(section: dict, path: Path) -> Path:
    values = [p["value"] for p in section["points"] if p["overall_f1"] is not None]
    scores = [p["overall_f1"] for p in section["points"] if p["overall_f1"] is not None]
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    left.plot(values, scores, marker="o", markersize=3, linewidth=1)
    left.set_xlabel(section["parameter"])
    left.set_ylabel("overall F1")
    left.set_title(f"{section['algorithm']}: F1 vs {section['parameter']}")
    left.grid(True, alpha=0.3)
    if scores:
        right.boxplot(scores, tick_labels=[section["algorithm"]])
    right.set_ylabel("overall F1")
    right.set_title(f"F1 distribution across {len(scores)} points")
    right.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _permutation_figure(section: dict, path: Path) -> Path:
    k_values = section["k_values"]
    fig, axes = plt.subplots(1, len(k_values), figsize=(5 * len(k_values), 4), squeeze=False)
    for axis, k in zip(axes[0], k_values):
        cells = [c for c in section["cells"] if c["k"] == k]
        counts = [max(c["permutations"], 1) for c in cells]
        competitors = sorted(cells[0]["competitors"])
        for competitor in competitors:
            ranks = [c["competitors"][competitor]["rank"] for c in cells]
            axis.plot(counts, ranks, marker="o", markersize=3, label=competitor)
        axis.set_xscale("log")
        axis.set_xlabel("permutations")
        axis.set_ylabel("rank")
        axis.invert_yaxis()
        axis.set_title(f"k = {k:g}")
        axis.grid(True, alpha=0.3)
        if len(competitors) <= 12:
            axis.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _metrics_figure(transitivity: dict, f1: dict, path: Path) -> Path:
    names = sorted(set(transitivity) | set(f1))
    scores_t = [
        (transitivity.get(n) or {}).get("score") for n in names
    ]
    scores_f = [(f1.get(n) or {}).get("overall") for n in names
    ]
    x = np.arange(len(names))
    fig, axis = plt.subplots(figsize=(1.6 * len(names) + 3, 4))
    axis.bar(x - 0.2, [s if s is not None else 0.0 for s in scores_t], width=0.4,
             label="transitivity")
    axis.bar(x + 0.2, [s if s is not None else 0.0 for s in scores_f], width=0.4,
             label="overall F1")
    axis.set_xticks(x)
    axis.set_xticklabels(names, rotation=20, ha="right")
    axis.set_ylim(0, 1.05)
    axis.legend()
    axis.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _correlation_figure(section: dict, path: Path) -> Path:
    labels = section["labels"]
    matrix = np.array(
        [[v if v is not None else np.nan for v in row] for row in section["matrix"]],
        dtype=float,
    )
    fig, axis = plt.subplots(figsize=(1.1 * len(labels) + 2, 1.1 * len(labels) + 1.5))
    image = axis.imshow(matrix, vmin=-1.0, vmax=1.0, cmap="RdYlGn")
    axis.set_xticks(range(len(labels)))
    axis.set_yticks(range(len(labels)))
    axis.set_xticklabels(labels, rotation=30, ha="right")
    axis.set_yticklabels(labels)
    for i in range(len(labels)):
        for j in range(len(labels)):
            if not np.isnan(matrix[i, j]):
                axis.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center", fontsize=8)
    fig.colorbar(image, label="Spearman")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _f1_figure(f1: dict, path: Path) -> Path:
    fig, axis = plt.subplots(figsize=(8, 4))
    for name, entry in sorted(f1.items()):
        competitors = sorted(entry["per_competitor"])
        scores = [entry["per_competitor"][c]["f1"] for c in competitors]
        axis.plot(competitors, scores, marker="o", markersize=3, label=name)
    axis.set_ylabel("F1")
    axis.set_ylim(0, 1.05)
    axis.tick_params(axis="x", rotation=45)
    axis.grid(True, alpha=0.3)
    axis.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def render_report_figures(document: dict, out_path: str | Path) -> list[Path]:
    """Render figures for every populated report section; returns written paths."""
    stem = _stem(Path(out_path))
    written = []

    def sibling(kind: str) -> Path:
        return stem.parent / f"{stem.name}.{kind}.png"

    if document.get("sweep"):
        written.append(_sweep_figure(document["sweep"], sibling("sweep")))
    if document.get("permutation"):
        written.append(_permutation_figure(document["permutation"], sibling("permutation")))
    if document.get("transitivity") and document.get("f1"):
        written.append(
            _metrics_figure(document["transitivity"], document["f1"], sibling("metrics"))
        )
    if document.get("f1"):
        written.append(_f1_figure(document["f1"], sibling("f1")))
    if document.get("correlations"):
        written.append(
            _correlation_figure(document["correlations"], sibling("correlations"))
        )
    return written
