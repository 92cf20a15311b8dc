"""Matplotlib figures written next to the CSV/JSON reports.

Everything renders off-screen with the Agg backend; every function takes an
output path and returns it.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .bounds import BoundReport  # noqa: E402
from .domain import AuditReport, DomainSpec, Tag  # noqa: E402

TAG_COLORS = {
    Tag.CORRECT: "#4c72b0",
    Tag.INCORRECT: "#c44e52",
    Tag.EXTRINSIC: "#dd8452",
    Tag.UNDEFINED: "#bbbbbb",
}

plt.rcParams.update(
    {
        "figure.dpi": 110,
        "font.size": 10,
        "axes.spines.top": False,
        "axes.spines.right": False,
    }
)


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_audit(report: AuditReport, path, max_points: int = 400) -> Path:
    tags = np.asarray(report.tags)
    if tags.shape[0] > max_points:
        tags = tags[np.linspace(0, tags.shape[0] - 1, max_points).astype(int)]
    fig, (ax_map, ax_bar) = plt.subplots(1, 2, figsize=(9, 4), gridspec_kw={"width_ratios": [3, 2]})
    cmap = ListedColormap([TAG_COLORS[t] for t in Tag])
    ax_map.imshow(tags.T, aspect="auto", interpolation="nearest", cmap=cmap, vmin=0, vmax=len(Tag) - 1)
    ax_map.set_xlabel("point index" + (" (subsampled)" if report.tags.shape[0] > max_points else ""))
    ax_map.set_ylabel("group element")
    ax_map.set_title("pair tags")
    measures = report.measures
    ax_bar.bar(
        [t.letter for t in Tag], [measures[t] for t in Tag], color=[TAG_COLORS[t] for t in Tag]
    )
    ax_bar.set_ylim(0, 1)
    ax_bar.set_ylabel("measure under p x uniform(G)")
    ax_bar.set_title("set measures")
    return _save(fig, path)


def plot_bound(report: BoundReport, path) -> Path:
    reps = [s.representative for s in report.per_orbit]
    contrib = [s.contribution for s in report.per_orbit]
    masses = [s.orbit_mass for s in report.per_orbit]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    x = np.arange(len(reps))
    ax.bar(x, masses, color="#dddddd", label="orbit mass")
    ax.bar(x, contrib, color="#c44e52", label="contribution")
    if len(reps) <= 30:
        ax.set_xticks(x, [str(r) for r in reps], rotation=90)
    ax.set_xlabel("orbit representative")
    ax.set_title(f"{report.method}: total = {report.total:.6g}")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_domain(domain: DomainSpec, path) -> Path:
    """Scatter of the first two coordinates, colored by label or target norm."""
    if domain.coordinates is None:
        raise ValueError("domain has no coordinates to plot")
    xy = domain.coordinates[:, :2]
    on = domain.density > 0
    if domain.target.kind == "labels":
        color = domain.target.values
    else:
        color = np.linalg.norm(domain.target.values, axis=1)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(xy[~on, 0], xy[~on, 1], s=6, facecolors="none", edgecolors="#aaaaaa", linewidths=0.5)
    sc = ax.scatter(xy[on, 0], xy[on, 1], s=8, c=color[on], cmap="tab10" if domain.target.kind == "labels" else "viridis")
    if domain.target.kind == "vectors":
        fig.colorbar(sc, ax=ax, label="|f(x)|")
    name = domain.provenance.get("generator", "domain")
    ax.set_title(f"{name}: {int(on.sum())} support points")
    ax.set_aspect("equal", adjustable="datalim")
    return _save(fig, path)


def plot_rademacher(tables: dict, path) -> Path:
    names = list(tables)
    first = tables[names[0]]
    x = np.arange(len(first.rows))
    width = 0.8 / len(names)
    fig, ax = plt.subplots(figsize=(max(6, 0.35 * len(x)), 3.5))
    for k, name in enumerate(names):
        vals = [float(r.accuracy) for r in tables[name].rows]
        ax.bar(x + k * width, vals, width, label=f"{name}: {tables[name].accuracy}")
    if len(x) <= 32:
        labels = ["".join("+" if s > 0 else "-" for s in r.sigma) for r in first.rows]
        ax.set_xticks(x + 0.4 - width / 2, labels, rotation=90, family="monospace")
    ax.set_ylabel("best agreement / m")
    ax.set_ylim(0, 1.05)
    ax.legend(frameon=False, loc="lower right")
    return _save(fig, path)
