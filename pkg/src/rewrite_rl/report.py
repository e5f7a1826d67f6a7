"""Run reports: JSON/CSV serialisation and matplotlib figures."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .abstraction import FEATURE_NAMES  # noqa: E402
from .classify import Platform  # noqa: E402
from .rlengine import QTable, TransformResult  # noqa: E402
from .rules import RuleRegistry, default_registry, format_site  # noqa: E402

SCHEMA_VERSION = 1


def run_report(
    result: TransformResult,
    target: Platform,
    source: Optional[str] = None,
    rules: Optional[RuleRegistry] = None,
    timing: bool = False,
) -> dict:
    """Machine-readable RunReport. Wall time only appears with ``timing``."""
    rules = rules or default_registry()
    names = {r.id: r.name for r in rules}
    report = {
        "schema": SCHEMA_VERSION,
        "source": source,
        "target": target.value,
        "terminal": result.terminal,
        "initial_features": list(result.initial_features),
        "steps": [
            {
                "rule": st.rule,
                "rule_name": names.get(st.rule, str(st.rule)),
                "site": format_site(st.site),
                "feature_vector_after": list(st.features),
            }
            for st in result.steps
        ],
    }
    if timing:
        report["elapsed_seconds"] = result.elapsed
    return report


def trajectory_csv(result: TransformResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "rule", "site", *FEATURE_NAMES])
    writer.writerow([0, "", "", *result.initial_features])
    for n, st in enumerate(result.steps, start=1):
        writer.writerow([n, st.rule, format_site(st.site), *st.features])
    return buf.getvalue()


def qtable_csv(q: QTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["state", *(f"rule_{a}" for a in q.known_actions), "final"])
    for s in q.known_states:
        writer.writerow([s, *(format(q.get(s, a), ".17g") for a in q.known_actions), int(s in q.final_states)])
    return buf.getvalue()


def _annotate(ax, data, fmt):
    flat = [v for row in data for v in row] or [0]
    lo, hi = min(flat), max(flat)
    for r, row in enumerate(data):
        for c, v in enumerate(row):
            light = hi > lo and (v - lo) / (hi - lo) > 0.6
            ax.text(c, r, fmt(v), ha="center", va="center", color="k" if light else "w", fontsize=8)


def plot_trajectory(result: TransformResult, path, target: Optional[Platform] = None):
    """Heatmap of the feature vector after every step (columns) per feature (rows)."""
    vectors = [list(result.initial_features)] + [list(st.features) for st in result.steps]
    data = list(map(list, zip(*vectors)))
    fig, ax = plt.subplots(figsize=(1.2 + 0.8 * len(vectors), 6))
    im = ax.imshow(data, aspect="auto", cmap="viridis")
    _annotate(ax, data, str)
    labels = ["start"] + [f"R{st.rule}" for st in result.steps]
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.set_yticks(range(len(FEATURE_NAMES)))
    ax.set_yticklabels(FEATURE_NAMES, fontsize=7)
    title = f"terminal: {result.terminal}"
    if target is not None:
        title = f"target {target.value}, " + title
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def plot_qtable(q: QTable, path):
    """Heatmap of the state-action table, one row per known state."""
    data = [[q.get(s, a) for a in q.known_actions] for s in q.known_states]
    fig, ax = plt.subplots(figsize=(2.5 + 1.4 * len(q.known_actions), 1 + 0.45 * max(1, len(data))))
    im = ax.imshow(data, aspect="auto", cmap="magma")
    _annotate(ax, data, lambda v: f"{v:.4g}")
    ax.set_xticks(range(len(q.known_actions)))
    ax.set_xticklabels([f"R{a}" for a in q.known_actions])
    ax.set_yticks(range(len(q.known_states)))
    ax.set_yticklabels(
        [("* " if s in q.final_states else "") + s for s in q.known_states], fontsize=6, family="monospace"
    )
    ax.set_title("state-action values (* = final)")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def write_run_artifacts(result: TransformResult, q: QTable, directory, target: Platform) -> list:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "trajectory.csv", out / "trajectory.png", out / "qtable.png"]
    written[0].write_text(trajectory_csv(result))
    plot_trajectory(result, written[1], target)
    plot_qtable(q, written[2])
    return written
