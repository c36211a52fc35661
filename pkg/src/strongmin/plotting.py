"""Figures for the report path.  Everything renders with the Agg backend."""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .core import Flavor, Structure, bits  # noqa: E402

PALETTE = plt.get_cmap("tab20").colors
PNG_META = {"Software": None}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, metadata=PNG_META)
    plt.close(fig)
    return path


def circle_layout(s: Structure, first=()) -> dict:
    """Points on a circle, with `first` (usually the base) leading."""
    order = list(first) + [p for p in s.points if p not in set(first)]
    n = max(len(order), 1)
    return {p: (math.cos(math.pi / 2 - 2 * math.pi * k / n), math.sin(math.pi / 2 - 2 * math.pi * k / n))
            for k, p in enumerate(order)}


def _draw_relations(ax, s: Structure, pos: dict):
    if s.flavor is Flavor.LINEAR:
        for k, lm in enumerate(s.line_masks):
            pts = [s.points[v] for v in bits(lm)]
            cx = sum(pos[p][0] for p in pts) / len(pts)
            cy = sum(pos[p][1] for p in pts) / len(pts)
            for p in pts:
                ax.plot([cx, pos[p][0]], [cy, pos[p][1]], color=PALETTE[(2 * k) % 20], lw=1.2, zorder=1)
            ax.plot(cx, cy, marker="s", ms=3, color=PALETTE[(2 * k) % 20], zorder=2)
    else:
        for t in s.named_triples():
            cx = sum(pos[p][0] for p in t) / 3
            cy = sum(pos[p][1] for p in t) / 3
            for p in t:
                ax.plot([cx, pos[p][0]], [cy, pos[p][1]], color="0.6", lw=0.8, zorder=1)
            ax.plot(cx, cy, marker=".", ms=3, color="0.4", zorder=2)


def plot_structure(s: Structure, path, highlight=(), title: str = "") -> Path:
    """Points on a circle; each relation (or line) is a small star."""
    fig, ax = plt.subplots(figsize=(5, 5))
    base = [p for p in (s.base or ()) if p in s.index]
    pos = circle_layout(s, base)
    _draw_relations(ax, s, pos)
    hl = set(highlight)
    for p, (x, y) in pos.items():
        ax.plot(x, y, "o", ms=9, color="tab:red" if p in hl else "white", mec="k", zorder=3)
        ax.annotate(p, (x * 1.13, y * 1.13), ha="center", va="center", fontsize=7)
    ax.set_title(title or repr(s), fontsize=9)
    ax.set_aspect("equal")
    ax.axis("off")
    return _save(fig, path)


def plot_orbits(s: Structure, report, path) -> Path:
    """The structure with each orbit in its own colour."""
    fig, ax = plt.subplots(figsize=(5, 5))
    pos = circle_layout(s, report.base)
    _draw_relations(ax, s, pos)
    color = {}
    for k, orb in enumerate(report.orbits):
        for p in orb:
            color[p] = PALETTE[k % 20] if len(orb) > 1 else "white"
    for p, (x, y) in pos.items():
        ax.plot(x, y, "o", ms=9, color=color[p], mec="k", zorder=3)
        ax.annotate(p, (x * 1.13, y * 1.13), ha="center", va="center", fontsize=7)
    ax.set_title(f"{report.group} stabilizer of {{{','.join(report.base)}}}: {len(report.orbits)} orbits",
                 fontsize=9)
    ax.set_aspect("equal")
    ax.axis("off")
    return _save(fig, path)


def plot_decomposition(td, path) -> Path:
    """One column per stratum, one box per petal, coloured by cluster."""
    s = td.ambient
    cols = [[("0", sorted(td.zero_parts[0], key=s.index.get), "0.85")]]
    for m in range(1, td.height + 1):
        col = []
        for c in td.clusters_at(m):
            for pid in c.petals:
                pts = sorted(td.petal(pid).points, key=s.index.get)
                col.append((pid, pts, PALETTE[(2 * (c.j - 1) + m) % 20]))
        cols.append(col)
    rows = max(len(c) for c in cols)
    fig, ax = plt.subplots(figsize=(2.2 * len(cols) + 1, 0.9 * rows + 1.2))
    for m, col in enumerate(cols):
        for r, (pid, pts, colr) in enumerate(col):
            y = rows - r - 1
            ax.add_patch(plt.Rectangle((m * 2.2, y), 1.9, 0.75, color=colr, ec="k", lw=0.6))
            label = ",".join(pts)
            if len(label) > 28:
                label = label[:26] + ".."
            ax.text(m * 2.2 + 0.95, y + 0.5, pid, ha="center", fontsize=8, weight="bold")
            ax.text(m * 2.2 + 0.95, y + 0.2, label, ha="center", fontsize=6)
        ax.text(m * 2.2 + 0.95, rows + 0.2, f"stratum {m}", ha="center", fontsize=8)
    ax.set_xlim(-0.2, 2.2 * len(cols))
    ax.set_ylim(-0.2, rows + 0.6)
    ax.axis("off")
    ax.set_title(f"{td.group} decomposition over {{{','.join(td.base)}}}, height {td.height}", fontsize=9)
    return _save(fig, path)


def plot_bouquet(bq, path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3))
    labels = [",".join(f.base_arrangement) for f in bq.flowers]
    petals = [len(f.petals) for f in bq.flowers]
    packs = [max((len(c) for c in f.certificates), default=0) for f in bq.flowers]
    xs = range(len(labels))
    ax.bar([x - 0.2 for x in xs], petals, width=0.4, label="petals")
    ax.bar([x + 0.2 for x in xs], packs, width=0.4, label="largest disjoint set")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, fontsize=7, rotation=30, ha="right")
    ax.set_ylabel("count")
    ax.set_title("flowers by base arrangement", fontsize=9)
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_growth(log, start: int, path) -> Path:
    """Point count after each builder step."""
    fig, ax = plt.subplots(figsize=(5, 3))
    sizes = [start]
    for entry in log:
        code, at, new = entry
        sizes.append(sizes[-1] + len(new))
    ax.step(range(len(sizes)), sizes, where="post")
    ax.set_xlabel("amalgamation step")
    ax.set_ylabel("points")
    ax.set_title("bounded generic construction", fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def plot_selftest(results, path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(results) + 1))
    colors = {"PASS": "tab:green", "XFAIL": "tab:orange", "FAIL": "tab:red", "XPASS": "tab:red"}
    ys = range(len(results))
    ax.barh(list(ys), [max(r.instances, 1) for r in results], color=[colors[r.status] for r in results])
    ax.set_xscale("log")
    ax.set_yticks(list(ys))
    ax.set_yticklabels([f"{r.status} {r.name}" for r in results], fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("instances checked")
    fig.tight_layout()
    return _save(fig, path)
