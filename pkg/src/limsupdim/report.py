"""Report writers: delimited data, JSON with config echo, matplotlib files.

Every run artifact embeds the exact argument vector that produced it, so a
report can be re-run to identical results.  Figures are rendered headless
and written next to the delimited output.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Callable, Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import __version__

__all__ = ["write_csv", "write_json", "save_plot", "config_echo"]


def config_echo(command: str, argv: Sequence[str], seed: int | None = None) -> dict:
    return {
        "command": command,
        "argv": list(argv),
        "seed": seed,
        "version": __version__,
    }


def write_csv(path: str, rows: Iterable[dict], fieldnames: Sequence[str] | None = None) -> str:
    rows = list(rows)
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def write_json(path: str, payload: dict) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def save_plot(path: str, draw: Callable[[plt.Axes], None], title: str = "") -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    draw(ax)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
