"""Figure rendering for scan output (key rate against channel loss)."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _read_csv(path: str) -> tuple[list[float], list[float]]:
    losses: list[float] = []
    rates: list[float] = []
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n").split(",")
        loss_idx, rate_idx = header.index("loss_db"), header.index("R")
        for line in handle:
            parts = line.rstrip("\n").split(",")
            if len(parts) < len(header):
                continue
            try:
                loss = float(parts[loss_idx])
                rate = float(parts[rate_idx])
            except ValueError:
                continue
            if rate == rate:  # drop NaN rows
                losses.append(loss)
                rates.append(rate)
    return losses, rates


def render_rate_curves(
    csv_paths: Sequence[str],
    out_path: str,
    labels: Sequence[str] | None = None,
    title: str | None = None,
) -> None:
    """Overlay R-versus-loss curves from one or more scan CSV files.

    Zero rates cannot appear on the log axis, so each curve is drawn down to
    its last positive point.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for i, path in enumerate(csv_paths):
        losses, rates = _read_csv(path)
        xs = [l for l, r in zip(losses, rates) if r > 0.0]
        ys = [r for r in rates if r > 0.0]
        label = labels[i] if labels and i < len(labels) else path
        ax.semilogy(xs, ys, label=label)
    ax.set_xlabel("overall system loss (dB)")
    ax.set_ylabel("secret key rate per pulse")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_points(points, out_path: str, label: str | None = None) -> None:
    """Render one scan result (list of key-rate points) to a figure file."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    xs = [p.loss_db for p in points if p.rate == p.rate and p.rate > 0.0]
    ys = [p.rate for p in points if p.rate == p.rate and p.rate > 0.0]
    ax.semilogy(xs, ys, label=label or "scan")
    ax.set_xlabel("overall system loss (dB)")
    ax.set_ylabel("secret key rate per pulse")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
