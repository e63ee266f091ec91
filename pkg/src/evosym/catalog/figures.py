"""Catalog summary figure: encoded counts against the claimed ones, and timing."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .harness import CLAIMED, Summary  # noqa: E402


def summary_figure(summary: Summary, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = summary.rows()
    dims = [d for d in sorted(CLAIMED) if d in rows] or sorted(CLAIMED)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    pos = np.arange(len(dims))
    w = 0.38
    passed = [rows.get(d, {}).get("equation:pass", 0) for d in dims]
    annotated = [rows.get(d, {}).get("equation:discrepancy", 0) + rows.get(d, {}).get("equation:xpass", 0) for d in dims]
    other = [rows.get(d, {}).get("admissible", 0) - p - a for d, p, a in zip(dims, passed, annotated)]
    ax1.bar(pos - w / 2, passed, w, label="pass", color="tab:green")
    ax1.bar(pos - w / 2, annotated, w, bottom=passed, label="annotated", color="tab:orange")
    ax1.bar(pos - w / 2, other, w, bottom=np.add(passed, annotated), label="fail / indeterminate", color="tab:red")
    ax1.bar(pos + w / 2, [CLAIMED[d] for d in dims], w, label="claimed", color="tab:gray")
    for p, d in zip(pos, dims):
        got = rows.get(d, {}).get("admissible", 0)
        ax1.annotate(f"{got - CLAIMED[d]:+d}", (p, max(got, CLAIMED[d])), ha="center", va="bottom")
    ax1.set_xticks(pos, [f"dim {d}" for d in dims])
    ax1.set_ylabel("invariant equations")
    ax1.legend(frameon=False, fontsize=8)

    for d in sorted(rows):
        times = sorted(r.elapsed for r in summary.reports if r.dimension == d)
        if times:
            ax2.plot(np.arange(1, len(times) + 1), np.cumsum(times), label=f"dim {d}")
    ax2.set_xlabel("entries (fastest first)")
    ax2.set_ylabel("cumulative seconds")
    ax2.legend(frameon=False, fontsize=8)
    fig.suptitle(f"catalog verification, seed {summary.seed}")
    fig.tight_layout()
    path = out_dir / "catalog_summary.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
