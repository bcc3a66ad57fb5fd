"""Figure and CSV rendering for CLI reports.

When a report directory is requested, each analysed channel gets a
spectrum figure (Choi and partially transposed Choi eigenvalues) and a
Choi heatmap next to a delimited certificate summary; verification suites
get a per-instance results table and a pass/fail chart.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .matcore import partial_transpose
from .reprs import KrausRep, choi_from_kraus

__all__ = ["render_analysis", "render_verify"]


def _spectrum_figure(path: str, k: KrausRep) -> None:
    choi = choi_from_kraus(k).mat
    pt = partial_transpose(choi, (k.d_in, k.d_out))
    ev_choi = np.sort(np.linalg.eigvalsh((choi + choi.conj().T) / 2))[::-1]
    ev_pt = np.sort(np.linalg.eigvalsh((pt + pt.conj().T) / 2))[::-1]

    fig, axes = plt.subplots(1, 2, figsize=(8, 3), sharey=True)
    for ax, vals, title in (
        (axes[0], ev_choi, "Choi spectrum"),
        (axes[1], ev_pt, "partial-transpose spectrum"),
    ):
        colors = ["tab:red" if v < 0 else "tab:blue" for v in vals]
        ax.bar(range(1, len(vals) + 1), vals, color=colors)
        ax.axhline(0.0, color="black", linewidth=0.8)
        ax.set_title(title)
        ax.set_xlabel("index")
    axes[0].set_ylabel("eigenvalue")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _choi_heatmap(path: str, k: KrausRep) -> None:
    choi = choi_from_kraus(k).mat
    fig, ax = plt.subplots(figsize=(4, 3.5))
    im = ax.imshow(np.abs(choi), cmap="viridis")
    ax.set_title(f"|Choi| ({k.d_in} -> {k.d_out})")
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_analysis(outdir: str, stem: str, k: KrausRep, cert_rows: list[dict]) -> list[str]:
    """Write the figures and the delimited certificate summary for one input.

    cert_rows carry at least: input, digest, property, verdict, detail.
    Returns the written paths.
    """
    os.makedirs(outdir, exist_ok=True)
    paths = []
    spec_path = os.path.join(outdir, f"{stem}_spectrum.png")
    _spectrum_figure(spec_path, k)
    paths.append(spec_path)
    heat_path = os.path.join(outdir, f"{stem}_choi.png")
    _choi_heatmap(heat_path, k)
    paths.append(heat_path)

    csv_path = os.path.join(outdir, f"{stem}_certificates.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["input", "digest", "property", "verdict", "detail"]
        )
        writer.writeheader()
        for row in cert_rows:
            writer.writerow(row)
    paths.append(csv_path)
    return paths


def render_verify(outdir: str, suite: str, rows: list[dict]) -> list[str]:
    """Write the per-instance results table and a pass/fail chart for a suite.

    rows carry: instance, case, detail, ok (bool) and optionally residual.
    """
    os.makedirs(outdir, exist_ok=True)
    paths = []

    csv_path = os.path.join(outdir, f"{suite}_results.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["instance", "case", "detail", "ok", "residual"]
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {
                    "instance": row["instance"],
                    "case": row["case"],
                    "detail": row.get("detail", ""),
                    "ok": row["ok"],
                    "residual": row.get("residual", ""),
                }
            )
    paths.append(csv_path)

    passed = sum(1 for r in rows if r["ok"])
    failed = len(rows) - passed
    fig, axes = plt.subplots(1, 2, figsize=(8, 3))
    axes[0].bar(["pass", "fail"], [passed, failed], color=["tab:green", "tab:red"])
    axes[0].set_title(f"{suite}: {passed}/{len(rows)} checks pass")
    residuals = [r["residual"] for r in rows if isinstance(r.get("residual"), float)]
    if residuals:
        axes[1].semilogy(range(1, len(residuals) + 1), np.maximum(residuals, 1e-18), ".")
        axes[1].set_title("residuals")
        axes[1].set_xlabel("check")
    else:
        axes[1].axis("off")
    fig.tight_layout()
    fig_path = os.path.join(outdir, f"{suite}_summary.png")
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    paths.append(fig_path)
    return paths
