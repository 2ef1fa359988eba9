"""Figure builders: pure views of the engine's CSV columns.

Each ``plot_*`` reads a documented schema, draws it, writes both SVG and PNG
next to the requested output path, and returns the plotted series so tests
can check the image content against the file bit for bit. Rendering is
headless (Agg) and deterministic for fixed input.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "fvawwr-plots"

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, Table, read_table, require

FIGURE_KINDS = ("ratio_sweep", "exposure_profile", "flag_grid_bar")


def save_both(fig, out_path) -> list:
    """Write the figure as both vector (SVG) and raster (PNG) siblings."""
    out = Path(out_path)
    if out.suffix.lower() not in (".svg", ".png"):
        raise SchemaError(f"output must end in .svg or .png, got {out.name}")
    written = []
    for suffix in (".svg", ".png"):
        target = out.with_suffix(suffix)
        fig.savefig(target, metadata={"Date": None} if suffix == ".svg" else None)
        written.append(target)
    plt.close(fig)
    return written


def build_ratio_sweep(table: Table):
    ratio_cols = [c for c in table.header if c.startswith("ratio")]
    if not ratio_cols:
        raise SchemaError(f"sweep file has no ratio columns; header {table.header}")
    x_name = table.header[0]
    x = table[x_name]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    series = {}
    for col in ratio_cols:
        y = table[col]
        label = col[len("ratio@"):] if col.startswith("ratio@") else col
        ax.plot(x, y, marker="o", markersize=3.5, label=label)
        series[col] = y
    ax.axhline(1.0, color="0.4", linewidth=0.8, linestyle="--")
    lo = min(float(np.min(v)) for v in series.values())
    hi = max(float(np.max(v)) for v in series.values())
    pad = 0.02 * max(hi - lo, 0.02)
    ax.set_ylim(min(lo, 1.0) - pad, max(hi, 1.0) + pad)  # keep y=1 visible
    ax.set_xlabel({"rho_rc": r"$\rho_{r,C}$", "rho": "correlation"}.get(x_name, x_name))
    ax.set_ylabel(r"FVA / FVA$^\perp$")
    if len(ratio_cols) > 1:
        ax.legend(title=r"$\rho_{r,I}$", fontsize=8)
    fig.tight_layout()
    return fig, {"x": x, **series}


def plot_ratio_sweep(csv_path, out_path):
    fig, series = build_ratio_sweep(read_table(csv_path))
    save_both(fig, out_path)
    return series


def build_exposure_profile(table: Table):
    require(table, ("u", "epe_indep", "epe_wwr", "se_indep", "se_wwr"),
            "exposure profile")
    u = table["u"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    for ax, name, se_name, title in (
        (ax1, "epe_indep", "se_indep", r"EPE$^\perp$(u)"),
        (ax2, "epe_wwr", "se_wwr", r"EPE$^{WWR}$(u)"),
    ):
        y, se = table[name], table[se_name]
        ax.plot(u, y, linewidth=1.2)
        ax.fill_between(u, y - se, y + se, alpha=0.3, linewidth=0)
        ax.axhline(0.0, color="0.4", linewidth=0.8)
        ax.set_xlabel("u (years)")
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return fig, {"u": u, "epe_indep": table["epe_indep"], "epe_wwr": table["epe_wwr"]}


def plot_exposure_profile(csv_path, out_path):
    fig, series = build_exposure_profile(read_table(csv_path))
    save_both(fig, out_path)
    return series


def build_flag_grid_bar(table: Table):
    require(table, ("spread", "tau_i", "tau_c", "fva_indep"), "flag grid")
    labels, values, kinds = [], [], []
    for i in range(len(table["fva_indep"])):
        labels.append(f"{table['tau_i'][i]}/{table['tau_c'][i]}")
        values.append(float(table["fva_indep"][i]))
        kinds.append(str(table["spread"][i]))
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    xs = np.arange(len(values))
    colors = ["#1f77b4" if k == "stochastic" else "#ff7f0e" for k in kinds]
    ax.bar(xs, values, color=colors)
    ax.set_xticks(xs, [f"{k[:4]} {l}" for k, l in zip(kinds, labels)],
                  rotation=45, ha="right", fontsize=8)
    ax.set_ylabel(r"FVA$^\perp$")
    fig.tight_layout()
    return fig, {"fva_indep": np.array(values)}


def plot_flag_grid_bar(csv_path, out_path):
    fig, series = build_flag_grid_bar(read_table(csv_path))
    save_both(fig, out_path)
    return series


RENDERERS = {
    "ratio_sweep": plot_ratio_sweep,
    "exposure_profile": plot_exposure_profile,
    "flag_grid_bar": plot_flag_grid_bar,
}
