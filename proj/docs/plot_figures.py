"""Plot the CSV files written by `gaussqfi --config figures/<name>.yaml --out <dir>/<name>.csv`.

usage: python3 docs/plot_figures.py <csv dir> [<png dir>]
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

REFERENCE = {"mzi": ("MZI", "r--"), "snl": ("SNL", "0.5")}


def plot_cfi(df, ax):
    for col, style in [("ic_no_a", "-"), ("ic_all", "-"), ("qfi_no_a", "k--"), ("qfi_all", "b--"),
                       ("qfi_eta1", "k:"), ("mzi", "r--"), ("snl", "r:")]:
        if col in df and df[col].notna().any():
            ax.plot(df["phi"], df[col], style, label=col)
    ax.set_xlabel("phi")
    ax.set_ylabel("Fisher information")


def plot_t_critical(df, ax):
    ax.semilogx(df["n_phi"], df["t_critical_formula"], label="closed form")
    ax.semilogx(df["n_phi"], df["t_critical_numeric"], "o", mfc="none", label="optimizer")
    ax.set_xlabel("N_phi")
    ax.set_ylabel("T_C")


def plot_sweep(df, ax):
    # A series column, when present, comes before the axis.
    series, axis = (df.columns[0], df.columns[1]) if df.columns[2] == "r1_opt" else (None, df.columns[0])
    df = df[df["status"] == "ok"]
    groups = df.groupby(series) if series else [(None, df)]
    for value, g in groups:
        y = g["qfi"]
        if axis == "varphi":
            y = y / (g["snl"] * (g["snl"] / 4 + 1))
        ax.plot(g[axis], y, label=f"{series}={value:g}" if series else "qfi")
    for col in df.columns:
        if col.startswith("qfi_"):
            ax.plot(df[axis], df[col], ":", label=col)
    if series is None:
        for col, (label, style) in REFERENCE.items():
            ax.plot(df[axis], df[col], style, label=label)
    ax.set_xlabel(axis)
    ax.set_ylabel("QFI / 4N(N+1)" if axis == "varphi" else "QFI")


def main():
    src = Path(sys.argv[1])
    dst = Path(sys.argv[2]) if len(sys.argv) > 2 else src
    dst.mkdir(parents=True, exist_ok=True)
    for path in sorted(src.glob("*.csv")):
        if path.stat().st_size == 0:
            continue
        df = pd.read_csv(path)
        fig, ax = plt.subplots(figsize=(6, 4))
        if "ic_no_a" in df:
            plot_cfi(df, ax)
        elif "t_critical_formula" in df:
            plot_t_critical(df, ax)
        else:
            plot_sweep(df, ax)
        ax.set_title(path.stem)
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(dst / f"{path.stem}.png", dpi=120)
        plt.close(fig)
        print(dst / f"{path.stem}.png")


if __name__ == "__main__":
    main()
