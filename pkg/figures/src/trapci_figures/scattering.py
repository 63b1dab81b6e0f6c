"""Scattering length versus potential depth, with resonance-pole markers."""

from __future__ import annotations

import argparse
import os
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, load_csv, save_figure


def render_scattering(in_dir: str, out_file: str, clip: float = 8.0) -> list[str]:
    data = load_csv(os.path.join(in_dir, "scatter.csv"), ("De_hw", "as_dho"))
    de = np.asarray(data["De_hw"])
    a = np.asarray(data["as_dho"])

    poles_path = os.path.join(in_dir, "poles.csv")
    poles: list[float] = []
    if os.path.exists(poles_path):
        pdata = load_csv(poles_path, ("De_hw",))
        poles = [float(p) for p in pdata["De_hw"]]
    else:
        warnings.warn("poles.csv not found; rendering the curve only")

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    # split the curve at the poles so the divergences are not joined
    edges = [de.min() - 1.0] + sorted(poles) + [de.max() + 1.0]
    for lo, hi in zip(edges[:-1], edges[1:]):
        seg = (de > lo) & (de < hi)
        if np.any(seg):
            ax.plot(de[seg], np.clip(a[seg], -clip, clip), color="tab:blue", lw=1.5)
    for i, p in enumerate(poles):
        ax.axvline(p, color="tab:orange", ls="-.", lw=1.2,
                   label="pole" if i == 0 else None)
    # shaded depth regimes: no bound state before the first pole, one after
    if poles:
        ax.axvspan(de.min(), poles[0], color="0.85", zorder=0)
        ax.axvspan(poles[0], min(poles[1] if len(poles) > 1 else de.max(), de.max()),
                   color="lightblue", alpha=0.5, zorder=0)
    ax.axhline(0.0, color="0.4", lw=0.6)
    ax.set_xlim(de.min(), de.max())
    ax.set_ylim(-clip, clip)
    ax.set_xlabel(r"$D_e$ ($\hbar\omega$)")
    ax.set_ylabel(r"$a_s$ ($d_{ho}$)")
    if poles:
        ax.legend(loc="upper right")
    paths = save_figure(fig, out_file)
    plt.close(fig)
    return paths


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="scattering-length figure")
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", dest="out_file", required=True)
    args = ap.parse_args(argv)
    for p in render_scattering(args.in_dir, args.out_file):
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
