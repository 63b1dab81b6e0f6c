"""Spectrum and deviation panels versus inverse scattering length."""

from __future__ import annotations

import argparse
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import load_csv, save_figure

LABEL_ORDER = ("MGS", "MS1", "MS2", "MS2_L2", "TS1", "TS2", "TS3")


def render_spectrum(in_dir: str, out_file: str) -> list[str]:
    data = load_csv(os.path.join(in_dir, "sweep.csv"),
                    ("De_hw", "inv_as", "label", "E_ci_hw", "E_ref_hw", "dev_hw"))
    inv = np.asarray(data["inv_as"], dtype=float)
    label = np.asarray(data["label"])
    e_ci = np.asarray(data["E_ci_hw"], dtype=float)
    e_ref = np.asarray(data["E_ref_hw"], dtype=float)
    dev = np.asarray(data["dev_hw"], dtype=float)

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 7.2), sharex=True,
                                   height_ratios=[2, 1])
    for guide in (3.0, 5.0, 7.0):
        ax1.axhline(guide, color="0.25", ls="--", lw=0.8, zorder=0)
    for lab in LABEL_ORDER:
        sel = label == lab
        if not np.any(sel):
            continue
        order = np.argsort(inv[sel])
        x = inv[sel][order]
        line, = ax1.plot(x, e_ci[sel][order], "o-", ms=4, label=lab)
        ax1.plot(x, e_ref[sel][order], "--", color=line.get_color(), lw=1.0,
                 alpha=0.7)
        ax2.plot(x, dev[sel][order], "o-", ms=4, color=line.get_color())
    ax1.set_ylabel(r"$E$ ($\hbar\omega$)")
    ax1.legend(ncols=4, fontsize=8)
    ax2.axhline(0.0, color="0.4", lw=0.6)
    ax2.set_xlabel(r"$d_{ho}/a_s$")
    ax2.set_ylabel(r"$E^{CI} - E^{ref}$ ($\hbar\omega$)")
    paths = save_figure(fig, out_file)
    plt.close(fig)
    return paths


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="spectrum + deviation figure")
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", dest="out_file", required=True)
    args = ap.parse_args(argv)
    for p in render_spectrum(args.in_dir, args.out_file):
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
