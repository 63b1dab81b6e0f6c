"""Ground-state energy error versus basis size, log scale, shell bands."""

from __future__ import annotations

import argparse
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import ValidationError, load_csv, save_figure

SHELL_NAMES = ("s", "p", "d", "f")


def render_convergence(in_dir: str, out_file: str) -> list[str]:
    data = load_csv(os.path.join(in_dir, "converge.csv"),
                    ("N_GTO", "De", "E", "E-E_ref"))
    n = np.asarray(data["N_GTO"], dtype=float)
    de = np.asarray(data["De"], dtype=float)
    diff = np.asarray(data["E-E_ref"], dtype=float)
    if np.any(diff < 0):
        bad = int(np.argmin(diff))
        raise ValidationError(
            f"negative energy difference {diff[bad]:.3e} at N_GTO={n[bad]:g}, "
            f"De={de[bad]:g}: variational bound violated in the input data")

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    rungs = np.unique(n)
    for val in np.unique(de):
        sel = de == val
        order = np.argsort(n[sel])
        ax.plot(n[sel][order], diff[sel][order], "o-",
                label=rf"$D_e = {val:g}\,\hbar\omega$")
    ax.set_yscale("log")
    # shell bands: each rung adds the next Cartesian shell
    bounds = np.concatenate([[0.0], rungs])
    for i in range(len(rungs)):
        ax.axvspan(bounds[i], bounds[i + 1], color=f"{0.97 - 0.05 * i}", zorder=0)
        if i < len(SHELL_NAMES):
            ax.text(0.5 * (bounds[i] + bounds[i + 1]), ax.get_ylim()[1],
                    SHELL_NAMES[i], ha="center", va="bottom")
    ax.set_xlabel(r"$N_{GTO}$")
    ax.set_ylabel(r"$E_0 - E_0^{ref}$ ($\hbar\omega$)")
    ax.legend()
    paths = save_figure(fig, out_file)
    plt.close(fig)
    return paths


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="basis-convergence figure")
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", dest="out_file", required=True)
    args = ap.parse_args(argv)
    for p in render_convergence(args.in_dir, args.out_file):
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
