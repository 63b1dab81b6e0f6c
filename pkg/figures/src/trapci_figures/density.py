"""Density-cut heatmaps with CI-versus-reference 1D cut overlays."""

from __future__ import annotations

import argparse
import glob
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, load_csv, save_figure


def _load_grid(path: str):
    data = load_csv(path, ("z1_dho", "z2_dho", "density"))
    z1 = np.asarray(data["z1_dho"], dtype=float)
    d = np.asarray(data["density"], dtype=float)
    n = int(round(math.sqrt(len(d))))
    if n * n != len(d):
        raise SchemaError(f"{path}: {len(d)} rows do not form a square grid")
    z = np.unique(z1)
    if len(z) != n:
        raise SchemaError(f"{path}: grid axis has {len(z)} values for {n} rows")
    return z, d.reshape(n, n)


def _load_cut(path: str):
    data = load_csv(path, ("z_dho", "density"))
    return (np.asarray(data["z_dho"], dtype=float),
            np.asarray(data["density"], dtype=float))


def _density_dirs(in_dir: str) -> list[str]:
    if os.path.exists(os.path.join(in_dir, "density_ci.csv")):
        return [in_dir]
    subs = sorted(glob.glob(os.path.join(in_dir, "density_*")))
    subs = [s for s in subs if os.path.isdir(s)]
    if not subs:
        raise SchemaError(f"{in_dir}: no density_ci.csv and no density_* subdirectories")
    return subs


def render_density(in_dir: str, out_file: str) -> list[str]:
    dirs = _density_dirs(in_dir)
    rows = len(dirs)
    fig, axes = plt.subplots(rows, 3, figsize=(10.5, 3.2 * rows), squeeze=False)
    for r, d in enumerate(dirs):
        z, ci = _load_grid(os.path.join(d, "density_ci.csv"))
        ax = axes[r][0]
        im = ax.pcolormesh(z, z, ci.T, shading="auto", cmap="inferno", rasterized=True)
        fig.colorbar(im, ax=ax)
        ax.set_title(f"CI  [{os.path.basename(d) or d}]", fontsize=9)
        ax.set_xlabel(r"$z_1$ ($d_{ho}$)")
        ax.set_ylabel(r"$z_2$ ($d_{ho}$)")

        ref_path = os.path.join(d, "density_ref.csv")
        ax = axes[r][1]
        if os.path.exists(ref_path):
            zr, ref = _load_grid(ref_path)
            if ref.shape != ci.shape:
                raise SchemaError(
                    f"{d}: reference grid {ref.shape} does not match CI {ci.shape}")
            im = ax.pcolormesh(zr, zr, ref.T, shading="auto", cmap="inferno", rasterized=True)
            fig.colorbar(im, ax=ax)
            ax.set_title("reference", fontsize=9)
            ax.set_xlabel(r"$z_1$ ($d_{ho}$)")
        else:
            ax.set_axis_off()

        ax = axes[r][2]
        zc, diag_ci = _load_cut(os.path.join(d, "cut_diag_ci.csv"))
        ax.plot(zc, diag_ci, label="CI diag")
        anti_path = os.path.join(d, "cut_antidiag_ci.csv")
        if os.path.exists(anti_path):
            za, anti_ci = _load_cut(anti_path)
            ax.plot(za, anti_ci, ":", label="CI antidiag")
        ref_cut = os.path.join(d, "cut_diag_ref.csv")
        if os.path.exists(ref_cut):
            zr, diag_ref = _load_cut(ref_cut)
            ax.plot(zr, diag_ref, "--", label="ref diag")
        ax.set_xlabel(r"$z$ ($d_{ho}$)")
        ax.set_ylabel(r"$|\Psi|^2$")
        ax.legend(fontsize=8)
    fig.tight_layout()
    paths = save_figure(fig, out_file)
    plt.close(fig)
    return paths


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="density heatmap + cut figure")
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", dest="out_file", required=True)
    args = ap.parse_args(argv)
    for p in render_density(args.in_dir, args.out_file):
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
