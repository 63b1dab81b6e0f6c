"""Workflow drivers behind the CLI subcommands.

Each driver consumes a RunConfig, writes deterministic CSV artifacts (header
row, UTF-8, floats at 12 significant digits), and returns the written paths.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from . import ci as ci_mod
from . import reference as ref_mod
from .config import RunConfig
from .errors import ConfigurationError
from .model import BasisSet, MorseParams, basis_ladder
from .onebody import core_hamiltonian, overlap_matrix
from .twobody import IntegralTensor, build_integral_tensor, load_or_build


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(x if isinstance(x, str) else _fmt(x) for x in row) + "\n")
    return path


def _de_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """Log-spaced depth grid (denser at weak interaction)."""
    if n < 1 or hi <= lo:
        raise ConfigurationError("empty or inverted De range")
    if n == 1:
        return np.array([lo])
    return np.geomspace(lo, hi, n)


# -- scatter ------------------------------------------------------------------

def run_scatter(cfg: RunConfig) -> list[str]:
    """Scattering length versus potential depth, plus the pole list."""
    lo, hi = cfg.de_range
    if cfg.n_de < 1 or hi <= lo or lo < 0:
        raise ConfigurationError(
            f"scatter needs a non-empty De range, got [{lo}, {hi}] x {cfg.n_de}")
    grid = np.linspace(lo, hi, cfg.n_de)
    rows = []
    for de in grid:
        res = ref_mod.scattering_length(cfg.morse.with_de(float(de)))
        rows.append((de, res.as_dho))
    out = [_write_csv(os.path.join(cfg.out_dir, "scatter.csv"),
                      ["De_hw", "as_dho"], rows)]
    poles = ref_mod.pole_positions(lo, hi, cfg.morse.Rm, cfg.morse.am)
    out.append(_write_csv(os.path.join(cfg.out_dir, "poles.csv"),
                          ["De_hw"], [(p,) for p in poles]))
    return out


# -- reference ----------------------------------------------------------------

def run_reference(cfg: RunConfig) -> list[str]:
    rows = []
    for de in cfg.de_values:
        res = ref_mod.compose_totals(cfg.morse.with_de(float(de)))
        for label, L, e in res.entries:
            rows.append((de, label, L, e))
    return [_write_csv(os.path.join(cfg.out_dir, "reference.csv"),
                       ["De_hw", "label", "L", "E_hw"], rows)]


# -- CI pipeline --------------------------------------------------------------

@dataclass
class CiRun:
    basis: BasisSet
    space: ci_mod.ConfigurationSpace
    matrices: ci_mod.CiMatrices      # h_two at unit depth
    timings: dict
    integral_count: int


def prepare_ci(cfg: RunConfig, basis: BasisSet | None = None) -> CiRun:
    """Integrals and matrix assembly, with the interaction block at unit depth.

    The interaction tensor is linear in the potential depth, so one assembly
    serves every De; solving scales h_two by De.
    """
    basis = basis if basis is not None else cfg.basis()
    timings = {}
    t0 = time.perf_counter()
    s = overlap_matrix(basis)
    h = core_hamiltonian(basis, cfg.trap)
    timings["one_body_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    unit = cfg.morse.with_de(1.0)
    tensor = load_or_build(basis, unit, cfg.solver.screening_threshold,
                           cache_dir=cfg.cache_dir, workers=cfg.threads)
    timings["integrals_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    space = ci_mod.enumerate_configurations(basis.n)
    mats = ci_mod.assemble(space, s, h, tensor)
    timings["assembly_s"] = time.perf_counter() - t0
    return CiRun(basis, space, mats, timings, len(tensor.values))


def solve_at_depth(run: CiRun, cfg: RunConfig, de: float,
                   both_routes: bool = False) -> ci_mod.CiSolution:
    t0 = time.perf_counter()
    mats = ci_mod.CiMatrices(run.matrices.overlap, run.matrices.h_one,
                             de * run.matrices.h_two)
    sol = ci_mod.solve(mats, cfg.solver.lindep_threshold,
                       cfg.solver.degeneracy_tol, both_routes=both_routes)
    run.timings[f"solve_De={de:g}_s"] = time.perf_counter() - t0
    return sol


def _spectrum_rows(de, as_dho, sol, n_states=None):
    n = len(sol.energies) if n_states is None else min(n_states, len(sol.energies))
    inv = 1.0 / as_dho if as_dho != 0 else math.inf
    return [(de, as_dho, inv, str(i), str(int(sol.cluster_id[i])),
             str(int(sol.l_guess[i])), sol.energies[i]) for i in range(n)]


SPECTRUM_HEADER = ["De_hw", "as_dho", "inv_as", "state_index", "cluster_id",
                   "L_guess", "E_hw"]


def run_ci(cfg: RunConfig) -> list[str]:
    """Single-depth CI: spectrum CSV plus a timing/metadata report."""
    wall0 = time.perf_counter()
    run = prepare_ci(cfg)
    de = cfg.morse.De
    sol = solve_at_depth(run, cfg, de, both_routes=True)
    a_s = ref_mod.scattering_length(cfg.morse).as_dho
    rows = _spectrum_rows(de, a_s, sol)
    paths = [_write_csv(os.path.join(cfg.out_dir, "spectrum.csv"),
                        SPECTRUM_HEADER, rows)]
    report = {
        "basis": run.basis.name,
        "n_gto": run.basis.n,
        "n_cf": run.space.n_cf,
        "kept_dim": sol.kept_dim,
        "integral_count": run.integral_count,
        "wall_s": time.perf_counter() - wall0,
        "timings": run.timings,
        "route_agreement": None if sol.energies_congruence is None else float(
            np.max(np.abs(sol.energies - np.sort(sol.energies_congruence))
                   / np.abs(sol.energies))),
    }
    tpath = os.path.join(cfg.out_dir, "timing.json")
    with open(tpath, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    paths.append(tpath)
    return paths


# -- sweep --------------------------------------------------------------------

def match_reference_states(sol: ci_mod.CiSolution,
                           ref: ref_mod.ReferenceResult) -> dict:
    """Map reference labels onto CI states by multiplicity class and energy.

    Each labeled reference level is matched to the nearest CI degeneracy
    cluster whose guessed L agrees; the cluster-mean energy represents the
    matched state.  MS2 is matched twice (its L=0 and L=2 members split in a
    finite basis).
    """
    clusters = {}
    for cid in np.unique(sol.cluster_id):
        members = np.where(sol.cluster_id == cid)[0]
        clusters[int(cid)] = {
            "mean": float(np.mean(sol.energies[members])),
            "size": len(members),
            "l": int(sol.l_guess[members[0]]),
        }

    def nearest(e_ref, l_want, exclude=()):
        best, best_d = None, None
        for cid, info in clusters.items():
            if cid in exclude:
                continue
            if l_want is not None and info["l"] != l_want:
                continue
            d = abs(info["mean"] - e_ref)
            if best_d is None or d < best_d:
                best, best_d = cid, d
        if best is None:
            return nearest(e_ref, None, exclude)
        return best

    out = {}
    used = []
    targets = [(lab, ref.angular_momentum(lab), ref.energy(lab))
               for lab, _, _ in ref.entries]
    # MS2 appears once in the reference (exactly degenerate L=0/L=2); track both
    for lab, L, e_ref in targets:
        cid = nearest(e_ref, L)
        out[lab] = (clusters[cid]["mean"], e_ref, L, cid)
        used.append(cid)
        if lab == "MS2":
            cid2 = nearest(e_ref, 2, exclude=used)
            out["MS2_L2"] = (clusters[cid2]["mean"], e_ref, 2, cid2)
            used.append(cid2)
    return out


def run_sweep(cfg: RunConfig, de_values=None) -> list[str]:
    """CI + reference energies keyed by d_ho/a_s, with per-state deviations."""
    if de_values is None:
        de_values = (cfg.de_values if cfg.de_values else
                     tuple(_de_grid(*cfg.de_range, cfg.sweep_n_de)))
    if not de_values:
        raise ConfigurationError("sweep needs a non-empty De list")
    run = prepare_ci(cfg)
    rows, spectrum_rows, failures = [], [], []
    for de in de_values:
        try:
            de = float(de)
            a_s = ref_mod.scattering_length(cfg.morse.with_de(de)).as_dho
            ref = ref_mod.compose_totals(cfg.morse.with_de(de))
            sol = solve_at_depth(run, cfg, de)
            matched = match_reference_states(sol, ref)
            inv = 1.0 / a_s
            for lab in ("MGS", "MS1", "MS2", "MS2_L2", "TS1", "TS2", "TS3"):
                if lab not in matched:
                    continue
                e_ci, e_ref, L, _ = matched[lab]
                rows.append((de, a_s, inv, lab, str(L), e_ci, e_ref, e_ci - e_ref))
            spectrum_rows.extend(_spectrum_rows(de, a_s, sol, n_states=40))
        except Exception as err:  # noqa: BLE001 - sweep must continue per depth
            failures.append((de, f"{type(err).__name__}: {err}"))
    paths = [_write_csv(os.path.join(cfg.out_dir, "sweep.csv"),
                        ["De_hw", "as_dho", "inv_as", "label", "L",
                         "E_ci_hw", "E_ref_hw", "dev_hw"], rows),
             _write_csv(os.path.join(cfg.out_dir, "sweep_spectrum.csv"),
                        SPECTRUM_HEADER, spectrum_rows)]
    if failures:
        paths.append(_write_csv(os.path.join(cfg.out_dir, "sweep_failures.csv"),
                                ["De_hw", "error"],
                                [(d, msg) for d, msg in failures]))
    return paths


# -- convergence ladder ---------------------------------------------------------

def run_converge(cfg: RunConfig, rungs=None) -> list[str]:
    """Ground-state energy along the cumulative shell ladder s, sp, spd, spdf."""
    rows = []
    refs = {de: ref_mod.compose_totals(cfg.morse.with_de(float(de))).energy("MGS")
            for de in cfg.de_values}
    for rung in (basis_ladder("GTO") if rungs is None else rungs):
        run = prepare_ci(cfg, basis=rung)
        for de in cfg.de_values:
            sol = solve_at_depth(run, cfg, float(de))
            e0 = float(sol.energies[0])
            rows.append((str(rung.n), de, e0, e0 - refs[de]))
    return [_write_csv(os.path.join(cfg.out_dir, "converge.csv"),
                       ["N_GTO", "De", "E", "E-E_ref"], rows)]


# -- density ------------------------------------------------------------------

def _select_state_for_label(sol: ci_mod.CiSolution, ref: ref_mod.ReferenceResult,
                            label: str):
    matched = match_reference_states(sol, ref)
    if label not in matched:
        raise ConfigurationError(
            f"unknown state label {label!r}; available: {sorted(matched)}")
    cid = matched[label][3]
    return [int(i) for i in np.where(sol.cluster_id == cid)[0]]


def run_density(cfg: RunConfig) -> list[str]:
    """2D density cut plus diagonal/antidiagonal cuts, CI and reference."""
    label = cfg.density_state
    z = np.linspace(-cfg.density_extent, cfg.density_extent, cfg.density_points)
    run = prepare_ci(cfg)
    sol = solve_at_depth(run, cfg, cfg.morse.De)
    ref = ref_mod.compose_totals(cfg.morse)

    if label.isdigit():
        members = [int(label)]
        ref_cut = None
    else:
        members = _select_state_for_label(sol, ref, label)
        base = "MS2" if label.startswith("MS2") else label
        ref_cut = ref_mod.reference_density_cut(cfg.morse, base, z)

    if len(members) == 1:
        cut = ci_mod.evaluate_density_cut(sol, members[0], run.basis, z, run.space)
    else:
        cut = ci_mod.mixed_cut_in_cluster(
            sol, members, run.basis, z, run.space,
            reference=None if ref_cut is None else ref_cut.psi)

    paths = []
    grid_rows = [(z[i], z[j], cut.density[i, j])
                 for i in range(len(z)) for j in range(len(z))]
    paths.append(_write_csv(os.path.join(cfg.out_dir, "density_ci.csv"),
                            ["z1_dho", "z2_dho", "density"], grid_rows))
    paths.append(_write_csv(os.path.join(cfg.out_dir, "cut_diag_ci.csv"),
                            ["z_dho", "density"], list(zip(z, cut.diag))))
    paths.append(_write_csv(os.path.join(cfg.out_dir, "cut_antidiag_ci.csv"),
                            ["z_dho", "density"], list(zip(z, cut.antidiag))))
    if ref_cut is not None:
        grid_rows = [(z[i], z[j], ref_cut.density[i, j])
                     for i in range(len(z)) for j in range(len(z))]
        paths.append(_write_csv(os.path.join(cfg.out_dir, "density_ref.csv"),
                                ["z1_dho", "z2_dho", "density"], grid_rows))
        paths.append(_write_csv(os.path.join(cfg.out_dir, "cut_diag_ref.csv"),
                                ["z_dho", "density"], list(zip(z, ref_cut.diag))))
        paths.append(_write_csv(os.path.join(cfg.out_dir, "cut_antidiag_ref.csv"),
                                ["z_dho", "density"],
                                list(zip(z, ref_cut.antidiag))))
    return paths
