"""Run configuration: JSON parsing, unit normalization, serialization.

All configuration quantities are in (d_ho, hbar*omega) units: lengths in
d_ho, energies in hbar*omega, Gaussian exponents in 1/d_ho^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .model import (BasisSet, GaussianWell, MorseParams, ShellSpec, TrapParams,
                    STANDARD_AM_DHO, STANDARD_RM_DHO, expand_shells, named_basis)

STUDY_DE_VALUES = (3.0, 5.0, 10.0, 13.0)


@dataclass
class SolverOptions:
    lindep_threshold: float = 3e-8
    degeneracy_tol: float = 1e-4
    screening_threshold: float = 1e-14


@dataclass
class RunConfig:
    """One workflow invocation: physics, basis, solver, and output options."""

    trap: TrapParams = field(default_factory=TrapParams)
    morse: MorseParams = field(default_factory=lambda: MorseParams(
        3.0, STANDARD_RM_DHO, STANDARD_AM_DHO))
    basis_name: str = "GTO"
    shells: tuple[ShellSpec, ...] = ()
    solver: SolverOptions = field(default_factory=SolverOptions)
    out_dir: str = "out"
    threads: int = 1
    cache_dir: str | None = None
    # workflow-specific knobs
    de_values: tuple[float, ...] = STUDY_DE_VALUES
    de_range: tuple[float, float] = (0.5, 15.0)
    n_de: int = 200
    sweep_n_de: int = 60
    density_state: str = "MGS"
    density_extent: float = 3.0
    density_points: int = 121

    def basis(self) -> BasisSet:
        if self.shells:
            return expand_shells(self.shells, name=self.basis_name or "custom")
        return named_basis(self.basis_name)

    def to_dict(self) -> dict:
        out = {
            "trap": {"kind": self.trap.kind, "omega": self.trap.omega},
            "morse": {"De": self.morse.De, "Rm": self.morse.Rm, "am": self.morse.am},
            "basis": {"name": self.basis_name},
            "solver": {
                "lindep_threshold": self.solver.lindep_threshold,
                "degeneracy_tol": self.solver.degeneracy_tol,
                "screening_threshold": self.solver.screening_threshold,
            },
            "out_dir": self.out_dir,
            "threads": self.threads,
            "workflow": {
                "de_values": list(self.de_values),
                "de_range": list(self.de_range),
                "n_de": self.n_de,
                "sweep_n_de": self.sweep_n_de,
                "density_state": self.density_state,
                "density_extent": self.density_extent,
                "density_points": self.density_points,
            },
        }
        if self.trap.kind == "gaussian_wells":
            out["trap"]["wells"] = [
                {"center": list(w.center), "depth": w.depth, "width": w.width}
                for w in self.trap.wells]
        if self.shells:
            out["basis"]["shells"] = [
                {"sigma": sp.sigma, "exponents": list(sp.exponents),
                 "center": list(sp.center),
                 **({"absolute_units": True} if sp.absolute_units else {})}
                for sp in self.shells]
        if self.cache_dir:
            out["cache_dir"] = self.cache_dir
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        cfg = cls()
        trap = data.get("trap", {})
        wells = tuple(GaussianWell(tuple(w["center"]), w["depth"], w["width"])
                      for w in trap.get("wells", ()))
        cfg.trap = TrapParams(kind=trap.get("kind", "harmonic_isotropic"),
                              omega=trap.get("omega", 1.0), wells=wells)
        morse = data.get("morse", {})
        cfg.morse = MorseParams(De=morse.get("De", 3.0),
                                Rm=morse.get("Rm", STANDARD_RM_DHO),
                                am=morse.get("am", STANDARD_AM_DHO))
        basis = data.get("basis", {})
        cfg.basis_name = basis.get("name", "GTO")
        cfg.shells = tuple(
            ShellSpec(sigma=sp["sigma"], exponents=tuple(sp["exponents"]),
                      center=tuple(sp.get("center", (0.0, 0.0, 0.0))),
                      absolute_units=sp.get("absolute_units", False))
            for sp in basis.get("shells", ()))
        solver = data.get("solver", {})
        cfg.solver = SolverOptions(
            lindep_threshold=solver.get("lindep_threshold", 3e-8),
            degeneracy_tol=solver.get("degeneracy_tol", 1e-4),
            screening_threshold=solver.get("screening_threshold", 1e-14))
        cfg.out_dir = data.get("out_dir", "out")
        cfg.threads = int(data.get("threads", 1))
        cfg.cache_dir = data.get("cache_dir")
        wf = data.get("workflow", {})
        cfg.de_values = tuple(wf.get("de_values", STUDY_DE_VALUES))
        cfg.de_range = tuple(wf.get("de_range", (0.5, 15.0)))
        cfg.n_de = int(wf.get("n_de", 200))
        cfg.sweep_n_de = int(wf.get("sweep_n_de", 60))
        cfg.density_state = wf.get("density_state", "MGS")
        cfg.density_extent = float(wf.get("density_extent", 3.0))
        cfg.density_points = int(wf.get("density_points", 121))
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigurationError(f"config is not valid JSON: {err}") from err
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())
