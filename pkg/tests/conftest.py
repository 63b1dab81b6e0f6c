"""Shared fixtures.

The full N_GTO=80 pipeline is expensive, so one session-scoped run (unit
interaction depth, matrices assembled once) backs every test that needs it;
solutions at specific depths are derived from it by scaling the interaction
block.
"""

import time

import numpy as np
import pytest

from trapci import ci as ci_mod
from trapci.model import TrapParams, named_basis, standard_morse
from trapci.onebody import core_hamiltonian, overlap_matrix
from trapci.twobody import build_integral_tensor


class FullRun:
    def __init__(self, basis_name: str):
        self.basis = named_basis(basis_name)
        self.trap = TrapParams()
        t0 = time.perf_counter()
        self.s = overlap_matrix(self.basis)
        self.h = core_hamiltonian(self.basis, self.trap)
        self.t_onebody = time.perf_counter() - t0
        t0 = time.perf_counter()
        self.unit_tensor = build_integral_tensor(self.basis, standard_morse(1.0),
                                                 1e-14)
        self.t_integrals = time.perf_counter() - t0
        self.space = ci_mod.enumerate_configurations(self.basis.n)
        t0 = time.perf_counter()
        self.mats = ci_mod.assemble(self.space, self.s, self.h, self.unit_tensor)
        self.t_assembly = time.perf_counter() - t0
        self._solutions = {}
        self.t_solve = {}

    def solve(self, de: float, both_routes: bool = False) -> ci_mod.CiSolution:
        key = (float(de), both_routes)
        if key not in self._solutions:
            mats = ci_mod.CiMatrices(self.mats.overlap, self.mats.h_one,
                                     de * self.mats.h_two)
            t0 = time.perf_counter()
            self._solutions[key] = ci_mod.solve(mats, both_routes=both_routes)
            self.t_solve[key] = time.perf_counter() - t0
        return self._solutions[key]


@pytest.fixture(scope="session")
def gto_run():
    return FullRun("GTO")


@pytest.fixture(scope="session")
def gto2_run():
    return FullRun("GTO-2")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
