"""Exact diagonalization of the lattice-gas Hamiltonian on tiny site sets.

Hard-core occupation basis (bitmask states, at most one particle per site):

    H = -1/4 sum_{r != s} pi(r-s) [n_r + n_s - a_r^+ a_s - a_s^+ a_r]
        + 1/2 sum_{r != s} psi(r-s) n_r n_s  -  mu sum_r n_r

with both sums over ordered pairs of distinct sites in the region and open
boundaries (no periodic images).  H commutes with the total particle number,
so the trace is accumulated sector by sector with dense symmetric
eigensolves; the 14-site cap keeps the largest sector at 3432 states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from loopgas.model import ModelParams, Potential, ValidationError, Vec

MAX_SITES = 14


@dataclass(frozen=True)
class HardCoreBasis:
    """Occupation basis over an ordered site list; state k occupies site i iff bit i of k."""

    sites: tuple[Vec, ...]

    def __post_init__(self):
        sites = tuple(tuple(s) for s in self.sites)
        if not sites:
            raise ValidationError("site set must be non-empty")
        if len(set(sites)) != len(sites):
            raise ValidationError("duplicate sites")
        if len(sites) > MAX_SITES:
            raise ValidationError(f"exact diagonalization limited to {MAX_SITES} sites")
        object.__setattr__(self, "sites", sites)

    @property
    def dim(self) -> int:
        return 1 << len(self.sites)

    def sector_states(self, k: int) -> list[int]:
        n = len(self.sites)
        return [s for s in range(1 << n) if bin(s).count("1") == k]


def _real_value(pot: Potential, r: Vec) -> float:
    val = pot.value(r)
    if abs(val.imag) > 0.0:
        raise ValidationError("exact diagonalization requires real potentials")
    return val.real


def build_hamiltonian(
    sites: Sequence[Vec], pi: Potential, psi: Potential, mu: float
) -> np.ndarray:
    """Dense Hermitian matrix of H over the full 2^N hard-core basis."""
    basis = HardCoreBasis(tuple(sites))
    n = len(basis.sites)
    dim = basis.dim
    H = np.zeros((dim, dim))
    pairs = []
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            diff = tuple(a - b for a, b in zip(basis.sites[i], basis.sites[k]))
            pairs.append((i, k, _real_value(pi, diff), _real_value(psi, diff)))
    for state in range(dim):
        diag = -mu * bin(state).count("1")
        for i, k, pv, wv in pairs:
            ni = state >> i & 1
            nk = state >> k & 1
            diag += -0.25 * pv * (ni + nk) + 0.5 * wv * ni * nk
            # each ordered pair carries both a_i^+ a_k and a_k^+ a_i; listing
            # one direction per ordered pair at weight 1/2 is equivalent
            if pv != 0.0 and nk == 1 and ni == 0:
                target = state ^ (1 << k) ^ (1 << i)
                H[target, state] += 0.5 * pv
        H[state, state] += diag
    return H


def partition_ed(sites: Sequence[Vec], params: ModelParams) -> float:
    """Z = Tr e^{-beta H} with mu = ln(z) / beta, summed sector by sector."""
    if params.z.imag != 0 or params.z.real <= 0:
        raise ValidationError("partition_ed requires real z > 0")
    basis = HardCoreBasis(tuple(tuple(s) for s in sites))
    n = len(basis.sites)
    mu = params.mu
    pairs = []
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            diff = tuple(a - b for a, b in zip(basis.sites[i], basis.sites[k]))
            pairs.append((i, k, _real_value(params.pi, diff), _real_value(params.psi, diff)))
    total = 0.0
    for k_particles in range(n + 1):
        states = basis.sector_states(k_particles)
        index = {s: a for a, s in enumerate(states)}
        dim = len(states)
        Hk = np.zeros((dim, dim))
        for a, state in enumerate(states):
            diag = -mu * k_particles
            for i, k, pv, wv in pairs:
                ni = state >> i & 1
                nk = state >> k & 1
                diag += -0.25 * pv * (ni + nk) + 0.5 * wv * ni * nk
                if pv != 0.0 and nk == 1 and ni == 0:
                    target = state ^ (1 << k) ^ (1 << i)
                    Hk[index[target], a] += 0.5 * pv
            Hk[a, a] += diag
        energies = np.linalg.eigvalsh(Hk) if dim > 1 else Hk.reshape(1)
        total += float(np.exp(-params.beta * np.asarray(energies)).sum())
    return total


def log_partition_ed(sites: Sequence[Vec], params: ModelParams) -> float:
    return math.log(partition_ed(sites, params))


def chain_sites(n: int) -> tuple[Vec, ...]:
    """Open d=1 chain 0..n-1."""
    return tuple((i,) for i in range(n))


def ed_csv_rows(site_sets: Sequence[Sequence[Vec]], params: ModelParams) -> list[list]:
    """(|sites|, beta, z, lnZ) rows for the geometric fit."""
    rows = []
    for sites in site_sets:
        rows.append([len(tuple(sites)), params.beta, params.z.real, log_partition_ed(sites, params)])
    return rows
