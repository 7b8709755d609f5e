"""Shared fixtures and hypothesis strategies for the test suite."""

from __future__ import annotations

import math
import sys

import pytest
from hypothesis import strategies as st

from loopgas.loops import CompositeLoop
from loopgas.model import ModelParams, Potential


def hopping_model(z: float = 0.05, strength: float = -0.5, beta: float = 1.0, l: float = 4.0) -> ModelParams:
    """d=1 nearest-neighbor test model with hard-core-only psi."""
    pi = Potential({(1,): strength, (-1,): strength}, "transverse")
    psi = Potential.empty("longitudinal")
    return ModelParams(d=1, beta=beta, z=z, pi=pi, psi=psi, l=l)


def static_model(z: float = 0.1, d: int = 1, l: float = 4.0) -> ModelParams:
    """No hopping, hard-core-only psi: the single-occupancy ideal lattice gas."""
    return ModelParams(
        d=d,
        beta=1.0,
        z=z,
        pi=Potential.empty("transverse"),
        psi=Potential.empty("longitudinal"),
        l=l,
    )


@pytest.fixture
def model_1d():
    return hopping_model()


def loop_strategy(d: int = 1, beta: float = 1.0):
    """Small admissible-shaped composite loops with nearest-neighbor jumps."""

    @st.composite
    def build(draw):
        windings = draw(st.integers(1, 2))
        base = tuple(draw(st.integers(-2, 2)) for _ in range(d))
        n_pairs = draw(st.integers(0, 2))
        steps = []
        for _ in range(n_pairs):
            axis = draw(st.integers(0, d - 1))
            vec = tuple(1 if i == axis else 0 for i in range(d))
            neg = tuple(-c for c in vec)
            steps.extend([vec, neg])
        length = windings * beta
        times = sorted(
            draw(
                st.lists(
                    st.floats(0.01, 0.99),
                    min_size=len(steps),
                    max_size=len(steps),
                    unique=True,
                )
            )
        )
        jumps = tuple((t * length, r) for t, r in zip(times, steps))
        return CompositeLoop(base, windings, jumps, beta)

    return build()


def zeta_matrix_strategy(n_max: int = 4):
    """Random complex symmetric zeta matrices with zero diagonal."""

    @st.composite
    def build(draw):
        import numpy as np

        n = draw(st.integers(1, n_max))
        vals = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)
        m = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for k in range(i + 1, n):
                m[i, k] = m[k, i] = draw(vals)
        return m

    return build()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None) if mod else None
    if verdicts:
        terminalreporter.section("acceptance verdicts")
        for line in verdicts:
            terminalreporter.write_line(line)
