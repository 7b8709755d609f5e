"""Ursell functions, cluster series, defining series, bound checks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings

from loopgas.cluster import (
    assumption3_check,
    assumption4_check,
    log_partition_cluster,
    partition_direct,
    prop1_decay_check,
    prop3_check,
    two_point_sigma,
    ursell,
    ursell_cache,
)
from loopgas.loops import mayer, static_loop
from loopgas.model import ValidationError
from loopgas.pathint import Truncation

from conftest import hopping_model, static_model, zeta_matrix_strategy


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def _ursell_recursive(zeta, block):
    """Independent oracle: inclusion-exclusion over set partitions.

    prod_{i<k in S}(1 + zeta_ik) = sum over partitions of S of prod phi(block).
    Solved for phi(S) by Moebius recursion on partition count.
    """
    block = tuple(block)
    if len(block) == 1:
        return 1.0 + 0.0j
    total = 1.0 + 0.0j
    for i in range(len(block)):
        for k in range(i + 1, len(block)):
            total *= 1.0 + zeta[block[i], block[k]]
    for part in _set_partitions(list(block)):
        if len(part) == 1:
            continue
        prod = 1.0 + 0.0j
        for sub in part:
            prod *= _ursell_recursive(zeta, sub)
        total -= prod
    return total


class TestUrsell:
    def test_connected_graph_counts(self):
        assert ursell_cache().counts()[:4] == (1, 1, 4, 38)

    def test_phi2_is_zeta(self):
        z = np.array([[0.0, 0.3], [0.3, 0.0]], dtype=complex)
        assert ursell(z) == pytest.approx(0.3)

    def test_phi3_all_hard_core(self):
        z = -np.ones((3, 3), dtype=complex)
        np.fill_diagonal(z, 0.0)
        assert ursell(z) == pytest.approx(2.0)

    @given(zeta_matrix_strategy(4))
    @settings(max_examples=60, deadline=None)
    def test_matches_partition_recursion(self, zeta):
        n = zeta.shape[0]
        ours = ursell(zeta)
        oracle = _ursell_recursive(zeta, range(n))
        assert ours == pytest.approx(oracle, abs=1e-9 * max(1.0, abs(oracle)))

    @given(zeta_matrix_strategy(4))
    @settings(max_examples=60, deadline=None)
    def test_partition_identity(self, zeta):
        """sum over partitions of prod phi equals prod (1 + zeta)."""
        n = zeta.shape[0]
        total = 0.0 + 0.0j
        for part in _set_partitions(list(range(n))):
            prod = 1.0 + 0.0j
            for sub in part:
                prod *= ursell(zeta[np.ix_(sub, sub)])
            total += prod
        direct = 1.0 + 0.0j
        for i in range(n):
            for k in range(i + 1, n):
                direct *= 1.0 + zeta[i, k]
        assert total == pytest.approx(direct, abs=1e-9 * max(1.0, abs(direct)))


class TestStaticModel:
    def test_cluster_log_partition_exact(self):
        params = static_model(z=0.1)
        region = [(i,) for i in range(4)]
        tr = Truncation(cluster_n_max=4, samples=16)
        est = log_partition_cluster(region, params, tr)
        expected = 4 * sum((-1) ** (n + 1) * 0.1**n / n for n in range(1, 5))
        assert complex(est.value).real == pytest.approx(expected, rel=1e-12)
        assert est.stat_error == 0.0

    def test_direct_partition_truncated_binomial(self):
        params = static_model(z=0.1)
        region = [(i,) for i in range(3)]
        tr = Truncation(cluster_n_max=3, samples=16)
        est = partition_direct(region, params, tr)
        expected = sum(math.comb(3, n) * 0.1**n for n in range(4))
        assert complex(est.value).real == pytest.approx(expected, rel=1e-12)

    def test_two_point_zero_fugacity_is_mayer(self):
        params = hopping_model(z=0.0)
        X = static_loop((0,), 1, 1.0)
        Y = static_loop((0,), 1, 1.0)
        est = two_point_sigma(X, Y, params, Truncation(samples=64))
        assert complex(est.value) == pytest.approx(mayer(X, Y, params.psi))


class TestCrossValidation:
    def test_cluster_matches_ed_two_sites(self):
        from loopgas.oracle import log_partition_ed

        params = hopping_model(z=0.05)
        region = [(0,), (1,)]
        tr = Truncation(j_max=3, n_max=10, r_max=4, cluster_n_max=3, samples=8192, seed=0)
        est = log_partition_cluster(region, params, tr)
        exact = log_partition_ed(region, params)
        tol = 3.0 * est.stat_error + est.tail_bound
        assert abs(complex(est.value).real - exact) <= tol


class TestBoundChecks:
    def test_assumption3_passes(self):
        params = hopping_model(z=0.02)
        X = static_loop((0,), 1, 1.0)
        row = assumption3_check(X, params, Truncation(samples=4096))
        assert row.passed

    def test_assumption4_passes(self):
        params = hopping_model(z=0.02)
        X = static_loop((0,), 1, 1.0)
        row = assumption4_check(X, 0.0, 2.0, params, Truncation(samples=4096))
        assert row.passed

    def test_assumption4_requires_contained_root(self):
        params = hopping_model(z=0.02)
        X = static_loop((3,), 1, 1.0)
        with pytest.raises(ValidationError):
            assumption4_check(X, 0.0, 2.0, params, Truncation(samples=64))

    def test_prop3_passes(self):
        params = hopping_model(z=0.02)
        X = static_loop((0,), 1, 1.0)
        row = prop3_check(X, params, Truncation(samples=4096))
        assert row.passed

    def test_prop1_profile(self):
        params = hopping_model(z=0.02)
        rows = prop1_decay_check([1.0, 2.0], params, Truncation(samples=4096))
        assert len(rows) == 2
        assert all(r.passed for r in rows)
