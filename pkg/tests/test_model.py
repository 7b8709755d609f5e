"""Potentials, norms and convergence diagnostics."""

import math

import pytest
from hypothesis import given, strategies as st

from loopgas.model import (
    ModelParams,
    Potential,
    ValidationError,
    c_beta,
    compute_norms,
    convergence_diagnostics,
    decay_constant,
)

from conftest import hopping_model, static_model


class TestPotential:
    def test_symmetric_required(self):
        with pytest.raises(ValidationError):
            Potential({(1,): 0.5}, "transverse")

    def test_origin_rejected(self):
        with pytest.raises(ValidationError):
            Potential({(0,): 1.0}, "transverse")

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            Potential({}, "diagonal")

    def test_from_entries_completes_partner(self):
        p = Potential.from_entries([{"vector": [1], "value": [0.5, 0.0]}], "transverse", 1)
        assert p.value((-1,)) == 0.5

    def test_from_entries_contradiction(self):
        with pytest.raises(ValidationError):
            Potential.from_entries(
                [
                    {"vector": [1], "value": [0.5, 0.0]},
                    {"vector": [-1], "value": [0.25, 0.0]},
                ],
                "transverse",
                1,
            )

    def test_reach(self):
        p = Potential({(2, 0): 1.0, (-2, 0): 1.0}, "transverse")
        assert p.max_coord == 2
        assert p.max_step == 2.0

    def test_empty(self):
        p = Potential.empty("transverse")
        assert p.is_empty and p.max_step == 0.0


class TestNorms:
    def test_nearest_neighbor_values(self):
        pi = Potential({(1,): -0.5, (-1,): -0.5}, "transverse")
        psi = Potential({(1,): 0.25, (-1,): 0.25}, "longitudinal")
        n = compute_norms(pi, psi, l=4.0)
        assert n.M == pytest.approx(0.5)
        assert n.M0 == pytest.approx(-0.5)
        assert n.Ml == pytest.approx(0.5 * (0.5 * 2**4 * 2))
        assert n.psi_norm == pytest.approx(0.5)

    @given(l1=st.floats(1.5, 3.0), l2=st.floats(3.001, 6.0))
    def test_weighted_norm_monotone_in_l(self, l1, l2):
        pi = Potential({(1,): -0.5, (-1,): -0.5}, "transverse")
        psi = Potential.empty("longitudinal")
        assert compute_norms(pi, psi, l1).Ml <= compute_norms(pi, psi, l2).Ml

    def test_empty_norms_vanish(self):
        n = compute_norms(Potential.empty("transverse"), Potential.empty("longitudinal"), 4.0)
        assert n.M == 0.0 and n.Ml == 0.0 and n.M0 == 0.0


class TestModelParams:
    def test_dimension_range(self):
        with pytest.raises(ValidationError):
            static_model(d=4)

    def test_l_must_exceed_d(self):
        with pytest.raises(ValidationError):
            static_model(d=2, l=1.5)

    def test_mu_fugacity_relation(self):
        p = static_model(z=0.1)
        assert p.mu == pytest.approx(math.log(0.1) / p.beta)


class TestDiagnostics:
    def test_zero_fugacity_all_satisfied(self):
        p = hopping_model(z=0.0)
        d = convergence_diagnostics(p)
        assert d.q == 0.0 and d.p == 0.0
        assert d.q_satisfied and d.q_l_satisfied and d.p_satisfied and d.p_l_satisfied

    def test_small_z_q_satisfied(self):
        d = convergence_diagnostics(hopping_model(z=0.02))
        assert d.q_satisfied
        assert d.q == pytest.approx(
            0.02 * math.exp(1.0 * (0.5 * math.e - 0.5) + 1.0)
        )

    def test_large_z_violates(self):
        d = convergence_diagnostics(hopping_model(z=5.0))
        assert not d.q_satisfied

    def test_c_beta_positive(self):
        assert c_beta(hopping_model()) > 0.5

    def test_decay_constant_finite(self):
        assert 0.0 < decay_constant(4.0, 0.5) < math.inf

    def test_decay_constant_diverges_at_one(self):
        assert decay_constant(4.0, 1.0) == math.inf
