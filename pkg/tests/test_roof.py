import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from monotangle.qstate import (
    DensityOperator,
    InputError,
    density_from_pure,
    ket_from_basis_terms,
    reduce_pure_state,
)
from monotangle.roof import (
    RoofConfig,
    WeightedEnsemble,
    _random_unitary,
    canonical_ensemble,
    hjw_mix,
    m_tangle_mixed,
)
from monotangle.tangle import concurrence_2q, pure_functional_2q
from monotangle.wclass import wclass_random, wclass_reduction, wclass_state
from .conftest import random_mixed_2q, random_pure_state

# mirrors the acceptance configuration for two-qubit roof searches
CFG_2Q = RoofConfig(seed=7, restarts=4, padding=2, max_sweeps=40, tol=1e-8)


def ensemble_objective(ensemble) -> float:
    """sum_h p_h sqrt(tau_h) evaluated directly on ensemble members."""
    return sum(
        p * np.sqrt(max(0.0, pure_functional_2q(state.amplitudes)))
        for p, state in ensemble.members
    )


class TestCanonicalEnsemble:
    def test_rank_one_projector(self, bell_state):
        ens = canonical_ensemble(density_from_pure(bell_state))
        assert len(ens.members) == 1
        assert ens.members[0][0] == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed_qubit(self):
        rho = DensityOperator((1,), np.eye(2, dtype=complex) / 2)
        ens = canonical_ensemble(rho)
        assert sorted(p for p, _ in ens.members) == pytest.approx([0.5, 0.5])

    def test_w_pair_reduction_rank_two(self, w3):
        rho = reduce_pure_state(w3, (1, 2))
        ens = canonical_ensemble(rho)
        assert len(ens.members) == 2
        assert_allclose(ens.to_density().matrix, rho.matrix, atol=1e-9)


class TestHjwMix:
    def test_identity_keeps_ensemble(self, w3):
        ens = canonical_ensemble(reduce_pure_state(w3, (1, 2)))
        mixed = hjw_mix(ens, np.eye(len(ens.members)))
        probs = sorted(p for p, _ in mixed.members)
        assert probs == pytest.approx(sorted(p for p, _ in ens.members))
        assert_allclose(mixed.to_density().matrix, ens.to_density().matrix,
                        atol=1e-12)

    def test_permutation_swaps_members(self, w3):
        ens = canonical_ensemble(reduce_pure_state(w3, (1, 2)))
        swap = np.array([[0, 1], [1, 0]], dtype=complex)
        mixed = hjw_mix(ens, swap)
        assert mixed.members[0][0] == pytest.approx(ens.members[1][0])
        assert_allclose(
            np.abs(mixed.members[0][1].amplitudes),
            np.abs(ens.members[1][1].amplitudes),
            atol=1e-12,
        )

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10 ** 6), r=st.integers(2, 5))
    def test_reconstruction_preserved(self, seed, r):
        rho = random_mixed_2q(seed)
        ens = canonical_ensemble(rho)
        if r < len(ens.members):
            r = len(ens.members)
        mixing = _random_unitary(r, np.random.default_rng(seed + 1))
        mixed = hjw_mix(ens, mixing)
        assert_allclose(mixed.to_density().matrix, rho.matrix, atol=1e-9)

    def test_non_unitary_rejected(self, w3):
        ens = canonical_ensemble(reduce_pure_state(w3, (1, 2)))
        with pytest.raises(InputError):
            hjw_mix(ens, np.ones((2, 2), dtype=complex))

    def test_too_small_mixing_rejected(self, w3):
        ens = canonical_ensemble(reduce_pure_state(w3, (1, 2)))
        with pytest.raises(InputError):
            hjw_mix(ens, np.eye(1, dtype=complex))


class TestDecompositionIndependence:
    def test_w_pair_objective_constant(self, w3):
        # every decomposition of the W pair reduction gives the same
        # objective 2 |b_1| |b_2| = 2/3
        ens = canonical_ensemble(reduce_pure_state(w3, (1, 2)))
        rng = np.random.default_rng(99)
        for _ in range(30):
            r = int(rng.integers(2, 5))
            mixed = hjw_mix(ens, _random_unitary(r, rng))
            assert ensemble_objective(mixed) == pytest.approx(2 / 3, abs=1e-10)

    def test_member_tangle_tracks_mixing_weight(self):
        # p_h^2 tau_h = 4 |u_h1|^4 |b_1|^2 |b_j|^2 for members built from
        # the (single-excitation, vacuum) pair of the reduction
        params = wclass_random(3, 31)
        red = wclass_reduction(params, (1, 2))
        vac = ket_from_basis_terms(2, [("00", 1.0)])
        ens = WeightedEnsemble((1, 2), ((red.p, red.x_state), (red.q, vac)))
        rng = np.random.default_rng(13)
        scale = 4 * abs(params.b[0]) ** 2 * abs(params.b[1]) ** 2
        for _ in range(10):
            mixing = _random_unitary(2, rng)
            mixed = hjw_mix(ens, mixing)
            for h, (p, member) in enumerate(mixed.members):
                tau = pure_functional_2q(member.amplitudes)
                assert p ** 2 * tau == pytest.approx(
                    abs(mixing[h, 0]) ** 4 * scale, abs=1e-12
                )


class TestMTangleMixed:
    def test_pure_input_returns_pure_value(self):
        state = random_pure_state(2, 21)
        rho = density_from_pure(state)
        result = m_tangle_mixed(rho, 1, (2,), pure_functional_2q, CFG_2Q)
        assert result.value == pytest.approx(
            pure_functional_2q(state.amplitudes), abs=1e-12
        )
        assert result.converged

    @pytest.mark.parametrize("seed", range(20))
    def test_two_qubit_oracle_equivalence(self, seed):
        rho = random_mixed_2q(3000 + seed)
        result = m_tangle_mixed(rho, 1, (2,), pure_functional_2q, CFG_2Q)
        assert result.value == pytest.approx(
            concurrence_2q(rho) ** 2, abs=1e-4
        )

    def test_wclass_three_tangle_roofs_vanish(self):
        from monotangle.tangle import mixed_tangle_term

        cfg = RoofConfig(seed=4)
        params = wclass_random(4, 77)
        state = wclass_state(params)
        for partners in ((2, 3), (2, 4), (3, 4)):
            value, result = mixed_tangle_term(state, 1, partners, cfg)
            assert value <= 1e-6
            assert result.converged

    def test_seed_determinism(self):
        rho = random_mixed_2q(1234)
        a = m_tangle_mixed(rho, 1, (2,), pure_functional_2q, CFG_2Q)
        b = m_tangle_mixed(rho, 1, (2,), pure_functional_2q, CFG_2Q)
        assert a.value == b.value
        assert np.array_equal(a.best_mixing, b.best_mixing)

    def test_value_never_exceeds_canonical_objective(self):
        for seed in range(5):
            rho = random_mixed_2q(4000 + seed)
            canonical = ensemble_objective(canonical_ensemble(rho))
            result = m_tangle_mixed(rho, 1, (2,), pure_functional_2q, CFG_2Q)
            assert result.value <= canonical ** 2 + 1e-9

    def test_padding_monotone(self):
        # needs every padding level well-converged, hence the larger budget
        for seed in (11, 29):
            rho = random_mixed_2q(seed)
            values = []
            for padding in (0, 2, 4):
                cfg = RoofConfig(seed=5, restarts=10, padding=padding,
                                 max_sweeps=80, tol=1e-10)
                values.append(
                    m_tangle_mixed(rho, 1, (2,), pure_functional_2q, cfg).value
                )
            assert values[1] <= values[0] + 1e-7
            assert values[2] <= values[1] + 1e-7

    def test_budget_exhaustion_reports_not_raises(self):
        rho = random_mixed_2q(1017)  # rank 4, nonzero concurrence
        cfg = RoofConfig(seed=1, restarts=1, padding=2, max_sweeps=1,
                         tol=1e-16)
        result = m_tangle_mixed(rho, 1, (2,), pure_functional_2q, cfg)
        assert not result.converged
        assert result.value >= 0.0

    def test_wrong_labels_rejected(self, w3):
        rho = reduce_pure_state(w3, (1, 2))
        with pytest.raises(InputError):
            m_tangle_mixed(rho, 1, (3,), pure_functional_2q, CFG_2Q)

    def test_min_pure_tangle_tracked(self):
        rho = random_mixed_2q(8)
        result = m_tangle_mixed(rho, 1, (2,), pure_functional_2q, CFG_2Q)
        assert result.min_pure_tangle_seen >= -1e-12


class TestRoofConfig:
    def test_json_round_trip(self):
        cfg = RoofConfig(seed=9, restarts=5, padding=1, max_sweeps=33,
                         tol=1e-9)
        assert RoofConfig.from_json_dict(cfg.to_json_dict()) == cfg

    def test_json_keys(self):
        assert set(RoofConfig().to_json_dict()) == {
            "seed", "restarts", "padding", "max_sweeps", "tol"
        }

    def test_validation(self):
        with pytest.raises(InputError):
            RoofConfig(restarts=0)
        with pytest.raises(InputError):
            RoofConfig(padding=-1)
        with pytest.raises(InputError):
            RoofConfig(tol=0.0)

    def test_malformed_dict(self):
        with pytest.raises(InputError):
            RoofConfig.from_json_dict({"seed": 1})


class TestWeightedEnsemble:
    def test_probabilities_must_sum_to_one(self, bell_state):
        with pytest.raises(InputError):
            WeightedEnsemble((1, 2), ((0.5, bell_state),))

    def test_nonpositive_probability_rejected(self, bell_state):
        with pytest.raises(InputError):
            WeightedEnsemble((1, 2), ((1.5, bell_state), (-0.5, bell_state)))
