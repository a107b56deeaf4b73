import numpy as np
import pytest

from monotangle.qstate import (
    InputError,
    StateVector,
    density_from_pure,
    ket_from_basis_terms,
    partial_trace,
    reduce_pure_state,
)
from monotangle.roof import RoofConfig
from monotangle.tangle import (
    IndexVector,
    TangleValue,
    concurrence_2q,
    enumerate_index_vectors,
    n_tangle_pure,
    one_tangle,
    pure_functional_2q,
    pure_tangle_bipartite,
    two_tangle,
)
from .conftest import permute_qubits, random_pure_state

CFG = RoofConfig(seed=11, restarts=4, max_sweeps=60)


class TestOneTangle:
    def test_product_state_zero(self):
        state = ket_from_basis_terms(3, [("000", 1)])
        assert one_tangle(state, 1).value == 0.0

    def test_ghz_is_maximal(self, ghz3):
        assert one_tangle(ghz3, 1).value == pytest.approx(1.0, abs=1e-12)

    def test_w_state(self, w3):
        assert one_tangle(w3, 1).value == pytest.approx(8 / 9, abs=1e-12)

    def test_focus_out_of_range(self, w3):
        with pytest.raises(InputError):
            one_tangle(w3, 4)

    @pytest.mark.parametrize("seed", range(5))
    def test_invariant_under_partner_permutation(self, seed):
        rng = np.random.default_rng(seed)
        state = random_pure_state(4, 300 + seed)
        perm = [1] + (1 + rng.permutation([1, 2, 3])).tolist()
        permuted = permute_qubits(state, perm)
        assert one_tangle(state, 1).value == pytest.approx(
            one_tangle(permuted, 1).value, abs=1e-12
        )


class TestConcurrence:
    def test_bell_projector(self, bell_state):
        assert concurrence_2q(density_from_pure(bell_state)) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_classical_mixture_zero(self):
        from monotangle.qstate import DensityOperator

        rho = DensityOperator((1, 2), np.diag([0.5, 0, 0, 0.5]).astype(complex))
        assert concurrence_2q(rho) == 0.0

    def test_w_state_pair(self, w3):
        rho = reduce_pure_state(w3, (1, 2))
        assert concurrence_2q(rho) == pytest.approx(2 / 3, abs=1e-12)

    def test_wrong_dimension(self, w3):
        with pytest.raises(InputError):
            concurrence_2q(reduce_pure_state(w3, (1,)))

    @pytest.mark.parametrize("seed", range(8))
    def test_never_negative(self, seed):
        from .conftest import random_mixed_2q

        assert concurrence_2q(random_mixed_2q(seed)) >= 0.0


class TestTwoTangle:
    def test_bell_is_one(self, bell_state):
        assert two_tangle(density_from_pure(bell_state)).value == pytest.approx(
            1.0, abs=1e-12
        )

    def test_product_pure_zero(self):
        rho = density_from_pure(ket_from_basis_terms(2, [("01", 1)]))
        assert two_tangle(rho).value == 0.0

    def test_w_reduction(self, w3):
        rho = reduce_pure_state(w3, (1, 2))
        assert two_tangle(rho).value == pytest.approx(4 / 9, abs=1e-12)

    def test_is_squared_concurrence_exactly(self):
        from .conftest import random_mixed_2q

        for seed in range(5):
            rho = random_mixed_2q(50 + seed)
            c = concurrence_2q(rho)
            assert two_tangle(rho).value == c * c

    @pytest.mark.parametrize("seed", range(5))
    def test_pure_state_matches_bipartite_tangle(self, seed):
        state = random_pure_state(2, 400 + seed)
        assert two_tangle(density_from_pure(state)).value == pytest.approx(
            pure_tangle_bipartite(state, 1).value, abs=1e-10
        )


class TestPureTangleBipartite:
    def test_schmidt_form(self):
        t = 0.25
        state = ket_from_basis_terms(
            2, [("00", np.sqrt(1 - t)), ("11", np.sqrt(t))]
        )
        assert pure_tangle_bipartite(state, 1).value == pytest.approx(
            4 * t * (1 - t), abs=1e-12
        )

    def test_single_excitation_pair(self):
        # vacuum-weighted pair: 4 |b1|^2 |b2|^2 with b1 = b2 = 1/2
        state = ket_from_basis_terms(
            2, [("00", 2 ** -0.5), ("10", 0.5), ("01", 0.5)]
        )
        assert pure_tangle_bipartite(state, 1).value == pytest.approx(
            0.25, abs=1e-12
        )

    def test_product_state_zero(self):
        state = ket_from_basis_terms(3, [("011", 1)])
        assert pure_tangle_bipartite(state, 1).value == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_leaf_functional_agrees(self, seed):
        state = random_pure_state(2, 500 + seed)
        amps = state.amplitudes
        assert pure_functional_2q(amps) == pytest.approx(
            pure_tangle_bipartite(state, 1).value, abs=1e-12
        )
        q = pure_functional_2q.sqrt_form
        assert abs(amps @ (q @ amps)) == pytest.approx(
            np.sqrt(pure_functional_2q(amps)), abs=1e-12
        )


class TestEnumerateIndexVectors:
    def test_level_two_of_four(self):
        vectors = enumerate_index_vectors(4, 1, 2)
        assert [iv.partners for iv in vectors] == [(2,), (3,), (4,)]

    def test_level_three_of_four(self):
        vectors = enumerate_index_vectors(4, 1, 3)
        assert [iv.partners for iv in vectors] == [(2, 3), (2, 4), (3, 4)]

    def test_total_count_five_qubits(self):
        total = sum(len(enumerate_index_vectors(5, 1, m)) for m in (2, 3, 4))
        assert total == 14

    def test_covers_proper_subsets_once(self):
        seen = set()
        for m in range(2, 5):
            for iv in enumerate_index_vectors(5, 2, m):
                assert iv.partners not in seen
                seen.add(iv.partners)
        from itertools import combinations

        expected = set()
        for size in (1, 2, 3):
            expected.update(combinations((1, 3, 4, 5), size))
        assert seen == expected

    def test_level_out_of_range(self):
        with pytest.raises(InputError):
            enumerate_index_vectors(4, 1, 4)
        with pytest.raises(InputError):
            enumerate_index_vectors(4, 1, 1)


class TestNTanglePure:
    def test_bell_reduces_to_two_tangle(self, bell_state):
        result = n_tangle_pure(bell_state, 1, (2,), CFG)
        assert result.value == pytest.approx(1.0, abs=1e-12)
        assert result.level == 2

    def test_ghz_three_tangle(self, ghz3):
        assert n_tangle_pure(ghz3, 1, (2, 3), CFG).value == pytest.approx(
            1.0, abs=1e-9
        )

    def test_w_three_tangle_vanishes(self, w3):
        assert abs(n_tangle_pure(w3, 1, (2, 3), CFG).value) <= 1e-9

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_term_by_term_oracle(self, seed):
        # three-tangle assembled independently from reductions + concurrence
        state = random_pure_state(3, 600 + seed)
        rho = density_from_pure(state)
        expected = one_tangle(state, 1).value
        for j in (2, 3):
            expected -= concurrence_2q(partial_trace(rho, (1, j))) ** 2
        assert n_tangle_pure(state, 1, (2, 3), CFG).value == pytest.approx(
            expected, abs=1e-9
        )

    def test_partners_must_cover(self, ghz3):
        with pytest.raises(InputError):
            n_tangle_pure(ghz3, 1, (2,), CFG)

    def test_permutation_weighted_reading(self, w3):
        # all m >= 3 terms vanish for single-excitation states, so both
        # readings agree there; on generic states they differ at m >= 3
        default = n_tangle_pure(w3, 1, (2, 3), CFG).value
        weighted = n_tangle_pure(w3, 1, (2, 3), CFG, permutation_weighted=True)
        assert weighted.value == pytest.approx(default, abs=1e-9)

    def test_permutation_weighting_changes_generic_value(self):
        from monotangle.tangle import mixed_tangle_term

        tiny = RoofConfig(seed=5, restarts=1, max_sweeps=4, tol=1e-6)
        state = random_pure_state(4, 4242)
        plain = n_tangle_pure(state, 1, (2, 3, 4), tiny).value
        weighted = n_tangle_pure(
            state, 1, (2, 3, 4), tiny, permutation_weighted=True
        ).value
        # weight (m-1)! = 2 doubles every three-qubit term
        three_part = sum(
            max(0.0, mixed_tangle_term(state, 1, iv.partners, tiny)[0]) ** 1.5
            for iv in enumerate_index_vectors(4, 1, 3)
        )
        assert three_part > 1e-4
        assert weighted == pytest.approx(plain - three_part, abs=1e-12)


class TestValueTypes:
    def test_level_range_validated(self):
        with pytest.raises(InputError):
            TangleValue(1.5, level=2)
        with pytest.raises(InputError):
            TangleValue(-0.5, level=1)
        TangleValue(-0.5, level=3)  # higher levels may be negative

    def test_index_vector_validation(self):
        with pytest.raises(InputError):
            IndexVector(1, ())
        with pytest.raises(InputError):
            IndexVector(1, (1, 2))
        with pytest.raises(InputError):
            IndexVector(1, (3, 2))
