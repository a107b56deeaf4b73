"""Tangle functionals: one-tangle, two-qubit tangle, and the recursive n-tangle.

The one-tangle of a pure state is 4 det of the focus qubit's reduced
density matrix.  The two-tangle of a two-qubit mixed state is the squared
concurrence (the closed form of its convex roof).  The n-tangle of a pure
state subtracts, from the one-tangle, every mixed m-tangle of the
focus-containing reductions raised to the power m/2, for m = 2 ... n-1;
the m >= 3 terms are convex roofs delegated to :mod:`monotangle.roof`,
the m = 2 terms use the exact concurrence closed form.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from itertools import combinations
from math import factorial

import numpy as np

from .qstate import (
    DensityOperator,
    InputError,
    StateVector,
    _reduced_from_pure,
    as_subset,
    reduce_pure_state,
)
from .roof import m_tangle_mixed as _roof_minimize

# spin-flip operator sigma_y (x) sigma_y; fixed convention for concurrence
SIGMA_YY = np.array(
    [
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ],
    dtype=np.complex128,
)

_EIG_FLOOR = 1e-14      # spin-flip eigenvalues below this count as zero
_VALUE_NOISE = 1e-10    # tangles may undershoot 0 / overshoot 1 by this much


@dataclass(frozen=True)
class TangleValue:
    """A tangle value together with its hierarchy level m."""

    value: float
    level: int
    converged: bool = True

    def __post_init__(self):
        if self.level < 1:
            raise InputError(f"level must be >= 1, got {self.level}")
        if self.level <= 2 and not -_VALUE_NOISE <= self.value <= 1.0 + _VALUE_NOISE:
            raise InputError(
                f"level-{self.level} tangle out of [0, 1]: {self.value!r}"
            )


@dataclass(frozen=True)
class IndexVector:
    """Hub label plus the (m-1) partner labels of one hierarchy term."""

    focus: int
    partners: tuple[int, ...]

    def __post_init__(self):
        partners = tuple(int(p) for p in self.partners)
        if not partners:
            raise InputError("partners must be nonempty")
        if any(a >= b for a, b in zip(partners, partners[1:])):
            raise InputError(f"partners must be strictly increasing, got {partners}")
        if self.focus in partners:
            raise InputError(f"focus {self.focus} cannot be its own partner")
        object.__setattr__(self, "partners", partners)

    @property
    def level(self) -> int:
        return 1 + len(self.partners)


def _check_focus(state: StateVector, focus: int) -> None:
    if not 1 <= focus <= state.num_qubits:
        raise InputError(
            f"focus {focus} out of range for {state.num_qubits} qubits"
        )


def _clamp_noise(value: float) -> float:
    if -_VALUE_NOISE <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + _VALUE_NOISE:
        return 1.0
    return value


def one_tangle(state: StateVector, focus: int) -> TangleValue:
    """Bipartite tangle of `state` between the focus qubit and the rest.

    Equals 4 det of the focus qubit's reduced density matrix.
    """
    _check_focus(state, focus)
    rho = _reduced_from_pure(state.amplitudes, state.num_qubits, (focus - 1,))
    det = float((rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real)
    return TangleValue(_clamp_noise(4.0 * det), level=1)


def _concurrence_matrix(mat: np.ndarray) -> float:
    """Concurrence of a two-qubit density matrix given as a raw 4x4 array."""
    flipped = SIGMA_YY @ mat.conj() @ SIGMA_YY
    ev = np.linalg.eigvals(mat @ flipped).real
    ev[ev < _EIG_FLOOR] = 0.0
    lam = np.sort(np.sqrt(ev))[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_2q(rho) -> float:
    """Concurrence C = max(0, l1 - l2 - l3 - l4) of a two-qubit state.

    The l_i are the decreasing square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy).
    """
    if rho.num_qubits != 2:
        raise InputError(
            f"concurrence needs a 2-qubit operator, got {rho.num_qubits} qubits"
        )
    return _concurrence_matrix(rho.matrix)


def two_tangle(rho) -> TangleValue:
    """Two-tangle of a two-qubit mixed state: concurrence squared.

    This is the exact closed form of the convex roof; the numerical roof in
    :func:`monotangle.roof.m_tangle_mixed` must agree with it.
    """
    c = concurrence_2q(rho)
    return TangleValue(c * c, level=2)


def pure_tangle_bipartite(state: StateVector, focus: int) -> TangleValue:
    """Tangle of a pure state across the focus|rest bipartition.

    Numerically identical to :func:`one_tangle`; exposed as the leaf
    functional that roof searches evaluate on decomposition members.
    """
    return TangleValue(one_tangle(state, focus).value, level=2)


def pure_functional_2q(amps: np.ndarray) -> float:
    """Level-2 roof leaf: tangle of a normalized two-qubit pure state.

    4 det rho_A = 4 |a00 a11 - a01 a10|^2, cheap enough for optimizer
    inner loops.
    """
    d = amps[0] * amps[3] - amps[1] * amps[2]
    return 4.0 * (d.real * d.real + d.imag * d.imag)


# sqrt of the leaf is |v^T Q v| with this symmetric Q; the roof optimizer
# uses it for analytic pair-rotation profiles
pure_functional_2q.sqrt_form = np.array(
    [
        [0, 0, 0, 1],
        [0, 0, -1, 0],
        [0, -1, 0, 0],
        [1, 0, 0, 0],
    ],
    dtype=np.complex128,
)


def enumerate_index_vectors(n: int, focus: int, m: int) -> list[IndexVector]:
    """All level-m index vectors: size-(m-1) label combinations excluding focus.

    Each combination appears exactly once, in increasing label order;
    there are C(n-1, m-1) of them.
    """
    if not 1 <= focus <= n:
        raise InputError(f"focus {focus} out of range for n={n}")
    if not 2 <= m <= n - 1:
        raise InputError(f"level m must satisfy 2 <= m <= n-1, got m={m} for n={n}")
    others = [q for q in range(1, n + 1) if q != focus]
    return [IndexVector(focus, combo) for combo in combinations(others, m - 1)]


def _pure_m_tangle_amps(amps: np.ndarray, m: int, fpos: int, config,
                        permutation_weighted: bool,
                        convergence_log: list[bool]) -> float:
    """Recursive pure m-tangle on a raw normalized amplitude vector.

    Numerically identical to :func:`n_tangle_pure` (same reductions, same
    closed forms, same roof calls) but skips per-call object validation,
    which matters inside roof searches where members are evaluated many
    thousands of times.  Inner roof convergence flags are appended to
    `convergence_log`.
    """
    rho1 = _reduced_from_pure(amps, m, (fpos - 1,))
    total = float(
        4.0 * (rho1[0, 0] * rho1[1, 1] - rho1[0, 1] * rho1[1, 0]).real
    )
    if m == 2:
        return total
    others = tuple(p for p in range(1, m + 1) if p != fpos)
    for level in range(2, m):
        weight = factorial(level - 1) if permutation_weighted else 1
        for combo in combinations(others, level - 1):
            kept = tuple(sorted((fpos,) + combo))
            mat = _reduced_from_pure(amps, m, tuple(p - 1 for p in kept))
            if level == 2:
                value = _concurrence_matrix(mat) ** 2
            else:
                rho = DensityOperator(kept, mat)
                inner = _member_pure_functional(
                    level, kept.index(fpos) + 1, config,
                    permutation_weighted, convergence_log,
                )
                result = _roof_minimize(rho, fpos, combo, inner, config)
                convergence_log.append(result.converged)
                value = result.value
            total -= weight * max(0.0, value) ** (level / 2)
    return total


def _member_pure_functional(m, fpos, config, permutation_weighted,
                            convergence_log):
    """Roof-member evaluator: normalized amplitude vector -> pure m-tangle."""

    def pure_functional(amps: np.ndarray) -> float:
        return _pure_m_tangle_amps(
            np.asarray(amps, dtype=np.complex128), m, fpos, config,
            permutation_weighted, convergence_log,
        )

    return pure_functional


def mixed_tangle_term(state: StateVector, focus: int, partners, config,
                      permutation_weighted: bool = False):
    """Mixed m-tangle of the reduction of `state` onto focus plus `partners`.

    Returns (value, roof_result); roof_result is None for m = 2, where the
    concurrence closed form is exact and no search is needed.
    """
    _check_focus(state, focus)
    partners = as_subset(partners)
    kept = tuple(sorted((focus,) + partners.labels))
    if len(kept) != len(partners.labels) + 1:
        raise InputError("focus must not appear among partners")
    if len(kept) >= state.num_qubits:
        raise InputError("reduction must be a proper subsystem")
    rho = reduce_pure_state(state, kept)
    if len(kept) == 2:
        return two_tangle(rho).value, None
    convergence_log: list[bool] = []
    pure_functional = _member_pure_functional(
        len(kept), kept.index(focus) + 1, config, permutation_weighted,
        convergence_log,
    )
    result = _roof_minimize(rho, focus, partners, pure_functional, config)
    if not all(convergence_log):
        result = dataclasses.replace(result, converged=False)
    return result.value, result


def n_tangle_pure(state: StateVector, focus: int, partners, config,
                  permutation_weighted: bool = False) -> TangleValue:
    """Recursive n-tangle of a pure state with hub `focus`.

    one_tangle minus sum over m = 2 ... n-1 and over all focus-anchored
    index vectors of the mixed m-tangle to the power m/2.  Reduces to the
    two-tangle for n = 2 and the usual three-tangle for n = 3.  With
    `permutation_weighted` each subset term is counted (m-1)! times
    (the permutation reading of ordered index vectors); the default counts
    each subset once, which is equivalent for any state whose m >= 3
    tangles vanish.
    """
    _check_focus(state, focus)
    partners = as_subset(partners)
    n = state.num_qubits
    if set((focus,) + partners.labels) != set(range(1, n + 1)):
        raise InputError("focus plus partners must cover every qubit exactly once")
    total = one_tangle(state, focus).value
    converged = True
    for m in range(2, n):
        weight = factorial(m - 1) if permutation_weighted else 1
        for iv in enumerate_index_vectors(n, focus, m):
            value, result = mixed_tangle_term(
                state, focus, iv.partners, config,
                permutation_weighted=permutation_weighted,
            )
            if result is not None:
                converged = converged and result.converged
            total -= weight * max(0.0, value) ** (m / 2)
    return TangleValue(total, level=n, converged=converged)
