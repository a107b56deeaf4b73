"""Convex-roof minimization for mixed-state m-tangles.

The roof of a mixed state rho is [min over decompositions of
sum_h p_h sqrt(tau(psi_h))]^2.  Every size-R pure-state decomposition of
rho is reachable from the eigen-decomposition (padded with zero vectors)
through an R x R unitary mixing, so the search space is the unitary group:
the optimizer walks it with successive two-row Givens rotations, refining
each rotation angle by golden section, from several seeded starts.

The searched minimum is an upper bound on the true roof; it is exact for
the workloads the package certifies (two-qubit tangles against the
concurrence closed form, and reductions whose members all have zero
tangle, where the objective is identically zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import (
    PROB_FLOOR,
    DensityOperator,
    InputError,
    StateVector,
    as_subset,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_ANGLE_XTOL = 1e-4
# Rotation angle is pi-periodic; with both signs of theta explored, the
# phase only needs [0, pi).
_THETA_COARSE = tuple(k * math.pi / 8.0 for k in (-3, -2, -1, 1, 2, 3))
_PHI_COARSE = tuple(k * math.pi / 4.0 for k in range(4))
_THETA_HALF = math.pi / 8.0
_PHI_HALF = math.pi / 4.0
_UNITARITY_TOL = 1e-10

# dense (2 theta, phi) scan grid for the quadratic-leaf pair step
_QTH = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 32, endpoint=False)
_QC2 = np.cos(2.0 * _QTH)
_QS2 = np.sin(2.0 * _QTH)
_QPH = np.linspace(0.0, math.pi, 16, endpoint=False)
_QU = np.exp(1j * _QPH)
_QU2 = _QU * _QU

# A roof value certified at or below this is a zero: the objective is a sum
# of nonnegative contributions, so no decomposition can do better.
EARLY_STOP_VALUE = 1e-12

# Basin-hopping kicks per start: after the sweep loop stalls, a random pair
# rotation is applied and descent resumes; the best visited point wins.
_KICKS = 4


@dataclass(frozen=True)
class RoofConfig:
    """Search budget for the roof optimizer; fully determines the result.

    restarts counts starting points: index 0 refines the eigen-ensemble
    itself, the rest refine Haar-random mixings of it drawn from streams
    seeded by (seed, restart index).
    """

    seed: int = 0
    restarts: int = 32
    padding: int = 2
    max_sweeps: int = 500
    tol: float = 1e-10

    def __post_init__(self):
        if self.seed < 0:
            raise InputError("seed must be nonnegative")
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if self.padding < 0:
            raise InputError("padding must be >= 0")
        if self.max_sweeps < 0:
            raise InputError("max_sweeps must be >= 0")
        if self.tol <= 0:
            raise InputError("tol must be positive")

    def to_json_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "restarts": int(self.restarts),
            "padding": int(self.padding),
            "max_sweeps": int(self.max_sweeps),
            "tol": float(self.tol),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RoofConfig":
        try:
            return cls(
                seed=int(data["seed"]),
                restarts=int(data["restarts"]),
                padding=int(data["padding"]),
                max_sweeps=int(data["max_sweeps"]),
                tol=float(data["tol"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed roof config: {exc}") from exc


@dataclass(frozen=True)
class WeightedEnsemble:
    """Probability-weighted pure states on a fixed qubit subset."""

    qubit_labels: tuple[int, ...]
    members: tuple[tuple[float, StateVector], ...]

    def __post_init__(self):
        if not self.members:
            raise InputError("ensemble must have at least one member")
        total = 0.0
        for p, state in self.members:
            if p <= 0.0:
                raise InputError(f"member probability must be positive, got {p}")
            if state.num_qubits != len(self.qubit_labels):
                raise InputError("member state size does not match qubit labels")
            total += p
        if abs(total - 1.0) > 1e-10:
            raise InputError(f"probabilities must sum to 1, got {total!r}")

    def to_density(self) -> DensityOperator:
        dim = 1 << len(self.qubit_labels)
        mat = np.zeros((dim, dim), dtype=np.complex128)
        for p, state in self.members:
            mat += p * np.outer(state.amplitudes, state.amplitudes.conj())
        return DensityOperator(self.qubit_labels, mat)


@dataclass(frozen=True)
class RoofResult:
    """Outcome of one roof search.

    value:  the minimized [sum p_h sqrt(tau_h)]^2 over everything searched.
    best_mixing: the unitary relating the eigen-ensemble (zero-padded) to
        the best decomposition found.
    min_pure_tangle_seen: smallest raw pure tangle evaluated anywhere in
        the search, before clamping; significantly negative values are
        evidence worth surfacing, not errors.
    """

    value: float
    best_mixing: np.ndarray
    restarts_used: int
    converged: bool
    min_pure_tangle_seen: float


def canonical_ensemble(rho: DensityOperator) -> WeightedEnsemble:
    """Eigen-decomposition of rho as the reference (HJW anchor) ensemble.

    Eigenvalues below PROB_FLOOR are dropped; members are ordered by
    decreasing probability.
    """
    evals, evecs = np.linalg.eigh(rho.matrix)
    members = []
    for idx in range(len(evals) - 1, -1, -1):
        p = float(evals[idx])
        if p > PROB_FLOOR:
            members.append((p, StateVector(rho.num_qubits, evecs[:, idx])))
    return WeightedEnsemble(rho.qubit_labels, tuple(members))


def hjw_mix(ensemble: WeightedEnsemble, mixing: np.ndarray) -> WeightedEnsemble:
    """Mix an ensemble through an R x R unitary (R >= member count).

    The scaled members sqrt(p_l)|psi_l>, zero-padded to R rows, are combined
    as phi_h = sum_l u_hl sqrt(p_l) psi_l; new probabilities are the squared
    norms and members below PROB_FLOOR are dropped.  The mixed ensemble
    reconstructs the same density operator.
    """
    mixing = np.asarray(mixing, dtype=np.complex128)
    if mixing.ndim != 2 or mixing.shape[0] != mixing.shape[1]:
        raise InputError(f"mixing must be square, got shape {mixing.shape}")
    r = mixing.shape[0]
    if r < len(ensemble.members):
        raise InputError(
            f"mixing size {r} smaller than ensemble size {len(ensemble.members)}"
        )
    if np.max(np.abs(mixing.conj().T @ mixing - np.eye(r))) > _UNITARITY_TOL:
        raise InputError("mixing matrix is not unitary within tolerance")
    dim = 1 << len(ensemble.qubit_labels)
    scaled = np.zeros((r, dim), dtype=np.complex128)
    for h, (p, state) in enumerate(ensemble.members):
        scaled[h] = math.sqrt(p) * state.amplitudes
    mixed = mixing @ scaled
    members = []
    for row in mixed:
        p = float(np.vdot(row, row).real)
        if p >= PROB_FLOOR:
            members.append((p, StateVector(len(ensemble.qubit_labels),
                                           row / math.sqrt(p))))
    return WeightedEnsemble(ensemble.qubit_labels, tuple(members))


def _random_unitary(r: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed r x r unitary via phase-fixed QR of a Ginibre matrix."""
    z = (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r)))
    q, upper = np.linalg.qr(z)
    phases = np.diagonal(upper).copy()
    phases /= np.abs(phases)
    return q * phases


def _golden_min(f, lo: float, hi: float, xtol: float):
    """Golden-section minimum of f on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = f(c)
    fd = f(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


class _Objective:
    """Decomposition objective sum_h p_h sqrt(max(0, tau_h)).

    When the pure functional exposes a `sqrt_form` matrix Q (meaning
    sqrt(tau(v)) = |v^T Q v| on normalized v), contributions reduce to
    |row^T Q row| on unnormalized rows, and pair rotations admit an
    analytic one-dimensional profile; the optimizer exploits both.
    """

    def __init__(self, pure_functional):
        self._pf = pure_functional
        self.quad = getattr(pure_functional, "sqrt_form", None)
        self.min_tau = math.inf

    def contribution(self, row: np.ndarray) -> float:
        p = float(np.vdot(row, row).real)
        if p < PROB_FLOOR:
            return 0.0
        if self.quad is not None:
            amp = row @ (self.quad @ row)
            value = abs(amp)
            tau = (value / p) ** 2
            if tau < self.min_tau:
                self.min_tau = tau
            return value
        tau = self._pf(row / math.sqrt(p))
        if tau < self.min_tau:
            self.min_tau = tau
        return p * math.sqrt(tau) if tau > 0.0 else 0.0


def _apply_rotation(M, U, i, j, theta: float, phi: float) -> None:
    """Apply the phased Givens rotation (theta, phi) to rows (i, j) of M and U."""
    c = math.cos(theta)
    s = math.sin(theta)
    eip = complex(math.cos(phi), math.sin(phi))
    eipc = eip.conjugate()
    vi = M[i].copy()
    M[i] = c * vi + (eip * s) * M[j]
    M[j] = c * M[j] - (eipc * s) * vi
    ui = U[i].copy()
    U[i] = c * ui + (eip * s) * U[j]
    U[j] = c * U[j] - (eipc * s) * ui


def _descend(M, U, w, objective, config) -> tuple[float, bool]:
    """Sweep pair rotations until stalled, certified zero, or out of sweeps.

    Returns (objective value, clean); clean is False when max_sweeps ran
    out before the sweep-improvement tolerance was met.
    """
    r = M.shape[0]
    obj = float(w.sum())
    for _ in range(config.max_sweeps):
        before = obj
        for i in range(r - 1):
            for j in range(i + 1, r):
                _pair_step(M, U, w, i, j, objective)
        obj = float(w.sum())
        if obj * obj <= EARLY_STOP_VALUE:
            return obj, True
        if before - obj < config.tol:
            return obj, True
    return obj, False


def _pair_step(M, U, w, i, j, objective) -> None:
    """Best phased Givens rotation on rows (i, j); applied if it improves.

    The rotation with angle t and phase f sends
        row_i -> cos(t) row_i + e^{i f} sin(t) row_j
        row_j -> cos(t) row_j - e^{-i f} sin(t) row_i.
    Only the two touched rows change the objective, so each trial costs two
    member evaluations.  A coarse (t, f) grid seeds golden-section
    refinement of each angle in turn.
    """
    current = w[i] + w[j]
    if current <= 0.0:
        return  # contributions are nonnegative: this pair cannot improve
    vi = M[i].copy()
    vj = M[j].copy()

    if objective.quad is not None:
        # sqrt(tau) is |v^T Q v|: the two rotated contributions are moduli
        # of a + b cos(2t) + c sin(2t) profiles, fixed by three scalars,
        # so a dense (t, f) scan costs a few short numpy operations.
        qvi = objective.quad @ vi
        qvj = objective.quad @ vj
        a = vi @ qvi
        b = vj @ qvj
        cross = 2.0 * (vi @ qvj)

        def pair_obj(theta: float, phi: float) -> float:
            co = math.cos(theta)
            si = math.sin(theta)
            eip = complex(math.cos(phi), math.sin(phi))
            es = eip * si
            return (abs(co * co * a + es * es * b + co * es * cross)
                    + abs(co * co * b + (es * es).conjugate() * a
                          - co * es.conjugate() * cross))

        fwd = 0.5 * (a + _QU2 * b)
        fwd_c2 = 0.5 * (a - _QU2 * b)
        fwd_s2 = 0.5 * (_QU * cross)
        rev = 0.5 * (b + _QU2.conj() * a)
        rev_c2 = 0.5 * (b - _QU2.conj() * a)
        rev_s2 = -0.5 * (_QU.conj() * cross)
        grid = (np.abs(fwd[None, :] + _QC2[:, None] * fwd_c2[None, :]
                       + _QS2[:, None] * fwd_s2[None, :])
                + np.abs(rev[None, :] + _QC2[:, None] * rev_c2[None, :]
                         + _QS2[:, None] * rev_s2[None, :]))
        flat = int(np.argmin(grid))
        theta = float(_QTH[flat // len(_QPH)])
        phi = float(_QPH[flat % len(_QPH)])
        best = float(grid.flat[flat])
        if best >= current:
            theta, phi, best = 0.0, 0.0, current
        th_half = float(_QTH[1] - _QTH[0])
        ph_half = float(_QPH[1] - _QPH[0])
    else:
        def pair_obj(theta: float, phi: float) -> float:
            c = math.cos(theta)
            s = math.sin(theta)
            eip = complex(math.cos(phi), math.sin(phi))
            return (objective.contribution(c * vi + (eip * s) * vj)
                    + objective.contribution(c * vj - (eip.conjugate() * s) * vi))

        theta, phi, best = 0.0, 0.0, current
        for f in _PHI_COARSE:
            for t in _THETA_COARSE:
                val = pair_obj(t, f)
                if val < best:
                    theta, phi, best = t, f, val
        th_half = _THETA_HALF
        ph_half = _PHI_HALF

    t_ref, f_t = _golden_min(lambda t: pair_obj(t, phi),
                             theta - th_half, theta + th_half, _ANGLE_XTOL)
    if f_t < best:
        theta, best = t_ref, f_t
    p_ref, f_p = _golden_min(lambda f: pair_obj(theta, f),
                             phi - ph_half, phi + ph_half, _ANGLE_XTOL)
    if f_p < best:
        phi, best = p_ref, f_p
    if best >= current:
        return
    _apply_rotation(M, U, i, j, theta, phi)
    w[i] = objective.contribution(M[i])
    w[j] = objective.contribution(M[j])


def m_tangle_mixed(rho: DensityOperator, focus: int, partners, pure_functional,
                   config: RoofConfig) -> RoofResult:
    """Convex-roof m-tangle of `rho` with hub `focus`.

    Parameters
    ----------
    rho : DensityOperator
        State on exactly {focus} union partners.
    pure_functional : callable
        Maps a normalized amplitude vector (length 2^m) to the raw pure
        m-tangle of that member; may return small negatives, which are
        clamped under the square root and tracked in the result.
    config : RoofConfig
        Search budget; identical configs give bit-identical results.

    The search pads the eigen-ensemble to rank + padding rows.  A budget
    exhausted without meeting the sweep tolerance yields converged=False
    with the best value found, never an exception.
    """
    partners = as_subset(partners)
    expected = tuple(sorted((focus,) + partners.labels))
    if tuple(sorted(rho.qubit_labels)) != expected:
        raise InputError(
            f"rho acts on {rho.qubit_labels}, expected {expected}"
        )
    ensemble = canonical_ensemble(rho)
    rank = len(ensemble.members)
    r = rank + config.padding
    dim = 1 << rho.num_qubits
    base = np.zeros((r, dim), dtype=np.complex128)
    for h, (p, state) in enumerate(ensemble.members):
        base[h] = math.sqrt(p) * state.amplitudes

    objective = _Objective(pure_functional)
    best_obj = math.inf
    best_mixing = np.eye(r, dtype=np.complex128)
    converged = False
    restarts_used = 0

    for restart in range(config.restarts):
        restarts_used = restart + 1
        rng = np.random.default_rng([config.seed, restart])
        if restart == 0:
            U = np.eye(r, dtype=np.complex128)
            M = base.copy()
        else:
            U = _random_unitary(r, rng)
            M = U @ base
        w = np.array([objective.contribution(M[h]) for h in range(r)])
        obj = float(w.sum())
        if obj * obj <= EARLY_STOP_VALUE:
            best_obj, best_mixing, converged = obj, U, True
            break
        obj, clean = _descend(M, U, w, objective, config)
        restart_best, restart_mix = obj, U.copy()
        # generic functionals pay real money per evaluation; lean on
        # restarts there and keep the kick escape for cheap quad leaves
        kicks = _KICKS if objective.quad is not None else 1
        for _ in range(kicks):
            if obj * obj <= EARLY_STOP_VALUE or r < 2:
                break
            i, j = sorted(rng.choice(r, size=2, replace=False))
            _apply_rotation(M, U, int(i), int(j),
                            rng.uniform(-0.5 * math.pi, 0.5 * math.pi),
                            rng.uniform(0.0, math.pi))
            w[i] = objective.contribution(M[i])
            w[j] = objective.contribution(M[j])
            obj, seg_clean = _descend(M, U, w, objective, config)
            clean = clean and seg_clean
            if obj < restart_best:
                restart_best, restart_mix = obj, U.copy()
        if restart_best < best_obj:
            best_obj = restart_best
            best_mixing = restart_mix
        converged = converged or clean
        if best_obj * best_obj <= EARLY_STOP_VALUE:
            converged = True
            break

    min_seen = objective.min_tau if objective.min_tau != math.inf else 0.0
    return RoofResult(
        value=float(best_obj * best_obj),
        best_mixing=best_mixing,
        restarts_used=restarts_used,
        converged=converged,
        min_pure_tangle_seen=float(min_seen),
    )
