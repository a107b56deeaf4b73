"""Dense multi-qubit pure states and density operators.

Conventions used throughout the package:

* Qubit labels are 1-based.  Label 1 is the most significant bit of an
  amplitude index, so the computational-basis ket |q1 q2 ... qn> sits at
  the index whose binary expansion reads q1 q2 ... qn.
* A density operator carries the ordered tuple of labels it acts on; the
  first label in the tuple is the most significant bit of its matrix
  indices.
* Everything is stored dense (complex128), capped at MAX_QUBITS qubits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 12
NORM_TOL = 1e-12        # squared-norm deviation accepted without rescaling
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10         # eigenvalues may undershoot zero by this much
PROB_FLOOR = 1e-12      # ensemble weights below this are dropped


class InputError(ValueError):
    """Caller-supplied data violates a precondition."""


class InvalidStateError(InputError):
    """Data cannot represent a physical state (zero norm, bad shape, ...)."""


# ---------------------------------------------------------------------------
# bit bookkeeping


def _place_bits(values, positions, total_qubits):
    """Spread the bits of `values` across `positions` of a full index.

    `values` is interpreted MSB-first over `positions` (0-based positions
    into a label tuple); position p maps to index bit (total_qubits-1-p).
    """
    values = np.asarray(values)
    out = np.zeros_like(values)
    width = len(positions)
    for t, pos in enumerate(positions):
        bit = (values >> (width - 1 - t)) & 1
        out = out | (bit << (total_qubits - 1 - pos))
    return out


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state on `num_qubits` qubits.

    `renormalized` is metadata: True when the constructing routine had to
    rescale the raw input (norm off by more than NORM_TOL but nonzero).
    """

    num_qubits: int
    amplitudes: np.ndarray
    renormalized: bool = False

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise InputError(
                f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}"
            )
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.num_qubits,):
            raise InvalidStateError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {amps.shape}"
            )
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise InvalidStateError(
                f"state not normalized: <psi|psi> = {norm_sq!r}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@dataclass(frozen=True)
class QubitSubset:
    """Strictly increasing tuple of distinct positive qubit labels."""

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if not labels:
            raise InputError("qubit subset must be nonempty")
        if any(l < 1 for l in labels):
            raise InputError(f"qubit labels must be positive, got {labels}")
        if any(a >= b for a, b in zip(labels, labels[1:])):
            raise InputError(f"qubit labels must be strictly increasing, got {labels}")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)


def as_subset(labels) -> QubitSubset:
    """Coerce a label collection to a QubitSubset (sorted; duplicates rejected)."""
    if isinstance(labels, QubitSubset):
        return labels
    labels = tuple(int(x) for x in labels)
    if len(set(labels)) != len(labels):
        raise InputError(f"duplicate qubit labels in {labels}")
    return QubitSubset(tuple(sorted(labels)))


def check_labels_in_range(subset: QubitSubset, num_qubits: int) -> None:
    if subset.labels and subset.labels[-1] > num_qubits:
        raise InputError(
            f"labels {subset.labels} exceed the state's {num_qubits} qubits"
        )


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Unit-trace Hermitian PSD operator on an ordered set of qubit labels."""

    qubit_labels: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        labels = tuple(int(x) for x in self.qubit_labels)
        if not labels or len(set(labels)) != len(labels) or min(labels) < 1:
            raise InputError(f"bad qubit labels {labels}")
        object.__setattr__(self, "qubit_labels", labels)
        dim = 1 << len(labels)
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (dim, dim):
            raise InputError(f"expected {dim}x{dim} matrix, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITICITY_TOL:
            raise InputError("matrix is not Hermitian within tolerance")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > TRACE_TOL:
            raise InputError(f"trace must be 1, got {trace!r}")
        if float(np.linalg.eigvalsh(mat)[0]) < -PSD_TOL:
            raise InputError("matrix has a significantly negative eigenvalue")
        object.__setattr__(self, "matrix", mat)

    @property
    def num_qubits(self) -> int:
        return len(self.qubit_labels)


# ---------------------------------------------------------------------------
# constructors


def _normalized_state(num_qubits: int, amps: np.ndarray) -> StateVector:
    """Accept near-unit inputs unchanged; rescale (and flag) anything else."""
    norm_sq = float(np.vdot(amps, amps).real)
    if norm_sq == 0.0:
        raise InvalidStateError("state has zero norm")
    if abs(norm_sq - 1.0) <= NORM_TOL:
        return StateVector(num_qubits, amps)
    return StateVector(num_qubits, amps / np.sqrt(norm_sq), renormalized=True)


def ket_from_basis_terms(num_qubits: int, terms) -> StateVector:
    """Build a state from (bitstring, amplitude) pairs.

    Bitstrings read |q1 q2 ... qn> with qubit 1 leftmost.  The result is
    normalized: inputs whose squared norm is off by more than NORM_TOL are
    rescaled and flagged via StateVector.renormalized.
    """
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise InputError(f"num_qubits must be in [1, {MAX_QUBITS}]")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    seen = set()
    for bits, coeff in terms:
        if len(bits) != num_qubits or set(bits) - {"0", "1"}:
            raise InputError(f"bad bitstring {bits!r} for {num_qubits} qubits")
        if bits in seen:
            raise InputError(f"duplicate bitstring {bits!r}")
        seen.add(bits)
        amps[int(bits, 2)] = coeff
    return _normalized_state(num_qubits, amps)


def haar_random_state(num_qubits: int, seed: int) -> StateVector:
    """Haar-random pure state: normalized i.i.d. complex Gaussian amplitudes."""
    rng = np.random.default_rng(seed)
    dim = 1 << num_qubits
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(num_qubits, v / np.linalg.norm(v))


def density_from_pure(state: StateVector) -> DensityOperator:
    """Rank-1 projector |psi><psi| on labels (1, ..., n)."""
    amps = state.amplitudes
    return DensityOperator(
        tuple(range(1, state.num_qubits + 1)), np.outer(amps, amps.conj())
    )


# ---------------------------------------------------------------------------
# partial trace


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Trace out every label of `rho` not in `keep`.

    Implemented as an explicit sum over the traced-out computational basis:
    for each environment bit pattern the corresponding submatrix of `rho`
    is gathered through precomputed index maps and accumulated.  No
    reshape/transpose tricks, so the result is convention-independent and
    easy to check against a brute-force oracle.
    """
    keep = as_subset(keep)
    labels = rho.qubit_labels
    missing = [l for l in keep.labels if l not in labels]
    if missing:
        raise InputError(f"labels {missing} not present in {labels}")
    k = len(labels)
    keep_pos = tuple(labels.index(l) for l in keep.labels)
    env_pos = tuple(p for p in range(k) if p not in keep_pos)
    dim_keep = 1 << len(keep_pos)
    base = _place_bits(np.arange(dim_keep), keep_pos, k)
    out = np.zeros((dim_keep, dim_keep), dtype=np.complex128)
    if env_pos:
        for env in range(1 << len(env_pos)):
            idx = base + int(_place_bits(env, env_pos, k))
            out += rho.matrix[np.ix_(idx, idx)]
    else:
        out = rho.matrix[np.ix_(base, base)].copy()
    return DensityOperator(keep.labels, out)


def _reduced_from_pure(amps: np.ndarray, num_qubits: int, keep_positions) -> np.ndarray:
    """Reduced density matrix of a pure state, as a raw array.

    `keep_positions` are 0-based positions (label l sits at position l-1).
    Fast path used by the tangle functionals; equivalent to building the
    projector and calling partial_trace, which the tests verify.
    """
    keep_positions = tuple(keep_positions)
    env = tuple(p for p in range(num_qubits) if p not in keep_positions)
    dim_keep = 1 << len(keep_positions)
    dim_env = 1 << len(env)
    rows = (
        _place_bits(np.arange(dim_keep), keep_positions, num_qubits)[:, None]
        | _place_bits(np.arange(dim_env), env, num_qubits)[None, :]
    )
    sub = amps[rows]  # (dim_keep, dim_env)
    return sub @ sub.conj().T


def reduce_pure_state(state: StateVector, keep) -> DensityOperator:
    """partial_trace of |psi><psi| onto `keep`, via the pure-state fast path."""
    keep = as_subset(keep)
    check_labels_in_range(keep, state.num_qubits)
    mat = _reduced_from_pure(
        state.amplitudes, state.num_qubits, tuple(l - 1 for l in keep.labels)
    )
    return DensityOperator(keep.labels, mat)


# ---------------------------------------------------------------------------
# JSON serialization


def state_to_dict(state: StateVector) -> dict:
    return {
        "num_qubits": state.num_qubits,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
    }


def state_from_dict(data: dict) -> StateVector:
    try:
        n = int(data["num_qubits"])
        amps = np.array(
            [complex(re, im) for re, im in data["amplitudes"]], dtype=np.complex128
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed state record: {exc}") from exc
    if not 1 <= n <= MAX_QUBITS:
        raise InputError(f"num_qubits must be in [1, {MAX_QUBITS}], got {n}")
    if amps.shape != (1 << n,):
        raise InputError(
            f"expected {1 << n} amplitudes for {n} qubits, got {len(amps)}"
        )
    return _normalized_state(n, amps)


def save_state(state: StateVector, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(state), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_state(path) -> StateVector:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read state file {path}: {exc}") from exc
    return state_from_dict(data)


def density_to_dict(rho: DensityOperator) -> dict:
    return {
        "qubit_labels": list(rho.qubit_labels),
        "matrix": [
            [[float(z.real), float(z.imag)] for z in row] for row in rho.matrix
        ],
    }


def density_from_dict(data: dict) -> DensityOperator:
    try:
        labels = tuple(int(l) for l in data["qubit_labels"])
        mat = np.array(
            [[complex(re, im) for re, im in row] for row in data["matrix"]],
            dtype=np.complex128,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed density record: {exc}") from exc
    return DensityOperator(labels, mat)
