"""Monogamy residuals: CKW and strong-monogamy (SM) checks with full reports.

For a pure n-qubit state with hub qubit `focus`:

* the CKW residual is the one-tangle minus the sum of all pair two-tangles,
  nonnegative for every state and zero exactly for W-class states;
* the SM residual additionally subtracts every mixed m-tangle term
  (m = 3 ... n-1) to the power m/2, so it refines CKW: it can only be
  smaller.  A negative SM residual beyond tolerance is a violation
  candidate and is surfaced, never swallowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial

from .qstate import InputError, StateVector, density_from_pure
from .roof import RoofConfig
from .tangle import (
    enumerate_index_vectors,
    mixed_tangle_term,
    one_tangle,
    two_tangle,
)
from .wclass import WClassParams, wclass_state

DEFAULT_MAX_SM_QUBITS = 7   # full SM evaluation cost grows combinatorially
DEFAULT_TOL_CLOSED = 1e-9   # verdict tolerance for closed-form arithmetic
DEFAULT_TOL_ROOF = 1e-6     # verdict tolerance where roof searches enter


@dataclass(frozen=True)
class TermRecord:
    """One hierarchy term of an SM evaluation."""

    partners: tuple[int, ...]
    m: int
    value: float
    pow_value: float
    weight: int
    method: str                          # "closed_form" or "roof"
    converged: bool
    restarts_used: int | None
    min_pure_tangle_seen: float | None

    def to_json_dict(self) -> dict:
        return {
            "partners": list(self.partners),
            "m": self.m,
            "value": self.value,
            "pow": self.pow_value,
            "weight": self.weight,
            "method": self.method,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "min_pure_tangle_seen": self.min_pure_tangle_seen,
        }


@dataclass(frozen=True)
class MonogamyReport:
    """Per-focus tangle hierarchy with CKW and SM residuals and verdicts."""

    focus: int
    num_qubits: int
    one_tangle: float
    terms: tuple[TermRecord, ...]
    ckw_residual: float
    sm_residual: float
    saturated_ckw: bool
    saturated_sm: bool
    sm_violation: bool
    converged: bool
    tol_closed: float
    tol_roof: float
    min_pure_tangle_seen: float | None

    def to_json_dict(self) -> dict:
        return {
            "focus": self.focus,
            "num_qubits": self.num_qubits,
            "one_tangle": self.one_tangle,
            "terms": [t.to_json_dict() for t in self.terms],
            "ckw_residual": self.ckw_residual,
            "sm_residual": self.sm_residual,
            "saturated_ckw": self.saturated_ckw,
            "saturated_sm": self.saturated_sm,
            "sm_violation": self.sm_violation,
            "converged": self.converged,
            "tolerances": {"closed": self.tol_closed, "roof": self.tol_roof},
            "min_pure_tangle_seen": self.min_pure_tangle_seen,
        }


def ckw_residual(state: StateVector, focus: int = 1,
                 config: RoofConfig | None = None) -> float:
    """One-tangle minus the sum of closed-form pair two-tangles.

    The two-tangles are exact (concurrence closed form), so no roof search
    and no config are needed; `config` is accepted for interface symmetry
    and ignored.
    """
    n = state.num_qubits
    if n < 2:
        raise InputError("CKW residual needs at least 2 qubits")
    residual = one_tangle(state, focus).value
    if n == 2:
        return residual - two_tangle(density_from_pure(state)).value
    dummy = config if config is not None else RoofConfig()
    for iv in enumerate_index_vectors(n, focus, 2):
        value, _ = mixed_tangle_term(state, focus, iv.partners, dummy)
        residual -= value
    return residual


def sm_residual(state: StateVector, focus: int, config: RoofConfig, *,
                tol_closed: float = DEFAULT_TOL_CLOSED,
                tol_roof: float = DEFAULT_TOL_ROOF,
                permutation_weighted: bool = False,
                max_qubits: int | None = DEFAULT_MAX_SM_QUBITS) -> MonogamyReport:
    """Full strong-monogamy evaluation of a pure state with hub `focus`.

    Level-2 terms use the concurrence closed form; levels m >= 3 run the
    convex-roof search under `config`.  Roof non-convergence flags the
    report but the residual is still assembled from the best values found.
    The residual equals the recursive n-tangle of the state.
    """
    n = state.num_qubits
    if n < 3:
        raise InputError("SM evaluation needs at least 3 qubits")
    if max_qubits is not None and n > max_qubits:
        raise InputError(
            f"{n} qubits exceeds the configured SM cap of {max_qubits}"
        )
    one_t = one_tangle(state, focus).value
    records: list[TermRecord] = []
    sm = one_t
    ckw = one_t
    converged = True
    min_tau: float | None = None
    for m in range(2, n):
        weight = factorial(m - 1) if permutation_weighted else 1
        for iv in enumerate_index_vectors(n, focus, m):
            value, roof_result = mixed_tangle_term(
                state, focus, iv.partners, config,
                permutation_weighted=permutation_weighted,
            )
            pow_value = max(0.0, value) ** (m / 2)
            if roof_result is None:
                records.append(TermRecord(
                    partners=iv.partners, m=m, value=value, pow_value=pow_value,
                    weight=weight, method="closed_form", converged=True,
                    restarts_used=None, min_pure_tangle_seen=None,
                ))
            else:
                records.append(TermRecord(
                    partners=iv.partners, m=m, value=value, pow_value=pow_value,
                    weight=weight, method="roof", converged=roof_result.converged,
                    restarts_used=roof_result.restarts_used,
                    min_pure_tangle_seen=roof_result.min_pure_tangle_seen,
                ))
                converged = converged and roof_result.converged
                seen = roof_result.min_pure_tangle_seen
                min_tau = seen if min_tau is None else min(min_tau, seen)
            sm -= weight * pow_value
            if m == 2:
                ckw -= weight * value
    roof_terms = [r for r in records if r.m >= 3]
    saturated_ckw = bool(abs(ckw) <= tol_closed)
    saturated_sm = bool(abs(sm) <= tol_roof
                        and all(r.value <= tol_roof for r in roof_terms))
    violation_tol = tol_roof if roof_terms else tol_closed
    return MonogamyReport(
        focus=focus,
        num_qubits=n,
        one_tangle=one_t,
        terms=tuple(records),
        ckw_residual=float(ckw),
        sm_residual=float(sm),
        saturated_ckw=saturated_ckw,
        saturated_sm=saturated_sm,
        sm_violation=bool(sm < -violation_tol),
        converged=converged,
        tol_closed=tol_closed,
        tol_roof=tol_roof,
        min_pure_tangle_seen=min_tau,
    )


def verify_saturation(params: WClassParams, config: RoofConfig,
                      **kwargs) -> MonogamyReport:
    """Build the W-class state for `params` and evaluate SM with hub 1.

    Saturation holds when the residual and every m >= 3 roof term sit
    within the roof tolerance; failures come back as verdict booleans in
    the report, not exceptions.
    """
    return sm_residual(wclass_state(params), 1, config, **kwargs)


def sweep_foci(state: StateVector, config: RoofConfig,
               **kwargs) -> list[MonogamyReport]:
    """SM evaluation once per hub choice, in label order."""
    return [
        sm_residual(state, focus, config, **kwargs)
        for focus in range(1, state.num_qubits + 1)
    ]


def max_m3plus_term(report: MonogamyReport) -> float:
    """Largest m >= 3 term value in a report, or 0.0 when none exist."""
    values = [r.value for r in report.terms if r.m >= 3]
    return max(values) if values else 0.0
