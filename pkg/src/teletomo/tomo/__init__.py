"""Reconstruction of the shared state from Bob's single-qubit data."""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .. import qla
from ..errors import InsufficientDataError, InvalidInputError, NonHermitianError
from ..qstate import (
    NAMED_INPUTS,
    BellOutcome,
    DensityMatrix,
    InputState,
    bell_projector,
    standard_inputs,
)
from . import closed_form, linear
from .physical import project_physical

__all__ = [
    "Method",
    "ReconstructionReport",
    "outcome_remap",
    "project_physical",
    "reconstruct",
    "reconstruct_1q",
    "reconstruct_2q",
    "reconstruct_3q",
    "reconstruct_nq",
]

PSI_MINUS = BellOutcome.PSI_MINUS
PROBE_KEYS = ("zero", "one", "plus", "right")


class Method(str, enum.Enum):
    CLOSED_FORM_1 = "ClosedForm1"
    CLOSED_FORM_2 = "ClosedForm2"
    CLOSED_FORM_3 = "ClosedForm3"
    LINEAR_N = "LinearN"


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """Result of one inversion.

    ``condition`` is the ratio of extreme singular values of the linear map
    from state parameters to the data being inverted; closed forms report the
    value for the map they invert. ``residual`` is the Frobenius norm of the
    linear-system residual and is 0 for closed forms.
    """

    rho_hat: DensityMatrix
    raw: np.ndarray
    residual: float
    condition: float
    method: Method
    projected: bool


def _report(raw, residual, condition, method) -> ReconstructionReport:
    rho_hat, projected = project_physical(raw)
    return ReconstructionReport(rho_hat, raw, float(residual), float(condition), method, projected)


def outcome_remap(outcome: BellOutcome, state: InputState) -> InputState:
    """Input that gives, under a Ψ⁻ result, the data ``state`` gives under ``outcome``."""
    a, b = state.alpha, state.beta
    if outcome is BellOutcome.PSI_MINUS:
        return state
    if outcome is BellOutcome.PSI_PLUS:
        alpha, beta = -a, b
    elif outcome is BellOutcome.PHI_MINUS:
        alpha, beta = b, a
    else:
        alpha, beta = -b, a
    mapped = InputState(alpha, beta)
    for named in NAMED_INPUTS.values():
        if mapped.same_ray(named):
            return InputState(alpha, beta, named.label)
    return mapped


def _hermitian_coords(p: np.ndarray) -> np.ndarray:
    return np.array([p[0, 0].real, p[1, 1].real, p[0, 1].real, p[0, 1].imag])


def _standard_weights(states: Sequence[InputState]) -> np.ndarray:
    """Real ``W`` with ``|s><s| = sum_k W[s, k] |states_k><states_k|`` for each standard ``s``.

    Data are linear in the input projector, so ``W`` re-expresses data taken
    with any informationally complete input set as standard-set data. When
    the set is the standard one up to order and phase, ``W`` is an exact
    permutation.
    """
    std = standard_inputs()
    w = np.zeros((4, len(states)))
    exact = True
    for i, s in enumerate(std):
        hits = [k for k, t in enumerate(states) if t.same_ray(s)]
        if hits:
            w[i, hits[0]] = 1.0
        else:
            exact = False
    if exact:
        return w
    c = np.stack([_hermitian_coords(t.projector) for t in states], axis=1)
    target = np.stack([_hermitian_coords(s.projector) for s in std], axis=1)
    cols = [qla.solve_linear(c, target[:, i])[0] for i in range(4)]
    return np.stack(cols)


def _checked_tilde(t, tol) -> np.ndarray:
    t = qla.as_matrix(t)
    if t.shape != (2, 2):
        raise InvalidInputError(f"Bob's matrix must be 2x2, got {t.shape}")
    defect = qla.hermiticity_defect(t)
    if defect > tol:
        raise NonHermitianError(f"Bob's matrix is not Hermitian (defect {defect:.3e})")
    return t


def _wire_inputs(keys: Sequence[tuple[InputState, ...]], wires: int) -> list[list[InputState]]:
    per_wire = []
    for w in range(wires):
        seen: list[InputState] = []
        for key in keys:
            if key[w] not in seen:
                seen.append(key[w])
        if len(seen) != 4:
            raise InsufficientDataError(f"wire {w + 1} needs exactly four distinct inputs, got {len(seen)}")
        per_wire.append(seen)
    return per_wire


@functools.lru_cache(maxsize=1)
def _single_qubit_condition() -> float:
    # map from (a11, a22, Re a12, Im a12) to the four Ψ⁻ probabilities
    cols = []
    basis = [np.diag([1, 0]), np.diag([0, 1]), np.array([[0, 1], [1, 0]]), np.array([[0, 1j], [-1j, 0]])]
    for e in basis:
        cols.append([np.trace(bell_projector(PSI_MINUS) @ np.kron(s.projector, e)).real for s in standard_inputs()])
    s = np.linalg.svd(np.array(cols).T, compute_uv=False)
    return float(s[0] / s[-1])


def reconstruct_1q(q_by_probe: Mapping[InputState, float], tol: float = 1e-9) -> ReconstructionReport:
    """Single-qubit state from Bell-measurement-only data.

    ``q_by_probe`` maps each standard probe to the probability of a Ψ⁻ result
    when Bell-measuring it together with the unknown qubit.
    """
    q = []
    for s in standard_inputs():
        if s not in q_by_probe:
            raise InsufficientDataError(f"missing Ψ⁻ probability for probe {s.name}")
        v = float(q_by_probe[s])
        if not -tol <= v <= 0.5 + tol:
            raise InvalidInputError(f"Ψ⁻ probability {v!r} for probe {s.name} outside [0, 1/2]")
        q.append(v)
    raw = closed_form.single_qubit_matrix(*q)
    return _report(raw, 0.0, _single_qubit_condition(), Method.CLOSED_FORM_1)


def _as_psi_minus_2q(tilde_by_input: Mapping[InputState, np.ndarray], outcome: BellOutcome, tol: float):
    keys = list(tilde_by_input)
    if len(keys) != 4:
        raise InsufficientDataError(f"two-qubit inversion needs four inputs, got {len(keys)}")
    data = np.stack([_checked_tilde(tilde_by_input[k], tol) for k in keys])
    w = _standard_weights([outcome_remap(outcome, k) for k in keys])
    return np.einsum("sk,kab->sab", w, data)


def reconstruct_2q(
    tilde_by_input: Mapping[InputState, np.ndarray],
    outcome: BellOutcome = PSI_MINUS,
    tol: float = qla.HERM_TOL,
) -> ReconstructionReport:
    """Two-qubit state from Bob's unnormalized matrices for four inputs.

    Data conditioned on an outcome other than Ψ⁻ is first re-expressed as Ψ⁻
    data through :func:`outcome_remap`.
    """
    std = _as_psi_minus_2q(tilde_by_input, outcome, tol)
    raw = closed_form.two_qubit_matrix(*std)
    cond = linear.design_condition(2, (outcome,), tuple(tilde_by_input))
    return _report(raw, 0.0, cond, Method.CLOSED_FORM_2)


# (wire 1, Bob, wire 2) <-> (wire 1, wire 2, Bob)
_BOB_MIDDLE_3Q = (0, 2, 1)


def reconstruct_3q(
    tilde_by_pair: Mapping[tuple[InputState, InputState], np.ndarray],
    outcomes: Sequence[BellOutcome] = (PSI_MINUS, PSI_MINUS),
    tol: float = qla.HERM_TOL,
) -> ReconstructionReport:
    """Three-qubit state from Bob's unnormalized matrices for sixteen input pairs."""
    outcomes = tuple(outcomes)
    if len(outcomes) != 2:
        raise InvalidInputError(f"three-qubit inversion needs two outcomes, got {len(outcomes)}")
    keys = [tuple(k) for k in tilde_by_pair]
    per_wire = _wire_inputs(keys, 2)
    data = np.zeros((4, 4, 2, 2), dtype=np.complex128)
    for i, s1 in enumerate(per_wire[0]):
        for j, s2 in enumerate(per_wire[1]):
            if (s1, s2) not in tilde_by_pair:
                raise InsufficientDataError(f"missing data for input pair ({s1.name}, {s2.name})")
            data[i, j] = _checked_tilde(tilde_by_pair[s1, s2], tol)
    w1 = _standard_weights([outcome_remap(outcomes[0], s) for s in per_wire[0]])
    w2 = _standard_weights([outcome_remap(outcomes[1], s) for s in per_wire[1]])
    std = np.einsum("sk,tl,klab->stab", w1, w2, data)
    table = {(PROBE_KEYS[i], PROBE_KEYS[j]): std[i, j] for i in range(4) for j in range(4)}
    mid = closed_form.three_qubit_matrix(table)
    raw = qla.permute_subsystems(mid, [2, 2, 2], _BOB_MIDDLE_3Q)
    inputs = tuple(per_wire[0]) if per_wire[0] == per_wire[1] else None
    cond = linear.design_condition(3, outcomes, inputs) if inputs else float("nan")
    return _report(raw, 0.0, cond, Method.CLOSED_FORM_3)


def reconstruct_nq(
    tilde_by_arrangement: Mapping[tuple[InputState, ...], np.ndarray],
    outcomes: Sequence[BellOutcome],
    n: int,
    inputs: Sequence[InputState] | None = None,
) -> ReconstructionReport:
    """n-qubit state by solving the full ``4^n`` linear system."""
    outcomes = tuple(outcomes)
    inputs = tuple(inputs) if inputs is not None else None
    raw, residual, cond = linear.solve(tilde_by_arrangement, outcomes, n, inputs)
    return _report(raw, residual, cond, Method.LINEAR_N)


def reconstruct(
    tilde_by_arrangement: Mapping[tuple[InputState, ...], np.ndarray],
    outcomes: Sequence[BellOutcome],
    n: int,
    method: str = "auto",
    inputs: Sequence[InputState] | None = None,
) -> ReconstructionReport:
    """Dispatch: closed forms for n <= 3 under ``auto``, linear inversion otherwise."""
    if method not in ("auto", "closed", "linear"):
        raise InvalidInputError(f"unknown method {method!r}")
    if method == "closed" and n > 3:
        raise InvalidInputError(f"no closed-form inversion for {n} qubits")
    if method == "linear" or (method == "auto" and n > 3):
        return reconstruct_nq(tilde_by_arrangement, outcomes, n, inputs)
    if n == 2:
        return reconstruct_2q({k[0]: v for k, v in tilde_by_arrangement.items()}, tuple(outcomes)[0])
    if n == 3:
        return reconstruct_3q(tilde_by_arrangement, outcomes)
    raise InvalidInputError(f"the teleportation protocol needs at least 2 qubits, got {n}")
