"""Exact and finite-shot simulation of the teleportation protocol.

Qubit layout of the joint state for an ``n``-qubit shared state is
``[A1, 1, A2, 2, ..., A(n-1), n-1, n]``: every input qubit sits next to the
shared qubit it is Bell-measured with, and Bob's qubit ``n`` comes last.
Unitary corrections are the identity throughout because the inputs are known.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import qla
from .errors import DimensionError, ImprobableOutcomeError, InsufficientDataError, InvalidInputError
from .qstate import (
    BELL_OUTCOMES,
    BellOutcome,
    DensityMatrix,
    InputState,
    bell_projector,
    bell_state,
    standard_inputs,
)

Arrangement = tuple[InputState, ...]
Outcomes = tuple[BellOutcome, ...]

TAU_Q = 1e-12
PROB_TOL = 1e-12
MAX_QUBITS = 5

# Bob-middle layout for three qubits: (A1, 1, Bob, wire-2 qubit, A3)
BOB_MIDDLE_ORDER_3Q = (0, 1, 4, 3, 2)
# shared three-qubit state: canonical (wire 1, wire 2, Bob) <-> Bob-middle (wire 1, Bob, wire 2)
BOB_MIDDLE_SHARED_3Q = (0, 2, 1)


def _check_qubits(n: int):
    if not 2 <= n <= MAX_QUBITS:
        raise InvalidInputError(f"the protocol needs 2..{MAX_QUBITS} shared qubits, got {n}")


def canonical_order(n: int) -> list[int]:
    """Map from ``inputs ⊗ shared`` factor order to the canonical layout.

    Entry ``k`` is the factor of ``ρ_A1 ⊗ … ⊗ ρ_A(n-1) ⊗ ρ_shared`` that ends
    up at canonical position ``k``.
    """
    w = n - 1
    order = []
    for k in range(w):
        order += [k, w + k]
    order.append(2 * w)
    return order


def all_arrangements(n: int, inputs: Sequence[InputState] | None = None) -> list[Arrangement]:
    """Every input arrangement for ``n - 1`` wires, wire 1 most significant."""
    inputs = standard_inputs() if inputs is None else list(inputs)
    return list(itertools.product(inputs, repeat=n - 1))


def all_outcome_tuples(n: int) -> list[Outcomes]:
    return list(itertools.product(BELL_OUTCOMES, repeat=n - 1))


def outcome_code(outcomes: Outcomes) -> int:
    code = 0
    for o in outcomes:
        code = 4 * code + o.index
    return code


def joint_matrix(arrangement: Sequence[InputState], shared) -> np.ndarray:
    """Joint input/shared matrix in canonical order; no physicality checks."""
    shared = qla.as_matrix(shared, square=True)
    n = int(round(math.log2(shared.shape[0])))
    if 2**n != shared.shape[0]:
        raise DimensionError(f"shared matrix dimension {shared.shape[0]} is not a power of two")
    if len(arrangement) != n - 1:
        raise InvalidInputError(f"a {n}-qubit shared state needs {n - 1} inputs, got {len(arrangement)}")
    product = qla.tensor_all(*[s.projector for s in arrangement], shared)
    return qla.permute_subsystems(product, [2] * (2 * n - 1), canonical_order(n))


def joint_state(arrangement: Sequence[InputState], shared: DensityMatrix) -> np.ndarray:
    _check_qubits(shared.qubits)
    return joint_matrix(arrangement, shared.mat)


def bm_projector(outcomes: Outcomes, n: int) -> np.ndarray:
    """Projector for the wire-wise Bell measurements, identity on Bob's qubit."""
    if len(outcomes) != n - 1:
        raise InvalidInputError(f"{n} qubits need {n - 1} Bell outcomes, got {len(outcomes)}")
    return qla.tensor_all(*[bell_projector(o) for o in outcomes], np.eye(2))


def _joint_qubits(joint: np.ndarray) -> int:
    m = int(round(math.log2(joint.shape[0])))
    if 2**m != joint.shape[0] or m % 2 == 0:
        raise DimensionError(f"joint matrix of dimension {joint.shape[0]} is not 2^(2n-1)")
    return (m + 1) // 2


def _sandwich(joint: np.ndarray, outcomes: Outcomes) -> np.ndarray:
    # each pair projector is rank one, so Tr_pairs[P ρ P] = <B|ρ|B> on the pairs
    joint = qla.as_matrix(joint, square=True)
    n = _joint_qubits(joint)
    if len(outcomes) != n - 1:
        raise InvalidInputError(f"joint state of {n} shared qubits needs {n - 1} outcomes, got {len(outcomes)}")
    b = np.ones(1, dtype=np.complex128)
    for o in outcomes:
        b = np.kron(b, bell_state(o))
    t = joint.reshape(b.size, 2, b.size, 2)
    return np.einsum("r,rasb,s->ab", b.conj(), t, b)


def bm_probability(joint, outcomes: Outcomes) -> float:
    """Probability that Alice's Bell measurements give ``outcomes``."""
    q = float(np.trace(_sandwich(joint, outcomes)).real)
    if not -PROB_TOL <= q <= 1 + PROB_TOL:
        raise InvalidInputError(f"outcome probability {q!r} outside [0, 1]; joint state is not physical")
    return min(max(q, 0.0), 1.0)


def bob_unnormalized(joint, outcomes: Outcomes) -> np.ndarray:
    """Bob's conditional state before normalisation, ``Tr_Alice[P ρ P]``."""
    t = _sandwich(joint, outcomes)
    return (t + qla.dagger(t)) / 2


def bob_normalized(joint, outcomes: Outcomes) -> DensityMatrix:
    q = bm_probability(joint, outcomes)
    if q <= TAU_Q:
        raise ImprobableOutcomeError(f"cannot condition on outcome with probability {q:.3e}")
    return DensityMatrix(1, bob_unnormalized(joint, outcomes) / q)


def wire_kraus(outcome: BellOutcome, state: InputState) -> np.ndarray:
    """Row vector ``<B|(|ψ> ⊗ 1)`` acting on the shared qubit of one wire."""
    b = bell_state(outcome).reshape(2, 2)
    return state.vector @ b.conj()


def tilde_operator(arrangement: Sequence[InputState], outcomes: Outcomes) -> np.ndarray:
    """The ``2 x 2^n`` operator ``K`` with ``tilde = K ρ_shared K†``."""
    if len(arrangement) != len(outcomes):
        raise InvalidInputError("arrangement and outcome tuple differ in length")
    k = np.ones((1, 1), dtype=np.complex128)
    for s, o in zip(arrangement, outcomes):
        k = np.kron(k, wire_kraus(o, s)[None, :])
    return np.kron(k, np.eye(2))


def tilde_map(shared, arrangement: Sequence[InputState], outcomes: Outcomes) -> np.ndarray:
    """Linear map from any shared-space operator to Bob's unnormalized matrix."""
    k = tilde_operator(arrangement, outcomes)
    m = qla.as_matrix(shared, square=True)
    if m.shape[0] != k.shape[1]:
        raise DimensionError(f"operator of dimension {m.shape[0]} does not match {len(outcomes)} wires")
    return k @ m @ qla.dagger(k)


@dataclass(frozen=True, eq=False)
class TildeRecord:
    arrangement: Arrangement
    outcome: Outcomes
    q: float
    tilde: np.ndarray
    shots: int | None = None


def outcome_table(shared: DensityMatrix, arrangement: Sequence[InputState]) -> list[TildeRecord]:
    """Exact records for every outcome tuple of one arrangement."""
    joint = joint_state(arrangement, shared)
    arrangement = tuple(arrangement)
    return [
        TildeRecord(arrangement, o, bm_probability(joint, o), bob_unnormalized(joint, o))
        for o in all_outcome_tuples(shared.qubits)
    ]


def exact_records(
    shared: DensityMatrix,
    outcomes: Outcomes,
    inputs: Sequence[InputState] | None = None,
) -> list[TildeRecord]:
    """Exact records for every arrangement under one designated outcome tuple."""
    records = []
    for arr in all_arrangements(shared.qubits, inputs):
        joint = joint_state(arr, shared)
        records.append(TildeRecord(arr, tuple(outcomes), bm_probability(joint, outcomes), bob_unnormalized(joint, outcomes)))
    return records


def bell_probabilities(probe: InputState, rho) -> np.ndarray:
    """Outcome distribution of a Bell measurement on ``probe ⊗ rho``."""
    m = np.kron(probe.projector, qla.as_matrix(rho))
    p = np.array([np.trace(bell_projector(o) @ m).real for o in BELL_OUTCOMES])
    return np.clip(p, 0.0, 1.0)


# ---------------------------------------------------------------- sampling

CHUNK_SHOTS = 1 << 18
_STREAM_TAG = 0x7465_6C65_746F_6D6F  # fixed second key word


def _chunk_uniforms(seed: int, stream: int, chunk: int, count: int) -> np.ndarray:
    bits = np.random.Philox(key=[seed % 2**64, _STREAM_TAG], counter=[0, 0, chunk, stream])
    return np.random.Generator(bits).random((count, 2))


@dataclass(frozen=True)
class ShotRecord:
    arrangement: int
    alice: Outcomes
    probe: InputState
    bob: BellOutcome
    shot: int
    stream: int


@dataclass(frozen=True, eq=False)
class ShotTable:
    """Columnar store of sampled shots.

    ``alice[a, i]`` is the outcome-tuple code of shot ``i`` for arrangement
    ``a`` and ``bob[a, i]`` the index of Bob's Bell outcome. Shot ``i`` used
    probe ``probes[i % 4]`` and random stream ``(seed, a, i // CHUNK_SHOTS)``.
    """

    qubits: int
    arrangements: tuple[Arrangement, ...]
    probes: tuple[InputState, ...]
    shots_per_probe: int
    seed: int
    alice: np.ndarray
    bob: np.ndarray

    @property
    def shots_per_arrangement(self) -> int:
        return self.alice.shape[1]

    def __len__(self) -> int:
        return self.alice.size

    def __iter__(self) -> Iterator[ShotRecord]:
        tuples = all_outcome_tuples(self.qubits)
        for a in range(len(self.arrangements)):
            for i in range(self.shots_per_arrangement):
                yield ShotRecord(
                    a,
                    tuples[self.alice[a, i]],
                    self.probes[i % len(self.probes)],
                    BELL_OUTCOMES[self.bob[a, i]],
                    i,
                    a,
                )


def _sampling_tables(shared: DensityMatrix, arrangement: Arrangement, probes: Sequence[InputState]):
    table = outcome_table(shared, arrangement)
    q = np.array([r.q for r in table])
    q[q <= TAU_Q] = 0.0
    alice_cdf = np.cumsum(q / q.sum())
    last = int(np.flatnonzero(q)[-1])
    bob_cdf = np.zeros((len(table), len(probes), 3))
    for o, rec in enumerate(table):
        if q[o] == 0.0:
            continue
        rho_bob = rec.tilde / rec.q
        for p, probe in enumerate(probes):
            probs = bell_probabilities(probe, rho_bob)
            bob_cdf[o, p] = np.cumsum(probs / probs.sum())[:3]
    return alice_cdf, last, bob_cdf


def sample_shots(
    shared: DensityMatrix,
    arrangements,
    shots_per_probe: int,
    seed: int,
    *,
    probes: Sequence[InputState] | None = None,
    workers: int = 1,
) -> ShotTable:
    """Sample Alice's and Bob's Bell outcomes shot by shot.

    ``arrangements`` is a single arrangement or a sequence of them. For each
    arrangement, ``4 * shots_per_probe`` shots are drawn; shot ``i`` uses Bob
    probe ``i % 4``. Alice's outcome tuple is drawn by inverse CDF from the
    exact distribution, then Bob Bell-measures his conditional state against
    the probe. Random numbers come from counter-based streams indexed by
    (seed, arrangement, chunk), so the result does not depend on ``workers``.
    """
    if shots_per_probe < 1:
        raise InvalidInputError(f"shots_per_probe must be >= 1, got {shots_per_probe}")
    if arrangements and isinstance(arrangements[0], InputState):
        arrangements = [arrangements]
    arrangements = tuple(tuple(a) for a in arrangements)
    probes = tuple(standard_inputs() if probes is None else probes)
    n = shared.qubits
    total = shots_per_probe * len(probes)
    alice = np.empty((len(arrangements), total), dtype=np.uint8)
    bob = np.empty((len(arrangements), total), dtype=np.uint8)

    jobs = []
    for a, arr in enumerate(arrangements):
        tables = _sampling_tables(shared, arr, probes)
        for c in range(-(-total // CHUNK_SHOTS)):
            jobs.append((a, c, tables))

    def run(job):
        a, c, (alice_cdf, last, bob_cdf) = job
        start = c * CHUNK_SHOTS
        count = min(CHUNK_SHOTS, total - start)
        u = _chunk_uniforms(seed, a, c, count)
        o = np.minimum(np.searchsorted(alice_cdf, u[:, 0], side="right"), last)
        p = np.arange(start, start + count) % len(probes)
        thresholds = bob_cdf[o, p]
        alice[a, start : start + count] = o
        bob[a, start : start + count] = np.sum(u[:, 1:2] >= thresholds, axis=1)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, jobs))
    else:
        for job in jobs:
            run(job)
    return ShotTable(n, arrangements, probes, shots_per_probe, seed, alice, bob)


def tilde_from_frequencies(q: float, psi_minus_by_probe: Sequence[float]) -> np.ndarray:
    """Unnormalized Bob matrix from ``q`` and his per-probe Ψ⁻ frequencies.

    Frequencies are given in standard-probe order (Zero, One, Plus,
    RightCircular) and fed to the Bell-measurement-only single-qubit formulas.
    """
    from .tomo.closed_form import single_qubit_matrix

    return q * single_qubit_matrix(*psi_minus_by_probe)


def estimate_records(shots: ShotTable, designated: Outcomes) -> list[TildeRecord]:
    """Turn sampled shots into one estimated record per arrangement.

    ``q`` is the frequency of ``designated`` among all shots of the
    arrangement; Bob's state comes from the Ψ⁻ frequency of his Bell
    measurement for each probe, restricted to shots with Alice's outcome equal
    to ``designated``.
    """
    designated = tuple(designated)
    if len(designated) != shots.qubits - 1:
        raise InvalidInputError(f"designated outcome tuple must have {shots.qubits - 1} entries")
    if [p.label for p in shots.probes] != [p.label for p in standard_inputs()]:
        raise InvalidInputError("estimation requires Bob's probes to be the standard four states")
    code = outcome_code(designated)
    total = shots.shots_per_arrangement
    probe_idx = np.arange(total) % len(shots.probes)
    psi_minus = BellOutcome.PSI_MINUS.index
    records = []
    for a, arr in enumerate(shots.arrangements):
        hit = shots.alice[a] == code
        cell = np.bincount(probe_idx[hit], minlength=4)
        if np.any(cell == 0):
            missing = [shots.probes[p].name for p in np.flatnonzero(cell == 0)]
            names = ",".join(s.name for s in arr)
            raise InsufficientDataError(f"no shots with outcome {designated} for arrangement ({names}), probes {missing}")
        psi = np.bincount(probe_idx[hit & (shots.bob[a] == psi_minus)], minlength=4)
        q_hat = hit.sum() / total
        tilde = tilde_from_frequencies(q_hat, psi / cell)
        records.append(TildeRecord(arr, designated, float(q_hat), tilde, int(total)))
    return records


def records_by_arrangement(records: Sequence[TildeRecord]) -> Mapping[Arrangement, np.ndarray]:
    return {r.arrangement: r.tilde for r in records}
