import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teletomo import qla, teleportsim as ts
from teletomo.errors import ImprobableOutcomeError, InvalidInputError
from teletomo.qstate import (
    BELL_OUTCOMES,
    ONE,
    PLUS,
    ZERO,
    BellOutcome,
    DensityMatrix,
    InputState,
    bell_projector,
    bell_state,
    random_density,
    standard_inputs,
)

from conftest import random_input

PSI_M, PSI_P, PHI_M, PHI_P = BELL_OUTCOMES


def pure(v) -> DensityMatrix:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityMatrix(int(np.log2(v.size)), np.outer(v, v.conj()))


SINGLET = pure(bell_state(PSI_M))
PHI_PLUS = pure(bell_state(PHI_P))


def literal_tilde(shared, arrangement, outcomes):
    """Tr_Alice[P ρ P] with the full projector and an explicit partial trace."""
    joint = ts.joint_state(arrangement, shared)
    p = ts.bm_projector(outcomes, shared.qubits)
    m = 2 * shared.qubits - 1
    return qla.partial_trace(p @ joint @ p, [2] * m, [m - 1])


# ------------------------------------------------------------ layout


def test_canonical_order_small():
    assert ts.canonical_order(2) == [0, 1, 2]
    assert ts.canonical_order(3) == [0, 2, 1, 3, 4]


def test_joint_state_two_qubits_is_plain_product():
    rho = random_density(2, 4, seed=1)
    np.testing.assert_allclose(ts.joint_state((PLUS,), rho), np.kron(PLUS.projector, rho.mat), atol=1e-15)


def test_joint_state_three_qubits_permutation_oracle(rng):
    rho = random_density(3, 8, seed=2)
    a1, a2 = random_input(rng), random_input(rng)
    joint = ts.joint_state((a1, a2), rho)
    # build entrywise: canonical (A1, 1, A2, 2, 3) from ρ_A1 ⊗ ρ_A2 ⊗ ρ_123
    t = np.einsum("ab,cd,ijkmno->aicjkbmdno", a1.projector, a2.projector, rho.mat.reshape([2] * 6))
    np.testing.assert_allclose(joint, t.reshape(32, 32), atol=1e-15)


def test_bob_middle_orders_are_involutions():
    for order in (ts.BOB_MIDDLE_ORDER_3Q, ts.BOB_MIDDLE_SHARED_3Q):
        assert [order[k] for k in order] == list(range(len(order)))


def test_joint_state_bob_middle_layout_roundtrip():
    rho = random_density(3, 3, seed=5)
    canon = ts.joint_state((ZERO, PLUS), rho)
    mid = qla.permute_subsystems(canon, [2] * 5, ts.BOB_MIDDLE_ORDER_3Q)
    # Bob-middle layout: ρ_A1 ⊗ ρ_(1, Bob, wire-2) ⊗ ρ_A3 with the A3 slot last
    rho_mid = qla.permute_subsystems(rho.mat, [2, 2, 2], ts.BOB_MIDDLE_SHARED_3Q)
    expect = np.kron(np.kron(ZERO.projector, rho_mid), PLUS.projector)
    np.testing.assert_allclose(mid, expect, atol=1e-15)
    np.testing.assert_allclose(qla.permute_subsystems(mid, [2] * 5, ts.BOB_MIDDLE_ORDER_3Q), canon, atol=0)


def test_bm_projector_three_qubits_oracle():
    p = ts.bm_projector((PSI_M, PHI_P), 3)
    expect = np.kron(np.kron(bell_projector(PSI_M), bell_projector(PHI_P)), np.eye(2))
    np.testing.assert_array_equal(p, expect)
    np.testing.assert_allclose(p @ p, p, atol=1e-15)


def test_invalid_sizes_rejected():
    with pytest.raises(InvalidInputError):
        ts.joint_state((ZERO, ONE), random_density(2, 1, 0))
    with pytest.raises(InvalidInputError):
        ts.bm_projector((PSI_M,), 3)
    with pytest.raises(InvalidInputError):
        ts.exact_records(DensityMatrix(1, np.eye(2) / 2), ())


# ------------------------------------------------------------ exact physics


def test_singlet_teleports_input():
    for s in standard_inputs():
        joint = ts.joint_state((s,), SINGLET)
        assert ts.bm_probability(joint, (PSI_M,)) == pytest.approx(0.25, abs=1e-15)
        np.testing.assert_allclose(ts.bob_unnormalized(joint, (PSI_M,)), s.projector / 4, atol=1e-15)
        np.testing.assert_allclose(ts.bob_normalized(joint, (PSI_M,)).mat, s.projector, atol=1e-15)


def test_maximally_mixed_gives_mixed_bob():
    rho = DensityMatrix(2, np.eye(4) / 4)
    for s in standard_inputs():
        for o in BELL_OUTCOMES:
            np.testing.assert_allclose(ts.bob_normalized(ts.joint_state((s,), rho), (o,)).mat, np.eye(2) / 2, atol=1e-15)


def test_phi_plus_with_zero_input():
    joint = ts.joint_state((ZERO,), PHI_PLUS)
    assert ts.bm_probability(joint, (PSI_M,)) == pytest.approx(0.25, abs=1e-15)
    np.testing.assert_allclose(ts.bob_unnormalized(joint, (PSI_M,)), np.diag([0, 0.25]), atol=1e-15)
    np.testing.assert_allclose(ts.bob_normalized(joint, (PSI_M,)).mat, np.diag([0, 1]), atol=1e-15)
    table = ts.outcome_table(PHI_PLUS, (ZERO,))
    np.testing.assert_allclose([r.q for r in table], [0.25] * 4, atol=1e-15)


def test_improbable_outcome_raises():
    # input |0> and wire qubit |0> have no overlap with Ψ⁻
    joint = ts.joint_state((ZERO,), pure([1, 0, 0, 0]))
    assert ts.bm_probability(joint, (PSI_M,)) == 0.0
    with pytest.raises(ImprobableOutcomeError):
        ts.bob_normalized(joint, (PSI_M,))


@pytest.mark.parametrize("n", [2, 3])
def test_sandwich_matches_literal_projection(rng, n):
    rho = random_density(n, 2**n, seed=n)
    for _ in range(5):
        arr = tuple(random_input(rng) for _ in range(n - 1))
        outs = tuple(BELL_OUTCOMES[i] for i in rng.integers(0, 4, n - 1))
        joint = ts.joint_state(arr, rho)
        np.testing.assert_allclose(ts.bob_unnormalized(joint, outs), literal_tilde(rho, arr, outs), atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_kraus_route_matches_joint_route(rng, n):
    rho = random_density(n, 3, seed=10 + n)
    for _ in range(4):
        arr = tuple(random_input(rng) for _ in range(n - 1))
        outs = tuple(BELL_OUTCOMES[i] for i in rng.integers(0, 4, n - 1))
        via_joint = ts.bob_unnormalized(ts.joint_state(arr, rho), outs)
        np.testing.assert_allclose(ts.tilde_map(rho.mat, arr, outs), via_joint, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_completeness_and_pinching(n):
    rho = random_density(n, 2, seed=40 + n)
    for arr in ts.all_arrangements(n)[:6]:
        table = ts.outcome_table(rho, arr)
        assert len(table) == 4 ** (n - 1)
        assert sum(r.q for r in table) == pytest.approx(1.0, abs=1e-12)
        for r in table:
            assert np.trace(r.tilde).real == pytest.approx(r.q, abs=1e-15)
        marginal = qla.partial_trace(rho.mat, [2] * n, [n - 1])
        np.testing.assert_allclose(sum(r.tilde for r in table), marginal, atol=1e-14)


# ------------------------------------------------------------ formula oracles


def two_qubit_oracle(m, alpha, beta):
    """Bob's unnormalized matrix and Ψ⁻ probability written out in the m_ij."""
    M = lambda i, j: m[i - 1, j - 1]
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    ab = np.conj(alpha) * beta
    b11 = (M(3, 3) * a2 + M(1, 1) * b2) / 2 - (M(1, 3) * ab).real
    b22 = (M(4, 4) * a2 + M(2, 2) * b2) / 2 - (M(2, 4) * ab).real
    b12 = (M(3, 4) * a2 + M(1, 2) * b2 - M(1, 4) * ab - np.conj(M(2, 3)) * alpha * np.conj(beta)) / 2
    q = ((M(3, 3) + M(4, 4)) * a2 + (M(1, 1) + M(2, 2)) * b2) / 2 - ((M(1, 3) + M(2, 4)) * ab).real
    return np.array([[b11, b12], [np.conj(b12), b22]]), q.real


def three_qubit_oracle(m, alpha, beta, gamma, delta):
    """Bob's unnormalized matrix under (Ψ⁻, Ψ⁻); ``m`` is in (wire 1, Bob, wire 2) order."""
    M = lambda i, j: m[i - 1, j - 1]
    c = np.conj
    ag, ad = abs(alpha * gamma) ** 2, abs(alpha * delta) ** 2
    bg, bd = abs(beta * gamma) ** 2, abs(beta * delta) ** 2
    A, B = abs(alpha) ** 2, abs(beta) ** 2
    G, D = abs(gamma) ** 2, abs(delta) ** 2
    dg, ba = delta * c(gamma), beta * c(alpha)
    x1 = beta * delta * c(alpha) * c(gamma)
    x2 = c(alpha) * c(delta) * beta * gamma

    def diag(i11, i22, i55, i66, i12, i56, i15, i26, i16, i25):
        return (
            M(*i66) * ag + M(*i55) * ad + M(*i22) * bg + M(*i11) * bd
            - 2 * (M(*i56) * dg).real * A - 2 * (M(*i12) * dg).real * B
            - 2 * (M(*i26) * ba).real * G - 2 * (M(*i15) * ba).real * D
            + 2 * (M(*i16) * x1).real + 2 * (M(*i25) * x2).real
        ).real / 4

    b11 = diag((1, 1), (2, 2), (5, 5), (6, 6), (1, 2), (5, 6), (1, 5), (2, 6), (1, 6), (2, 5))
    b22 = diag((3, 3), (4, 4), (7, 7), (8, 8), (3, 4), (7, 8), (3, 7), (4, 8), (3, 8), (4, 7))
    b12 = (
        M(6, 8) * ag + M(5, 7) * ad + M(2, 4) * bg + M(1, 3) * bd
        - M(5, 8) * dg * A - M(6, 7) * gamma * c(delta) * A
        - M(1, 4) * dg * B - M(2, 3) * gamma * c(delta) * B
        - M(2, 8) * ba * G - c(M(4, 6)) * alpha * c(beta) * G
        - M(1, 7) * ba * D - c(M(3, 5)) * alpha * c(beta) * D
        + M(1, 8) * x1 + M(2, 7) * beta * gamma * c(alpha) * c(delta)
        + c(M(3, 6)) * alpha * gamma * c(beta) * c(delta)
        + c(M(4, 5)) * alpha * delta * c(beta) * c(gamma)
    ) / 4
    return np.array([[b11, b12], [np.conj(b12), b22]])


@pytest.mark.parametrize("seed", range(10))
def test_two_qubit_formula_oracle(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(2, 1 + seed % 4, seed=seed)
    s = random_input(rng)
    joint = ts.joint_state((s,), rho)
    tilde, q = two_qubit_oracle(rho.mat, s.alpha, s.beta)
    np.testing.assert_allclose(ts.bob_unnormalized(joint, (PSI_M,)), tilde, atol=1e-12)
    assert ts.bm_probability(joint, (PSI_M,)) == pytest.approx(q, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_three_qubit_formula_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    rho = random_density(3, 1 + seed % 8, seed=seed)
    s1, s2 = random_input(rng), random_input(rng)
    m_mid = qla.permute_subsystems(rho.mat, [2, 2, 2], ts.BOB_MIDDLE_SHARED_3Q)
    expect = three_qubit_oracle(m_mid, s1.alpha, s1.beta, s2.alpha, s2.beta)
    got = ts.bob_unnormalized(ts.joint_state((s1, s2), rho), (PSI_M, PSI_M))
    np.testing.assert_allclose(got, expect, atol=1e-12)


# ------------------------------------------------------------ outcome symmetries


SUBSTITUTIONS = {
    PSI_M: lambda a, b: (a, b),
    PSI_P: lambda a, b: (-a, b),
    PHI_M: lambda a, b: (b, a),
    PHI_P: lambda a, b: (-b, a),
}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(BELL_OUTCOMES))
def test_outcome_substitution_identities(seed, outcome):
    rng = np.random.default_rng(seed)
    rho = random_density(2, int(rng.integers(1, 5)), seed=seed)
    s = random_input(rng)
    swapped = InputState(*SUBSTITUTIONS[outcome](s.alpha, s.beta))
    j_o = ts.joint_state((s,), rho)
    j_ref = ts.joint_state((swapped,), rho)
    assert abs(ts.bm_probability(j_o, (outcome,)) - ts.bm_probability(j_ref, (PSI_M,))) <= 1e-12
    assert np.max(np.abs(ts.bob_unnormalized(j_o, (outcome,)) - ts.bob_unnormalized(j_ref, (PSI_M,)))) <= 1e-12


def test_bell_probabilities_sum_to_one(rng):
    rho = random_density(1, 2, seed=3).mat
    for s in standard_inputs():
        p = ts.bell_probabilities(s, rho)
        assert p.sum() == pytest.approx(1.0, abs=1e-14)


def test_exact_records_order_and_traces():
    rho = random_density(3, 4, seed=8)
    recs = ts.exact_records(rho, (PSI_M, PHI_M))
    assert [tuple(s.label for s in r.arrangement) for r in recs] == [
        tuple(s.label for s in a) for a in itertools.product(standard_inputs(), repeat=2)
    ]
    for r in recs:
        assert np.trace(r.tilde).real == pytest.approx(r.q, abs=1e-15)
        assert r.shots is None
