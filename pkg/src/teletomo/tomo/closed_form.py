"""Closed-form inversions for one, two and three qubits.

All formulas take Bob's data conditioned on Alice obtaining Ψ⁻ on every wire
with inputs drawn from the standard set. Arguments are named by probe:
``zero`` is |0>, ``one`` is |1>, ``plus`` is (|0>+|1>)/√2 and ``right`` is
(|0>+i|1>)/√2.

Three-qubit matrices are returned in the (wire 1, Bob, wire 2) qubit order
that the formulas are written in; callers permute to the canonical layout.
"""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

# probe keys used by the three-qubit table
Z, O, P, R = "zero", "one", "plus", "right"


def _hermitian_from_upper(upper: Mapping[tuple[int, int], complex], d: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=np.complex128)
    for (i, j), v in upper.items():
        if i == j:
            m[i - 1, i - 1] = v.real
        else:
            m[i - 1, j - 1] = v
            m[j - 1, i - 1] = np.conj(v)
    return m


def single_qubit_matrix(q_zero: float, q_one: float, q_plus: float, q_right: float) -> np.ndarray:
    """Single-qubit state from the Ψ⁻ probabilities of Bell-measuring it
    against each of the four probes."""
    a11 = 2 * q_one
    a22 = 2 * q_zero
    a12 = (1 - 1j) * (q_zero + q_one) + 2j * q_right - 2 * q_plus
    return np.array([[a11, a12], [np.conj(a12), a22]], dtype=np.complex128)


def _combo(zero, one, plus, right):
    return (1 - 1j) * (one + zero) + 2j * right - 2 * plus


def two_qubit_matrix(zero: np.ndarray, one: np.ndarray, plus: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Two-qubit state from Bob's four unnormalized 2x2 matrices."""
    b = {"zero": zero, "one": one, "plus": plus, "right": right}

    def entry(i, j, conj=False):
        vals = {k: (np.conj(v[i, j]) if conj else v[i, j]) for k, v in b.items()}
        return _combo(**vals)

    upper = {
        (1, 1): 2 * one[0, 0],
        (2, 2): 2 * one[1, 1],
        (3, 3): 2 * zero[0, 0],
        (4, 4): 2 * zero[1, 1],
        (1, 2): 2 * one[0, 1],
        (3, 4): 2 * zero[0, 1],
        (1, 3): entry(0, 0),
        (2, 4): entry(1, 1),
        (1, 4): entry(0, 1),
        (2, 3): entry(0, 1, conj=True),
    }
    return _hermitian_from_upper(upper, 4)


def three_qubit_matrix(tilde: Mapping[tuple[str, str], np.ndarray]) -> np.ndarray:
    """Three-qubit state from Bob's sixteen unnormalized matrices.

    ``tilde[(a, b)]`` is Bob's matrix when wire 1 carries probe ``a`` and wire
    2 carries probe ``b``. The 64 parameters are evaluated in three stages;
    the last stage reuses entries from the first two.
    """
    b11: Callable[[str, str], complex] = lambda a, c: tilde[a, c][0, 0]
    b22: Callable[[str, str], complex] = lambda a, c: tilde[a, c][1, 1]
    b12: Callable[[str, str], complex] = lambda a, c: tilde[a, c][0, 1]
    b21: Callable[[str, str], complex] = lambda a, c: np.conj(tilde[a, c][0, 1])

    m: dict[tuple[int, int], complex] = {}
    # stage 1: computational-basis pairs
    m[1, 1] = 4 * b11(O, O)
    m[2, 2] = 4 * b11(O, Z)
    m[3, 3] = 4 * b22(O, O)
    m[4, 4] = 4 * b22(O, Z)
    m[5, 5] = 4 * b11(Z, O)
    m[6, 6] = 4 * b11(Z, Z)
    m[7, 7] = 4 * b22(Z, O)
    m[8, 8] = 4 * b22(Z, Z)
    m[1, 3] = 4 * b12(O, O)
    m[2, 4] = 4 * b12(O, Z)
    m[5, 7] = 4 * b12(Z, O)
    m[6, 8] = 4 * b12(Z, Z)

    # stage 2: one wire on the equator
    def mix(b, a1, a2, e1, e2, sign=-1):
        return 2 * (1 + sign * 1j) * (b(*a1) + b(*a2)) - 4 * (b(*e1) + sign * 1j * b(*e2))

    wire2 = ((O, O), (O, Z), (O, P), (O, R))
    wire2_z = ((Z, O), (Z, Z), (Z, P), (Z, R))
    wire1 = ((O, O), (Z, O), (P, O), (R, O))
    wire1_z = ((O, Z), (Z, Z), (P, Z), (R, Z))
    m[1, 2] = mix(b11, *wire2)
    m[3, 4] = mix(b22, *wire2)
    m[5, 6] = mix(b11, *wire2_z)
    m[7, 8] = mix(b22, *wire2_z)
    m[1, 5] = mix(b11, *wire1)
    m[3, 7] = mix(b22, *wire1)
    m[2, 6] = mix(b11, *wire1_z)
    m[4, 8] = mix(b22, *wire1_z)
    m[1, 7] = mix(b12, *wire1)
    m[3, 5] = mix(b21, *wire1)
    m[2, 8] = mix(b12, *wire1_z)
    m[4, 6] = mix(b21, *wire1_z)
    m[5, 8] = mix(b12, *wire2_z)
    m[6, 7] = mix(b12, *wire2_z, sign=+1)
    m[1, 4] = mix(b12, *wire2)
    m[2, 3] = mix(b12, *wire2, sign=+1)

    # stage 3: both wires on the equator
    def cross(b, pair_sum, diag_sum):
        return (
            (1 + 1j) * pair_sum
            - diag_sum
            + 8 * b(R, P)
            + 8 * b(P, R)
            + 8j * (b(P, P) - b(R, R))
        ) / 2j

    def straight(b, direct, conjugated, diag_sum):
        return (
            (1 + 1j) * direct
            + (1 - 1j) * conjugated
            - diag_sum
            + 8 * b(P, P)
            + 8 * b(R, R)
            + 8j * (b(P, R) - b(R, P))
        ) / 2

    c = np.conj
    d_upper = m[1, 1] + m[2, 2] + m[5, 5] + m[6, 6]
    d_lower = m[3, 3] + m[4, 4] + m[7, 7] + m[8, 8]
    d_cross = m[1, 3] + m[2, 4] + m[5, 7] + m[6, 8]
    m[1, 6] = cross(b11, m[1, 2] + m[1, 5] + m[2, 6] + m[5, 6], d_upper)
    m[2, 5] = straight(b11, m[1, 5] + m[2, 6], c(m[1, 2]) + c(m[5, 6]), d_upper)
    m[3, 8] = cross(b22, m[3, 4] + m[3, 7] + m[4, 8] + m[7, 8], d_lower)
    m[4, 7] = straight(b22, m[3, 7] + m[4, 8], c(m[3, 4]) + c(m[7, 8]), d_lower)
    m[1, 8] = cross(b12, m[1, 4] + m[1, 7] + m[2, 8] + m[5, 8], d_cross)
    m[2, 7] = straight(b12, m[1, 7] + m[2, 8], m[2, 3] + m[6, 7], d_cross)
    m[3, 6] = cross(b21, m[3, 5] + m[4, 6] + c(m[2, 3]) + c(m[6, 7]), c(d_cross))
    m[4, 5] = straight(b21, m[3, 5] + m[4, 6], c(m[1, 4]) + c(m[5, 8]), c(d_cross))
    return _hermitian_from_upper(m, 8)
