"""General n-qubit reconstruction by linear inversion.

The design matrix is built by pushing a fixed Hermitian operator basis
through the teleportation map. Basis order, which is also the order of the
unknown vector:

1. diagonal units ``E_kk`` for k = 0..d-1;
2. symmetric pairs ``E_kl + E_lk`` for k < l, row-major;
3. antisymmetric pairs ``i (E_kl - E_lk)`` for k < l, row-major.

Each arrangement contributes four data rows: ``tilde[0,0]``, ``tilde[1,1]``,
``Re tilde[0,1]`` and ``Im tilde[0,1]``. Arrangements follow
:func:`teletomo.teleportsim.all_arrangements`.
"""

from __future__ import annotations

import functools
from typing import Mapping, Sequence

import numpy as np

from .. import qla, teleportsim
from ..errors import InsufficientDataError, InvalidInputError
from ..qstate import BellOutcome, InputState, standard_inputs


def pair_indices(d: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(d, k=1)


def params_to_matrix(x: np.ndarray, d: int) -> np.ndarray:
    """Inverse of the basis expansion: parameter vector to Hermitian matrix."""
    k, l = pair_indices(d)
    npairs = k.size
    m = np.diag(np.asarray(x[:d], dtype=np.complex128))
    upper = x[d : d + npairs] + 1j * x[d + npairs :]
    m[k, l] = upper
    m[l, k] = np.conj(upper)
    return m


def matrix_to_params(m: np.ndarray) -> np.ndarray:
    d = m.shape[0]
    k, l = pair_indices(d)
    return np.concatenate([np.diag(m).real, m[k, l].real, m[k, l].imag])


def tilde_to_row(tilde: np.ndarray) -> np.ndarray:
    return np.array([tilde[0, 0].real, tilde[1, 1].real, tilde[0, 1].real, tilde[0, 1].imag])


@functools.lru_cache(maxsize=32)
def _design(n: int, outcomes: tuple[BellOutcome, ...], inputs: tuple[InputState, ...]) -> np.ndarray:
    d = 2**n
    k, l = pair_indices(d)
    blocks = []
    for arr in teleportsim.all_arrangements(n, inputs):
        kop = teleportsim.tilde_operator(arr, outcomes)
        # images of every E_kl: outer[k, l] = K[:, k] K[:, l]^†
        outer = np.einsum("ak,bl->klab", kop, kop.conj())
        images = np.concatenate(
            [
                outer[np.arange(d), np.arange(d)],
                outer[k, l] + outer[l, k],
                1j * (outer[k, l] - outer[l, k]),
            ]
        )
        blocks.append(
            np.stack([images[:, 0, 0].real, images[:, 1, 1].real, images[:, 0, 1].real, images[:, 0, 1].imag])
        )
    a = np.concatenate(blocks, axis=0)
    a.setflags(write=False)
    return a


def design_matrix(
    n: int,
    outcomes: Sequence[BellOutcome] | None = None,
    inputs: Sequence[InputState] | None = None,
) -> np.ndarray:
    """Real ``4^n x 4^n`` matrix mapping state parameters to stacked Bob data."""
    teleportsim._check_qubits(n)
    outcomes = tuple(outcomes) if outcomes is not None else (BellOutcome.PSI_MINUS,) * (n - 1)
    if len(outcomes) != n - 1:
        raise InvalidInputError(f"{n} qubits need {n - 1} Bell outcomes, got {len(outcomes)}")
    inputs = tuple(standard_inputs() if inputs is None else inputs)
    return _design(n, outcomes, inputs)


@functools.lru_cache(maxsize=32)
def design_condition(n: int, outcomes: tuple[BellOutcome, ...] | None = None, inputs: tuple[InputState, ...] | None = None) -> float:
    s = np.linalg.svd(design_matrix(n, outcomes, inputs), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def data_vector(tilde_by_arrangement: Mapping, arrangements: Sequence) -> np.ndarray:
    rows = []
    for arr in arrangements:
        try:
            tilde = tilde_by_arrangement[tuple(arr)]
        except KeyError:
            names = ",".join(s.name for s in arr)
            raise InsufficientDataError(f"missing data for arrangement ({names})") from None
        rows.append(tilde_to_row(qla.as_matrix(tilde)))
    return np.concatenate(rows)


def solve(tilde_by_arrangement: Mapping, outcomes, n: int, inputs=None):
    """Return ``(raw, residual, condition)`` for the n-qubit inversion."""
    a = design_matrix(n, outcomes, inputs)
    arrangements = teleportsim.all_arrangements(n, standard_inputs() if inputs is None else inputs)
    y = data_vector(tilde_by_arrangement, arrangements)
    x, cond = qla.solve_linear(a, y)
    residual = float(np.linalg.norm(a @ x - y))
    return params_to_matrix(x, 2**n), residual, cond
