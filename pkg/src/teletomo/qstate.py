"""Quantum states: density matrices, teleportation inputs and the Bell basis."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import qla
from .errors import DimensionError, InvalidInputError

TRACE_TOL = 1e-9
PSD_TOL = 1e-9
NORM_TOL = 1e-12
STATE_FORMAT = "teletomo-state/1"

_S = 1 / math.sqrt(2)


class BellOutcome(enum.Enum):
    PSI_MINUS = "PsiMinus"
    PSI_PLUS = "PsiPlus"
    PHI_MINUS = "PhiMinus"
    PHI_PLUS = "PhiPlus"

    @property
    def index(self) -> int:
        return _BELL_INDEX[self]

    @classmethod
    def from_label(cls, label: str) -> "BellOutcome":
        try:
            return cls(label)
        except ValueError:
            raise InvalidInputError(f"unknown Bell outcome {label!r}") from None


BELL_OUTCOMES = tuple(BellOutcome)
_BELL_INDEX = {o: i for i, o in enumerate(BELL_OUTCOMES)}

# computational basis order 00, 01, 10, 11
_BELL_VECTORS = {
    BellOutcome.PSI_MINUS: np.array([0, _S, -_S, 0], dtype=np.complex128),
    BellOutcome.PSI_PLUS: np.array([0, _S, _S, 0], dtype=np.complex128),
    BellOutcome.PHI_MINUS: np.array([_S, 0, 0, -_S], dtype=np.complex128),
    BellOutcome.PHI_PLUS: np.array([_S, 0, 0, _S], dtype=np.complex128),
}


def bell_state(outcome: BellOutcome) -> np.ndarray:
    return _BELL_VECTORS[outcome].copy()


def bell_projector(outcome: BellOutcome) -> np.ndarray:
    v = _BELL_VECTORS[outcome]
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class InputState:
    """Pure single-qubit state ``alpha|0> + beta|1>`` teleported by Alice."""

    alpha: complex
    beta: complex
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if not (math.isfinite(abs(a)) and math.isfinite(abs(b))):
            raise InvalidInputError("input amplitudes must be finite")
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInputError(f"input state is not normalised (|alpha|^2+|beta|^2 = {norm!r})")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=np.complex128)

    @property
    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())

    @property
    def name(self) -> str:
        return self.label if self.label is not None else f"({self.alpha}, {self.beta})"

    def same_ray(self, other: "InputState", tol: float = 1e-12) -> bool:
        """True when both describe the same physical state (global phase ignored)."""
        return bool(np.max(np.abs(self.projector - other.projector)) <= tol)


ZERO = InputState(1.0, 0.0, "Zero")
ONE = InputState(0.0, 1.0, "One")
PLUS = InputState(_S, _S, "Plus")
RIGHT_CIRCULAR = InputState(_S, 1j * _S, "RightCircular")
MINUS = InputState(_S, -_S, "Minus")
LEFT_CIRCULAR = InputState(_S, -1j * _S, "LeftCircular")

NAMED_INPUTS = {s.label: s for s in (ZERO, ONE, PLUS, RIGHT_CIRCULAR, MINUS, LEFT_CIRCULAR)}


def standard_inputs() -> list[InputState]:
    """The four probe states, in record-format order."""
    return [ZERO, ONE, PLUS, RIGHT_CIRCULAR]


def minus_inputs() -> list[InputState]:
    """Alternative four-state set using the minus-sign equator points."""
    return [ZERO, ONE, MINUS, LEFT_CIRCULAR]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated n-qubit density matrix.

    Construction rejects anything that is not Hermitian, unit trace and
    positive semidefinite to tolerance; nothing is silently repaired.
    """

    qubits: int
    mat: np.ndarray

    def __post_init__(self):
        n = int(self.qubits)
        if n < 1:
            raise InvalidInputError(f"qubit count must be positive, got {self.qubits}")
        m = qla.as_matrix(self.mat, square=True)
        if m.shape[0] != 2**n:
            raise DimensionError(f"{n}-qubit state needs a {2**n}x{2**n} matrix, got {m.shape}")
        defect = qla.hermiticity_defect(m)
        if defect > qla.HERM_TOL:
            raise InvalidInputError(f"density matrix is not Hermitian (defect {defect:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidInputError(f"density matrix trace is {tr.real:.12g}, expected 1")
        lam = np.linalg.eigvalsh((m + qla.dagger(m)) / 2)
        if lam[0] < -PSD_TOL:
            raise InvalidInputError(f"density matrix is not positive semidefinite (min eigenvalue {lam[0]:.3e})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "qubits", n)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return 2**self.qubits

    def eigenvalues(self) -> np.ndarray:
        return qla.hermitian_eigen(self.mat)[0]

    def reduced(self, keep) -> "DensityMatrix":
        keep = sorted(set(keep))
        return DensityMatrix(len(keep), qla.partial_trace(self.mat, [2] * self.qubits, keep))

    def to_json_dict(self) -> dict:
        flat = self.mat.reshape(-1)
        return {
            "format": STATE_FORMAT,
            "qubits": self.qubits,
            "mat": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "DensityMatrix":
        fmt = obj.get("format", STATE_FORMAT)
        if fmt != STATE_FORMAT:
            raise InvalidInputError(f"unsupported state format {fmt!r}")
        try:
            n = int(obj["qubits"])
            pairs = np.asarray(obj["mat"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed state object: {exc}") from None
        if pairs.shape != (4**n, 2):
            raise InvalidInputError(f"state 'mat' must hold {4**n} [re, im] pairs, got shape {pairs.shape}")
        mat = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(2**n, 2**n)
        return cls(n, mat)


def random_density(qubits: int, rank: int, seed: int) -> DensityMatrix:
    """Ginibre-ensemble state ``G G† / Tr(G G†)`` with ``G`` of shape ``2^n x rank``."""
    if not 1 <= qubits <= 5:
        raise InvalidInputError(f"random states support 1..5 qubits, got {qubits}")
    d = 2**qubits
    if not 1 <= rank <= d:
        raise InvalidInputError(f"rank must lie in 1..{d} for {qubits} qubits, got {rank}")
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))) / math.sqrt(2)
    rho = g @ qla.dagger(g)
    rho = (rho + qla.dagger(rho)) / 2
    return DensityMatrix(qubits, rho / np.trace(rho).real)


def _check_pair(a: DensityMatrix, b: DensityMatrix):
    if a.qubits != b.qubits:
        raise DimensionError(f"cannot compare a {a.qubits}-qubit state with a {b.qubits}-qubit state")


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    _check_pair(a, b)
    lam = qla.hermitian_eigen(a.mat - b.mat)[0]
    return float(min(1.0, 0.5 * np.sum(np.abs(lam))))


def frobenius_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    _check_pair(a, b)
    return float(np.linalg.norm(a.mat - b.mat))
