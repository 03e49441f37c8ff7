"""Dense complex linear algebra for small quantum-information matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single entry point that validates shape and finiteness. Subsystem 0 is
always the most significant tensor factor.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidInputError, NonHermitianError, SingularSystemError

MAX_DIM = 2**11
HERM_TOL = 1e-9
SINGULAR_RCOND = 1e-12


def as_matrix(x, *, square: bool = False) -> np.ndarray:
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix contains NaN or Inf entries")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` with ``a`` as the most significant factor."""
    a = as_matrix(a)
    b = as_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > MAX_DIM:
        raise DimensionError(f"tensor product of size {rows}x{cols} exceeds {MAX_DIM}")
    return np.kron(a, b)


def tensor_all(*factors) -> np.ndarray:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = tensor(out, f)
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or math.prod(dims) != m.shape[0]:
        raise DimensionError(f"subsystem dims {dims} do not factor a {m.shape[0]}-dim space")
    return dims


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original relative order.
    """
    m = as_matrix(m, square=True)
    dims = _check_dims(m, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise InvalidInputError("keep must name at least one subsystem; use np.trace for the full trace")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} subsystems")

    n = len(dims)
    t = m.reshape(dims + dims)
    # einsum labels: row index i_k, column index j_k; traced subsystems share a label
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    row = [next(letters) for _ in range(n)]
    col = [row[k] if k not in keep else next(letters) for k in range(n)]
    out = [row[k] for k in keep] + [col[k] for k in keep]
    reduced = np.einsum("".join(row + col) + "->" + "".join(out), t)
    d = math.prod(dims[k] for k in keep)
    return reduced.reshape(d, d)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: factor ``order[k]`` of ``m`` becomes factor ``k``."""
    m = as_matrix(m, square=True)
    dims = _check_dims(m, dims)
    order = list(order)
    if sorted(order) != list(range(len(dims))):
        raise InvalidInputError(f"{order} is not a permutation of {len(dims)} subsystems")
    n = len(dims)
    t = m.reshape(dims + dims).transpose(order + [n + k for k in order])
    return t.reshape(m.shape)


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m))))


def hermitian_eigen(m, tol: float = HERM_TOL, method: str = "lapack"):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    eigenvectors as columns, so that ``m = V diag(w) V†``. ``method`` selects
    LAPACK (``"lapack"``) or the cyclic Jacobi routine (``"jacobi"``).
    """
    m = as_matrix(m, square=True)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianError(f"matrix is not Hermitian (max |m - m†| = {defect:.3e})")
    h = (m + dagger(m)) / 2
    if method == "lapack":
        w, v = np.linalg.eigh(h)
        return w, v
    if method == "jacobi":
        return jacobi_eigh(h)
    raise InvalidInputError(f"unknown eigen method {method!r}")


def jacobi_eigh(h: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60):
    """Cyclic Jacobi diagonalisation of a complex Hermitian matrix.

    Each (p, q) rotation first removes the phase of ``h[p, q]`` and then
    applies a real Givens rotation that zeroes it.
    """
    a = np.array(h, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                # smaller of the two zeroing angles, |theta| <= pi/4
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = dagger(rot) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ rot
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def solve_linear(a, y, rcond: float = SINGULAR_RCOND):
    """Solve the square real system ``a x = y``.

    Returns ``(x, condition)`` where ``condition`` is the ratio of the largest
    to the smallest singular value of ``a``. A matrix whose smallest singular
    value falls below ``rcond`` times the largest raises
    :class:`SingularSystemError` instead of being regularised.
    """
    a = np.asarray(a, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square real matrix, got shape {a.shape}")
    if y.shape != (a.shape[0],):
        raise DimensionError(f"right-hand side of shape {y.shape} does not match {a.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(y))):
        raise InvalidInputError("linear system contains NaN or Inf entries")
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= rcond * s[0]:
        cond = float("inf") if s[-1] == 0.0 else float(s[0] / s[-1])
        raise SingularSystemError(f"linear system is singular to tolerance (condition {cond:.3e})", cond)
    x = np.linalg.solve(a, y)
    return x, float(s[0] / s[-1])
