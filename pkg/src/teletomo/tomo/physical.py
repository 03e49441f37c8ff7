from __future__ import annotations

import numpy as np

from .. import qla
from ..errors import DegenerateDataError, NonHermitianError
from ..qstate import DensityMatrix

SAMPLED_HERM_TOL = 1e-6
PROJECTION_TOL = 1e-9


def project_physical(raw) -> tuple[DensityMatrix, bool]:
    """Map a Hermitian estimate onto the set of density matrices.

    Negative eigenvalues are clipped to zero and the trace renormalised to 1.
    Returns the state and whether the repair moved anything by more than
    ``PROJECTION_TOL``; an estimate that is already physical comes back
    unchanged.
    """
    raw = qla.as_matrix(raw, square=True)
    defect = qla.hermiticity_defect(raw)
    if defect > SAMPLED_HERM_TOL:
        raise NonHermitianError(f"estimate is not Hermitian (defect {defect:.3e})")
    h = (raw + qla.dagger(raw)) / 2
    n = int(round(np.log2(h.shape[0])))
    w, v = qla.hermitian_eigen(h)
    clipped = np.clip(w, 0.0, None)
    total = clipped.sum()
    if total <= 0.0:
        raise DegenerateDataError("estimate has no positive eigenvalues")
    moved = np.max(w - clipped) > PROJECTION_TOL or abs(total - 1.0) > PROJECTION_TOL
    if not moved and abs(np.trace(h).real - 1.0) <= PROJECTION_TOL:
        return DensityMatrix(n, h), False
    rho = (v * (clipped / total)) @ qla.dagger(v)
    return DensityMatrix(n, (rho + qla.dagger(rho)) / 2), True
