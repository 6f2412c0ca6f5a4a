"""Small dense LP solver: maximize c.x subject to A x <= d, x free.

Two-phase simplex on the standard form obtained by splitting free
variables and adding slacks. Entering columns follow Bland's rule
(smallest eligible index) and ratio-test ties are broken by smallest
basic-variable index, so the solve is deterministic and cannot cycle.
Reduced costs are recomputed from the tableau every iteration; the
problems here are tiny, so robustness beats arithmetic reuse.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLPError, ShapeError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

FEAS_TOL = 1e-9    # feasibility / reduced-cost tolerance
PIVOT_MIN = 1e-11  # pivots below this are numeric breakdown
ZERO_TOL = 1e-13   # entries below this count as zero


@dataclass
class LPResult:
    status: str
    value: float
    point: np.ndarray | None

    @property
    def optimal(self):
        return self.status == OPTIMAL


def _pivot(T, basis, r, j):
    piv = T[r, j]
    if abs(piv) < PIVOT_MIN:
        raise DegenerateLPError(f"pivot {piv:.3e} below {PIVOT_MIN:g}")
    piv_row = T[r] / piv
    T -= np.outer(T[:, j], piv_row)
    T[r] = piv_row
    T[:, j] = 0.0
    T[r, j] = 1.0
    basis[r] = j
    # tiny negative rhs is rounding noise
    rhs = T[:, -1]
    rhs[(rhs < 0.0) & (rhs > -FEAS_TOL)] = 0.0


def _ratio_row(T, basis, j):
    """Leaving row for entering column j, or None when the column opens up."""
    col = T[:, j]
    rows = np.flatnonzero(col > ZERO_TOL)
    if rows.size == 0:
        return None
    ratios = T[rows, -1] / col[rows]
    best = ratios.min()
    cand = rows[ratios <= best]
    return int(cand[np.argmin(basis[cand])])


def lp_max(objective, A, d):
    """Maximize objective . x over {x : A x <= d} with x unrestricted in sign.

    Returns an LPResult whose value/point are only meaningful when the
    status is optimal. Raises DegenerateLPError on numeric breakdown.
    """
    c = np.atleast_1d(np.asarray(objective, dtype=float))
    A = np.asarray(A, dtype=float)
    d = np.atleast_1d(np.asarray(d, dtype=float))
    n = c.shape[0]
    if A.size == 0:
        A = A.reshape(d.shape[0], n)
    if A.ndim != 2 or A.shape != (d.shape[0], n):
        raise ShapeError(f"LP shapes inconsistent: c{c.shape} A{A.shape} d{d.shape}")
    m = A.shape[0]

    if m == 0:
        if np.any(np.abs(c) > FEAS_TOL):
            return LPResult(UNBOUNDED, np.inf, None)
        return LPResult(OPTIMAL, 0.0, np.zeros(n))

    # Standard form: x = u - v, slack s; flipped rows get an artificial.
    flip = d < 0
    sign = np.where(flip, -1.0, 1.0)
    n_struct = 2 * n + m
    n_art = int(flip.sum())
    T = np.zeros((m, n_struct + n_art + 1))
    T[:, :n] = sign[:, None] * A
    T[:, n:2 * n] = -T[:, :n]
    T[:, 2 * n:n_struct] = np.diag(sign)
    T[:, -1] = sign * d
    basis = np.empty(m, dtype=int)
    art = n_struct
    for i in range(m):
        if flip[i]:
            T[i, art] = 1.0
            basis[i] = art
            art += 1
        else:
            basis[i] = 2 * n + i

    max_iter = 2000 + 200 * (m + n)

    # Phase 1: drive the artificial variables to zero.
    if n_art > 0:
        for _ in range(max_iter):
            art_rows = basis >= n_struct
            if not art_rows.any():
                break
            rate = T[art_rows, :n_struct].sum(axis=0)
            eligible = np.flatnonzero(rate > FEAS_TOL)
            if eligible.size == 0:
                break
            enter = int(eligible[0])
            leave = _ratio_row(T, basis, enter)
            if leave is None:
                raise DegenerateLPError("phase-1 column with no positive entry")
            _pivot(T, basis, leave, enter)
        else:
            raise DegenerateLPError("phase-1 iteration limit reached")
        infeas = T[basis >= n_struct, -1].sum()
        if infeas > FEAS_TOL:
            return LPResult(INFEASIBLE, np.nan, None)
        # Pivot leftover artificials out, or drop their redundant rows.
        drop = []
        for r in np.flatnonzero(basis >= n_struct):
            row = np.abs(T[r, :n_struct])
            j = int(row.argmax())
            if row[j] >= PIVOT_MIN:
                _pivot(T, basis, r, j)
            elif row[j] > ZERO_TOL:
                raise DegenerateLPError(f"pivot {row[j]:.3e} below {PIVOT_MIN:g}")
            else:
                drop.append(r)
        if drop:
            keep = np.setdiff1d(np.arange(T.shape[0]), drop)
            T = T[keep]
            basis = basis[keep]
        T = np.hstack([T[:, :n_struct], T[:, -1:]])

    # Phase 2: maximize the real objective.
    c_ext = np.zeros(n_struct)
    c_ext[:n] = c
    c_ext[n:2 * n] = -c
    for _ in range(max_iter):
        reduced = c_ext - c_ext[basis] @ T[:, :n_struct]
        eligible = np.flatnonzero(reduced > FEAS_TOL)
        if eligible.size == 0:
            x = np.zeros(n_struct)
            x[basis] = T[:, -1]
            point = x[:n] - x[n:2 * n]
            return LPResult(OPTIMAL, float(c @ point), point)
        enter = int(eligible[0])
        leave = _ratio_row(T, basis, enter)
        if leave is None:
            return LPResult(UNBOUNDED, np.inf, None)
        _pivot(T, basis, leave, enter)
    raise DegenerateLPError("phase-2 iteration limit reached")


def lp_feasible(A, d):
    """True when {x : A x <= d} is nonempty (within the solver tolerance)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[1] if A.ndim == 2 else 0
    return lp_max(np.zeros(n), A, d).optimal
