"""Dense bounded-variable simplex for the attack's tiny linear programs.

The problems solved here have a handful of rows and a few dozen box-bounded
variables, so a two-phase primal simplex with Bland's anti-cycling rule is
exact (up to floating point), deterministic across platforms and runs, and
fast. Basic solutions satisfy the equality constraints to machine precision,
which the attack verifier relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Reduced-cost threshold below which a column is not worth entering.
_DUAL_TOL = 1e-11
#: Direction components smaller than this impose no ratio limit.
_PIVOT_TOL = 1e-11
#: Residual infeasibility accepted at the end of phase 1.
_FEAS_TOL = 1e-10

_AT_LOWER = 0
_AT_UPPER = 1
_BASIC = 2

_MAX_ITER = 20000


class SolverError(RuntimeError):
    """The simplex failed to converge or produced an invalid solution."""


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" or "infeasible"
    x: np.ndarray | None
    fun: float | None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def solve_lp(
    c: np.ndarray,
    a_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    a_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    upper: np.ndarray | float = 1.0,
) -> LPResult:
    """Minimize ``c @ x`` subject to equalities, inequalities and ``0 <= x <= upper``.

    Args:
        c: Objective coefficients for the structural variables.
        a_eq, b_eq: Equality system ``a_eq @ x == b_eq`` (optional).
        a_ub, b_ub: Inequality system ``a_ub @ x <= b_ub`` (optional).
        upper: Scalar or per-variable upper bounds (may be ``np.inf``).

    Returns:
        ``LPResult`` with status ``"optimal"`` or ``"infeasible"``.

    Raises:
        SolverError: On iteration-limit overrun, unboundedness, or a final
            solution that fails its own feasibility check.
    """
    c = np.asarray(c, dtype=float)
    n_struct = c.size
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    n_slack = 0
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        for row, b in zip(a_eq, b_eq):
            rows.append(row)
            rhs.append(float(b))
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        n_slack = a_ub.shape[0]
        for row, b in zip(a_ub, b_ub):
            rows.append(row)
            rhs.append(float(b))
    if not rows:
        raise ValueError("at least one constraint row is required")

    m = len(rows)
    n_eq = m - n_slack
    a = np.zeros((m, n_struct + n_slack + m))
    b = np.array(rhs, dtype=float)
    a[:, :n_struct] = np.vstack(rows)
    for k in range(n_slack):
        a[n_eq + k, n_struct + k] = 1.0

    u = np.full(n_struct + n_slack + m, np.inf)
    u[:n_struct] = np.broadcast_to(np.asarray(upper, dtype=float), (n_struct,))
    if np.any(u[:n_struct] < 0):
        raise ValueError("upper bounds must be >= 0")

    # Phase-1 artificials carry the residual sign so they start feasible at |b|.
    n_total = n_struct + n_slack + m
    art = slice(n_struct + n_slack, n_total)
    for i in range(m):
        a[i, n_struct + n_slack + i] = 1.0 if b[i] >= 0 else -1.0

    x = np.zeros(n_total)
    x[art] = np.abs(b)
    status = np.full(n_total, _AT_LOWER, dtype=np.int8)
    status[art] = _BASIC
    basis = list(range(n_struct + n_slack, n_total))

    c1 = np.zeros(n_total)
    c1[art] = 1.0
    _iterate(a, c1, u, x, status, basis, enterable=np.arange(n_struct + n_slack))

    if float(x[art].sum()) > _FEAS_TOL:
        return LPResult(status="infeasible", x=None, fun=None)

    # Artificials are pinned at zero for phase 2; they may linger in the
    # basis at a degenerate level without affecting the solution.
    u[art] = 0.0
    x[art] = 0.0
    c2 = np.zeros(n_total)
    c2[:n_struct] = c
    _iterate(a, c2, u, x, status, basis, enterable=np.arange(n_struct + n_slack))

    residual = a @ x - b
    if float(np.max(np.abs(residual))) > 1e-8:
        raise SolverError("solution failed the final feasibility check")
    sol = x[:n_struct].copy()
    np.clip(sol, 0.0, u[:n_struct], out=sol)
    return LPResult(status="optimal", x=sol, fun=float(c @ sol))


def _iterate(
    a: np.ndarray,
    c: np.ndarray,
    u: np.ndarray,
    x: np.ndarray,
    status: np.ndarray,
    basis: list[int],
    enterable: np.ndarray,
) -> None:
    """Run primal simplex pivots in place until optimality (Bland's rule)."""
    m = a.shape[0]
    cols = a[:, enterable]
    c_ent = c[enterable]
    for _ in range(_MAX_ITER):
        basis_matrix = a[:, basis]
        y = np.linalg.solve(basis_matrix.T, c[basis])
        reduced = c_ent - y @ cols
        st = status[enterable]
        eligible = ((st == _AT_LOWER) & (reduced < -_DUAL_TOL)) | (
            (st == _AT_UPPER) & (reduced > _DUAL_TOL)
        )
        if not eligible.any():
            return
        entering = int(enterable[eligible][0])  # Bland: smallest index
        direction_up = status[entering] == _AT_LOWER

        w = np.linalg.solve(basis_matrix, a[:, entering])
        # Basic values move by -t*w when the entering variable rises,
        # +t*w when it falls from its upper bound.
        step = w if direction_up else -w

        t_best = u[entering] if np.isfinite(u[entering]) else np.inf
        leave_pos = -1
        leave_to_upper = False
        for i in range(m):
            bi = basis[i]
            if step[i] > _PIVOT_TOL:
                t = (x[bi] - 0.0) / step[i]
                hits_upper = False
            elif step[i] < -_PIVOT_TOL and np.isfinite(u[bi]):
                t = (u[bi] - x[bi]) / (-step[i])
                hits_upper = True
            else:
                continue
            if t < t_best - _PIVOT_TOL or (
                t < t_best + _PIVOT_TOL and (leave_pos < 0 or bi < basis[leave_pos])
            ):
                t_best = t
                leave_pos = i
                leave_to_upper = hits_upper
        if not np.isfinite(t_best):
            raise SolverError("linear program is unbounded")
        t_best = max(t_best, 0.0)

        x[basis] -= t_best * step
        if direction_up:
            x[entering] = 0.0 + t_best
        else:
            x[entering] = u[entering] - t_best

        if leave_pos < 0:
            # Bound flip: the entering variable crossed its whole range.
            status[entering] = _AT_UPPER if direction_up else _AT_LOWER
            continue
        leaving = basis[leave_pos]
        x[leaving] = u[leaving] if leave_to_upper else 0.0
        status[leaving] = _AT_UPPER if leave_to_upper else _AT_LOWER
        status[entering] = _BASIC
        basis[leave_pos] = entering
    raise SolverError("simplex iteration limit exceeded")
