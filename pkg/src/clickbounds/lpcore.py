"""Dense linear-program solver (two-phase revised primal simplex, Bland
anti-cycling) with independently verifiable duality certificates.

Instances here are tiny (tens of rows, a few hundred columns) but brutally
conditioned: the constraint rows are Vandermonde-like powers and optimal
bases can be nearly singular. Three design consequences:

* revised simplex, refactorizing the basis from the original data on every
  iteration, so numerical error never accumulates along the pivot path;
* every float solution is certificate-checked before being returned, and on
  failure the instance is re-solved in exact rational arithmetic (floats are
  exact rationals), warm-started from the float basis;
* exact solutions are optimal by construction (Bland terminates with exactly
  nonnegative reduced costs). Their float-rounded dual vector may still fail
  the float certificate when the true dual has huge norm; the
  ``exact_arithmetic`` flag records the stronger guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ClickboundsError, InvalidParameterError

PIVOT_TOL = 1e-10
FEASIBILITY_TOL = 1e-8
DUAL_FEASIBILITY_TOL = 1e-8
GAP_TOL = 1e-7
PRIMAL_NEG_TOL = 1e-9

MINIMIZE = "minimize"
MAXIMIZE = "maximize"

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_MAX_FLOAT_ITERATIONS = 5_000
_MAX_EXACT_ITERATIONS = 50_000


@dataclass(frozen=True)
class LinearProgram:
    """min/max objective . x  subject to  constraint_matrix . x = rhs, x >= 0.

    ``rhs_exact`` optionally carries the rhs as exact rationals. When the rhs
    was produced by a dot product whose exact value is known (constraints
    built from a reference distribution), passing it here lets the exact
    solver honor feasibility of the reference point to infinite precision;
    ``rhs`` must then be its correctly rounded float image.
    """

    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    sense: str = MINIMIZE
    rhs_exact: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        obj = np.asarray(self.objective, dtype=float)
        mat = np.asarray(self.constraint_matrix, dtype=float)
        rhs = np.asarray(self.rhs, dtype=float)
        if mat.ndim != 2 or obj.ndim != 1 or rhs.ndim != 1:
            raise InvalidParameterError("LP pieces have wrong dimensionality")
        if mat.shape != (rhs.size, obj.size):
            raise InvalidParameterError(
                f"constraint matrix {mat.shape} inconsistent with "
                f"objective {obj.size} / rhs {rhs.size}"
            )
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise InvalidParameterError(f"unknown sense {self.sense!r}")
        for name, arr in (("objective", obj), ("matrix", mat), ("rhs", rhs)):
            if not np.isfinite(arr).all():
                raise InvalidParameterError(f"non-finite entries in {name}")
        if self.rhs_exact is not None:
            if len(self.rhs_exact) != rhs.size:
                raise InvalidParameterError("rhs_exact length mismatch")
            object.__setattr__(
                self, "rhs_exact", tuple(Fraction(v) for v in self.rhs_exact)
            )
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraint_matrix", mat)
        object.__setattr__(self, "rhs", rhs)

    def internal_cost(self) -> np.ndarray:
        return self.objective if self.sense == MINIMIZE else -self.objective

    def exact_rhs(self) -> list:
        """rhs as exact rationals (gmpy2 mpq when available)."""
        if self.rhs_exact is not None:
            return [_QQ(v) for v in self.rhs_exact]
        return [_QQ(v) for v in self.rhs]


@dataclass(frozen=True)
class LPSolution:
    optimum: float
    primal: np.ndarray
    dual: np.ndarray
    status: str
    duality_gap: float
    iterations: int = 0
    exact_arithmetic: bool = False


@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    max_primal_residual: float
    min_primal_entry: float
    max_dual_violation: float
    duality_gap: float
    failures: tuple[str, ...]


class _Infeasible(Exception):
    pass


class _Unbounded(Exception):
    pass


class _Stalled(Exception):
    """Float arithmetic gave out; retry exactly."""


# ---------------------------------------------------------------------------
# float path


def _plu_solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Partial-pivot LU solve that also works for longdouble arrays."""
    n = mat.shape[0]
    a = mat.astype(mat.dtype, copy=True)
    x = rhs.astype(mat.dtype, copy=True)
    perm = np.arange(n)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0:
            raise np.linalg.LinAlgError("singular matrix")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            x[[k, piv]] = x[[piv, k]]
        factors = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(factors, a[k, k + 1 :])
        x[k + 1 :] -= factors * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x


def _solve_square(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if mat.dtype == np.longdouble:
        try:
            return _plu_solve(mat, rhs)
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(
                mat.astype(float), rhs.astype(float), rcond=None
            )[0].astype(np.longdouble)
    try:
        return np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(mat, rhs, rcond=None)[0]


def _refined_solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Linear solve plus one step of extended-precision iterative refinement."""
    x = _solve_square(mat, rhs)
    residual = rhs.astype(np.longdouble) - mat.astype(np.longdouble) @ x.astype(
        np.longdouble
    )
    return x + _solve_square(mat, residual.astype(float))


def _float_simplex(
    a: np.ndarray, b: np.ndarray, cost: np.ndarray, dtype=float
) -> tuple[list[int], np.ndarray, int]:
    """Two-phase revised simplex in floating point (double or longdouble).

    Artificial variables keep their slot through phase 2 (cost 0, barred from
    entering); redundant rows thus keep a basic artificial pinned at zero and
    automatically receive dual value 0. Returns (basis, row signs, iterations).
    """
    nrows, nvars = a.shape
    pivot_tol = PIVOT_TOL if dtype == float else 1e-14
    signs = np.where(b < 0.0, -1.0, 1.0)
    ext = np.hstack([a * signs[:, None], np.eye(nrows)]).astype(dtype)
    rhs = (b * signs).astype(dtype)
    phase1_cost = np.concatenate([np.zeros(nvars), np.ones(nrows)]).astype(dtype)
    phase2_cost = np.concatenate([cost, np.zeros(nrows)]).astype(dtype)
    basis = list(range(nvars, nvars + nrows))
    iterations = 0

    def run_phase(cvec: np.ndarray) -> None:
        nonlocal iterations
        scale = 1.0 + np.abs(cvec[:nvars])
        while True:
            bmat = ext[:, basis]
            y = _solve_square(bmat.T, cvec[basis])
            reduced = cvec[:nvars] - ext[:, :nvars].T @ y
            eligible = reduced < -pivot_tol * scale
            for idx in basis:
                if idx < nvars:
                    eligible[idx] = False
            entering = np.nonzero(eligible)[0]
            if entering.size == 0:
                return
            j = int(entering[0])
            direction = _solve_square(bmat, ext[:, j])
            positive = direction > pivot_tol
            if not positive.any():
                raise _Unbounded
            xb = np.clip(_solve_square(bmat, rhs), 0.0, None)
            ratios = np.full(nrows, np.inf, dtype=dtype)
            ratios[positive] = xb[positive] / direction[positive]
            best = ratios.min()
            tied = np.nonzero(ratios <= best + 1e-12)[0]
            basis_arr = np.asarray(basis)
            basis[int(tied[np.argmin(basis_arr[tied])])] = j
            iterations += 1
            if iterations > _MAX_FLOAT_ITERATIONS:
                raise _Stalled

    run_phase(phase1_cost)
    xb = np.clip(_solve_square(ext[:, basis], rhs), 0.0, None)
    infeasibility = float(phase1_cost[basis] @ xb)
    if infeasibility > FEASIBILITY_TOL:
        raise _Infeasible
    # swap leftover basic artificials for original columns where possible
    # (degenerate swaps at zero level); truly redundant rows keep theirs
    for r in range(nrows):
        if basis[r] < nvars:
            continue
        unit = np.zeros(nrows, dtype=dtype)
        unit[r] = 1.0
        u = _solve_square(ext[:, basis].T, unit)
        row = np.abs(u @ ext[:, :nvars])
        for idx in basis:
            if idx < nvars:
                row[idx] = 0.0
        j = int(np.argmax(row))
        if row[j] > 1e-7:
            basis[r] = j
    run_phase(phase2_cost)
    return basis, signs, iterations


def _finish(
    lp: LinearProgram, basis: list[int], signs: np.ndarray, iterations: int
) -> LPSolution:
    """Re-derive primal and dual from the original data for the final basis.

    A fresh, refined factorization of the basis matrix keeps residuals near
    machine precision regardless of how long the pivot path was. Basic
    artificials (redundant rows) contribute signed unit columns, zero cost,
    and hence dual value zero for their row.
    """
    cost = lp.internal_cost()
    nrows, nvars = lp.constraint_matrix.shape
    bmat = np.zeros((nrows, nrows))
    cost_basis = np.zeros(nrows)
    for pos, j in enumerate(basis):
        if j < nvars:
            bmat[:, pos] = lp.constraint_matrix[:, j]
            cost_basis[pos] = cost[j]
        else:
            bmat[j - nvars, pos] = signs[j - nvars]
    x_basis = _refined_solve(bmat, lp.rhs)
    dual = _refined_solve(bmat.T, cost_basis)
    primal = np.zeros(nvars)
    for pos, j in enumerate(basis):
        if j < nvars:
            primal[j] = x_basis[pos]
    if lp.sense == MAXIMIZE:
        dual = -dual
    optimum = float(lp.objective @ primal)
    gap = abs(optimum - float(dual @ lp.rhs))
    return LPSolution(
        optimum=optimum,
        primal=primal,
        dual=dual,
        status=OPTIMAL,
        duality_gap=gap,
        iterations=iterations,
    )


_RISK_TOL = 1e-9


def _perturbation_risk(
    lp: LinearProgram, sol: LPSolution, rep: CertificateReport
) -> float:
    """Bound on how far the reported optimum can sit from the optimum of the
    infinitely precise instance: dual response to one-ulp rhs rounding plus
    the certified gap and dual slack."""
    ulp = np.abs(lp.rhs) * 2.0**-52
    return float(
        np.abs(sol.dual) @ ulp
        + rep.duality_gap
        + max(rep.max_dual_violation, 0.0) * (1.0 + float(np.abs(sol.primal).sum()))
    )


def solve(lp: LinearProgram) -> LPSolution:
    """Solve the LP; on status 'optimal' the primal is a basic feasible
    optimizer and the dual is derived from the final basis.

    Deterministic for identical inputs. The float solution is returned only
    when its certificate passes and the dual is small enough that rhs
    rounding cannot have moved the optimum materially; otherwise, and for all
    infeasible/unbounded classifications, the instance is settled in exact
    rational arithmetic.
    """
    try:
        try:
            basis, signs, iterations = _float_simplex(
                lp.constraint_matrix, lp.rhs, lp.internal_cost()
            )
            sol = _finish(lp, basis, signs, iterations)
            rep = verify_certificate(lp, sol)
            if rep.ok and _perturbation_risk(lp, sol, rep) <= _RISK_TOL:
                return sol
            quick = _exact_solution_from_basis(lp, basis, signs)
            if quick is not None:
                return quick
        except _Stalled:
            pass
        # the double-precision walk stopped short or stalled; rerun at
        # extended precision, which usually lands on the exactly optimal
        # basis, then repair the leftovers in exact arithmetic
        basis, signs, iterations = _float_simplex(
            lp.constraint_matrix, lp.rhs, lp.internal_cost(), dtype=np.longdouble
        )
        quick = _exact_solution_from_basis(lp, basis, signs)
        if quick is not None:
            return quick
        warm = _exact_warm(lp, basis, signs)
        if warm is not None:
            return warm
    except (_Infeasible, _Unbounded, _Stalled):
        pass
    return _exact_cold(lp)


def _status_solution(lp: LinearProgram, status: str, exact: bool = False) -> LPSolution:
    return LPSolution(
        optimum=float("nan"),
        primal=np.zeros(lp.objective.size),
        dual=np.zeros(lp.rhs.size),
        status=status,
        duality_gap=float("nan"),
        iterations=0,
        exact_arithmetic=exact,
    )


def verify_certificate(lp: LinearProgram, sol: LPSolution) -> CertificateReport:
    """Independently re-check primal feasibility, dual feasibility and the
    duality gap of a claimed optimal solution.

    A passing report proves optimality up to the stated tolerances: the dual
    vector certifies that no feasible point can beat the primal objective by
    more than the gap. On ill-conditioned instances the exact-arithmetic path
    can be optimal while its float-rounded dual still fails here; such
    solutions carry ``exact_arithmetic=True`` instead.
    """
    if sol.status != OPTIMAL:
        raise InvalidParameterError(
            f"certificates only exist for optimal solutions, got {sol.status!r}"
        )
    a, b, z = lp.constraint_matrix, lp.rhs, lp.objective
    residual = float(np.abs(a @ sol.primal - b).max()) if b.size else 0.0
    min_entry = float(sol.primal.min()) if sol.primal.size else 0.0
    slack = a.T @ sol.dual - z
    # minimize: A^T y <= z; maximize: A^T y >= z
    dual_violation = float(slack.max() if lp.sense == MINIMIZE else (-slack).max())
    gap = abs(float(z @ sol.primal) - float(sol.dual @ b))

    failures = []
    if residual > FEASIBILITY_TOL or min_entry < -PRIMAL_NEG_TOL:
        failures.append("primal-infeasible")
    if dual_violation > DUAL_FEASIBILITY_TOL:
        failures.append("dual-infeasible")
    if gap > GAP_TOL:
        failures.append("gap")
    return CertificateReport(
        ok=not failures,
        max_primal_residual=residual,
        min_primal_entry=min_entry,
        max_dual_violation=dual_violation,
        duality_gap=gap,
        failures=tuple(failures),
    )


# ---------------------------------------------------------------------------
# exact rational path
#
# gmpy2 (GMP) rationals are drop-in compatible with Fraction here and roughly
# an order of magnitude faster on the wide operands these eliminations
# produce; plain Fraction remains as a fallback.

try:
    from gmpy2 import lcm as _gmp_lcm, mpq as _QQ, mpz as _ZZ

    def _lcm(a, b):
        return _gmp_lcm(a, b)

except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from math import gcd as _gcd

    _QQ = Fraction
    _ZZ = int

    def _lcm(a, b):
        return a * b // _gcd(int(a), int(b))


_F0 = _QQ(0)


def _exact_gauss_multi(
    mat: list[list[Fraction]], rhs_list: list[list[Fraction]]
) -> list[list[Fraction]]:
    """Exact solve of mat . x = rhs for several rhs vectors at once, via
    fraction-free Bareiss elimination.

    Rows are scaled to integers first (cheap here: float-derived data has
    power-of-two denominators), after which Bareiss keeps every intermediate
    an exact integer minor with no gcd normalization at all. Only the final
    back substitution touches Fractions.
    """
    n = len(mat)
    m = len(rhs_list)
    rows = []
    for i in range(n):
        scale = _ZZ(1)
        for v in mat[i]:
            scale = _lcm(scale, v.denominator)
        for rhs in rhs_list:
            scale = _lcm(scale, rhs[i].denominator)
        rows.append(
            [v.numerator * (scale // v.denominator) for v in mat[i]]
            + [
                rhs[i].numerator * (scale // rhs[i].denominator)
                for rhs in rhs_list
            ]
        )
    prev = 1
    for k in range(n):
        piv = max(range(k, n), key=lambda r: abs(rows[r][k]))
        if rows[piv][k] == 0:
            raise ClickboundsError("singular basis in exact solve")
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
        rkk = rows[k][k]
        for i in range(k + 1, n):
            rik = rows[i][k]
            row_i = rows[i]
            row_k = rows[k]
            for j in range(k + 1, n + m):
                row_i[j] = (row_i[j] * rkk - rik * row_k[j]) // prev
            row_i[k] = 0
        prev = rkk
    out = []
    for t in range(m):
        x: list[Fraction] = [_F0] * n
        for k in range(n - 1, -1, -1):
            acc = _QQ(rows[k][n + t])
            for j in range(k + 1, n):
                acc -= rows[k][j] * x[j]
            x[k] = acc / rows[k][k]
        out.append(x)
    return out


def _exact_gauss_solve(
    mat: list[list[Fraction]], rhs: list[Fraction]
) -> list[Fraction]:
    return _exact_gauss_multi(mat, [rhs])[0]


def _integer_pricing(
    cost_arr: np.ndarray, matrix: np.ndarray, y: list[Fraction]
) -> list[int]:
    """Signs of the reduced costs c - A^T y, computed in pure integers.

    y is brought over a common denominator; every comparison then reduces to
    integer arithmetic over a shared power-of-two scale, avoiding Fraction
    normalization entirely.
    """
    nrows, nvars = matrix.shape
    d_common = _ZZ(1)
    for v in y:
        d_common = _lcm(d_common, v.denominator)
    y_num = [v.numerator * (d_common // v.denominator) for v in y]
    cols = matrix.T.tolist()
    out = []
    for j in range(nvars):
        total = 0
        scale = 0
        col = cols[j]
        for k in range(nrows):
            a = col[k]
            yk = y_num[k]
            if a == 0.0 or yk == 0:
                continue
            anum, aden = a.as_integer_ratio()
            exp = aden.bit_length() - 1
            num = anum * yk
            if exp > scale:
                total <<= exp - scale
                scale = exp
            else:
                num <<= scale - exp
            total += num
        # reduced cost sign = sign(c_j * d_common - A_j . y * d_common)
        cnum, cden = float(cost_arr[j]).as_integer_ratio()
        cexp = cden.bit_length() - 1
        lhs = cnum * d_common
        if cexp > scale:
            total <<= cexp - scale
            scale = cexp
        else:
            lhs <<= scale - cexp
        diff = lhs - total
        out.append(0 if diff == 0 else (1 if diff > 0 else -1))
    return out


class _ExactTableau:
    """Dense simplex tableau with Edmonds integer pivoting.

    Entries are exact integers over one shared denominator (the previous
    pivot element); every division in the pivot update is exact and no
    rational normalization ever runs. The denominator may go negative after a
    drive-out pivot, so all sign tests multiply through by its sign.
    """

    def __init__(self, rows, basis, kept, zrows, nvars):
        self.rows = rows          # each row: ncols integer coefficients + rhs
        self.basis = basis        # basis column index per row
        self.kept = kept          # original constraint row index per row
        self.zrows = zrows        # reduced-cost rows, kept in sync
        self.nvars = nvars        # entering is restricted to columns < nvars
        self.den = _ZZ(1)         # common denominator: true value = entry/den
        self.iterations = 0

    def value(self, r: int, j: int):
        return _QQ(self.rows[r][j], self.den)

    def pivot(self, r: int, j: int) -> None:
        rows = self.rows
        piv = rows[r][j]
        den = self.den
        piv_row = rows[r]
        for t in range(len(rows)):
            if t != r:
                row = rows[t]
                f = row[j]
                if f == 0:
                    rows[t] = [piv * v // den for v in row]
                else:
                    rows[t] = [
                        (piv * vo - f * vp) // den
                        for vo, vp in zip(row, piv_row)
                    ]
        for z in self.zrows:
            f = z[j]
            if f == 0:
                z[:] = [piv * v // den for v in z]
            else:
                z[:] = [(piv * vz - f * vp) // den for vz, vp in zip(z, piv_row)]
        self.den = piv
        self.basis[r] = j
        self.iterations += 1
        if self.iterations > _MAX_EXACT_ITERATIONS:
            raise ClickboundsError("exact simplex iteration limit exceeded")

    def bland_step(self, z: list) -> bool:
        sden = 1 if self.den > 0 else -1
        entering = next(
            (j for j in range(self.nvars) if sden * z[j] < 0), None
        )
        if entering is None:
            return False
        best_num = best_den = None
        leave = None
        for r, row in enumerate(self.rows):
            piv = row[entering]
            if sden * piv > 0:
                # ratio row[-1]/piv; denominators share a sign, so the
                # cross-multiplied comparison direction is unaffected
                if (
                    leave is None
                    or row[-1] * best_den < best_num * piv
                    or (
                        row[-1] * best_den == best_num * piv
                        and self.basis[r] < self.basis[leave]
                    )
                ):
                    best_num = row[-1]
                    best_den = piv
                    leave = r
        if leave is None:
            raise _Unbounded
        self.pivot(leave, entering)
        return True

    def run(self, z: list) -> None:
        while self.bland_step(z):
            pass


def _exact_finalize(lp: LinearProgram, tab: _ExactTableau) -> LPSolution:
    """Exact primal off the tableau, exact dual off the final basis."""
    nrows, nvars = lp.constraint_matrix.shape
    cost_arr = lp.internal_cost()
    primal = np.zeros(nvars)
    for r, bi in enumerate(tab.basis):
        primal[bi] = float(tab.value(r, -1))
    y_kept = _exact_gauss_solve(
        [
            [_QQ(lp.constraint_matrix[k, bi]) for k in tab.kept]
            for bi in tab.basis
        ],
        [_QQ(cost_arr[bi]) for bi in tab.basis],
    )
    dual = np.zeros(nrows)
    for idx, k in enumerate(tab.kept):
        dual[k] = float(y_kept[idx])
    if lp.sense == MAXIMIZE:
        dual = -dual
    optimum = float(lp.objective @ primal)
    gap = abs(optimum - float(dual @ lp.rhs))
    return LPSolution(
        optimum=optimum,
        primal=primal,
        dual=dual,
        status=OPTIMAL,
        duality_gap=gap,
        iterations=tab.iterations,
        exact_arithmetic=True,
    )


def _exact_basis_columns(
    lp: LinearProgram, basis: list[int], signs: np.ndarray
) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact basis columns and costs; artificials map to signed unit columns."""
    nrows, nvars = lp.constraint_matrix.shape
    cost_arr = lp.internal_cost()
    a_cols = []
    cost_basis = []
    for j in basis:
        if j < nvars:
            a_cols.append([_QQ(lp.constraint_matrix[k, j]) for k in range(nrows)])
            cost_basis.append(_QQ(cost_arr[j]))
        else:
            col = [_F0] * nrows
            col[j - nvars] = _QQ(int(signs[j - nvars]))
            a_cols.append(col)
            cost_basis.append(_F0)
    return a_cols, cost_basis


def _exact_transpose_dot(
    matrix: np.ndarray, y: list[Fraction], columns
) -> list[Fraction]:
    """Exact A_j . y for the requested columns, via a common denominator and
    integer accumulation over a power-of-two scale."""
    nrows = matrix.shape[0]
    d_common = _ZZ(1)
    for v in y:
        d_common = _lcm(d_common, v.denominator)
    y_num = [v.numerator * (d_common // v.denominator) for v in y]
    out = []
    for j in columns:
        total = 0
        scale = 0
        for k in range(nrows):
            a = float(matrix[k, j])
            yk = y_num[k]
            if a == 0.0 or yk == 0:
                continue
            anum, aden = a.as_integer_ratio()
            exp = aden.bit_length() - 1
            num = anum * yk
            if exp > scale:
                total <<= exp - scale
                scale = exp
            else:
                num <<= scale - exp
            total += num
        out.append(_QQ(total, d_common << scale))
    return out


def _exact_solution_from_basis(
    lp: LinearProgram, basis: list[int], signs: np.ndarray
) -> LPSolution | None:
    """Exact optimal solution for a basis, or None if the basis fails any of:
    nonsingular, artificials exactly at zero, primal within the negativity
    tolerance, reduced costs exactly nonnegative."""
    nrows, nvars = lp.constraint_matrix.shape
    cost_arr = lp.internal_cost()
    a_cols, cost_basis = _exact_basis_columns(lp, basis, signs)
    try:
        x_basis = _exact_gauss_solve(
            [[a_cols[c][k] for c in range(nrows)] for k in range(nrows)],
            lp.exact_rhs(),
        )
        y = _exact_gauss_solve(a_cols, cost_basis)
    except ClickboundsError:
        return None
    soft_negative = _QQ(PRIMAL_NEG_TOL)
    for pos, j in enumerate(basis):
        if j >= nvars and x_basis[pos] != 0:
            return None  # artificial would carry real mass; basis unusable
        if x_basis[pos] < -soft_negative:
            return None
    if any(s < 0 for s in _integer_pricing(cost_arr, lp.constraint_matrix, y)):
        return None
    primal = np.zeros(nvars)
    for pos, j in enumerate(basis):
        if j < nvars:
            primal[j] = float(x_basis[pos])
    dual = np.array([float(v) for v in y])
    if lp.sense == MAXIMIZE:
        dual = -dual
    optimum = float(lp.objective @ primal)
    return LPSolution(
        optimum=optimum,
        primal=primal,
        dual=dual,
        status=OPTIMAL,
        duality_gap=abs(optimum - float(dual @ lp.rhs)),
        iterations=0,
        exact_arithmetic=True,
    )


_MAX_DUAL_POLISH = 500


def _exact_dual_polish(
    lp: LinearProgram, basis: list[int], signs: np.ndarray
) -> LPSolution | None:
    """Exact dual simplex from a dual-feasible, primal-infeasible basis.

    This is the common repair after a float solve: the float basis prices
    correctly but its exact basic values dip negative. Anti-cycling follows
    the dual Bland rule (lowest leaving variable index, lowest entering index
    among minimal ratios). Returns None when repair is impossible, leaving
    the verdict to the cold two-phase solve.
    """
    nrows, nvars = lp.constraint_matrix.shape
    cost_arr = lp.internal_cost()
    rhs_exact = lp.exact_rhs()
    basis = list(basis)
    for step in range(_MAX_DUAL_POLISH):
        a_cols, cost_basis = _exact_basis_columns(lp, basis, signs)
        try:
            x_basis = _exact_gauss_solve(
                [[a_cols[c][k] for c in range(nrows)] for k in range(nrows)],
                rhs_exact,
            )
        except ClickboundsError:
            return None
        negatives = [pos for pos, v in enumerate(x_basis) if v < 0]
        if not negatives:
            return _exact_solution_from_basis(lp, basis, signs)
        if step < 100:
            # most-negative rule converges fast; switch to the dual Bland
            # rule afterwards, which cannot cycle
            r = min(negatives, key=lambda pos: (x_basis[pos], basis[pos]))
        else:
            r = min(negatives, key=lambda pos: basis[pos])
        unit = [_F0] * nrows
        unit[r] = _QQ(1)
        try:
            # a_cols is B^T in row-major order, so these give u = B^-T e_r
            # (u . A_j is entry j of tableau row r) and the dual vector y
            u, y = _exact_gauss_multi(a_cols, [unit, cost_basis])
        except ClickboundsError:
            return None
        nonbasic = [j for j in range(nvars) if j not in basis]
        w = _exact_transpose_dot(lp.constraint_matrix, u, nonbasic)
        candidates = [(j, wj) for j, wj in zip(nonbasic, w) if wj < 0]
        if not candidates:
            return None  # dual unbounded: exactly infeasible; cold decides
        cand_cols = [j for j, _ in candidates]
        dots = _exact_transpose_dot(lp.constraint_matrix, y, cand_cols)
        entering = None
        best_ratio = None
        for (j, wj), ay in zip(candidates, dots):
            dj = _QQ(cost_arr[j]) - ay
            ratio = dj / (-wj)
            if best_ratio is None or ratio < best_ratio or (
                ratio == best_ratio and j < entering
            ):
                best_ratio = ratio
                entering = j
        basis[r] = entering
    return None


def _exact_warm(
    lp: LinearProgram, basis: list[int], signs: np.ndarray
) -> LPSolution | None:
    """Verify (and if needed polish) a float-found basis in exact arithmetic.

    Returns None when the basis is unusable, in which case the caller falls
    back to the cold two-phase exact solve. The common case, an already
    optimal float basis, costs two exact triangular solves and one exact
    pricing pass; no tableau is built.
    """
    nrows, nvars = lp.constraint_matrix.shape
    cost_arr = lp.internal_cost()
    rhs_exact = lp.exact_rhs()
    a_cols, cost_basis = _exact_basis_columns(lp, basis, signs)
    try:
        x_basis = _exact_gauss_solve(
            [[a_cols[c][k] for c in range(nrows)] for k in range(nrows)], rhs_exact
        )
        y = _exact_gauss_solve(a_cols, cost_basis)
    except ClickboundsError:
        return None
    soft_negative = _QQ(PRIMAL_NEG_TOL)
    for pos, j in enumerate(basis):
        if j >= nvars and x_basis[pos] != 0:
            return None  # artificial would carry real mass; basis unusable
    dual_feasible = all(
        s >= 0 for s in _integer_pricing(cost_arr, lp.constraint_matrix, y)
    )
    if dual_feasible:
        if all(v >= -soft_negative for v in x_basis):
            primal = np.zeros(nvars)
            for pos, j in enumerate(basis):
                if j < nvars:
                    primal[j] = float(x_basis[pos])
            dual = np.array([float(v) for v in y])
            if lp.sense == MAXIMIZE:
                dual = -dual
            optimum = float(lp.objective @ primal)
            return LPSolution(
                optimum=optimum,
                primal=primal,
                dual=dual,
                status=OPTIMAL,
                duality_gap=abs(optimum - float(dual @ lp.rhs)),
                iterations=0,
                exact_arithmetic=True,
            )
        return _exact_dual_polish(lp, basis, signs)
    # dual-infeasible basis: the cold two-phase solve settles it
    return None


def _exact_cold(lp: LinearProgram) -> LPSolution:
    """Full two-phase Bland tableau simplex in exact integer arithmetic.

    Constraint rows are scaled to integers (scales are powers of two for
    float-derived data), which weights the phase-1 objective per row; the
    feasibility verdict therefore re-derives the unscaled violations from the
    basic artificials. Sub-tolerance infeasibility (roundoff baked into a rhs
    that was computed in floats) is absorbed into the rhs before phase 2, so
    the certificate residual stays below the feasibility tolerance.
    """
    nrows, nvars = lp.constraint_matrix.shape
    cost_arr = lp.internal_cost()
    rhs_exact = lp.exact_rhs()
    ncols = nvars + nrows
    rows = []
    row_scales = []
    for k in range(nrows):
        sign = -1 if rhs_exact[k] < 0 else 1
        entries = [_QQ(v) for v in lp.constraint_matrix[k]] + [rhs_exact[k]]
        scale = _ZZ(1)
        for v in entries:
            scale = _lcm(scale, v.denominator)
        ints = [sign * v.numerator * (scale // v.denominator) for v in entries]
        rows.append(
            ints[:nvars] + [_ZZ(int(k == i)) for i in range(nrows)] + ints[-1:]
        )
        row_scales.append(scale)
    # integerized phase-2 costs; a positive global scale preserves all signs
    cost_scale = _ZZ(1)
    cost_q = [_QQ(v) for v in cost_arr]
    for v in cost_q:
        cost_scale = _lcm(cost_scale, v.denominator)
    z2 = [v.numerator * (cost_scale // v.denominator) for v in cost_q]
    z2 += [_ZZ(0)] * (nrows + 1)
    z1 = [_ZZ(0)] * (ncols + 1)
    for j in list(range(nvars)) + [ncols]:
        z1[j] = -sum(rows[r][j] for r in range(nrows))
    tab = _ExactTableau(rows, list(range(nvars, ncols)), list(range(nrows)),
                        [z1, z2], nvars)

    try:
        tab.run(z1)
    except _Unbounded:  # phase-1 objective is bounded below by zero
        raise ClickboundsError("exact phase 1 reported unbounded") from None
    # row scaling weights the phase-1 objective, so measure the true leftover
    # violation directly on the basic artificials
    violation = _F0
    for r in range(len(tab.rows)):
        if tab.basis[r] >= nvars:
            scale = row_scales[tab.basis[r] - nvars]
            violation += abs(tab.value(r, -1)) / scale
    if violation > _QQ(FEASIBILITY_TOL):
        return _status_solution(lp, INFEASIBLE, exact=True)
    # absorb sub-tolerance infeasibility still parked on basic artificials
    for r in range(len(tab.rows)):
        if tab.basis[r] >= nvars:
            tab.rows[r][-1] = _ZZ(0)
    # drive artificials out where possible, drop redundant rows otherwise
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] < nvars:
            r += 1
            continue
        j = max(range(nvars), key=lambda col: abs(tab.rows[r][col]))
        if tab.rows[r][j] != 0:
            tab.pivot(r, j)
            r += 1
        else:
            del tab.rows[r]
            del tab.basis[r]
            del tab.kept[r]
    tab.zrows = [z2]

    try:
        tab.run(z2)
    except _Unbounded:
        return _status_solution(lp, UNBOUNDED, exact=True)
    return _exact_finalize(lp, tab)


def dump_solution(path: str, lp: LinearProgram, sol: LPSolution) -> None:
    """Write a plain-text audit dump of an LP instance and its solution."""
    with open(path, "w") as fh:
        fh.write(f"sense: {lp.sense}\nstatus: {sol.status}\n")
        fh.write(f"optimum: {sol.optimum!r}\nduality_gap: {sol.duality_gap!r}\n")
        fh.write(f"iterations: {sol.iterations}\n")
        fh.write(f"exact_arithmetic: {sol.exact_arithmetic}\n")
        np.savetxt(fh, lp.constraint_matrix, header="constraint matrix")
        np.savetxt(fh, lp.rhs[None, :], header="rhs")
        np.savetxt(fh, lp.objective[None, :], header="objective")
        np.savetxt(fh, sol.primal[None, :], header="primal")
        np.savetxt(fh, sol.dual[None, :], header="dual")
