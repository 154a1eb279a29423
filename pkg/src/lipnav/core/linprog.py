"""Dense linear programs with dual certificates, solved exactly or in floats.

Exact mode runs a two-phase tableau simplex over Fractions with Bland's
rule. Float mode hands the program to HiGHS through scipy and re-checks
the returned primal/dual pair against the tolerances.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from lipnav.constants import FEAS_TOL, GAP_TOL
from lipnav.errors import NumericBreakdownError, StructuralError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
RETRY_EXACT = "; retry in exact mode"


class Sense(StrEnum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


class Relation(StrEnum):
    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class SolveMode(StrEnum):
    EXACT = "exact"
    FLOAT = "float"

    @classmethod
    def parse(cls, text: "str | SolveMode") -> "SolveMode":
        if isinstance(text, SolveMode):
            return text
        lowered = text.lower()
        if lowered in ("exact", "exact_rational", "rational"):
            return cls.EXACT
        return cls(lowered)


@dataclass(frozen=True)
class Tolerances:
    """Float-mode acceptance thresholds; exact mode uses zero."""

    feas_tol: float = FEAS_TOL
    gap_tol: float = GAP_TOL

    def margin(self, mode: SolveMode) -> Fraction:
        """Strictness margin for report comparisons under `mode`."""
        return ZERO if mode is SolveMode.EXACT else Fraction(self.feas_tol)

    def to_dict(self) -> dict[str, float]:
        return {"feas_tol": self.feas_tol, "gap_tol": self.gap_tol}


DEFAULT_TOLERANCES = Tolerances()


def at_most(a: Fraction, b: Fraction, margin: Fraction) -> bool:
    """a <= b, relaxed by `margin`."""
    return a - b <= margin


def strictly_greater(a: Fraction, b: Fraction, margin: Fraction) -> bool:
    """a > b, required to hold by more than `margin`."""
    return a - b > margin


@dataclass(frozen=True)
class LpRow:
    coefficients: tuple[tuple[int, Fraction], ...]
    relation: Relation
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    """Objective, rows tagged <=, = or >=, and per-variable bounds (None = infinite)."""

    sense: Sense
    objective: tuple[Fraction, ...]
    rows: tuple[LpRow, ...]
    lower: tuple[Fraction | None, ...]
    upper: tuple[Fraction | None, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.objective)
        if len(self.lower) != n or len(self.upper) != n:
            raise StructuralError("bound vectors must match the variable count")
        if self.names and len(self.names) != n:
            raise StructuralError("variable names must match the variable count")
        for j, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if lo is not None and hi is not None and lo > hi:
                raise StructuralError(f"variable {j} has lower bound above upper bound")
        for i, row in enumerate(self.rows):
            for j, _ in row.coefficients:
                if not 0 <= j < n:
                    raise StructuralError(f"row {i} references variable {j} of {n}")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def var_name(self, j: int) -> str:
        return self.names[j] if self.names else f"x{j}"

    def to_text(self) -> str:
        """Plain-text tabular dump for debugging."""
        objective = " + ".join(
            f"{format_scalar(c)}*{self.var_name(j)}"
            for j, c in enumerate(self.objective)
            if c
        )
        lines = [f"{self.sense} {objective or '0'}"]
        lines.append("subject to")
        for row in self.rows:
            lhs = " + ".join(
                f"{format_scalar(c)}*{self.var_name(j)}" for j, c in row.coefficients
            ) or "0"
            lines.append(f"  {lhs} {row.relation} {format_scalar(row.rhs)}")
        lines.append("bounds")
        for j in range(self.num_vars):
            lo, hi = self.lower[j], self.upper[j]
            lo_text = "-inf" if lo is None else format_scalar(lo)
            hi_text = "+inf" if hi is None else format_scalar(hi)
            lines.append(f"  {lo_text} <= {self.var_name(j)} <= {hi_text}")
        return "\n".join(lines)


class LpBuilder:
    """Incrementally assemble a LinearProgram."""

    def __init__(self, sense: Sense) -> None:
        self.sense = sense
        self._objective: list[Fraction] = []
        self._lower: list[Fraction | None] = []
        self._upper: list[Fraction | None] = []
        self._names: list[str] = []
        self._rows: list[LpRow] = []

    def add_variable(
        self,
        name: str,
        lower: Scalar | None = 0,
        upper: Scalar | None = None,
        cost: Scalar = 0,
    ) -> int:
        self._objective.append(as_fraction(cost))
        self._lower.append(None if lower is None else as_fraction(lower))
        self._upper.append(None if upper is None else as_fraction(upper))
        self._names.append(name)
        return len(self._objective) - 1

    def set_cost(self, var: int, cost: Scalar) -> None:
        self._objective[var] = as_fraction(cost)

    def add_row(self, coefficients: Mapping[int, Scalar], relation: Relation, rhs: Scalar) -> None:
        merged: dict[int, Fraction] = {}
        for j, c in coefficients.items():
            value = as_fraction(c)
            if value:
                merged[j] = merged.get(j, ZERO) + value
        self._rows.append(
            LpRow(
                coefficients=tuple(sorted((j, c) for j, c in merged.items() if c)),
                relation=relation,
                rhs=as_fraction(rhs),
            )
        )

    def build(self) -> LinearProgram:
        return LinearProgram(
            sense=self.sense,
            objective=tuple(self._objective),
            rows=tuple(self._rows),
            lower=tuple(self._lower),
            upper=tuple(self._upper),
            names=tuple(self._names),
        )


@dataclass(frozen=True)
class LpSolution:
    """Solver outcome.

    `dual` holds one multiplier per row in the program's own orientation,
    signed as the derivative of the optimum in the row's right-hand side.
    `farkas` (exact mode, infeasible only) is a row multiplier vector y with
    y.A >= 0 on the bound-shifted nonnegative variables and y.b' < 0.
    """

    status: LpStatus
    mode: SolveMode
    value: Fraction | None = None
    primal: tuple[Fraction, ...] = ()
    dual: tuple[Fraction, ...] = ()
    dual_value: Fraction | None = None
    farkas: tuple[Fraction, ...] = ()
    residual: float = 0.0
    gap: float = 0.0
    pivots: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def solve(
    lp: LinearProgram,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> LpSolution:
    """Solve `lp` and attach a dual certificate to optimal answers."""
    mode = SolveMode.parse(mode)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "solving %s LP: %d vars, %d rows (%s)",
            lp.sense, lp.num_vars, len(lp.rows), mode,
        )
        if lp.num_vars <= 12:
            logger.debug("program:\n%s", lp.to_text())
    if mode is SolveMode.EXACT:
        return _solve_exact(lp)
    return _solve_float(lp, tolerances)


def dual_objective(
    lp: LinearProgram, dual: Sequence[Fraction], zero_tol: Fraction = ZERO
) -> Fraction | None:
    """Lagrangian bound b.y plus the bound terms of the reduced costs.

    Returns None when `dual` certifies nothing: a multiplier has the wrong
    sign for its row (nonnegative on <= rows of a maximization, nonpositive
    on >= rows, flipped when minimizing), or a reduced cost pushes against
    an infinite bound.
    """
    maximize = lp.sense is Sense.MAXIMIZE
    reduced = list(lp.objective)
    total = ZERO
    for row, y in zip(lp.rows, dual):
        if row.relation is not Relation.EQ:
            upward = (row.relation is Relation.LE) == maximize
            if (y < -zero_tol) if upward else (y > zero_tol):
                return None
        total += row.rhs * y
        for j, c in row.coefficients:
            reduced[j] -= c * y
    for j, z in enumerate(reduced):
        if abs(z) <= zero_tol:
            continue
        bound = lp.upper[j] if (z > 0) == maximize else lp.lower[j]
        if bound is None:
            return None
        total += z * bound
    return total


def primal_residual(lp: LinearProgram, x: Sequence[Fraction]) -> Fraction:
    """Largest violation of any row or bound by `x`."""
    worst = ZERO
    for row in lp.rows:
        lhs = sum((c * x[j] for j, c in row.coefficients), ZERO)
        if row.relation is Relation.LE:
            worst = max(worst, lhs - row.rhs)
        elif row.relation is Relation.GE:
            worst = max(worst, row.rhs - lhs)
        else:
            worst = max(worst, abs(lhs - row.rhs))
    for j, value in enumerate(x):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None:
            worst = max(worst, lo - value)
        if hi is not None:
            worst = max(worst, value - hi)
    return worst


# ---------------------------------------------------------------------------
# Exact tableau simplex
# ---------------------------------------------------------------------------


@dataclass
class _Column:
    """How an internal nonnegative column maps back to an original variable."""

    var: int
    sign: int  # x_var = offset + sign * column


class _Tableau:
    """Sparse Fraction tableau for max c.x, rows = b, x >= 0, in canonical form."""

    def __init__(self, rows: list[dict[int, Fraction]], rhs: list[Fraction], basis: list[int]) -> None:
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.cols: dict[int, set[int]] = {}
        for i, row in enumerate(rows):
            for j in row:
                self.cols.setdefault(j, set()).add(i)
        self.reduced: dict[int, Fraction] = {}
        self.value = ZERO
        self.pivots = 0

    def set_objective(self, costs: Mapping[int, Fraction]) -> None:
        """Load costs and price out the current basis."""
        reduced = {j: c for j, c in costs.items() if c}
        value = ZERO
        for i, b in enumerate(self.basis):
            cb = costs.get(b, ZERO)
            if not cb:
                continue
            value += cb * self.rhs[i]
            for j, a in self.rows[i].items():
                reduced[j] = reduced.get(j, ZERO) - cb * a
        self.reduced = {j: c for j, c in reduced.items() if c}
        self.value = value

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        p = row[c]
        if p != 1:
            for j in row:
                row[j] /= p
            self.rhs[r] /= p
        for i in list(self.cols.get(c, ())):
            if i == r:
                continue
            target = self.rows[i]
            factor = target[c]
            for j, a in row.items():
                updated = target.get(j, ZERO) - factor * a
                if updated:
                    if j not in target:
                        self.cols.setdefault(j, set()).add(i)
                    target[j] = updated
                elif j in target:
                    del target[j]
                    self.cols[j].discard(i)
            self.rhs[i] -= factor * self.rhs[r]
        factor = self.reduced.get(c, ZERO)
        if factor:
            for j, a in row.items():
                updated = self.reduced.get(j, ZERO) - factor * a
                if updated:
                    self.reduced[j] = updated
                else:
                    self.reduced.pop(j, None)
            self.value += factor * self.rhs[r]
        self.basis[r] = c
        self.pivots += 1

    def run(self, barred: frozenset[int]) -> LpStatus:
        """Bland's rule until optimal or unbounded."""
        while True:
            entering = min(
                (j for j, rc in self.reduced.items() if rc > 0 and j not in barred),
                default=None,
            )
            if entering is None:
                return LpStatus.OPTIMAL
            leaving: int | None = None
            best: tuple[Fraction, int] | None = None
            for i in self.cols.get(entering, ()):
                a = self.rows[i][entering]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best:
                        best, leaving = key, i
            if leaving is None:
                return LpStatus.UNBOUNDED
            self.pivot(leaving, entering)


def _solve_exact(lp: LinearProgram) -> LpSolution:
    n = lp.num_vars
    flip = -1 if lp.sense is Sense.MINIMIZE else 1

    # Map each original variable onto nonnegative internal columns.
    columns: list[_Column] = []
    offset: list[Fraction] = []
    upper_rows: list[tuple[int, Fraction]] = []
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None:
            offset.append(lo)
            columns.append(_Column(j, 1))
            if hi is not None:
                upper_rows.append((len(columns) - 1, hi - lo))
        elif hi is not None:
            offset.append(hi)
            columns.append(_Column(j, -1))
        else:
            offset.append(ZERO)
            columns.append(_Column(j, 1))
            columns.append(_Column(j, -1))
    by_var: dict[int, list[int]] = {}
    for k, col in enumerate(columns):
        by_var.setdefault(col.var, []).append(k)

    costs: dict[int, Fraction] = {}
    for k, col in enumerate(columns):
        c = flip * lp.objective[col.var] * col.sign
        if c:
            costs[k] = c

    # Internal rows: original rows (shifted), then upper-bound rows.
    raw: list[tuple[dict[int, Fraction], Relation, Fraction]] = []
    for row in lp.rows:
        coeffs: dict[int, Fraction] = {}
        rhs = row.rhs
        for j, a in row.coefficients:
            rhs -= a * offset[j]
            for k in by_var[j]:
                coeffs[k] = a * columns[k].sign
        raw.append((coeffs, row.relation, rhs))
    for k, bound in upper_rows:
        raw.append(({k: Fraction(1)}, Relation.LE, bound))

    next_col = len(columns)
    rows: list[dict[int, Fraction]] = []
    rhs_list: list[Fraction] = []
    basis: list[int] = []
    init_col: list[int] = []
    row_sign: list[int] = []
    artificials: set[int] = set()
    for coeffs, relation, rhs in raw:
        sign = 1
        if rhs < 0:
            sign = -1
            coeffs = {k: -a for k, a in coeffs.items()}
            rhs = -rhs
            if relation is Relation.LE:
                relation = Relation.GE
            elif relation is Relation.GE:
                relation = Relation.LE
        row = dict(coeffs)
        if relation is Relation.LE:
            row[next_col] = Fraction(1)
            basis.append(next_col)
            init_col.append(next_col)
            next_col += 1
        else:
            if relation is Relation.GE:
                row[next_col] = Fraction(-1)
                next_col += 1
            row[next_col] = Fraction(1)
            basis.append(next_col)
            init_col.append(next_col)
            artificials.add(next_col)
            next_col += 1
        rows.append(row)
        rhs_list.append(rhs)
        row_sign.append(sign)

    tableau = _Tableau(rows, rhs_list, basis)
    m_orig = len(lp.rows)

    def row_duals(phase_costs: Mapping[int, Fraction]) -> list[Fraction]:
        # y_i = c_init - reduced_init, mapped back through the row flips
        return [
            row_sign[i] * (phase_costs.get(init_col[i], ZERO) - tableau.reduced.get(init_col[i], ZERO))
            for i in range(m_orig)
        ]

    if artificials:
        phase_one = {a: Fraction(-1) for a in artificials}
        tableau.set_objective(phase_one)
        tableau.run(frozenset())
        if tableau.value < 0:
            logger.debug("phase I ended at %s: infeasible", format_scalar(tableau.value))
            return LpSolution(
                status=LpStatus.INFEASIBLE,
                mode=SolveMode.EXACT,
                farkas=tuple(row_duals(phase_one)),
                pivots=tableau.pivots,
            )
        _drive_out_artificials(tableau, artificials)

    tableau.set_objective(costs)
    status = tableau.run(frozenset(artificials))
    if status is LpStatus.UNBOUNDED:
        return LpSolution(status=status, mode=SolveMode.EXACT, pivots=tableau.pivots)

    internal = [ZERO] * next_col
    for i, b in enumerate(tableau.basis):
        internal[b] = tableau.rhs[i]
    x = list(offset)
    for k, col in enumerate(columns):
        if internal[k]:
            x[col.var] += col.sign * internal[k]
    value = sum((c * xj for c, xj in zip(lp.objective, x)), ZERO)
    dual = [flip * y for y in row_duals({})]
    certified = dual_objective(lp, dual)
    if certified is None or certified != value:
        raise NumericBreakdownError(
            f"exact simplex certificate mismatch: primal {value}, dual {certified}"
        )
    logger.debug("optimal value %s after %d pivots", format_scalar(value), tableau.pivots)
    return LpSolution(
        status=LpStatus.OPTIMAL,
        mode=SolveMode.EXACT,
        value=value,
        primal=tuple(x),
        dual=tuple(dual),
        dual_value=certified,
        pivots=tableau.pivots,
    )


def _drive_out_artificials(tableau: _Tableau, artificials: set[int]) -> None:
    """Pivot zero-valued basic artificials out where a real column allows it."""
    for i, b in enumerate(tableau.basis):
        if b not in artificials:
            continue
        candidate = min((j for j in tableau.rows[i] if j not in artificials), default=None)
        if candidate is not None:
            tableau.pivot(i, candidate)


# ---------------------------------------------------------------------------
# Float mode
# ---------------------------------------------------------------------------


def _solve_float(lp: LinearProgram, tolerances: Tolerances) -> LpSolution:
    n = lp.num_vars
    s = -1.0 if lp.sense is Sense.MAXIMIZE else 1.0
    c = np.array([s * float(v) for v in lp.objective], dtype=np.float64)

    ub_rows = [(i, r) for i, r in enumerate(lp.rows) if r.relation is not Relation.EQ]
    eq_rows = [(i, r) for i, r in enumerate(lp.rows) if r.relation is Relation.EQ]
    A_ub = np.zeros((len(ub_rows), n))
    b_ub = np.zeros(len(ub_rows))
    for k, (_, row) in enumerate(ub_rows):
        sign = 1.0 if row.relation is Relation.LE else -1.0
        for j, a in row.coefficients:
            A_ub[k, j] = sign * float(a)
        b_ub[k] = sign * float(row.rhs)
    A_eq = np.zeros((len(eq_rows), n))
    b_eq = np.zeros(len(eq_rows))
    for k, (_, row) in enumerate(eq_rows):
        for j, a in row.coefficients:
            A_eq[k, j] = float(a)
        b_eq[k] = float(row.rhs)
    bounds = [
        (None if lo is None else float(lo), None if hi is None else float(hi))
        for lo, hi in zip(lp.lower, lp.upper)
    ]

    result = linprog(
        c,
        A_ub=A_ub if ub_rows else None,
        b_ub=b_ub if ub_rows else None,
        A_eq=A_eq if eq_rows else None,
        b_eq=b_eq if eq_rows else None,
        bounds=bounds,
        method="highs-ds",
    )
    if result.status == 2:
        return LpSolution(status=LpStatus.INFEASIBLE, mode=SolveMode.FLOAT)
    if result.status == 3:
        return LpSolution(status=LpStatus.UNBOUNDED, mode=SolveMode.FLOAT)
    if result.status != 0 or result.x is None:
        raise NumericBreakdownError(f"HiGHS stopped with status {result.status}: {result.message}{RETRY_EXACT}")

    dual = [ZERO] * len(lp.rows)
    if ub_rows:
        for k, (i, row) in enumerate(ub_rows):
            sign = 1.0 if row.relation is Relation.LE else -1.0
            dual[i] = Fraction(s * sign * float(result.ineqlin.marginals[k]))
    if eq_rows:
        for k, (i, _) in enumerate(eq_rows):
            dual[i] = Fraction(s * float(result.eqlin.marginals[k]))

    x = tuple(Fraction(float(v)) for v in result.x)
    value = sum((cj * xj for cj, xj in zip(lp.objective, x)), ZERO)
    residual = float(primal_residual(lp, x))
    certified = dual_objective(lp, dual, zero_tol=Fraction(tolerances.feas_tol))
    if certified is None:
        raise NumericBreakdownError(f"float dual multipliers do not certify the optimum{RETRY_EXACT}")
    gap = abs(float(value - certified))
    scale = max(1.0, abs(float(value)))
    if residual > tolerances.feas_tol * scale:
        raise NumericBreakdownError(f"primal residual {residual:.3e} exceeds feas_tol{RETRY_EXACT}")
    if gap > tolerances.gap_tol * scale:
        raise NumericBreakdownError(f"duality gap {gap:.3e} exceeds gap_tol{RETRY_EXACT}")
    return LpSolution(
        status=LpStatus.OPTIMAL,
        mode=SolveMode.FLOAT,
        value=value,
        primal=x,
        dual=tuple(dual),
        dual_value=certified,
        residual=residual,
        gap=gap,
    )
