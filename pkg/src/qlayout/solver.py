"""Exact-optimization seam: declarative models over two 0/1 backends.

The rest of the package describes models declaratively: bounded integer
variables, booleans, logical connectives over (in)equality atoms, linear
sum constraints, and one optional linear objective. This module lowers
that description to linear rows over pure 0/1 columns:

  * every bounded int becomes a one-hot group of binary columns tied by an
    exactly-one row, so "x == v" is a single column and clauses stay linear;
  * connectives are normalized to negation normal form and emitted as
    clause rows, introducing auxiliary binaries only for non-literal
    disjuncts (one-directional Tseitin, sound in positive position);
  * var-to-var comparisons expand over the one-hot value sums.

Two interchangeable engines consume the lowered rows: a conflict-driven
search core (strong on tight feasibility questions, proves optima by
tightening the incumbent until unsatisfiable) and scipy's MILP interface
(HiGHS) run with a zero MIP gap. Either way reported optima are exact,
which the synthesis layers rely on; every satisfying assignment is
replayed against the declarative model before it is returned. A backend
anomaly raises SolverBackendError and is never reported "unsatisfiable".
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, milp

from . import _cdcl

SAT = "satisfiable"
UNSAT = "unsatisfiable"
TIMEOUT = "timeout"


class ModelError(ValueError):
    """Malformed model construction (bad handle, empty domain, ...)."""


class SolverBackendError(RuntimeError):
    """The backend failed in a way distinct from unsatisfiability."""


# ---------------------------------------------------------------------------
# Formula language


@dataclass(frozen=True)
class Eq:
    var: int
    value: int


@dataclass(frozen=True)
class Ne:
    var: int
    value: int


@dataclass(frozen=True)
class EqVar:
    a: int
    b: int


@dataclass(frozen=True)
class NeVar:
    a: int
    b: int


@dataclass(frozen=True)
class Lt:
    a: int
    b: int


@dataclass(frozen=True)
class Le:
    a: int
    b: int


@dataclass(frozen=True)
class And:
    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Not:
    part: object


@dataclass(frozen=True)
class Implies:
    lhs: object
    rhs: object


@dataclass
class _Var:
    handle: int
    lo: int
    hi: int
    is_bool: bool
    name: str
    first_col: int = -1  # assigned at compile time

    @property
    def domain(self):
        return range(self.lo, self.hi + 1)


@dataclass
class Verdict:
    status: str
    assignment: dict | None = None
    objective_value: int | None = None


class Model:
    """Declarative model: variables, assertions, sums, one objective."""

    def __init__(self) -> None:
        self._vars: list[_Var] = []
        self._assertions: list = []
        self._sums: list[tuple[list, str, int]] = []
        self._objective: tuple[str, list] | None = None

    # -- variable registration ------------------------------------------------

    def int_var(self, lo: int, hi: int, name: str = "") -> int:
        if hi < lo:
            raise ModelError(f"empty domain [{lo}, {hi}] for {name or 'int var'}")
        v = _Var(len(self._vars), int(lo), int(hi), False, name or f"x{len(self._vars)}")
        self._vars.append(v)
        return v.handle

    def bool_var(self, name: str = "") -> int:
        v = _Var(len(self._vars), 0, 1, True, name or f"b{len(self._vars)}")
        self._vars.append(v)
        return v.handle

    @property
    def num_variables(self) -> int:
        return len(self._vars)

    def _var(self, handle) -> _Var:
        if not isinstance(handle, int) or not (0 <= handle < len(self._vars)):
            raise ModelError(f"unknown variable handle {handle!r}")
        return self._vars[handle]

    # -- constraint registration ----------------------------------------------

    def require(self, formula) -> None:
        self._validate(formula)
        self._assertions.append(formula)

    def require_sum(self, terms, op: str, rhs: int) -> None:
        """Linear constraint over terms: (coef, handle) or (coef, (handle, value))."""
        if op not in ("<=", ">=", "=="):
            raise ModelError(f"bad sum op {op!r}")
        for _, t in terms:
            self._term_var(t)
        self._sums.append((list(terms), op, int(rhs)))

    def minimize(self, terms) -> None:
        self._set_objective("min", terms)

    def maximize(self, terms) -> None:
        self._set_objective("max", terms)

    def _set_objective(self, sense, terms) -> None:
        for _, t in terms:
            self._term_var(t)
        self._objective = (sense, list(terms))

    def _term_var(self, term) -> _Var:
        if isinstance(term, tuple):
            var = self._var(term[0])
            if not (var.lo <= term[1] <= var.hi):
                raise ModelError(f"indicator value {term[1]} outside domain of {var.name}")
            return var
        return self._var(term)

    def _validate(self, f) -> None:
        if isinstance(f, (Eq, Ne)):
            self._var(f.var)
        elif isinstance(f, (EqVar, NeVar, Lt, Le)):
            self._var(f.a)
            self._var(f.b)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                self._validate(p)
        elif isinstance(f, Not):
            self._validate(f.part)
        elif isinstance(f, Implies):
            self._validate(f.lhs)
            self._validate(f.rhs)
        else:
            raise ModelError(f"not a formula: {f!r}")

    # -- independent evaluation (used by tests and Verdict round-trips) --------

    def evaluate(self, f, assignment: dict) -> bool:
        if isinstance(f, Eq):
            return assignment[f.var] == f.value
        if isinstance(f, Ne):
            return assignment[f.var] != f.value
        if isinstance(f, EqVar):
            return assignment[f.a] == assignment[f.b]
        if isinstance(f, NeVar):
            return assignment[f.a] != assignment[f.b]
        if isinstance(f, Lt):
            return assignment[f.a] < assignment[f.b]
        if isinstance(f, Le):
            return assignment[f.a] <= assignment[f.b]
        if isinstance(f, And):
            return all(self.evaluate(p, assignment) for p in f.parts)
        if isinstance(f, Or):
            return any(self.evaluate(p, assignment) for p in f.parts)
        if isinstance(f, Not):
            return not self.evaluate(f.part, assignment)
        if isinstance(f, Implies):
            return (not self.evaluate(f.lhs, assignment)) or self.evaluate(f.rhs, assignment)
        raise ModelError(f"not a formula: {f!r}")

    def _sum_value(self, terms, assignment) -> int:
        total = 0
        for coef, t in terms:
            if isinstance(t, tuple):
                total += coef * (1 if assignment[t[0]] == t[1] else 0)
            else:
                total += coef * assignment[t]
        return total

    def check_assignment(self, assignment: dict) -> list[str]:
        """Replay every assertion on concrete values; returns violations."""
        bad = []
        for i, f in enumerate(self._assertions):
            if not self.evaluate(f, assignment):
                bad.append(f"assertion {i}: {f!r}")
        for i, (terms, op, rhs) in enumerate(self._sums):
            total = self._sum_value(terms, assignment)
            ok = (total <= rhs) if op == "<=" else (total >= rhs) if op == ">=" else (total == rhs)
            if not ok:
                bad.append(f"sum {i}: value {total} not {op} {rhs}")
        return bad

    def objective_of(self, assignment: dict) -> int | None:
        if self._objective is None:
            return None
        return self._sum_value(self._objective[1], assignment)

    # -- compilation to 0/1 MILP ------------------------------------------------

    def _compile(self):
        if getattr(self, "_compiled", None) is not None:
            return self._compiled
        ncols = 0
        for v in self._vars:
            v.first_col = ncols
            ncols += 1 if v.is_bool else (v.hi - v.lo + 1)
        rows_data: list[tuple[dict, float, float]] = []
        self._aux_names: list[str] = []
        self._hard_false = False

        def col_of(var: _Var, value: int) -> int | None:
            if var.is_bool:
                if value not in (0, 1):
                    return None
                return var.first_col  # polarity handled by caller
            if not (var.lo <= value <= var.hi):
                return None
            return var.first_col + (value - var.lo)

        def add_clause(lits):
            # lits: list of (col, positive) | True | False
            coeffs: dict[int, float] = {}
            lb = 1.0
            for lit in lits:
                if lit is True:
                    return
                if lit is False:
                    continue
                col, pos = lit
                if pos:
                    coeffs[col] = coeffs.get(col, 0.0) + 1.0
                else:
                    coeffs[col] = coeffs.get(col, 0.0) - 1.0
                    lb -= 1.0
            if not coeffs:
                self._hard_false = True
                return
            rows_data.append((coeffs, lb, math.inf))

        def lit_eq(var: _Var, value: int, positive: bool):
            if var.is_bool:
                if value == 1:
                    return (var.first_col, positive)
                if value == 0:
                    return (var.first_col, not positive)
                return (not positive)  # Eq(b, 7) is constant False
            c = col_of(var, value)
            if c is None:
                return (not positive)
            return (c, positive)

        def atom_literal(f):
            """Literal form of an atom, or None when not literal-representable."""
            if isinstance(f, Eq):
                return lit_eq(self._var(f.var), f.value, True)
            if isinstance(f, Ne):
                return lit_eq(self._var(f.var), f.value, False)
            if isinstance(f, Not):
                inner = atom_literal(f.part)
                if inner is None:
                    return None
                if inner is True:
                    return False
                if inner is False:
                    return True
                return (inner[0], not inner[1])
            return None

        def negate(lits):
            out = []
            for col, pos in lits:
                out.append((col, not pos))
            return out

        def int_sum_coeffs(var: _Var, sign: float, coeffs: dict):
            if var.is_bool:
                coeffs[var.first_col] = coeffs.get(var.first_col, 0.0) + sign
                return 0.0
            base = 0.0
            for v in var.domain:
                c = var.first_col + (v - var.lo)
                coeffs[c] = coeffs.get(c, 0.0) + sign * v
            return base

        def add_ordering(a: _Var, b: _Var, margin: int, guard):
            # (guard) => sum(a) + margin <= sum(b), big-M relaxed per guard literal
            coeffs: dict[int, float] = {}
            int_sum_coeffs(a, 1.0, coeffs)
            int_sum_coeffs(b, -1.0, coeffs)
            bigm = float(a.hi - b.lo + margin)
            ub = float(-margin)
            if bigm > 0:
                for col, pos in guard:
                    # unsatisfied guard literal contributes bigm of slack
                    if pos:
                        coeffs[col] = coeffs.get(col, 0.0) + bigm
                        ub += bigm
                    else:
                        coeffs[col] = coeffs.get(col, 0.0) - bigm
            rows_data.append((coeffs, -math.inf, ub))

        def guard_conjuncts(f):
            """f as a list of literals when it is a literal/conjunction, else None."""
            if isinstance(f, And):
                lits = []
                for p in f.parts:
                    sub = guard_conjuncts(p)
                    if sub is None:
                        return None
                    lits.extend(sub)
                return lits
            lit = atom_literal(f)
            if lit is None:
                return None
            if lit is True:
                return []
            if lit is False:
                return [False]
            return [lit]

        def nnf(f, neg: bool):
            if isinstance(f, Not):
                return nnf(f.part, not neg)
            if isinstance(f, Implies):
                return nnf(Or(Not(f.lhs), f.rhs), neg)
            if isinstance(f, And):
                parts = tuple(nnf(p, neg) for p in f.parts)
                return Or(*parts) if neg else And(*parts)
            if isinstance(f, Or):
                parts = tuple(nnf(p, neg) for p in f.parts)
                return And(*parts) if neg else Or(*parts)
            if not neg:
                return f
            if isinstance(f, Eq):
                return Ne(f.var, f.value)
            if isinstance(f, Ne):
                return Eq(f.var, f.value)
            if isinstance(f, EqVar):
                return NeVar(f.a, f.b)
            if isinstance(f, NeVar):
                return EqVar(f.a, f.b)
            if isinstance(f, Lt):
                return Le(f.b, f.a)
            if isinstance(f, Le):
                return Lt(f.b, f.a)
            raise ModelError(f"not a formula: {f!r}")

        def new_aux(tag: str) -> int:
            nonlocal ncols
            col = ncols
            ncols += 1
            self._aux_names.append(tag)
            return col

        def encode(f, guard):
            # guard: literal list; the formula must hold whenever all hold.
            if isinstance(f, And):
                for p in f.parts:
                    encode(p, guard)
                return
            if isinstance(f, Implies):
                lits = guard_conjuncts(f.lhs)
                if lits is not None:
                    if any(l is False for l in lits):
                        return  # premise unsatisfiable
                    encode(f.rhs, guard + [l for l in lits if l is not True])
                    return
                encode(nnf(f, False), guard)
                return
            if isinstance(f, Not):
                encode(nnf(f, False), guard)
                return
            if isinstance(f, EqVar):
                a, b = self._var(f.a), self._var(f.b)
                neg_guard = negate(guard)
                for v in a.domain:
                    la = lit_eq(a, v, True)
                    lb = lit_eq(b, v, True)
                    if lb is False:
                        add_clause(neg_guard + [_flip(la)])
                    else:
                        add_clause(neg_guard + [_flip(la), lb])
                for v in b.domain:
                    if not (a.lo <= v <= a.hi):
                        add_clause(neg_guard + [_flip(lit_eq(b, v, True))])
                return
            if isinstance(f, NeVar):
                a, b = self._var(f.a), self._var(f.b)
                neg_guard = negate(guard)
                for v in a.domain:
                    if b.lo <= v <= b.hi:
                        add_clause(neg_guard + [_flip(lit_eq(a, v, True)), _flip(lit_eq(b, v, True))])
                return
            if isinstance(f, Lt):
                add_ordering(self._var(f.a), self._var(f.b), 1, guard)
                return
            if isinstance(f, Le):
                add_ordering(self._var(f.a), self._var(f.b), 0, guard)
                return
            if isinstance(f, Or):
                parts = []
                stack = list(f.parts)
                while stack:  # flatten nested disjunctions
                    p = stack.pop(0)
                    if isinstance(p, Or):
                        stack = list(p.parts) + stack
                    else:
                        parts.append(p)
                clause = negate(guard)
                satisfied = False
                for p in parts:
                    lit = atom_literal(p)
                    if lit is True:
                        satisfied = True
                        break
                    if lit is False:
                        continue
                    if lit is not None:
                        clause.append(lit)
                        continue
                    z = new_aux("or")
                    clause.append((z, True))
                    encode(p, [(z, True)])
                if not satisfied:
                    add_clause(clause)
                return
            lit = atom_literal(f)
            if lit is None:
                raise ModelError(f"not a formula: {f!r}")
            add_clause(negate(guard) + [lit])

        def _flip(lit):
            if lit is True:
                return False
            if lit is False:
                return True
            return (lit[0], not lit[1])

        # exactly-one rows for every int variable's one-hot group
        for v in self._vars:
            if not v.is_bool:
                coeffs = {v.first_col + i: 1.0 for i in range(v.hi - v.lo + 1)}
                rows_data.append((coeffs, 1.0, 1.0))

        for f in self._assertions:
            encode(f, [])

        for terms, op, rhs in self._sums:
            coeffs: dict[int, float] = {}
            for coef, t in terms:
                if isinstance(t, tuple):
                    var = self._var(t[0])
                    c = col_of(var, t[1])
                    coeffs[c] = coeffs.get(c, 0.0) + coef
                else:
                    int_sum_coeffs(self._var(t), float(coef), coeffs)
            lb = float(rhs) if op in (">=", "==") else -math.inf
            ub = float(rhs) if op in ("<=", "==") else math.inf
            rows_data.append((coeffs, lb, ub))

        c = np.zeros(ncols)
        sense = 1.0
        if self._objective is not None:
            sense = 1.0 if self._objective[0] == "min" else -1.0
            for coef, t in self._objective[1]:
                if isinstance(t, tuple):
                    var = self._var(t[0])
                    c[col_of(var, t[1])] += sense * coef
                else:
                    var = self._var(t)
                    if var.is_bool:
                        c[var.first_col] += sense * coef
                    else:
                        for v in var.domain:
                            c[var.first_col + (v - var.lo)] += sense * coef * v

        self._compiled = (ncols, rows_data, c, sense)
        return self._compiled

    def dump_text(self) -> str:
        """Model in LP text form (trace/debug aid)."""
        ncols, rows_data, c, sense = self._compile()
        names = []
        for v in self._vars:
            if v.is_bool:
                names.append(v.name)
            else:
                names.extend(f"{v.name}.{val}" for val in v.domain)
        names.extend(f"aux{i}" for i in range(len(self._aux_names)))

        def linexp(coeffs):
            bits = []
            for col in sorted(coeffs):
                coef = coeffs[col]
                if coef == 0:
                    continue
                sign = "+" if coef > 0 else "-"
                bits.append(f"{sign} {abs(coef):g} {names[col]}")
            return " ".join(bits) if bits else "0"

        lines = ["Minimize" if sense > 0 else "Maximize", " obj: " + linexp(
            {i: sense * c[i] for i in range(ncols) if c[i]})]
        lines.append("Subject To")
        for i, (coeffs, lb, ub) in enumerate(rows_data):
            if lb == ub:
                lines.append(f" r{i}: {linexp(coeffs)} = {lb:g}")
            else:
                if lb != -math.inf:
                    lines.append(f" r{i}lo: {linexp(coeffs)} >= {lb:g}")
                if ub != math.inf:
                    lines.append(f" r{i}hi: {linexp(coeffs)} <= {ub:g}")
        lines.append("Binaries")
        lines.append(" " + " ".join(names))
        lines.append("End")
        return "\n".join(lines) + "\n"


def build(model: Model) -> Model:
    """Force deterministic compilation; returns the same model, compiled."""
    model._compile()
    return model


def solve(model: Model, timeout: float | None = None,
          method: str = "auto") -> Verdict:
    """Solve to proven optimality; never best-effort.

    method "sat" runs the conflict-driven core (strong on feasibility
    boundaries and unsatisfiability proofs), "milp" the HiGHS branch and
    bound, "auto" the former with the latter as fallback for models it
    cannot express. Both return identical verdict semantics.
    """
    if method not in ("auto", "sat", "milp"):
        raise ModelError(f"unknown solve method {method!r}")
    ncols, rows_data, c, sense = model._compile()
    if model._hard_false:
        return Verdict(status=UNSAT)
    if ncols == 0:
        # no columns, but constant rows may still contradict (empty sums)
        assignment: dict = {}
        if model.check_assignment(assignment):
            return Verdict(status=UNSAT)
        obj = model.objective_of(assignment)
        return Verdict(status=SAT, assignment=assignment, objective_value=obj)
    if method in ("auto", "sat"):
        try:
            return _solve_sat(model, ncols, rows_data, c, timeout)
        except _cdcl.CdclUnsupported:
            if method == "sat":
                raise SolverBackendError("model not expressible for sat core")
    return _solve_milp(model, ncols, rows_data, c, timeout)


def _extract(model: Model, x) -> Verdict:
    """Read a 0/1 column vector back into model variables and replay it."""
    assignment = {}
    for v in model._vars:
        if v.is_bool:
            assignment[v.handle] = int(x[v.first_col] > 0.5)
        else:
            hits = [val for val in v.domain if x[v.first_col + (val - v.lo)] > 0.5]
            if len(hits) != 1:
                raise SolverBackendError(f"one-hot group of {v.name} returned {hits}")
            assignment[v.handle] = hits[0]
    bad = model.check_assignment(assignment)
    if bad:
        raise SolverBackendError(f"assignment fails replay: {bad[:3]}")
    obj = model.objective_of(assignment)
    return Verdict(status=SAT, assignment=assignment, objective_value=obj)


def _solve_sat(model: Model, ncols, rows_data, c, timeout) -> Verdict:
    deadline = time.monotonic() + timeout if timeout is not None else None
    searcher = _cdcl.Searcher(ncols)
    for coeffs, lb, ub in rows_data:
        searcher.add_linear(coeffs, lb, ub)
    objective = []
    for col in range(ncols):
        if c[col]:
            coef = round(float(c[col]))
            if abs(c[col] - coef) > 1e-9:
                raise _cdcl.CdclUnsupported(f"non-integral objective {c[col]!r}")
            objective.append((col, int(coef)))
    # decide objective columns first, preferring the cost-lowering phase;
    # the epsilon ladder keeps their relative order deterministic
    for rank, (col, coef) in enumerate(objective):
        searcher.boost(col, amount=1.0 + (len(objective) - rank) * 1e-3,
                       phase=1 if coef < 0 else 0)

    status = searcher.search(deadline)
    if status == "unsat":
        return Verdict(status=UNSAT)
    if status == "timeout":
        return Verdict(status=TIMEOUT)
    best = searcher.model()
    # tighten the incumbent until the strengthened model is unsatisfiable
    while objective:
        value = sum(coef * int(best[col]) for col, coef in objective)
        searcher.add_linear({col: float(coef) for col, coef in objective},
                            -math.inf, value - 1)
        status = searcher.search(deadline)
        if status == "timeout":
            return Verdict(status=TIMEOUT)
        if status == "unsat":
            break
        best = searcher.model()
    return _extract(model, best)


def _solve_milp(model: Model, ncols, rows_data, c, timeout) -> Verdict:
    if rows_data:
        data, rows, cols = [], [], []
        lbs, ubs = [], []
        for i, (coeffs, lb, ub) in enumerate(rows_data):
            for col, coef in coeffs.items():
                rows.append(i)
                cols.append(col)
                data.append(coef)
            lbs.append(lb)
            ubs.append(ub)
        a = sparse.csc_array(
            (data, (rows, cols)), shape=(len(rows_data), ncols))
        constraints = [LinearConstraint(a, np.array(lbs), np.array(ubs))]
    else:
        constraints = []

    options = {"mip_rel_gap": 0.0}
    if timeout is not None:
        options["time_limit"] = float(timeout)
    res = milp(
        c,
        constraints=constraints,
        integrality=np.ones(ncols),
        bounds=(0, 1),
        options=options,
    )
    if res.status == 2:
        return Verdict(status=UNSAT)
    if res.status == 1:
        return Verdict(status=TIMEOUT)
    if res.status != 0 or res.x is None:
        raise SolverBackendError(f"backend anomaly: status={res.status} {res.message}")
    return _extract(model, res.x)
