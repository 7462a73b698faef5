from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import sparse

BINARY = "binary"
CONTINUOUS = "continuous"
RELATIONS = ("<=", ">=", "=")


class ModelError(ValueError):
    pass


@dataclass
class Variable:
    name: str
    kind: str = CONTINUOUS
    lower: float = 0.0
    upper: float = 1.0


@dataclass
class Constraint:
    name: str
    coeffs: dict  # variable index -> coefficient
    relation: str
    rhs: float


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    NODE_LIMIT = "NodeLimit"


@dataclass
class MilpModel:
    """Linear model over binary and continuous variables (maximization)."""

    name: str = "model"
    variables: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    constraints: list = field(default_factory=list)
    sense: str = "max"
    _index: dict = field(default_factory=dict, repr=False)

    def add_variable(self, name: str, kind: str = CONTINUOUS,
                     lower: float = 0.0, upper: float = 1.0) -> int:
        if name in self._index:
            raise ModelError(f"duplicate variable {name!r}")
        if kind == BINARY:
            lower, upper = max(lower, 0.0), min(upper, 1.0)
        self.variables.append(Variable(name, kind, float(lower), float(upper)))
        self._index[name] = len(self.variables) - 1
        return len(self.variables) - 1

    def index(self, name: str) -> int:
        return self._index[name]

    def add_constraint(self, name: str, coeffs: dict, relation: str, rhs: float) -> None:
        clean = {int(j): float(c) for j, c in coeffs.items() if c != 0.0}
        self.constraints.append(Constraint(name, clean, relation, float(rhs)))

    def set_objective(self, coeffs: dict, sense: str = "max") -> None:
        self.objective = {int(j): float(c) for j, c in coeffs.items() if c != 0.0}
        self.sense = sense

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def binary_mask(self) -> np.ndarray:
        return np.array([v.kind == BINARY for v in self.variables], dtype=bool)

    def validate(self) -> None:
        n = self.num_vars
        for v in self.variables:
            if v.kind not in (BINARY, CONTINUOUS):
                raise ModelError(f"{v.name}: unknown kind {v.kind!r}")
            if not v.lower <= v.upper:
                raise ModelError(f"{v.name}: lower > upper")
        if self.sense not in ("max", "min"):
            raise ModelError(f"bad sense {self.sense!r}")
        for c in self.constraints:
            if c.relation not in RELATIONS:
                raise ModelError(f"{c.name}: bad relation {c.relation!r}")
            if any(j < 0 or j >= n for j in c.coeffs):
                raise ModelError(f"{c.name}: references undeclared variable")
        if any(j < 0 or j >= n for j in self.objective):
            raise ModelError("objective references undeclared variable")

    def bounds(self) -> tuple:
        lb = np.array([v.lower for v in self.variables], dtype=float)
        ub = np.array([v.upper for v in self.variables], dtype=float)
        return lb, ub

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self.num_vars)
        for j, a in self.objective.items():
            c[j] = a
        return c

    def matrix_form(self):
        """(A_ub, b_ub, A_eq, b_eq) as CSR with every inequality written as <=."""
        ub_rows, ub_cols, ub_vals, b_ub = [], [], [], []
        eq_rows, eq_cols, eq_vals, b_eq = [], [], [], []
        for c in self.constraints:
            if c.relation == "=":
                r = len(b_eq)
                for j, a in c.coeffs.items():
                    eq_rows.append(r), eq_cols.append(j), eq_vals.append(a)
                b_eq.append(c.rhs)
            else:
                sign = 1.0 if c.relation == "<=" else -1.0
                r = len(b_ub)
                for j, a in c.coeffs.items():
                    ub_rows.append(r), ub_cols.append(j), ub_vals.append(sign * a)
                b_ub.append(sign * c.rhs)
        n = self.num_vars
        a_ub = sparse.csr_matrix((ub_vals, (ub_rows, ub_cols)), shape=(len(b_ub), n))
        a_eq = sparse.csr_matrix((eq_vals, (eq_rows, eq_cols)), shape=(len(b_eq), n))
        return a_ub, np.array(b_ub, dtype=float), a_eq, np.array(b_eq, dtype=float)

    def evaluate(self, x) -> float:
        return float(sum(a * x[j] for j, a in self.objective.items()))

    def max_violation(self, x) -> float:
        """Largest constraint or bound violation of the point ``x``."""
        worst = 0.0
        for c in self.constraints:
            lhs = sum(a * x[j] for j, a in c.coeffs.items())
            if c.relation == "<=":
                worst = max(worst, lhs - c.rhs)
            elif c.relation == ">=":
                worst = max(worst, c.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - c.rhs))
        lb, ub = self.bounds()
        x = np.asarray(x, dtype=float)
        worst = max(worst, float(np.max(lb - x, initial=0.0)), float(np.max(x - ub, initial=0.0)))
        return worst

    def dump(self) -> str:
        """Human-readable listing, one item per line."""
        out = [f"{self.sense.upper()} {self.name}"]
        names = [v.name for v in self.variables]

        def expr(coeffs):
            return " ".join(f"{a:+.12g} {names[j]}" for j, a in sorted(coeffs.items())) or "0"

        out.append(f"  obj: {expr(self.objective)}")
        out.append("SUBJECT TO")
        for c in self.constraints:
            out.append(f"  {c.name}: {expr(c.coeffs)} {c.relation} {c.rhs:.12g}")
        out.append("BOUNDS")
        for v in self.variables:
            tag = " bin" if v.kind == BINARY else ""
            out.append(f"  {v.lower:.12g} <= {v.name} <= {v.upper:.12g}{tag}")
        return "\n".join(out) + "\n"


@dataclass
class LpResult:
    status: Status
    values: np.ndarray = None
    objective: float = None
    basis: object = None  # solver warm-start handle


@dataclass
class MilpSolution:
    status: Status
    values: np.ndarray = None
    objective_value: float = None
    nodes: int = 0
    best_bound: float = None

    def value(self, model: MilpModel, name: str) -> float:
        return float(self.values[model.index(name)])
