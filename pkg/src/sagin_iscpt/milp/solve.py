"""LP relaxation and best-first branch-and-bound."""

from __future__ import annotations

import heapq
import itertools

import numpy as np
import highspy
from scipy import sparse

from .model import LpResult, MilpModel, MilpSolution, Status

FEAS_TOL = 1e-8
INT_TOL = 1e-6
DEFAULT_NODE_LIMIT = 10**6


class Infeasible(RuntimeError):
    pass


class Unbounded(RuntimeError):
    pass


def _row_bounds(model: MilpModel):
    lo = np.full(len(model.constraints), -np.inf)
    hi = np.full(len(model.constraints), np.inf)
    for i, c in enumerate(model.constraints):
        if c.relation in ("<=", "="):
            hi[i] = c.rhs
        if c.relation in (">=", "="):
            lo[i] = c.rhs
    return lo, hi


class _Relaxation:
    """One HiGHS LP instance reused across branch-and-bound nodes.

    Nodes differ only in column bounds; each solve may start from a stored
    simplex basis, which keeps re-solves to a handful of dual pivots.
    """

    def __init__(self, model: MilpModel):
        model.validate()
        self.sign = -1.0 if model.sense == "max" else 1.0
        self.lb, self.ub = model.bounds()
        self.binary = model.binary_mask
        n = model.num_vars
        rows, cols, vals = [], [], []
        for i, c in enumerate(model.constraints):
            for j, a in c.coeffs.items():
                rows.append(i), cols.append(j), vals.append(a)
        a = sparse.csc_matrix((vals, (rows, cols)), shape=(len(model.constraints), n))
        row_lo, row_hi = _row_bounds(model)

        lp = highspy.HighsLp()
        lp.num_col_ = n
        lp.num_row_ = len(model.constraints)
        lp.col_cost_ = self.sign * model.objective_vector()
        lp.col_lower_ = self.lb
        lp.col_upper_ = self.ub
        lp.row_lower_ = row_lo
        lp.row_upper_ = row_hi
        lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        lp.a_matrix_.start_ = a.indptr.astype(np.int32)
        lp.a_matrix_.index_ = a.indices.astype(np.int32)
        lp.a_matrix_.value_ = a.data.astype(float)

        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("presolve", "off")
        h.setOptionValue("solver", "simplex")
        h.setOptionValue("simplex_strategy", 1)  # dual simplex
        h.setOptionValue("threads", 1)
        h.setOptionValue("primal_feasibility_tolerance", 1e-9)
        h.setOptionValue("dual_feasibility_tolerance", 1e-9)
        h.passModel(lp)
        self.highs = h
        self.cur_lb, self.cur_ub = self.lb.copy(), self.ub.copy()
        self.last_basis = None

    def solve(self, lb: np.ndarray, ub: np.ndarray, basis=None) -> LpResult:
        if (lb > ub).any():
            return LpResult(Status.INFEASIBLE)
        h = self.highs
        diff = np.flatnonzero((lb != self.cur_lb) | (ub != self.cur_ub)).astype(np.int32)
        if len(diff):
            h.changeColsBounds(len(diff), diff, lb[diff], ub[diff])
            self.cur_lb, self.cur_ub = lb.copy(), ub.copy()
        # the solver still holds the factorization of the last solve, so a
        # child solved right after its parent needs no basis reload
        if basis is not None and basis is not self.last_basis:
            h.setBasis(basis)
        self.last_basis = None
        h.run()
        status = h.getModelStatus()
        if status == highspy.HighsModelStatus.kInfeasible:
            return LpResult(Status.INFEASIBLE)
        if status in (highspy.HighsModelStatus.kUnbounded,
                      highspy.HighsModelStatus.kUnboundedOrInfeasible):
            # resolve the ambiguity from a cold start
            h.clearSolver()
            h.run()
            status = h.getModelStatus()
            if status == highspy.HighsModelStatus.kInfeasible:
                return LpResult(Status.INFEASIBLE)
            if status != highspy.HighsModelStatus.kOptimal:
                return LpResult(Status.UNBOUNDED)
        elif status != highspy.HighsModelStatus.kOptimal:
            raise RuntimeError(f"LP solver failed: {h.modelStatusToString(status)}")
        x = np.clip(np.array(h.getSolution().col_value), lb, ub)
        obj = self.sign * h.getInfo().objective_function_value
        self.last_basis = h.getBasis()
        return LpResult(Status.OPTIMAL, x, obj, self.last_basis)


def solve_lp_relaxation(model: MilpModel) -> LpResult:
    """Continuous relaxation (binaries in [0, 1]) solved to optimality."""
    rel = _Relaxation(model)
    res = rel.solve(rel.lb, rel.ub)
    if res.status is Status.INFEASIBLE:
        raise Infeasible("LP relaxation infeasible")
    if res.status is Status.UNBOUNDED:
        raise Unbounded("LP relaxation unbounded")
    return res


def _most_fractional(x: np.ndarray, binary: np.ndarray, groups=()) -> int:
    frac = np.where(binary, np.abs(x - np.round(x)), 0.0)
    for idx in groups:
        if len(idx):
            f = frac[idx]
            j = int(np.argmax(f))
            if f[j] > INT_TOL:
                return int(idx[j])
    j = int(np.argmax(frac))  # first maximum: lowest index wins ties
    return j if frac[j] > INT_TOL else -1


def solve_bnb(model: MilpModel, node_limit: int = DEFAULT_NODE_LIMIT,
              objective_step: float = None, dive_every: int = 200,
              priority=()) -> MilpSolution:
    """Exact branch-and-bound over LP relaxations.

    Nodes are explored best-bound first (ties: deeper node, then creation
    order). Branching picks the most fractional binary, lowest index on ties.
    A rounding dive from the root, and again from every ``dive_every``-th
    expanded node (0 disables), supplies incumbents early; dives never cut
    the search, they only tighten pruning.

    ``objective_step`` declares that every integral-feasible objective is a
    multiple of that step, so nodes whose bound cannot reach the next
    multiple above the incumbent are pruned.

    ``priority`` is an optional sequence of index groups: the most fractional
    binary of the first group holding any fractional value is branched on
    before the remaining variables are considered.
    """
    if node_limit < 1:
        raise ValueError("node_limit must be >= 1")
    if model.sense != "max":
        raise ValueError("solve_bnb expects a maximization model")
    rel = _Relaxation(model)
    binary = rel.binary
    groups = [np.asarray(g, dtype=int) for g in priority]
    counter = itertools.count()
    nodes = 0
    best_x, best_obj = None, None
    heap = []

    def threshold():
        if best_obj is None:
            return -np.inf
        if objective_step:
            return best_obj + objective_step - 1e-6
        return best_obj + 1e-9

    def lp(lb, ub, basis):
        nonlocal nodes
        nodes += 1
        return rel.solve(lb, ub, basis)

    def integral(res, lb, ub):
        # pin binaries and re-solve so the continuous part is exactly feasible
        nonlocal best_x, best_obj
        flb, fub = lb.copy(), ub.copy()
        rounded = np.round(res.values[binary])
        flb[binary] = rounded
        fub[binary] = rounded
        fixed = lp(flb, fub, res.basis)
        if fixed.status is Status.OPTIMAL and (best_obj is None or fixed.objective > best_obj + 1e-9):
            best_x, best_obj = fixed.values, fixed.objective

    def push(res, lb, ub, depth):
        if res.status is not Status.OPTIMAL or res.objective < threshold():
            return
        if _most_fractional(res.values, binary, groups) < 0:
            integral(res, lb, ub)
        else:
            heapq.heappush(heap, (-res.objective, -depth, next(counter), lb, ub, res))

    def dive(res, lb, ub):
        lb, ub = lb.copy(), ub.copy()
        while nodes < node_limit and res.objective >= threshold():
            j = _most_fractional(res.values, binary, groups)
            if j < 0:
                integral(res, lb, ub)
                return
            first = 1.0 if res.values[j] >= 0.5 else 0.0
            for val in (first, 1.0 - first):
                clb, cub = lb.copy(), ub.copy()
                clb[j] = cub[j] = val
                child = lp(clb, cub, res.basis)
                if child.status is Status.OPTIMAL:
                    break
            else:
                return
            res, lb, ub = child, clb, cub

    root = lp(rel.lb, rel.ub, None)
    if root.status is Status.UNBOUNDED:
        raise Unbounded("LP relaxation unbounded")
    if root.status is Status.INFEASIBLE:
        return MilpSolution(Status.INFEASIBLE, nodes=nodes)
    push(root, rel.lb, rel.ub, 0)
    if heap and dive_every:
        dive(root, rel.lb, rel.ub)

    expanded = 0
    while heap:
        neg_bound, neg_depth, _, lb, ub, res = heap[0]
        if -neg_bound < threshold():
            heapq.heappop(heap)
            continue
        if nodes >= node_limit:
            break
        heapq.heappop(heap)
        expanded += 1
        if dive_every and expanded % dive_every == 0:
            dive(res, lb, ub)
        j = _most_fractional(res.values, binary, groups)
        for val in (1.0, 0.0):
            clb, cub = lb.copy(), ub.copy()
            clb[j] = cub[j] = val
            push(lp(clb, cub, res.basis), clb, cub, 1 - neg_depth)

    if heap:
        bound = -heap[0][0]
        return MilpSolution(Status.NODE_LIMIT, best_x, best_obj, nodes, bound)
    if best_x is None:
        return MilpSolution(Status.INFEASIBLE, nodes=nodes)
    return MilpSolution(Status.OPTIMAL, best_x, best_obj, nodes, best_obj)
