"""Exact optimal solvers for small instances.

These are the ground truth for approximation-ratio and DP-equivalence
testing.  Not built to scale: the unsplittable search is comfortable up
to ~15 vertices, the splittable one to ~12.

Lower bound used by both searches (documented because pruning correctness
depends on it): a completion of any partial decision costs at least
max(sum_s w(s) * ceil(load_s / c(s)),
    sum_s w(s) * load_s / c(s) + pending demand priced at the cheapest
    admissible weight-per-capacity-unit rate).
Loads only grow, so neither component ever exceeds the true completion
cost, and pruning only happens strictly above the incumbent.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    CapdomError,
    DemandModel,
    InfeasibleInstance,
    Instance,
    Solution,
    is_feasible,
)
from .greedy import greedy_splittable, greedy_unsplittable


@dataclass(frozen=True)
class SearchBudget:
    """Node limit and optional initial incumbent cost for the searches."""

    max_nodes: int = 5_000_000
    upper_bound: int | None = None

    def __post_init__(self):
        if self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")


class BudgetExhausted(CapdomError):
    """Search hit the node limit; any incumbent carried here is unproven."""

    def __init__(self, nodes: int, incumbent: Solution | None):
        super().__init__(f"search budget exhausted after {nodes} nodes")
        self.nodes = nodes
        self.incumbent = incumbent


class CostBoundExceeded(CapdomError):
    """No solution exists at or below the requested upper bound."""

    def __init__(self, bound: int | None):
        super().__init__(f"no solution with cost <= {bound}")
        self.bound = bound


def _ceil(a: int, b: int) -> int:
    return -(-a // b)


class _Dinic:
    """Max flow on a small integer-capacity network."""

    def __init__(self, nodes: int):
        self.nodes = nodes
        self.head: list[list[int]] = [[] for _ in range(nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        idx = len(self.to)
        self.head[u].append(idx)
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(idx + 1)
        self.to.append(u)
        self.cap.append(0)
        return idx

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.nodes
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for idx in self.head[u]:
                v = self.to[idx]
                if self.cap[idx] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = self._levels(s, t)
            if level is None:
                return flow
            it = [0] * self.nodes

            def dfs(u: int, pushed: int) -> int:
                if u == t:
                    return pushed
                while it[u] < len(self.head[u]):
                    idx = self.head[u][it[u]]
                    v = self.to[idx]
                    if self.cap[idx] > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, self.cap[idx]))
                        if got > 0:
                            self.cap[idx] -= got
                            self.cap[idx ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, 1 << 62)
                if pushed == 0:
                    break
                flow += pushed

    def flow_on(self, idx: int) -> int:
        return self.cap[idx ^ 1]


def feasibility_flow(
    inst: Instance, multiplicity: dict[int, int]
) -> dict[tuple[int, int], int] | None:
    """Assignment saturating every demand under the given copy counts, or None.

    Reduces to max flow: source -> consumers (cap d) -> closed-neighborhood
    servers (cap d) -> sink (cap c * x); integral capacities make the
    extracted assignment integral.
    """
    consumers = [v for v in inst.vertices() if inst.demand(v) > 0]
    total = sum(inst.demand(v) for v in consumers)
    if total == 0:
        return {}
    consumer_idx = {v: 1 + i for i, v in enumerate(consumers)}
    server_cap = {
        u: inst.capacity(u) * multiplicity.get(u, 0)
        for u in inst.vertices()
        if inst.capacity(u) * multiplicity.get(u, 0) > 0
    }
    servers = sorted(server_cap)
    server_idx = {u: 1 + len(consumers) + i for i, u in enumerate(servers)}
    sink = 1 + len(consumers) + len(servers)
    net = _Dinic(sink + 1)
    for v in consumers:
        net.add_edge(0, consumer_idx[v], inst.demand(v))
    middle: list[tuple[int, int, int]] = []
    for v in consumers:
        for u in sorted(inst.closed_neighborhood(v)):
            if u in server_idx:
                middle.append(
                    (v, u, net.add_edge(consumer_idx[v], server_idx[u], inst.demand(v)))
                )
    for u in servers:
        net.add_edge(server_idx[u], sink, server_cap[u])
    if net.max_flow(0, sink) < total:
        return None
    assignment: dict[tuple[int, int], int] = {}
    for v, u, idx in middle:
        amount = net.flow_on(idx)
        if amount > 0:
            assignment[(v, u)] = amount
    return assignment


def _vector_of(sol: Solution, inst: Instance) -> tuple[int, ...]:
    return tuple(sol.multiplicity.get(v, 0) for v in inst.vertices())


def exact_unsplittable(inst: Instance, budget: SearchBudget = SearchBudget()) -> Solution:
    """Provably optimal unsplittable solution via depth-first branch and bound.

    Branches over consumers in decreasing-demand order, trying every
    positive-capacity server in the closed neighborhood.  Among equal-cost
    optima the lexicographically smallest multiplicity vector wins, so the
    witness is a stable fixture.
    """
    if not is_feasible(inst):
        raise InfeasibleInstance("a vertex with demand has no usable server")
    consumers = sorted(
        (v for v in inst.vertices() if inst.demand(v) > 0),
        key=lambda v: (-inst.demand(v), v),
    )
    if not consumers:
        return Solution.empty()
    servers = {
        v: sorted(u for u in inst.closed_neighborhood(v) if inst.capacity(u) > 0)
        for v in consumers
    }
    min_rate = {
        v: min(Fraction(inst.weight(u), inst.capacity(u)) for u in servers[v])
        for v in consumers
    }

    greedy = greedy_unsplittable(inst).solution
    incumbent_cost = greedy.cost
    incumbent: Solution | None = greedy
    best_vec: tuple[int, ...] | None = _vector_of(greedy, inst)
    if budget.upper_bound is not None and budget.upper_bound < incumbent_cost:
        incumbent_cost = budget.upper_bound
        incumbent = None
        best_vec = None

    loads: dict[int, int] = {}
    choice: list[int] = [0] * len(consumers)
    nodes = 0
    cost_int = 0
    cost_frac = Fraction(0)
    pending = sum((min_rate[v] * inst.demand(v) for v in consumers), Fraction(0))

    def descend(i: int):
        nonlocal nodes, incumbent_cost, incumbent, best_vec
        nonlocal cost_int, cost_frac, pending
        if i == len(consumers):
            vec = tuple(
                _ceil(loads[v], inst.capacity(v)) if v in loads else 0
                for v in inst.vertices()
            )
            if cost_int < incumbent_cost or (
                cost_int == incumbent_cost and (best_vec is None or vec < best_vec)
            ):
                incumbent_cost = cost_int
                best_vec = vec
                assignment = {
                    (consumers[j], choice[j]): inst.demand(consumers[j])
                    for j in range(len(consumers))
                }
                multiplicity = {v: x for v, x in zip(inst.vertices(), vec) if x > 0}
                incumbent = Solution(multiplicity, assignment, cost_int)
            return
        v = consumers[i]
        d = inst.demand(v)
        for u in servers[v]:
            nodes += 1
            if nodes > budget.max_nodes:
                raise BudgetExhausted(nodes, incumbent)
            c, w = inst.capacity(u), inst.weight(u)
            old_load = loads.get(u, 0)
            delta_int = w * (_ceil(old_load + d, c) - _ceil(old_load, c))
            frac_step = Fraction(w * d, c)
            pending_step = min_rate[v] * d
            cost_int += delta_int
            cost_frac += frac_step
            pending -= pending_step
            loads[u] = old_load + d
            choice[i] = u
            if max(Fraction(cost_int), cost_frac + pending) <= incumbent_cost:
                descend(i + 1)
            if old_load:
                loads[u] = old_load
            else:
                del loads[u]
            cost_int -= delta_int
            cost_frac -= frac_step
            pending += pending_step

    descend(0)
    if incumbent is None:
        raise CostBoundExceeded(budget.upper_bound)
    return incumbent


def exact_splittable(inst: Instance, budget: SearchBudget = SearchBudget()) -> Solution:
    """Provably optimal splittable solution.

    Best-first enumeration of multiplicity vectors in nondecreasing
    (cost + admissible completion bound, vector) order; the first vector
    admitting a feasible flow is optimal and lexicographically smallest
    among the optima.
    """
    if not is_feasible(inst):
        raise InfeasibleInstance("a vertex with demand has no usable server")
    total_demand = inst.total_demand()
    if total_demand == 0:
        return Solution.empty()

    greedy = greedy_splittable(inst).solution
    bound_cost = greedy.cost
    if budget.upper_bound is not None:
        bound_cost = min(bound_cost, budget.upper_bound)

    n = inst.n
    max_copies = [
        0
        if inst.capacity(v) == 0
        else _ceil(
            sum(inst.demand(u) for u in inst.closed_neighborhood(v)),
            inst.capacity(v),
        )
        for v in inst.vertices()
    ]
    rates: list[Fraction | None] = [
        Fraction(inst.weight(v), inst.capacity(v)) if inst.capacity(v) > 0 else None
        for v in inst.vertices()
    ]
    suffix_rate: list[Fraction | None] = [None] * (n + 2)
    for v in range(n, 0, -1):
        best = suffix_rate[v + 1]
        r = rates[v - 1]
        if r is not None and (best is None or r < best):
            best = r
        suffix_rate[v] = best

    consumers = [v for v in inst.vertices() if inst.demand(v) > 0]

    def completion_bound(prefix: tuple[int, ...]) -> Fraction | None:
        """Admissible extra cost to finish the vector, or None if hopeless."""
        i = len(prefix)
        covered = sum(inst.capacity(v) * prefix[v - 1] for v in range(1, i + 1))
        shortfall = total_demand - covered
        best = Fraction(0)
        if shortfall > 0:
            rate = suffix_rate[i + 1]
            if rate is None:
                return None
            best = shortfall * rate
        for v in consumers:
            have = sum(
                inst.capacity(u) * prefix[u - 1]
                for u in inst.closed_neighborhood(v)
                if u <= i
            )
            need = inst.demand(v) - have
            if need <= 0:
                continue
            options = [
                rates[u - 1]
                for u in inst.closed_neighborhood(v)
                if u > i and rates[u - 1] is not None
            ]
            if not options:
                return None
            local = need * min(options)
            if local > best:
                best = local
        return best

    heap: list[tuple[Fraction, tuple[int, ...], int]] = [(Fraction(0), (), 0)]
    nodes = 0
    while heap:
        _, prefix, cost = heapq.heappop(heap)
        nodes += 1
        if nodes > budget.max_nodes:
            raise BudgetExhausted(nodes, greedy if greedy.cost <= bound_cost else None)
        if len(prefix) == n:
            multiplicity = {v: x for v, x in zip(inst.vertices(), prefix) if x > 0}
            assignment = feasibility_flow(inst, multiplicity)
            if assignment is None:
                continue
            return Solution(multiplicity, assignment, cost)
        v = len(prefix) + 1
        w = inst.weight(v)
        for copies in range(max_copies[v - 1] + 1):
            child_cost = cost + w * copies
            if child_cost > bound_cost:
                break
            child = prefix + (copies,)
            extra = completion_bound(child)
            if extra is None or child_cost + extra > bound_cost:
                continue
            heapq.heappush(heap, (child_cost + extra, child, child_cost))
    raise CostBoundExceeded(bound_cost)


def exact_solve(
    inst: Instance, model: DemandModel, budget: SearchBudget = SearchBudget()
) -> Solution:
    if model is DemandModel.UNSPLITTABLE:
        return exact_unsplittable(inst, budget)
    return exact_splittable(inst, budget)
