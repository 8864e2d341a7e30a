"""Greedy logarithmic-approximation solvers.

Three variants share one skeleton: repeatedly buy copies of the vertex
with the best coverage-per-cost efficiency until every demand is routed.
They differ in how partially served demand is handled:

* unsplittable - each consumer goes wholly to one server
* splittable - residues may spread over servers; a doubling rule keeps
  every unsatisfied residue at >= half its demand
* unweighted splittable - a pre-pass parks floor(d/c) full copies on the
  largest-capacity neighbor so one copy suffices afterwards

Efficiency ratios are kept as exact integer fractions and compared by
cross-multiplication; nothing here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    CapdomError,
    DemandModel,
    InfeasibleInstance,
    Instance,
    Solution,
    is_feasible,
    minimum_multiplicities,
)


class NoCandidates(CapdomError):
    """Efficiency was requested for a vertex with no unserved closed neighbor."""


class NotUnweighted(CapdomError):
    """The unweighted solver was given an instance with non-unit weights."""


@dataclass(frozen=True)
class EfficiencyQuote:
    """One vertex's best coverage-per-cost offer, as an unreduced fraction.

    Zero-weight vertices quote denominator 0 (infinite efficiency);
    cross-multiplication still orders those correctly.
    """

    vertex: int
    prefix_len: int
    numerator: int
    denominator: int

    def beats(self, other: "EfficiencyQuote") -> bool:
        return self.numerator * other.denominator > other.numerator * self.denominator


@dataclass(frozen=True)
class TraceEntry:
    """One greedy decision: phase 0 pre-pass, 1 main pick, 2 cleanup."""

    iteration: int
    chosen: int
    prefix_len: int
    iter_cost: int
    phase: int

    def line(self) -> str:
        return f"t {self.iteration} {self.chosen} {self.prefix_len} {self.iter_cost} {self.phase}"


@dataclass
class GreedyState:
    """Mutable bookkeeping shared by the greedy variants."""

    residue_demand: dict[int, int]
    undominated: set[int]
    map_sets: dict[int, set[int]]
    partial_assignment: dict[tuple[int, int], int]
    running_cost: int
    base_demand: dict[int, int]


@dataclass
class GreedyResult:
    solution: Solution
    trace: list[TraceEntry]
    undominated_before: list[frozenset[int]] = field(default_factory=list)
    boundary_residues: list[dict[int, int]] = field(default_factory=list)
    phase0_cost: int = 0
    model: DemandModel = DemandModel.UNSPLITTABLE

    def trace_lines(self) -> list[str]:
        return [t.line() for t in self.trace]


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _add(assignment: dict[tuple[int, int], int], consumer: int, server: int, amount: int):
    if amount > 0:
        key = (consumer, server)
        assignment[key] = assignment.get(key, 0) + amount


def unsplit_efficiency(inst: Instance, state: GreedyState, u: int) -> EfficiencyQuote | None:
    """Best ratio (covered count) / (weight * copies) over candidate prefixes.

    Candidates are the undominated closed neighbors of u sorted by demand,
    ties by id.  Equal ratios resolve toward the longer prefix.  Returns
    None for zero-capacity vertices, which are never selectable.
    """
    candidates = sorted(
        state.undominated & inst.closed_neighborhood(u),
        key=lambda v: (inst.demand(v), v),
    )
    if not candidates:
        raise NoCandidates(f"vertex {u} has no undominated closed neighbor")
    c = inst.capacity(u)
    if c == 0:
        return None
    w = inst.weight(u)
    if w == 0:
        return EfficiencyQuote(u, len(candidates), 1, 0)
    best: tuple[int, int, int] | None = None
    prefix = 0
    for i, v in enumerate(candidates, 1):
        prefix += inst.demand(v)
        num, den = i, w * _ceil_div(prefix, c)
        if best is None or num * best[1] >= best[0] * den:
            best = (num, den, i)
    return EfficiencyQuote(u, best[2], best[0], best[1])


def split_efficiency(inst: Instance, state: GreedyState, u: int) -> EfficiencyQuote:
    """Efficiency (X + Y) / w as one exact fraction over a common denominator.

    X sums residue/demand over the longest prefix a single copy fully
    absorbs; Y credits the leftover capacity against the next candidate.
    Candidates sort by their base demand (not the residue), ties by id.
    """
    candidates = sorted(
        (v for v in inst.closed_neighborhood(u) if state.residue_demand.get(v, 0) > 0),
        key=lambda v: (state.base_demand[v], v),
    )
    if not candidates:
        raise NoCandidates(f"vertex {u} has no unsatisfied closed neighbor")
    c = inst.capacity(u)
    if c <= 0:
        raise ValueError("split efficiency needs a positive-capacity vertex")
    prefix = 0
    j = 0
    for v in candidates:
        if prefix + state.residue_demand[v] > c:
            break
        prefix += state.residue_demand[v]
        j += 1
    involved = {state.base_demand[v] for v in candidates[:j]}
    if j < len(candidates):
        involved.add(state.base_demand[candidates[j]])
    common = 1
    for d in sorted(involved):
        common *= d
    numerator = sum(
        state.residue_demand[v] * (common // state.base_demand[v])
        for v in candidates[:j]
    )
    if j < len(candidates):
        numerator += (c - prefix) * (common // state.base_demand[candidates[j]])
    return EfficiencyQuote(u, j, numerator, common * inst.weight(u))


def _pick_best(quotes: list[EfficiencyQuote]) -> EfficiencyQuote:
    best = quotes[0]
    for q in quotes[1:]:
        if q.beats(best):
            best = q
    return best


def greedy_unsplittable(inst: Instance) -> GreedyResult:
    """Whole-demand greedy: logarithmic-ratio solver for the unsplittable model."""
    if not is_feasible(inst):
        raise InfeasibleInstance("a vertex with demand has no usable server")
    state = GreedyState(
        residue_demand={},
        undominated={v for v in inst.vertices() if inst.demand(v) > 0},
        map_sets={},
        partial_assignment={},
        running_cost=0,
        base_demand={v: inst.demand(v) for v in inst.vertices()},
    )
    trace: list[TraceEntry] = []
    undominated_before: list[frozenset[int]] = []
    iteration = 0
    while state.undominated:
        iteration += 1
        quotes = []
        for u in inst.vertices():
            if inst.capacity(u) == 0:
                continue
            if not (state.undominated & inst.closed_neighborhood(u)):
                continue
            q = unsplit_efficiency(inst, state, u)
            if q is not None:
                quotes.append(q)
        if not quotes:
            raise InfeasibleInstance("no selectable vertex covers the remaining demand")
        best = _pick_best(quotes)
        u = best.vertex
        chosen = sorted(
            state.undominated & inst.closed_neighborhood(u),
            key=lambda v: (inst.demand(v), v),
        )[: best.prefix_len]
        undominated_before.append(frozenset(state.undominated))
        prefix = 0
        for v in chosen:
            _add(state.partial_assignment, v, u, inst.demand(v))
            prefix += inst.demand(v)
            state.undominated.discard(v)
        iter_cost = inst.weight(u) * _ceil_div(prefix, inst.capacity(u))
        state.running_cost += iter_cost
        trace.append(TraceEntry(iteration, u, best.prefix_len, iter_cost, 1))
    solution = minimum_multiplicities(inst, state.partial_assignment)
    return GreedyResult(
        solution,
        trace,
        undominated_before=undominated_before,
        model=DemandModel.UNSPLITTABLE,
    )


def _split_iteration(
    inst: Instance,
    state: GreedyState,
    iteration: int,
    trace: list[TraceEntry],
) -> None:
    """One first-greedy-choice step shared by the splittable variants."""
    quotes = []
    for u in inst.vertices():
        if inst.capacity(u) == 0:
            continue
        if any(
            state.residue_demand.get(v, 0) > 0 for v in inst.closed_neighborhood(u)
        ):
            quotes.append(split_efficiency(inst, state, u))
    if not quotes:
        raise InfeasibleInstance("no selectable vertex covers the remaining demand")
    best = _pick_best(quotes)
    u = best.vertex
    c = inst.capacity(u)
    candidates = sorted(
        (v for v in inst.closed_neighborhood(u) if state.residue_demand.get(v, 0) > 0),
        key=lambda v: (state.base_demand[v], v),
    )
    j = best.prefix_len
    if j == 0:
        first = candidates[0]
        residue = state.residue_demand[first]
        assert residue > c, "prefix length 0 implies the first residue exceeds c(u)"
        copies = residue // c
        _add(state.partial_assignment, first, u, c * copies)
        state.residue_demand[first] = residue - c * copies
        state.map_sets[first] = {u}
        iter_cost = inst.weight(u) * copies
    else:
        assigned = 0
        for v in candidates[:j]:
            _add(state.partial_assignment, v, u, state.residue_demand[v])
            assigned += state.residue_demand[v]
            state.residue_demand[v] = 0
        if j < len(candidates):
            spare = c - assigned
            if spare > 0:
                nxt = candidates[j]
                _add(state.partial_assignment, nxt, u, spare)
                state.residue_demand[nxt] -= spare
                state.map_sets.setdefault(nxt, set()).add(u)
        iter_cost = inst.weight(u)
    state.running_cost += iter_cost
    trace.append(TraceEntry(iteration, u, j, iter_cost, 1))


def greedy_splittable(inst: Instance) -> GreedyResult:
    """Split-demand greedy with the doubling rule.

    After every iteration each unsatisfied vertex keeps at least half of
    its demand: whenever a residue drops below half, the assignments from
    the servers that partially served it are doubled, satisfying it.
    """
    if not is_feasible(inst):
        raise InfeasibleInstance("a vertex with demand has no usable server")
    state = GreedyState(
        residue_demand={v: inst.demand(v) for v in inst.vertices() if inst.demand(v) > 0},
        undominated=set(),
        map_sets={},
        partial_assignment={},
        running_cost=0,
        base_demand={v: inst.demand(v) for v in inst.vertices()},
    )
    trace: list[TraceEntry] = []
    boundary: list[dict[int, int]] = []
    iteration = 0
    while any(state.residue_demand.values()):
        iteration += 1
        if iteration > inst.n + 1:
            raise CapdomError("splittable greedy failed to make progress")
        _split_iteration(inst, state, iteration, trace)
        below_half = [
            v
            for v in sorted(state.residue_demand)
            if 0 < 2 * state.residue_demand[v] < state.base_demand[v]
        ]
        assert len(below_half) <= 1, "at most one residue can cross the half mark"
        for v in below_half:
            for server in sorted(state.map_sets.get(v, ())):
                state.partial_assignment[(v, server)] *= 2
            state.residue_demand[v] = 0
            trace.append(TraceEntry(iteration, v, len(state.map_sets.get(v, ())), 0, 2))
        boundary.append({v: r for v, r in state.residue_demand.items() if r > 0})
    solution = minimum_multiplicities(inst, state.partial_assignment)
    return GreedyResult(
        solution,
        trace,
        boundary_residues=boundary,
        model=DemandModel.SPLITTABLE,
    )


def greedy_unweighted_splittable(inst: Instance) -> GreedyResult:
    """Unit-weight splittable greedy with the big-neighbor pre-pass.

    Phase 0 assigns c(g) * floor(d/c(g)) of every demand to the largest
    closed neighbor g, then the demands are rebased to the residues, after
    which one copy always suffices and partial vertices are finished by
    routing the rest to g.
    """
    if any(inst.weight(v) != 1 for v in inst.vertices()):
        raise NotUnweighted("every vertex weight must be 1")
    if not is_feasible(inst):
        raise InfeasibleInstance("a vertex with demand has no usable server")
    best_neighbor: dict[int, int] = {}
    for v in inst.vertices():
        if inst.demand(v) > 0:
            best_neighbor[v] = min(
                inst.closed_neighborhood(v),
                key=lambda u: (-inst.capacity(u), u),
            )
    trace: list[TraceEntry] = []
    assignment: dict[tuple[int, int], int] = {}
    residue: dict[int, int] = {}
    phase0_cost = 0
    for v in sorted(best_neighbor):
        g = best_neighbor[v]
        cg = inst.capacity(g)
        copies = inst.demand(v) // cg
        if copies > 0:
            _add(assignment, v, g, cg * copies)
            phase0_cost += copies
            trace.append(TraceEntry(0, g, 0, copies, 0))
        residue[v] = inst.demand(v) - cg * copies
    state = GreedyState(
        residue_demand={v: r for v, r in residue.items() if r > 0},
        undominated=set(),
        map_sets={},
        partial_assignment=assignment,
        running_cost=phase0_cost,
        base_demand={v: r for v, r in residue.items() if r > 0},
    )
    boundary: list[dict[int, int]] = []
    iteration = 0
    while any(state.residue_demand.values()):
        iteration += 1
        if iteration > inst.n + 1:
            raise CapdomError("unweighted greedy failed to make progress")
        _split_iteration(inst, state, iteration, trace)
        assert trace[-1].prefix_len >= 1, "rebased demands always fit one copy"
        partial = [
            v
            for v in sorted(state.residue_demand)
            if 0 < state.residue_demand[v] < state.base_demand[v]
        ]
        assert len(partial) <= 1, "at most one vertex is partially served per pick"
        for v in partial:
            g = best_neighbor[v]
            _add(state.partial_assignment, v, g, state.residue_demand[v])
            state.residue_demand[v] = 0
            trace.append(TraceEntry(iteration, g, 0, 0, 2))
        boundary.append({v: r for v, r in state.residue_demand.items() if r > 0})
    solution = minimum_multiplicities(inst, state.partial_assignment)
    return GreedyResult(
        solution,
        trace,
        boundary_residues=boundary,
        phase0_cost=phase0_cost,
        model=DemandModel.SPLITTABLE,
    )
