"""Instance and solution model for soft-capacitated domination.

Every vertex carries a cost (weight), a per-copy capacity, and a demand.
A solution buys copies of vertices (multiplicities) and routes every
vertex's demand to servers inside its closed neighborhood.  Capacities
are soft: a vertex may be bought any number of times.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

INT64_MAX = 2**63 - 1


class CapdomError(Exception):
    """Base class for errors raised by this package."""


class ParseError(CapdomError):
    """Malformed instance or solution text."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class InfeasibleInstance(CapdomError):
    """Some vertex has positive demand but only zero-capacity closed neighbors."""


class ZeroCapacityServer(CapdomError):
    """An assignment routes demand to a vertex whose capacity is zero."""

    def __init__(self, vertex: int):
        super().__init__(f"assignment targets zero-capacity server {vertex}")
        self.vertex = vertex


class DemandModel(Enum):
    """Whether a vertex's demand may be split across several servers."""

    SPLITTABLE = "split"
    UNSPLITTABLE = "unsplit"


@dataclass(frozen=True)
class VertexAttrs:
    """Per-vertex parameters: cost per copy, capacity per copy, demand."""

    weight: int
    capacity: int
    demand: int


@dataclass(frozen=True)
class Instance:
    """A simple undirected graph with tri-weighted vertices, ids 1..n."""

    n: int
    attrs: tuple[VertexAttrs, ...]
    edges: tuple[tuple[int, int], ...]
    adj: tuple[frozenset[int], ...] = field(compare=False, repr=False, default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("instance needs at least one vertex")
        if len(self.attrs) != self.n:
            raise ValueError("attrs length must equal n")
        for a in self.attrs:
            if a.weight < 0 or a.capacity < 0 or a.demand < 0:
                raise ValueError("vertex attributes must be nonnegative")
        seen = set()
        neighbor_sets: list[set[int]] = [set() for _ in range(self.n + 1)]
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u},{v}) out of range")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add(key)
            neighbor_sets[u].add(v)
            neighbor_sets[v].add(u)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        object.__setattr__(
            self, "adj", tuple(frozenset(s) for s in neighbor_sets)
        )
        self._audit_overflow()

    def _audit_overflow(self):
        # Keeps every sum any solver can form inside signed 64-bit range.
        sum_d = sum(a.demand for a in self.attrs)
        sum_c = sum(a.capacity for a in self.attrs)
        sum_w = sum(a.weight for a in self.attrs)
        if sum_d > INT64_MAX or sum_c * self.n > INT64_MAX or sum_w * max(sum_d, 1) > INT64_MAX:
            raise OverflowError("instance attribute sums exceed the 64-bit budget")

    def weight(self, v: int) -> int:
        return self.attrs[v - 1].weight

    def capacity(self, v: int) -> int:
        return self.attrs[v - 1].capacity

    def demand(self, v: int) -> int:
        return self.attrs[v - 1].demand

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def closed_neighborhood(self, v: int) -> frozenset[int]:
        return self.adj[v] | {v}

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def total_demand(self) -> int:
        return sum(a.demand for a in self.attrs)


def closed_neighborhood(inst: Instance, v: int) -> frozenset[int]:
    """N(v) together with v itself."""
    if not 1 <= v <= inst.n:
        raise ValueError(f"vertex {v} out of range")
    return inst.closed_neighborhood(v)


def is_feasible(inst: Instance) -> bool:
    """False iff some vertex has demand but no positive-capacity server in N[v]."""
    for v in inst.vertices():
        if inst.demand(v) > 0 and all(
            inst.capacity(u) == 0 for u in inst.closed_neighborhood(v)
        ):
            return False
    return True


def with_demands(inst: Instance, demands: Mapping[int, int]) -> Instance:
    """Copy of the instance with the listed vertices' demands replaced."""
    attrs = [
        VertexAttrs(a.weight, a.capacity, demands.get(v, a.demand))
        for v, a in zip(inst.vertices(), inst.attrs)
    ]
    return Instance(inst.n, tuple(attrs), inst.edges)


def induced_instance(
    inst: Instance, vertices: Iterable[int], zero_demand: Iterable[int] = ()
) -> tuple[Instance, tuple[int, ...]]:
    """Induced sub-instance on the given vertices, reindexed densely from 1.

    Demands of vertices listed in zero_demand are set to 0.  Returns the
    sub-instance and the tuple mapping new id i+1 back to the original id.
    """
    orig = tuple(sorted(set(vertices)))
    if not orig:
        raise ValueError("induced instance needs at least one vertex")
    zeroed = set(zero_demand)
    new_id = {v: i + 1 for i, v in enumerate(orig)}
    attrs = tuple(
        VertexAttrs(
            inst.weight(v), inst.capacity(v), 0 if v in zeroed else inst.demand(v)
        )
        for v in orig
    )
    edges = tuple(
        (new_id[u], new_id[v])
        for u, v in inst.edges
        if u in new_id and v in new_id
    )
    return Instance(len(orig), attrs, edges), orig


@dataclass(frozen=True)
class Solution:
    """Bought copies per vertex plus the demand routing that they support.

    multiplicity holds only nonzero counts; assignment maps
    (consumer, server) to a positive amount.
    """

    multiplicity: dict[int, int]
    assignment: dict[tuple[int, int], int]
    cost: int

    @staticmethod
    def empty() -> "Solution":
        return Solution({}, {}, 0)


@dataclass
class VerificationReport:
    """Outcome of checking a solution against an instance."""

    passed: bool
    violations: list[str]

    def __str__(self):
        if self.passed:
            return "PASS"
        return "FAIL\n" + "\n".join(self.violations)


def verify_solution(
    inst: Instance, sol: Solution, model: DemandModel
) -> VerificationReport:
    """Check demand, capacity, cost, and model constraints.

    Violations are report content, never exceptions; the report lists every
    broken constraint with the vertex ids involved.
    """
    problems: list[str] = []

    for v, count in sorted(sol.multiplicity.items()):
        if not 1 <= v <= inst.n:
            problems.append(f"multiplicity names unknown vertex {v}")
        elif count < 0:
            problems.append(f"negative multiplicity at vertex {v}")

    served: dict[int, int] = {v: 0 for v in inst.vertices()}
    load: dict[int, int] = {v: 0 for v in inst.vertices()}
    triples_per_consumer: dict[int, list[tuple[int, int]]] = {}
    for (consumer, server), amount in sorted(sol.assignment.items()):
        if not (1 <= consumer <= inst.n and 1 <= server <= inst.n):
            problems.append(f"assignment names unknown vertex pair ({consumer},{server})")
            continue
        if amount <= 0:
            problems.append(f"nonpositive amount on assignment ({consumer},{server})")
            continue
        if server not in inst.closed_neighborhood(consumer):
            problems.append(
                f"server {server} is outside the closed neighborhood of {consumer}"
            )
        served[consumer] += amount
        load[server] += amount
        triples_per_consumer.setdefault(consumer, []).append((server, amount))

    for v in inst.vertices():
        if served[v] < inst.demand(v):
            problems.append(
                f"demand violated at vertex {v}: served {served[v]} < {inst.demand(v)}"
            )
    for v in inst.vertices():
        available = inst.capacity(v) * sol.multiplicity.get(v, 0)
        if load[v] > available:
            problems.append(
                f"capacity violated at vertex {v}: load {load[v]} > {available}"
            )

    true_cost = sum(
        inst.weight(v) * count
        for v, count in sol.multiplicity.items()
        if 1 <= v <= inst.n
    )
    if sol.cost != true_cost:
        problems.append(f"cost field {sol.cost} != computed cost {true_cost}")

    if model is DemandModel.UNSPLITTABLE:
        for v in inst.vertices():
            triples = triples_per_consumer.get(v, [])
            if inst.demand(v) > 0:
                if len(triples) != 1 or triples[0][1] != inst.demand(v):
                    problems.append(
                        f"unsplittable model violated at vertex {v}: "
                        f"needs one triple of amount {inst.demand(v)}"
                    )
            elif triples:
                problems.append(
                    f"unsplittable model violated at vertex {v}: "
                    "zero-demand vertex carries an assignment"
                )

    return VerificationReport(not problems, problems)


def minimum_multiplicities(
    inst: Instance, assignment: Mapping[tuple[int, int], int]
) -> Solution:
    """Smallest copy counts supporting the given routing.

    Buys ceil(load / capacity) copies of every server, so the result passes
    the capacity constraint by construction.
    """
    load: dict[int, int] = {}
    for (consumer, server), amount in assignment.items():
        if amount > 0:
            load[server] = load.get(server, 0) + amount
    multiplicity: dict[int, int] = {}
    for server in sorted(load):
        c = inst.capacity(server)
        if c == 0:
            raise ZeroCapacityServer(server)
        multiplicity[server] = -(-load[server] // c)
    cost = sum(inst.weight(v) * x for v, x in multiplicity.items())
    clean = {pair: amt for pair, amt in sorted(assignment.items()) if amt > 0}
    return Solution(multiplicity, clean, cost)


def random_instance(
    n: int,
    edge_prob: float,
    max_w: int,
    max_c: int,
    max_d: int,
    seed: int,
) -> Instance:
    """Seeded random instance, feasible by construction.

    Weights are uniform in [1, max_w]; capacities and demands in [0, max_c]
    and [0, max_d] so that zero-capacity servers and zero-demand vertices
    occur.  A post-pass raises c(v) to 1 wherever v has demand but no
    positive-capacity closed neighbor.
    """
    if n < 1 or max_w < 1 or max_c < 1 or max_d < 1:
        raise ValueError("n and attribute bounds must be at least 1")
    rng = random.Random(seed)
    edges = [
        (u, v)
        for u in range(1, n + 1)
        for v in range(u + 1, n + 1)
        if rng.random() < edge_prob
    ]
    attrs = [
        VertexAttrs(rng.randint(1, max_w), rng.randint(0, max_c), rng.randint(0, max_d))
        for _ in range(n)
    ]
    neighbor_caps: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for u, v in edges:
        neighbor_caps[u].append(v)
        neighbor_caps[v].append(u)
    for v in range(1, n + 1):
        a = attrs[v - 1]
        if a.demand > 0 and a.capacity == 0:
            if all(attrs[u - 1].capacity == 0 for u in neighbor_caps[v]):
                attrs[v - 1] = VertexAttrs(a.weight, 1, a.demand)
    return Instance(n, tuple(attrs), tuple(edges))
