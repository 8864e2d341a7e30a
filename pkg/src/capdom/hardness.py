"""Generator for the clique-to-domination gadget plus its verifiers.

A k-partitioned clique question becomes a domination instance built from
stars and bridges: selector nodes force one member per star, bridge
capacities are exactly one label short of their neighborhood's demand,
and paired propagation nodes (label, N - label) make the shortfalls cancel
only when the star choices are mutually consistent, i.e. form a clique.

Budget for the yes-side: every bridge once (2k(k-1) nodes), one member
per vertex star (k) and per edge star (k(k-1)/2), so
k* = 2k(k-1) + k(k+1)/2.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .core import (
    CapdomError,
    Instance,
    ParseError,
    Solution,
    VertexAttrs,
    is_feasible,
    DemandModel,
)
from .oracle import (
    BudgetExhausted,
    CostBoundExceeded,
    InfeasibleInstance,
    SearchBudget,
    exact_solve,
)


class InvalidCliqueInstance(CapdomError):
    """The k-partitioned input breaks one of its invariants."""


@dataclass(frozen=True)
class CliqueInstance:
    """k disjoint independent parts over vertices labeled 1..N, cross edges."""

    k: int
    parts: tuple[tuple[int, ...], ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.k < 2 or len(self.parts) != self.k:
            raise InvalidCliqueInstance("need k >= 2 nonempty parts")
        flat = [v for part in self.parts for v in part]
        if not flat or sorted(flat) != list(range(1, len(flat) + 1)):
            raise InvalidCliqueInstance("parts must partition labels 1..N")
        if any(not part for part in self.parts):
            raise InvalidCliqueInstance("every part must be nonempty")
        color = self.color_of()
        for u, v in self.edges:
            if u >= v:
                raise InvalidCliqueInstance(f"edge ({u},{v}) not normalized u < v")
            if color[u] == color[v]:
                raise InvalidCliqueInstance(f"edge ({u},{v}) inside one color class")

    @property
    def num_labels(self) -> int:
        return sum(len(part) for part in self.parts)

    def color_of(self) -> dict[int, int]:
        return {v: i for i, part in enumerate(self.parts, 1) for v in part}

    def cross_edges(self, i: int, j: int) -> list[tuple[int, int]]:
        color = self.color_of()
        out = []
        for u, v in sorted(self.edges):
            if {color[u], color[v]} == {i, j}:
                out.append((u, v) if color[u] == i else (v, u))
        return sorted(out)

    def has_clique(self) -> bool:
        """Exhaustive check for one-vertex-per-part cliques."""
        normalized = {(min(u, v), max(u, v)) for u, v in self.edges}
        for pick in product(*self.parts):
            if all(
                (min(a, b), max(a, b)) in normalized
                for idx, a in enumerate(pick)
                for b in pick[idx + 1 :]
            ):
                return True
        return False


def budget_for(k: int) -> int:
    return 2 * k * (k - 1) + k * (k + 1) // 2


@dataclass(frozen=True)
class GadgetInstance:
    instance: Instance
    roles: dict[int, str]
    budget: int
    k: int
    num_labels: int

    def nodes_with_role(self, prefix: str) -> list[int]:
        return sorted(v for v, tag in self.roles.items() if tag.split(":")[0] == prefix)


def reduce(cq: CliqueInstance) -> GadgetInstance:
    """Build the domination gadget for a k-partitioned clique question.

    Node order is deterministic: vertex selectors, vertex nodes, edge
    selectors, edge nodes, bridges per ordered color pair, vertex
    propagation pairs, then edge propagation pairs.  Bridge capacities are
    demand-sum minus N, clamped at zero (sparse pairs can push the formula
    negative, which only ever makes the no-side harder to dominate).
    """
    k, n_labels = cq.k, cq.num_labels
    k_star = budget_for(k)
    heavy = k_star + 1
    attrs: list[VertexAttrs] = []
    roles: dict[int, str] = {}
    edges: list[tuple[int, int]] = []

    def new_node(tag: str, weight: int, capacity: int, demand: int) -> int:
        attrs.append(VertexAttrs(weight, capacity, demand))
        node = len(attrs)
        roles[node] = tag
        return node

    vertex_selector: dict[int, int] = {}
    vertex_node: dict[int, int] = {}
    for i, part in enumerate(cq.parts, 1):
        vertex_selector[i] = new_node(f"vsel:{i}", heavy, 0, 1)
        for u in part:
            vertex_node[u] = new_node(f"vnode:{u}", 1, 1 + (k - 1) * n_labels, 0)
            edges.append((vertex_selector[i], vertex_node[u]))

    edge_selector: dict[tuple[int, int], int] = {}
    edge_node: dict[tuple[int, int], int] = {}
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            edge_selector[(i, j)] = new_node(f"esel:{i}:{j}", heavy, 0, 1)
            for u, v in cq.cross_edges(i, j):
                edge_node[(u, v)] = new_node(f"enode:{u}:{v}", 1, 1 + 2 * n_labels, 0)
                edges.append((edge_selector[(i, j)], edge_node[(u, v)]))

    ordered_pairs = [
        (i, j) for i in range(1, k + 1) for j in range(1, k + 1) if i != j
    ]
    bridge: dict[tuple[int, int, int], int] = {}
    for i, j in sorted(ordered_pairs):
        for alpha in (1, 2):
            bridge[(alpha, i, j)] = new_node(f"bridge:{alpha}:{i}:{j}", 1, 0, 1)

    color = cq.color_of()
    for i, j in sorted(ordered_pairs):
        for v in cq.parts[i - 1]:
            demands = {1: v, 2: n_labels - v}
            for alpha in (1, 2):
                node = new_node(f"vprop:{alpha}:{v}:{i}:{j}", heavy, 0, demands[alpha])
                edges.append((node, vertex_node[v]))
                edges.append((node, bridge[(alpha, i, j)]))

    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            for u, v in cq.cross_edges(i, j):
                enode = edge_node[(u, v)]
                for a, b, end in ((i, j, u), (j, i, v)):
                    demands = {1: n_labels - end, 2: end}
                    for alpha in (1, 2):
                        node = new_node(
                            f"eprop:{alpha}:{u}:{v}:{a}:{b}", heavy, 0, demands[alpha]
                        )
                        edges.append((node, enode))
                        edges.append((node, bridge[(alpha, a, b)]))

    adjacency: dict[int, set[int]] = {v: set() for v in range(1, len(attrs) + 1)}
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    for (alpha, i, j), node in sorted(bridge.items()):
        demand_sum = attrs[node - 1].demand + sum(
            attrs[u - 1].demand for u in adjacency[node]
        )
        capacity = max(0, demand_sum - n_labels)
        attrs[node - 1] = VertexAttrs(1, capacity, 1)

    inst = Instance(len(attrs), tuple(attrs), tuple(edges))
    return GadgetInstance(inst, roles, k_star, k, n_labels)


@dataclass
class StructReport:
    passed: bool
    problems: list[str]

    def __str__(self):
        return "PASS" if self.passed else "FAIL\n" + "\n".join(self.problems)


def verify_structure(g: GadgetInstance) -> StructReport:
    """Audit the attribute schedule and the forest left by deleting bridges."""
    problems: list[str] = []
    inst, n_labels, k = g.instance, g.num_labels, g.k
    bridges = set(g.nodes_with_role("bridge"))

    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    for u, v in inst.edges:
        if u in bridges or v in bridges:
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            problems.append(f"cycle through edge ({u},{v}) after deleting bridges")
        else:
            parent[ru] = rv

    for b in sorted(bridges):
        demand_sum = sum(inst.demand(u) for u in inst.closed_neighborhood(b))
        expected = max(0, demand_sum - n_labels)
        if inst.capacity(b) != expected:
            problems.append(
                f"bridge {b} capacity {inst.capacity(b)} != expected {expected}"
            )
    for v in g.nodes_with_role("vnode"):
        expected = 1 + (k - 1) * n_labels
        if inst.capacity(v) != expected:
            problems.append(f"vertex node {v} capacity != {expected}")
        demand_sum = sum(inst.demand(u) for u in inst.closed_neighborhood(v))
        if demand_sum != expected:
            problems.append(f"vertex node {v} neighborhood demand {demand_sum} != {expected}")
    for v in g.nodes_with_role("enode"):
        expected = 1 + 2 * n_labels
        if inst.capacity(v) != expected:
            problems.append(f"edge node {v} capacity != {expected}")
        demand_sum = sum(inst.demand(u) for u in inst.closed_neighborhood(v))
        if demand_sum != expected:
            problems.append(f"edge node {v} neighborhood demand {demand_sum} != {expected}")
    return StructReport(not problems, problems)


@dataclass
class SemanticsReport:
    status: str  # PASS, FAIL, or INCONCLUSIVE
    clique_exists: bool
    optimum: int | None  # None when the gadget is infeasible or above budget

    def __str__(self):
        opt = "infeasible/over-budget" if self.optimum is None else str(self.optimum)
        return f"{self.status} (clique={self.clique_exists}, gadget optimum={opt})"


def verify_semantics(
    cq: CliqueInstance,
    g: GadgetInstance,
    budget: SearchBudget = SearchBudget(),
    model: DemandModel = DemandModel.UNSPLITTABLE,
) -> SemanticsReport:
    """Check: a one-per-part clique exists iff the gadget optimum is <= k*.

    The gadget side runs the exact solver capped just above the budget; a
    search that hits its node limit yields INCONCLUSIVE, never PASS/FAIL.
    """
    clique = cq.has_clique()
    optimum: int | None = None
    if is_feasible(g.instance):
        capped = SearchBudget(budget.max_nodes, g.budget + 1)
        try:
            solution = exact_solve(g.instance, model, capped)
            optimum = solution.cost
        except CostBoundExceeded:
            optimum = None
        except BudgetExhausted:
            return SemanticsReport("INCONCLUSIVE", clique, None)
        except InfeasibleInstance:
            optimum = None
    ok = clique == (optimum is not None and optimum <= g.budget)
    return SemanticsReport("PASS" if ok else "FAIL", clique, optimum)


def clique_witness_solution(
    cq: CliqueInstance, g: GadgetInstance, pick: tuple[int, ...]
) -> Solution:
    """Budget-cost solution encoding a known clique, for the yes-side check.

    Buys every bridge once plus the star members matching the pick; star
    members absorb their selector and propagation pairs, every other
    propagation node falls back to its bridge.
    """
    color = cq.color_of()
    chosen_vertex = {color[v]: v for v in pick}
    chosen_edge: dict[tuple[int, int], tuple[int, int]] = {}
    for idx, a in enumerate(pick):
        for b in pick[idx + 1 :]:
            i, j = sorted((color[a], color[b]))
            chosen_edge[(i, j)] = (a, b) if color[a] == i else (b, a)

    inst = g.instance
    by_tag = {tag: node for node, tag in g.roles.items()}
    assignment: dict[tuple[int, int], int] = {}
    multiplicity: dict[int, int] = {}
    served: set[int] = set()

    def route(consumer: int, server: int):
        if inst.demand(consumer) > 0:
            assignment[(consumer, server)] = inst.demand(consumer)
            served.add(consumer)

    for tag, node in sorted(by_tag.items()):
        if tag.startswith("bridge:"):
            multiplicity[node] = 1
            route(node, node)
    for i in range(1, g.k + 1):
        u = chosen_vertex[i]
        vnode = by_tag[f"vnode:{u}"]
        multiplicity[vnode] = 1
        route(by_tag[f"vsel:{i}"], vnode)
        for j in range(1, g.k + 1):
            if j != i:
                for alpha in (1, 2):
                    route(by_tag[f"vprop:{alpha}:{u}:{i}:{j}"], vnode)
    for (i, j), (u, v) in sorted(chosen_edge.items()):
        enode = by_tag[f"enode:{u}:{v}"]
        multiplicity[enode] = 1
        route(by_tag[f"esel:{i}:{j}"], enode)
        for a, b in ((i, j), (j, i)):
            for alpha in (1, 2):
                route(by_tag[f"eprop:{alpha}:{u}:{v}:{a}:{b}"], enode)
    for node in g.nodes_with_role("vprop") + g.nodes_with_role("eprop"):
        if inst.demand(node) > 0 and node not in served:
            fields = g.roles[node].split(":")
            alpha, i, j = int(fields[1]), int(fields[-2]), int(fields[-1])
            route(node, by_tag[f"bridge:{alpha}:{i}:{j}"])
    cost = sum(inst.weight(v) * x for v, x in multiplicity.items())
    return Solution(multiplicity, assignment, cost)


def load_clique_instance(text: str) -> CliqueInstance:
    """Parse 'p mcq <k> <N> <|E|>' followed by part and edge lines."""
    k = n = m = -1
    parts: dict[int, tuple[int, ...]] = {}
    edges: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if len(tokens) != 5 or tokens[1] != "mcq":
                raise ParseError(line_no, "header must be 'p mcq <k> <N> <|E|>'")
            k, n, m = (int(t) for t in tokens[2:])
        elif tokens[0] == "part":
            if k < 0:
                raise ParseError(line_no, "part line before header")
            idx = int(tokens[1])
            if idx in parts:
                raise ParseError(line_no, f"duplicate part {idx}")
            parts[idx] = tuple(sorted(int(t) for t in tokens[2:]))
        elif tokens[0] == "e":
            if k < 0:
                raise ParseError(line_no, "edge line before header")
            if len(tokens) != 3:
                raise ParseError(line_no, "edge line must be 'e <u> <v>'")
            u, v = int(tokens[1]), int(tokens[2])
            edges.add((min(u, v), max(u, v)))
        else:
            raise ParseError(line_no, f"unknown line tag {tokens[0]!r}")
    if k < 0:
        raise ParseError(0, "missing 'p mcq' header")
    if sorted(parts) != list(range(1, k + 1)):
        raise ParseError(0, f"need part lines 1..{k}")
    if len(edges) != m:
        raise ParseError(0, f"header declares {m} edges, found {len(edges)}")
    cq = CliqueInstance(k, tuple(parts[i] for i in range(1, k + 1)), frozenset(edges))
    if cq.num_labels != n:
        raise ParseError(0, f"header declares {n} vertices, parts hold {cq.num_labels}")
    return cq


def save_clique_instance(cq: CliqueInstance) -> str:
    lines = [f"p mcq {cq.k} {cq.num_labels} {len(cq.edges)}"]
    for i, part in enumerate(cq.parts, 1):
        lines.append("part " + " ".join([str(i)] + [str(v) for v in part]))
    for u, v in sorted(cq.edges):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def role_lines(g: GadgetInstance) -> list[str]:
    return [f"role {node} {tag}" for node, tag in sorted(g.roles.items())]
