"""Line-based text formats for instances and solutions.

Instance files:
    c <comment>
    p capdom <n> <m>
    v <id> <weight> <capacity> <demand>     (one line per vertex)
    e <u> <v>                               (one line per edge, u != v)

Solution files:
    s capdom <cost> <split|unsplit>
    x <vertex> <count>                      (nonzero multiplicities)
    a <consumer> <server> <amount>          (nonzero assignments)

Both serializers emit a canonical order so files are diffable and
byte-stable: vertices ascending, edges with the smaller endpoint first
sorted lexicographically, assignments sorted by (consumer, server).
"""
from __future__ import annotations

from .core import (
    DemandModel,
    Instance,
    ParseError,
    Solution,
    VertexAttrs,
)


def _is_comment(line: str) -> bool:
    return line == "c" or line.startswith("c ")


def _ints(parts: list[str], line_no: int) -> list[int]:
    out = []
    for p in parts:
        try:
            out.append(int(p))
        except ValueError:
            raise ParseError(line_no, f"expected integer, got {p!r}") from None
    return out


def load_instance(text: str) -> Instance:
    """Parse instance text, rejecting every format violation with a line number."""
    n = m = -1
    attrs: dict[int, VertexAttrs] = {}
    edges: list[tuple[int, int]] = []
    edge_keys: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or _is_comment(line):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if n >= 0:
                raise ParseError(line_no, "duplicate header line")
            if len(parts) != 4 or parts[1] != "capdom":
                raise ParseError(line_no, "header must be 'p capdom <n> <m>'")
            n, m = _ints(parts[2:], line_no)
            if n < 1 or m < 0:
                raise ParseError(line_no, "need n >= 1 and m >= 0")
        elif tag == "v":
            if n < 0:
                raise ParseError(line_no, "vertex line before header")
            if len(parts) != 5:
                raise ParseError(line_no, "vertex line must be 'v <id> <w> <c> <d>'")
            vid, w, c, d = _ints(parts[1:], line_no)
            if not 1 <= vid <= n:
                raise ParseError(line_no, f"vertex id {vid} out of range 1..{n}")
            if vid in attrs:
                raise ParseError(line_no, f"duplicate vertex line for {vid}")
            if min(w, c, d) < 0:
                raise ParseError(line_no, "vertex attributes must be nonnegative")
            attrs[vid] = VertexAttrs(w, c, d)
        elif tag == "e":
            if n < 0:
                raise ParseError(line_no, "edge line before header")
            if len(parts) != 3:
                raise ParseError(line_no, "edge line must be 'e <u> <v>'")
            u, v = _ints(parts[1:], line_no)
            if u == v:
                raise ParseError(line_no, f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(line_no, f"edge ({u},{v}) out of range")
            key = (min(u, v), max(u, v))
            if key in edge_keys:
                raise ParseError(line_no, f"duplicate edge ({u},{v})")
            edge_keys.add(key)
            edges.append(key)
        else:
            raise ParseError(line_no, f"unknown line tag {tag!r}")
    if n < 0:
        raise ParseError(0, "missing 'p capdom' header")
    if len(attrs) != n:
        missing = sorted(set(range(1, n + 1)) - set(attrs))
        raise ParseError(0, f"missing vertex lines for {missing}")
    if len(edges) != m:
        raise ParseError(0, f"header declares {m} edges, found {len(edges)}")
    return Instance(n, tuple(attrs[v] for v in range(1, n + 1)), tuple(edges))


def save_instance(inst: Instance, comments: list[str] | None = None) -> str:
    lines = [f"c {c}" for c in comments or []]
    lines.append(f"p capdom {inst.n} {len(inst.edges)}")
    for v in inst.vertices():
        a = inst.attrs[v - 1]
        lines.append(f"v {v} {a.weight} {a.capacity} {a.demand}")
    for u, v in sorted(inst.edges):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def load_solution(text: str) -> tuple[Solution, DemandModel]:
    """Parse a solution file; trailing trace lines ('t ...') are ignored."""
    cost = None
    model = None
    multiplicity: dict[int, int] = {}
    assignment: dict[tuple[int, int], int] = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or _is_comment(line) or line.startswith("t "):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "s":
            if cost is not None:
                raise ParseError(line_no, "duplicate solution header")
            if len(parts) != 4 or parts[1] != "capdom":
                raise ParseError(line_no, "header must be 's capdom <cost> <model>'")
            (cost,) = _ints(parts[2:3], line_no)
            try:
                model = DemandModel(parts[3])
            except ValueError:
                raise ParseError(line_no, f"unknown model {parts[3]!r}") from None
        elif tag == "x":
            if cost is None:
                raise ParseError(line_no, "multiplicity line before header")
            if len(parts) != 3:
                raise ParseError(line_no, "multiplicity line must be 'x <vertex> <count>'")
            v, count = _ints(parts[1:], line_no)
            if count < 1:
                raise ParseError(line_no, "multiplicity lines carry nonzero counts")
            if v in multiplicity:
                raise ParseError(line_no, f"duplicate multiplicity line for {v}")
            multiplicity[v] = count
        elif tag == "a":
            if cost is None:
                raise ParseError(line_no, "assignment line before header")
            if len(parts) != 4:
                raise ParseError(line_no, "assignment line must be 'a <consumer> <server> <amount>'")
            consumer, server, amount = _ints(parts[1:], line_no)
            if amount < 1:
                raise ParseError(line_no, "assignment lines carry positive amounts")
            if (consumer, server) in assignment:
                raise ParseError(line_no, f"duplicate assignment line ({consumer},{server})")
            assignment[(consumer, server)] = amount
        else:
            raise ParseError(line_no, f"unknown line tag {tag!r}")
    if cost is None or model is None:
        raise ParseError(0, "missing 's capdom' header")
    return Solution(multiplicity, assignment, cost), model


def save_solution(
    sol: Solution,
    model: DemandModel,
    trace_lines: list[str] | None = None,
    comments: list[str] | None = None,
) -> str:
    lines = [f"c {c}" for c in comments or []]
    lines.append(f"s capdom {sol.cost} {model.value}")
    for v, count in sorted(sol.multiplicity.items()):
        if count:
            lines.append(f"x {v} {count}")
    for (consumer, server), amount in sorted(sol.assignment.items()):
        if amount:
            lines.append(f"a {consumer} {server} {amount}")
    lines.extend(trace_lines or [])
    return "\n".join(lines) + "\n"
