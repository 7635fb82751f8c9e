"""Weighted graphs, Laplacians and clique sums.

Vertices are labelled ``0..n-1`` everywhere, including the JSON file format.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int, float]


class GraphError(ValueError):
    """Raised for malformed graphs or invalid clique-sum specifications."""


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected simple graph with real edge weights.

    ``edges`` keeps the order it was given in; that order is what weight
    vectors (``weights``) and named constructors refer to.
    """

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise GraphError(f"vertex count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        seen: set[tuple[int, int]] = set()
        normalized = []
        for k, edge in enumerate(self.edges):
            i, j, w = _check_edge(edge, self.n, k)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"edge {k}: duplicate edge {key}")
            seen.add(key)
            normalized.append((i, j, w))
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=float)

    @property
    def has_zero_weight(self) -> bool:
        return any(w == 0.0 for _, _, w in self.edges)

    def weight(self, i: int, j: int) -> float | None:
        for a, b, w in self.edges:
            if (a, b) == (i, j) or (a, b) == (j, i):
                return w
        return None

    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def with_weights(self, weights: Iterable[float]) -> WeightedGraph:
        weights = [float(w) for w in weights]
        if len(weights) != self.m:
            raise GraphError(f"expected {self.m} weights, got {len(weights)}")
        return WeightedGraph(self.n, tuple((i, j, w) for (i, j, _), w in zip(self.edges, weights)))

    def induced(self, vertices: Sequence[int]) -> WeightedGraph:
        """Induced subgraph, relabelled by position in ``vertices``."""
        index = {v: k for k, v in enumerate(vertices)}
        edges = tuple(
            (index[i], index[j], w) for i, j, w in self.edges if i in index and j in index
        )
        return WeightedGraph(len(vertices), edges)

    def edge_set(self) -> frozenset[tuple[int, int, float]]:
        return frozenset((min(i, j), max(i, j), w) for i, j, w in self.edges)

    def same_as(self, other: WeightedGraph) -> bool:
        """Equality of labelled weighted graphs, ignoring edge order and orientation."""
        return self.n == other.n and self.edge_set() == other.edge_set()

    def to_json_obj(self) -> dict:
        return {"n": self.n, "edges": [[i, j, w] for i, j, w in self.edges]}


def _check_edge(edge, n: int, k: int) -> Edge:
    try:
        i, j, w = edge
    except (TypeError, ValueError):
        raise GraphError(f"edge {k}: expected [i, j, w], got {edge!r}") from None
    if isinstance(i, bool) or isinstance(j, bool) or int(i) != i or int(j) != j:
        raise GraphError(f"edge {k}: vertex labels must be integers")
    i, j = int(i), int(j)
    if not (0 <= i < n and 0 <= j < n):
        raise GraphError(f"edge {k}: vertex out of range 0..{n - 1}")
    if i == j:
        raise GraphError(f"edge {k}: self-loop at vertex {i}")
    try:
        w = float(w)
    except (TypeError, ValueError):
        raise GraphError(f"edge {k}: weight is not a number") from None
    if not math.isfinite(w):
        raise GraphError(f"edge {k}: weight must be finite")
    return i, j, w


def laplacian(g: WeightedGraph) -> np.ndarray:
    L = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        L[i, j] -= w
        L[j, i] -= w
        L[i, i] += w
        L[j, j] += w
    return L


def cost_matrix(g: WeightedGraph) -> np.ndarray:
    """Cost matrix ``L/4`` of the max-cut SDP."""
    return 0.25 * laplacian(g)


def signed_graph(g: WeightedGraph, x: Sequence[int]) -> WeightedGraph:
    """Graph with weights ``-x_i x_j w_ij``, the gauge used by rank-1 certificates."""
    return WeightedGraph(g.n, tuple((i, j, -x[i] * x[j] * w) for i, j, w in g.edges))


# --------------------------------------------------------------------------
# clique sums


@dataclass(frozen=True)
class CliqueSumSpec:
    g1: WeightedGraph
    g2: WeightedGraph
    map1: tuple[int, ...]
    map2: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "map1", tuple(int(v) for v in self.map1))
        object.__setattr__(self, "map2", tuple(int(v) for v in self.map2))
        if len(self.map1) != len(self.map2) or len(self.map1) not in (1, 2):
            raise GraphError("clique sums need one or two matched vertices on each side")
        for g, mp, name in ((self.g1, self.map1, "map1"), (self.g2, self.map2, "map2")):
            if len(set(mp)) != len(mp):
                raise GraphError(f"{name} repeats a vertex")
            if any(not 0 <= v < g.n for v in mp):
                raise GraphError(f"{name} vertex out of range")
            if len(mp) == 2 and g.weight(*mp) is None:
                raise GraphError(f"{name} vertices {mp} are not adjacent")


@dataclass(frozen=True)
class CliqueSum:
    """Result of a clique sum plus the vertex relabelling of both inputs."""

    graph: WeightedGraph
    relabel1: tuple[int, ...]
    relabel2: tuple[int, ...]
    shared: tuple[int, ...] = field(default=())


def _glue(spec: CliqueSumSpec) -> CliqueSum:
    g1, g2, k = spec.g1, spec.g2, len(spec.map1)
    # g1: unmatched vertices keep their relative order, matched ones go last
    rest1 = [v for v in range(g1.n) if v not in spec.map1]
    relabel1 = [0] * g1.n
    for new, v in enumerate(rest1):
        relabel1[v] = new
    base = g1.n - k
    for t, v in enumerate(spec.map1):
        relabel1[v] = base + t
    # g2: matched vertices land on g1's images, the rest follow in order
    relabel2 = [0] * g2.n
    for t, v in enumerate(spec.map2):
        relabel2[v] = base + t
    rest2 = [v for v in range(g2.n) if v not in spec.map2]
    for off, v in enumerate(rest2):
        relabel2[v] = g1.n + off

    edges = [(relabel1[i], relabel1[j], w) for i, j, w in g1.edges]
    shared_pair = None
    if k == 2:
        a, b = relabel1[spec.map1[0]], relabel1[spec.map1[1]]
        shared_pair = (min(a, b), max(a, b))
    for i, j, w in g2.edges:
        a, b = relabel2[i], relabel2[j]
        if shared_pair is not None and (min(a, b), max(a, b)) == shared_pair:
            continue
        edges.append((a, b, w))
    graph = WeightedGraph(g1.n + g2.n - k, tuple(edges))
    return CliqueSum(graph, tuple(relabel1), tuple(relabel2), tuple(range(base, g1.n)))


def vertex_sum(spec: CliqueSumSpec) -> CliqueSum:
    """Glue ``g1`` and ``g2`` at one vertex.

    The glued vertex becomes index ``n1 - 1``; the other ``g1`` vertices keep
    their order in front of it and the other ``g2`` vertices follow it.
    """
    if len(spec.map1) != 1:
        raise GraphError("vertex sum needs exactly one matched vertex")
    return _glue(spec)


def edge_sum(spec: CliqueSumSpec) -> CliqueSum:
    """Glue ``g1`` and ``g2`` along one edge whose weight must agree in both."""
    if len(spec.map1) != 2:
        raise GraphError("edge sum needs exactly two matched vertices")
    w1 = spec.g1.weight(*spec.map1)
    w2 = spec.g2.weight(*spec.map2)
    if w1 != w2:
        raise GraphError(f"shared edge weight differs: {w1} vs {w2}")
    return _glue(spec)


# --------------------------------------------------------------------------
# named graphs


def complete_graph(k: int) -> WeightedGraph:
    return WeightedGraph(k, tuple((i, j, 1.0) for i in range(k) for j in range(i + 1, k)))


def cycle_graph(k: int) -> WeightedGraph:
    if k < 3:
        raise GraphError("cycles need at least 3 vertices")
    return WeightedGraph(k, tuple((i, (i + 1) % k, 1.0) for i in range(k)))


def _butterfly() -> WeightedGraph:
    return vertex_sum(CliqueSumSpec(complete_graph(3), complete_graph(3), (2,), (0,))).graph


def _fish() -> WeightedGraph:
    return vertex_sum(CliqueSumSpec(complete_graph(3), cycle_graph(4), (2,), (0,))).graph


def _diamond() -> WeightedGraph:
    return edge_sum(CliqueSumSpec(complete_graph(3), complete_graph(3), (1, 2), (0, 1))).graph


_FIXED = {
    "k3": lambda: complete_graph(3),
    "c4": lambda: cycle_graph(4),
    "c5": lambda: cycle_graph(5),
    "c6": lambda: cycle_graph(6),
    "diamond": _diamond,
    "butterfly": _butterfly,
    "fish": _fish,
}

TABLE_GRAPHS = ("k3", "c4", "diamond", "c5", "butterfly", "c6", "fish")


def named_graph(name: str, weights: Sequence[float] | None = None) -> WeightedGraph:
    """Build a named topology: ``k3 c4 c5 c6 diamond butterfly fish`` or ``kN`` / ``cN``.

    Cycle edges are ``(i, i+1 mod n)`` in index order, clique edges are
    lexicographic. ``weights`` follows that edge order; all ones by default.
    """
    key = name.strip().lower()
    if key in _FIXED:
        g = _FIXED[key]()
    elif key[:1] in ("k", "c") and key[1:].isdigit():
        k = int(key[1:])
        g = complete_graph(k) if key[0] == "k" else cycle_graph(k)
    else:
        raise GraphError(f"unknown graph name {name!r}")
    if weights is not None:
        g = g.with_weights(weights)
    return g


# --------------------------------------------------------------------------
# JSON


def _edge_lines(text: str) -> list[int]:
    """Line number of each element of the top-level ``"edges"`` array."""
    pos = text.find('"edges"')
    if pos < 0:
        return []
    start = text.find("[", pos)
    if start < 0:
        return []
    lines, depth, in_str, esc = [], 0, False, False
    for k in range(start, len(text)):
        ch = text[k]
        if in_str:
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
        elif ch == "[":
            depth += 1
            if depth == 2:
                lines.append(text.count("\n", 0, k) + 1)
        elif ch == "]":
            depth -= 1
            if depth == 0:
                break
    return lines


def graph_from_json_text(text: str, source: str = "<string>") -> WeightedGraph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"{source}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise GraphError(f'{source}: expected an object with "n" and "edges"')
    n, edges = obj["n"], obj["edges"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise GraphError(f'{source}: "n" must be a positive integer')
    if not isinstance(edges, list):
        raise GraphError(f'{source}: "edges" must be a list')
    lines = _edge_lines(text)
    seen: dict[tuple[int, int], int] = {}
    checked = []
    for k, edge in enumerate(edges):
        where = f"{source}:{lines[k]}" if k < len(lines) else source
        try:
            i, j, w = _check_edge(edge, n, k)
        except GraphError as exc:
            raise GraphError(f"{where}: {exc}") from None
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"{where}: edge {k}: duplicate of edge {seen[key]} {key}")
        seen[key] = k
        checked.append((i, j, w))
    return WeightedGraph(n, tuple(checked))


def read_graph(path: str | Path) -> WeightedGraph:
    path = Path(path)
    return graph_from_json_text(path.read_text(encoding="utf-8"), str(path))


def graph_to_json(g: WeightedGraph) -> str:
    return json.dumps(g.to_json_obj())
