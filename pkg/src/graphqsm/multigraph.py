"""Finite multigraphs with loops and parallel edges.

Degrees follow the usual convention for multigraphs: a loop adds two to the
degree of its vertex. A graph is *admissible* when it is connected, nonempty
and every vertex has degree at least three.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .errors import GraphFormatError, InadmissibleGraphError, SizeLimitError

__all__ = [
    "Edge",
    "Multigraph",
    "Isomorphism",
    "parse_multigraph",
    "serialize_multigraph",
    "load_multigraph",
    "betti",
    "isomorphic",
    "enumerate_multigraphs",
    "from_edge_list",
    "theta_graph",
    "dumbbell_graph",
    "complete_graph",
    "rose",
]

MAX_ISO_VERTICES = 10
MAX_ENUM_VERTICES = 5
MAX_ENUM_EDGES = 10


class Edge(NamedTuple):
    id: str
    ends: Tuple[str, str]

    @property
    def is_loop(self) -> bool:
        return self.ends[0] == self.ends[1]


@dataclass(frozen=True)
class Multigraph:
    """An unoriented multigraph; vertex and edge order is significant."""

    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(
            self, "edges", tuple(Edge(e[0], tuple(e[1])) for e in self.edges)
        )
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphFormatError("duplicate vertex ids")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise GraphFormatError("duplicate edge ids")
        known = set(self.vertices)
        for e in self.edges:
            for v in e.ends:
                if v not in known:
                    raise GraphFormatError(
                        f"edge {e.id!r} references unknown vertex {v!r}"
                    )

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def vertex_index(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> Dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def degrees(self) -> Dict[str, int]:
        deg = {v: 0 for v in self.vertices}
        for e in self.edges:
            # a loop lands here twice, contributing 2
            deg[e.ends[0]] += 1
            deg[e.ends[1]] += 1
        return deg

    def degree(self, v: str) -> int:
        return self.degrees[v]

    @property
    def min_degree(self) -> int:
        return min(self.degrees.values()) if self.vertices else 0

    @cached_property
    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            u, v = e.ends
            adj[u].append(v)
            adj[v].append(u)
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self.vertices)

    @property
    def is_admissible(self) -> bool:
        return self.is_connected and self.min_degree >= 3

    def admissibility_problems(self) -> List[str]:
        problems = []
        if not self.vertices:
            problems.append("graph has no vertices")
            return problems
        if not self.is_connected:
            problems.append("graph is disconnected")
        low = [v for v in self.vertices if self.degrees[v] < 3]
        if low:
            problems.append(f"vertices of degree < 3: {', '.join(low)}")
        return problems

    def require_admissible(self, min_betti: int = 2) -> None:
        """Raise :class:`InadmissibleGraphError` unless the graph is usable."""
        problems = self.admissibility_problems()
        if problems:
            raise InadmissibleGraphError("; ".join(problems))
        if betti(self) < min_betti:
            raise InadmissibleGraphError(
                f"first Betti number {betti(self)} < {min_betti}"
            )

    @cached_property
    def multiplicity(self) -> List[List[int]]:
        """Symmetric edge-count matrix; the diagonal counts loops once each."""
        n = self.n_vertices
        idx = self.vertex_index
        m = [[0] * n for _ in range(n)]
        for e in self.edges:
            i, j = idx[e.ends[0]], idx[e.ends[1]]
            m[i][j] += 1
            if i != j:
                m[j][i] += 1
        return m

    def relabel(self, vertex_map: Dict[str, str], edge_map: Optional[Dict[str, str]] = None,
                order: Optional[Sequence[int]] = None) -> "Multigraph":
        """Rename vertices (and optionally edges); optionally permute edge order."""
        edge_map = edge_map or {}
        edges = [
            Edge(edge_map.get(e.id, e.id), (vertex_map[e.ends[0]], vertex_map[e.ends[1]]))
            for e in self.edges
        ]
        if order is not None:
            edges = [edges[i] for i in order]
        return Multigraph(tuple(vertex_map[v] for v in self.vertices), tuple(edges))

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "ends": list(e.ends)} for e in self.edges],
        }


def parse_multigraph(text: str) -> Multigraph:
    """Parse the JSON graph format.

    ``{"vertices": [...], "edges": [{"id": ..., "ends": [u, v]}, ...]}``
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise GraphFormatError("graph document must be a JSON object")
    vertices = data.get("vertices")
    edges = data.get("edges")
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise GraphFormatError('"vertices" must be a list of strings')
    if not isinstance(edges, list):
        raise GraphFormatError('"edges" must be a list')
    parsed = []
    for item in edges:
        if not isinstance(item, dict) or "id" not in item or "ends" not in item:
            raise GraphFormatError(f"malformed edge record: {item!r}")
        ends = item["ends"]
        if (not isinstance(item["id"], str) or not isinstance(ends, list) or len(ends) != 2
                or not all(isinstance(v, str) for v in ends)):
            raise GraphFormatError(f"malformed edge record: {item!r}")
        parsed.append(Edge(item["id"], (ends[0], ends[1])))
    return Multigraph(tuple(vertices), tuple(parsed))


def serialize_multigraph(graph: Multigraph) -> str:
    return json.dumps(graph.to_dict(), indent=2) + "\n"


def load_multigraph(path) -> Multigraph:
    with open(path, encoding="utf-8") as fh:
        return parse_multigraph(fh.read())


def betti(graph: Multigraph) -> int:
    """First Betti number ``|E| - |V| + 1`` of a connected graph."""
    if not graph.is_connected:
        raise InadmissibleGraphError("Betti number requested for a disconnected graph")
    return graph.n_edges - graph.n_vertices + 1


@dataclass(frozen=True)
class Isomorphism:
    vertex_map: Dict[str, str]
    edge_map: Dict[str, str]


def _signature(graph: Multigraph, i: int) -> Tuple[int, int]:
    return (graph.degree(graph.vertices[i]), graph.multiplicity[i][i])


def isomorphic(g: Multigraph, h: Multigraph,
               max_vertices: int = MAX_ISO_VERTICES) -> Optional[Isomorphism]:
    """Search exhaustively for a multiplicity-preserving bijection ``g -> h``.

    Candidate images are restricted to vertices with the same degree and loop
    count. Returns ``None`` when the graphs are not isomorphic.
    """
    if max(g.n_vertices, h.n_vertices) > max_vertices:
        raise SizeLimitError(
            f"isomorphism search limited to {max_vertices} vertices"
        )
    if g.n_vertices != h.n_vertices or g.n_edges != h.n_edges:
        return None
    n = g.n_vertices
    sig_g = [_signature(g, i) for i in range(n)]
    sig_h = [_signature(h, i) for i in range(n)]
    if sorted(sig_g) != sorted(sig_h):
        return None
    mg, mh = g.multiplicity, h.multiplicity
    # most constrained vertices first
    counts = Counter(sig_g)
    order = sorted(range(n), key=lambda i: (counts[sig_g[i]], i))
    assignment: Dict[int, int] = {}
    used = [False] * n

    def extend(pos: int) -> bool:
        if pos == n:
            return True
        i = order[pos]
        for j in range(n):
            if used[j] or sig_h[j] != sig_g[i]:
                continue
            if any(mg[i][k] != mh[j][assignment[k]] for k in assignment):
                continue
            assignment[i] = j
            used[j] = True
            if extend(pos + 1):
                return True
            del assignment[i]
            used[j] = False
        return False

    if not extend(0):
        return None

    vmap = {g.vertices[i]: h.vertices[j] for i, j in assignment.items()}
    buckets: Dict[frozenset, List[str]] = {}
    for e in h.edges:
        buckets.setdefault(frozenset(e.ends), []).append(e.id)
    emap = {}
    for e in g.edges:
        key = frozenset((vmap[e.ends[0]], vmap[e.ends[1]]))
        emap[e.id] = buckets[key].pop(0)
    return Isomorphism(vmap, emap)


def from_edge_list(n_vertices: int, pairs: Iterable[Tuple[int, int]]) -> Multigraph:
    """Build a graph on ``v0..v{n-1}`` with edges ``e0, e1, ...`` in the given order."""
    vertices = tuple(f"v{i}" for i in range(n_vertices))
    edges = tuple(
        Edge(f"e{k}", (f"v{i}", f"v{j}")) for k, (i, j) in enumerate(pairs)
    )
    return Multigraph(vertices, edges)


def theta_graph() -> Multigraph:
    return from_edge_list(2, [(0, 1)] * 3)


def dumbbell_graph() -> Multigraph:
    return from_edge_list(2, [(0, 0), (0, 1), (1, 1)])


def complete_graph(n: int) -> Multigraph:
    return from_edge_list(n, itertools.combinations(range(n), 2))


def rose(g: int) -> Multigraph:
    return from_edge_list(1, [(0, 0)] * g)


def _multiplicity_vectors(n: int, max_edges: int):
    """Yield edge-count assignments over the pairs ``i <= j`` of ``n`` vertices.

    Pairs are filled row by row; a vertex's degree is final once its row is
    done, so rows leaving a vertex below degree 3 are pruned early.
    """
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    last_pair_of_row = {}
    for k, (i, _) in enumerate(pairs):
        last_pair_of_row[i] = k
    counts = [0] * len(pairs)
    deg = [0] * n

    def rec(k: int, remaining: int):
        if k == len(pairs):
            yield list(counts)
            return
        i, j = pairs[k]
        for c in range(remaining + 1):
            counts[k] = c
            if i == j:
                deg[i] += 2 * c
            else:
                deg[i] += c
                deg[j] += c
            if last_pair_of_row[i] != k or deg[i] >= 3:
                yield from rec(k + 1, remaining - c)
            if i == j:
                deg[i] -= 2 * c
            else:
                deg[i] -= c
                deg[j] -= c
        counts[k] = 0

    yield from rec(0, max_edges)
    return pairs


def enumerate_multigraphs(max_vertices: int, max_edges: int) -> List[Multigraph]:
    """All admissible multigraphs up to the given size, one per isomorphism class.

    Output is ordered by vertex count, edge count and then generation order, so
    repeated calls return identical lists.
    """
    if max_vertices > MAX_ENUM_VERTICES or max_edges > MAX_ENUM_EDGES:
        raise SizeLimitError(
            f"enumeration limited to {MAX_ENUM_VERTICES} vertices and {MAX_ENUM_EDGES} edges"
        )
    if max_vertices < 1 or max_edges < 0:
        return []
    found: Dict[Tuple[int, int], List[Tuple[Tuple, Multigraph]]] = {}
    for n in range(1, max_vertices + 1):
        pairs = [(i, j) for i in range(n) for j in range(i, n)]
        for counts in _multiplicity_vectors(n, max_edges):
            m = sum(counts)
            if m == 0:
                continue
            edge_pairs = [p for p, c in zip(pairs, counts) for _ in range(c)]
            graph = from_edge_list(n, edge_pairs)
            if not graph.is_admissible:
                continue
            key = tuple(sorted(_signature(graph, i) for i in range(n)))
            bucket = found.setdefault((n, m), [])
            if any(k == key and isomorphic(graph, other) is not None for k, other in bucket):
                continue
            bucket.append((key, graph))
    out = []
    for n, m in sorted(found):
        out.extend(graph for _, graph in found[(n, m)])
    return out
