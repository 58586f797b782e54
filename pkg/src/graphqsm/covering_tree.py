"""Exact finite-depth model of the universal covering tree of a multigraph.

A vertex of the covering tree is a reduced path of directed edges starting at
the base vertex (the empty path is the lifted base point). A boundary cylinder
is a nonempty such path, standing for every ray that extends it. Elements of
the fundamental group are reduced words in signed generator indices
``+-1 .. +-g``; each generator is realized by a closed reduced loop at the base
vertex built from a spanning tree, and the group acts on the tree by
prepending that loop and cancelling backtracks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .errors import InsufficientDepthError, SizeLimitError
from .multigraph import Multigraph
from .nonbacktracking import DirectedEdgeSet

__all__ = [
    "Path",
    "Word",
    "SpanningTreeData",
    "CoveringTree",
    "FixedPointReport",
    "generators_from_spanning_tree",
    "free_reduce",
    "invert_word",
    "word_product",
    "enumerate_words",
    "fixed_point_density_check",
    "MAX_DENSITY_DEPTH",
    "MAX_DENSITY_WORDLEN",
]

Path = Tuple[int, ...]
Word = Tuple[int, ...]

MAX_DENSITY_DEPTH = 8
MAX_DENSITY_WORDLEN = 6


def free_reduce(letters: Sequence[int]) -> Word:
    out: List[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def word_product(*words: Sequence[int]) -> Word:
    return free_reduce([x for w in words for x in w])


def enumerate_words(rank: int, max_length: int, min_length: int = 0) -> List[Word]:
    """All reduced words up to ``max_length``, by length then letter order ``1,-1,2,-2,..``."""
    letters = [s * i for i in range(1, rank + 1) for s in (1, -1)]
    out: List[Word] = []
    layer: List[Word] = [()]
    for length in range(max_length + 1):
        if length >= min_length:
            out.extend(layer)
        layer = [w + (x,) for w in layer for x in letters if not w or w[-1] != -x]
    return out


@dataclass(frozen=True)
class SpanningTreeData:
    """BFS spanning tree (file order) and the generators it induces.

    ``generator_edges[i]`` is the undirected edge index of generator ``i + 1``,
    oriented as listed in the graph file; ``generators[i]`` is its closed
    reduced loop at the base vertex.
    """

    base: int
    tree_edges: FrozenSet[int]
    generator_edges: Tuple[int, ...]
    tree_paths: Tuple[Path, ...]
    generators: Tuple[Path, ...]

    @property
    def rank(self) -> int:
        return len(self.generator_edges)


def _inverse_path(path: Sequence[int]) -> Path:
    return tuple(e ^ 1 for e in reversed(path))


def _reduce_path(edges: Sequence[int]) -> Path:
    out: List[int] = []
    for e in edges:
        if out and out[-1] == e ^ 1:
            out.pop()
        else:
            out.append(e)
    return tuple(out)


def _lcp(a: Sequence[int], b: Sequence[int]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def generators_from_spanning_tree(graph: Multigraph, base: Optional[str] = None) -> SpanningTreeData:
    graph.require_admissible(min_betti=0)
    des = DirectedEdgeSet(graph)
    b = graph.vertex_index[base] if base is not None else 0
    paths: Dict[int, Path] = {b: ()}
    tree = set()
    queue = deque([b])
    while queue:
        v = queue.popleft()
        for e in des.out_edges[v]:
            w = des.terminus[e]
            if w not in paths:
                paths[w] = paths[v] + (e,)
                tree.add(e >> 1)
                queue.append(w)
    gen_edges = tuple(k for k in range(graph.n_edges) if k not in tree)
    gens = []
    for k in gen_edges:
        e = 2 * k
        loop = paths[des.origin[e]] + (e,) + _inverse_path(paths[des.terminus[e]])
        gens.append(_reduce_path(loop))
    return SpanningTreeData(
        base=b,
        tree_edges=frozenset(tree),
        generator_edges=gen_edges,
        tree_paths=tuple(paths[v] for v in range(graph.n_vertices)),
        generators=tuple(gens),
    )


class CoveringTree:
    """Universal covering tree of an admissible graph, rooted at a lift of ``base``."""

    def __init__(self, graph: Multigraph, base: Optional[str] = None):
        graph.require_admissible(min_betti=2)
        self.graph = graph
        self.edges = DirectedEdgeSet(graph)
        self.spanning = generators_from_spanning_tree(graph, base)
        self.base = self.spanning.base
        self._gen_of_edge = {k: i + 1 for i, k in enumerate(self.spanning.generator_edges)}
        self._partitions: Dict[int, List[Path]] = {}
        self._ext_counts: Dict[int, Tuple[int, ...]] = {0: (1,) * len(self.edges)}

    def __repr__(self) -> str:
        return f"CoveringTree(|V|={self.graph.n_vertices}, |E|={self.graph.n_edges}, rank={self.rank})"

    @property
    def rank(self) -> int:
        return self.spanning.rank

    # paths and vertices

    def vertex_of(self, path: Path) -> int:
        """Graph vertex under the tree vertex ``path``."""
        return self.edges.terminus[path[-1]] if path else self.base

    def children(self, path: Path) -> Tuple[int, ...]:
        if not path:
            return self.edges.out_edges[self.base]
        return self.edges.continuations[path[-1]]

    def is_tree_vertex(self, path: Sequence[int]) -> bool:
        at = self.base
        prev = None
        for e in path:
            if not 0 <= e < len(self.edges) or self.edges.origin[e] != at:
                return False
            if prev is not None and e == prev ^ 1:
                return False
            at = self.edges.terminus[e]
            prev = e
        return True

    def reduce(self, edges: Sequence[int]) -> Path:
        return _reduce_path(edges)

    def inverse_path(self, path: Sequence[int]) -> Path:
        return _inverse_path(path)

    def extensions(self, path: Path, depth: int) -> List[Path]:
        """All reduced extensions of ``path`` to length ``depth`` (``path`` itself if shorter)."""
        layer = [tuple(path)]
        for _ in range(len(path), depth):
            layer = [p + (e,) for p in layer for e in self.children(p)]
        return layer

    def partition(self, depth: int) -> List[Path]:
        """The depth-``depth`` cylinders, a partition of the boundary; cached."""
        if depth not in self._partitions:
            self._partitions[depth] = self.extensions((), depth)
        return self._partitions[depth]

    def count_extensions(self, path: Path, depth: int) -> int:
        """Number of reduced extensions of ``path`` to length ``depth``."""
        extra = depth - len(path)
        if extra <= 0:
            return 1
        if not path:
            return sum(self._counts(extra - 1)[e] for e in self.edges.out_edges[self.base])
        return self._counts(extra)[path[-1]]

    def _counts(self, j: int) -> Tuple[int, ...]:
        if j not in self._ext_counts:
            prev = self._counts(j - 1)
            self._ext_counts[j] = tuple(
                sum(prev[f] for f in nxt) for nxt in self.edges.continuations
            )
        return self._ext_counts[j]

    def vertices_within(self, radius: int) -> Iterator[Path]:
        layer: List[Path] = [()]
        for _ in range(radius + 1):
            yield from layer
            layer = [p + (e,) for p in layer for e in self.children(p)]

    # group action

    @lru_cache(maxsize=None)
    def realize(self, word: Word) -> Path:
        """Reduced closed loop at the base vertex representing ``word``."""
        gens = self.spanning.generators
        edges: List[int] = []
        for x in word:
            if x == 0 or abs(x) > self.rank:
                raise ValueError(f"letter {x} out of range for rank {self.rank}")
            loop = gens[abs(x) - 1]
            edges.extend(loop if x > 0 else _inverse_path(loop))
        return _reduce_path(edges)

    def deck_apply(self, word: Word, v: Path) -> Path:
        return _reduce_path(self.realize(tuple(word)) + tuple(v))

    def orbit_point(self, word: Word) -> Path:
        """The tree vertex ``word . x0``."""
        return self.realize(tuple(word))

    # metric

    @staticmethod
    def distance(v1: Path, v2: Path) -> int:
        k = _lcp(v1, v2)
        return len(v1) + len(v2) - 2 * k

    def busemann(self, x1: Path, x2: Path, cylinder: Path) -> int:
        """``lim d(x1, x3) - d(x2, x3)`` as ``x3`` runs out to any ray in ``cylinder``.

        Raises :class:`InsufficientDepthError` when the cylinder does not pin
        down where the geodesics from ``x1`` or ``x2`` join the ray.
        """
        total = 0
        for x, sign in ((x1, 1), (x2, -1)):
            k = _lcp(x, cylinder)
            if k == len(cylinder) < len(x):
                raise InsufficientDepthError(
                    f"cylinder of depth {len(cylinder)} too shallow for a point at depth {len(x)}"
                )
            total += sign * (len(x) - 2 * k)
        return total

    def busemann_cocycle(self, word: Word, cylinder: Path) -> int:
        """``B(x0, word . x0, xi)`` for rays ``xi`` in ``cylinder``."""
        return self.busemann((), self.orbit_point(tuple(word)), cylinder)

    # translation lengths and axes

    def axis_decomposition(self, word: Word) -> Tuple[Path, Path]:
        """Split the loop of ``word`` as ``p c p^-1`` with ``c`` cyclically reduced."""
        loop = self.realize(tuple(word))
        k = 0
        while 2 * k + 1 < len(loop) and loop[k] == loop[len(loop) - 1 - k] ^ 1:
            k += 1
        return loop[:k], loop[k:len(loop) - k]

    def translation_length(self, word: Word) -> Tuple[int, Optional[Path]]:
        """``(am, axis_cycle)``: displacement along the axis and one period of it."""
        _, cycle = self.axis_decomposition(word)
        if not cycle:
            return 0, None
        return len(cycle), cycle

    def min_displacement(self, word: Word, radius: Optional[int] = None) -> int:
        """Brute-force ``min d(v, word . v)`` over tree vertices within ``radius`` of ``x0``.

        The default radius is half the displacement of ``x0``, which always
        reaches the axis.
        """
        loop = self.realize(tuple(word))
        if radius is None:
            radius = (len(loop) + 1) // 2
        return min(self.distance(v, self.deck_apply(word, v)) for v in self.vertices_within(radius))

    def axis_ray(self, word: Word, length: int) -> Path:
        """First ``length`` edges of the ray from ``x0`` to the attracting fixed point of ``word``."""
        prefix, cycle = self.axis_decomposition(word)
        if not cycle:
            raise ValueError("the identity has no fixed points on the boundary")
        ray = list(prefix)
        while len(ray) < length:
            ray.extend(cycle)
        return tuple(ray[:length])

    # boundary action

    def image_pieces(self, word: Word, cylinder: Path) -> List[Path]:
        """``word . cylinder`` as a disjoint union of cylinders, refining only where needed."""
        return self._image(self.realize(tuple(word)), tuple(cylinder))

    def _image(self, loop: Path, cylinder: Path) -> List[Path]:
        c = 0
        n = len(loop)
        while c < n and c < len(cylinder) and loop[n - 1 - c] == cylinder[c] ^ 1:
            c += 1
        if c < len(cylinder):
            return [loop[:n - c] + cylinder[c:]]
        out: List[Path] = []
        for e in self.children(cylinder):
            out.extend(self._image(loop, cylinder + (e,)))
        return out

    def boundary_image_cylinder(self, word: Word, cylinder: Path,
                                out_depth: Optional[int] = None) -> Tuple[Path, ...]:
        """``word . cylinder`` as a sorted tuple of disjoint depth-``out_depth`` cylinders.

        With ``out_depth=None`` the smallest depth that needs no truncation is used.
        """
        pieces = self.image_pieces(word, cylinder)
        if out_depth is None:
            out_depth = max(len(p) for p in pieces)
        if out_depth < 1:
            raise ValueError("out_depth must be positive")
        result = set()
        groups: Dict[Path, List[Path]] = {}
        for p in pieces:
            if len(p) <= out_depth:
                result.update(self.extensions(p, out_depth))
            else:
                groups.setdefault(p[:out_depth], []).append(p)
        for q, members in groups.items():
            deepest = max(len(p) for p in members)
            covered = sum(self.count_extensions(p, deepest) for p in members)
            if covered != self.count_extensions(q, deepest):
                raise InsufficientDepthError(
                    f"image is not a union of depth-{out_depth} cylinders; increase out_depth"
                )
            result.add(q)
        return tuple(sorted(result))

    # Cayley coding

    def cayley_encode(self, path: Path) -> Word:
        """Signed generator letters for the non-tree edges crossed by ``path``."""
        out = []
        for e in path:
            g = self._gen_of_edge.get(e >> 1)
            if g is not None:
                out.append(-g if e & 1 else g)
        return free_reduce(out)

    def cayley_path(self, word: Word) -> Path:
        """Tree cylinder equal to the set of rays whose Cayley code starts with ``word``.

        This is the loop of ``word`` cut just after its last non-tree edge.
        """
        loop = self.realize(tuple(word))
        if not word:
            return ()
        last = max(i for i, e in enumerate(loop) if (e >> 1) in self._gen_of_edge)
        return loop[:last + 1]

    def cayley_decompose(self, path: Path) -> List[Word]:
        """Express the tree cylinder ``path`` as a disjoint union of Cayley cylinders."""
        path = tuple(path)
        if path and (path[-1] >> 1) in self._gen_of_edge:
            return [self.cayley_encode(path)]
        out: List[Word] = []
        for e in self.children(path):
            out.extend(self.cayley_decompose(path + (e,)))
        return out

    # serialization

    def path_to_json(self, path: Path) -> List[List]:
        return [list(self.edges.label(e)) for e in path]

    def path_from_json(self, data: Sequence[Sequence]) -> Path:
        path = tuple(self.edges.from_label(edge_id, int(d)) for edge_id, d in data)
        if not self.is_tree_vertex(path):
            raise ValueError("not a reduced path from the base vertex")
        return path


@dataclass
class FixedPointReport:
    depth: int
    maxlen: int
    n_cylinders: int
    periodic_witness: Dict[Path, Word] = field(default_factory=dict)
    aperiodic_witness: Dict[Path, Path] = field(default_factory=dict)
    missing_periodic: List[Path] = field(default_factory=list)
    missing_aperiodic: List[Path] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing_periodic and not self.missing_aperiodic

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "maxlen": self.maxlen,
            "n_cylinders": self.n_cylinders,
            "periodic_found": len(self.periodic_witness),
            "aperiodic_found": len(self.aperiodic_witness),
            "missing_periodic": [list(p) for p in self.missing_periodic],
            "missing_aperiodic": [list(p) for p in self.missing_aperiodic],
            "ok": self.ok,
        }


def _aperiodic_ray(tree: CoveringTree, prefix: Path, length: int) -> Path:
    # branch choice 1 exactly at triangular steps, 0 otherwise: never eventually periodic
    ray = list(prefix)
    step, next_tri, gap = 0, 0, 1
    while len(ray) < length:
        choices = tree.children(tuple(ray))
        if step == next_tri:
            pick = 1
            gap += 1
            next_tri += gap
        else:
            pick = 0
        ray.append(choices[pick % len(choices)])
        step += 1
    return tuple(ray)


def fixed_point_density_check(graph: Multigraph, depth: int, maxlen: int) -> FixedPointReport:
    """Witness density of boundary fixed points and of their complement, cylinder by cylinder.

    For every depth-``depth`` cylinder look for (1) a nontrivial word of length
    at most ``maxlen`` whose attracting fixed point lies in the cylinder and
    (2) a ray in the cylinder fixed by no nontrivial word of length at most
    ``maxlen``. Missing witnesses are reported, not raised.
    """
    if depth > MAX_DENSITY_DEPTH or maxlen > MAX_DENSITY_WORDLEN or depth < 0 or maxlen < 1:
        raise SizeLimitError(
            f"density check limited to depth <= {MAX_DENSITY_DEPTH}, maxlen <= {MAX_DENSITY_WORDLEN}"
        )
    tree = CoveringTree(graph)
    cylinders = tree.partition(depth)
    words = enumerate_words(tree.rank, maxlen, min_length=1)
    report = FixedPointReport(depth, maxlen, len(cylinders))

    by_prefix: Dict[Path, Word] = {}
    for w in words:
        by_prefix.setdefault(tree.axis_ray(w, depth), w)
    for c in cylinders:
        if c in by_prefix:
            report.periodic_witness[c] = by_prefix[c]
        else:
            report.missing_periodic.append(c)

    longest = max(len(tree.realize(w)) for w in words)
    horizon = depth + 4 * longest + 16
    fixed_rays = [tree.axis_ray(w, horizon) for w in words]
    for c in cylinders:
        ray = _aperiodic_ray(tree, c, horizon)
        if all(ray != f for f in fixed_rays):
            report.aperiodic_witness[c] = ray
        else:
            report.missing_aperiodic.append(c)
    return report

