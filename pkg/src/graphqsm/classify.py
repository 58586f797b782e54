"""Invariant fingerprints, boundary conjugacies between equal-rank graphs, and surveys."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .covering_tree import CoveringTree, Path, Word, free_reduce
from .errors import DepthOverflowError, RankMismatchError
from .ktheory import AbelianGroup, k0_boundary_algebra, theorem1_oracle
from .multigraph import Multigraph, betti, enumerate_multigraphs, isomorphic
from .nonbacktracking import bass_hashimoto, ihara_zeta_recip, perron_root
from .qsm import CPElement, CrossedProduct

__all__ = [
    "Fingerprint",
    "fingerprint",
    "length_spectrum",
    "BoundaryConjugacy",
    "build_conjugacy",
    "algebra_transport",
    "survey",
]

MAX_SPECTRUM_LENGTH = 6


def length_spectrum(graph: Multigraph, max_length: int) -> Tuple[Tuple[int, int], ...]:
    """``(n, count)`` of cyclically reduced closed non-backtracking paths of each length ``n``.

    Every such path is the axis period of a nontrivial conjugacy class, so
    these are translation lengths counted with their loop multiplicity. The
    count is ``trace(T^n)``, independent of any base point or generators.
    """
    if not 1 <= max_length <= MAX_SPECTRUM_LENGTH:
        raise ValueError(f"spectrum length must be in 1..{MAX_SPECTRUM_LENGTH}")
    t = bass_hashimoto(graph).astype(object)
    power = t
    out = []
    for n in range(1, max_length + 1):
        out.append((n, int(np.trace(power))))
        power = power.dot(t)
    return tuple(out)


@dataclass(frozen=True)
class Fingerprint:
    g: int
    k0: AbelianGroup
    unit_order: int
    gcd_invariant: int
    zeta: Tuple[int, ...]
    length_spectrum: Tuple[Tuple[int, int], ...]
    lam: float = field(compare=False)

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "k0": self.k0.to_dict(),
            "unit_order": self.unit_order,
            "gcd_invariant": self.gcd_invariant,
            "zeta": list(self.zeta),
            "length_spectrum": [list(p) for p in self.length_spectrum],
            "lambda": self.lam,
        }

    def diff(self, other: "Fingerprint") -> Dict[str, bool]:
        """Field-by-field equality."""
        return {
            "g_equal": self.g == other.g,
            "k0_equal": self.k0 == other.k0 and self.unit_order == other.unit_order,
            "gcd_equal": self.gcd_invariant == other.gcd_invariant,
            "zeta_equal": self.zeta == other.zeta,
            "spectrum_equal": self.length_spectrum == other.length_spectrum,
        }


def fingerprint(graph: Multigraph, L: int = 5) -> Fingerprint:
    graph.require_admissible(min_betti=2)
    g = betti(graph)
    k0, unit = k0_boundary_algebra(g)
    return Fingerprint(
        g=g,
        k0=k0,
        unit_order=unit,
        gcd_invariant=math.gcd(graph.n_edges, g - 1),
        zeta=tuple(ihara_zeta_recip(graph)),
        length_spectrum=length_spectrum(graph, L),
        lam=perron_root(bass_hashimoto(graph)).lam,
    )


def _refine_to(tree: CoveringTree, pieces: Iterable[Path], depth: int) -> set:
    out = set()
    for p in pieces:
        if len(p) >= depth:
            out.add(p)
        else:
            out.update(tree.extensions(p, depth))
    return out


def same_boundary_set(tree: CoveringTree, a: Sequence[Path], b: Sequence[Path]) -> bool:
    """Whether two disjoint cylinder covers describe the same boundary set."""
    depth = max([len(p) for p in a] + [len(p) for p in b] + [1])
    return _refine_to(tree, a, depth) == _refine_to(tree, b, depth)


class BoundaryConjugacy:
    """Cylinder-level boundary homeomorphism induced by a generator pairing.

    A cylinder of X is split into Cayley cylinders (rays whose cut sequence
    of non-tree edges starts with a fixed reduced word); each word is
    relabeled through the pairing and realized as a cylinder of Y.
    """

    def __init__(self, tree_x: CoveringTree, tree_y: CoveringTree, pairing: Sequence[int]):
        if tree_x.rank != tree_y.rank:
            raise RankMismatchError(
                f"no conjugacy between boundaries of rank {tree_x.rank} and {tree_y.rank}"
            )
        pairing = tuple(int(p) for p in pairing)
        if sorted(abs(p) for p in pairing) != list(range(1, tree_x.rank + 1)):
            raise ValueError("pairing must be a signed permutation of the generators")
        self.tree_x = tree_x
        self.tree_y = tree_y
        self.pairing = pairing
        inv = [0] * len(pairing)
        for i, p in enumerate(pairing, start=1):
            inv[abs(p) - 1] = i if p > 0 else -i
        self.inverse_pairing = tuple(inv)

    @staticmethod
    def _relabel(word: Word, table: Sequence[int]) -> Word:
        return free_reduce(table[abs(x) - 1] * (1 if x > 0 else -1) for x in word)

    def map_word(self, word: Word) -> Word:
        return self._relabel(word, self.pairing)

    def inverse_word(self, word: Word) -> Word:
        return self._relabel(word, self.inverse_pairing)

    def image(self, cylinder: Path) -> Tuple[Path, ...]:
        """``Phi(C)`` as disjoint cylinders of Y."""
        words = self.tree_x.cayley_decompose(tuple(cylinder))
        return tuple(sorted(self.tree_y.cayley_path(self.map_word(w)) for w in words))

    def preimage(self, cylinder: Path) -> Tuple[Path, ...]:
        """``Phi^-1(D)`` as disjoint cylinders of X."""
        words = self.tree_y.cayley_decompose(tuple(cylinder))
        return tuple(sorted(self.tree_x.cayley_path(self.inverse_word(w)) for w in words))

    def equivariance_report(self, max_depth: int = 6) -> dict:
        """Compare ``Phi(g_i C)`` with ``sigma(g_i) Phi(C)`` for all cylinders up to ``max_depth``."""
        tx, ty = self.tree_x, self.tree_y
        checked = 0
        violations = []
        for depth in range(1, max_depth + 1):
            for c in tx.partition(depth):
                for i in range(1, tx.rank + 1):
                    for letter in (i, -i):
                        lhs = [d for p in tx.image_pieces((letter,), c) for d in self.image(p)]
                        target = self.map_word((letter,))
                        rhs = [d for p in self.image(c) for d in ty.image_pieces(target, p)]
                        checked += 1
                        if not same_boundary_set(ty, lhs, rhs):
                            violations.append({"generator": letter, "cylinder": tx.path_to_json(c)})
        return {
            "max_depth": max_depth,
            "checked": checked,
            "violations": len(violations),
            "examples": violations[:5],
            "ok": not violations,
        }


def build_conjugacy(gx: Multigraph, gy: Multigraph, pairing: Optional[Sequence[int]] = None,
                    max_depth: int = 6) -> Tuple[BoundaryConjugacy, dict]:
    """Boundary conjugacy for a signed generator pairing (identity by default) and its report."""
    tx, ty = CoveringTree(gx), CoveringTree(gy)
    if tx.rank != ty.rank:
        raise RankMismatchError(f"Betti numbers differ ({tx.rank} != {ty.rank})")
    if pairing is None:
        pairing = tuple(range(1, tx.rank + 1))
    phi = BoundaryConjugacy(tx, ty, pairing)
    return phi, phi.equivariance_report(max_depth)


def algebra_transport(phi: BoundaryConjugacy, a: CPElement, target: CrossedProduct) -> CPElement:
    """``sum f_g mu_g -> sum (f_g o Phi^-1) mu_{sigma(g)}`` at the coarsest exact depth."""
    if a.algebra.tree is not phi.tree_x or target.tree is not phi.tree_y:
        raise ValueError("element and target algebra must match the conjugacy's trees")
    words = {w: phi.map_word(w) for w in a.terms}
    idx = a.algebra.index(a.depth)
    start = target.required_depth(words.values())
    for depth in range(start, target.max_depth + 1):
        parts = target.partition(depth)
        sources = []
        for d in parts:
            pre = _refine_to(phi.tree_x, phi.preimage(d), a.depth)
            cells = {idx[p[:a.depth]] for p in pre}
            if len(cells) != 1:
                break
            sources.append(cells.pop())
        else:
            src = np.array(sources, dtype=np.int64)
            terms = {words[w]: v[src] for w, v in a.terms.items()}
            return CPElement(target, depth, terms, a.dagger)
    raise DepthOverflowError("transported coefficients need more than the configured depth")


def survey(max_vertices: int, max_edges: int, L: int = 5,
           graphs: Optional[Sequence[Multigraph]] = None) -> dict:
    """Pairwise boundary-algebra verdicts, fingerprint equality and isomorphism over an enumerated family."""
    if graphs is None:
        graphs = [g for g in enumerate_multigraphs(max_vertices, max_edges) if betti(g) >= 2]
    prints = [fingerprint(g, L) for g in graphs]
    names = [f"G{i}" for i in range(len(graphs))]
    rows = []
    collisions = []
    for i, j in itertools.combinations(range(len(graphs)), 2):
        fi, fj = prints[i], prints[j]
        d = fi.diff(fj)
        iso = isomorphic(graphs[i], graphs[j]) is not None
        t1 = theorem1_oracle(graphs[i], graphs[j]).verdict
        rows.append({"graphA": names[i], "graphB": names[j], **d, "isomorphic": iso, "theorem1": t1})
        if fi == fj and not iso:
            collisions.append({"graphA": names[i], "graphB": names[j]})
    classes: Dict[int, List[str]] = {}
    for n, f in zip(names, prints):
        classes.setdefault(f.g, []).append(n)
    by_betti = all(r["theorem1"] == r["g_equal"] for r in rows)
    separated = not collisions
    return {
        "bounds": {"max_vertices": max_vertices, "max_edges": max_edges, "L": L},
        "graphs": {n: g.to_dict() for n, g in zip(names, graphs)},
        "theorem1_classes": {str(g): members for g, members in sorted(classes.items())},
        "summary": {
            "n_graphs": len(graphs),
            "n_pairs": len(rows),
            "theorem1_classes_by_betti": by_betti,
            "n_theorem1_classes": len(classes),
            "n_distinct_betti": len({f.g for f in prints}),
            "fingerprints_separate_nonisomorphic": separated,
            "n_collisions": len(collisions),
        },
        "collisions": collisions,
        "pairs": rows,
    }
