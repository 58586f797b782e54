"""Patterson-Sullivan measures on boundary cylinders.

The measure of a cylinder of depth ``n`` ending in directed edge ``e`` is
``r(e) / (Z * lam**(n-1))`` where ``(lam, r)`` is the Perron data of the
Bass-Hashimoto operator and ``Z`` sums ``r`` over edges leaving the root.
Since ``T r = lam r``, each cylinder's mass equals the sum over its children.
A measure may be rooted at any tree vertex; cylinders are always given as
paths from the lifted base point ``x0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .covering_tree import CoveringTree, Path, Word, _lcp, invert_word
from .errors import InsufficientDepthError
from .nonbacktracking import PerronData, bass_hashimoto, perron_root

__all__ = [
    "PSMeasure",
    "ps_cylinder_measure",
    "conformality_residual",
    "conformality_sweep",
    "ConformalitySweep",
    "basepoint_rn_check",
    "mass_deviation",
    "exponent_witness",
]


class PSMeasure:
    """Patterson-Sullivan measure of ``tree`` seen from the tree vertex ``base``."""

    def __init__(self, tree: CoveringTree, base: Path = (), perron: Optional[PerronData] = None):
        if not tree.is_tree_vertex(base):
            raise ValueError("base point must be a reduced path from x0")
        self.tree = tree
        self.base = tuple(base)
        self.perron = perron if perron is not None else perron_root(bass_hashimoto(tree.graph))
        self.lam = self.perron.lam
        root = tree.vertex_of(self.base)
        self.normalization = float(sum(self.perron.vector[e] for e in tree.edges.out_edges[root]))

    @property
    def delta(self) -> float:
        return self.perron.delta

    def rebased(self, base: Path) -> "PSMeasure":
        return PSMeasure(self.tree, base, self.perron)

    def _seen_from_base(self, cylinder: Path) -> Tuple[int, int]:
        # (length of the cylinder seen from self.base, its last edge); needs
        # the geodesic from the base to leave the base's own path first
        c = _lcp(self.base, cylinder)
        return len(self.base) + len(cylinder) - 2 * c, cylinder[-1]

    def __call__(self, cylinder: Path) -> float:
        cylinder = tuple(cylinder)
        if not cylinder:
            raise InsufficientDepthError("depth-0 cylinder has no measure formula; total mass is 1")
        if _lcp(self.base, cylinder) == len(cylinder):
            # the base sits inside the cylinder's own path: split into children
            return sum(self(cylinder + (e,)) for e in self.tree.children(cylinder))
        n, last = self._seen_from_base(cylinder)
        return float(self.perron.vector[last]) / (self.normalization * self.lam ** (n - 1))

    def masses(self, depth: int) -> np.ndarray:
        """Masses of the depth-``depth`` partition, in :meth:`CoveringTree.partition` order."""
        if self.base == ():
            cyl = self.tree.partition(depth)
            last = np.fromiter((c[-1] for c in cyl), dtype=np.int64, count=len(cyl))
            return self.perron.vector[last] / (self.normalization * self.lam ** (depth - 1))
        return np.array([self(c) for c in self.tree.partition(depth)])


def ps_cylinder_measure(m: PSMeasure, cylinder: Path) -> float:
    return m(cylinder)


def mass_deviation(m: PSMeasure, depth: int) -> float:
    """``|sum of depth-k masses - 1|``."""
    return abs(float(np.sum(m.masses(depth))) - 1.0)


def _scaling(m: PSMeasure, b: int, beta: Optional[float]) -> float:
    if beta is None:
        return m.lam ** b
    return math.exp(beta * b)


def _scaled_mass(m: PSMeasure, x2: Path, cylinder: Path, beta: Optional[float]) -> float:
    """``integral over cylinder of exp(beta * B(x0, x2, .)) dmu``, refining where B varies."""
    k = _lcp(x2, cylinder)
    if k == len(cylinder) < len(x2):
        return sum(_scaled_mass(m, x2, cylinder + (e,), beta) for e in m.tree.children(cylinder))
    b = m.tree.busemann((), x2, cylinder)
    return _scaling(m, b, beta) * m(cylinder)


def conformality_residual(m: PSMeasure, word: Word, cylinder: Path,
                          beta: Optional[float] = None) -> float:
    """``|mu(w C) - integral_C exp(beta B(x0, w^-1 x0, .)) dmu|``.

    ``beta=None`` uses the critical exponent, evaluated as an exact integer
    power of ``lam``. When ``B`` is not constant on ``C`` the integral is
    taken over the refinement on which it is.
    """
    if m.base != ():
        raise ValueError("conformality is stated for the measure based at x0")
    word = tuple(word)
    cylinder = tuple(cylinder)
    if not word:
        return 0.0
    image = m.tree.image_pieces(word, cylinder)
    lhs = sum(m(p) for p in image)
    x2 = m.tree.deck_apply(invert_word(word), ())
    rhs = _scaled_mass(m, x2, cylinder, beta)
    return abs(lhs - rhs)


@dataclass
class ConformalitySweep:
    max_residual: float
    n_checked: int
    worst: List[dict]

    def to_dict(self) -> dict:
        return {"max_residual": self.max_residual, "n_checked": self.n_checked, "worst": self.worst}


def conformality_sweep(m: PSMeasure, words: Iterable[Word], max_depth: int,
                       beta: Optional[float] = None, keep: int = 5) -> ConformalitySweep:
    """Conformality residual for every word against every cylinder of depth ``1..max_depth``.

    Cylinders are processed a whole partition at a time: for a word with loop
    ``R`` the cancellation between ``R`` and a cylinder ``C`` is the common
    prefix of ``C`` with the path of ``w^-1 x0``. Rows where that prefix
    swallows ``C`` entirely go through :func:`conformality_residual`.
    """
    tree = m.tree
    r = m.perron.vector
    parts = {}
    for k in range(1, max_depth + 1):
        cyl = tree.partition(k)
        parts[k] = (cyl, np.array(cyl, dtype=np.int64).reshape(len(cyl), k))
    worst: List[Tuple[float, Word, Path]] = []
    max_res = 0.0
    count = 0
    for word in words:
        word = tuple(word)
        if not word:
            continue
        x2 = np.array(tree.deck_apply(invert_word(word), ()), dtype=np.int64)
        rlen = len(x2)
        for k in range(1, max_depth + 1):
            cyl, arr = parts[k]
            span = min(k, rlen)
            eq = arr[:, :span] == x2[:span]
            lcp = np.cumprod(eq, axis=1).sum(axis=1) if span else np.zeros(len(cyl), dtype=np.int64)
            image_len = rlen + k - 2 * lcp
            last = r[arr[:, -1]]
            lhs = last / (m.normalization * m.lam ** (image_len - 1))
            b = 2 * lcp - rlen
            scale = m.lam ** b if beta is None else np.exp(beta * b)
            rhs = scale * last / (m.normalization * m.lam ** (k - 1))
            res = np.abs(lhs - rhs)
            special = np.nonzero(lcp == k)[0]
            for i in special:
                res[i] = conformality_residual(m, word, cyl[i], beta)
            count += len(cyl)
            i = int(np.argmax(res))
            if res[i] > max_res:
                max_res = float(res[i])
            worst.append((float(res[i]), word, cyl[i]))
            worst.sort(key=lambda t: -t[0])
            del worst[keep:]
    return ConformalitySweep(
        max_res,
        count,
        [
            {"word": list(w), "cylinder": tree.path_to_json(c), "residual": v}
            for v, w, c in worst
        ],
    )


def exponent_witness(m: PSMeasure) -> Tuple[Word, Path]:
    """A generator and depth-1 cylinder on which the Busemann cocycle is nonzero."""
    tree = m.tree
    for g in range(1, tree.rank + 1):
        for word in ((g,), (-g,)):
            x2 = tree.deck_apply(invert_word(word), ())
            for c in tree.partition(max(1, len(x2))):
                if tree.busemann((), x2, c) > 0:
                    return word, c
    raise RuntimeError("no witness with positive Busemann value")  # pragma: no cover


def basepoint_rn_check(tree_or_measure, x0p: Path, depth: int) -> float:
    """Max residual of ``mu_x0p(C) = lam^(-B(x0p, x0, C)) mu_x0(C) Z_x0 / Z_x0p``.

    Runs over all depth-``depth`` cylinders; the sign of the exponent follows
    from comparing cylinder lengths seen from the two base points.
    """
    m0 = tree_or_measure if isinstance(tree_or_measure, PSMeasure) else PSMeasure(tree_or_measure)
    tree = m0.tree
    if m0.base != ():
        raise ValueError("reference measure must be based at x0")
    m1 = m0.rebased(tuple(x0p))
    ratio = m0.normalization / m1.normalization
    worst = 0.0
    for c in tree.partition(depth):
        b = tree.busemann(tuple(x0p), (), c)
        predicted = m0.lam ** (-b) * m0(c) * ratio
        worst = max(worst, abs(m1(c) - predicted))
    return worst
