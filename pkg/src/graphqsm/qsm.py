"""Algebraic crossed product of boundary functions by the deck group.

Elements are finite sums ``sum_g f_g mu_g`` where each coefficient ``f_g`` is
locally constant at a common cylinder depth ``k``. The product obeys the
covariance relation ``mu_a f mu_a^-1 = f o a^-1``::

    (f mu_a)(g mu_b) = f * (g o a^-1) mu_ab

The time evolution multiplies the ``g`` term by ``exp(i t c_g)`` with the
Busemann cocycle ``c_g(xi) = B(x0, g x0, xi)``, which satisfies
``c_ab(xi) = c_a(xi) + c_b(a^-1 xi)``; imaginary time ``b`` multiplies it by
``exp(-b c_g)`` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from .boundary_measure import PSMeasure
from .covering_tree import CoveringTree, Path, Word, free_reduce, invert_word, word_product
from .errors import DepthOverflowError
from .nonbacktracking import PerronData, bass_hashimoto, perron_root

__all__ = [
    "CrossedProduct",
    "CPElement",
    "TimeParameter",
    "cp_multiply",
    "time_evolve",
    "kms_state",
    "kms_residual",
    "kms_witness_pair",
]

Coefficient = Union[complex, float, np.ndarray, Callable[[Path], complex]]


class CrossedProduct:
    """Context for elements over one covering tree: partitions, caches and bounds."""

    def __init__(self, tree: CoveringTree, perron: Optional[PerronData] = None,
                 max_depth: int = 14, max_word_length: int = 4):
        self.tree = tree
        self.perron = perron if perron is not None else perron_root(bass_hashimoto(tree.graph))
        self.max_depth = max_depth
        self.max_word_length = max_word_length
        self._index: Dict[int, Dict[Path, int]] = {}
        self._parent: Dict[Tuple[int, int], np.ndarray] = {}
        self._pullback: Dict[Tuple[Word, int, int], np.ndarray] = {}
        self._cocycle: Dict[Tuple[Word, int], np.ndarray] = {}

    @property
    def lam(self) -> float:
        return self.perron.lam

    @property
    def delta(self) -> float:
        return self.perron.delta

    # partitions

    def partition(self, depth: int):
        if depth > self.max_depth:
            raise DepthOverflowError(f"depth {depth} exceeds the configured bound {self.max_depth}")
        return self.tree.partition(depth)

    def size(self, depth: int) -> int:
        return len(self.partition(depth))

    def index(self, depth: int) -> Dict[Path, int]:
        if depth not in self._index:
            self._index[depth] = {c: i for i, c in enumerate(self.partition(depth))}
        return self._index[depth]

    def parent_index(self, depth: int, coarse: int) -> np.ndarray:
        """For each depth-``depth`` cylinder, the index of its depth-``coarse`` prefix."""
        key = (depth, coarse)
        if key not in self._parent:
            idx = self.index(coarse)
            self._parent[key] = np.fromiter(
                (idx[c[:coarse]] for c in self.partition(depth)), dtype=np.int64
            )
        return self._parent[key]

    def word_radius(self, word: Word) -> int:
        """``d(x0, word x0)``."""
        return len(self.tree.realize(tuple(word)))

    def required_depth(self, words: Iterable[Word]) -> int:
        return max([1] + [self.word_radius(w) + 1 for w in words])

    def cocycle(self, word: Word, depth: int) -> np.ndarray:
        """``B(x0, word x0, C)`` on the depth-``depth`` partition (integers)."""
        key = (word, depth)
        if key not in self._cocycle:
            orbit = self.tree.realize(word)
            self._cocycle[key] = np.fromiter(
                (self.tree.busemann((), orbit, c) for c in self.partition(depth)), dtype=np.int64
            )
        return self._cocycle[key]

    def pullback_index(self, word: Word, depth: int, source_depth: int) -> np.ndarray:
        """Index map realizing ``g -> g o word^-1`` from depth ``source_depth`` to ``depth``."""
        key = (word, depth, source_depth)
        if key not in self._pullback:
            inv = invert_word(word)
            idx = self.index(source_depth)
            out = np.empty(self.size(depth), dtype=np.int64)
            for i, c in enumerate(self.partition(depth)):
                pieces = self.tree.image_pieces(inv, c)
                if len(pieces) != 1 or len(pieces[0]) < source_depth:
                    raise DepthOverflowError("pullback target depth too shallow")
                out[i] = idx[pieces[0][:source_depth]]
            self._pullback[key] = out
        return self._pullback[key]

    # constructors

    def element(self, terms: Mapping[Word, Coefficient], depth: Optional[int] = None,
                dagger: bool = False) -> "CPElement":
        words = [free_reduce(w) for w in terms]
        if len(set(words)) != len(words):
            raise ValueError("terms repeat a group element")
        need = self.required_depth(words)
        depth = need if depth is None else depth
        if depth < need:
            raise DepthOverflowError(f"depth {depth} below the {need} needed by the support")
        n = self.size(depth)
        out = {}
        for w, (_, coef) in zip(words, terms.items()):
            if callable(coef):
                vals = np.array([coef(c) for c in self.partition(depth)], dtype=complex)
            else:
                vals = np.broadcast_to(np.asarray(coef, dtype=complex), (n,)).copy()
            out[w] = vals
        return CPElement(self, depth, out, dagger)

    def unit(self, depth: int = 1) -> "CPElement":
        return self.element({(): 1.0}, depth)

    def group_element(self, word: Word) -> "CPElement":
        return self.element({tuple(word): 1.0})

    def indicator(self, cylinder: Path, word: Word = (), depth: Optional[int] = None) -> "CPElement":
        """``chi_C mu_word``."""
        cylinder = tuple(cylinder)
        depth = max(depth or 0, len(cylinder), self.required_depth([word]))
        return self.element(
            {tuple(word): lambda c: 1.0 if c[:len(cylinder)] == cylinder else 0.0}, depth
        )

    def random_word(self, rng: np.random.Generator, max_length: int, positive: bool = False) -> Word:
        length = int(rng.integers(0, max_length + 1))
        letters = []
        while len(letters) < length:
            x = int(rng.integers(1, self.tree.rank + 1))
            if not positive and rng.random() < 0.5:
                x = -x
            if letters and letters[-1] == -x:
                continue
            letters.append(x)
        return tuple(letters)

    def random_element(self, rng: np.random.Generator, max_word_length: int = 2,
                       max_terms: int = 3, dagger: bool = False) -> "CPElement":
        """Seeded random element: short words, coefficients in the unit disc."""
        n = 2 * self.tree.rank
        available = 1 + sum(n * (n - 1) ** (k - 1) if not dagger else (n // 2) ** k
                            for k in range(1, max_word_length + 1))
        n_terms = min(int(rng.integers(1, max_terms + 1)), available)
        words = []
        while len(words) < n_terms:
            w = self.random_word(rng, max_word_length, positive=dagger)
            if w not in words:
                words.append(w)
        depth = self.required_depth(words)
        n = self.size(depth)
        terms = {}
        for w in words:
            radius = np.sqrt(rng.random(n))
            angle = rng.random(n) * 2 * np.pi
            terms[w] = radius * np.exp(1j * angle)
        return CPElement(self, depth, terms, dagger)

    def from_json(self, data: Mapping) -> "CPElement":
        depth = int(data["depth"])
        terms = {
            tuple(t["word"]): np.array([complex(re, im) for re, im in t["values"]])
            for t in data["terms"]
        }
        return CPElement(self, depth, terms, bool(data.get("dagger", False)))


class CPElement:
    """Immutable element ``sum_g f_g mu_g`` at a fixed cylinder depth."""

    __slots__ = ("algebra", "depth", "terms", "dagger")

    def __init__(self, algebra: CrossedProduct, depth: int, terms: Mapping[Word, np.ndarray],
                 dagger: bool = False):
        n = algebra.size(depth)
        clean = {}
        for w, v in terms.items():
            w = tuple(w)
            if free_reduce(w) != w:
                raise ValueError(f"word {w} is not freely reduced")
            if len(w) > algebra.max_word_length:
                raise DepthOverflowError(
                    f"word {w} longer than the configured bound {algebra.max_word_length}"
                )
            if dagger and any(x < 0 for x in w):
                raise ValueError(f"dagger element contains the inverse letter in {w}")
            v = np.asarray(v, dtype=complex)
            if v.shape != (n,):
                raise ValueError(f"coefficient for {w} has shape {v.shape}, expected ({n},)")
            v = v.copy()
            v.setflags(write=False)
            clean[w] = v
        if depth < algebra.required_depth(clean):
            raise DepthOverflowError("depth too small for the word support")
        self.algebra = algebra
        self.depth = depth
        self.terms = clean
        self.dagger = dagger

    def __repr__(self) -> str:
        return f"CPElement(depth={self.depth}, words={sorted(self.terms, key=lambda w: (len(w), w))})"

    @property
    def support(self) -> Tuple[Word, ...]:
        return tuple(sorted(self.terms, key=lambda w: (len(w), w)))

    def coefficient(self, word: Word) -> np.ndarray:
        return self.terms.get(tuple(word), np.zeros(self.algebra.size(self.depth), dtype=complex))

    def refine(self, depth: int) -> "CPElement":
        if depth == self.depth:
            return self
        if depth < self.depth:
            raise ValueError("refine only increases depth")
        parent = self.algebra.parent_index(depth, self.depth)
        return CPElement(self.algebra, depth, {w: v[parent] for w, v in self.terms.items()},
                         self.dagger)

    def coarsen(self) -> "CPElement":
        """Same element at the smallest depth that represents it exactly."""
        alg = self.algebra
        need = alg.required_depth(self.terms)
        for d in range(need, self.depth):
            parent = alg.parent_index(self.depth, d)
            coarse = {}
            for w, v in self.terms.items():
                c = np.zeros(alg.size(d), dtype=complex)
                c[parent] = v
                if not np.array_equal(c[parent], v):
                    break
                coarse[w] = c
            else:
                return CPElement(alg, d, coarse, self.dagger)
        return self

    def _binary(self, other: "CPElement", op) -> "CPElement":
        if other.algebra is not self.algebra:
            raise ValueError("elements belong to different algebras")
        d = max(self.depth, other.depth)
        a, b = self.refine(d), other.refine(d)
        n = self.algebra.size(d)
        zero = np.zeros(n, dtype=complex)
        terms = {w: op(a.terms.get(w, zero), b.terms.get(w, zero))
                 for w in set(a.terms) | set(b.terms)}
        return CPElement(self.algebra, d, terms, self.dagger and other.dagger)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return CPElement(self.algebra, self.depth, {w: -v for w, v in self.terms.items()}, self.dagger)

    def __mul__(self, other):
        if isinstance(other, CPElement):
            return cp_multiply(self, other)
        return CPElement(self.algebra, self.depth,
                         {w: v * other for w, v in self.terms.items()}, self.dagger)

    def __rmul__(self, other):
        return self.__mul__(other)

    def distance(self, other: "CPElement") -> float:
        """Max-norm distance between coefficient functions after common refinement."""
        diff = self - other
        return max((float(np.max(np.abs(v))) for v in diff.terms.values()), default=0.0)

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "dagger": self.dagger,
            "terms": [
                {"word": list(w), "values": [[float(z.real), float(z.imag)] for z in self.terms[w]]}
                for w in self.support
            ],
        }


def cp_multiply(a: CPElement, b: CPElement) -> CPElement:
    """Bilinear extension of ``(f mu_s)(g mu_t) = f (g o s^-1) mu_st``."""
    if a.algebra is not b.algebra:
        raise ValueError("elements belong to different algebras")
    alg = a.algebra
    if not a.terms or not b.terms:
        return CPElement(alg, max(a.depth, b.depth), {}, a.dagger and b.dagger)
    depth = max(a.depth, b.depth + max(alg.word_radius(s) for s in a.terms))
    if depth > alg.max_depth:
        raise DepthOverflowError(f"product needs depth {depth} > {alg.max_depth}")
    for s in a.terms:
        for t in b.terms:
            if len(word_product(s, t)) > alg.max_word_length:
                raise DepthOverflowError(
                    f"product word {word_product(s, t)} exceeds length {alg.max_word_length}"
                )
    ar = a.refine(depth)
    out: Dict[Word, np.ndarray] = {}
    for s, f in ar.terms.items():
        for t, g in b.terms.items():
            pulled = g[alg.pullback_index(s, depth, b.depth)]
            w = word_product(s, t)
            val = f * pulled
            out[w] = out[w] + val if w in out else val
    return CPElement(alg, depth, out, a.dagger and b.dagger).coarsen()


@dataclass(frozen=True)
class TimeParameter:
    """Complex time ``t + i b``: real time ``t`` and inverse temperature ``b``."""

    t: float = 0.0
    b: float = 0.0


def time_evolve(a: CPElement, p: Union[TimeParameter, float]) -> CPElement:
    """Apply ``sigma_{t + ib}``: scale the ``g`` term by ``exp(i t c_g) lam^(-(b/delta) c_g)``."""
    if not isinstance(p, TimeParameter):
        p = TimeParameter(float(p), 0.0)
    alg = a.algebra
    out = {}
    for w, v in a.terms.items():
        if not w:
            out[w] = v
            continue
        c = alg.cocycle(w, a.depth).astype(float)
        factor = np.exp(1j * p.t * c)
        if p.b:
            factor = factor * alg.lam ** (-(p.b / alg.delta) * c)
        out[w] = v * factor
    return CPElement(alg, a.depth, out, a.dagger)


def kms_state(a: CPElement, m: PSMeasure) -> complex:
    """``tau(a) = integral of the identity coefficient against mu_x0``."""
    if m.tree is not a.algebra.tree or m.base != ():
        raise ValueError("measure must be based at x0 of the element's tree")
    f = a.terms.get(())
    if f is None:
        return 0j
    return complex(np.dot(f, m.masses(a.depth)))


def kms_residual(a: CPElement, b: CPElement, beta: float, m: PSMeasure) -> float:
    """``|tau(ab) - tau(b sigma_{i beta}(a))|``."""
    lhs = kms_state(cp_multiply(a, b), m)
    rhs = kms_state(cp_multiply(b, time_evolve(a, TimeParameter(0.0, beta))), m)
    return abs(lhs - rhs)


def kms_witness_pair(alg: CrossedProduct, generator: int = 1) -> Tuple[CPElement, CPElement]:
    """``(mu_g, mu_g^-1)`` for a generator ``g``."""
    return alg.group_element((generator,)), alg.group_element((-generator,))
