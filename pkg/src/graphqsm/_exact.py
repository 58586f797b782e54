"""Exact integer and polynomial arithmetic used by the spectral code."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

import numpy as np

Matrix = List[List[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free Gaussian elimination (all divisions exact)."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def charpoly(m: Sequence[Sequence[int]]) -> List[int]:
    """Coefficients of ``det(xI - M)``, lowest degree first (Faddeev-LeVerrier).

    The trace divisions are exact over the integers; arithmetic stays in
    Python ints via object arrays.
    """
    n = len(m)
    a = np.array([[int(x) for x in row] for row in m], dtype=object).reshape(n, n)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = np.zeros((n, n), dtype=object)
    eye = np.arange(n)
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        mk = a.dot(mk)
        mk[eye, eye] += coeffs[n - k + 1]
        tr = (a * mk.T).sum()
        q, r = divmod(-int(tr), k)
        assert r == 0
        coeffs[n - k] = q
    return coeffs


def poly_mul(p: Sequence[int], q: Sequence[int]) -> List[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def poly_pow(p: Sequence[int], k: int) -> List[int]:
    out = [1]
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def poly_eval(p: Sequence[int], x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def interpolate(xs: Sequence[int], ys: Sequence[int]) -> List[Fraction]:
    """Coefficients (lowest first) of the unique polynomial through the points.

    Newton divided differences in exact rational arithmetic.
    """
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    poly[0] = coef[n - 1]
    deg = 0
    for i in range(n - 2, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        new = [Fraction(0)] * n
        for d in range(deg + 1):
            new[d + 1] += poly[d]
            new[d] -= poly[d] * xs[i]
        new[0] += coef[i]
        poly = new
        deg += 1
    return poly


def trim(p: Sequence[int]) -> List[int]:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p
