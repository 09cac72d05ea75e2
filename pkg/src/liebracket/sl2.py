"""Exact arithmetic in sl2(F_p).

Elements are stored as ``(a11, a12, a21)``; the ``a22`` entry is always
``-a11`` so trace zero holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModulusMismatch, NotGenerating


@dataclass(frozen=True)
class Sl2Element:
    a11: int
    a12: int
    a21: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "a11", self.a11 % self.p)
        object.__setattr__(self, "a12", self.a12 % self.p)
        object.__setattr__(self, "a21", self.a21 % self.p)

    @classmethod
    def from_matrix(cls, m, p: int) -> Sl2Element:
        (x11, x12), (x21, x22) = m
        if (x11 + x22) % p:
            raise ValueError("matrix is not trace zero")
        return cls(x11, x12, x21, p)

    @classmethod
    def zero(cls, p: int) -> Sl2Element:
        return cls(0, 0, 0, p)

    @property
    def a22(self) -> int:
        return -self.a11 % self.p

    @property
    def coords(self) -> tuple[int, int, int]:
        return (self.a11, self.a12, self.a21)

    def matrix(self) -> list[list[int]]:
        return [[self.a11, self.a12], [self.a21, self.a22]]

    def is_zero(self) -> bool:
        return self.a11 == self.a12 == self.a21 == 0

    def det(self) -> int:
        return (-self.a11 * self.a11 - self.a12 * self.a21) % self.p

    def _check(self, other: Sl2Element) -> None:
        if not isinstance(other, Sl2Element):
            raise TypeError(f"expected Sl2Element, got {type(other).__name__}")
        if other.p != self.p:
            raise ModulusMismatch(f"moduli {self.p} and {other.p} differ")

    def __add__(self, other: Sl2Element) -> Sl2Element:
        self._check(other)
        return Sl2Element(self.a11 + other.a11, self.a12 + other.a12, self.a21 + other.a21, self.p)

    def __sub__(self, other: Sl2Element) -> Sl2Element:
        self._check(other)
        return Sl2Element(self.a11 - other.a11, self.a12 - other.a12, self.a21 - other.a21, self.p)

    def __neg__(self) -> Sl2Element:
        return Sl2Element(-self.a11, -self.a12, -self.a21, self.p)

    def __mul__(self, c: int) -> Sl2Element:
        if not isinstance(c, (int, np.integer)):
            return NotImplemented
        c = int(c)
        return Sl2Element(c * self.a11, c * self.a12, c * self.a21, self.p)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Sl2Element({self.matrix()}, p={self.p})"


@dataclass(frozen=True)
class GramTriple:
    """``alpha = 2<A,B>``, ``beta = 2<A,A>``, ``gamma = 2<B,B>``."""

    alpha: int
    beta: int
    gamma: int
    p: int

    def gram_matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """The Gram matrix ``[[<A,A>, <A,B>], [<A,B>, <B,B>]]`` mod p."""
        half = pow(2, -1, self.p)
        return (
            (self.beta * half % self.p, self.alpha * half % self.p),
            (self.alpha * half % self.p, self.gamma * half % self.p),
        )

    def all_nonzero(self) -> bool:
        return bool(self.alpha and self.beta and self.gamma)


def bracket(X: Sl2Element, Y: Sl2Element) -> Sl2Element:
    X._check(Y)
    x1, x2, x3 = X.coords
    y1, y2, y3 = Y.coords
    return Sl2Element(x2 * y3 - y2 * x3, 2 * (x1 * y2 - x2 * y1), 2 * (x3 * y1 - x1 * y3), X.p)


def inner(X: Sl2Element, Y: Sl2Element) -> int:
    """Trace form ``tr(XY)``."""
    X._check(Y)
    return (2 * X.a11 * Y.a11 + X.a12 * Y.a21 + X.a21 * Y.a12) % X.p


def gram_triple(A: Sl2Element, B: Sl2Element) -> GramTriple:
    p = A.p
    return GramTriple(2 * inner(A, B) % p, 2 * inner(A, A) % p, 2 * inner(B, B) % p, p)


def adjoint_matrix(which: str, gt: GramTriple) -> np.ndarray:
    """Matrix of ``ad_A`` or ``ad_B`` in the basis ``(A, B, [A,B])``.

    Columns are images of basis vectors, so ``M @ (0, 1, 0)`` gives the
    coordinates of ``ad_A B = [A, B]``.
    """
    al, be, ga = gt.alpha, gt.beta, gt.gamma
    if which == "A":
        m = [[0, 0, -al], [0, 0, be], [0, 1, 0]]
    elif which == "B":
        m = [[0, 0, -ga], [0, 0, al], [-1, 0, 0]]
    else:
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")
    return np.array(m, dtype=np.int64) % gt.p


def _det3(m, p: int) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    ) % p


def is_generating_pair(A: Sl2Element, B: Sl2Element) -> bool:
    """True when ``A, B, [A,B]`` form a basis of sl2(F_p)."""
    A._check(B)
    C = bracket(A, B)
    return _det3([A.coords, B.coords, C.coords], A.p) != 0


def decompose(A: Sl2Element, B: Sl2Element, target: Sl2Element) -> tuple[int, int, int]:
    """Coordinates ``(x, y, z)`` with ``target = xA + yB + z[A,B]``."""
    A._check(B)
    A._check(target)
    p = A.p
    C = bracket(A, B)
    # columns are the basis vectors; solve by Cramer's rule
    cols = [A.coords, B.coords, C.coords]
    m = [[cols[c][r] for c in range(3)] for r in range(3)]
    det = _det3(m, p)
    if det == 0:
        raise NotGenerating("A, B, [A,B] are linearly dependent")
    inv = pow(det, -1, p)
    out = []
    for c in range(3):
        mc = [row[:] for row in m]
        for r in range(3):
            mc[r][c] = target.coords[r]
        out.append(_det3(mc, p) * inv % p)
    return tuple(out)


def combine(A: Sl2Element, B: Sl2Element, x: int, y: int, z: int) -> Sl2Element:
    return x * A + y * B + z * bracket(A, B)


def all_elements(p: int) -> np.ndarray:
    """All ``p**3`` coordinate triples, row ``i`` encoding index ``i``."""
    r = np.arange(p, dtype=np.int64)
    a11, a12, a21 = np.meshgrid(r, r, r, indexing="ij")
    return np.stack([a11.ravel(), a12.ravel(), a21.ravel()], axis=1)


def random_element(rng: np.random.Generator, p: int) -> Sl2Element:
    a11, a12, a21 = (int(v) for v in rng.integers(0, p, size=3))
    return Sl2Element(a11, a12, a21, p)
