"""Weighted balls in sl2(F_p) and checkable certificates of ball membership.

``S = {0, +-A, +-B}`` has weight 1; sums and brackets add weights.
``P_n(a)`` is the set of ``sum b_i a**i`` (``i <= n``, ``b_i`` in
``{-1, 0, 1}``). If ``P_n(alpha)`` covers ``F_p``, every multiple of
``[A, B]`` is reached in weight ``4n + 2`` and every element in ``12n + 8``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegeneratePair, NotGenerating, NotReachable, SingularGram, TooLarge
from .field import PrimeContext
from .gram import alpha_masses
from .sl2 import Sl2Element, all_elements, bracket, decompose, gram_triple, is_generating_pair

BALL_MAX_P = 7
LEAVES = ("0", "A", "-A", "B", "-B")


class Node:
    """Expression tree node; ``weight`` is the number of leaves below it."""

    __slots__ = ("op", "symbol", "children", "weight")

    def __init__(self, op: str, symbol: str | None = None, children: tuple[Node, ...] = ()):
        if op == "leaf":
            if symbol not in LEAVES:
                raise ValueError(f"unknown leaf {symbol!r}")
            weight = 1
        elif op == "bracket":
            if len(children) != 2:
                raise ValueError("a bracket takes two operands")
            weight = children[0].weight + children[1].weight
        elif op == "sum":
            if len(children) < 2:
                raise ValueError("a sum takes at least two terms")
            weight = sum(c.weight for c in children)
        else:
            raise ValueError(f"unknown node type {op!r}")
        self.op, self.symbol, self.children, self.weight = op, symbol, tuple(children), weight

    def __repr__(self) -> str:
        if self.op == "leaf":
            return self.symbol
        return f"{self.op}(weight={self.weight})"


def leaf(symbol: str) -> Node:
    return Node("leaf", symbol)


def br(left: Node, right: Node) -> Node:
    return Node("bracket", children=(left, right))


def add(*terms: Node) -> Node:
    return terms[0] if len(terms) == 1 else Node("sum", children=terms)


def evaluate(tree: Node, A: Sl2Element, B: Sl2Element) -> Sl2Element:
    """Value of ``tree`` in sl2; iterative so deep certificates are fine."""
    leaves = {"0": Sl2Element.zero(A.p), "A": A, "-A": -A, "B": B, "-B": -B}
    values: dict[int, Sl2Element] = {}
    stack = [(tree, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in values:
            continue
        if node.op == "leaf":
            values[id(node)] = leaves[node.symbol]
        elif ready:
            vals = [values[id(c)] for c in node.children]
            if node.op == "bracket":
                values[id(node)] = bracket(vals[0], vals[1])
            else:
                total = vals[0]
                for v in vals[1:]:
                    total = total + v
                values[id(node)] = total
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
    return values[id(tree)]


@dataclass(frozen=True)
class WeightCertificate:
    """Claim that ``value`` lies in the weighted ball of radius ``weight``."""

    tree: Node
    value: Sl2Element
    A: Sl2Element
    B: Sl2Element
    degree: int  # degree n of the digit expansions used

    @property
    def weight(self) -> int:
        return self.tree.weight

    def verify(self) -> bool:
        return evaluate(self.tree, self.A, self.B) == self.value


def pn_cover_time(ctx: PrimeContext, a: int, cap: int) -> int | None:
    """Least ``n <= cap`` with ``P_n(a) = F_p``, or None."""
    p = ctx.p
    reached = np.zeros(p, dtype=bool)
    reached[[0, 1, p - 1]] = True
    if reached.all():
        return 0
    power = 1
    for n in range(1, cap + 1):
        power = power * a % p
        if power == 0:
            return None
        reached = reached | np.roll(reached, power) | np.roll(reached, -power)
        if reached.all():
            return n
    return None


def cover_times(ctx: PrimeContext, cap: int) -> np.ndarray:
    """Cover time for every ``a`` in ``1..p-1`` (entry ``a - 1``), ``-1`` if above ``cap``."""
    out = np.full(ctx.n, -1, dtype=np.int64)
    for a in range(1, ctx.p):
        t = pn_cover_time(ctx, a, cap)
        if t is not None:
            out[a - 1] = t
    return out


@lru_cache(maxsize=256)
def _expansion_table(p: int, a: int, cap: int) -> tuple[np.ndarray, np.ndarray]:
    # level[c]: least n with c in P_n(a); digit[c]: top digit of that expansion
    level = np.full(p, -1, dtype=np.int64)
    digit = np.zeros(p, dtype=np.int8)
    level[0] = 0
    level[1] = 0
    digit[1] = 1
    if level[p - 1] < 0:
        level[p - 1] = 0
        digit[p - 1] = -1
    power = 1
    for n in range(1, cap + 1):
        reached = level >= 0
        if reached.all():
            break
        power = power * a % p
        plus = np.roll(reached, power) & (level < 0)
        level[plus] = n
        digit[plus] = 1
        minus = np.roll(reached, -power) & (level < 0)
        level[minus] = n
        digit[minus] = -1
        if not (plus.any() or minus.any()):
            break
    level.setflags(write=False)
    digit.setflags(write=False)
    return level, digit


def digit_expansion(ctx: PrimeContext, a: int, c: int, cap: int | None = None) -> list[int]:
    """Digits ``[b_0, ..., b_n]`` in ``{-1, 0, 1}`` with ``sum b_i a**i == c`` and ``n`` minimal.

    At every degree the top digit prefers 0, then +1, then -1.
    """
    p = ctx.p
    a, c = a % p, c % p
    cap = p if cap is None else cap
    level, digit = _expansion_table(p, a, cap)
    if level[c] < 0:
        raise NotReachable(f"{c} is not in P_n({a}) for n <= {cap}")
    n = int(level[c])
    digits = [0] * (n + 1)
    while c:
        m = int(level[c])
        b = int(digit[c])
        digits[m] = b
        c = (c - b * pow(a, m, p)) % p
    return digits


def _line_tree(digits: list[int]) -> Node:
    # Horner: x[A,B] = [B, [A, y[A,B]]] + b_0 [A,B] with x = alpha*y + b_0
    def unit(b: int) -> Node:
        return br(leaf("A" if b > 0 else "-A"), leaf("B"))

    top = len(digits) - 1
    while top >= 0 and digits[top] == 0:
        top -= 1
    if top < 0:
        return leaf("0")
    tree = unit(digits[top])
    for b in reversed(digits[:top]):
        tree = br(leaf("B"), br(leaf("A"), tree))
        if b:
            tree = add(tree, unit(b))
    return tree


def line_witness(
    ctx: PrimeContext, A: Sl2Element, B: Sl2Element, c: int, cap: int | None = None
) -> WeightCertificate:
    """Certificate for ``c [A, B]`` of weight at most ``4n + 2``."""
    C = bracket(A, B)
    if C.is_zero():
        raise DegeneratePair("[A, B] = 0")
    alpha = gram_triple(A, B).alpha
    digits = digit_expansion(ctx, alpha, c, cap)
    return WeightCertificate(_line_tree(digits), (c % ctx.p) * C, A, B, len(digits) - 1)


def full_witness(
    ctx: PrimeContext, A: Sl2Element, B: Sl2Element, target: Sl2Element, cap: int | None = None
) -> WeightCertificate:
    """Certificate for an arbitrary element, of weight at most ``12n + 8``.

    Writes ``target = xA + yB + z[A,B]`` and uses
    ``[A, r[A,B]] + [B, s[A,B]] = (-alpha r - gamma s) A + (beta r + alpha s) B``.
    """
    if not is_generating_pair(A, B):
        raise NotGenerating("A, B, [A,B] do not span sl2")
    p = ctx.p
    x, y, z = decompose(A, B, target)
    if x == 0 and y == 0:
        cert = line_witness(ctx, A, B, z, cap)
        return WeightCertificate(cert.tree, target, A, B, cert.degree)
    gt = gram_triple(A, B)
    al, be, ga = gt.alpha, gt.beta, gt.gamma
    det = (be * ga - al * al) % p
    if det == 0:
        raise SingularGram("Gram matrix of (A, B) is singular")
    inv = pow(det, -1, p)
    r = (al * x + ga * y) * inv % p
    s = (-al * y - be * x) * inv % p
    legs, degree = [], 0
    for coeff, gen in ((r, "A"), (s, "B")):
        if coeff:
            cert = line_witness(ctx, A, B, coeff, cap)
            legs.append(br(leaf(gen), cert.tree))
            degree = max(degree, cert.degree)
    if z:
        cert = line_witness(ctx, A, B, z, cap)
        legs.append(cert.tree)
        degree = max(degree, cert.degree)
    return WeightCertificate(add(*legs), target, A, B, degree)


def element_index(X: Sl2Element) -> int:
    p = X.p
    return (X.a11 * p + X.a12) * p + X.a21


@lru_cache(maxsize=4)
def _tables(p: int) -> tuple[np.ndarray, np.ndarray]:
    E = all_elements(p)
    x1, x2, x3 = (E[:, i][:, None] for i in range(3))
    y1, y2, y3 = (E[:, i][None, :] for i in range(3))

    def index(c1, c2, c3):
        return ((c1 % p) * p + c2 % p) * p + c3 % p

    add_t = index(x1 + y1, x2 + y2, x3 + y3)
    br_t = index(x2 * y3 - y2 * x3, 2 * (x1 * y2 - x2 * y1), 2 * (x3 * y1 - x1 * y3))
    return add_t, br_t


def ball_growth(ctx: PrimeContext, A: Sl2Element, B: Sl2Element, k_max: int) -> list[np.ndarray]:
    """Membership masks of ``S^1, ..., S^k_max`` over all ``p**3`` elements."""
    p = ctx.p
    if p > BALL_MAX_P:
        raise TooLarge(f"exact balls are capped at p <= {BALL_MAX_P}")
    add_t, br_t = _tables(p)
    s1 = np.zeros(p**3, dtype=bool)
    for X in (Sl2Element.zero(p), A, -A, B, -B):
        s1[element_index(X)] = True
    balls = [s1]
    for k in range(2, k_max + 1):
        if balls[-1].all():
            balls.append(balls[-1])
            continue
        cur = np.zeros(p**3, dtype=bool)
        for j in range(1, k // 2 + 1):
            left = np.flatnonzero(balls[j - 1])
            right = np.flatnonzero(balls[k - j - 1])
            block = np.ix_(left, right)
            cur[add_t[block].ravel()] = True
            cur[br_t[block].ravel()] = True
            # brackets are antisymmetric and the balls symmetric, so j <= k/2 suffices
        balls.append(cur)
    return balls


def exact_diameter(ctx: PrimeContext, A: Sl2Element, B: Sl2Element, limit: int = 200) -> int:
    """Least ``k`` with ``S^k`` equal to all of sl2(F_p)."""
    if ctx.p > BALL_MAX_P:
        raise TooLarge(f"exact balls are capped at p <= {BALL_MAX_P}")
    if not is_generating_pair(A, B):
        raise NotGenerating("A, B, [A,B] do not span sl2")
    k = 1
    while True:
        balls = ball_growth(ctx, A, B, k)
        if balls[-1].all():
            return next(i + 1 for i, b in enumerate(balls) if b.all())
        if k >= limit:
            raise RuntimeError(f"ball did not fill sl2 within {limit} steps")
        k *= 2


def worst_alpha_exclusion(ctx: PrimeContext, eps: float) -> Fraction:
    """Largest chance that ``alpha`` misses a set of at least ``(1 - eps) p`` residues.

    The worst set leaves out the ``floor(eps p)`` most likely values.
    """
    masses = np.sort(alpha_masses(ctx))[::-1]
    drop = math.floor(eps * ctx.p)
    return Fraction(int(masses[:drop].sum(dtype=object) if drop else 0), ctx.p**6)
