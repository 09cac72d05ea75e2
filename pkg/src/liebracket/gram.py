"""Fibers of the Gram map and the induced law of the walk parameters.

The Gram map sends a pair ``(A, B)`` to ``[[<A,A>, <A,B>], [<A,B>, <B,B>]]``.
Fiber sizes are given in closed form; :func:`fiber_size_oracle` recounts
them by enumerating all ``p**6`` pairs and is only meant for tiny primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import DegenerateGram, TooLarge
from .field import PrimeContext, discrete_log, quadratic_character
from .sl2 import GramTriple, all_elements

ORACLE_MAX_P = 13


@dataclass(frozen=True)
class SymMatrix2:
    x11: int
    x12: int
    x22: int
    p: int

    def __post_init__(self):
        for name in ("x11", "x12", "x22"):
            object.__setattr__(self, name, getattr(self, name) % self.p)

    @classmethod
    def from_gram(cls, gt: GramTriple) -> SymMatrix2:
        (x11, x12), (_, x22) = gt.gram_matrix()
        return cls(x11, x12, x22, gt.p)

    def rank(self) -> int:
        if self.x11 == self.x12 == self.x22 == 0:
            return 0
        return 2 if (self.x11 * self.x22 - self.x12 * self.x12) % self.p else 1


def _half(ctx: PrimeContext, x: int) -> int:
    return x * pow(2, -1, ctx.p) % ctx.p


def fiber_size(ctx: PrimeContext, X: SymMatrix2) -> int:
    """Number of pairs ``(A, B)`` whose Gram matrix is ``X``."""
    p = ctx.p
    r = X.rank()
    if r == 0:
        return p**3 + p**2 - p
    if r == 2:
        return p**3 - p
    e11 = quadratic_character(ctx, _half(ctx, X.x11))
    e22 = quadratic_character(ctx, _half(ctx, X.x22))
    if e11 >= 0 and e22 >= 0:
        return 2 * p**3 + p**2 - p
    return p**2 - p


@lru_cache(maxsize=8)
def _fiber_table(p: int, g: int) -> np.ndarray:
    r = np.arange(p, dtype=np.int64)
    x11, x12, x22 = np.meshgrid(r, r, r, indexing="ij")
    det = (x11 * x22 - x12 * x12) % p
    half = pow(2, -1, p)
    # quadratic character of x/2 for every residue
    squares = np.zeros(p, dtype=bool)
    squares[(r[1:] * r[1:]) % p] = True
    eta_half = np.where(r == 0, 0, np.where(squares[(r * half) % p], 1, -1))
    large = (eta_half[x11] >= 0) & (eta_half[x22] >= 0)
    table = np.where(det != 0, p**3 - p, np.where(large, 2 * p**3 + p**2 - p, p**2 - p))
    table[0, 0, 0] = p**3 + p**2 - p
    table.setflags(write=False)
    return table


def fiber_table(ctx: PrimeContext) -> np.ndarray:
    """Closed-form fiber sizes for every ``X``, indexed ``[x11, x12, x22]``."""
    return _fiber_table(ctx.p, ctx.g)


def stratum_counts(p: int) -> dict[str, int]:
    """How many symmetric matrices fall into each case of the fiber formula."""
    return {
        "rank2": p**3 - p**2,
        "rank1_large": (p**2 - 1) // 2,
        "rank1_small": (p**2 - 1) // 2,
        "rank0": 1,
    }


def total_fiber_mass(p: int) -> int:
    """Sum of all fiber sizes, evaluated stratum by stratum (should be ``p**6``)."""
    c = stratum_counts(p)
    return (
        c["rank2"] * (p**3 - p)
        + c["rank1_large"] * (2 * p**3 + p**2 - p)
        + c["rank1_small"] * (p**2 - p)
        + c["rank0"] * (p**3 + p**2 - p)
    )


@lru_cache(maxsize=8)
def gram_histogram(p: int) -> np.ndarray:
    """Brute-force fiber sizes over all ``p**6`` pairs, shape ``(p, p, p)``."""
    if p > ORACLE_MAX_P:
        raise TooLarge(f"enumeration of p^6 pairs is capped at p <= {ORACLE_MAX_P}")
    E = all_elements(p)
    form = np.array([[2, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=np.int64)
    ip = (E @ form @ E.T) % p
    diag = np.diagonal(ip)
    keys = (diag[:, None] * p + ip) * p + diag[None, :]
    hist = np.bincount(keys.ravel(), minlength=p**3).reshape(p, p, p)
    hist.setflags(write=False)
    return hist


def fiber_size_oracle(ctx: PrimeContext, X: SymMatrix2) -> int:
    return int(gram_histogram(ctx.p)[X.x11, X.x12, X.x22])


def anisotropic_count(ctx: PrimeContext, a: int) -> int:
    """Number of ``A`` in sl2(F_p) with ``<A,A> = a``."""
    return ctx.p * (ctx.p + quadratic_character(ctx, _half(ctx, a)))


def parameter_map(ctx: PrimeContext, gt: GramTriple) -> tuple[int, int]:
    """``(log(alpha/beta), log(alpha/gamma))`` in ``Z_n``."""
    if not gt.all_nonzero():
        raise DegenerateGram(f"Gram triple {gt} has a zero entry")
    p = ctx.p
    a = discrete_log(ctx, gt.alpha * pow(gt.beta, -1, p))
    b = discrete_log(ctx, gt.alpha * pow(gt.gamma, -1, p))
    return a, b


def parameter_fiber_size(ctx: PrimeContext, a: int, b: int) -> int:
    """Number of pairs ``(A, B)`` with nonzero Gram entries mapping to ``(a, b)``."""
    p = ctx.p
    if (a + b) % ctx.n == 0:
        # half the rank-1 fibers are large, half small: (p-1)(p^3 + p^2 - p)
        return p**4 - 2 * p**2 + p
    return (p - 1) * (p**3 - p)


def pushforward_mass(ctx: PrimeContext, T: Iterable[tuple[int, int]]) -> Fraction:
    """Probability that a uniform pair lands in ``T`` under the parameter map."""
    n = ctx.n
    points = {(a % n, b % n) for a, b in T}
    anti = sum(1 for a, b in points if (a + b) % n == 0)
    return pushforward_mass_from_counts(ctx, len(points), anti)


def pushforward_mass_from_counts(ctx: PrimeContext, size: int, antidiagonal: int) -> Fraction:
    """Same as :func:`pushforward_mass` given only ``|T|`` and ``|T ∩ {a+b=0}|``."""
    p = ctx.p
    mass = antidiagonal * parameter_fiber_size(ctx, 0, 0) + (size - antidiagonal) * parameter_fiber_size(ctx, 0, 1)
    return Fraction(mass, p**6)


def zero_entry_mass(ctx: PrimeContext) -> Fraction:
    """Probability that a uniform pair has a Gram matrix with some zero entry."""
    t = fiber_table(ctx)
    nonzero = t[1:, 1:, 1:].sum(dtype=object)
    return 1 - Fraction(int(nonzero), ctx.p**6)


def alpha_masses(ctx: PrimeContext) -> np.ndarray:
    """Number of pairs with ``alpha = 2<A,B>`` equal to each residue."""
    p = ctx.p
    by_x12 = fiber_table(ctx).sum(axis=(0, 2))
    out = np.zeros(p, dtype=np.int64)
    out[(2 * np.arange(p)) % p] = by_x12
    return out
