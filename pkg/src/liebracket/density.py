"""Euler products over prime divisors and the interval-realization machinery.

``euler_product(n)`` is the chance that uniform ``(a, b)`` in ``Z_n**2``
have ``gcd(a, b, n) = 1``. The series ``x_j = -log(1 - 1/p_j**2)`` over
the primes sums to ``log zeta(2)``; subset sums of it steer that
probability into a target interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import (
    Inconclusive,
    IntervalEmpty,
    IntervalOutsideI,
    IntervalTooHigh,
    NotDisjoint,
    NotFound,
)
from .field import is_prime, prime_divisors

LOG_ZETA2 = math.log(math.pi**2 / 6)
INV_ZETA2 = 6 / math.pi**2
DEFAULT_TERMS = 10**5

# The two pieces of the interval of attainable limits.
INTERVAL_I = ((INV_ZETA2, 2 / 3), (9 * INV_ZETA2 / 8, 3 / 4))


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for q in range(3, math.isqrt(limit) + 1, 2):
        if sieve[q]:
            sieve[q * q :: 2 * q] = False
    out = np.flatnonzero(sieve).astype(np.int64)
    out.setflags(write=False)
    return out


def first_primes(count: int) -> np.ndarray:
    """The first ``count`` primes (``p_1 = 2``)."""
    limit = 30
    if count >= 6:
        limit = int(count * (math.log(count) + math.log(math.log(count)))) + 10
    return primes_up_to(limit)[:count]


def euler_product(n: int) -> Fraction:
    """Product of ``1 - 1/q**2`` over the distinct primes ``q | n``."""
    if n < 1:
        raise ValueError("n must be positive")
    out = Fraction(1)
    for q in prime_divisors(n):
        out *= Fraction(q * q - 1, q * q)
    return out


def coprime_pair_count(n: int) -> int:
    """``#{(a, b) in Z_n**2 : gcd(a, b, n) = 1}``."""
    count = n * n * euler_product(n)
    assert count.denominator == 1
    return int(count)


def truncated_euler_product(terms: int) -> Fraction:
    """Product of ``1 - 1/p**2`` over the first ``terms`` primes."""
    out = Fraction(1)
    for q in first_primes(terms):
        q = int(q)
        out *= Fraction(q * q - 1, q * q)
    return out


def zeta2_bracket(terms: int) -> tuple[float, float]:
    """Certified interval ``[lower, upper]`` containing ``1/zeta(2)``.

    The truncated product is the upper end; the remaining factors shrink
    it by at most ``exp(-2/p_J)``.
    """
    upper = float(truncated_euler_product(terms))
    p_last = int(first_primes(terms)[-1])
    return upper * math.exp(-2 / p_last), upper


@dataclass(frozen=True, eq=False)
class XSequence:
    """First ``terms`` values of ``x_j``, 1-indexed, with suffix sums."""

    terms: int
    primes: np.ndarray
    x: np.ndarray
    suffix: np.ndarray  # suffix[j] = sum of x_i for j <= i <= terms

    @property
    def tail_bound(self) -> float:
        """Upper bound on the sum of all ``x_j`` with ``j > terms``."""
        return 2 / float(self.primes[-1])

    def truncated_tail(self, j: int) -> float:
        return float(self.suffix[j]) if j <= self.terms else 0.0


@lru_cache(maxsize=4)
def x_sequence(terms: int = DEFAULT_TERMS) -> XSequence:
    primes = first_primes(terms).astype(float)
    if len(primes) < terms:
        raise AssertionError("prime table too short")
    x = np.concatenate([[0.0], -np.log1p(-1.0 / primes**2)])
    suffix = np.concatenate([np.cumsum(x[::-1])[::-1], [0.0]])
    suffix[0] = np.nan
    return XSequence(terms, primes, x, suffix)


def x_value(j: int) -> float:
    if j < 1:
        raise ValueError("j starts at 1")
    q = int(first_primes(j)[-1])
    return -math.log1p(-1 / q**2)


def tail_sum(j: int) -> float:
    """``sum_{i >= j} x_i``, from ``log zeta(2)`` minus the head."""
    if j < 1:
        raise ValueError("j starts at 1")
    head = math.fsum(-math.log1p(-1 / float(q) ** 2) for q in first_primes(j - 1)) if j > 1 else 0.0
    return LOG_ZETA2 - head


def tail_condition(k: int) -> bool:
    """Decide ``x_k < sum_{j > k} x_j``.

    A truncated right side can only be too small, so ``True`` is rigorous;
    ``False`` is only reported once the certified tail bound rules the
    inequality out.
    """
    if k < 1:
        raise ValueError("k starts at 1")
    seq = x_sequence(max(k + 10**4, DEFAULT_TERMS))
    xk = float(seq.x[k])
    rest = seq.truncated_tail(k + 1)
    if xk < rest:
        return True
    if xk >= rest + seq.tail_bound:
        return False
    raise Inconclusive(f"tail condition at k={k} is within truncation error")


def greedy_subset(s: float, t: float, start: int = 3, terms: int = DEFAULT_TERMS) -> list[int]:
    """Indices ``S`` (all ``>= start``) with ``sum(x_j for j in S)`` in ``(s, t)``.

    Scans ``j = start, start+1, ...`` and keeps ``j`` whenever the running
    sum stays below ``t``, stopping once it exceeds ``s``. This only works
    where each ``x_k`` is smaller than the rest of the series, i.e. from
    ``start = 3`` on.
    """
    if s >= t:
        raise IntervalEmpty(f"({s}, {t}) is empty")
    if s <= 0:
        raise ValueError("s must be positive")
    seq = x_sequence(terms)
    available = seq.truncated_tail(start)
    if t >= available:
        raise IntervalTooHigh(f"t = {t} is not below the available sum {available:.6f}")
    chosen: list[int] = []
    total = 0.0
    for j in range(start, terms + 1):
        xj = float(seq.x[j])
        if total + xj < t:
            chosen.append(j)
            total += xj
            if total > s:
                return chosen
    raise Inconclusive(f"no subset found among the first {terms} terms")


def prime_search(X: Iterable[int], Y: Iterable[int], bound: int) -> list[int]:
    """Odd primes ``p <= bound`` with every ``q`` in ``X`` dividing ``p - 1``
    and no ``q`` in ``Y`` dividing it."""
    X, Y = set(X), set(Y)
    if X & Y:
        raise NotDisjoint(f"{sorted(X & Y)} in both sets")
    for q in X | Y:
        if q == 2 or not is_prime(q):
            raise ValueError(f"{q} is not an odd prime")
    ps = primes_up_to(bound)
    ps = ps[ps > 2]
    keep = np.ones(len(ps), dtype=bool)
    for q in X:
        keep &= (ps - 1) % q == 0
    for q in Y:
        keep &= (ps - 1) % q != 0
    return [int(p) for p in ps[keep]]


@dataclass(frozen=True)
class IntervalRecipe:
    forced: tuple[int, ...]
    subset: tuple[int, ...]
    cutoff: int
    divide: tuple[int, ...]  # odd primes that must divide p - 1
    avoid: tuple[int, ...]  # odd primes that must not divide p - 1
    product: Fraction


def interval_recipe(s: float, t: float, terms: int = DEFAULT_TERMS) -> IntervalRecipe:
    """Divisibility conditions on ``p - 1`` forcing ``euler_product(p - 1)`` into ``(s, t)``."""
    if s >= t:
        raise IntervalEmpty(f"({s}, {t}) is empty")
    (lo1, hi1), (lo2, hi2) = INTERVAL_I
    if lo1 <= s and t <= hi1:
        forced, scale = (1, 2), Fraction(3, 2)
    elif lo2 <= s and t <= hi2:
        forced, scale = (1,), Fraction(4, 3)
    else:
        raise IntervalOutsideI(f"({s}, {t}) is not inside one piece of the limit interval")
    seq = x_sequence(terms)
    # sum over the free indices must land in (-log(scale*t), -log(scale*s))
    lo = -math.log(min(float(scale) * t, 1.0))
    hi = min(-math.log(float(scale) * s), seq.truncated_tail(3) * (1 - 1e-9))
    if lo <= 0:
        lo = hi / 2
    if lo >= hi:
        raise Inconclusive(f"({s}, {t}) is too close to the end of the limit interval")
    # aim at the lower half so the product keeps slack above s for the tail
    subset = tuple(greedy_subset(lo, (lo + hi) / 2, start=3, terms=terms))
    indices = sorted(set(forced) | set(subset))
    primes = [int(seq.primes[j - 1]) for j in indices]
    product = Fraction(1)
    for q in primes:
        product *= Fraction(q * q - 1, q * q)
    cutoff = indices[-1] + 1
    while product <= s * math.exp(seq.truncated_tail(cutoff) + seq.tail_bound):
        cutoff += 1
        if cutoff > terms:
            raise Inconclusive("could not certify a cutoff index")
    divide = tuple(q for q in primes if q != 2)
    avoid = tuple(int(seq.primes[j - 1]) for j in range(2, cutoff) if int(seq.primes[j - 1]) not in primes)
    return IntervalRecipe(tuple(forced), subset, cutoff, divide, avoid, product)


def realize_interval(s: float, t: float, bound: int) -> int:
    """Smallest prime ``p <= bound`` built by :func:`interval_recipe`."""
    recipe = interval_recipe(s, t)
    for p in prime_search(recipe.divide, recipe.avoid, bound):
        if s < euler_product(p - 1) < t:
            return p
    raise NotFound(f"no prime up to {bound} realizes ({s}, {t})")
