"""Prime-field helpers: primality, factorization, primitive roots, logs."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotPrime, TooSmall, ZeroArgument

# Deterministic for every n < 3.3e24, which covers all 64-bit inputs.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_TRIAL_LIMIT = 10**6
_LOG_TABLE_LIMIT = 1 << 21


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    f = _pollard_brent(n)
    _split(f, out)
    _split(n // f, out)


@lru_cache(maxsize=4096)
def _factorize(n: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for q in (2, 3):
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    q = 5
    while q <= _TRIAL_LIMIT and q * q <= n:
        for r in (q, q + 2):
            while n % r == 0:
                out[r] = out.get(r, 0) + 1
                n //= r
        q += 6
    if n > 1:
        _split(n, out)
    return tuple(sorted(out.items()))


def factorize(n: int) -> list[tuple[int, int]]:
    """Return the sorted ``(prime, exponent)`` pairs of ``n >= 1``."""
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    return list(_factorize(n))


def prime_divisors(n: int) -> list[int]:
    return [q for q, _ in factorize(n)]


def _is_generator(g: int, p: int, factors) -> bool:
    n = p - 1
    return g % p != 0 and all(pow(g, n // q, p) != 1 for q, _ in factors)


@dataclass(frozen=True)
class PrimeContext:
    p: int
    n: int
    g: int
    factors_n: tuple[tuple[int, int], ...]

    def log(self, x: int) -> int:
        return discrete_log(self, x)

    def exp(self, e: int) -> int:
        return pow(self.g, e % self.n, self.p)

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise ZeroArgument("zero has no inverse")
        return pow(x, -1, self.p)

    def eta(self, x: int) -> int:
        return quadratic_character(self, x)


def make_prime_context(p: int, g: int | None = None) -> PrimeContext:
    """Validate ``p`` and fix a generator of the multiplicative group.

    The smallest primitive root is used unless ``g`` is given explicitly,
    in which case it is checked.
    """
    p = int(p)
    if p <= 2:
        raise TooSmall(f"p must be an odd prime, got {p}")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    factors = _factorize(p - 1)
    if g is None:
        g = next(c for c in range(2, p + 1) if _is_generator(c, p, factors))
    elif not _is_generator(int(g), p, factors):
        raise ValueError(f"{g} is not a primitive root mod {p}")
    return PrimeContext(p=p, n=p - 1, g=int(g) % p, factors_n=factors)


def quadratic_character(ctx: PrimeContext, x: int) -> int:
    x %= ctx.p
    if x == 0:
        return 0
    return 1 if pow(x, (ctx.p - 1) // 2, ctx.p) == 1 else -1


@lru_cache(maxsize=64)
def _log_table(p: int, g: int) -> np.ndarray:
    table = np.zeros(p, dtype=np.int64)
    x = 1
    for e in range(p - 1):
        table[x] = e
        x = x * g % p
    return table


@lru_cache(maxsize=64)
def _baby_steps(p: int, g: int) -> tuple[int, dict[int, int]]:
    m = math.isqrt(p - 1) + 1
    baby: dict[int, int] = {}
    x = 1
    for j in range(m):
        baby.setdefault(x, j)
        x = x * g % p
    return m, baby


def discrete_log(ctx: PrimeContext, x: int) -> int:
    """Exponent ``e`` in ``[0, n)`` with ``g**e == x (mod p)``."""
    x %= ctx.p
    if x == 0:
        raise ZeroArgument("log of zero")
    if ctx.p <= _LOG_TABLE_LIMIT:
        return int(_log_table(ctx.p, ctx.g)[x])
    m, baby = _baby_steps(ctx.p, ctx.g)
    giant = pow(ctx.g, -m, ctx.p)
    y = x
    for i in range(m + 1):
        j = baby.get(y)
        if j is not None:
            return (i * m + j) % ctx.n
        y = y * giant % ctx.p
    raise AssertionError("generator does not generate")  # pragma: no cover


def log_table(ctx: PrimeContext) -> np.ndarray:
    """Array ``t`` with ``t[x] = log x`` for ``x`` in ``1..p-1`` (``t[0]`` is 0)."""
    return _log_table(ctx.p, ctx.g)


def centered_residue(j: int, n: int) -> int:
    """Representative of ``j mod n`` in ``(-n/2, n/2]``."""
    if n < 1:
        raise ValueError("modulus must be positive")
    r = j % n
    return r - n if 2 * r > n else r
