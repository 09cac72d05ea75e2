"""The random Lie bracket chain and its reduction to a walk on ``Z_n``.

``X_0 = [A, B]`` and ``X_k = [Z_k, X_{k-1}]`` with ``Z_k`` uniform on
``{A, B}``. Even steps stay on the line through ``[A, B]``; writing
``X_{2k} = g**e [A, B]`` turns the chain into a walk on ``Z_n`` that adds
``log alpha`` w.p. 1/2 and ``log beta``, ``log gamma`` w.p. 1/4 each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateGram, DegeneratePair, SupportMismatch
from .field import PrimeContext, discrete_log, log_table
from .sl2 import Sl2Element, bracket, gram_triple

MASS_TOL = 1e-9


@dataclass(frozen=True)
class WalkParams:
    n: int
    alpha_log: int
    beta_log: int
    gamma_log: int
    a: int = field(init=False)
    b: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ValueError("n must be positive")
        for name in ("alpha_log", "beta_log", "gamma_log"):
            object.__setattr__(self, name, int(getattr(self, name)) % n)
        a = (self.alpha_log - self.beta_log) % n
        b = (self.alpha_log - self.gamma_log) % n
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", math.gcd(math.gcd(a, b), n))

    @classmethod
    def from_ab(cls, n: int, a: int, b: int, alpha_log: int = 0) -> WalkParams:
        return cls(n, alpha_log, alpha_log - a, alpha_log - b)

    @property
    def steps(self) -> tuple[tuple[int, float], ...]:
        return ((self.alpha_log, 0.5), (self.beta_log, 0.25), (self.gamma_log, 0.25))


@dataclass(frozen=True, eq=False)
class Distribution:
    n: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (self.n,):
            raise ValueError(f"expected {self.n} probabilities, got shape {probs.shape}")
        if probs.min(initial=0.0) < 0:
            raise ValueError("negative probability")
        if abs(probs.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"total mass {probs.sum()!r} is not 1")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, n: int, x: int = 0) -> Distribution:
        probs = np.zeros(n)
        probs[x % n] = 1.0
        return cls(n, probs)

    def support(self) -> list[int]:
        return [int(x) for x in np.flatnonzero(self.probs)]

    def as_dict(self) -> dict[int, float]:
        return {x: float(self.probs[x]) for x in self.support()}

    def __getitem__(self, x: int) -> float:
        return float(self.probs[x % self.n])


def tv(u: Distribution, v: Distribution) -> float:
    """Total variation distance, half the L1 distance."""
    if u.n != v.n:
        raise SupportMismatch(f"supports Z_{u.n} and Z_{v.n} differ")
    return 0.5 * float(np.abs(u.probs - v.probs).sum())


def _commutator(A: Sl2Element, B: Sl2Element) -> Sl2Element:
    C = bracket(A, B)
    if C.is_zero():
        raise DegeneratePair("[A, B] = 0")
    return C


def _seed_key(seed: int, trial: int) -> int:
    return (int(seed) % (1 << 64)) | (int(trial) << 64)


def choice_bits(seed: int, trial: int, steps: int) -> np.ndarray:
    """Generator choices for one trajectory: 0 picks A, 1 picks B.

    Philox is counter based, so trial ``i`` of a batch reproduces the
    trajectory of a standalone run with ``trial=i``.
    """
    rng = np.random.Generator(np.random.Philox(key=_seed_key(seed, trial)))
    return rng.integers(0, 2, size=steps, dtype=np.int8)


def simulate(
    ctx: PrimeContext,
    A: Sl2Element,
    B: Sl2Element,
    steps: int,
    seed: int = 0,
    *,
    trial: int = 0,
    choices: Sequence | None = None,
) -> list[Sl2Element]:
    """Trajectory ``X_0, ..., X_steps``.

    ``choices`` may force the generator sequence (items ``"A"``/``"B"`` or
    0/1); otherwise it is drawn from ``(seed, trial)``.
    """
    if A.p != ctx.p:
        raise ValueError("element modulus does not match context")
    X = _commutator(A, B)
    if choices is None:
        bits = choice_bits(seed, trial, steps)
    else:
        bits = [c if c in (0, 1) else "AB".index(c) for c in choices]
        if len(bits) != steps:
            raise ValueError("need one choice per step")
    gens = (A, B)
    out = [X]
    for bit in bits:
        X = bracket(gens[int(bit)], X)
        out.append(X)
    return out


def simulate_batch(
    ctx: PrimeContext, A: Sl2Element, B: Sl2Element, steps: int, seed: int, trials: int, first_trial: int = 0
) -> np.ndarray:
    """Final states ``X_steps`` of ``trials`` independent runs as a ``(trials, 3)`` array."""
    p = ctx.p
    C = _commutator(A, B)
    bits = np.stack([choice_bits(seed, first_trial + i, steps) for i in range(trials)]) if trials else np.zeros((0, steps))
    x = np.tile(np.array(C.coords, dtype=np.int64), (trials, 1))
    ga, gb = np.array(A.coords, dtype=np.int64), np.array(B.coords, dtype=np.int64)
    for s in range(steps):
        z = np.where(bits[:, s, None] == 0, ga, gb)
        z1, z2, z3 = z[:, 0], z[:, 1], z[:, 2]
        x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
        x = np.stack([(z2 * x3 - x2 * z3) % p, 2 * (z1 * x2 - z2 * x1) % p, 2 * (z3 * x1 - z1 * x3) % p], axis=1)
    return x


def reduce(ctx: PrimeContext, A: Sl2Element, B: Sl2Element) -> WalkParams:
    """Walk parameters of the pair; one reduced step is two bracket steps."""
    _commutator(A, B)
    gt = gram_triple(A, B)
    if not gt.all_nonzero():
        raise DegenerateGram(f"Gram triple {gt} has a zero entry")
    return WalkParams(
        ctx.n, discrete_log(ctx, gt.alpha), discrete_log(ctx, gt.beta), discrete_log(ctx, gt.gamma)
    )


def evolve(params: WalkParams, k: int) -> Distribution:
    """Law of the reduced walk after ``k`` steps, by repeated convolution."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    s = np.zeros(params.n)
    s[0] = 1.0
    for _ in range(k):
        s = sum(w * np.roll(s, shift) for shift, w in params.steps)
    return Distribution(params.n, s)


def lift(
    ctx: PrimeContext, A: Sl2Element, B: Sl2Element, dist: Distribution, parity: str = "even"
) -> dict[Sl2Element, float]:
    """Push a law on ``Z_n`` to sl2: even steps on the ``[A,B]`` line, odd steps split."""
    C = _commutator(A, B)
    if dist.n != ctx.n:
        raise SupportMismatch("distribution does not live on Z_{p-1}")
    even: dict[Sl2Element, float] = {}
    for e, m in dist.as_dict().items():
        even[ctx.exp(e) * C] = m
    if parity == "even":
        return even
    if parity != "odd":
        raise ValueError("parity must be 'even' or 'odd'")
    gt = gram_triple(A, B)
    left = (-gt.alpha) * A + gt.beta * B
    right = (-gt.gamma) * A + gt.alpha * B
    odd: dict[Sl2Element, float] = {}
    for X, m in even.items():
        c = _scalar_of(X, C)
        for Y in (c * left, c * right):
            odd[Y] = odd.get(Y, 0.0) + m / 2
    return odd


def _scalar_of(X: Sl2Element, C: Sl2Element) -> int:
    i = next(i for i, v in enumerate(C.coords) if v)
    c = X.coords[i] * pow(C.coords[i], -1, C.p) % C.p
    if c * C != X:
        raise ValueError("element is not on the line")
    return c


def lie_law(ctx: PrimeContext, A: Sl2Element, B: Sl2Element, steps: int) -> dict[Sl2Element, float]:
    """Exact law of ``X_steps`` by evolving the chain on sl2 directly."""
    law = {_commutator(A, B): 1.0}
    for _ in range(steps):
        nxt: dict[Sl2Element, float] = {}
        for X, m in law.items():
            for Z in (A, B):
                Y = bracket(Z, X)
                nxt[Y] = nxt.get(Y, 0.0) + m / 2
        law = nxt
    return law


@dataclass(frozen=True)
class EmpiricalResult:
    dist: Distribution
    counts: dict[int, int]
    reference: Distribution
    tv: float


def line_exponents(ctx: PrimeContext, A: Sl2Element, B: Sl2Element, states: np.ndarray) -> np.ndarray:
    """Logs ``e`` with ``state = g**e [A,B]`` for rows of an ``(m, 3)`` state array."""
    p = ctx.p
    C = np.array(_commutator(A, B).coords, dtype=np.int64)
    i = int(np.flatnonzero(C)[0])
    c = states[:, i] * pow(int(C[i]), -1, p) % p
    if np.any((c[:, None] * C[None, :] - states) % p) or np.any(c == 0):
        raise ValueError("states are not nonzero multiples of [A, B]")
    return log_table(ctx)[c] if ctx.p <= (1 << 21) else np.array([discrete_log(ctx, int(v)) for v in c])


def empirical(
    ctx: PrimeContext,
    A: Sl2Element,
    B: Sl2Element,
    k: int,
    trials: int,
    seed: int,
    reference: Distribution | None = None,
) -> EmpiricalResult:
    """Sample ``X_{2k}`` over ``trials`` runs and compare with ``reference``.

    The default reference is the limiting law on the coset of ``Z_n``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    params = reduce(ctx, A, B)
    if reference is None:
        from .spectral import limiting

        reference = limiting(params, k)
    states = simulate_batch(ctx, A, B, 2 * k, seed, trials)
    exps = line_exponents(ctx, A, B, states)
    counts = np.bincount(exps, minlength=ctx.n)
    dist = Distribution(ctx.n, counts / trials)
    return EmpiricalResult(
        dist=dist,
        counts={int(e): int(counts[e]) for e in np.flatnonzero(counts)},
        reference=reference,
        tv=tv(dist, reference),
    )
