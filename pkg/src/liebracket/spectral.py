"""Fourier analysis of the reduced walk on ``Z_n``.

Characters ``chi_j(x) = w**(j x)`` with ``w = exp(2 pi i / n)`` diagonalize
the step operator. A character has a unit-modulus eigenvalue exactly when
``n / d`` divides ``j`` (``d = gcd(a, b, n)``); this is decided on integers,
never by comparing ``|lambda_j|`` with 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import TrivialLattice
from .walk import Distribution, WalkParams, tv

__all__ = [
    "Spectrum",
    "LatticeInfo",
    "WitnessRecord",
    "eigenvalues",
    "limiting",
    "sigma_fourier",
    "distance_to_limit",
    "tv",
    "u_vectors",
    "minimal_norm",
    "bound_upper",
    "mixing_k_star",
    "witness_lower",
]


@dataclass(frozen=True, eq=False)
class Spectrum:
    n: int
    lambdas: np.ndarray
    flat_set: tuple[int, ...]

    @property
    def flat_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.flat_set)] = True
        return mask

    @property
    def rho(self) -> float:
        """Largest modulus among the non-unit eigenvalues (0 if there are none)."""
        rest = np.abs(self.lambdas[~self.flat_mask])
        return float(rest.max()) if rest.size else 0.0


def _phase(j: np.ndarray, shift: int, n: int) -> np.ndarray:
    # w**(-j*shift), reduced mod n on integers first
    return np.exp(-2j * np.pi * ((j * shift) % n) / n)


def eigenvalues(params: WalkParams) -> Spectrum:
    n = params.n
    j = np.arange(n, dtype=np.int64)
    lam = sum(w * _phase(j, s, n) for s, w in params.steps)
    step = n // params.d
    return Spectrum(n=n, lambdas=lam, flat_set=tuple(range(0, n, step)))


def limiting(params: WalkParams, k: int) -> Distribution:
    """Uniform law on the coset ``k*alpha_log + d Z_n``."""
    n, d = params.n, params.d
    probs = np.zeros(n)
    probs[(k * params.alpha_log + np.arange(0, n, d)) % n] = d / n
    return Distribution(n, probs)


def _powers(params: WalkParams, spec: Spectrum, k: int) -> np.ndarray:
    n = params.n
    out = np.power(spec.lambdas, k)
    flat = np.array(spec.flat_set, dtype=np.int64)
    # unit eigenvalues are w**(-j*alpha_log) exactly; raise them on integers
    out[flat] = np.exp(-2j * np.pi * ((flat * (k % n) % n) * params.alpha_log % n) / n)
    return out


def sigma_fourier(params: WalkParams, k: int) -> Distribution:
    """Law after ``k`` steps from the inverse character sum of ``lambda_j**k``."""
    spec = eigenvalues(params)
    sigma = np.fft.ifft(_powers(params, spec, k)).real
    if sigma.min() < -1e-9:
        raise AssertionError(f"character sum produced mass {sigma.min()}")
    return Distribution(params.n, np.clip(sigma, 0.0, None))


def distance_to_limit(params: WalkParams, k: int) -> float:
    """``tv(sigma_k, phi_k)`` from the non-unit characters alone.

    Summing only the decaying part avoids cancellation when the distance
    is tiny.
    """
    spec = eigenvalues(params)
    pw = _powers(params, spec, k)
    pw[spec.flat_mask] = 0
    return 0.5 * float(np.abs(np.fft.ifft(pw).real).sum())


@dataclass(frozen=True)
class LatticeInfo:
    n: int
    a: int
    b: int
    s_min: int
    argmin_j: int

    @property
    def delta2(self) -> Fraction:
        return Fraction(self.s_min, self.n**2)

    @property
    def delta(self) -> float:
        return math.sqrt(self.s_min) / self.n


def u_vectors(params: WalkParams) -> np.ndarray:
    """Integer numerators of ``u_j``: row ``j`` is ``n * u_j``."""
    n = params.n
    j = np.arange(n, dtype=np.int64)
    out = np.stack([(j * params.a) % n, (j * params.b) % n], axis=1)
    # centered_residue, vectorized
    return np.where(2 * out > n, out - n, out)


def minimal_norm(params: WalkParams) -> LatticeInfo:
    if params.a == 0 and params.b == 0:
        raise TrivialLattice("a = b = 0: every u_j vanishes")
    u = u_vectors(params)
    sq = u[:, 0] ** 2 + u[:, 1] ** 2
    sq[sq == 0] = np.iinfo(np.int64).max
    j = int(np.argmin(sq))
    return LatticeInfo(params.n, params.a, params.b, int(sq[j]), j)


def bound_upper(params: WalkParams, k: int) -> tuple[float, float]:
    """``(11 d exp(-k Delta^2), sum of |lambda_j|**(2k) over non-unit j)``.

    The first bounds the squared TV distance, the second the squared L1
    distance.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    info = minimal_norm(params)
    spec = eigenvalues(params)
    rest = np.abs(spec.lambdas[~spec.flat_mask])
    return 11 * params.d * math.exp(-k * info.s_min / info.n**2), float(np.sum(rest ** (2 * k)))


def mixing_k_star(params: WalkParams, eps: float) -> int:
    """Smallest ``k`` where the certified bound puts ``tv(sigma_k, phi_k) <= eps``."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    info = minimal_norm(params)
    log_ratio = math.log(11 * params.d / eps**2)
    if log_ratio <= 0:
        return 0
    k = math.ceil(log_ratio * info.n**2 / info.s_min)
    # guard against rounding at the boundary
    while k > 0 and 11 * params.d * math.exp(-(k - 1) * info.s_min / info.n**2) <= eps**2:
        k -= 1
    while 11 * params.d * math.exp(-k * info.s_min / info.n**2) > eps**2:
        k += 1
    return k


@dataclass(frozen=True)
class WitnessRecord:
    S: frozenset
    sigma_mass_lb: float | Fraction
    phi_mass_ub: float | Fraction
    admissible: int

    @property
    def dist_lb(self):
        return self.sigma_mass_lb - self.phi_mass_ub


def witness_lower(params: WalkParams, k: int, lam: float, exact: bool = False) -> WitnessRecord:
    """Lower-bound ``tv(sigma_k, phi_k)`` through a set where ``sigma_k`` concentrates.

    ``x`` and ``y`` count how often ``beta_log`` and ``gamma_log`` are taken
    in ``k`` steps. Counts within ``lam * sqrt(k)`` of ``k/4`` are admitted;
    their exact multinomial mass bounds ``sigma_k(S)`` from below while
    ``phi_k(S) = |S| d / n``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    n = params.n
    radius2 = 16 * lam * lam * k
    ok = [x for x in range(k + 1) if (4 * x - k) ** 2 <= radius2]
    pairs = [(x, y) for x in ok for y in ok if x + y <= k]
    S = frozenset(
        ((k - x - y) * params.alpha_log + x * params.beta_log + y * params.gamma_log) % n for x, y in pairs
    )
    if exact:
        mass = sum(
            (Fraction(math.comb(k, x) * math.comb(k - x, y), 2 ** (k + x + y)) for x, y in pairs), Fraction(0)
        )
        phi = Fraction(len(S) * params.d, n)
    else:
        lg = [math.lgamma(i + 1) for i in range(k + 1)]
        half = math.log(0.5)
        terms = [
            lg[k] - lg[k - x - y] - lg[x] - lg[y] + (k + x + y) * half for x, y in pairs
        ]
        mass = math.fsum(math.exp(t) for t in terms)
        phi = len(S) * params.d / n
    return WitnessRecord(S=S, sigma_mass_lb=mass, phi_mass_ub=phi, admissible=len(pairs))
