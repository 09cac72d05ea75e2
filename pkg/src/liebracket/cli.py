"""Batch experiments writing CSV.

Every subcommand is a pure function of its :class:`ExperimentConfig`;
trial ``i`` draws its randomness from ``derive_seed(seed, i)``, and rows
are emitted in trial order whatever ``--jobs`` is.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from . import density, diameter, gram, spectral
from .errors import (
    DegenerateGram,
    DegeneratePair,
    LieBracketError,
    NotReachable,
    SingularGram,
    TrivialLattice,
)
from .field import PrimeContext, make_prime_context
from .sl2 import Sl2Element, gram_triple, is_generating_pair, random_element
from .walk import WalkParams, empirical, reduce, simulate

DEFAULT_INTERVALS = ((0.70, 0.73), (0.74, 0.745))


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    p: int
    trials: int = 0
    seed: int = 0
    k_list: tuple[str, ...] = ()
    eps: float = 0.1
    out: str | None = None
    cap: int | None = None
    bound: int = 100
    jobs: int = 1
    intervals: tuple[tuple[float, float], ...] = DEFAULT_INTERVALS
    A: tuple[int, int, int] | None = None
    B: tuple[int, int, int] | None = None
    steps: int = 5
    choices: str | None = None


def derive_seed(master: int, index: int) -> int:
    digest = hashlib.blake2b(f"{master}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def sample_pair(ctx: PrimeContext, seed: int) -> tuple[Sl2Element, Sl2Element, WalkParams, int]:
    """Uniform ``(A, B)`` conditioned on a nondegenerate reduction."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    rejections = 0
    while True:
        A, B = random_element(rng, ctx.p), random_element(rng, ctx.p)
        try:
            return A, B, reduce(ctx, A, B), rejections
        except (DegeneratePair, DegenerateGram):
            rejections += 1


def resolve_k(token: str, n: int, params: WalkParams | None = None, eps: float = 0.1) -> int:
    """Turn ``"100"``, ``"40n"``, ``"0.01n"`` or ``"kstar"`` into a step count."""
    token = token.strip()
    if token == "kstar":
        if params is None:
            raise ValueError("kstar needs walk parameters")
        try:
            return spectral.mixing_k_star(params, eps)
        except TrivialLattice:
            return 0
    if token.endswith("n"):
        return math.floor(float(token[:-1] or 1) * n)
    return int(token)


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


PRECUTOFF_HEADER = [
    "p", "trial", "seed", "a", "b", "d", "smin", "n2", "k", "tv", "prop62_bound", "rho_pow_k_half", "rejections",
]


def _precutoff_trial(config: ExperimentConfig, trial: int) -> list[list]:
    ctx = make_prime_context(config.p)
    _, _, params, rejections = sample_pair(ctx, derive_seed(config.seed, trial))
    n = params.n
    try:
        info = spectral.minimal_norm(params)
        smin = info.s_min
    except TrivialLattice:
        info, smin = None, ""
    rho = spectral.eigenvalues(params).rho
    rows = []
    for token in config.k_list:
        k = resolve_k(token, n, params, config.eps)
        dist = spectral.distance_to_limit(params, k)
        bound = math.sqrt(11 * params.d * math.exp(-k * info.s_min / n**2)) if info else 0.0
        rows.append([
            config.p, trial, config.seed, params.a, params.b, params.d, smin, n * n, k,
            fmt(dist), fmt(bound), fmt(rho**k / 2),
            rejections,
        ])
    return rows


def run_precutoff(config: ExperimentConfig) -> tuple[list[str], list[list]]:
    """Exact ``tv(sigma_k, phi_k)`` for random pairs, with upper and lower bounds.

    ``prop62_bound`` is the square root of ``11 d exp(-k Delta^2)``, an
    upper bound on ``tv``; ``rho_pow_k_half`` is a lower bound.
    """
    if config.p < 5:
        raise ValueError("precutoff needs p >= 5")
    per_trial = _map(partial(_precutoff_trial, config), range(config.trials), config.jobs)
    return PRECUTOFF_HEADER, [row for rows in per_trial for row in rows]


UNIFORM_HEADER = [
    "p", "n", "coprime_pairs", "uniform_prob", "euler_product", "sl2_prob", "abs_diff", "bound", "within_bound",
    "mc_trials", "mc_prob",
]


def _uniform_trial(p: int, master: int, trial: int) -> int:
    ctx = make_prime_context(p)
    rng = np.random.Generator(np.random.Philox(key=derive_seed(master, trial)))
    A, B = random_element(rng, p), random_element(rng, p)
    try:
        return int(reduce(ctx, A, B).d == 1)
    except (DegeneratePair, DegenerateGram):
        return 0


def sl2_uniform_probability(ctx: PrimeContext):
    """Exact chance over uniform pairs that the limit law is uniform on the line."""
    coprime = density.coprime_pair_count(ctx.n)
    return gram.pushforward_mass_from_counts(ctx, coprime, _totient(ctx))


def _totient(ctx: PrimeContext) -> int:
    out = ctx.n
    for q, _ in ctx.factors_n:
        out = out // q * (q - 1)
    return out


def run_uniform_prob(config: ExperimentConfig) -> tuple[list[str], list[list]]:
    ctx = make_prime_context(config.p)
    n = ctx.n
    coprime = density.coprime_pair_count(n)
    uniform = coprime / n**2
    sl2 = sl2_uniform_probability(ctx)
    diff = abs(float(sl2) - uniform)
    mc = ""
    if config.trials:
        hits = _map(partial(_uniform_trial, config.p, config.seed), range(config.trials), config.jobs)
        mc = fmt(sum(hits) / config.trials)
    row = [
        config.p, n, coprime, fmt(uniform), fmt(float(density.euler_product(n))), fmt(float(sl2)),
        fmt(diff), fmt(15 / config.p), diff < 15 / config.p, config.trials, mc,
    ]
    return UNIFORM_HEADER, [row]


FIBERS_HEADER = ["p", "x11", "x12", "x22", "rank", "formula", "oracle", "match"]


def run_fibers(config: ExperimentConfig) -> tuple[list[str], list[list]]:
    ctx = make_prime_context(config.p)
    p = ctx.p
    rows = []
    for x11 in range(p):
        for x12 in range(p):
            for x22 in range(p):
                X = gram.SymMatrix2(x11, x12, x22, p)
                f, o = gram.fiber_size(ctx, X), gram.fiber_size_oracle(ctx, X)
                rows.append([p, x11, x12, x22, X.rank(), f, o, f == o])
    return FIBERS_HEADER, rows


DIAMETER_HEADER = ["p", "kind", "trial", "seed", "a", "cover_n", "cap", "weight", "bound", "ok"]


def _sample_certificate_pair(ctx: PrimeContext, seed: int):
    rng = np.random.Generator(np.random.Philox(key=seed))
    p = ctx.p
    while True:
        A, B = random_element(rng, p), random_element(rng, p)
        if not is_generating_pair(A, B):
            continue
        target = random_element(rng, p)
        return A, B, target


def _diameter_trial(config: ExperimentConfig, trial: int) -> list:
    ctx = make_prime_context(config.p)
    A, B, target = _sample_certificate_pair(ctx, derive_seed(config.seed, trial))
    alpha = gram_triple(A, B).alpha
    try:
        cert = diameter.full_witness(ctx, A, B, target)
    except (SingularGram, NotReachable) as exc:
        return [config.p, "certificate", trial, config.seed, alpha, "", "", "", "", type(exc).__name__]
    bound = 12 * cert.degree + 8
    ok = cert.verify() and cert.weight <= bound
    return [config.p, "certificate", trial, config.seed, alpha, cert.degree, "", cert.weight, bound, ok]


def run_diameter(config: ExperimentConfig) -> tuple[list[str], list[list]]:
    """Cover times of ``P_n(a)`` for every ``a`` plus full certificates for random pairs."""
    ctx = make_prime_context(config.p)
    cap = config.cap if config.cap is not None else math.floor(10 * math.log(ctx.p))
    rows = []
    for a in range(ctx.p):
        t = diameter.pn_cover_time(ctx, a, cap)
        rows.append([ctx.p, "cover", "", "", a, "" if t is None else t, cap, "", cap, t is not None])
    rows += _map(partial(_diameter_trial, config), range(config.trials), config.jobs)
    return DIAMETER_HEADER, rows


DENSITY_HEADER = ["kind", "j", "prime", "value", "tail", "s", "t", "bound", "result"]


def run_density(config: ExperimentConfig) -> tuple[list[str], list[list]]:
    rows = []
    for j in range(1, 5):
        q = int(density.first_primes(j)[-1])
        rows.append(["x", j, q, fmt(density.x_value(j)), fmt(density.tail_sum(j + 1)), "", "", "", ""])
    ks = [int(k) for k in config.k_list] if config.k_list else list(range(1, 11))
    for k in ks:
        rows.append(["tail_condition", k, "", "", "", "", "", "", density.tail_condition(k)])
    for s, t in config.intervals:
        try:
            result = density.realize_interval(s, t, config.bound)
            value = fmt(float(density.euler_product(result - 1)))
        except LieBracketError as exc:
            result, value = type(exc).__name__, ""
        rows.append(["realize", "", "", value, "", fmt(s), fmt(t), config.bound, result])
    return DENSITY_HEADER, rows


def run_simulate(config: ExperimentConfig) -> tuple[list[str], list[list]]:
    """A single trajectory, or empirical laws of ``X_{2k}`` when ``trials > 0``."""
    ctx = make_prime_context(config.p)
    if config.A and config.B:
        A, B = Sl2Element(*config.A, ctx.p), Sl2Element(*config.B, ctx.p)
    else:
        A, B, _, _ = sample_pair(ctx, derive_seed(config.seed, 0))
    if config.trials:
        header = ["p", "seed", "k", "trials", "exponent", "scalar", "count", "empirical", "limit", "tv"]
        rows = []
        for token in config.k_list or ("50",):
            k = resolve_k(token, ctx.n)
            res = empirical(ctx, A, B, k, config.trials, config.seed)
            support = sorted(set(res.counts) | set(res.reference.support()))
            for e in support:
                rows.append([
                    ctx.p, config.seed, k, config.trials, e, ctx.exp(e), res.counts.get(e, 0),
                    fmt(res.dist[e]), fmt(res.reference[e]), fmt(res.tv),
                ])
        return header, rows
    choices = list(config.choices) if config.choices else None
    steps = len(choices) if choices else config.steps
    traj = simulate(ctx, A, B, steps, config.seed, choices=choices)
    header = ["step", "a11", "a12", "a21", "a22"]
    return header, [[i, X.a11, X.a12, X.a21, X.a22] for i, X in enumerate(traj)]


RUNNERS = {
    "precutoff": run_precutoff,
    "uniform-prob": run_uniform_prob,
    "fibers": run_fibers,
    "diameter": run_diameter,
    "density": run_density,
    "simulate": run_simulate,
}


def render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def run(config: ExperimentConfig) -> str:
    header, rows = RUNNERS[config.subcommand](config)
    return render_csv(header, rows)


def _intervals(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for part in text.split(","):
        s, t = part.split(":")
        out.append((float(s), float(t)))
    return tuple(out)


def _triple(text: str) -> tuple[int, int, int]:
    vals = tuple(int(v) for v in text.split(","))
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("expected a11,a12,a21")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liebracket", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in RUNNERS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--p", type=int, required=True)
        cmd.add_argument("--trials", type=int, default=0)
        cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--k-list", default="", help="comma-separated; accepts 40n, 0.01n, kstar")
        cmd.add_argument("--eps", type=float, default=0.1)
        cmd.add_argument("--out", default=None, help="output file (default stdout)")
        cmd.add_argument("--cap", type=int, default=None)
        cmd.add_argument("--bound", type=int, default=100)
        cmd.add_argument("--jobs", type=int, default=1)
        if name == "density":
            cmd.add_argument("--intervals", type=_intervals, default=DEFAULT_INTERVALS, help="s:t,s:t")
        if name == "simulate":
            cmd.add_argument("--A", type=_triple, default=None, help="a11,a12,a21")
            cmd.add_argument("--B", type=_triple, default=None, help="a11,a12,a21")
            cmd.add_argument("--steps", type=int, default=5)
            cmd.add_argument("--choices", default=None, help="e.g. BABBB")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    k_list = tuple(t for t in args.k_list.split(",") if t.strip())
    config = ExperimentConfig(
        subcommand=args.subcommand, p=args.p, trials=args.trials, seed=args.seed, k_list=k_list,
        eps=args.eps, out=args.out, cap=args.cap, bound=args.bound, jobs=args.jobs,
    )
    if args.subcommand == "density":
        config = replace(config, intervals=args.intervals)
    if args.subcommand == "simulate":
        config = replace(config, A=args.A, B=args.B, steps=args.steps, choices=args.choices)
    return config


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    try:
        text = run(config)
    except LieBracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
