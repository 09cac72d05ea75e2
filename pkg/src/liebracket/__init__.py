"""The random Lie bracket walk on sl2(F_p).

Exact arithmetic in sl2(F_p), the reduction of the bracket chain to a
walk on ``Z_{p-1}``, its Fourier analysis with certified mixing bounds,
the Gram-fiber counts behind the limiting law, Euler-product density
tools and short bracket-word certificates for the diameter.
"""

from .errors import LieBracketError
from .field import PrimeContext, make_prime_context
from .sl2 import GramTriple, Sl2Element, bracket, gram_triple, inner
from .walk import Distribution, WalkParams, evolve, reduce, simulate, tv

__all__ = [
    "Distribution",
    "GramTriple",
    "LieBracketError",
    "PrimeContext",
    "Sl2Element",
    "WalkParams",
    "bracket",
    "evolve",
    "gram_triple",
    "inner",
    "make_prime_context",
    "reduce",
    "simulate",
    "tv",
]

__version__ = "0.1.0"
