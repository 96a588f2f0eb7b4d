"""Exact and numerical verification of power-mean identities for character sums mod p."""

__version__ = "0.1.0"

from charmean.fp import PrimeContext, UnsupportedModulus, build_context, legendre, mod_inv
from charmean.characters import DirichletCharacter, char_eval, char_parity, enumerate_characters

__all__ = [
    "__version__",
    "PrimeContext",
    "UnsupportedModulus",
    "build_context",
    "legendre",
    "mod_inv",
    "DirichletCharacter",
    "char_eval",
    "char_parity",
    "enumerate_characters",
]
