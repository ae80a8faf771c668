"""Braid words over the two Fibonacci-anyon generators.

A word is a tuple of ``(generator, exponent)`` blocks with alternating
generators.  It reads left to right as a left-to-right matrix product.  Its
text form is ``s1^k`` / ``s2^k`` blocks separated by spaces, with ``e`` for
the empty word.

Since ``sigma_i^10 = 1`` exactly in this representation, exponents are folded
mod 10 into ``[-4, 5]``.
"""

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from braidhash.errors import InvalidInputError

TAU = (math.sqrt(5.0) - 1.0) / 2.0

# Exponents of a single block, in enumeration order.  "full" is every nonzero
# residue mod 10 at minimal crossing cost; "even" keeps sigma^{+-2}, sigma^{+-4}.
ALPHABETS = {
    "full": (1, -1, 2, -2, 3, -3, 4, -4, 5),
    "even": (2, -2, 4, -4),
}

_TOKEN = re.compile(r"^s([12])\^([+-]?\d+)$")


def fold_exponent(k):
    """Reduce ``k`` mod 10 into ``[-4, 5]``."""
    r = k % 10
    return r - 10 if r > 5 else r


@dataclass(frozen=True, order=True)
class BraidWord:
    blocks: tuple = ()

    def __post_init__(self):
        prev = None
        for gen, exp in self.blocks:
            if gen not in (1, 2):
                raise InvalidInputError(f"generator must be 1 or 2, got {gen!r}")
            if exp == 0 or abs(exp) > 5:
                raise InvalidInputError(f"exponent {exp} out of range")
            if gen == prev:
                raise InvalidInputError("adjacent blocks share a generator")
            prev = gen

    @classmethod
    def from_blocks(cls, blocks):
        """Canonicalize an arbitrary block sequence (merging and folding)."""
        return cls(_reduce_blocks(list(blocks)))

    def __len__(self):
        return sum(abs(e) for _, e in self.blocks)

    @property
    def length(self):
        return len(self)

    def __str__(self):
        return format_word(self)

    def __repr__(self):
        return f"BraidWord({format_word(self)!r})"

    def __bool__(self):
        return bool(self.blocks)


EMPTY = BraidWord()


def _reduce_blocks(blocks):
    # Stack-based free reduction: merging may zero a block and expose another
    # same-generator boundary, which the stack handles by construction.
    out = []
    for gen, exp in blocks:
        exp = fold_exponent(exp)
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            merged = fold_exponent(out[-1][1] + exp)
            out.pop()
            if merged:
                out.append((gen, merged))
        else:
            out.append((gen, exp))
    return tuple(out)


def concat_reduce(w1, w2):
    return BraidWord(_reduce_blocks(list(w1.blocks) + list(w2.blocks)))


def concat_many(words):
    blocks = []
    for w in words:
        blocks.extend(w.blocks)
    return BraidWord(_reduce_blocks(blocks))


def inverse(w):
    return BraidWord.from_blocks((g, -e) for g, e in reversed(w.blocks))


def format_word(w):
    if not w.blocks:
        return "e"
    return " ".join(f"s{g}^{e}" for g, e in w.blocks)


def parse(text):
    """Parse the braid text grammar; adjacent same-generator blocks are merged."""
    tokens = text.split()
    if tokens == ["e"]:
        return EMPTY
    if not tokens:
        raise InvalidInputError("empty braid text (use 'e' for the empty word)")
    blocks = []
    for tok in tokens:
        m = _TOKEN.match(tok)
        if m is None:
            raise InvalidInputError(f"malformed braid token {tok!r}")
        k = int(m.group(2))
        if k == 0:
            raise InvalidInputError(f"zero exponent in token {tok!r}")
        blocks.append((int(m.group(1)), k))
    return BraidWord.from_blocks(blocks)


@lru_cache(maxsize=None)
def _generators():
    s1 = np.diag([np.exp(-4j * np.pi / 5), -np.exp(-2j * np.pi / 5)])
    off = -math.sqrt(TAU) * np.exp(2j * np.pi / 5)
    s2 = np.array([[-TAU * np.exp(-1j * np.pi / 5), off], [off, -TAU]], dtype=complex)
    return {1: s1, 2: s2}


def generator_matrix(gen, inverse=False):
    """The elementary braiding matrix sigma_gen (or its inverse)."""
    if gen not in (1, 2):
        raise InvalidInputError(f"generator must be 1 or 2, got {gen!r}")
    m = _generators()[gen]
    return (m.conj().T if inverse else m).copy()


@lru_cache(maxsize=None)
def _block_power(gen, exp):
    m = _generators()[gen]
    if exp < 0:
        m = m.conj().T
    out = np.eye(2, dtype=complex)
    for _ in range(abs(exp)):
        out = out @ m
    out.setflags(write=False)
    return out


def block_matrix(gen, exp):
    return _block_power(gen, fold_exponent(exp))


def evaluate(w):
    out = np.eye(2, dtype=complex)
    for gen, exp in w.blocks:
        out = out @ _block_power(gen, exp)
    return out


def random_word(rng, max_blocks, alphabet="full"):
    """Random canonical word; ``rng`` is a ``numpy.random.Generator``."""
    exps = ALPHABETS[alphabet]
    nblocks = int(rng.integers(0, max_blocks + 1))
    gen = int(rng.integers(1, 3))
    blocks = []
    for _ in range(nblocks):
        blocks.append((gen, int(exps[rng.integers(len(exps))])))
        gen = 3 - gen
    return BraidWord(tuple(blocks))
