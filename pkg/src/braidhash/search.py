"""Brute-force and meet-in-the-middle searches for braid approximations.

Canonical words are enumerated level by level as a prefix tree: every word is
its parent word followed by one block on the other generator.  The tree keeps
only parent pointers, the last block and the unit quaternion of the word, so a
whole level is produced with a single vectorized quaternion product.

Every engine reduces its candidates with the same total order: smallest
distance (ties within 1e-12), then shorter braid, then lexicographically
smaller text.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from braidhash.braid import ALPHABETS, EMPTY, BraidWord, block_matrix, concat_reduce, evaluate
from braidhash.errors import InvalidInputError, ResourceLimitError
from braidhash.su2 import (
    ALGEBRA_TOL,
    IDENTITY,
    _distance_unchecked,
    check_unitary,
    matrix_to_quaternion,
    quaternion_conjugate,
    quaternion_multiply,
)

TIE_TOL = 1e-12
POOL_TOL = 1e-9
MAX_POOL = 4096

DEFAULT_EXHAUSTIVE_LIMIT = 30_000_000  # words; full alphabet up to length 15
DEFAULT_MEMORY_BUDGET = 2 * 1024**3  # bytes
_BYTES_PER_WORD = 48
_BYTES_PER_INDEXED_WORD = 160  # tree arrays + doubled kd-tree points + query scratch

XI_GUIDE = 7.3


@dataclass(frozen=True)
class SearchResult:
    word: BraidWord
    dist: float
    nodes_visited: int
    wall_time: float


def level_counts(max_length, alphabet="full"):
    """Number of canonical words of each exact length ``0..max_length``."""
    costs = [abs(k) for k in ALPHABETS[alphabet]]
    ending = [0] * (max_length + 1)  # words of length L ending with a given generator
    for length in range(1, max_length + 1):
        ending[length] = sum(1 if length == c else ending[length - c] for c in costs if c <= length)
    return [1] + [2 * e for e in ending[1:]]


def word_count(max_length, alphabet="full"):
    return sum(level_counts(max_length, alphabet))


def select_best(words, target):
    """Pick the best of ``words`` for ``target`` under the repository-wide total order."""
    scored = []
    for w in set(words):
        scored.append((_distance_unchecked(evaluate(w), target), len(w), str(w), w))
    if not scored:
        raise InvalidInputError("no candidates to select from")
    dmin = min(s[0] for s in scored)
    tied = [s for s in scored if s[0] <= dmin + TIE_TOL]
    best = min(tied, key=lambda s: (s[1], s[2]))
    return best[3], best[0]


class WordTree:
    """All canonical words up to ``max_length`` over one exponent alphabet.

    Index 0 is the empty word; words are stored in order of length, and
    within a length by (last exponent in alphabet order, last generator,
    parent index).
    """

    def __init__(self, max_length, alphabet="full"):
        if max_length < 0:
            raise InvalidInputError("max_length must be >= 0")
        if alphabet not in ALPHABETS:
            raise InvalidInputError(f"unknown alphabet {alphabet!r}")
        self.max_length = max_length
        self.alphabet = alphabet
        counts = level_counts(max_length, alphabet)
        total = sum(counts)
        self.level_end = np.cumsum(counts)
        self.parent = np.zeros(total, dtype=np.int64)
        self.gen = np.zeros(total, dtype=np.int8)
        self.exp = np.zeros(total, dtype=np.int8)
        self.quat = np.zeros((total, 4))
        self.quat[0, 0] = 1.0
        block_quat = {
            (g, k): matrix_to_quaternion(block_matrix(g, k)) for g in (1, 2) for k in ALPHABETS[alphabet]
        }
        fill = 1
        for length in range(1, max_length + 1):
            for k in ALPHABETS[alphabet]:
                c = abs(k)
                if c > length:
                    continue
                lo = 0 if length == c else self.level_end[length - c - 1]
                hi = self.level_end[length - c]
                src = np.arange(lo, hi)
                src_gen = self.gen[lo:hi]
                for g in (1, 2):
                    parents = src[src_gen != g]
                    n = len(parents)
                    sl = slice(fill, fill + n)
                    self.parent[sl] = parents
                    self.gen[sl] = g
                    self.exp[sl] = k
                    self.quat[sl] = quaternion_multiply(self.quat[parents], block_quat[(g, k)])
                    fill += n
        assert fill == total

    def __len__(self):
        return len(self.parent)

    def count_upto(self, length):
        return int(self.level_end[min(length, self.max_length)])

    def word(self, i):
        blocks = []
        i = int(i)
        while i:
            blocks.append((int(self.gen[i]), int(self.exp[i])))
            i = int(self.parent[i])
        return BraidWord(tuple(reversed(blocks)))


@lru_cache(maxsize=4)
def _cached_tree(max_length, alphabet):
    return WordTree(max_length, alphabet)


def get_tree(max_length, alphabet="full"):
    return _cached_tree(max_length, alphabet)


def enumerate_words(max_length, alphabet="full"):
    """Yield every canonical word of length ``1..max_length`` exactly once."""
    tree = get_tree(max_length, alphabet) if max_length > 0 else None
    if tree is None:
        return
    for i in range(1, len(tree)):
        yield tree.word(i)


def _pool_from_dots(absdots, quats, t, offset=0):
    best = absdots.max()
    idx = np.flatnonzero(absdots >= best - 1e-10)
    if len(idx) > MAX_POOL:
        q = quats[idx]
        s = np.sign(q @ t)[:, None]
        chord = np.linalg.norm(q - s * t, axis=1)
        idx = idx[np.argsort(chord, kind="stable")[:MAX_POOL]]
    return idx + offset


def _check_exhaustive(max_length, alphabet, limit, memory_budget):
    n = word_count(max_length, alphabet)
    if n > limit:
        raise ResourceLimitError(
            f"exhaustive search over {n} words (length <= {max_length}, alphabet {alphabet}) "
            f"exceeds the limit of {limit}; use mitm_best instead"
        )
    if n * _BYTES_PER_WORD > memory_budget:
        raise ResourceLimitError(
            f"exhaustive search needs ~{n * _BYTES_PER_WORD} bytes for {n} words; "
            f"budget is {memory_budget}; use mitm_best instead"
        )
    return n


def brute_force_best(target, max_length, alphabet="full", *, limit=DEFAULT_EXHAUSTIVE_LIMIT,
                     memory_budget=DEFAULT_MEMORY_BUDGET, tree=None):
    """Best canonical word of length ``<= max_length`` by exhaustive scan."""
    start = time.perf_counter()
    target = check_unitary(target, "target")
    if max_length < 0:
        raise InvalidInputError("max_length must be >= 0")
    _check_exhaustive(max_length, alphabet, limit, memory_budget)
    if tree is None or tree.alphabet != alphabet or tree.max_length < max_length:
        tree = get_tree(max_length, alphabet)
    n = tree.count_upto(max_length)
    t = matrix_to_quaternion(target)
    absdots = np.empty(n)
    chunk = 1 << 20
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        absdots[lo:hi] = np.abs(tree.quat[lo:hi] @ t)
    pool = _pool_from_dots(absdots, tree.quat[:n], t)
    word, dist = select_best([tree.word(i) for i in pool], target)
    return SearchResult(word, dist, n, time.perf_counter() - start)


class HalfTable:
    """Words up to half length with a spatial index over their PSU(2) points.

    Each word contributes both ``q`` and ``-q`` to the index, so Euclidean
    nearest neighbours are nearest in the phase-invariant metric.
    """

    def __init__(self, half_length, alphabet="full"):
        self.tree = get_tree(half_length, alphabet)
        self.half_length = half_length
        self.alphabet = alphabet
        self._index = {}

    def index(self, length):
        if length not in self._index:
            n = self.tree.count_upto(length)
            q = self.tree.quat[:n]
            self._index[length] = cKDTree(np.vstack([q, -q]))
        return self._index[length]


@lru_cache(maxsize=2)
def get_half_table(half_length, alphabet="full"):
    return HalfTable(half_length, alphabet)


def default_radius(length):
    return 3.0 * math.exp(-length / XI_GUIDE)


def mitm_best(target, length, radius=None, alphabet="full", *, memory_budget=DEFAULT_MEMORY_BUDGET,
              workers=1):
    """Best word of length ``<= length`` by pairing two half-length enumerations.

    Each left half ``w1`` queries the index of right halves for points within
    ``radius`` of ``w1^-1 T``.  An empty shell is retried with doubled radius
    (three times) and then without a bound.  All pairs within 1e-9 of the best
    found are reduced with the shared total order, so the result matches an
    exhaustive scan of the same word set.
    """
    start = time.perf_counter()
    target = check_unitary(target, "target")
    if length < 0:
        raise InvalidInputError("length must be >= 0")
    if _distance_unchecked(IDENTITY, target) <= ALGEBRA_TOL:
        return SearchResult(EMPTY, _distance_unchecked(IDENTITY, target), 1, time.perf_counter() - start)
    left_len = (length + 1) // 2
    right_len = length // 2
    n_half = word_count(left_len, alphabet)
    need = n_half * _BYTES_PER_INDEXED_WORD
    if need > memory_budget:
        raise ResourceLimitError(
            f"half table for length {length} holds {n_half} words (~{need} bytes), "
            f"over the memory budget of {memory_budget} bytes"
        )
    half = get_half_table(left_len, alphabet)
    tree = half.tree
    kd = half.index(right_len)
    n_left = tree.count_upto(left_len)
    n_right = tree.count_upto(right_len)
    t = matrix_to_quaternion(target)
    queries = quaternion_multiply(quaternion_conjugate(tree.quat[:n_left]), t)

    radius = default_radius(length) if radius is None else float(radius)
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    nn = None
    for attempt in range(5):
        bound = radius * 2**attempt if attempt < 4 else np.inf
        nn, _ = kd.query(queries, k=1, distance_upper_bound=bound, workers=workers)
        if np.isfinite(nn).any():
            break
    dmin = float(nn.min())
    shell = dmin + POOL_TOL
    lefts = np.flatnonzero(nn <= shell)
    words = set()
    for li, rights in zip(lefts, kd.query_ball_point(queries[lefts], shell, workers=workers)):
        w1 = tree.word(li)
        for ri in sorted(set(r % n_right for r in rights)):
            words.add(concat_reduce(w1, tree.word(ri)))
            if len(words) > MAX_POOL:
                break
    word, dist = select_best(words, target)
    return SearchResult(word, dist, n_left + len(words), time.perf_counter() - start)


def build_table(N, method="exhaustive", alphabet="even", *, group=None, threads=1,
                memory_budget=DEFAULT_MEMORY_BUDGET):
    """Approximate each of the 60 group elements by its best word of length ``<= N``."""
    from braidhash.icosa import build_group
    from braidhash.pseudogroup import PseudoGroupTable

    group = group or build_group()
    if method == "exhaustive":
        tree = get_tree(N, alphabet)

        def search(i):
            return brute_force_best(group.element_su2(i), N, alphabet, tree=tree,
                                    memory_budget=memory_budget).word
    elif method == "mitm":
        def search(i):
            return mitm_best(group.element_su2(i), N, alphabet=alphabet, memory_budget=memory_budget).word
    else:
        raise InvalidInputError(f"unknown method {method!r}")

    indices = range(1, len(group))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            words = list(pool.map(search, indices))
    else:
        words = [search(i) for i in indices]
    return PseudoGroupTable.from_words(N, [EMPTY] + words, group)
