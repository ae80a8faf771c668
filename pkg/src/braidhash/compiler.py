"""Preprocessor, main processor and iterated refinement of the hashing compiler."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from braidhash.braid import BraidWord, concat_reduce, evaluate
from braidhash.errors import ConfigurationError, InvalidInputError
from braidhash.pseudogroup import PseudoGroupTable, TableEntry
from braidhash.search import MAX_POOL, select_best
from braidhash.su2 import (
    _distance_unchecked,
    check_unitary,
    matrix_to_quaternion,
    quaternion_conjugate,
    quaternion_multiply,
)

GROUP_ORDER = 60


@dataclass(frozen=True)
class HashParams:
    """Preprocessor ``(l, m)``, main processor ``(L, n)`` and ``q`` refinement passes.

    ``levels`` lists the table length used by each pass; it defaults to
    ``(L,)`` and must have ``q`` entries starting with ``L``.
    """

    l: int = 8  # noqa: E741
    m: int = 3
    L: int = 24
    n: int = 3
    q: int = 1
    levels: tuple = ()

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError("m must be >= 1")
        if self.n < 1:
            raise InvalidInputError("n must be >= 1 (n = 1 is a debug mode)")
        if self.q < 1:
            raise InvalidInputError("q must be >= 1")
        levels = tuple(int(x) for x in self.levels) or (self.L,)
        if levels[0] != self.L:
            raise InvalidInputError(f"first refinement level must be L = {self.L}, got {levels[0]}")
        if len(levels) < self.q:
            raise ConfigurationError(
                f"q = {self.q} passes need {self.q} table levels, only {list(levels)} given; "
                "bootstrap the missing levels first"
            )
        object.__setattr__(self, "levels", levels[: self.q])

    @property
    def required_lengths(self):
        return sorted({self.l, *self.levels})

    @property
    def nominal_length(self):
        return self.m * self.l + sum((self.n + 1) * N for N in self.levels)

    @property
    def candidates_per_compile(self):
        return GROUP_ORDER**self.m + self.q * GROUP_ORDER**self.n


@dataclass(frozen=True)
class Approximation:
    word: BraidWord
    matrix: np.ndarray
    dist: float
    stage: str
    raw_length: int = 0  # crossings before junction cancellations


@dataclass(frozen=True)
class StageRecord:
    stage: str
    dist: float
    length: int
    raw_length: int
    wall_time: float
    candidates: int
    improved: bool = True


@dataclass(frozen=True)
class CompileResult:
    final: Approximation
    history: tuple = field(default_factory=tuple)
    nominal_length: int = 0

    @property
    def word(self):
        return self.final.word

    @property
    def dist(self):
        return self.final.dist


def predicted_reduction(n):
    """Expected error reduction of one main-processor pass, ``60**(n/3) / sqrt(n+1)``."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    return GROUP_ORDER ** (n / 3) / math.sqrt(n + 1)


def _pool(absdots):
    best = absdots.max()
    idx = np.flatnonzero(absdots >= best - 1e-10)
    if len(idx) > MAX_POOL:
        idx = idx[np.argsort(-absdots[idx], kind="stable")[:MAX_POOL]]
    return idx


def preprocess(target, table_l, m):
    """Best ordered product of ``m`` entries of ``table_l`` (exhaustive over ``60**m``)."""
    target = check_unitary(target, "target")
    t = matrix_to_quaternion(target)
    prods = table_l.products(m)
    absdots = np.abs(prods @ t)
    shape = (len(table_l),) * m
    by_word = {}
    for flat in _pool(absdots):
        idx = tuple(int(i) for i in np.unravel_index(flat, shape))
        by_word.setdefault(table_l.word_for(idx), idx)
    word, dist = select_best(by_word, target)
    raw = table_l.raw_length(by_word[word])
    return Approximation(word, evaluate(word), dist, "preprocessed", raw)


def refine(target, current, table_L, n, stage=1):
    """Correct ``current`` on the right by the best element of S(L, n).

    Returns ``current`` unchanged when no candidate strictly beats it; the
    all-identity tuple is in S(L, n), so the result is never worse.
    """
    target = check_unitary(target, "target")
    idx, quats = table_L.fine_rotations(n)
    r = quaternion_multiply(quaternion_conjugate(matrix_to_quaternion(current.matrix)),
                            matrix_to_quaternion(target))
    absdots = np.abs(quats @ r)
    by_word = {}
    for k in _pool(absdots):
        tup = tuple(int(i) for i in idx[k])
        by_word.setdefault(concat_reduce(current.word, table_L.word_for(tup)), tup)
    word, dist = select_best(by_word, target)
    if dist >= current.dist:
        return current
    raw = current.raw_length + table_L.raw_length(by_word[word])
    return Approximation(word, evaluate(word), dist, f"refined({stage})", raw)


def compile_gate(target, params, tables):
    """Hash ``target`` into a braid: one preprocess, then ``params.q`` refinements.

    ``tables`` maps braid length ``N`` to a :class:`PseudoGroupTable`.
    """
    target = check_unitary(target, "target")
    missing = [N for N in params.required_lengths if N not in tables]
    if missing:
        raise ConfigurationError(f"missing pseudo-group tables for N = {missing}; build or bootstrap them")
    history = []
    t0 = time.perf_counter()
    current = preprocess(target, tables[params.l], params.m)
    history.append(StageRecord("preprocessed", current.dist, len(current.word), current.raw_length,
                               time.perf_counter() - t0, GROUP_ORDER**params.m))
    for k, N in enumerate(params.levels, start=1):
        t0 = time.perf_counter()
        previous = current
        current = refine(target, current, tables[N], params.n, stage=k)
        improved = current is not previous
        history.append(StageRecord(f"refined({k})", current.dist, len(current.word), current.raw_length,
                                   time.perf_counter() - t0, GROUP_ORDER**params.n, improved))
    return CompileResult(current, tuple(history), params.nominal_length)


def bootstrap_table(params, tables):
    """Next-level table: compile every exact element with the current pipeline.

    An entry is replaced only when the compiled braid beats the entry of the
    finest table in use; the new nominal length is the longest resulting word.
    """
    base = tables[params.levels[-1]]
    group = base.group
    entries = []
    for i in range(len(group)):
        old = base.entries[i]
        word = old.word
        if i:
            res = compile_gate(group.element_su2(i), params, tables)
            if res.dist < old.dist:
                word = res.word
        m = evaluate(word)
        entries.append(TableEntry(i, word, m, _distance_unchecked(m, group.element_su2(i))))
    N_next = max(len(e.word) for e in entries)
    return PseudoGroupTable(N_next, entries, group)

