"""Braid tables for the 60 group elements and the fine-rotation sets built from them.

Table file format (text, one record per line)::

    ICOSA-TABLE v1 N=<int> metric=<id> group-hash=<hex> checksum=<hex>
    <index> <distance, 9 significant digits> <braid word>
    ... 60 lines ...

Matrices are never stored; they are recomputed from the words on load and the
stored distances are checked against them.
"""

import hashlib
import itertools
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from braidhash.braid import EMPTY, BraidWord, concat_many, evaluate, format_word, parse
from braidhash.errors import ConfigurationError, CorruptTableError, InvalidInputError
from braidhash.icosa import build_group
from braidhash.su2 import METRIC_ID, _distance_unchecked, matrix_to_quaternion, quaternion_multiply

TABLE_MAGIC = "ICOSA-TABLE"
TABLE_VERSION = "v1"
TABLE_DIR_ENV = "BRAIDHASH_TABLE_DIR"
LOAD_TOL = 1e-9


@dataclass(frozen=True)
class TableEntry:
    index: int
    word: BraidWord
    matrix: np.ndarray
    dist: float


@dataclass(frozen=True)
class FineRotationCandidate:
    indices: tuple
    word: BraidWord
    matrix: np.ndarray


class PseudoGroupTable:
    """Braid approximations of the 60 icosahedral elements at nominal length ``N``."""

    def __init__(self, N, entries, group=None, metric_id=METRIC_ID):
        self.N = int(N)
        self.entries = tuple(entries)
        self.group = group or build_group()
        self.metric_id = metric_id
        if len(self.entries) != len(self.group):
            raise InvalidInputError(f"table needs {len(self.group)} entries, got {len(self.entries)}")
        q = np.array([matrix_to_quaternion(e.matrix) for e in self.entries])
        # align each sign with its exact element so q ~ exact quaternion
        q *= np.where(np.sum(q * self.group.quaternions, axis=1) < 0, -1.0, 1.0)[:, None]
        q.setflags(write=False)
        self.quaternions = q
        self._products = {}
        self._fine = {}

    @classmethod
    def from_words(cls, N, words, group=None):
        group = group or build_group()
        entries = []
        for i, w in enumerate(words):
            m = evaluate(w)
            entries.append(TableEntry(i, w, m, _distance_unchecked(m, group.element_su2(i))))
        return cls(N, entries, group)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, PseudoGroupTable):
            return NotImplemented
        return self.N == other.N and self.words == other.words and self.metric_id == other.metric_id

    @property
    def words(self):
        return tuple(e.word for e in self.entries)

    @property
    def dists(self):
        return np.array([e.dist for e in self.entries])

    @property
    def mean_dist(self):
        """Mean error over the 59 nontrivial elements."""
        return float(self.dists[1:].mean())

    @property
    def max_dist(self):
        return float(self.dists.max())

    @property
    def max_length(self):
        return max(len(w) for w in self.words)

    def word_for(self, indices):
        return concat_many(self.entries[i].word for i in indices)

    def raw_length(self, indices):
        return sum(len(self.entries[i].word) for i in indices)

    def products(self, m):
        """Quaternions of all ``60**m`` ordered products, in lexicographic index order."""
        if m not in self._products:
            p = self.quaternions
            for _ in range(m - 1):
                p = quaternion_multiply(p[:, None, :], self.quaternions[None, :, :]).reshape(-1, 4)
            p.setflags(write=False)
            self._products[m] = p
        return self._products[m]

    def fine_rotations(self, n):
        """The fine-rotation set S(N, n) as ``(indices, quaternions)`` arrays."""
        if n not in self._fine:
            blocks = list(iter_fine_rotation_blocks(self, n))
            idx = np.concatenate([b[0] for b in blocks])
            quats = np.concatenate([b[1] for b in blocks])
            idx.setflags(write=False)
            quats.setflags(write=False)
            self._fine[n] = (idx, quats)
        return self._fine[n]


def _checksum_lines(lines):
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()[:16]


def table_checksum(table):
    return _checksum_lines(_body_lines(table))


def _body_lines(table):
    return [f"{e.index} {e.dist:.8e} {format_word(e.word)}" for e in table.entries]


def format_table(table):
    header = (
        f"{TABLE_MAGIC} {TABLE_VERSION} N={table.N} metric={table.metric_id} "
        f"group-hash={table.group.group_hash} checksum={table_checksum(table)}"
    )
    return "\n".join([header] + _body_lines(table)) + "\n"


def save_table(table, destination):
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_table(table))
    return path


def load_table(source, group=None):
    """Read and validate a table file; raises :class:`CorruptTableError` on any defect."""
    group = group or build_group()
    path = Path(source)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise CorruptTableError(f"{path}: cannot read table ({exc})") from exc
    lines = text.splitlines()
    if not lines:
        raise CorruptTableError(f"{path}: empty table file")
    head = lines[0].split()
    if len(head) < 2 or head[0] != TABLE_MAGIC:
        raise CorruptTableError(f"{path}: not an icosahedral table file")
    if head[1] != TABLE_VERSION:
        raise CorruptTableError(f"{path}: unsupported table version {head[1]!r}")
    fields = dict(f.split("=", 1) for f in head[2:] if "=" in f)
    try:
        N = int(fields["N"])
    except (KeyError, ValueError):
        raise CorruptTableError(f"{path}: header lacks a valid N") from None
    if fields.get("metric") != METRIC_ID:
        raise CorruptTableError(f"{path}: metric {fields.get('metric')!r} does not match {METRIC_ID!r}")
    if fields.get("group-hash") != group.group_hash:
        raise CorruptTableError(f"{path}: group-hash mismatch (table built for a different indexing)")
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != len(group):
        raise CorruptTableError(f"{path}: expected {len(group)} entries, found {len(body)}")
    entries = []
    for expected, line in enumerate(body):
        parts = line.split(None, 2)
        try:
            index = int(parts[0])
            stored = float(parts[1])
            word = parse(parts[2])
        except (IndexError, ValueError, InvalidInputError) as exc:
            raise CorruptTableError(f"{path}: malformed entry {expected}: {exc}", expected) from None
        if index != expected:
            raise CorruptTableError(f"{path}: entry {expected} carries index {index}", expected)
        m = evaluate(word)
        d = _distance_unchecked(m, group.element_su2(index))
        if abs(d - stored) > LOAD_TOL:
            raise CorruptTableError(
                f"{path}: entry {index} distance mismatch (stored {stored:.9g}, recomputed {d:.9g})", index
            )
        entries.append(TableEntry(index, word, m, d))
    if entries[0].word != EMPTY:
        raise CorruptTableError(f"{path}: entry 0 must be the empty word", 0)
    if fields.get("checksum") != _checksum_lines(body):
        raise CorruptTableError(f"{path}: checksum mismatch")
    return PseudoGroupTable(N, entries, group)


def table_dir(flag=None):
    """Resolve the table directory: explicit flag, then environment, then ``./tables``."""
    if flag:
        return Path(flag)
    env = os.environ.get(TABLE_DIR_ENV)
    return Path(env) if env else Path("tables")


def table_path(directory, N):
    return Path(directory) / f"icosa-N{N}.tbl"


def available_lengths(directory):
    out = []
    for p in Path(directory).glob("icosa-N*.tbl"):
        try:
            out.append(int(p.stem.split("N", 1)[1]))
        except ValueError:
            continue
    return sorted(out)


def load_tables(directory, lengths):
    tables = {}
    missing = [N for N in lengths if not table_path(directory, N).exists()]
    if missing:
        cmds = "; ".join(f"tables build --length {N} --out {table_path(directory, N)}" for N in missing)
        raise ConfigurationError(f"missing tables for N = {missing} in {directory}; build them with: {cmds}")
    for N in lengths:
        tables[N] = load_table(table_path(directory, N))
    return tables


def closing_index(group, indices):
    """The index ``j`` with ``g_{i1} ... g_{in} g_j = e``."""
    return group.inverse_index(group.compose_many(indices))


def pseudo_product(table, indices):
    """Reduced word and matrix product of the table entries at ``indices``."""
    indices = [table.group._check(i) for i in indices]
    m = np.eye(2, dtype=complex)
    for i in indices:
        m = m @ table.entries[i].matrix
    return table.word_for(indices), m


def enumerate_fine_rotations(table, n):
    """Stream all ``60**n`` fine-rotation candidates in lexicographic tuple order.

    Products of each prefix are cached along the walk, so each candidate costs
    one extra closing multiplication.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    group = table.group
    size = len(group)
    entries = table.entries
    ident = np.eye(2, dtype=complex)

    def walk(prefix, blocks, matrix, g):
        if len(prefix) == n:
            j = group.inverse_index(g)
            e = entries[j]
            word = BraidWord.from_blocks(blocks + list(e.word.blocks))
            yield FineRotationCandidate(tuple(prefix) + (j,), word, matrix @ e.matrix)
            return
        for i in range(size):
            e = entries[i]
            yield from walk(prefix + [i], blocks + list(e.word.blocks), matrix @ e.matrix,
                            int(group.table[g, i]))

    yield from walk([], [], ident, 0)


def iter_fine_rotation_blocks(table, n, leading=None):
    """Vectorized S(N, n) split by leading index: yields ``(indices, quaternions)``.

    Each block holds the ``60**(n-1)`` candidates sharing one leading index;
    ``leading`` restricts the walk to a subset of leading indices.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    group = table.group
    size = len(group)
    q = table.quaternions
    if n == 1:
        rest_q = np.array([[1.0, 0.0, 0.0, 0.0]])
        rest_idx = np.zeros((1, 0), dtype=np.int16)
        rest_g = np.zeros(1, dtype=np.int64)
    else:
        rest_q = table.products(n - 1)
        rest_idx = np.array(list(itertools.product(range(size), repeat=n - 1)), dtype=np.int16)
        rest_g = np.zeros(len(rest_q), dtype=np.int64)
        for col in range(n - 1):
            rest_g = group.table[rest_g, rest_idx[:, col]]
    for lead in (range(size) if leading is None else leading):
        g = group.table[lead, rest_g]
        closing = group.inverse[g]
        quats = quaternion_multiply(quaternion_multiply(q[lead], rest_q), q[closing])
        idx = np.empty((len(rest_q), n + 1), dtype=np.int16)
        idx[:, 0] = lead
        idx[:, 1:n] = rest_idx
        idx[:, n] = closing
        yield idx, quats


def fine_rotation_distances(table, n, leading=None):
    """Distances to the identity of the S(N, n) candidates, streamed block by block."""
    out = []
    for _, quats in iter_fine_rotation_blocks(table, n, leading):
        w = np.clip(np.abs(quats[:, 0]), 0.0, 1.0)
        # chord to +-1: sqrt(2 - 2|w|), written to keep precision near 0
        v2 = np.sum(quats[:, 1:] ** 2, axis=1)
        out.append(np.sqrt(v2 + (1.0 - w) ** 2))
    return np.concatenate(out)
