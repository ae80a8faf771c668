from collections import Counter

import numpy as np
import pytest

from braidhash.braid import EMPTY, concat_reduce, evaluate
from braidhash.errors import ConfigurationError, CorruptTableError, InvalidInputError
from braidhash.pseudogroup import (
    TABLE_DIR_ENV,
    PseudoGroupTable,
    closing_index,
    enumerate_fine_rotations,
    fine_rotation_distances,
    format_table,
    iter_fine_rotation_blocks,
    load_table,
    load_tables,
    pseudo_product,
    save_table,
    table_dir,
    table_path,
)
from braidhash.su2 import IDENTITY, distance, quaternion_to_su2


def test_save_load_round_trip(tmp_path, table24):
    path = save_table(table24, tmp_path / "t.tbl")
    lines = path.read_text().splitlines()
    assert len(lines) == 61
    assert lines[0].startswith("ICOSA-TABLE v1 N=24 metric=opnorm-phase group-hash=")
    back = load_table(path)
    assert back == table24
    for a, b in zip(back.entries, table24.entries):
        assert np.array_equal(a.matrix, b.matrix)
        assert a.dist == b.dist


def _write_variant(tmp_path, table, edit):
    lines = format_table(table).splitlines()
    edit(lines)
    p = tmp_path / "bad.tbl"
    p.write_text("\n".join(lines) + "\n")
    return p


def test_tampered_word_names_index(tmp_path, table24):
    def edit(lines):
        idx, dist, word = lines[8].split(None, 2)
        lines[8] = f"{idx} {dist} s2^1 {word}"

    with pytest.raises(CorruptTableError) as err:
        load_table(_write_variant(tmp_path, table24, edit))
    assert err.value.index == 7
    assert "entry 7" in str(err.value)


@pytest.mark.parametrize(
    "edit, message",
    [
        (lambda ls: ls.__setitem__(0, ls[0].replace("v1", "v2")), "version"),
        (lambda ls: ls.__setitem__(0, ls[0].replace("opnorm-phase", "trace")), "metric"),
        (lambda ls: ls.__setitem__(0, ls[0].replace("group-hash=", "group-hash=00")), "group-hash"),
        (lambda ls: ls.__setitem__(0, ls[0].replace("ICOSA", "OCTA")), "not an icosahedral"),
        (lambda ls: ls.pop(), "expected 60"),
        (lambda ls: ls.__setitem__(3, "3 x s1^2"), "malformed"),
        (lambda ls: ls.__setitem__(3, ls[4]), "index"),
    ],
)
def test_corrupt_headers_and_lines(tmp_path, table24, edit, message):
    with pytest.raises(CorruptTableError, match=message):
        load_table(_write_variant(tmp_path, table24, edit))


def test_checksum_detects_sub_tolerance_edit(tmp_path, table24):
    def edit(lines):
        idx, dist, word = lines[5].split(None, 2)
        lines[5] = f"{idx} {float(dist) + 1e-12:.10e} {word}"

    with pytest.raises(CorruptTableError, match="checksum"):
        load_table(_write_variant(tmp_path, table24, edit))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_table(tmp_path / "none.tbl")


def test_table_invariants(group, table8, table24):
    for t in (table8, table24):
        assert t.entries[0].word == EMPTY and t.entries[0].dist == 0.0
        for e in t.entries:
            assert e.dist == pytest.approx(distance(evaluate(e.word), group.element_su2(e.index)), abs=1e-12)
        assert len(t) == 60
    with pytest.raises(InvalidInputError):
        PseudoGroupTable(8, table8.entries[:59])


def test_closing_index(group, rng):
    for i in range(60):
        assert closing_index(group, [i]) == group.inverse_index(i)
        assert closing_index(group, [i, group.inverse_index(i)]) == 0
    for _ in range(10_000):
        tri = [int(x) for x in rng.integers(0, 60, 3)]
        j = closing_index(group, tri)
        assert group.compose(group.compose(group.compose(tri[0], tri[1]), tri[2]), j) == 0
    with pytest.raises(InvalidInputError):
        closing_index(group, [61])


def test_pseudo_product(group, table24):
    for i in (0, 5, 33):
        word, m = pseudo_product(table24, [i])
        assert word == table24.entries[i].word
        assert np.array_equal(m, table24.entries[i].matrix)
        word, _ = pseudo_product(table24, [0, i])
        assert word == table24.entries[i].word
    word, m = pseudo_product(table24, [3, 17])
    assert np.allclose(evaluate(word), m, atol=1e-12)
    dev = distance(m, table24.entries[group.compose(3, 17)].matrix)
    assert 0 < dev < 0.3
    with pytest.raises(InvalidInputError):
        pseudo_product(table24, [60])


def _mean_pair_deviation(table, group):
    ds = []
    for i in range(60):
        for j in range(60):
            _, m = pseudo_product(table, [i, j])
            ds.append(distance(m, group.element_su2(group.compose(i, j))))
    return np.mean(ds)


def test_pseudo_group_converges(group, table8, table24):
    assert _mean_pair_deviation(table24, group) < _mean_pair_deviation(table8, group)


def test_fine_rotations_n1(group, table24):
    cands = list(enumerate_fine_rotations(table24, 1))
    assert len(cands) == 60
    for c in cands:
        i, j = c.indices
        assert j == group.inverse_index(i)
        assert c.word == concat_reduce(table24.entries[i].word, table24.entries[j].word)
        assert distance(IDENTITY, c.matrix) <= 2 * table24.max_dist + 1e-12


def test_fine_rotation_stream_matches_blocks(group, table8):
    stream = list(enumerate_fine_rotations(table8, 2))
    assert len(stream) == 3600
    idx, quats = table8.fine_rotations(2)
    assert [c.indices for c in stream] == [tuple(int(v) for v in row) for row in idx]
    for k in range(0, 3600, 37):
        c = stream[k]
        assert group.compose_many(c.indices) == 0
        assert np.allclose(evaluate(c.word), c.matrix, atol=1e-12)
        assert distance(c.matrix, quaternion_to_su2(quats[k])) < 1e-12
        assert len(c.word) <= 3 * table8.N


def test_closing_indices_uniform(table8):
    idx, _ = table8.fine_rotations(3)
    assert len(idx) == 60**3
    counts = Counter(idx[:, -1].tolist())
    assert set(counts.values()) == {3600} and len(counts) == 60


def test_fine_rotation_distances_partition(table24):
    full = fine_rotation_distances(table24, 2)
    part = np.concatenate([fine_rotation_distances(table24, 2, leading=[k]) for k in range(60)])
    assert np.array_equal(full, part)
    first = next(iter_fine_rotation_blocks(table24, 2, leading=[4]))
    assert first[0].shape == (60, 3) and set(first[0][:, 0]) == {4}


def test_table_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.delenv(TABLE_DIR_ENV, raising=False)
    assert str(table_dir()) == "tables"
    monkeypatch.setenv(TABLE_DIR_ENV, str(tmp_path))
    assert table_dir() == tmp_path
    assert str(table_dir("x")) == "x"


def test_load_tables_missing(tmp_path, table8):
    save_table(table8, table_path(tmp_path, 8))
    assert load_tables(tmp_path, [8])[8] == table8
    with pytest.raises(ConfigurationError, match="tables build --length 24"):
        load_tables(tmp_path, [8, 24])
