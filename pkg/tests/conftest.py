import numpy as np
import pytest

from braidhash.compiler import HashParams, bootstrap_table
from braidhash.icosa import build_group
from braidhash.pseudogroup import save_table, table_path
from braidhash.search import build_table


@pytest.fixture(scope="session")
def group():
    return build_group()


@pytest.fixture(scope="session")
def table8():
    return build_table(8)


@pytest.fixture(scope="session")
def table24():
    return build_table(24)


@pytest.fixture(scope="session")
def tables(table8, table24):
    return {8: table8, 24: table24}


@pytest.fixture(scope="session")
def bootstrapped(tables):
    return bootstrap_table(HashParams(), tables)


@pytest.fixture(scope="session")
def table_dir(tmp_path_factory, table8, table24):
    d = tmp_path_factory.mktemp("tables")
    save_table(table8, table_path(d, 8))
    save_table(table24, table_path(d, 24))
    return d


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def random_su2(rng, size=None):
    """Haar SU(2) matrices from numpy normals (independent of the package sampler)."""
    q = rng.standard_normal((size or 1, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q.T
    m = np.empty((len(q), 2, 2), dtype=complex)
    m[:, 0, 0] = w + 1j * z
    m[:, 0, 1] = y + 1j * x
    m[:, 1, 0] = -y + 1j * x
    m[:, 1, 1] = w - 1j * z
    return m[0] if size is None else m
