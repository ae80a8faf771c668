"""Random-matrix statistics of the hashing errors and the experiment suites.

The unitary Wigner-Dyson surmise with mean ``d_L``::

    P(d) = (32 / pi^2) (d^2 / d_L^3) exp(-(4/pi) (d / d_L)^2)

is the Maxwell law of the norm of a traceless 2x2 GUE matrix.  For
Haar-random targets the distance to a fixed point has density
``(4/pi) d^2 sqrt(1 - (d/2)^2)`` on ``[0, sqrt(2)]``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special, stats

from braidhash.errors import InvalidInputError
from braidhash.rng import Xoshiro256
from braidhash.su2 import (
    IDENTITY,
    MAX_DISTANCE,
    expm_hermitian,
    haar_random,
    log_deviation,
    operator_norm,
    project_su2,
    _distance_unchecked,
)

SUITE_MAGIC = "# braidhash-suite v1"
MIN_FIT_SAMPLES = 100
HIST_BINS = 50
DEFAULT_SEED = 12345


def wd_pdf(d, d_L):
    if d_L <= 0:
        raise InvalidInputError("d_L must be positive")
    d = np.asarray(d, dtype=float)
    x = d / d_L
    return (32.0 / math.pi**2) * x**2 / d_L * np.exp(-(4.0 / math.pi) * x**2)


def wd_cdf(d, d_L):
    a = math.sqrt(4.0 / math.pi) / d_L
    z = a * np.asarray(d, dtype=float)
    return special.erf(z) - (2.0 / math.sqrt(math.pi)) * z * np.exp(-z * z)


def wd_sample(rng, d_L, size):
    """Inverse-CDF draws from the surmise; ``rng`` is a ``numpy.random.Generator``."""
    u = rng.random(size)
    # Maxwell law: |a| for a ~ N(0, s^2 I_3) with s = d_L sqrt(pi/8)
    return stats.chi.ppf(u, 3) * d_L * math.sqrt(math.pi / 8.0)


def bf_haar_pdf(d):
    """Density of ``d(V, U)`` for Haar-random ``U`` and any fixed ``V``."""
    d = np.asarray(d, dtype=float)
    inside = (d >= 0) & (d <= MAX_DISTANCE)
    dd = np.where(inside, d, 0.0)
    return np.where(inside, (4.0 / math.pi) * dd**2 * np.sqrt(np.clip(1.0 - (dd / 2) ** 2, 0.0, None)), 0.0)


def bf_haar_cdf(d):
    # d = 2 sin u, u in [0, pi/4]: CDF = (8/pi) * (u/2 - sin(4u)/8)
    d = np.clip(np.asarray(d, dtype=float), 0.0, MAX_DISTANCE)
    u = np.arcsin(d / 2.0)
    return (8.0 / math.pi) * (u / 2.0 - np.sin(4.0 * u) / 8.0)


def ks_statistic(values, cdf):
    return float(stats.kstest(np.asarray(values, dtype=float), cdf).statistic)


@dataclass
class SampleSet:
    values: np.ndarray
    metadata: dict = field(default_factory=dict)
    preprocessed: np.ndarray = None  # per-target preprocessor errors, when known
    compile_times: np.ndarray = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size and (self.values.min() < 0 or self.values.max() > 2):
            raise InvalidInputError("distance samples must lie in [0, 2]")

    def __len__(self):
        return len(self.values)

    @property
    def mean(self):
        return float(self.values.mean())


@dataclass(frozen=True)
class WignerDysonFit:
    d_L: float
    ks_stat: float
    sample_count: int


def fit_wd(samples):
    """Surmise with ``d_L`` fixed to the sample mean, and its KS distance."""
    values = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if len(values) < MIN_FIT_SAMPLES:
        raise InvalidInputError(f"need at least {MIN_FIT_SAMPLES} samples, got {len(values)}")
    d_L = float(values.mean())
    if d_L <= 0:
        raise InvalidInputError("samples have zero mean")
    return WignerDysonFit(d_L, ks_statistic(values, lambda x: wd_cdf(x, d_L)), len(values))


def histogram(values, bins=HIST_BINS):
    """Density histogram over ``[0, 1.05 max]``: returns ``(edges, density)``."""
    values = np.asarray(values, dtype=float)
    top = float(values.max()) * 1.05 if len(values) and values.max() > 0 else 1.0
    density, edges = np.histogram(values, bins=bins, range=(0.0, top), density=True)
    return edges, density


def deviation_analysis(table, indices):
    """First-order accumulated deviation of a closing product of table entries.

    With ``g~_i = g_i exp(i Delta_i)``, the product of the entries equals
    ``exp(i H)`` where, to first order, ``H`` is the sum of ``Delta_k``
    conjugated by the exact prefix products ``g_1 ... g_k``.  Returns
    ``(H_first, actual_product, residual, deltas)`` with ``residual`` the
    distance between ``exp(i H_first)`` and the actual product.
    """
    group = table.group
    indices = [group._check(i) for i in indices]
    if group.compose_many(indices) != 0:
        raise InvalidInputError(f"indices {indices} do not multiply to the identity")
    h = np.zeros((2, 2), dtype=complex)
    prefix = IDENTITY.copy()
    actual = IDENTITY.copy()
    deltas = []
    for i in indices:
        g = group.element_su2(i)
        delta = log_deviation(g.conj().T @ project_su2(table.entries[i].matrix))
        deltas.append(delta)
        prefix = prefix @ g
        h = h + prefix @ delta @ prefix.conj().T
        actual = actual @ table.entries[i].matrix
    h = (h + h.conj().T) / 2
    residual = _distance_unchecked(expm_hermitian(h), actual)
    return h, actual, residual, deltas


def max_deviation_norm(deltas):
    return max(operator_norm(d) for d in deltas)


def decay_fit(lengths, mean_dists):
    """Decay length ``xi`` from a least-squares fit of ``ln(mean_dist)`` against length."""
    lengths = np.asarray(lengths, dtype=float)
    mean_dists = np.asarray(mean_dists, dtype=float)
    if len(lengths) < 2 or len(lengths) != len(mean_dists):
        raise InvalidInputError("need at least two (length, mean distance) pairs")
    if np.any(mean_dists <= 0):
        raise InvalidInputError("mean distances must be positive")
    slope = np.polyfit(lengths, np.log(mean_dists), 1)[0]
    if slope >= 0:
        raise InvalidInputError("distances do not decay with length")
    return float(-1.0 / slope)


def haar_targets(count, seed, start=0):
    """Per-target streams derived from the master seed, so any partition draws the same targets."""
    return [haar_random(Xoshiro256(seed, stream=k)) for k in range(start, start + count)]


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_suite(count, params, tables, seed=DEFAULT_SEED, threads=1):
    """Compile ``count`` Haar targets and collect the final distances."""
    from braidhash.compiler import compile_gate

    targets = haar_targets(count, seed)
    tables[params.l].products(params.m)
    for N in params.levels:
        tables[N].fine_rotations(params.n)
    results = _map(lambda t: compile_gate(t, params, tables), targets, threads)
    values = np.array([r.dist for r in results])
    pre = np.array([r.history[0].dist for r in results])
    meta = {
        "count": count,
        "seed": seed,
        "l": params.l,
        "m": params.m,
        "L": params.L,
        "n": params.n,
        "q": params.q,
        "levels": ",".join(str(x) for x in params.levels),
    }
    times = np.array([sum(h.wall_time for h in r.history) for r in results])
    return SampleSet(values, meta, preprocessed=pre, compile_times=times)


def brute_force_decay(lengths, count, seed=DEFAULT_SEED, alphabet="even"):
    """Mean best brute-force distance at each length over ``count`` Haar targets."""
    from braidhash.search import brute_force_best, get_tree

    tree = get_tree(max(lengths), alphabet)
    targets = haar_targets(count, seed)
    means = []
    for L in lengths:
        ds = [brute_force_best(t, L, alphabet, tree=tree).dist for t in targets]
        means.append(float(np.mean(ds)))
    return means


def write_suite_csv(samples, destination):
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [SUITE_MAGIC]
    lines += [f"# {k}={v}" for k, v in samples.metadata.items()]
    lines += [f"{v:.8e}" for v in samples.values]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_suite_csv(source):
    lines = Path(source).read_text().splitlines()
    if not lines or lines[0].strip() != SUITE_MAGIC:
        raise InvalidInputError(f"{source}: not a braidhash suite file")
    meta = {}
    values = []
    for line in lines[1:]:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif line.strip():
            values.append(float(line))
    return SampleSet(np.array(values), meta)


def write_histogram_csv(values, destination):
    edges, density = histogram(values)
    rows = ["bin_lo,bin_hi,density"]
    rows += [f"{lo:.8e},{hi:.8e},{p:.8e}" for lo, hi, p in zip(edges[:-1], edges[1:], density)]
    Path(destination).write_text("\n".join(rows) + "\n")
