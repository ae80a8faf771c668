"""The icosahedral rotation group as 60 exact golden quaternions.

Components live in the ring of numbers ``(a + b sqrt5) / 4`` with integer
``a, b``.  The group is generated by closure from

* ``(1/2)(1, 1, 1, 1)`` - a 120 degree rotation about a face axis, and
* ``(1/2)(phi, 1/phi, 1, 0)`` - a 72 degree rotation about a vertex axis,

where ``phi = (1 + sqrt5)/2``.  Each rotation keeps the representative of its
``+-q`` pair whose first nonzero component is positive.  The identity gets
index 0 and the rest follow in lexicographic order of their representatives.
"""

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache, total_ordering

import numpy as np

from braidhash.errors import InvalidInputError
from braidhash.su2 import quaternion_to_su2

SQRT5 = math.sqrt(5.0)


@total_ordering
@dataclass(frozen=True)
class GoldenScalar:
    """The number ``(a + b sqrt5) / 4``."""

    a: int
    b: int

    @classmethod
    def from_sixteenths(cls, a, b):
        # a product of two quarter-lattice numbers lives on 1/16; group
        # quaternion components must land back on the quarter lattice.
        if a % 4 or b % 4:
            raise ArithmeticError(f"({a} + {b} sqrt5)/16 is off the quarter lattice")
        return cls(a // 4, b // 4)

    def __add__(self, other):
        return GoldenScalar(self.a + other.a, self.b + other.b)

    def __neg__(self):
        return GoldenScalar(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def times16(self, other):
        """Numerators over 16 of the product ``self * other``."""
        return (self.a * other.a + 5 * self.b * other.b, self.a * other.b + self.b * other.a)

    def sign(self):
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 0 if a == b == 0 else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with 5 b^2
        big = a * a - 5 * b * b
        return (1 if a > 0 else -1) if big > 0 else (1 if b > 0 else -1)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __float__(self):
        return (self.a + self.b * SQRT5) / 4.0

    def is_zero(self):
        return self.a == 0 and self.b == 0


ZERO = GoldenScalar(0, 0)
ONE = GoldenScalar(4, 0)


def _golden_product(p, q):
    """Exact quaternion product with the matrix-compatible sign convention."""
    (pw, px, py, pz), (qw, qx, qy, qz) = p, q

    def combo(*terms):
        a = b = 0
        for sign, u, v in terms:
            ta, tb = u.times16(v)
            a += sign * ta
            b += sign * tb
        return GoldenScalar.from_sixteenths(a, b)

    return (
        combo((1, pw, qw), (-1, px, qx), (-1, py, qy), (-1, pz, qz)),
        combo((1, pw, qx), (1, px, qw), (-1, py, qz), (1, pz, qy)),
        combo((1, pw, qy), (1, py, qw), (-1, pz, qx), (1, px, qz)),
        combo((1, pw, qz), (1, pz, qw), (-1, px, qy), (1, py, qx)),
    )


def _canonical(q):
    for c in q:
        if not c.is_zero():
            return q if c.sign() > 0 else tuple(-x for x in q)
    raise ArithmeticError("zero quaternion")


def _norm_is_one(q):
    a = b = 0
    for c in q:
        ta, tb = c.times16(c)
        a += ta
        b += tb
    return a == 16 and b == 0


def _rotation_order(q):
    # SO(3) rotation angle theta has cos(theta/2) = |w|
    w = abs(float(q[0]))
    for order, c in ((1, 1.0), (2, 0.0), (3, 0.5), (5, (1 + SQRT5) / 4), (5, (SQRT5 - 1) / 4)):
        if abs(w - c) < 1e-9:
            return order
    raise ArithmeticError(f"unexpected rotation with |w| = {w}")


HALF = GoldenScalar(2, 0)
GENERATOR_ORDER3 = (HALF, HALF, HALF, HALF)
GENERATOR_ORDER5 = (GoldenScalar(1, 1), GoldenScalar(-1, 1), HALF, ZERO)


@dataclass(frozen=True)
class IcosaElement:
    index: int
    quat: tuple
    rotation_order: int

    def as_float(self):
        return np.array([float(c) for c in self.quat])


class IcosaGroup:
    """Elements, Cayley table and inverse table of the icosahedral group."""

    def __init__(self, elements, table, inverse):
        self.elements = tuple(elements)
        self.table = table
        self.inverse = inverse
        self.quaternions = np.array([e.as_float() for e in self.elements])
        self.quaternions.setflags(write=False)
        self._su2 = [quaternion_to_su2(q) for q in self.quaternions]

    def __len__(self):
        return len(self.elements)

    def _check(self, i):
        if not 0 <= int(i) < len(self.elements):
            raise InvalidInputError(f"group index {i} out of range")
        return int(i)

    def compose(self, i, j):
        return int(self.table[self._check(i), self._check(j)])

    def compose_many(self, indices):
        k = 0
        for i in indices:
            k = int(self.table[k, self._check(i)])
        return k

    def inverse_index(self, i):
        return int(self.inverse[self._check(i)])

    def element_su2(self, i):
        return self._su2[self._check(i)].copy()

    def order_census(self):
        return dict(sorted(Counter(e.rotation_order for e in self.elements).items()))

    @property
    def group_hash(self):
        h = hashlib.sha256()
        for e in self.elements:
            h.update(" ".join(f"{c.a},{c.b}" for c in e.quat).encode())
            h.update(b"\n")
        return h.hexdigest()[:16]


@lru_cache(maxsize=1)
def build_group():
    """Generate the group by closure and build its exact Cayley table."""
    identity = (ONE, ZERO, ZERO, ZERO)
    gens = [GENERATOR_ORDER3, GENERATOR_ORDER5]
    for g in gens:
        assert _norm_is_one(g)
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for q in frontier:
            for g in gens:
                p = _canonical(_golden_product(q, g))
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
        if len(seen) > 60:
            raise AssertionError("closure exceeded 60 elements")
    if len(seen) != 60:
        raise AssertionError(f"closure produced {len(seen)} elements, expected 60")

    rest = sorted(seen - {identity})
    quats = [identity] + rest
    position = {q: i for i, q in enumerate(quats)}
    table = np.empty((60, 60), dtype=np.int64)
    for i, p in enumerate(quats):
        for j, q in enumerate(quats):
            table[i, j] = position[_canonical(_golden_product(p, q))]
    inverse = np.array([int(np.flatnonzero(table[i] == 0)[0]) for i in range(60)])
    table.setflags(write=False)
    inverse.setflags(write=False)
    elements = [IcosaElement(i, q, _rotation_order(q)) for i, q in enumerate(quats)]
    return IcosaGroup(elements, table, inverse)
