"""2x2 unitary algebra, the phase-invariant distance, Haar sampling and small logarithms.

Matrices are plain ``numpy`` complex arrays of shape ``(2, 2)``; quaternions are
real arrays ``(w, x, y, z)`` identified with ``w*1 + i(x X + y Y + z Z)``.

The distance between two unitaries is the operator-norm distance after the
best global phase::

    d(U, V) = min_phi || U - exp(i phi) V ||_2 = sqrt(2 - |Tr(U^dag V)|)

which equals ``2 sin(theta / 4)`` for a relative SO(3) rotation angle
``theta`` and lies in ``[0, sqrt(2)]``.  For unit quaternions it is the
chordal distance ``min(|q1 - q2|, |q1 + q2|)``.
"""

import math

import numpy as np

from braidhash.errors import InvalidInputError, OutOfDomainError

METRIC_ID = "opnorm-phase"
MAX_DISTANCE = math.sqrt(2.0)

ALGEBRA_TOL = 1e-12
INPUT_TOL = 1e-9

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def unitarity_residual(u):
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - IDENTITY)))


def check_unitary(u, name="matrix"):
    """Return ``u`` as a complex 2x2 array, raising if it is not unitary to 1e-9."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise InvalidInputError(f"{name} must be 2x2, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise InvalidInputError(f"{name} has non-finite entries")
    res = unitarity_residual(u)
    if res > INPUT_TOL:
        raise InvalidInputError(f"{name} is not unitary (residual {res:.3g})")
    return u


def _canonical_sign(u):
    tr = u[0, 0].real + u[1, 1].real
    if tr > ALGEBRA_TOL:
        return u
    if tr < -ALGEBRA_TOL:
        return -u
    for z in (u[0, 0], u[0, 1]):
        if abs(z) > ALGEBRA_TOL:
            arg = math.atan2(z.imag, z.real)
            return u if 0.0 <= arg < math.pi else -u
    return u


def project_su2(u):
    """Divide out ``sqrt(det U)`` and pick the canonical sign.

    The canonical representative has ``Re Tr U > 0``; on a tie the first of
    ``(a11, a12)`` with magnitude above 1e-12 has its argument in ``[0, pi)``.
    """
    u = check_unitary(u)
    s = np.sqrt(np.linalg.det(u))
    return _canonical_sign(u / s)


def distance(u, v):
    u = check_unitary(u, "U")
    v = check_unitary(v, "V")
    return _distance_unchecked(u, v)


def _distance_unchecked(u, v):
    # Frobenius norm of the phase-aligned difference keeps full precision near 0;
    # both eigenvalues of U^dag V e^{-i phi} - 1 have the same modulus.
    tr = np.vdot(u, v)  # Tr(U^dag V)
    mag = abs(tr)
    if mag < 1e-300:
        return MAX_DISTANCE
    diff = u - (tr / mag).conjugate() * v
    d = math.sqrt(float(np.vdot(diff, diff).real) / 2.0)
    return min(d, MAX_DISTANCE)


def quaternion_distance(p, q):
    """Chordal distance between unit quaternions modulo sign (same metric as ``distance``)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(min(np.linalg.norm(p - q), np.linalg.norm(p + q)))


def quaternion_to_su2(q):
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise InvalidInputError("quaternion must have 4 components")
    norm = float(q @ q)
    if abs(norm - 1.0) > INPUT_TOL:
        raise InvalidInputError(f"quaternion is not unit norm (|q|^2 = {norm!r})")
    w, x, y, z = q
    return np.array([[w + 1j * z, y + 1j * x], [-y + 1j * x, w - 1j * z]], dtype=complex)


def su2_to_quaternion(u):
    """Inverse of ``quaternion_to_su2`` for a matrix already in SU(2)."""
    return np.array([u[0, 0].real, u[0, 1].imag, u[0, 1].real, u[0, 0].imag])


def matrix_to_quaternion(u):
    """Quaternion of ``project_su2(u)`` without the unitarity check (hot paths)."""
    u = np.asarray(u, dtype=complex)
    s = np.sqrt(u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0])
    return su2_to_quaternion(u / s)


def quaternion_multiply(p, q):
    """Product matching matrix multiplication under ``quaternion_to_su2``.

    ``(w1 + i v1.s)(w2 + i v2.s) = w1 w2 - v1.v2 + i (w1 v2 + w2 v1 - v1 x v2).s``,
    so the vector part carries a minus sign on the cross product.  Broadcasts
    over leading axes.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    qw, qx, qy, qz = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw - (py * qz - pz * qy),
            pw * qy + py * qw - (pz * qx - px * qz),
            pw * qz + pz * qw - (px * qy - py * qx),
        ],
        axis=-1,
    )


def quaternion_conjugate(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def haar_random(rng):
    """Haar-uniform SU(2) element from four normals drawn from ``rng``.

    ``rng`` is a :class:`braidhash.rng.Xoshiro256`; the same state always
    yields the same matrix.
    """
    q = np.array([rng.normal() for _ in range(4)])
    q /= math.sqrt(float(q @ q))
    return _canonical_sign(quaternion_to_su2(q))


def expm_hermitian(h):
    """``exp(i H)`` for a 2x2 Hermitian matrix, via its eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def log_deviation(u):
    """Hermitian ``H`` with ``exp(iH) = U`` for an SU(2) element near the identity.

    The axis-angle form ``U = cos a + i sin a (n . sigma)`` gives
    ``H = a (n . sigma)``.  A matrix with ``Re Tr U < 0`` is replaced by
    ``-U`` first, so the identity holds in PSU(2); eigenvalues of ``H`` lie in
    ``[-pi/2, pi/2]``.  Raises :class:`OutOfDomainError` when ``d(1, U) >= 1``.
    """
    u = check_unitary(u)
    if abs(abs(np.linalg.det(u)) - 1.0) > INPUT_TOL:
        raise InvalidInputError("matrix is not unitary")
    if _distance_unchecked(IDENTITY, u) >= 1.0:
        raise OutOfDomainError("deviation too large for log_deviation (d(1, U) >= 1)")
    q = matrix_to_quaternion(u)
    if q[0] < 0:
        q = -q
    vec = q[1:]
    s = float(np.linalg.norm(vec))
    if s == 0.0:
        return np.zeros((2, 2), dtype=complex)
    a = math.atan2(s, q[0])
    n = vec / s
    return a * (n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z)


def operator_norm(a):
    return float(np.linalg.norm(np.asarray(a), 2))
