"""Hermitian and symplectic kernels on C^n viewed as R^{2n}.

Conventions used throughout the library:

* vectors and matrices are plain complex numpy arrays;
* ``herm(u, v) = sum_j u_j * conj(v_j)`` (linear in ``u``, antilinear in ``v``);
* ``symp(u, v) = Im herm(v, u)``, so that with ``z = x + i y`` the pair
  ``(d/dx, d/dy)`` pairs to +1;
* the real inner product on R^{2n} is ``Re herm``;
* the identification R^{2n} <-> C^n interleaves coordinates as
  ``(x1, y1, ..., xn, yn)`` wherever real storage is needed.
"""

import numpy as np

from .errors import SingularFrameError

TWO_PI = 2.0 * np.pi


def _as_vec(u):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 1 or u.size == 0:
        raise ValueError(f"expected a nonempty vector, got shape {u.shape}")
    return u


def herm(u, v):
    """Hermitian product sum_j u_j conj(v_j) of two vectors in C^n."""
    u, v = _as_vec(u), _as_vec(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return complex(np.sum(u * v.conj()))


def symp(u, v):
    """Standard symplectic form omega(u, v) = Im herm(v, u).

    Antisymmetric, invariant under multiplication of both arguments by i,
    and normalized so that omega(1, i) = 1 in C^1.
    """
    return herm(v, u).imag


def real_inner(u, v):
    """Euclidean inner product of u, v as vectors of R^{2n}."""
    return herm(u, v).real


def interleave(u):
    """Complex vector -> real vector (x1, y1, ..., xn, yn)."""
    u = _as_vec(u)
    out = np.empty(2 * u.size)
    out[0::2] = u.real
    out[1::2] = u.imag
    return out


def uninterleave(x):
    """Real vector (x1, y1, ..., xn, yn) -> complex vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size % 2:
        raise ValueError(f"expected an even-length real vector, got shape {x.shape}")
    return x[0::2] + 1j * x[1::2]


def cx_det(M):
    """Determinant of a square complex matrix (LU with partial pivoting)."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return complex(np.linalg.det(M))


def frame_matrix(vectors):
    """Stack vectors as the columns of a matrix."""
    return np.column_stack([_as_vec(v) for v in vectors])


def lagrangian_angle(frame):
    """Angle arg det M in [0, 2*pi) of a full complex frame.

    ``frame`` is either an n x n complex matrix whose columns span the
    (real) tangent space of a Lagrangian, or a sequence of n vectors.
    Raises SingularFrameError when the columns are not C-linearly
    independent (the frame is not totally real).
    """
    M = np.asarray(frame, dtype=complex)
    if M.ndim != 2:
        M = frame_matrix(frame)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"need n vectors in C^n, got shape {M.shape}")
    d = cx_det(M)
    scale = np.prod(np.linalg.norm(M, axis=0))
    if abs(d) <= 1e-12 * max(scale, 1e-300):
        raise SingularFrameError(
            f"frame is numerically singular: |det| = {abs(d):.3e}, column scale {scale:.3e}"
        )
    return np.angle(d) % TWO_PI


def angle_difference(a, b):
    """Signed distance a - b on the circle, in (-pi, pi]."""
    d = (a - b) % TWO_PI
    if d > np.pi:
        d -= TWO_PI
    return d


def circular_mean(angles):
    """Mean direction of a set of angles, in [0, 2*pi)."""
    angles = np.asarray(angles, dtype=float)
    return float(np.angle(np.exp(1j * angles).mean())) % TWO_PI
