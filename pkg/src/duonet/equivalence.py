"""Analytic structure of the transform branch.

Two executable identities about a square explicit branch
``z = (x T w_t^T + b_t) T^{-1}``:

* it collapses to a single dense affine map ``x W_f + b_f`` with
  ``W_f = T w_t^T T^{-1}`` and ``b_f = b_t T^{-1}``;
* its per-parameter derivative factors into rank-one matrices built
  from the transition-matrix columns.

Two factor conventions are exposed.  ``h_ab_matrix`` is the plain
column/row product ``phi_ia * phi_bj``; on the Fourier basis its entries
are ``omega^(ia+bj)/N``.  ``h_ab_derivative_factor`` carries the inverse
transform's row instead, which is what the actual derivative of ``W_f``
with respect to ``w_t[a, b]`` contains; summing it against the weights
rebuilds ``W_f`` exactly.  The two coincide whenever the transition
matrix is real and symmetric (identity, Hadamard) and differ by a
conjugate for the complex Fourier basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .network import activation, activation_deriv
from .transforms import OrthogonalTransform

__all__ = [
    "DenseEquivalent",
    "dense_equivalent",
    "h_ab_matrix",
    "h_ab_derivative_factor",
    "branch_preactivation",
    "gradient_structure_check",
]


@dataclass
class DenseEquivalent:
    """Collapsed affine form of a square transform branch."""

    w_f: np.ndarray
    b_f: np.ndarray


def _check_square_explicit(t: OrthogonalTransform) -> int:
    if t.kind != "explicit":
        raise ConfigError(
            f"analytic checks need an explicit-matrix transform, got kind {t.kind!r}"
        )
    return t.size


def dense_equivalent(t: OrthogonalTransform, w_t, b_t) -> DenseEquivalent:
    """Fold transform, weights, and inverse into one dense affine map.

    For every x the branch pre-activation equals ``x @ w_f + b_f``.
    Only square explicit transforms admit the construction.
    """
    n = _check_square_explicit(t)
    w = np.asarray(w_t, dtype=np.complex128)
    b = np.asarray(b_t, dtype=np.complex128)
    if w.shape != (n, n):
        raise ShapeError(f"w_t must be [{n} x {n}], got {w.shape}")
    if b.shape != (n,):
        raise ShapeError(f"b_t must have length {n}, got {b.shape}")
    w_f = t.matrix @ w.T @ t.matrix_inv
    b_f = b @ t.matrix_inv
    return DenseEquivalent(w_f=w_f, b_f=b_f)


def _check_index(n: int, name: str, v: int) -> None:
    if not (0 <= v < n):
        raise ShapeError(f"{name}={v} out of range [0, {n})")


def h_ab_matrix(t: OrthogonalTransform, a: int, b: int) -> np.ndarray:
    """Rank-one basis product: entry (i, j) is ``T[i, a] * T[b, j]``."""
    n = _check_square_explicit(t)
    _check_index(n, "a", a)
    _check_index(n, "b", b)
    return np.outer(t.matrix[:, a], t.matrix[b, :])


def h_ab_derivative_factor(t: OrthogonalTransform, a: int, b: int) -> np.ndarray:
    """Derivative of the dense map w.r.t. ``w_t[a, b]``, transposed.

    Entry (i, j) is ``T^{-1}[a, i] * T[j, b]``, so that
    ``sum_ab w_t[a, b] * H_ab^T`` equals ``T @ w_t.T @ T^{-1}``.
    """
    n = _check_square_explicit(t)
    _check_index(n, "a", a)
    _check_index(n, "b", b)
    return np.outer(t.matrix_inv[a, :], t.matrix[:, b])


def branch_preactivation(t: OrthogonalTransform, w_t, b_t, x) -> np.ndarray:
    """Complex branch pre-activation ``(x T w_t^T + b_t) T^{-1}`` for one x."""
    n = _check_square_explicit(t)
    xv = np.asarray(x, dtype=np.float64).reshape(-1)
    if xv.shape != (n,):
        raise ShapeError(f"x must have length {n}, got {xv.shape}")
    w = np.asarray(w_t, dtype=np.complex128)
    b = np.asarray(b_t, dtype=np.complex128)
    return (xv.astype(np.complex128) @ t.matrix @ w.T + b) @ t.matrix_inv


def gradient_structure_check(
    t: OrthogonalTransform,
    w_t,
    b_t,
    x,
    a: int,
    b: int,
    kind: str = "gelu",
    step: float = 1e-6,
) -> float:
    """Compare the factored derivative against central finite differences.

    The branch output is ``sigma(Re(branch_preactivation))``.  The
    factored form says its derivative along ``w_t[a, b]`` is
    ``Re(x @ H_ab^T)`` (and ``-Im`` for the imaginary direction), gated
    by the activation slope.  Returns the worst absolute deviation over
    output coordinates and both real directions.
    """
    n = _check_square_explicit(t)
    _check_index(n, "a", a)
    _check_index(n, "b", b)
    w = np.asarray(w_t, dtype=np.complex128).copy()
    bv = np.asarray(b_t, dtype=np.complex128)
    xv = np.asarray(x, dtype=np.float64).reshape(-1)

    pre = branch_preactivation(t, w, bv, xv).real
    slope = activation_deriv(kind, pre)
    factor = xv.astype(np.complex128) @ h_ab_derivative_factor(t, a, b).T
    analytic_re = slope * factor.real
    analytic_im = slope * (-factor.imag)

    def out(wm):
        return activation(kind, branch_preactivation(t, wm, bv, xv).real)

    worst = 0.0
    for direction, analytic in ((1.0, analytic_re), (1.0j, analytic_im)):
        w[a, b] += direction * step
        hi = out(w)
        w[a, b] -= 2 * direction * step
        lo = out(w)
        w[a, b] += direction * step
        numeric = (hi - lo) / (2.0 * step)
        worst = max(worst, float(np.max(np.abs(analytic - numeric))))
    return worst
