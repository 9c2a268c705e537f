"""Dense real/complex matrix helpers.

Matrices are plain 2-D numpy arrays: float64 for real, complex128 for
complex (row-major, which makes the complex buffer an interleaved
re/im float64 sequence).  These wrappers add the shape/kind checks the
rest of the package relies on; the arithmetic itself is numpy's.

Arrays are treated as immutable after construction: every operation
returns a fresh array and never writes to its inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import NonRealError, ShapeError

__all__ = [
    "as_real_matrix",
    "as_complex_matrix",
    "matmul",
    "add",
    "hadamard",
    "transpose",
    "conj_transpose",
    "embed_real",
    "project_real",
]


def as_real_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Validate and return a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name}: expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ShapeError(f"{name}: entries must be finite")
    return m


def as_complex_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Validate and return a 2-D complex128 array with finite components."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name}: expected a 2-D matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ShapeError(f"{name}: components must be finite")
    return m


def _check_same_kind(a: np.ndarray, b: np.ndarray) -> None:
    if np.iscomplexobj(a) != np.iscomplexobj(b):
        raise TypeError(
            f"operands must be the same kind (real or complex), "
            f"got {a.dtype} and {b.dtype}"
        )


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of two same-kind matrices."""
    _check_same_kind(a, b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} x {b.shape}")
    return a @ b


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise sum."""
    _check_same_kind(a, b)
    if a.shape != b.shape:
        raise ShapeError(f"add: shapes differ, {a.shape} vs {b.shape}")
    return a + b


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product."""
    _check_same_kind(a, b)
    if a.shape != b.shape:
        raise ShapeError(f"hadamard: shapes differ, {a.shape} vs {b.shape}")
    return a * b


def transpose(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a.T)


def conj_transpose(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.conj(a.T))


def embed_real(a: np.ndarray) -> np.ndarray:
    """Embed a real matrix into the complex plane with zero imaginary part."""
    return np.asarray(a, dtype=np.float64).astype(np.complex128)


def project_real(a: np.ndarray, tol: float) -> np.ndarray:
    """Drop the imaginary part of ``a``, refusing if any |im| exceeds ``tol``."""
    m = np.asarray(a, dtype=np.complex128)
    worst = float(np.max(np.abs(m.imag))) if m.size else 0.0
    if worst > tol:
        raise NonRealError(
            f"matrix is not real within tol={tol:g}: max |imag| = {worst:g}"
        )
    return np.ascontiguousarray(m.real)
