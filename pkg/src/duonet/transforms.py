"""Orthogonal transforms: real-input FFT and explicit unitary matrices.

Conventions, used consistently everywhere:

* forward DFT is unnormalized:  ``X_k = sum_n x_n * w**(n*k)`` with
  ``w = exp(-2j*pi/N)``; the inverse carries the ``1/N`` factor;
* a real signal of length ``N`` keeps the ``N//2 + 1`` non-negative
  frequency bins;
* the inverse applies a Hermitian projection: imaginary parts of the DC
  bin (and the Nyquist bin for even ``N``) are ignored, so the output is
  real for arbitrary complex bins.

Power-of-two lengths run through the iterative radix-2 kernel in
``_kernels``; other lengths fall back to the O(N^2) matrix form.  Both
agree with the direct DFT summation to roundoff.

``rfft_adjoint`` / ``irfft_adjoint`` are the exact adjoints of the two
maps seen as real-linear operators (spectra read as re/im pairs); the
backward pass is built from them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ShapeError

__all__ = [
    "Spectrum",
    "OrthogonalTransform",
    "rfft",
    "irfft",
    "rfft_batch",
    "irfft_batch",
    "rfft_adjoint_batch",
    "irfft_adjoint_batch",
    "dft_matrix",
    "hadamard_matrix",
    "rfft_transform",
    "identity_transform",
    "dft_transform",
    "hadamard_transform",
    "explicit_transform",
    "make_transform",
    "spectrum_len",
]

UNITARITY_TOL = 1e-10


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def spectrum_len(n: int) -> int:
    """Number of non-negative frequency bins of a length-``n`` real signal."""
    return n // 2 + 1


@dataclass(frozen=True)
class Spectrum:
    """Half spectrum of a real signal: ``origin_len // 2 + 1`` complex bins."""

    bins: np.ndarray
    origin_len: int

    def __post_init__(self):
        bins = np.ascontiguousarray(self.bins, dtype=np.complex128)
        object.__setattr__(self, "bins", bins)
        if self.origin_len < 1:
            raise ShapeError(f"origin_len must be >= 1, got {self.origin_len}")
        if bins.ndim != 1 or bins.shape[0] != spectrum_len(self.origin_len):
            raise ShapeError(
                f"expected {spectrum_len(self.origin_len)} bins for origin_len="
                f"{self.origin_len}, got shape {bins.shape}"
            )


@lru_cache(maxsize=None)
def _dft_cached(n: int, unitary: bool) -> np.ndarray:
    k = np.arange(n)
    m = np.exp((-2j * np.pi / n) * np.outer(k, k))
    if unitary:
        m /= np.sqrt(n)
    m.setflags(write=False)
    return m


def dft_matrix(n: int, normalization: str = "unitary") -> np.ndarray:
    """DFT matrix with entry ``(row, col) = w**(row*col) * c``.

    ``normalization`` is ``"unitary"`` (c = 1/sqrt(N)) or
    ``"forward-unnormalized"`` (c = 1, pairs with a 1/N inverse).
    """
    if n < 1:
        raise ShapeError(f"dft_matrix: n must be >= 1, got {n}")
    if normalization not in ("unitary", "forward-unnormalized"):
        raise ValueError(f"unknown normalization {normalization!r}")
    return _dft_cached(n, normalization == "unitary").copy()


def hadamard_matrix(n: int) -> np.ndarray:
    """Unitary (Sylvester) Hadamard matrix; ``n`` must be a power of two."""
    if not _is_pow2(n):
        raise ShapeError(f"hadamard_matrix: n must be a power of two, got {n}")
    h = np.array([[1.0]])
    while h.shape[0] < n:
        h = np.kron(np.array([[1.0, 1.0], [1.0, -1.0]]), h) / np.sqrt(2.0)
    return h.astype(np.complex128)


def _as_batch(x, dtype) -> tuple[np.ndarray, bool]:
    a = np.asarray(x, dtype=dtype)
    if a.ndim == 1:
        return a[None, :], True
    if a.ndim == 2:
        return a, False
    raise ShapeError(f"expected a vector or a batch of vectors, got shape {a.shape}")


def _fft_full(a: np.ndarray) -> np.ndarray:
    """Unnormalized forward DFT of each row of a complex batch (any length)."""
    n = a.shape[1]
    if _is_pow2(n):
        out = a.copy()
        rev, tw = _kernels.fft_tables(n)
        _kernels.fft_inplace(out, rev, tw)
        return out
    return a @ _dft_cached(n, False)


def rfft_batch(x) -> np.ndarray:
    """Forward half spectra of a real batch ``[B, N] -> [B, N//2+1]``."""
    if np.iscomplexobj(x):
        raise ShapeError("rfft expects real input")
    xb, _ = _as_batch(x, np.float64)
    n = xb.shape[1]
    if n < 1:
        raise ShapeError("rfft: input must have length >= 1")
    full = _fft_full(xb.astype(np.complex128))
    out = np.ascontiguousarray(full[:, : spectrum_len(n)])
    # DC and Nyquist bins of a real signal are exactly real; drop the
    # roundoff residue so downstream zero-gradients come out exact.
    out[:, 0] = out[:, 0].real
    if n % 2 == 0:
        out[:, -1] = out[:, -1].real
    return out


def irfft_batch(z, n: int) -> np.ndarray:
    """Inverse of ``rfft_batch`` onto length ``n``, with Hermitian projection."""
    zb, _ = _as_batch(z, np.complex128)
    if zb.shape[1] != spectrum_len(n):
        raise ShapeError(
            f"irfft: got {zb.shape[1]} bins, expected {spectrum_len(n)} for n={n}"
        )
    b = zb.shape[0]
    full = np.zeros((b, n), dtype=np.complex128)
    full[:, 0] = zb[:, 0].real
    if n > 1:
        interior_hi = n // 2 if n % 2 == 1 else n // 2 - 1
        full[:, 1 : interior_hi + 1] = zb[:, 1 : interior_hi + 1]
        if n % 2 == 0:
            full[:, n // 2] = zb[:, n // 2].real
        full[:, n - interior_hi :] = np.conj(zb[:, 1 : interior_hi + 1])[:, ::-1]
    # inverse DFT via the forward kernel: ifft(a) = conj(fft(conj(a))) / n
    out = _fft_full(np.conj(full))
    return np.ascontiguousarray(out.real) / n


def irfft_adjoint_batch(g) -> np.ndarray:
    """Adjoint of ``irfft_batch`` as a real-linear map.

    Interior bins pick up the factor 2 from their mirrored twin; the
    imaginary components of DC (and Nyquist for even length) receive an
    exactly-zero gradient because the projection discards them.
    """
    gb, _ = _as_batch(g, np.float64)
    n = gb.shape[1]
    nb = spectrum_len(n)
    res = rfft_batch(gb)
    scale = np.full(nb, 2.0 / n)
    scale[0] = 1.0 / n
    if n % 2 == 0:
        scale[-1] = 1.0 / n
    res *= scale
    res[:, 0] = res[:, 0].real
    if n % 2 == 0:
        res[:, -1] = res[:, -1].real
    return res


def rfft_adjoint_batch(gz, n: int) -> np.ndarray:
    """Adjoint of ``rfft_batch`` as a real-linear map, ``[B, N//2+1] -> [B, N]``."""
    gb, _ = _as_batch(gz, np.complex128)
    if gb.shape[1] != spectrum_len(n):
        raise ShapeError(
            f"rfft_adjoint: got {gb.shape[1]} bins, expected {spectrum_len(n)}"
        )
    pad = np.zeros((gb.shape[0], n), dtype=np.complex128)
    pad[:, : gb.shape[1]] = np.conj(gb)
    return np.ascontiguousarray(_fft_full(pad).real)


def rfft(x) -> Spectrum:
    """Half spectrum of a real vector."""
    xv = np.asarray(x, dtype=np.float64)
    if xv.ndim != 1 or xv.shape[0] < 1:
        raise ShapeError(f"rfft expects a non-empty vector, got shape {xv.shape}")
    return Spectrum(bins=rfft_batch(xv)[0], origin_len=xv.shape[0])


def irfft(s: Spectrum) -> np.ndarray:
    """Real signal of length ``s.origin_len`` reconstructed from a spectrum."""
    return irfft_batch(s.bins, s.origin_len)[0]


@dataclass(frozen=True)
class OrthogonalTransform:
    """A forward/inverse transform pair.

    ``kind == "rfft"`` is the algorithmic real-input Fourier transform;
    ``kind == "explicit"`` applies a unitary transition matrix whose
    columns are the basis vectors (forward is ``x @ matrix``, inverse is
    ``z @ matrix_inv`` with ``matrix_inv = matrix^H``).
    """

    kind: str
    size: int
    matrix: np.ndarray | None = None
    matrix_inv: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.size < 1:
            raise ShapeError(f"transform size must be >= 1, got {self.size}")
        if self.kind == "rfft":
            if self.matrix is not None:
                raise ShapeError("rfft transform carries no explicit matrix")
        elif self.kind == "explicit":
            m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
            if m.shape != (self.size, self.size):
                raise ShapeError(
                    f"transition matrix must be {self.size}x{self.size}, "
                    f"got {m.shape}"
                )
            dev = np.max(np.abs(m @ np.conj(m.T) - np.eye(self.size)))
            if dev >= UNITARITY_TOL:
                raise ShapeError(
                    f"transition matrix is not unitary: max |T T^H - I| = {dev:g}"
                )
            object.__setattr__(self, "matrix", m)
            object.__setattr__(self, "matrix_inv", np.ascontiguousarray(np.conj(m.T)))
        else:
            raise ShapeError(f"unknown transform kind {self.kind!r}")

    @property
    def spectrum_size(self) -> int:
        """Length of the transformed vector."""
        return spectrum_len(self.size) if self.kind == "rfft" else self.size

    def apply(self, x) -> np.ndarray:
        """Forward transform of a vector (or ``[B, size]`` batch)."""
        if self.kind == "rfft":
            xb, single = _as_batch(x, np.float64)
            if xb.shape[1] != self.size:
                raise ShapeError(f"expected length {self.size}, got {xb.shape[1]}")
            out = rfft_batch(xb)
        else:
            xb, single = _as_batch(x, np.complex128)
            if xb.shape[1] != self.size:
                raise ShapeError(f"expected length {self.size}, got {xb.shape[1]}")
            out = xb @ self.matrix
        return out[0] if single else out

    def apply_inverse(self, z) -> np.ndarray:
        """Inverse transform; real-valued for the rfft kind (projection)."""
        zb, single = _as_batch(z, np.complex128)
        if zb.shape[1] != self.spectrum_size:
            raise ShapeError(
                f"expected length {self.spectrum_size}, got {zb.shape[1]}"
            )
        if self.kind == "rfft":
            out = irfft_batch(zb, self.size)
        else:
            out = zb @ self.matrix_inv
        return out[0] if single else out


def rfft_transform(n: int) -> OrthogonalTransform:
    return OrthogonalTransform(kind="rfft", size=n)


def identity_transform(n: int) -> OrthogonalTransform:
    return OrthogonalTransform(kind="explicit", size=n, matrix=np.eye(n, dtype=np.complex128))


def dft_transform(n: int) -> OrthogonalTransform:
    return OrthogonalTransform(kind="explicit", size=n, matrix=dft_matrix(n, "unitary"))


def hadamard_transform(n: int) -> OrthogonalTransform:
    return OrthogonalTransform(kind="explicit", size=n, matrix=hadamard_matrix(n))


def explicit_transform(matrix) -> OrthogonalTransform:
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"transition matrix must be square, got shape {m.shape}")
    return OrthogonalTransform(kind="explicit", size=m.shape[0], matrix=m)


_FACTORIES = {
    "rfft": rfft_transform,
    "identity": identity_transform,
    "dft": dft_transform,
    "hadamard": hadamard_transform,
}


def make_transform(name: str, n: int) -> OrthogonalTransform:
    """Build a transform by name: rfft, identity, dft, or hadamard."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ShapeError(
            f"unknown transform {name!r}; choose from {sorted(_FACTORIES)}"
        ) from None
    return factory(n)
