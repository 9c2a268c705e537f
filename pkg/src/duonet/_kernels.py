"""Hot numeric kernels: batched radix-2 FFT butterflies and fused Adam updates.

Each kernel has two interchangeable implementations: a numba ``@njit``
version and a pure-numpy one.  The numba path is used when available;
set ``DUONET_DISABLE_NUMBA=1`` to force the numpy path (the automatic
fallback also triggers when numba is not importable).  Both paths
perform the identical sequence of elementwise IEEE operations, so
results are bit-for-bit equal; ``benchmarks/bench_kernels.py`` compares
their speed.

Numba kernels are compiled with ``fastmath`` off: reassociation would
break the bit-reproducibility contract of training runs.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "active_backend",
    "fft_tables",
    "fft_inplace",
    "fft_inplace_numpy",
    "adam_update",
    "adam_update_numpy",
]

_DISABLED = os.environ.get("DUONET_DISABLE_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on",
}


@lru_cache(maxsize=None)
def fft_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Bit-reversal permutation and stage-concatenated twiddle factors.

    The twiddles for the stage with half-size ``h`` occupy
    ``tw[h - 1 : 2 * h - 1]`` (offsets 0, 1, 3, 7, ... for h = 1, 2, 4, ...).
    """
    if n <= 0 or n & (n - 1):
        raise ValueError(f"n must be a power of two, got {n}")
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.int64)
    for i in range(n):
        r = 0
        x = i
        for _ in range(bits):
            r = (r << 1) | (x & 1)
            x >>= 1
        rev[i] = r
    parts = []
    h = 1
    while h < n:
        parts.append(np.exp(-2j * np.pi * np.arange(h) / (2 * h)))
        h *= 2
    tw = np.ascontiguousarray(
        np.concatenate(parts) if parts else np.zeros(0, dtype=np.complex128)
    )
    # cached and shared between callers; freeze against accidental writes
    rev.flags.writeable = False
    tw.flags.writeable = False
    return rev, tw


def fft_inplace_numpy(a: np.ndarray, rev: np.ndarray, tw: np.ndarray) -> None:
    """Forward DFT of each row of ``a`` (complex128, power-of-two width).

    The twiddle product is written as four real multiplies and two real
    add/subtracts rather than one complex multiply: numpy's complex
    ufunc may contract to FMA on some CPUs, which would break bit parity
    with the compiled backend.
    """
    b, n = a.shape
    if n == 1:
        return
    a[:] = a[:, rev]
    re = a.real
    im = a.imag
    half = 1
    while half < n:
        m = 2 * half
        w = tw[half - 1 : 2 * half - 1]
        wr = w.real
        wi = w.imag
        r3 = re.reshape(b, n // m, m)
        i3 = im.reshape(b, n // m, m)
        lo_r = r3[:, :, :half]
        hi_r = r3[:, :, half:]
        lo_i = i3[:, :, :half]
        hi_i = i3[:, :, half:]
        tr = hi_r * wr - hi_i * wi
        ti = hi_r * wi + hi_i * wr
        hi_r[...] = lo_r - tr
        hi_i[...] = lo_i - ti
        lo_r[...] += tr
        lo_i[...] += ti
        half = m


def adam_update_numpy(
    p: np.ndarray,
    g: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    alpha: float,
    beta1: float,
    beta2: float,
    eps: float,
    c1: float,
    c2: float,
) -> None:
    """One fused Adam update on flat float64 buffers (in place).

    ``c1`` and ``c2`` are the bias-correction factors ``1 - beta1**t``
    and ``1 - beta2**t`` for the current step ``t``.
    """
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    p -= alpha * (m / c1) / (np.sqrt(v / c2) + eps)


def _make_numba_kernels():
    from numba import njit

    @njit(cache=True)
    def fft_inplace_numba(a, rev, tw):  # pragma: no cover - measured via dispatch
        # Same real-arithmetic order as fft_inplace_numpy, for bit parity.
        b, n = a.shape
        if n == 1:
            return
        scratch = np.empty(n, dtype=np.complex128)
        for row in range(b):
            for i in range(n):
                scratch[i] = a[row, rev[i]]
            for i in range(n):
                a[row, i] = scratch[i]
            half = 1
            while half < n:
                m = 2 * half
                off = half - 1
                for start in range(0, n, m):
                    for j in range(half):
                        i1 = start + j
                        i2 = start + half + j
                        hr = a[row, i2].real
                        hj = a[row, i2].imag
                        wr = tw[off + j].real
                        wi = tw[off + j].imag
                        tr = hr * wr - hj * wi
                        ti = hr * wi + hj * wr
                        lr = a[row, i1].real
                        li = a[row, i1].imag
                        a[row, i2] = complex(lr - tr, li - ti)
                        a[row, i1] = complex(lr + tr, li + ti)
                half = m

    @njit(cache=True)
    def adam_update_numba(p, g, m, v, alpha, beta1, beta2, eps, c1, c2):  # pragma: no cover
        for i in range(p.shape[0]):
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i]
            v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i])
            p[i] -= alpha * (m[i] / c1) / (np.sqrt(v[i] / c2) + eps)

    return fft_inplace_numba, adam_update_numba


NUMBA_ENABLED = False
fft_inplace = fft_inplace_numpy
adam_update = adam_update_numpy

if not _DISABLED:
    try:
        fft_inplace, adam_update = _make_numba_kernels()
        NUMBA_ENABLED = True
    except ImportError:
        pass


def active_backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
