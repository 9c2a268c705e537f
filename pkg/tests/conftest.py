"""Shared oracles and builders for the test suite.

The DFT and windowing oracles are deliberately naive, written as
explicit summation/enumeration so they share no code with the library
paths they check.
"""

from __future__ import annotations

import cmath

import numpy as np
import pytest

from duonet.network import BlockShape, DualBlock, Network


def naive_dft(x) -> np.ndarray:
    """O(N^2) forward DFT by direct summation, X_k = sum_n x_n w^(nk)."""
    xs = list(np.asarray(x).ravel())
    n = len(xs)
    out = []
    for k in range(n):
        acc = 0 + 0j
        for idx, v in enumerate(xs):
            acc += v * cmath.exp(-2j * cmath.pi * idx * k / n)
        out.append(acc)
    return np.array(out, dtype=np.complex128)


def naive_rfft(x) -> np.ndarray:
    full = naive_dft(x)
    return full[: len(full) // 2 + 1]


def enumerate_windows(L: int, m: int, n: int, stride: int):
    """All valid (input indices, target indices) pairs by direct enumeration."""
    pairs = []
    s = max(m, n)
    while s <= L:
        pairs.append((list(range(s - m, s)), list(range(s - n, s))))
        s += stride
    return pairs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def small_fsnn(seed: int = 3) -> Network:
    net = Network(
        [
            DualBlock(BlockShape(8, 6), transform="rfft", activation="gelu"),
            DualBlock(BlockShape(6, 4), transform="rfft", activation="identity"),
        ]
    )
    net.init_params(seed)
    return net


def random_batch(net: Network, rng, batch: int = 4):
    s_in, d_in = net.in_shape
    s_out, d_out = net.out_shape
    xb = rng.normal(size=(batch, s_in * d_in))
    yb = rng.normal(size=(batch, s_out * d_out))
    return xb, yb


def gradient_check_configs():
    """20 deterministic model configurations spanning the contract space.

    Covers {rfft, explicit identity, Hadamard} transforms, the four
    smooth-or-kinked activations, and dual/transform-only/time-only
    variants.
    """
    transforms = ("rfft", "identity", "hadamard")
    activations = ("identity", "relu", "gelu", "tanh")
    variants = ("dual", "transform_only", "time_only")
    shapes = ((8, 8), (8, 4), (4, 8), (16, 8), (8, 2))
    configs = []
    for i in range(20):
        t = transforms[i % 3]
        act = activations[i % 4]
        variant = variants[i % 3]
        s_in, s_out = shapes[i % 5]
        time_on = variant != "transform_only"
        tf_on = variant != "time_only"
        configs.append(
            {
                "seed": 100 + i,
                "transform": t,
                "activation": act,
                "time_enabled": time_on,
                "transform_enabled": tf_on,
                "s_in": s_in,
                "s_out": s_out,
            }
        )
    return configs


def build_config_net(cfg: dict) -> Network:
    net = Network(
        [
            DualBlock(
                BlockShape(cfg["s_in"], cfg["s_out"]),
                transform=cfg["transform"],
                activation=cfg["activation"],
                time_enabled=cfg["time_enabled"],
                transform_enabled=cfg["transform_enabled"],
            )
        ]
    )
    net.init_params(cfg["seed"])
    return net


def kink_free_batch(net: Network, seed: int, batch: int = 4, margin: float = 1e-4):
    """Batch whose relu pre-activations stay away from the kink.

    Shifts the draw until every block's pre-activation magnitude
    clears ``margin``, so central differences see a smooth function.
    """
    from duonet.autograd import _forward_cached

    r = np.random.default_rng(seed)
    s_in, d_in = net.in_shape
    s_out, d_out = net.out_shape
    for attempt in range(50):
        xb = r.normal(size=(batch, s_in * d_in)) + 0.013 * attempt
        yb = r.normal(size=(batch, s_out * d_out))
        _, caches = _forward_cached(net, xb)
        ok = all(np.min(np.abs(c["pre"])) > margin for c in caches)
        if ok:
            return xb, yb
    raise AssertionError("could not find a kink-free batch")
