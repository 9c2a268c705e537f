"""Dual-branch blocks and the layered network.

A block maps a flattened input window of ``s_in * d_in`` samples to
``s_out * d_out`` through two parallel branches:

* time branch:       ``h_l = x @ w_l.T + b_l``  (real)
* transform branch:  ``h_t = inverse(forward(x) @ w_t.T + b_t)``

with the block output ``sigma(h_l + h_t)``.  Either branch can be
disabled (a net of time-only blocks is a plain feed-forward stack; a
net of transform-only blocks is the spectral-only variant).  The
transform-branch output is real by construction: the rfft kind projects
onto the Hermitian manifold, the explicit kind takes the real part.

Multi-channel windows ``[S, D]`` are flattened row-major to ``S*D`` at
the network boundary; the transform acts on the flattened vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import ConfigError, ShapeError
from .transforms import OrthogonalTransform, make_transform, spectrum_len

__all__ = [
    "ACTIVATIONS",
    "TRANSFORMS",
    "BlockShape",
    "DualBlock",
    "Network",
    "activation",
    "activation_deriv",
    "reshape_in",
    "reshape_out",
    "time_branch",
    "transform_branch",
    "block_forward",
    "network_forward",
]

TRANSFORMS = ("rfft", "identity", "dft", "hadamard")
ACTIVATIONS = ("gelu", "relu", "tanh", "sigmoid", "identity")

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _gelu(x):
    # exact Gaussian-CDF form x * Phi(x), not the tanh approximation
    return 0.5 * x * (1.0 + erf(x / _SQRT2))


def _gelu_deriv(x):
    phi = 0.5 * (1.0 + erf(x / _SQRT2))
    return phi + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


_ACT = {
    "identity": (lambda x: x, lambda x: np.ones_like(x)),
    "relu": (
        lambda x: np.maximum(x, 0.0),
        lambda x: np.where(x > 0, 1.0, 0.0),  # subgradient 0 at the kink
    ),
    "tanh": (np.tanh, lambda x: 1.0 - np.tanh(x) ** 2),
    "sigmoid": (_sigmoid, lambda x: _sigmoid(x) * (1.0 - _sigmoid(x))),
    "gelu": (_gelu, _gelu_deriv),
}


def activation(kind: str, x: np.ndarray) -> np.ndarray:
    """Apply an activation elementwise."""
    try:
        return _ACT[kind][0](np.asarray(x, dtype=np.float64))
    except KeyError:
        raise ConfigError(f"unknown activation {kind!r}; choose from {ACTIVATIONS}") from None


def activation_deriv(kind: str, x: np.ndarray) -> np.ndarray:
    """Elementwise derivative of an activation at ``x``."""
    try:
        return _ACT[kind][1](np.asarray(x, dtype=np.float64))
    except KeyError:
        raise ConfigError(f"unknown activation {kind!r}; choose from {ACTIVATIONS}") from None


@dataclass(frozen=True)
class BlockShape:
    """Window lengths and channel counts of one block."""

    s_in: int
    s_out: int
    d_in: int = 1
    d_out: int = 1

    def __post_init__(self):
        for name in ("s_in", "s_out", "d_in", "d_out"):
            if getattr(self, name) < 1:
                raise ConfigError(f"BlockShape.{name} must be >= 1")

    @property
    def in_features(self) -> int:
        return self.s_in * self.d_in

    @property
    def out_features(self) -> int:
        return self.s_out * self.d_out


class DualBlock:
    """One dual-branch layer; parameters live on the instance.

    ``w_l`` is ``[out_features, in_features]`` real, ``w_t`` is
    ``[spec_out, spec_in]`` complex where ``spec_* = n//2 + 1`` for the
    rfft transform and ``n`` for explicit ones.  Disabled branches carry
    no parameters at all.
    """

    def __init__(
        self,
        shape: BlockShape,
        transform: str = "rfft",
        activation: str = "gelu",
        time_enabled: bool = True,
        transform_enabled: bool = True,
    ):
        if activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {activation!r}")
        if transform not in TRANSFORMS:
            raise ConfigError(f"unknown transform {transform!r}")
        if not (time_enabled or transform_enabled):
            raise ConfigError("at least one branch must be enabled")
        self.shape = shape
        self.transform = transform
        self.activation = activation
        self.time_enabled = time_enabled
        self.transform_enabled = transform_enabled

        n_in, n_out = shape.in_features, shape.out_features
        self.w_l: np.ndarray | None = None
        self.b_l: np.ndarray | None = None
        self.w_t: np.ndarray | None = None
        self.b_t: np.ndarray | None = None
        self.t_in: OrthogonalTransform | None = None
        self.t_out: OrthogonalTransform | None = None
        if time_enabled:
            self.w_l = np.zeros((n_out, n_in))
            self.b_l = np.zeros(n_out)
        if transform_enabled:
            self.t_in = make_transform(transform, n_in)
            self.t_out = make_transform(transform, n_out)
            self.w_t = np.zeros((self.spec_out, self.spec_in), dtype=np.complex128)
            self.b_t = np.zeros(self.spec_out, dtype=np.complex128)

    @property
    def spec_in(self) -> int:
        n = self.shape.in_features
        return spectrum_len(n) if self.transform == "rfft" else n

    @property
    def spec_out(self) -> int:
        n = self.shape.out_features
        return spectrum_len(n) if self.transform == "rfft" else n

    def init_params(self, rng: np.random.Generator) -> "DualBlock":
        """Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) weights, zero biases.

        Draw order is fixed (w_l row-major, then re(w_t), then im(w_t))
        so runs are reproducible from the seed alone.
        """
        if self.time_enabled:
            bound = np.sqrt(1.0 / self.shape.in_features)
            self.w_l = rng.uniform(-bound, bound, self.w_l.shape)
            self.b_l = np.zeros(self.shape.out_features)
        if self.transform_enabled:
            bound = np.sqrt(1.0 / self.spec_in)
            re = rng.uniform(-bound, bound, self.w_t.shape)
            im = rng.uniform(-bound, bound, self.w_t.shape)
            self.w_t = re + 1j * im
            self.b_t = np.zeros(self.spec_out, dtype=np.complex128)
        return self

    def param_items(self):
        """Yield (name, array) for the enabled parameters, in fixed order."""
        if self.time_enabled:
            yield "w_l", self.w_l
            yield "b_l", self.b_l
        if self.transform_enabled:
            yield "w_t", self.w_t
            yield "b_t", self.b_t

    def n_params(self) -> int:
        """Number of real scalar parameters (complex entries count twice)."""
        total = 0
        for _, arr in self.param_items():
            total += arr.size * (2 if np.iscomplexobj(arr) else 1)
        return total

    def copy(self) -> "DualBlock":
        b = DualBlock(
            self.shape,
            transform=self.transform,
            activation=self.activation,
            time_enabled=self.time_enabled,
            transform_enabled=self.transform_enabled,
        )
        for name, arr in self.param_items():
            setattr(b, name, arr.copy())
        return b


def _check_width(x: np.ndarray, width: int, what: str) -> None:
    if x.shape[-1] != width:
        raise ShapeError(f"{what}: expected length {width}, got {x.shape[-1]}")


def time_branch(block: DualBlock, x: np.ndarray) -> np.ndarray:
    """``x @ w_l.T + b_l`` for a vector or ``[B, in_features]`` batch."""
    if not block.time_enabled:
        raise ConfigError("time branch is disabled on this block")
    x = np.asarray(x, dtype=np.float64)
    _check_width(x, block.shape.in_features, "time_branch")
    return x @ block.w_l.T + block.b_l


def transform_branch(block: DualBlock, x: np.ndarray) -> np.ndarray:
    """Transform-domain branch; output is real (see module docstring)."""
    if not block.transform_enabled:
        raise ConfigError("transform branch is disabled on this block")
    x = np.asarray(x, dtype=np.float64)
    _check_width(x, block.shape.in_features, "transform_branch")
    spec = block.t_in.apply(x)
    z = spec @ block.w_t.T + block.b_t
    out = block.t_out.apply_inverse(z)
    if np.iscomplexobj(out):
        out = np.ascontiguousarray(out.real)
    return out


def block_forward(block: DualBlock, x: np.ndarray) -> np.ndarray:
    """Activated sum of the enabled branches."""
    if block.time_enabled and block.transform_enabled:
        s = time_branch(block, x) + transform_branch(block, x)
    elif block.time_enabled:
        s = time_branch(block, x)
    else:
        s = transform_branch(block, x)
    return activation(block.activation, s)


def reshape_in(m: np.ndarray) -> np.ndarray:
    """Row-major flattening of an ``[S, D]`` window to a length-``S*D`` vector."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"reshape_in expects an [S, D] matrix, got shape {a.shape}")
    return a.reshape(-1)


def reshape_out(v: np.ndarray, s_out: int, d_out: int) -> np.ndarray:
    """Inverse of ``reshape_in`` onto an ``[s_out, d_out]`` window."""
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1 or a.shape[0] != s_out * d_out:
        raise ShapeError(
            f"reshape_out: cannot view length-{a.shape} vector as [{s_out}, {d_out}]"
        )
    return a.reshape(s_out, d_out)


class Network:
    """An ordered stack of blocks; shape chaining is checked up front."""

    def __init__(self, blocks: list[DualBlock]):
        if not blocks:
            raise ConfigError("a network needs at least one block")
        for prev, nxt in zip(blocks, blocks[1:]):
            if (prev.shape.s_out, prev.shape.d_out) != (nxt.shape.s_in, nxt.shape.d_in):
                raise ConfigError(
                    f"block chain broken: [{prev.shape.s_out} x {prev.shape.d_out}] "
                    f"feeds [{nxt.shape.s_in} x {nxt.shape.d_in}]"
                )
        self.blocks = list(blocks)

    @property
    def in_shape(self) -> tuple[int, int]:
        return self.blocks[0].shape.s_in, self.blocks[0].shape.d_in

    @property
    def out_shape(self) -> tuple[int, int]:
        return self.blocks[-1].shape.s_out, self.blocks[-1].shape.d_out

    def n_params(self) -> int:
        return sum(b.n_params() for b in self.blocks)

    def copy(self) -> "Network":
        return Network([b.copy() for b in self.blocks])

    def init_params(self, seed: int) -> "Network":
        """Seeded init of every block (counter-based Philox stream)."""
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 0))))
        for b in self.blocks:
            b.init_params(rng)
        return self

    def forward_flat(self, x: np.ndarray) -> np.ndarray:
        """Forward pass on flattened vectors (``[B, in_features]`` or 1-D)."""
        for b in self.blocks:
            x = block_forward(b, x)
        return x

    def forward(self, window: np.ndarray) -> np.ndarray:
        return network_forward(self, window)


def network_forward(net: Network, window: np.ndarray) -> np.ndarray:
    """Evaluate the network on one ``[S_i, D_i]`` window or a batch of them."""
    w = np.asarray(window, dtype=np.float64)
    s_in, d_in = net.in_shape
    s_out, d_out = net.out_shape
    if w.ndim == 2:
        if w.shape != (s_in, d_in):
            raise ShapeError(f"expected window [{s_in}, {d_in}], got {w.shape}")
        return net.forward_flat(w.reshape(-1)).reshape(s_out, d_out)
    if w.ndim == 3:
        if w.shape[1:] != (s_in, d_in):
            raise ShapeError(f"expected windows [B, {s_in}, {d_in}], got {w.shape}")
        out = net.forward_flat(w.reshape(w.shape[0], -1))
        return out.reshape(w.shape[0], s_out, d_out)
    raise ShapeError(f"expected an [S, D] window or a batch, got shape {w.shape}")
