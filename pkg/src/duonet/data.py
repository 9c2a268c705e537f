"""Datasets, synthetic signal generation, CSV files, and checkpoints.

Windows follow the half-open zero-based convention: anchor ``s`` runs
from ``max(m, n)`` to ``L`` in steps of ``stride``, taking input rows
``[s-m, s)`` and target rows ``[s-n, s)``.  Overlap is allowed when
``stride`` is smaller than the window lengths.
"""

from __future__ import annotations

import io
import json
import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CheckpointError, ConfigError, DataFormatError, ShapeError
from .network import BlockShape, DualBlock, Network

__all__ = [
    "SignalRecord",
    "WindowedDataset",
    "StaticSystemParams",
    "build_windows",
    "split_record",
    "generate_static_system",
    "load_csv",
    "save_csv",
    "save_checkpoint",
    "load_checkpoint",
    "CHECKPOINT_MAGIC",
    "CHECKPOINT_VERSION",
]


@dataclass
class SignalRecord:
    """Aligned input/output measurements sampled at a constant rate.

    ``u`` is [L, D_in], ``y`` is [L, D_out]; rows correspond in time.
    ``sample_period`` is informational (seconds per row).
    """

    u: np.ndarray
    y: np.ndarray
    sample_period: float = 1.0

    def __post_init__(self):
        self.u = _as_signal(self.u, "u")
        self.y = _as_signal(self.y, "y")
        if self.u.shape[0] != self.y.shape[0]:
            raise ShapeError(
                f"u has {self.u.shape[0]} rows but y has {self.y.shape[0]}"
            )
        if not self.sample_period > 0:
            raise ConfigError("sample_period must be positive")

    def __len__(self) -> int:
        return self.u.shape[0]


def _as_signal(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 1-D or 2-D, got ndim={arr.ndim}")
    return np.ascontiguousarray(arr)


@dataclass
class WindowedDataset:
    """Stacked training windows: inputs [W, m, D_in], targets [W, n, D_out]."""

    inputs: np.ndarray
    targets: np.ndarray
    m: int
    n: int
    stride: int

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def __getitem__(self, i: int):
        return self.inputs[i], self.targets[i]

    def pairs(self):
        for i in range(len(self)):
            yield self.inputs[i], self.targets[i]


def build_windows(rec: SignalRecord, m: int, n: int, stride: int = 1) -> WindowedDataset:
    """Slice a record into (input, target) window pairs.

    Anchors are ``s = max(m, n), max(m, n)+stride, ... <= L``; each window
    is ``(u[s-m:s], y[s-n:s])``.  Raises when the record is shorter than
    one window.
    """
    if m < 1 or n < 1:
        raise ConfigError(f"window lengths must be >= 1, got m={m} n={n}")
    if stride < 1:
        raise ConfigError(f"stride must be >= 1, got {stride}")
    L = len(rec)
    lead = max(m, n)
    if L < lead:
        raise ShapeError(
            f"record length {L} is shorter than one window (max(m, n) = {lead})"
        )
    count = (L - lead) // stride + 1
    d_in = rec.u.shape[1]
    d_out = rec.y.shape[1]
    inputs = np.empty((count, m, d_in), dtype=np.float64)
    targets = np.empty((count, n, d_out), dtype=np.float64)
    for w in range(count):
        s = lead + w * stride
        inputs[w] = rec.u[s - m : s]
        targets[w] = rec.y[s - n : s]
    return WindowedDataset(inputs, targets, m=m, n=n, stride=stride)


def split_record(
    rec: SignalRecord, fractions: tuple[float, float, float] = (0.7, 0.15, 0.15)
) -> tuple[SignalRecord, SignalRecord, SignalRecord]:
    """Cut a record into contiguous train/validation/test segments.

    Splitting the raw signal (rather than the window list) keeps any
    window overlap from leaking across the split boundaries.
    """
    if len(fractions) != 3 or any(f < 0 for f in fractions):
        raise ConfigError(f"need three non-negative fractions, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigError(f"fractions must sum to 1, got {fractions}")
    L = len(rec)
    c1 = int(math.floor(L * fractions[0]))
    c2 = int(math.floor(L * (fractions[0] + fractions[1])))
    parts = []
    for lo, hi in ((0, c1), (c1, c2), (c2, L)):
        parts.append(
            SignalRecord(rec.u[lo:hi].copy(), rec.y[lo:hi].copy(), rec.sample_period)
        )
    return tuple(parts)


@dataclass
class StaticSystemParams:
    """Drawn coefficients of the synthetic affine system."""

    alphas: np.ndarray
    beta1: float
    beta2: float

    def as_dict(self) -> dict:
        d = {f"alpha{i + 1}": float(a) for i, a in enumerate(self.alphas)}
        d["beta1"] = float(self.beta1)
        d["beta2"] = float(self.beta2)
        return d


def generate_static_system(
    seed: int, num_samples: int, dt: float = 0.1
) -> tuple[SignalRecord, StaticSystemParams]:
    """Sample the synthetic affine benchmark.

    All seven coefficients are one Uniform(-5, 5) draw from a Philox
    stream (five frequencies, then the two affine terms), so the record
    is fully determined by the seed and dt.  The input is a sum of five
    unit sines; the output is an affine function of the input.
    """
    if num_samples < 1:
        raise ConfigError(f"num_samples must be >= 1, got {num_samples}")
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    draw = rng.uniform(-5.0, 5.0, size=7)
    alphas = draw[:5].copy()
    beta1 = float(draw[5])
    beta2 = float(draw[6])
    t = np.arange(num_samples, dtype=np.float64) * dt
    u = np.sin(np.outer(t, alphas)).sum(axis=1)
    y = beta1 * u + math.pi * beta2
    rec = SignalRecord(u[:, None], y[:, None], sample_period=dt)
    return rec, StaticSystemParams(alphas, beta1, beta2)


# --- CSV -------------------------------------------------------------------


def save_csv(rec: SignalRecord, path) -> None:
    """Write a record as a UTF-8 CSV with header ``u0,...,y0,...``.

    Values are printed with shortest-roundtrip decimals so a following
    load reproduces them bit for bit.
    """
    d_in = rec.u.shape[1]
    d_out = rec.y.shape[1]
    header = ",".join(
        [f"u{i}" for i in range(d_in)] + [f"y{i}" for i in range(d_out)]
    )
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        for k in range(len(rec)):
            row = [repr(float(v)) for v in rec.u[k]] + [
                repr(float(v)) for v in rec.y[k]
            ]
            f.write(",".join(row) + "\n")


def load_csv(path) -> SignalRecord:
    """Read a CSV written by :func:`save_csv`; errors carry line numbers."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline()
        if not header:
            raise DataFormatError(f"{path}: empty file, missing header")
        names = [c.strip() for c in header.rstrip("\n").split(",")]
        d_in = sum(1 for c in names if c.startswith("u"))
        d_out = len(names) - d_in
        expected = [f"u{i}" for i in range(d_in)] + [f"y{i}" for i in range(d_out)]
        if d_in < 1 or d_out < 1 or names != expected:
            raise DataFormatError(
                f"{path} line 1: header must read u0..u{{k}},y0..y{{j}}, got {names}"
            )
        width = len(names)
        u_rows: list[list[float]] = []
        y_rows: list[list[float]] = []
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != width:
                raise DataFormatError(
                    f"{path} line {lineno}: expected {width} columns, got {len(cells)}"
                )
            try:
                vals = [float(c) for c in cells]
            except ValueError as exc:
                raise DataFormatError(f"{path} line {lineno}: {exc}") from None
            u_rows.append(vals[:d_in])
            y_rows.append(vals[d_in:])
        if not u_rows:
            raise DataFormatError(f"{path}: no data rows")
    return SignalRecord(np.array(u_rows), np.array(y_rows))


# --- checkpoints -----------------------------------------------------------

CHECKPOINT_MAGIC = b"DUONET"
CHECKPOINT_VERSION = 1


def _block_descriptor(block: DualBlock) -> dict:
    return {
        "s_in": block.shape.s_in,
        "s_out": block.shape.s_out,
        "d_in": block.shape.d_in,
        "d_out": block.shape.d_out,
        "transform": block.transform,
        "activation": block.activation,
        "time_enabled": block.time_enabled,
        "transform_enabled": block.transform_enabled,
    }


def _write_section(buf: io.BytesIO, name: str, payload: bytes) -> None:
    nb = name.encode("utf-8")
    buf.write(struct.pack("<I", len(nb)))
    buf.write(nb)
    buf.write(struct.pack("<Q", len(payload)))
    buf.write(payload)


def save_checkpoint(net: Network, path, *, seed=None, config=None, optim_echo=None) -> None:
    """Serialize a network (and run metadata) to a versioned binary file.

    Layout: magic ``DUONET``, little-endian u32 version, then
    length-prefixed sections.  Section ``meta`` is JSON (block
    descriptors, seed, config/optimizer echoes); section ``params`` is
    the concatenated parameter arrays as little-endian f64, complex
    values interleaved re/im, in block then (w_l, b_l, w_t, b_t) order.
    """
    meta = {
        "blocks": [_block_descriptor(b) for b in net.blocks],
        "seed": seed,
        "config": config,
        "optim": optim_echo,
    }
    chunks = []
    for block in net.blocks:
        for _, arr in block.param_items():
            if np.iscomplexobj(arr):
                chunks.append(arr.view(np.float64).astype("<f8").tobytes())
            else:
                chunks.append(arr.astype("<f8").tobytes())
    buf = io.BytesIO()
    buf.write(CHECKPOINT_MAGIC)
    buf.write(struct.pack("<I", CHECKPOINT_VERSION))
    _write_section(buf, "meta", json.dumps(meta).encode("utf-8"))
    _write_section(buf, "params", b"".join(chunks))
    with open(path, "wb") as f:
        f.write(buf.getvalue())


def _read_exact(f, n: int, what: str) -> bytes:
    b = f.read(n)
    if len(b) != n:
        raise CheckpointError(f"truncated checkpoint while reading {what}")
    return b


def load_checkpoint(path) -> tuple[Network, dict]:
    """Rebuild a network from :func:`save_checkpoint` output.

    Returns ``(network, meta)``.  The reconstructed forward pass is bit
    identical to the saved network's.
    """
    with open(path, "rb") as f:
        magic = f.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointError(f"bad magic {magic!r}, not a checkpoint file")
        (version,) = struct.unpack("<I", _read_exact(f, 4, "version"))
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"unsupported checkpoint version {version} (expected {CHECKPOINT_VERSION})"
            )
        sections: dict[str, bytes] = {}
        while True:
            head = f.read(4)
            if not head:
                break
            if len(head) < 4:
                raise CheckpointError("truncated checkpoint while reading section header")
            (name_len,) = struct.unpack("<I", head)
            name = _read_exact(f, name_len, "section name").decode("utf-8")
            (size,) = struct.unpack("<Q", _read_exact(f, 8, "section size"))
            sections[name] = _read_exact(f, size, f"section {name!r}")
    for required in ("meta", "params"):
        if required not in sections:
            raise CheckpointError(f"missing section {required!r}")
    try:
        meta = json.loads(sections["meta"].decode("utf-8"))
        descriptors = meta["blocks"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"malformed meta section: {exc}") from None

    blocks = []
    for d in descriptors:
        try:
            shape = BlockShape(d["s_in"], d["s_out"], d["d_in"], d["d_out"])
            blocks.append(
                DualBlock(
                    shape,
                    transform=d["transform"],
                    activation=d["activation"],
                    time_enabled=d["time_enabled"],
                    transform_enabled=d["transform_enabled"],
                )
            )
        except (KeyError, TypeError) as exc:
            raise CheckpointError(f"malformed block descriptor: {exc}") from None
    net = Network(blocks)

    raw = np.frombuffer(sections["params"], dtype="<f8")
    expected = sum(b.n_params() for b in net.blocks)
    if raw.shape[0] != expected:
        raise CheckpointError(
            f"params section holds {raw.shape[0]} values, expected {expected}"
        )
    pos = 0
    for block in net.blocks:
        for name, arr in block.param_items():
            count = arr.size * (2 if np.iscomplexobj(arr) else 1)
            flat = raw[pos : pos + count].astype(np.float64)
            pos += count
            if np.iscomplexobj(arr):
                arr[...] = flat.view(np.complex128).reshape(arr.shape)
            else:
                arr[...] = flat.reshape(arr.shape)
    return net, meta
