"""Run configuration: nested dataclasses with a YAML file format.

One file fully determines a run (model, windowing, optimizer, data,
seed), and ``parse(dump(config))`` reproduces the config exactly.  YAML
scalar quirks (``1e-8`` parsing as a string) are absorbed by coercing
every numeric field explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .errors import ConfigError
from .network import ACTIVATIONS, TRANSFORMS, BlockShape, DualBlock, Network

__all__ = [
    "BlockSpec",
    "WindowSpec",
    "OptimSpec",
    "DataSpec",
    "TrainConfig",
    "parse_config",
    "config_to_dict",
    "loads_config",
    "dumps_config",
    "load_config",
    "save_config",
    "build_network",
]


def _coerce(value, kind, where: str):
    if value is None:
        raise ConfigError(f"{where}: missing value")
    try:
        if kind is bool:
            if isinstance(value, bool):
                return value
            if isinstance(value, str) and value.lower() in ("true", "false"):
                return value.lower() == "true"
            raise ValueError(f"not a boolean: {value!r}")
        if kind is int:
            out = int(value)
            if isinstance(value, float) and value != out:
                raise ValueError(f"not an integer: {value!r}")
            return out
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


@dataclass
class BlockSpec:
    """One layer: shape, transform kind, branch flags, activation."""

    s_in: int
    s_out: int
    d_in: int = 1
    d_out: int = 1
    transform: str = "rfft"
    activation: str = "gelu"
    time_enabled: bool = True
    transform_enabled: bool = True

    def validate(self, where: str) -> None:
        if self.s_in < 1 or self.s_out < 1 or self.d_in < 1 or self.d_out < 1:
            raise ConfigError(f"{where}: block sizes must be >= 1")
        if self.transform not in TRANSFORMS:
            raise ConfigError(
                f"{where}: unknown transform {self.transform!r}, expected one of {TRANSFORMS}"
            )
        if self.activation not in ACTIVATIONS:
            raise ConfigError(
                f"{where}: unknown activation {self.activation!r}, expected one of {ACTIVATIONS}"
            )
        if not (self.time_enabled or self.transform_enabled):
            raise ConfigError(f"{where}: at least one branch must be enabled")


@dataclass
class WindowSpec:
    """Input/output window lengths and anchor stride."""

    m: int
    n: int
    stride: int = 1

    def validate(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ConfigError(f"window: m and n must be >= 1, got m={self.m} n={self.n}")
        if self.stride < 1:
            raise ConfigError(f"window: stride must be >= 1, got {self.stride}")


@dataclass
class OptimSpec:
    """Update rule, its constants, and the epoch/batch budget."""

    kind: str = "adam"
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    epochs: int = 10

    def validate(self) -> None:
        if self.kind not in ("sgd", "adam"):
            raise ConfigError(f"optim: unknown kind {self.kind!r}")
        if not self.alpha > 0:
            raise ConfigError("optim: alpha must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("optim: beta1 and beta2 must lie in [0, 1)")
        if not self.eps > 0:
            raise ConfigError("optim: eps must be positive")
        if self.batch_size < 1:
            raise ConfigError("optim: batch_size must be >= 1")
        if self.epochs < 0:
            raise ConfigError("optim: epochs must be >= 0")


@dataclass
class DataSpec:
    """Either a synthetic-generation recipe or a CSV path, plus the split."""

    kind: str = "synthetic"
    num_samples: int = 1000
    dt: float = 0.1
    seed: int | None = None
    path: str | None = None
    split: tuple[float, float, float] = (0.7, 0.15, 0.15)

    def validate(self) -> None:
        if self.kind not in ("synthetic", "csv"):
            raise ConfigError(f"data: unknown kind {self.kind!r}")
        if self.kind == "synthetic":
            if self.num_samples < 1:
                raise ConfigError("data: num_samples must be >= 1")
            if not self.dt > 0:
                raise ConfigError("data: dt must be positive")
        if self.kind == "csv" and not self.path:
            raise ConfigError("data: csv kind requires a path")
        if len(self.split) != 3 or any(f < 0 for f in self.split):
            raise ConfigError(f"data: split must be three non-negative fractions, got {self.split}")
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise ConfigError(f"data: split must sum to 1, got {self.split}")


@dataclass
class TrainConfig:
    """Everything one training run needs, reproducible from the file alone."""

    blocks: list[BlockSpec]
    window: WindowSpec
    optim: OptimSpec = field(default_factory=OptimSpec)
    data: DataSpec = field(default_factory=DataSpec)
    seed: int = 0

    # train() reads the budget directly off the config
    @property
    def batch_size(self) -> int:
        return self.optim.batch_size

    @property
    def epochs(self) -> int:
        return self.optim.epochs

    @property
    def data_seed(self) -> int:
        return self.seed if self.data.seed is None else self.data.seed

    def validate(self) -> None:
        if not self.blocks:
            raise ConfigError("model: needs at least one block")
        for i, b in enumerate(self.blocks):
            b.validate(f"model.blocks[{i}]")
        for prev, cur in zip(self.blocks, self.blocks[1:]):
            if (prev.s_out, prev.d_out) != (cur.s_in, cur.d_in):
                raise ConfigError(
                    f"model: block chain mismatch, [{prev.s_out} x {prev.d_out}] feeds "
                    f"[{cur.s_in} x {cur.d_in}]"
                )
        self.window.validate()
        if self.blocks[0].s_in != self.window.m or self.blocks[-1].s_out != self.window.n:
            raise ConfigError(
                f"model: first block s_in ({self.blocks[0].s_in}) must equal window m "
                f"({self.window.m}) and last block s_out ({self.blocks[-1].s_out}) must "
                f"equal window n ({self.window.n})"
            )
        self.optim.validate()
        self.data.validate()


def _reject_unknown(section: dict, known: set, where: str) -> None:
    extra = set(section) - known
    if extra:
        raise ConfigError(f"unknown {where} keys: {sorted(extra)}")


def parse_config(raw: dict) -> TrainConfig:
    """Build and validate a TrainConfig from a parsed mapping."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be a mapping, got {type(raw).__name__}")
    _reject_unknown(raw, {"model", "window", "optim", "data", "seed"}, "config")

    model = raw.get("model") or {}
    _reject_unknown(model, {"blocks"}, "model")
    blocks_raw = model.get("blocks")
    if not blocks_raw:
        raise ConfigError("model.blocks: missing or empty")
    blocks = []
    block_keys = {
        "s_in", "s_out", "d_in", "d_out",
        "transform", "activation", "time_enabled", "transform_enabled",
    }
    for i, b in enumerate(blocks_raw):
        where = f"model.blocks[{i}]"
        if not isinstance(b, dict):
            raise ConfigError(f"{where}: must be a mapping")
        _reject_unknown(b, block_keys, where)
        blocks.append(
            BlockSpec(
                s_in=_coerce(b.get("s_in"), int, f"{where}.s_in"),
                s_out=_coerce(b.get("s_out"), int, f"{where}.s_out"),
                d_in=_coerce(b.get("d_in", 1), int, f"{where}.d_in"),
                d_out=_coerce(b.get("d_out", 1), int, f"{where}.d_out"),
                transform=str(b.get("transform", "rfft")),
                activation=str(b.get("activation", "gelu")),
                time_enabled=_coerce(b.get("time_enabled", True), bool, f"{where}.time_enabled"),
                transform_enabled=_coerce(
                    b.get("transform_enabled", True), bool, f"{where}.transform_enabled"
                ),
            )
        )

    w = raw.get("window")
    if not isinstance(w, dict):
        raise ConfigError("window: missing section")
    _reject_unknown(w, {"m", "n", "stride"}, "window")
    window = WindowSpec(
        m=_coerce(w.get("m"), int, "window.m"),
        n=_coerce(w.get("n"), int, "window.n"),
        stride=_coerce(w.get("stride", 1), int, "window.stride"),
    )

    o = raw.get("optim") or {}
    _reject_unknown(
        o, {"kind", "alpha", "beta1", "beta2", "eps", "batch_size", "epochs"}, "optim"
    )
    optim = OptimSpec(
        kind=str(o.get("kind", "adam")),
        alpha=_coerce(o.get("alpha", 1e-3), float, "optim.alpha"),
        beta1=_coerce(o.get("beta1", 0.9), float, "optim.beta1"),
        beta2=_coerce(o.get("beta2", 0.999), float, "optim.beta2"),
        eps=_coerce(o.get("eps", 1e-8), float, "optim.eps"),
        batch_size=_coerce(o.get("batch_size", 32), int, "optim.batch_size"),
        epochs=_coerce(o.get("epochs", 10), int, "optim.epochs"),
    )

    d = raw.get("data") or {}
    _reject_unknown(
        d, {"kind", "num_samples", "dt", "seed", "path", "split"}, "data"
    )
    split_raw = d.get("split", [0.7, 0.15, 0.15])
    if not isinstance(split_raw, (list, tuple)):
        raise ConfigError(f"data.split: must be a list, got {split_raw!r}")
    split = tuple(_coerce(v, float, f"data.split[{i}]") for i, v in enumerate(split_raw))
    data = DataSpec(
        kind=str(d.get("kind", "synthetic")),
        num_samples=_coerce(d.get("num_samples", 1000), int, "data.num_samples"),
        dt=_coerce(d.get("dt", 0.1), float, "data.dt"),
        seed=None if d.get("seed") is None else _coerce(d.get("seed"), int, "data.seed"),
        path=None if d.get("path") is None else str(d.get("path")),
        split=split,  # type: ignore[arg-type]
    )

    cfg = TrainConfig(
        blocks=blocks,
        window=window,
        optim=optim,
        data=data,
        seed=_coerce(raw.get("seed", 0), int, "seed"),
    )
    cfg.validate()
    return cfg


def config_to_dict(cfg: TrainConfig) -> dict:
    """Plain mapping form, JSON- and YAML-serializable."""
    return {
        "seed": cfg.seed,
        "model": {
            "blocks": [
                {
                    "s_in": b.s_in,
                    "s_out": b.s_out,
                    "d_in": b.d_in,
                    "d_out": b.d_out,
                    "transform": b.transform,
                    "activation": b.activation,
                    "time_enabled": b.time_enabled,
                    "transform_enabled": b.transform_enabled,
                }
                for b in cfg.blocks
            ]
        },
        "window": {"m": cfg.window.m, "n": cfg.window.n, "stride": cfg.window.stride},
        "optim": {
            "kind": cfg.optim.kind,
            "alpha": cfg.optim.alpha,
            "beta1": cfg.optim.beta1,
            "beta2": cfg.optim.beta2,
            "eps": cfg.optim.eps,
            "batch_size": cfg.optim.batch_size,
            "epochs": cfg.optim.epochs,
        },
        "data": {
            "kind": cfg.data.kind,
            "num_samples": cfg.data.num_samples,
            "dt": cfg.data.dt,
            "seed": cfg.data.seed,
            "path": cfg.data.path,
            "split": list(cfg.data.split),
        },
    }


def loads_config(text: str) -> TrainConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return parse_config(raw)


def dumps_config(cfg: TrainConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


def load_config(path) -> TrainConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return loads_config(f.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def save_config(cfg: TrainConfig, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_config(cfg))


def build_network(cfg: TrainConfig) -> Network:
    """Instantiate the configured block chain (parameters still zero)."""
    blocks = [
        DualBlock(
            BlockShape(b.s_in, b.s_out, b.d_in, b.d_out),
            transform=b.transform,
            activation=b.activation,
            time_enabled=b.time_enabled,
            transform_enabled=b.transform_enabled,
        )
        for b in cfg.blocks
    ]
    return Network(blocks)
