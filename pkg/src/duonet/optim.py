"""Parameter updates (SGD, Adam) and the windowed training loop.

Complex parameters are optimized as their interleaved (re, im) float64
views, matching the gradient convention in ``autograd``.  Adam keeps one
moment pair per scalar coordinate and applies the standard
bias-corrected update.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ._kernels import adam_update
from .autograd import GradientSet, backward, grad_views, param_views
from .errors import ConfigError, NumericError
from .evaluation import nrmse, rmse
from .network import Network, network_forward

__all__ = ["OptimizerState", "TrainReport", "make_optimizer", "sgd_step", "adam_step", "train"]


@dataclass
class OptimizerState:
    """Update-rule settings plus per-coordinate moment buffers.

    ``m`` and ``v`` are keyed like the parameter groups and shaped like
    their flat real views (a complex parameter therefore carries two
    moments, one per real coordinate).  SGD leaves them empty.
    """

    kind: str = "adam"
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("sgd", "adam"):
            raise ConfigError(f"unknown optimizer kind {self.kind!r}")
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("beta1 and beta2 must lie in [0, 1)")
        if not self.eps > 0:
            raise ConfigError("eps must be positive")
        if self.step_count < 0:
            raise ConfigError("step_count must be >= 0")


def make_optimizer(net: Network, kind: str = "adam", **kwargs) -> OptimizerState:
    """Fresh optimizer state with zeroed moments congruent to ``net``."""
    state = OptimizerState(kind=kind, **kwargs)
    if kind == "adam":
        for group, view in param_views(net):
            state.m[group] = np.zeros_like(view)
            state.v[group] = np.zeros_like(view)
    return state


def _checked_grad_views(net: Network, grads: list[GradientSet]):
    views = dict(grad_views(grads))
    for group, view in param_views(net):
        g = views.get(group)
        if g is None:
            raise ConfigError(f"gradient set missing group {group}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in {group}")
        yield group, view, g


def sgd_step(net: Network, grads: list[GradientSet], alpha: float) -> Network:
    """In-place plain gradient descent: every coordinate moves by -alpha*g."""
    for _, view, g in _checked_grad_views(net, grads):
        view -= alpha * g
    return net


def adam_step(state: OptimizerState, net: Network, grads: list[GradientSet]) -> Network:
    """One bias-corrected Adam update, in place, advancing ``state``."""
    if state.kind != "adam":
        raise ConfigError(f"adam_step called with optimizer kind {state.kind!r}")
    state.step_count += 1
    t = state.step_count
    c1 = 1.0 - state.beta1**t
    c2 = 1.0 - state.beta2**t
    for group, view, g in _checked_grad_views(net, grads):
        adam_update(
            view, g, state.m[group], state.v[group],
            state.alpha, state.beta1, state.beta2, state.eps, c1, c2,
        )
        if not np.all(np.isfinite(view)):
            raise NumericError(f"non-finite parameter after update in {group}")
    return net


@dataclass
class TrainReport:
    """Per-epoch losses plus optional validation scores for one run."""

    losses: list[float] = field(default_factory=list)
    val_rmse: float | None = None
    val_nrmse: float | None = None
    wall_seconds: float = 0.0
    seed: int = 0


def _epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    # Stream (seed, 1, epoch): disjoint from the (seed, 0) init stream.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 1, epoch))))


def train(
    net: Network,
    dataset,
    config,
    val_dataset=None,
    progress=None,
) -> tuple[Network, TrainReport]:
    """Run the epoch/batch loop over a windowed dataset, in place.

    ``config`` needs ``epochs``, ``seed``, ``batch_size`` and an
    ``optim`` entry matching :class:`OptimizerState`'s settings (see
    ``config.TrainConfig``).  Each epoch shuffles window order with a
    counter-based stream keyed by (seed, epoch), walks fixed-size
    batches (last partial batch kept), and reports the window-weighted
    mean loss as one ``epoch=<e> loss=<f>`` line.  Given the same
    initialized network, dataset, and config the run is bit
    reproducible.

    ``progress`` is called with each epoch line; ``None`` prints them.
    """
    emit = print if progress is None else progress
    n_windows = len(dataset)
    if n_windows < 1:
        raise ConfigError("dataset has no windows")
    bs = int(config.batch_size)
    if bs < 1:
        raise ConfigError(f"batch_size must be >= 1, got {bs}")
    epochs = int(config.epochs)
    if epochs < 0:
        raise ConfigError(f"epochs must be >= 0, got {epochs}")
    seed = int(config.seed)

    opt = config.optim
    state = make_optimizer(
        net, kind=opt.kind, alpha=opt.alpha,
        beta1=opt.beta1, beta2=opt.beta2, eps=opt.eps,
    )

    xb_all = np.ascontiguousarray(dataset.inputs.reshape(n_windows, -1))
    yb_all = np.ascontiguousarray(dataset.targets.reshape(n_windows, -1))

    t0 = time.perf_counter()
    report = TrainReport(seed=seed)
    for epoch in range(epochs):
        order = _epoch_rng(seed, epoch).permutation(n_windows)
        total = 0.0
        for start in range(0, n_windows, bs):
            idx = order[start : start + bs]
            loss, grads = backward(net, (xb_all[idx], yb_all[idx]))
            total += loss * idx.shape[0]
            if state.kind == "sgd":
                sgd_step(net, grads, state.alpha)
            else:
                adam_step(state, net, grads)
        epoch_loss = total / n_windows
        if not np.isfinite(epoch_loss):
            raise NumericError(f"training diverged: epoch {epoch} loss {epoch_loss}")
        report.losses.append(epoch_loss)
        emit(f"epoch={epoch} loss={epoch_loss!r}")

    if val_dataset is not None and len(val_dataset) > 0:
        preds = network_forward(net, val_dataset.inputs)
        yhat = preds.reshape(-1, preds.shape[-1])
        ymeas = val_dataset.targets.reshape(-1, val_dataset.targets.shape[-1])
        report.val_rmse = rmse(ymeas, yhat)
        report.val_nrmse = nrmse(ymeas, yhat)
    report.wall_seconds = time.perf_counter() - t0
    return net, report
