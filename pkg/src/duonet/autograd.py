"""Reverse-mode gradients of the mean-squared-error loss.

The network is a fixed composition, so the backward pass is written as
explicit per-block rules rather than a general tape.  Complex
parameters are differentiated as (re, im) pairs: a complex gradient
array ``G`` holds ``dL/d(re) + 1j * dL/d(im)``, which is what makes the
finite-difference comparison below direct.

Transform-branch rules, with ``Z = X @ w_t.T + b_t`` and ``X`` the
transformed input:

* cotangent of ``Z`` is the adjoint of the inverse transform applied to
  the incoming real gradient (for the rfft kind this zeroes the
  imaginary DC/Nyquist components exactly -- the Hermitian projection
  kills those directions);
* ``dL/dw_t = G_Z.T @ conj(X)`` and ``dL/db_t = sum_batch G_Z``;
* the input cotangent goes back through the adjoint of the forward
  transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError, ShapeError
from .network import DualBlock, Network, activation_deriv
from .transforms import irfft_adjoint_batch, rfft_adjoint_batch, rfft_batch

__all__ = [
    "GradientSet",
    "GradCheckReport",
    "backward",
    "finite_diff_check",
    "param_views",
    "grad_views",
    "mse_loss",
]


@dataclass
class GradientSet:
    """Gradients mirroring one block's enabled parameters.

    Real arrays for the time branch; complex arrays (re/im pair
    semantics, interleaved in memory) for the transform branch.  A
    disabled branch's entries stay ``None``.
    """

    w_l: np.ndarray | None = None
    b_l: np.ndarray | None = None
    w_t: np.ndarray | None = None
    b_t: np.ndarray | None = None

    def items(self):
        for name in ("w_l", "b_l", "w_t", "b_t"):
            arr = getattr(self, name)
            if arr is not None:
                yield name, arr


@dataclass
class GradCheckReport:
    """Outcome of a finite-difference sweep over every real coordinate."""

    per_group: dict[str, float] = field(default_factory=dict)
    max_rel_error: float = 0.0
    worst: str = ""
    step: float = 0.0


def _flat_real_view(arr: np.ndarray) -> np.ndarray:
    """1-D float64 view of a parameter array (complex -> interleaved re/im)."""
    if not arr.flags.c_contiguous:
        raise ShapeError("parameter arrays must be C-contiguous")
    if np.iscomplexobj(arr):
        return arr.view(np.float64).reshape(-1)
    return arr.reshape(-1)


def param_views(net: Network):
    """Yield ``(group, flat_real_view)`` over all parameters, in fixed order."""
    for i, block in enumerate(net.blocks):
        for name, arr in block.param_items():
            yield f"block{i}.{name}", _flat_real_view(arr)


def grad_views(grads: list[GradientSet]):
    """Same ordering as :func:`param_views`, over a gradient list."""
    for i, gs in enumerate(grads):
        for name, arr in gs.items():
            yield f"block{i}.{name}", _flat_real_view(arr)


def _flatten_pair(net: Network, inputs, targets) -> tuple[np.ndarray, np.ndarray]:
    xb = np.asarray(inputs, dtype=np.float64)
    yb = np.asarray(targets, dtype=np.float64)
    if xb.ndim == 3:
        xb = xb.reshape(xb.shape[0], -1)
    if yb.ndim == 3:
        yb = yb.reshape(yb.shape[0], -1)
    if xb.ndim != 2 or yb.ndim != 2 or xb.shape[0] != yb.shape[0]:
        raise ShapeError(
            f"batch shapes do not align: inputs {xb.shape}, targets {yb.shape}"
        )
    s_in, d_in = net.in_shape
    s_out, d_out = net.out_shape
    if xb.shape[1] != s_in * d_in or yb.shape[1] != s_out * d_out:
        raise ShapeError(
            f"batch widths {xb.shape[1]}/{yb.shape[1]} do not match network "
            f"{s_in * d_in}/{s_out * d_out}"
        )
    return xb, yb


def _forward_cached(net: Network, xb: np.ndarray):
    """Forward pass keeping what backward needs: inputs, spectra, pre-activations."""
    caches = []
    h = xb
    for block in net.blocks:
        cache = {"x": h}
        s = None
        if block.time_enabled:
            s = h @ block.w_l.T + block.b_l
        if block.transform_enabled:
            if block.transform == "rfft":
                spec = rfft_batch(h)
            else:
                spec = h.astype(np.complex128) @ block.t_in.matrix
            z = spec @ block.w_t.T + block.b_t
            ht = block.t_out.apply_inverse(z)
            if np.iscomplexobj(ht):
                ht = ht.real
            cache["spec"] = spec
            s = ht if s is None else s + ht
        cache["pre"] = s
        h = _activate(block, s)
        caches.append(cache)
    return h, caches


def _activate(block: DualBlock, s: np.ndarray) -> np.ndarray:
    from .network import activation

    return activation(block.activation, s)


def mse_loss(net: Network, inputs, targets) -> float:
    """Mean squared error over batch and output coordinates."""
    xb, yb = _flatten_pair(net, inputs, targets)
    yhat = net.forward_flat(xb)
    return float(np.mean((yhat - yb) ** 2))


def backward(net: Network, batch) -> tuple[float, list[GradientSet]]:
    """Loss value and per-block gradients for an ``(inputs, targets)`` batch.

    The loss is the mean of squared errors over every scalar output in
    the batch.  Raises :class:`NumericError` naming the first offending
    batch index when the loss is not finite.
    """
    inputs, targets = batch
    xb, yb = _flatten_pair(net, inputs, targets)
    yhat, caches = _forward_cached(net, xb)
    resid = yhat - yb
    sq = resid * resid
    if not np.all(np.isfinite(sq)):
        bad = int(np.flatnonzero(~np.isfinite(sq.sum(axis=1)))[0])
        raise NumericError(f"non-finite loss contribution at batch index {bad}")
    loss = float(np.mean(sq))

    g = (2.0 / sq.size) * resid
    grads: list[GradientSet] = []
    for block, cache in zip(reversed(net.blocks), reversed(caches)):
        gs = g * activation_deriv(block.activation, cache["pre"])
        gset = GradientSet()
        gx = None
        if block.time_enabled:
            gset.w_l = gs.T @ cache["x"]
            gset.b_l = gs.sum(axis=0)
            gx = gs @ block.w_l
        if block.transform_enabled:
            spec = cache["spec"]
            if block.transform == "rfft":
                g_z = irfft_adjoint_batch(gs)
            else:
                g_z = gs.astype(np.complex128) @ block.t_out.matrix
            gset.w_t = g_z.T @ np.conj(spec)
            gset.b_t = g_z.sum(axis=0)
            g_spec = g_z @ np.conj(block.w_t)
            if block.transform == "rfft":
                gx_t = rfft_adjoint_batch(g_spec, block.shape.in_features)
            else:
                gx_t = (g_spec @ block.t_in.matrix_inv).real
            gx = gx_t if gx is None else gx + gx_t
        g = gx
        grads.append(gset)
    grads.reverse()
    return loss, grads


def finite_diff_check(net: Network, batch, step: float = 1e-6) -> GradCheckReport:
    """Central-difference check of :func:`backward` over every coordinate.

    Relative error uses ``max(|analytic|, |numeric|, 1e-12)`` as the
    denominator.  Coordinates index the flat re/im-interleaved view of
    each parameter group.
    """
    if not (1e-8 <= step <= 1e-3):
        raise ConfigError(f"step must lie in [1e-8, 1e-3], got {step:g}")
    inputs, targets = batch
    xb, yb = _flatten_pair(net, inputs, targets)
    _, grads = backward(net, (xb, yb))
    analytic = dict(grad_views(grads))

    report = GradCheckReport(step=step)
    for group, view in param_views(net):
        ga = analytic[group]
        worst_here = 0.0
        for idx in range(view.shape[0]):
            orig = view[idx]
            view[idx] = orig + step
            lp = mse_loss(net, xb, yb)
            view[idx] = orig - step
            lm = mse_loss(net, xb, yb)
            view[idx] = orig
            if not (np.isfinite(lp) and np.isfinite(lm)):
                raise NumericError(
                    f"non-finite perturbation loss at {group}[{idx}]"
                )
            numeric = (lp - lm) / (2.0 * step)
            denom = max(abs(ga[idx]), abs(numeric), 1e-12)
            rel = abs(ga[idx] - numeric) / denom
            if rel > worst_here:
                worst_here = rel
            if rel > report.max_rel_error:
                report.max_rel_error = rel
                report.worst = f"{group}[{idx}]"
        report.per_group[group] = worst_here
    return report
