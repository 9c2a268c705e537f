"""Command-line entry point.

Subcommands: ``generate``, ``train``, ``evaluate``, ``predict``,
``gradcheck``, ``equivcheck``.  Exit codes: 0 success, 1 usage error,
2 data/config/format error, 3 numeric failure (divergence or a
verification tolerance overrun).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import data as datamod
from .autograd import finite_diff_check
from .config import (
    TrainConfig,
    build_network,
    config_to_dict,
    load_config,
    parse_config,
)
from .equivalence import dense_equivalent
from .errors import (
    CheckpointError,
    ConfigError,
    DataFormatError,
    DegenerateTargetError,
    NumericError,
    ShapeError,
)
from .evaluation import simulate
from .optim import train as run_train
from .transforms import dft_transform

GRADCHECK_TOL = 1e-5
EQUIVCHECK_TOL = 1e-10

_USAGE_EXIT = 1
_DATA_EXIT = 2
_NUMERIC_EXIT = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(_USAGE_EXIT)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="duonet", description="Dual-branch system identification toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic benchmark CSV plus parameter sidecar")
    g.add_argument("--config", help="config file with a data section (defaults used if omitted)")
    g.add_argument("--out", required=True, help="output CSV path")
    g.add_argument("--seed", type=int, help="override the config seed")

    t = sub.add_parser("train", help="train a model from a config file")
    t.add_argument("--config", required=True, help="training config file")
    t.add_argument("--out", required=True, help="checkpoint output path")
    t.add_argument("--seed", type=int, help="override the config seed")

    e = sub.add_parser("evaluate", help="score a checkpoint on a CSV record")
    e.add_argument("checkpoint", help="checkpoint file")
    e.add_argument("--data", required=True, help="CSV record to score against")

    pr = sub.add_parser("predict", help="write per-sample predictions as CSV")
    pr.add_argument("checkpoint", help="checkpoint file")
    pr.add_argument("--data", required=True, help="CSV record to predict")
    pr.add_argument("--out", required=True, help="predictions CSV path")

    gc = sub.add_parser("gradcheck", help="finite-difference check of the gradients")
    gc.add_argument("--config", help="config describing the model to check (small default if omitted)")
    gc.add_argument("--seed", type=int, default=0, help="seed for parameters and probe batch")

    eq = sub.add_parser("equivcheck", help="dense-equivalence deviation per transform size")
    eq.add_argument("sizes", nargs="+", type=int, help="transform sizes, e.g. 2 4 8")
    eq.add_argument("--seed", type=int, default=0, help="seed for random weights and probes")
    return p


def _fmt(v: float) -> str:
    return repr(float(v))


# --- subcommands -----------------------------------------------------------


_DEFAULT_GEN = {
    "model": {"blocks": [{"s_in": 16, "s_out": 16}]},
    "window": {"m": 16, "n": 16},
}


def cmd_generate(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = parse_config(dict(_DEFAULT_GEN))
    seed = args.seed if args.seed is not None else cfg.data_seed
    if cfg.data.kind != "synthetic":
        raise ConfigError("generate needs a synthetic data section")
    rec, params = datamod.generate_static_system(seed, cfg.data.num_samples, cfg.data.dt)
    datamod.save_csv(rec, args.out)
    sidecar = str(args.out) + ".params"
    with open(sidecar, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"seed={seed}\n")
        f.write(f"dt={_fmt(cfg.data.dt)}\n")
        f.write(f"num_samples={cfg.data.num_samples}\n")
        for key, val in params.as_dict().items():
            f.write(f"{key}={_fmt(val)}\n")
    print(f"wrote {args.out} ({cfg.data.num_samples} rows) and {sidecar}")
    return 0


def _load_record(cfg: TrainConfig):
    if cfg.data.kind == "synthetic":
        rec, _ = datamod.generate_static_system(
            cfg.data_seed, cfg.data.num_samples, cfg.data.dt
        )
        return rec
    return datamod.load_csv(cfg.data.path)


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    rec = _load_record(cfg)
    train_rec, val_rec, _ = datamod.split_record(rec, cfg.data.split)
    w = cfg.window
    train_ds = datamod.build_windows(train_rec, w.m, w.n, w.stride)
    val_ds = None
    if len(val_rec) >= max(w.m, w.n):
        val_ds = datamod.build_windows(val_rec, w.m, w.n, w.n)

    net = build_network(cfg)
    net.init_params(cfg.seed)
    net, report = run_train(net, train_ds, cfg, val_dataset=val_ds)
    datamod.save_checkpoint(
        net,
        args.out,
        seed=cfg.seed,
        config=config_to_dict(cfg),
        optim_echo={"kind": cfg.optim.kind, "steps": cfg.epochs},
    )
    if report.losses:
        print(f"final_loss={_fmt(report.losses[-1])}")
    if report.val_rmse is not None:
        print(f"val_rmse={_fmt(report.val_rmse)} val_nrmse_pct={_fmt(100.0 * report.val_nrmse)}")
    print(f"wall_seconds={_fmt(report.wall_seconds)}")
    print(f"checkpoint={args.out}")
    return 0


def _window_from_meta(meta: dict) -> tuple[int, int]:
    try:
        w = meta["config"]["window"]
        return int(w["m"]), int(w["n"])
    except (KeyError, TypeError, ValueError):
        raise CheckpointError(
            "checkpoint meta lacks the window settings needed for simulation"
        ) from None


def cmd_evaluate(args) -> int:
    net, meta = datamod.load_checkpoint(args.checkpoint)
    m, n = _window_from_meta(meta)
    rec = datamod.load_csv(args.data)
    _, result = simulate(net, rec, m, n)
    print(f"rmse={_fmt(result.rmse)} nrmse_pct={_fmt(100.0 * result.nrmse)} n={result.n_points}")
    return 0


def cmd_predict(args) -> int:
    net, meta = datamod.load_checkpoint(args.checkpoint)
    m, n = _window_from_meta(meta)
    rec = datamod.load_csv(args.data)
    yhat, _ = simulate(net, rec, m, n)
    offset = max(m, n) - n
    d_out = yhat.shape[1]
    if d_out == 1:
        header = "t,y,yhat,err"
    else:
        header = ",".join(
            ["t"]
            + [f"y{i}" for i in range(d_out)]
            + [f"yhat{i}" for i in range(d_out)]
            + [f"err{i}" for i in range(d_out)]
        )
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        for k in range(yhat.shape[0]):
            row = offset + k
            t = row * rec.sample_period
            ys = rec.y[row]
            errs = yhat[k] - ys
            cells = [_fmt(t)] + [_fmt(v) for v in ys] + [_fmt(v) for v in yhat[k]] + [
                _fmt(v) for v in errs
            ]
            f.write(",".join(cells) + "\n")
    print(f"wrote {args.out} ({yhat.shape[0]} rows)")
    return 0


_DEFAULT_GRADCHECK = {
    "model": {
        "blocks": [
            {"s_in": 8, "s_out": 6, "activation": "gelu"},
            {"s_in": 6, "s_out": 4, "activation": "identity"},
        ]
    },
    "window": {"m": 8, "n": 4},
}


def cmd_gradcheck(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = parse_config(dict(_DEFAULT_GRADCHECK))
    net = build_network(cfg)
    net.init_params(args.seed)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((args.seed, 2))))
    s_in, d_in = net.in_shape
    s_out, d_out = net.out_shape
    xb = rng.normal(size=(4, s_in * d_in))
    yb = rng.normal(size=(4, s_out * d_out))
    report = finite_diff_check(net, (xb, yb))
    for group, err in report.per_group.items():
        print(f"group={group} max_rel_error={_fmt(err)}")
    print(
        f"max_rel_error={_fmt(report.max_rel_error)} worst={report.worst} "
        f"step={_fmt(report.step)}"
    )
    if report.max_rel_error >= GRADCHECK_TOL:
        print(f"gradcheck overrun: {_fmt(report.max_rel_error)} >= {_fmt(GRADCHECK_TOL)}", file=sys.stderr)
        return _NUMERIC_EXIT
    return 0


def cmd_equivcheck(args) -> int:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((args.seed, 3))))
    worst_overall = 0.0
    for n in args.sizes:
        if n < 1:
            raise ConfigError(f"equivcheck size must be >= 1, got {n}")
        t = dft_transform(n)
        w_t = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b_t = rng.normal(size=n) + 1j * rng.normal(size=n)
        de = dense_equivalent(t, w_t, b_t)
        xs = rng.normal(size=(100, n))
        lhs = (xs.astype(np.complex128) @ t.matrix @ w_t.T + b_t) @ t.matrix_inv
        rhs = xs.astype(np.complex128) @ de.w_f + de.b_f
        dev = float(np.max(np.abs(lhs - rhs)))
        worst_overall = max(worst_overall, dev)
        print(f"n={n} deviation={_fmt(dev)}")
    if worst_overall >= EQUIVCHECK_TOL:
        print(f"equivcheck overrun: {_fmt(worst_overall)} >= {_fmt(EQUIVCHECK_TOL)}", file=sys.stderr)
        return _NUMERIC_EXIT
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "gradcheck": cmd_gradcheck,
    "equivcheck": cmd_equivcheck,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DataFormatError, CheckpointError, ShapeError, DegenerateTargetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_EXIT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_EXIT
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _NUMERIC_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
