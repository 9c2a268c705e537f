import numpy as np
import pytest

from conftest import (
    build_config_net,
    gradient_check_configs,
    kink_free_batch,
    random_batch,
    small_fsnn,
)
from duonet.autograd import backward, finite_diff_check, mse_loss
from duonet.errors import ConfigError, NumericError
from duonet.network import BlockShape, DualBlock, Network


def _single(s_in, s_out, seed=None, **kw):
    net = Network([DualBlock(BlockShape(s_in, s_out), **kw)])
    if seed is not None:
        net.init_params(seed)
    return net


def _zero_net():
    return _single(3, 3, activation="identity")


class TestLoss:
    def test_perfect_fit_is_zero(self):
        net = _zero_net()
        x = np.zeros((2, 3, 1))
        assert mse_loss(net, x, np.zeros((2, 3, 1))) == 0.0

    def test_scalar_example(self):
        # zero net predicts 0, so the loss is mean(y^2)
        net = _zero_net()
        x = np.zeros((1, 3, 1))
        y = np.array([[[1.0], [2.0], [2.0]]])
        assert abs(mse_loss(net, x, y) - 3.0) < 1e-15

    def test_loss_matches_backward(self, rng):
        net = small_fsnn()
        batch = random_batch(net, rng)
        loss, _ = backward(net, batch)
        assert abs(loss - mse_loss(net, *batch)) < 1e-15


class TestBackwardClosedForm:
    def test_scalar_linear_gradient(self):
        # 1x1 identity-activation time-only block: dL/dw = 2(wx - y)x
        net = _single(1, 1, transform_enabled=False, activation="identity")
        net.blocks[0].w_l = np.array([[0.5]])
        x = np.array([[[2.0]]])
        y = np.array([[[3.0]]])
        loss, grads = backward(net, (x, y))
        assert abs(loss - (0.5 * 2 - 3) ** 2) < 1e-15
        assert abs(grads[0].w_l[0, 0] - 2 * (0.5 * 2 - 3) * 2) < 1e-14
        assert abs(grads[0].b_l[0] - 2 * (0.5 * 2 - 3)) < 1e-14

    def test_zero_residual_means_zero_gradient(self, rng):
        net = small_fsnn()
        x = random_batch(net, rng)[0]
        y = net.forward_flat(x)
        _, grads = backward(net, (x, y))
        for g in grads:
            for _, arr in g.items():
                assert np.max(np.abs(arr)) < 1e-12

    def test_residual_linearity(self, rng):
        # identity activations: grads are linear in the target offset
        net = _single(4, 4, seed=11, transform="dft", activation="identity")
        x = rng.normal(size=(3, 4))
        y0 = net.forward_flat(x)
        d = rng.normal(size=y0.shape)
        _, g1 = backward(net, (x, y0 + d))
        _, g2 = backward(net, (x, y0 + 2 * d))
        for a, b in zip(g1, g2):
            for (_, ga), (_, gb) in zip(a.items(), b.items()):
                assert np.max(np.abs(gb - 2 * ga)) < 1e-10


class TestFiniteDifference:
    def test_linear_net_tight(self, rng):
        net = _single(6, 4, seed=21, transform="rfft", activation="identity")
        report = finite_diff_check(net, random_batch(net, rng))
        assert report.max_rel_error < 1e-7, report.worst

    def test_gelu_fsnn(self, rng):
        net = small_fsnn()
        report = finite_diff_check(net, random_batch(net, rng))
        assert report.max_rel_error < 1e-5, report.worst

    @pytest.mark.parametrize(
        "cfg",
        gradient_check_configs(),
        ids=lambda c: "s{seed}-{transform}-{activation}".format(**c),
    )
    def test_architecture_sweep(self, cfg):
        net = build_config_net(cfg)
        batch = kink_free_batch(net, seed=cfg["seed"] + 1000)
        report = finite_diff_check(net, batch)
        assert report.max_rel_error < 1e-5, (cfg, report.worst)

    def test_report_is_per_group(self, rng):
        net = small_fsnn()
        report = finite_diff_check(net, random_batch(net, rng))
        names = set(report.per_group)
        assert {"block0.w_l", "block0.b_t", "block1.w_t"} <= names
        assert report.worst in {f"{n}[{i}]" for n in names for i in range(2000)}
        assert report.step == 1e-6

    def test_step_out_of_range(self, rng):
        net = small_fsnn()
        batch = random_batch(net, rng)
        with pytest.raises(ConfigError):
            finite_diff_check(net, batch, step=1e-2)
        with pytest.raises(ConfigError):
            finite_diff_check(net, batch, step=1e-9)


class TestSpectralEdgeBins:
    def test_dead_imaginary_coordinates_are_exactly_zero(self, rng):
        # DC and Nyquist bins of an even-length rfft are real on both the
        # input and the output side, so weight entries coupling an edge bin
        # to an edge bin have no imaginary freedom at all: their imaginary
        # gradient must be identically zero, not merely tiny.
        net = _single(8, 8, seed=31, transform="rfft", activation="gelu")
        _, grads = backward(net, random_batch(net, rng))
        g = grads[0]
        assert np.all(g.b_t.imag[[0, -1]] == 0.0)
        for a in (0, -1):
            for b in (0, -1):
                assert g.w_t.imag[a, b] == 0.0
        # interior couplings keep live imaginary parts
        assert np.any(g.w_t.imag != 0.0)


class TestBranchToggles:
    def test_disabled_groups_are_none(self, rng):
        mlp = _single(4, 4, seed=41, transform_enabled=False)
        _, grads = backward(mlp, random_batch(mlp, rng))
        assert grads[0].w_t is None and grads[0].b_t is None
        assert grads[0].w_l is not None

        fnn = _single(4, 4, seed=42, time_enabled=False)
        _, grads = backward(fnn, random_batch(fnn, rng))
        assert grads[0].w_l is None and grads[0].b_l is None

    def test_zeroed_branch_does_not_disturb_the_other(self, rng):
        # dual block with w_t = b_t = 0 must give the same time-branch
        # grads as the time-only block with identical w_l
        dual = _single(6, 6, seed=43, activation="tanh")
        dual.blocks[0].w_t[:] = 0
        dual.blocks[0].b_t[:] = 0
        solo = _single(6, 6, seed=43, activation="tanh", transform_enabled=False)
        solo.blocks[0].w_l = dual.blocks[0].w_l.copy()
        batch = random_batch(dual, rng)
        _, gd = backward(dual, batch)
        _, gs = backward(solo, batch)
        assert np.max(np.abs(gd[0].w_l - gs[0].w_l)) < 1e-12
        assert np.max(np.abs(gd[0].b_l - gs[0].b_l)) < 1e-12


class TestNumericGuards:
    def test_nonfinite_input_reports_row(self):
        net = small_fsnn()
        x = np.zeros((4, 8, 1))
        y = np.zeros((4, 4, 1))
        x[2, 1, 0] = np.inf
        with np.errstate(invalid="ignore"):
            with pytest.raises(NumericError, match="batch index 2"):
                backward(net, (x, y))

    def test_nan_target_caught(self):
        net = _zero_net()
        x = np.zeros((1, 3, 1))
        y = np.full((1, 3, 1), np.nan)
        with pytest.raises(NumericError):
            backward(net, (x, y))
