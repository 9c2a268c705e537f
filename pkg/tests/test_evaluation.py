import numpy as np
import pytest

from duonet.data import SignalRecord
from duonet.errors import DegenerateTargetError, ShapeError
from duonet.evaluation import nrmse, rmse, simulate
from duonet.network import BlockShape, DualBlock, Network


def _identity_net(n):
    b = DualBlock(BlockShape(n, n), transform_enabled=False, activation="identity")
    b.w_l = np.eye(n)
    return Network([b])


class TestRmse:
    def test_hand_example(self):
        y = np.array([[0.0], [0.0]])
        yhat = np.array([[3.0], [4.0]])
        assert abs(rmse(y, yhat) - np.sqrt(12.5)) < 1e-12

    def test_perfect_prediction(self, rng):
        y = rng.normal(size=(10, 2))
        assert rmse(y, y.copy()) == 0.0

    def test_unit_offset(self):
        y = np.zeros((5, 1))
        assert abs(rmse(y, y + 1.0) - 1.0) < 1e-15

    def test_symmetry(self, rng):
        a = rng.normal(size=(8, 1))
        b = rng.normal(size=(8, 1))
        assert abs(rmse(a, b) - rmse(b, a)) < 1e-15

    def test_translation_invariance(self, rng):
        a = rng.normal(size=(8, 1))
        b = rng.normal(size=(8, 1))
        assert abs(rmse(a, b) - rmse(a + 3.0, b + 3.0)) < 1e-12

    def test_accepts_1d(self):
        assert rmse([0.0, 0.0], [1.0, 1.0]) == 1.0


class TestNrmse:
    def test_zero_predictor_on_unit_variance_targets(self, rng):
        y = rng.normal(size=4000)
        y = (y - y.mean()) / y.std()
        assert abs(nrmse(y, np.zeros_like(y)) - 1.0) < 1e-12

    def test_perfect_prediction(self, rng):
        y = rng.normal(size=(20, 1))
        assert nrmse(y, y.copy()) == 0.0

    def test_scale_invariance(self, rng):
        y = rng.normal(size=(50, 1))
        yhat = rng.normal(size=(50, 1))
        assert abs(nrmse(y, yhat) - nrmse(10 * y, 10 * yhat)) < 1e-12

    def test_normalizer_is_population_std(self):
        y = np.array([0.0, 2.0])  # sigma = 1 with ddof 0
        assert abs(nrmse(y, np.array([1.0, 3.0])) - 1.0) < 1e-15

    def test_constant_target_rejected(self):
        with pytest.raises(DegenerateTargetError):
            nrmse(np.full(5, 2.0), np.zeros(5))


class TestShapeGuards:
    def test_empty_inputs(self):
        with pytest.raises(ShapeError):
            rmse(np.zeros((0, 1)), np.zeros((0, 1)))

    def test_mismatched_shapes(self):
        with pytest.raises(ShapeError):
            rmse(np.zeros((4, 1)), np.zeros((5, 1)))
        with pytest.raises(ShapeError):
            nrmse(np.zeros((4, 2)), np.zeros((4, 1)))


class TestSimulate:
    def test_identity_network_is_perfect(self, rng):
        n = 4
        u = rng.normal(size=(20, 1))
        rec = SignalRecord(u, u.copy())
        yhat, res = simulate(_identity_net(n), rec, m=n, n=n)
        assert res.rmse == 0.0
        assert res.n_points == 20  # tiled cover, every row scored once

    def test_zero_network_scores_unity_nrmse(self, rng):
        net = Network([DualBlock(BlockShape(4, 4), transform_enabled=False,
                                 activation="identity")])
        y = rng.normal(size=(400, 1))
        y = (y - y.mean()) / y.std()
        rec = SignalRecord(rng.normal(size=(400, 1)), y)
        _, res = simulate(net, rec, m=4, n=4)
        assert abs(res.nrmse - 1.0) < 1e-12

    def test_default_stride_tiles_without_overlap(self, rng):
        # L=10, m=n=3: anchors 3, 6, 9 cover rows 0..8, the tail row drops
        rec = SignalRecord(rng.normal(size=(10, 1)), rng.normal(size=(10, 1)))
        yhat, res = simulate(_identity_net(3), rec, m=3, n=3)
        assert res.n_points == 9
        assert np.array_equal(yhat, rec.u[:9])

    def test_leading_rows_excluded_when_input_window_longer(self, rng):
        # m=4, n=2: rows 0 and 1 have no full input history
        L = 10
        rec = SignalRecord(rng.normal(size=(L, 1)), rng.normal(size=(L, 1)))
        b = DualBlock(BlockShape(4, 2), transform_enabled=False, activation="identity")
        b.w_l = np.array([[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
        yhat, res = simulate(Network([b]), rec, m=4, n=2)
        # anchors 4, 6, 8, 10: predictions align with input rows 2..9
        assert res.n_points == 8
        assert np.array_equal(yhat, rec.u[2:])

    def test_explicit_stride_overrides_default(self, rng):
        rec = SignalRecord(rng.normal(size=(10, 1)), rng.normal(size=(10, 1)))
        _, res = simulate(_identity_net(3), rec, m=3, n=3, stride=1)
        assert res.n_points == 8 * 3  # 8 overlapping windows, 3 rows each

    def test_record_too_short(self, rng):
        rec = SignalRecord(rng.normal(size=(3, 1)), rng.normal(size=(3, 1)))
        with pytest.raises(ShapeError):
            simulate(_identity_net(4), rec, m=4, n=4)
