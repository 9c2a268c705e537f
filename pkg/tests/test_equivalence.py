import numpy as np
import pytest

from duonet.equivalence import (
    branch_preactivation,
    dense_equivalent,
    gradient_structure_check,
    h_ab_derivative_factor,
    h_ab_matrix,
)
from duonet.errors import ConfigError, ShapeError
from duonet.transforms import (
    dft_transform,
    hadamard_transform,
    identity_transform,
    rfft_transform,
)


def _random_branch(n, rng):
    w = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    return w, b


class TestDenseEquivalent:
    @pytest.mark.parametrize("n", [2, 4, 8, 16])
    @pytest.mark.parametrize("factory", [dft_transform, hadamard_transform,
                                         identity_transform])
    def test_collapses_to_affine_map(self, n, factory, rng):
        t = factory(n)
        w, b = _random_branch(n, rng)
        eq = dense_equivalent(t, w, b)
        for _ in range(20):
            x = rng.normal(size=n)
            direct = branch_preactivation(t, w, b, x)
            folded = x.astype(np.complex128) @ eq.w_f + eq.b_f
            assert np.max(np.abs(direct - folded)) < 1e-10

    def test_identity_weight_gives_identity_map(self, rng):
        t = dft_transform(8)
        eq = dense_equivalent(t, np.eye(8), np.zeros(8))
        assert np.max(np.abs(eq.w_f - np.eye(8))) < 1e-12

    def test_zero_weight(self, rng):
        t = hadamard_transform(4)
        b = rng.normal(size=4) + 0j
        eq = dense_equivalent(t, np.zeros((4, 4)), b)
        assert np.max(np.abs(eq.w_f)) == 0.0
        assert np.max(np.abs(eq.b_f - b @ t.matrix_inv)) < 1e-14

    def test_hermitian_weight_yields_real_map(self, rng):
        # a Fourier weight respecting conjugate symmetry acts as a real
        # dense matrix on real inputs
        n = 8
        t = dft_transform(n)
        w = np.zeros((n, n), dtype=np.complex128)
        for a in range(n):
            for b in range(n):
                if (a, b) <= ((-a) % n, (-b) % n):
                    z = np.random.default_rng(a * n + b).normal(size=2)
                    w[a, b] = z[0] + 1j * z[1]
                    w[(-a) % n, (-b) % n] = np.conj(w[a, b])
        # self-paired entries must be real
        for a in (0, n // 2):
            for b in (0, n // 2):
                w[a, b] = w[a, b].real
        eq = dense_equivalent(t, w, np.zeros(n))
        assert np.max(np.abs(eq.w_f.imag)) < 1e-12

    def test_rfft_kind_rejected(self):
        with pytest.raises(ConfigError):
            dense_equivalent(rfft_transform(8), np.eye(5), np.zeros(5))

    def test_shape_errors(self):
        t = dft_transform(4)
        with pytest.raises(ShapeError):
            dense_equivalent(t, np.eye(3), np.zeros(4))
        with pytest.raises(ShapeError):
            dense_equivalent(t, np.eye(4), np.zeros(3))


class TestRankOneFactors:
    @pytest.mark.parametrize("n", [2, 3, 4, 8, 16])
    def test_fourier_closed_form(self, n):
        t = dft_transform(n)
        omega = np.exp(-2j * np.pi / n)
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        for a in range(n):
            for b in range(n):
                want = omega ** (i * a + b * j) / n
                got = h_ab_matrix(t, a, b)
                assert np.max(np.abs(got - want)) < 1e-12

    def test_two_point_examples(self):
        t = dft_transform(2)
        assert np.max(np.abs(h_ab_matrix(t, 0, 0) - 0.5)) < 1e-15
        i, j = np.meshgrid([0, 1], [0, 1], indexing="ij")
        want = ((-1.0) ** (i + j)) / 2
        assert np.max(np.abs(h_ab_matrix(t, 1, 1) - want)) < 1e-15

    def test_identity_basis_gives_kronecker_delta(self):
        t = identity_transform(5)
        for a in range(5):
            for b in range(5):
                want = np.zeros((5, 5))
                want[a, b] = 1.0
                assert np.array_equal(h_ab_matrix(t, a, b).real, want)

    @pytest.mark.parametrize("factory,n", [
        (dft_transform, 6),
        (hadamard_transform, 8),
        (identity_transform, 5),
    ])
    def test_weighted_sum_rebuilds_dense_map(self, factory, n, rng):
        t = factory(n)
        w, b = _random_branch(n, rng)
        eq = dense_equivalent(t, w, b)
        acc = np.zeros((n, n), dtype=np.complex128)
        for a in range(n):
            for bb in range(n):
                acc += w[a, bb] * h_ab_derivative_factor(t, a, bb).T
        assert np.max(np.abs(acc - eq.w_f)) < 1e-10

    @pytest.mark.parametrize("factory,n", [
        (hadamard_transform, 8),
        (identity_transform, 6),
    ])
    def test_conventions_coincide_for_real_symmetric_bases(self, factory, n):
        # T real symmetric orthogonal implies T^{-1} = T, collapsing the
        # two factor definitions into one
        t = factory(n)
        for a in range(n):
            for b in range(n):
                d = np.max(np.abs(h_ab_matrix(t, a, b) - h_ab_derivative_factor(t, a, b)))
                assert d < 1e-12

    def test_conventions_differ_on_fourier_basis(self):
        t = dft_transform(4)
        d = np.max(np.abs(h_ab_matrix(t, 1, 2) - h_ab_derivative_factor(t, 1, 2)))
        assert d > 1e-3

    def test_index_range_checked(self):
        t = dft_transform(4)
        with pytest.raises(ShapeError):
            h_ab_matrix(t, 4, 0)
        with pytest.raises(ShapeError):
            h_ab_derivative_factor(t, 0, -1)


class TestGradientStructure:
    def test_identity_transform_tight(self, rng):
        t = identity_transform(6)
        w, b = _random_branch(6, rng)
        worst = 0.0
        for a in range(6):
            for bb in range(6):
                worst = max(worst, gradient_structure_check(t, w, b, rng.normal(size=6),
                                                            a, bb, kind="identity"))
        assert worst < 1e-9

    def test_fourier_gelu(self, rng):
        t = dft_transform(8)
        w, b = _random_branch(8, rng)
        x = rng.normal(size=8)
        worst = max(
            gradient_structure_check(t, w, b, x, a, bb, kind="gelu")
            for a in (0, 3, 7)
            for bb in (0, 2, 5)
        )
        assert worst < 1e-8

    def test_hadamard_tanh(self, rng):
        t = hadamard_transform(4)
        w, b = _random_branch(4, rng)
        x = rng.normal(size=4)
        worst = max(
            gradient_structure_check(t, w, b, x, a, bb, kind="tanh")
            for a in range(4)
            for bb in range(4)
        )
        assert worst < 1e-8

    def test_step_is_configurable(self, rng):
        t = identity_transform(3)
        w, b = _random_branch(3, rng)
        x = rng.normal(size=3)
        coarse = gradient_structure_check(t, w, b, x, 0, 0, kind="tanh", step=1e-4)
        assert coarse < 1e-6


class TestBackwardUsesTheFactoredForm:
    def test_network_gradient_matches_rank_one_expansion(self, rng):
        # the backward pass of a transform-only explicit block must equal
        # the analytic slope-gated factor, chained with the loss gradient
        from duonet.autograd import backward
        from duonet.network import BlockShape, DualBlock, Network

        n = 6
        net = Network(
            [DualBlock(BlockShape(n, n), transform="dft", activation="gelu",
                       time_enabled=False)]
        ).init_params(17)
        blk = net.blocks[0]
        t = blk.t_in
        x = rng.normal(size=(1, n))
        y = rng.normal(size=(1, n))
        _, grads = backward(net, (x, y))

        pre = branch_preactivation(t, blk.w_t, blk.b_t, x[0]).real
        from duonet.network import activation, activation_deriv

        out = activation("gelu", pre)
        g_out = 2.0 * (out - y[0]) / n
        slope = activation_deriv("gelu", pre)
        for a in (0, 2, 5):
            for b in (1, 4):
                factor = x[0].astype(np.complex128) @ h_ab_derivative_factor(t, a, b).T
                want_re = np.sum(g_out * slope * factor.real)
                want_im = np.sum(g_out * slope * (-factor.imag))
                got = grads[0].w_t[a, b]
                assert abs(got.real - want_re) < 1e-10
                assert abs(got.imag - want_im) < 1e-10
