import warnings

import numpy as np
import pytest

from mflab import braid, ffsim
from mflab.errors import ModeDetectionError
from mflab.model import ChainSpec, build_trivial_testbed

PI = np.pi

TOPO5 = ChainSpec(5, z_angle=PI / 16, xx_angle=PI / 4)


class TestAlpha0:
    def test_perfect_localization(self):
        assert braid.alpha0_from_xi(1.0) == pytest.approx(PI / 4)

    def test_validity_boundary(self):
        assert braid.alpha0_from_xi(1.0 / np.sqrt(2.0)) == pytest.approx(PI / 2)

    def test_too_small(self):
        with pytest.raises(ValueError):
            braid.alpha0_from_xi(0.6)

    def test_n5_value(self):
        # frozen from the eigenmode edge weight of the 5-site chain
        modes = ffsim.eigenmodes(ffsim.build_single_particle_unitary(TOPO5))
        left, right = modes.majorana_pair(0.0)
        alpha0 = braid.alpha0_from_xi(float(np.sqrt(left.xi * right.xi)))
        assert alpha0 / PI == pytest.approx(0.263127, abs=1e-5)


class TestChannelMatrices:
    def test_finite_matches_manual_average(self, rng):
        spec = ChainSpec(4, z_angle=0.3, xx_angle=0.8)
        u = ffsim.build_single_particle_unitary(spec)
        alpha, depth = 0.6, 7
        rot = ffsim.braid_rotation(alpha, 4)
        acc = np.zeros((8, 8))
        for n in range(depth):
            un = np.linalg.matrix_power(u.matrix, n)
            acc += un @ rot @ un
        assert np.allclose(braid.finite_channel_matrix(u, alpha, depth), acc / depth,
                           atol=1e-12)

    def test_exact_is_finite_depth_limit(self):
        # in a window 1 << D << 1/splitting the finite average approaches
        # the snapped exact channel
        spec = ChainSpec(10, z_angle=PI / 16, xx_angle=PI / 4)  # splitting 2e-7
        u = ffsim.build_single_particle_unitary(spec)
        modes = ffsim.eigenmodes(u)
        alpha = 0.7
        exact = braid.exact_channel_matrix(modes, alpha)
        gaps = [np.linalg.norm(braid.finite_channel_matrix(u, alpha, d) - exact)
                for d in (100, 400, 1600)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.01

    def test_channel_linearity(self, rng):
        modes = ffsim.eigenmodes(ffsim.build_single_particle_unitary(TOPO5))
        e_mat = braid.exact_channel_matrix(modes, 0.5)
        a, b = rng.normal(size=(2, 10))
        assert np.allclose(e_mat @ (2 * a - 3 * b), 2 * (e_mat @ a) - 3 * (e_mat @ b))


class TestBraidedWavefunction:
    def test_alpha_zero_reduces_to_reconstruction(self):
        out = braid.fas_braided_wavefunction(TOPO5, alpha=0.0, depth=braid.EXACT)
        # identity channel projects the edge vector onto the zero/pi space;
        # the result matches the unbraided mode itself
        assert np.linalg.norm(out.psi_tilde_left - out.psi_left) <= 1e-10
        assert np.linalg.norm(out.psi_tilde_right - out.psi_right) <= 1e-10

    def test_exact_swap_n5(self):
        out = braid.fas_braided_wavefunction(TOPO5, depth=braid.EXACT)
        assert out.sign == 1
        assert out.residual_left <= 0.05
        assert out.residual_right <= 0.05
        assert np.linalg.norm(out.psi_tilde_left - out.psi_right) <= 0.05
        assert np.linalg.norm(out.psi_tilde_right + out.psi_left) <= 0.05

    def test_engines_agree_at_finite_depth(self):
        # same explicit angle on both engines; the automatic angle differs
        # slightly because svsim estimates xi from the finite-depth series
        alpha = 0.263127 * PI
        ff = braid.fas_braided_wavefunction(TOPO5, alpha=alpha, depth=11, engine="ffsim")
        sv = braid.fas_braided_wavefunction(TOPO5, alpha=alpha, depth=11, engine="svsim")
        assert np.abs(ff.psi_tilde_left - sv.psi_tilde_left).max() <= 1e-10
        assert np.abs(ff.psi_tilde_right - sv.psi_tilde_right).max() <= 1e-10

    def test_alpha_range_checked(self):
        with pytest.raises(ValueError):
            braid.fas_braided_wavefunction(TOPO5, alpha=-0.2)

    def test_exact_depth_needs_ffsim(self):
        with pytest.raises(ValueError):
            braid.fas_braided_wavefunction(TOPO5, depth=braid.EXACT, engine="svsim")

    def test_shots_need_svsim(self):
        with pytest.raises(ValueError):
            braid.fas_braided_wavefunction(TOPO5, depth=11, engine="ffsim", shots=64)

    def test_asymmetric_spec_warns(self):
        spec = ChainSpec(6, z_angle=(0.1, 0.2, 0.21, 0.2, 0.22, 0.1),
                         xx_angle=(PI / 4,) * 5)
        with pytest.warns(UserWarning, match="reflection symmetric"):
            braid.fas_braided_wavefunction(spec, depth=braid.EXACT, mode_tol=5e-2)

    def test_coexisting_zero_modes_warn(self):
        testbed = build_trivial_testbed(8, PI / 16, PI / 4)
        with pytest.warns(UserWarning, match="zero-frequency modes"):
            braid.fas_braided_wavefunction(testbed, alpha=0.3, depth=braid.EXACT)

    def test_no_pair_raises(self):
        trivial = ChainSpec(8, z_angle=PI / 4, xx_angle=PI / 16)
        with pytest.raises(ModeDetectionError):
            braid.fas_braided_wavefunction(trivial, depth=braid.EXACT)

    def test_shot_noise_close_to_exact(self):
        noisy = braid.fas_braided_wavefunction(TOPO5, depth=11, engine="svsim",
                                               shots=8192, seed=11)
        clean = braid.fas_braided_wavefunction(TOPO5, depth=11, engine="svsim")
        assert np.abs(noisy.psi_tilde_left - clean.psi_tilde_left).max() <= 0.1


class TestVerifyExchange:
    def test_n12_exchange(self):
        spec = ChainSpec(12, z_angle=PI / 16, xx_angle=PI / 4)
        report = braid.verify_exchange(spec)
        assert abs(report.p_measured_rl - report.p_expected) <= 1e-3
        assert abs(report.p_measured_lr - report.p_expected) <= 1e-3
        assert report.residual_r_to_l <= 1e-3
        assert report.residual_l_to_r <= 1e-3

    def test_double_application_is_minus_p_squared(self):
        spec = ChainSpec(10, z_angle=PI / 16, xx_angle=PI / 4)
        report = braid.verify_exchange(spec)
        assert report.double_residual <= 1e-10

    def test_perfect_edge_limit(self):
        # phi = 0: xi = 1, p = 1, exchange exact
        spec = ChainSpec(6, xx_angle=PI / 4)
        report = braid.verify_exchange(spec)
        assert report.p_expected == pytest.approx(1.0)
        assert report.residual_r_to_l <= 1e-10
        assert report.residual_l_to_r <= 1e-10

    def test_residuals_shrink_with_size(self):
        values = []
        for n in (6, 8, 10, 12):
            spec = ChainSpec(n, z_angle=PI / 16, xx_angle=PI / 4)
            report = braid.verify_exchange(spec)
            values.append(max(report.residual_r_to_l, report.residual_l_to_r))
        assert all(v <= 1e-3 for v in values)


class TestCorrectionBound:
    def test_uniform_chain_bound_near_zero(self):
        # reflection symmetry cancels the squared edge weights exactly
        spec = ChainSpec(10, z_angle=PI / 16, xx_angle=PI / 4)
        modes = ffsim.eigenmodes(ffsim.build_single_particle_unitary(spec))
        left, right = modes.majorana_pair(0.0)
        bound = braid.correction_bound(modes, left.xi)
        assert bound <= 1e-12

    def test_deviation_within_bound_plus_float_noise(self, rng):
        for _ in range(5):
            n = int(rng.choice([8, 10]))
            theta = rng.uniform(PI / 5, PI / 3)
            phi = rng.uniform(0.2, 0.6) * theta
            jitter = rng.uniform(-0.1, 0.1, (n + 1) // 2)
            z = phi * (1 + np.concatenate([jitter, jitter[::-1][n % 2:]]))
            jx = rng.uniform(-0.1, 0.1, n // 2)
            xx = theta * (1 + np.concatenate([jx, jx[::-1][(n - 1) % 2:]]))
            spec = ChainSpec(n, z_angle=tuple(z), xx_angle=tuple(xx))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                report = braid.verify_exchange(spec, mode_tol=5e-2)
            assert report.eq9_max_deviation <= report.bound + 1e-12

    def test_bound_trend_with_disorder(self):
        # broken reflection symmetry exposes the kappa scale, which decays
        # roughly like 1/sqrt(N) for delocalized bulk modes; disorder draws
        # are reseeded per size so the ensembles are paired
        means = []
        for n in (6, 10, 14):
            rng = np.random.default_rng(123)
            vals = []
            for _ in range(8):
                z = (PI / 16) * (1 + rng.uniform(-0.05, 0.05, n))
                xx = (PI / 4) * (1 + rng.uniform(-0.05, 0.05, n - 1))
                spec = ChainSpec(n, z_angle=tuple(z), xx_angle=tuple(xx))
                u = ffsim.build_single_particle_unitary(spec)
                modes = ffsim.eigenmodes(u, tol=5e-2)
                left, right = modes.majorana_pair(0.0)
                xi = float(np.sqrt(left.xi * right.xi))
                vals.append(braid.correction_bound(modes, xi))
            means.append(np.mean(vals))
        assert means[0] > means[1] > means[2]
        slope = np.polyfit(np.log([6, 10, 14]), np.log(means), 1)[0]
        assert -0.9 <= slope <= -0.2


class TestOptimizeAlpha:
    def test_noiseless_minimum_near_alpha0(self):
        alpha_star, report = braid.optimize_alpha(TOPO5, depth=11)
        modes = ffsim.eigenmodes(ffsim.build_single_particle_unitary(TOPO5))
        left, right = modes.majorana_pair(0.0)
        alpha0 = braid.alpha0_from_xi(float(np.sqrt(left.xi * right.xi)))
        assert report.curvature_ok
        assert abs(alpha_star - alpha0) <= 0.01 * PI

    def test_symmetric_three_point_grid(self):
        center = 0.26 * PI
        grid = [center - 0.05, center, center + 0.05]
        alpha_star, report = braid.optimize_alpha(TOPO5, alpha_grid=grid, depth=11)
        # a symmetric parabola through three points recovers its own minimum
        manual = np.polyfit(report.alphas, report.costs, 2)
        want = -manual[1] / (2 * manual[0])
        assert alpha_star == pytest.approx(want)

    def test_shot_noise_shift_small(self):
        alpha_star, _ = braid.optimize_alpha(TOPO5, depth=11, engine="svsim",
                                             shots=8192, seed=4)
        clean, _ = braid.optimize_alpha(TOPO5, depth=11)
        assert abs(alpha_star - clean) <= 0.02 * PI

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            braid.optimize_alpha(TOPO5, alpha_grid=[0.2, 0.3])

    def test_degenerate_fit_reports(self):
        # costs evaluated on a tiny far-off grid can be concave; the helper
        # must fall back to the grid argmin rather than extrapolate
        grid = [0.02, 0.05, 0.30, 0.7, 1.2]
        alpha_star, report = braid.optimize_alpha(TOPO5, alpha_grid=grid, depth=3)
        if not report.curvature_ok:
            assert alpha_star == report.alphas[int(np.argmin(report.costs))]
        else:
            assert report.alphas.min() <= alpha_star <= report.alphas.max()
