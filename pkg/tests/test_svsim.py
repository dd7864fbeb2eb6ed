import numpy as np
import pytest

from mflab import ffsim, svsim
from mflab.errors import CapacityError
from mflab.model import (ChainSpec, MajoranaLabel, PauliString, majorana_pair_string,
                         majorana_probe, majorana_to_pauli, single_site)

PI = np.pi


def random_free_spec(rng, n):
    return ChainSpec(n, z_angle=tuple(rng.uniform(-1.5, 1.5, n)),
                     xx_angle=tuple(rng.uniform(-1.5, 1.5, n - 1)))


def random_spec(rng, n):
    return ChainSpec(n, z_angle=tuple(rng.uniform(-1.5, 1.5, n)),
                     xx_angle=tuple(rng.uniform(-1.5, 1.5, n - 1)),
                     zz_angle=tuple(rng.uniform(-1.5, 1.5, n - 1)))


class TestPrepareState:
    def test_plus_product(self):
        psi = svsim.prepare_state("plus_product", 2)
        assert np.allclose(psi.amps, 0.5)

    def test_correlator_zero_angle(self):
        psi = svsim.prepare_state("correlator", 3, a=0.0, bits=(0,))
        want = np.zeros(8); want[0] = 1.0
        assert np.allclose(psi.amps, want)

    def test_correlator_boundary_expectations(self):
        psi = svsim.prepare_state("correlator", 4, a=PI / 4, bits=(1, 0))
        for site in (1, 4):
            assert svsim.pauli_expectation(psi, single_site("Z", site, 4)) == pytest.approx(0.0, abs=1e-12)
            assert svsim.pauli_expectation(psi, single_site("Y", site, 4)) == pytest.approx(1.0)
        assert svsim.pauli_expectation(psi, single_site("Z", 2, 4)) == pytest.approx(-1.0)
        assert svsim.pauli_expectation(psi, single_site("Z", 3, 4)) == pytest.approx(1.0)

    def test_bad_bits_length(self):
        with pytest.raises(ValueError):
            svsim.prepare_state("correlator", 4, a=0.1, bits=(0,))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            svsim.prepare_state("plus_product", 25)


class TestFloquetCycle:
    def test_zero_angles_identity(self):
        psi = svsim.prepare_state("plus_product", 3)
        out = svsim.apply_floquet_cycle(psi, ChainSpec(3))
        assert np.allclose(out.amps, psi.amps)

    def test_plus_plus_is_xx_eigenstate(self):
        psi = svsim.prepare_state("plus_product", 2)
        out = svsim.apply_floquet_cycle(psi, ChainSpec(2, xx_angle=PI / 4))
        overlap = np.vdot(psi.amps, out.amps)
        assert abs(abs(overlap) - 1.0) <= 1e-12  # invariant up to a global phase

    def test_norm_preserved_100_cycles(self, rng):
        spec = random_spec(rng, 5)
        psi = svsim.prepare_state("plus_product", 5)
        for _ in range(100):
            psi = svsim.apply_floquet_cycle(psi, spec)
        assert abs(psi.norm() - 1.0) <= 1e-12

    @pytest.mark.parametrize("rep", ["L", "R"])
    def test_conjugation_matches_single_particle_matrix(self, rng, rep):
        # the central sign/ordering oracle: dense conjugation of every
        # Majorana string reproduces the free-fermion matrix exactly
        for n in (2, 3):
            spec = random_free_spec(rng, n)
            u = ffsim.build_single_particle_unitary(spec)
            w = svsim.majorana_conjugation_matrix(spec, rep)
            assert np.abs(u.matrix - w).max() <= 1e-12


class TestPauliExpectation:
    def test_plus_x(self):
        psi = svsim.prepare_state("plus_product", 1)
        assert svsim.pauli_expectation(psi, PauliString(0, ("X",))) == pytest.approx(1.0)

    def test_initial_majorana_expectations(self):
        n = 4
        psi = svsim.prepare_state("plus_product", n)
        for mu in range(1, 2 * n + 1):
            left = svsim.pauli_expectation(psi, majorana_to_pauli(MajoranaLabel(mu, "L"), n))
            assert left == pytest.approx(1.0 if mu == 1 else 0.0, abs=1e-12)
            probe = svsim.pauli_expectation(psi, majorana_probe(MajoranaLabel(mu, "R"), n))
            assert probe == pytest.approx(1.0 if mu == 2 * n else 0.0, abs=1e-12)

    def test_correlator_pair_12(self):
        a = 0.37
        psi = svsim.prepare_state("correlator", 4, a=a, bits=(0, 1))
        value = svsim.pauli_expectation(psi, majorana_pair_string(1, 2, 4))
        assert value == pytest.approx(1j * np.cos(2 * a))


class TestObservableSeries:
    def test_depth_one_initial(self):
        psi = svsim.prepare_state("plus_product", 2)
        series = svsim.observable_series(ChainSpec(2, z_angle=0.3), psi,
                                         [single_site("X", 1, 2)], 1)
        assert series.shape == (1, 1)
        assert series[0, 0] == pytest.approx(1.0)

    def test_matches_ffsim_free_case(self, rng):
        spec = ChainSpec(10, z_angle=PI / 8, xx_angle=PI / 4)
        u = ffsim.build_single_particle_unitary(spec)
        psi = svsim.prepare_state("plus_product", 10)
        got = svsim.majorana_series(spec, psi, "L", 12).real
        want = ffsim.heisenberg_series(u, ffsim.initial_majorana_expectations("L", 10), 12)
        assert np.abs(got - want).max() <= 1e-10

    def test_noise_damping(self):
        gamma = 0.0328
        spec = ChainSpec(3, z_angle=0.2, xx_angle=0.4)
        psi = svsim.prepare_state("plus_product", 3)
        clean = svsim.observable_series(spec, psi, [single_site("X", 1, 3)], 8)
        noisy = svsim.observable_series(spec, psi, [single_site("X", 1, 3)], 8,
                                        noise=svsim.NoiseModel(gamma))
        factors = np.exp(-gamma * np.arange(8))
        assert np.allclose(noisy[:, 0], clean[:, 0] * factors)

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError):
            svsim.NoiseModel(-0.1)


class TestSampleShots:
    def test_deterministic_eigenstate(self):
        psi = svsim.prepare_state("plus_product", 1)
        assert svsim.sample_shots(psi, PauliString(0, ("X",)), 100, seed=1) == 1.0

    def test_binomial_bound(self):
        amps = np.zeros(2); amps[0] = 1.0
        psi = svsim.StateVector(amps, 1)
        est = svsim.sample_shots(psi, PauliString(0, ("X",)), 8192, seed=5)
        assert abs(est) <= 4.0 / np.sqrt(8192)

    def test_seed_reproducible(self):
        psi = svsim.prepare_state("plus_product", 2)
        obs = single_site("Z", 1, 2)
        a = svsim.sample_shots(psi, obs, 512, seed=42)
        b = svsim.sample_shots(psi, obs, 512, seed=42)
        assert a == b

    def test_rejects_non_hermitian(self):
        psi = svsim.prepare_state("plus_product", 2)
        with pytest.raises(ValueError):
            svsim.sample_shots(psi, PauliString(1, ("Z", "I")), 10, seed=0)


class TestBraidUnitary:
    def test_alpha_zero_identity(self):
        psi = svsim.prepare_state("plus_product", 3)
        out = svsim.apply_braid_unitary(psi, 0.0)
        assert np.allclose(out.amps, psi.amps)

    def test_unitary(self, rng):
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi = svsim.StateVector(amps / np.linalg.norm(amps), 3)
        out = svsim.apply_braid_unitary(psi, 0.77)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)

    def test_half_turn_is_pure_string(self, rng):
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi = svsim.StateVector(amps / np.linalg.norm(amps), 3)
        out = svsim.apply_braid_unitary(psi, PI / 2)
        string = majorana_pair_string(1, 6, 3)
        want = svsim.apply_pauli(psi, -string)
        assert np.allclose(out.amps, want.amps, atol=1e-12)

    def test_conjugation_matches_braid_rotation(self, rng):
        n, alpha = 3, 0.31
        r = ffsim.braid_rotation(alpha, n)
        gammas = [svsim.pauli_matrix(majorana_to_pauli(MajoranaLabel(mu, "L"), n))
                  for mu in range(1, 2 * n + 1)]
        pair = svsim.pauli_matrix(majorana_pair_string(1, 2 * n, n))
        v = np.cos(alpha) * np.eye(2 ** n) - np.sin(alpha) * pair
        for mu in range(2 * n):
            got = v.conj().T @ gammas[mu] @ v
            want = sum(r[mu, nu] * gammas[nu] for nu in range(2 * n))
            assert np.allclose(got, want, atol=1e-12)


class TestOperatorResidual:
    def _free_mode(self, n, phz=0.0):
        free = ChainSpec(n, z_angle=PI / 16, xx_angle=PI / 4)
        u = ffsim.build_single_particle_unitary(free)
        modes = ffsim.eigenmodes(u)
        k = int(np.argmin(np.abs(modes.frequencies)))
        vec = modes.vectors[k]
        omega = modes.frequencies[k]
        cand = [(complex(c), majorana_to_pauli(MajoranaLabel(mu, "L"), n))
                for mu, c in enumerate(vec, start=1)]
        return cand, omega

    def test_free_mode_exactly_conserved(self):
        cand, omega = self._free_mode(6)
        spec = ChainSpec(6, z_angle=PI / 16, xx_angle=PI / 4)
        assert svsim.operator_residual(spec, cand, omega) <= 1e-10

    def test_residual_grows_with_interaction(self):
        cand, omega = self._free_mode(6)
        residuals = []
        for phz in (PI / 32, PI / 16, PI / 8):
            spec = ChainSpec(6, z_angle=PI / 16, xx_angle=PI / 4, zz_angle=phz)
            residuals.append(svsim.operator_residual(spec, cand, omega))
        assert residuals[0] > 1e-3
        assert residuals[0] < residuals[1] < residuals[2]

    def test_identity_zero_residual(self):
        from mflab.model import identity_string
        spec = ChainSpec(3, z_angle=0.3, xx_angle=0.4, zz_angle=0.2)
        assert svsim.operator_residual(spec, [(1.0, identity_string(3))], 0.0) <= 1e-12

    def test_capacity(self):
        with pytest.raises(CapacityError):
            svsim.operator_residual(ChainSpec(9), [], 0.0)


class TestPauliTransferMatrix:
    def test_identity_at_zero_angles(self):
        e_mat, report = svsim.pauli_transfer_matrix(ChainSpec(2))
        assert np.allclose(e_mat, np.eye(16), atol=1e-12)
        assert report.ok

    def test_random_angles_orthogonal(self, rng):
        spec = random_spec(rng, 2)
        e_mat, report = svsim.pauli_transfer_matrix(spec)
        assert report.orthogonality_residual <= 1e-10
        assert report.max_imag <= 1e-10
        assert report.unit_circle_residual <= 1e-10
        assert report.ok

    def test_reconstructed_eigenoperators(self, rng):
        spec = random_spec(rng, 2)
        e_mat, report = svsim.pauli_transfer_matrix(spec)
        basis = svsim.pauli_basis(2)
        mats = np.stack([svsim.pauli_matrix(p) for p in basis])
        u_dense = svsim.floquet_unitary_dense(spec)
        eigvals, eigvecs = np.linalg.eig(e_mat.T)
        eigvecs = svsim._orthonormalize_clusters(eigvals, eigvecs)
        dim = 2 ** 2
        # Tr(Delta_b^dag Delta_b') = 2^N delta and the eigen identity
        for b in range(0, 16, 5):
            delta = np.tensordot(eigvecs[:, b], mats, axes=(0, 0))
            evolved = u_dense.conj().T @ delta @ u_dense
            assert np.linalg.norm(evolved - eigvals[b] * delta) <= 1e-9
            for b2 in range(0, 16, 5):
                delta2 = np.tensordot(eigvecs[:, b2], mats, axes=(0, 0))
                tr = np.trace(delta.conj().T @ delta2) / dim
                assert abs(tr - (1.0 if b == b2 else 0.0)) <= 1e-9

    def test_free_spec_single_particle_sector(self, rng):
        # linear Majorana eigenmodes from ffsim are eigen-rows of E
        n = 3
        spec = random_free_spec(rng, n)
        e_mat, _ = svsim.pauli_transfer_matrix(spec)
        u = ffsim.build_single_particle_unitary(spec)
        modes = ffsim.eigenmodes(u)
        basis = svsim.pauli_basis(n)
        index = {p.letters: i for i, p in enumerate(basis)}
        for k in range(2 * n):
            coeff = np.zeros(4 ** n, dtype=complex)
            for mu in range(1, 2 * n + 1):
                string = majorana_to_pauli(MajoranaLabel(mu, "L"), n)
                coeff[index[string.letters]] += modes.vectors[k, mu - 1] * string.phase
            lam = np.exp(-1j * modes.frequencies[k])
            assert np.linalg.norm(coeff @ e_mat - lam * coeff) <= 1e-9

    def test_fourier_average_converges_to_projection(self, rng):
        spec = random_spec(rng, 2)
        e_mat, _ = svsim.pauli_transfer_matrix(spec)
        eigvals, eigvecs = np.linalg.eig(e_mat.T)
        eigvecs = svsim._orthonormalize_clusters(eigvals, eigvecs)
        coeffs = rng.normal(size=16)
        coeffs /= np.linalg.norm(coeffs)
        for omega in (0.0, PI):
            sel = np.abs(eigvals - np.exp(-1j * omega)) < 1e-9
            proj = eigvecs[:, sel] @ (eigvecs[:, sel].conj().T @ coeffs.astype(complex))
            for depth in (400, 1600):
                acc = np.zeros(16, dtype=complex)
                v = coeffs.astype(complex)
                for n in range(depth):
                    acc += np.exp(1j * omega * n) * v
                    v = e_mat.T @ v
                acc /= depth
                assert np.linalg.norm(acc - proj) <= 10.0 / depth

    def test_capacity(self):
        with pytest.raises(CapacityError):
            svsim.pauli_transfer_matrix(ChainSpec(4))
