"""Unit tests for minimal Gaussian purification."""

import numpy as np
import pytest

from gaussdilation import (
    choi_covariance,
    matcore,
    minimal_purification,
    purity_test,
    qmin_via_choi,
    random_channel,
    random_covariance,
    sigma_direct_sum,
    standard_reordering,
)


class TestPurityTest:
    def test_vacuum_is_pure(self):
        rep = purity_test(np.eye(6))
        assert rep.pure
        assert np.allclose(rep.sympl_spectrum, np.ones(3))

    def test_thermal_is_mixed(self):
        rep = purity_test(2 * np.eye(2))
        assert not rep.pure
        assert np.allclose(rep.sympl_spectrum, [2.0])

    def test_rejects_unphysical(self):
        with pytest.raises(ValueError):
            purity_test(0.25 * np.eye(2))


class TestMinimalPurification:
    def test_vacuum_needs_nothing(self):
        pur = minimal_purification(np.eye(4))
        assert pur.q == 0 and pur.unit_count == 2
        assert np.allclose(pur.Gamma, np.eye(4))

    def test_single_thermal_mode(self):
        pur = minimal_purification(2 * np.eye(2))
        assert pur.q == 1
        f = -np.sqrt(3.0)
        expected = np.array([
            [2.0, 0.0, 0.0, f],
            [0.0, 2.0, f, 0.0],
            [0.0, f, 2.0, 0.0],
            [f, 0.0, 0.0, 2.0],
        ])
        assert np.allclose(pur.Gamma, expected, atol=1e-12)
        assert purity_test(pur.Gamma, sigma=sigma_direct_sum([2, 2])).pure

    def test_mixed_spectrum_counts_only_nonunit(self):
        pur = minimal_purification(np.diag([1.0, 3.0, 1.0, 3.0]))
        assert pur.q == 1 and pur.unit_count == 1

    def test_rejects_unphysical(self):
        with pytest.raises(ValueError):
            minimal_purification(0.5 * np.eye(2))

    @pytest.mark.parametrize("seed", range(25))
    def test_round_trip_marginal(self, seed):
        rng = np.random.default_rng(seed)
        modes = int(rng.integers(1, 5))
        gamma = random_covariance(modes, rng, pure=bool(seed % 3 == 0))
        pur = minimal_purification(gamma)
        two_n = 2 * modes
        assert np.max(np.abs(pur.Gamma[:two_n, :two_n] - gamma)) <= 1e-9 * (1 + np.max(np.abs(gamma)))
        spectrum = purity_test(pur.Gamma, sigma=sigma_direct_sum([two_n, 2 * pur.q])).sympl_spectrum
        assert np.max(np.abs(spectrum - 1.0)) <= 1e-8
        assert pur.q == modes - pur.unit_count

    @pytest.mark.parametrize("seed", range(8))
    def test_choi_state_purification_matches_mode_count(self, seed):
        n = 1 + seed % 3
        ch = random_channel(n, seed % 4, env_pure=bool(seed % 2), seed=seed + 77)
        choi = choi_covariance(ch, theta=8.0)
        # bring the blocked two-party form into the standard single-form basis
        R = standard_reordering(choi.sigma_AB)
        gamma_std = R @ choi.gamma_prime @ R.T
        pur = minimal_purification(gamma_std)
        assert pur.q == qmin_via_choi(ch, 8.0)

    def test_ancillas_ordered_by_decreasing_eigenvalue(self):
        gamma = np.diag([2.0, 5.0, 2.0, 5.0])
        pur = minimal_purification(gamma)
        assert pur.q == 2
        b_block = pur.Gamma[4:, 4:]
        d_vals = np.diag(b_block)[:2]
        assert d_vals[0] >= d_vals[1]

    def test_williamson_daggered_back(self):
        rng = np.random.default_rng(3)
        gamma = random_covariance(2, rng)
        pur = minimal_purification(gamma)
        sig = matcore.sigma_form(2)
        assert np.max(np.abs(pur.S_back @ sig @ pur.S_back.T - sig)) <= 1e-8
