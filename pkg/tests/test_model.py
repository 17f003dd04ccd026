"""Field expansion, presets, parameter validation, and state layout."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import fresh_state, random_state_vector
from tcxy.errors import ConfigError
from tcxy.model import (
    FrozenSector,
    ModelParams,
    PRESET_NAMES,
    QubitInitState,
    StateVector,
    coherent_weights,
    initial_state,
    preset,
)


class TestCoherentWeights:
    def test_vacuum_is_a_single_fock_state(self):
        field = coherent_weights(0.0)
        assert field.nmax == 0
        np.testing.assert_array_equal(field.weights, [1.0 + 0j])
        assert field.nbar == 0.0

    def test_nbar_ten_norm_and_mean(self):
        field = coherent_weights(math.sqrt(10.0))
        probs = np.abs(field.weights) ** 2
        assert 1.0 - probs.sum() < 1e-12
        mean = float(np.sum(np.arange(field.nmax + 1) * probs))
        assert abs(mean - 10.0) < 1e-8

    def test_nbar_twenty_mode_sits_at_the_mean(self):
        field = coherent_weights(math.sqrt(20.0))
        mode = int(np.argmax(np.abs(field.weights)))
        assert mode in (19, 20)

    def test_truncation_meets_tail_bound_across_magnitudes(self, rng):
        for _ in range(20):
            nbar = float(rng.uniform(0.1, 100.0))
            field = coherent_weights(math.sqrt(nbar), tail_tolerance=1e-12)
            probs = np.abs(field.weights) ** 2
            assert 1.0 - probs.sum() < 1e-12
            mean = float(np.sum(np.arange(field.nmax + 1) * probs))
            assert abs(mean - nbar) <= 1e-8 * max(nbar, 1.0)
            assert field.nmax >= nbar + 10.0 * math.sqrt(nbar) + 9.0

    def test_complex_alpha_carries_fock_phases(self):
        alpha = 2.0 * np.exp(0.7j)
        field = coherent_weights(alpha)
        ns = np.arange(field.nmax + 1)
        expected_phase = np.exp(1j * 0.7 * ns)
        observed_phase = field.weights / np.abs(field.weights)
        np.testing.assert_allclose(observed_phase, expected_phase, atol=1e-12)

    @pytest.mark.parametrize("bad_tol", [0.0, -1e-6, 2e-3, 1.0])
    def test_tail_tolerance_domain(self, bad_tol):
        with pytest.raises(ConfigError):
            coherent_weights(1.0, tail_tolerance=bad_tol)

    def test_mean_photon_cap_and_finiteness(self):
        with pytest.raises(ConfigError):
            coherent_weights(101.0)  # nbar above 1e4
        with pytest.raises(ConfigError):
            coherent_weights(float("nan"))

    def test_weights_are_immutable(self):
        field = coherent_weights(2.0)
        with pytest.raises(ValueError):
            field.weights[0] = 0.0


class TestPresetsAndQubitState:
    def test_named_presets(self):
        e = preset("psi_e")
        assert (e.a, e.b, e.c, e.d) == (1.0, 0.0, 0.0, 0.0)
        b = preset("psi_b")
        s = 2.0**-0.5
        np.testing.assert_allclose(b.amplitudes, [s, 0.0, 0.0, s], atol=1e-15)
        sep = preset("psi_s")
        np.testing.assert_allclose(sep.amplitudes, [0.5, 0.5, 0.5, 0.5], atol=1e-15)
        assert set(PRESET_NAMES) == {"psi_e", "psi_b", "psi_s"}

    def test_unknown_preset_rejected(self):
        with pytest.raises(ConfigError):
            preset("psi_x")

    def test_unnormalized_amplitudes_rejected(self):
        with pytest.raises(ConfigError):
            QubitInitState(1.0, 1.0, 0.0, 0.0)

    def test_balanced_preset_is_a_product_state(self):
        s = preset("psi_s")
        # (|e> + |g>)/sqrt(2) on each system: outer product has rank one.
        mat = s.amplitudes.reshape(2, 2)
        sv = np.linalg.svd(mat, compute_uv=False)
        assert sv[1] < 1e-15


class TestModelParams:
    def test_detuning_is_derived(self):
        p = ModelParams(omega=1.0, omega0=1.5, lambda1=1.0, lambda2=0.0)
        assert p.delta == 0.5
        q = ModelParams.from_detuning(delta=-0.25, lambda1=0.3, lambda2=0.1, omega=2.0)
        assert q.omega0 == pytest.approx(1.75)
        assert q.delta == pytest.approx(-0.25)

    def test_negative_couplings_rejected(self):
        with pytest.raises(ConfigError):
            ModelParams.from_detuning(lambda1=-1.0)
        with pytest.raises(ConfigError):
            ModelParams.from_detuning(lambda1=1.0, lambda2=-0.5)

    def test_doubly_free_needs_opt_in(self):
        with pytest.raises(ConfigError):
            ModelParams.from_detuning(lambda1=0.0, lambda2=0.0)
        p = ModelParams.from_detuning(lambda1=0.0, lambda2=0.0, allow_free=True)
        assert p.coupling_ratio == math.inf

    def test_block_couplings_and_scale(self):
        p = ModelParams.from_detuning(delta=0.0, lambda1=2.0, lambda2=0.0)
        assert p.alpha_n(3) == pytest.approx(2.0 * 2.0)  # sqrt(n + 1)
        assert p.beta_n(2) == pytest.approx(4.0)  # sqrt(n + 2)
        assert p.block_scale(10) >= p.beta_n(10)
        assert p.block_scale(0) >= 1.0


class TestInitialState:
    def test_excited_pair_occupies_only_the_top_level(self):
        state = fresh_state("psi_e", 10.0)
        field = coherent_weights(math.sqrt(10.0))
        np.testing.assert_array_equal(state.A, field.weights)
        assert not state.B.any() and not state.C.any() and not state.D.any()
        assert state.frozen.norm_squared() == 0.0

    def test_bell_preset_photon_layout(self):
        state = fresh_state("psi_b", 10.0)
        q = coherent_weights(math.sqrt(10.0)).weights
        dense = state.photon_amplitudes()
        s = 2.0**-0.5
        np.testing.assert_allclose(dense[0, : len(q)], q * s, atol=1e-15)
        assert not dense[1].any() and not dense[2].any()
        np.testing.assert_allclose(dense[3, : len(q)], q * s, atol=1e-15)

    def test_vacuum_balanced_state_lives_mostly_in_the_frozen_sector(self):
        state = initial_state(preset("psi_s"), coherent_weights(0.0))
        assert state.nmax == 0
        assert state.A[0] == pytest.approx(0.5)
        np.testing.assert_allclose(
            state.frozen.amplitudes, [0.5, 0.5, 0.5, 0.0], atol=1e-15
        )
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_norm_is_one_minus_truncation_tail(self):
        for name in PRESET_NAMES:
            state = fresh_state(name, 20.0)
            assert abs(state.norm() - 1.0) < 1e-12

    def test_dropping_the_frozen_sector_loses_exactly_its_weight(self):
        nbar = 10.0
        q = coherent_weights(math.sqrt(nbar)).weights
        with_sector = fresh_state("psi_s", nbar, frozen_sector=True)
        without = fresh_state("psi_s", nbar, frozen_sector=False)
        expected_loss = abs(q[0]) ** 2 * (0.25 + 0.25 + 0.25) + abs(q[1]) ** 2 * 0.25
        assert with_sector.norm() - without.norm() == pytest.approx(
            expected_loss, abs=1e-15
        )

    def test_excitation_expectation_counts_photons_plus_upper_levels(self):
        state = fresh_state("psi_e", 10.0)
        # |ee, n> carries n + 1 excitations in this labelling.
        assert state.excitation_expectation() == pytest.approx(11.0, rel=1e-8)

    def test_shape_validation(self):
        with pytest.raises(ConfigError):
            StateVector(
                nmax=2,
                A=np.zeros(2, dtype=complex),
                B=np.zeros(3, dtype=complex),
                C=np.zeros(3, dtype=complex),
                D=np.zeros(3, dtype=complex),
                frozen=FrozenSector(),
            )

    def test_amplitudes_are_immutable(self, rng):
        state = random_state_vector(rng)
        with pytest.raises(ValueError):
            state.A[0] = 1.0

    def test_photon_table_matches_block_layout(self, rng):
        state = random_state_vector(rng, nmax=6)
        dense = state.photon_amplitudes()
        np.testing.assert_array_equal(dense[0, :7], state.A)
        np.testing.assert_array_equal(dense[1, 1:8], state.B)
        np.testing.assert_array_equal(dense[2, 1:8], state.C)
        np.testing.assert_array_equal(dense[3, 2:9], state.D)
        assert dense[1, 0] == state.frozen.b_eg0
        assert dense[2, 0] == state.frozen.c_ge0
        assert dense[3, 0] == state.frozen.d_gg0
        assert dense[3, 1] == state.frozen.d_gg1
