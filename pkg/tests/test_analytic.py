"""Closed-form block evolution against structure checks and the numeric oracle."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import fresh_state, random_params
from tcxy import analytic, cubic, oracle
from tcxy.model import ModelParams


def random_block(rng) -> np.ndarray:
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    return z / np.linalg.norm(z)


class TestManifoldSolution:
    def test_zero_initial_block_stays_zero(self):
        p = ModelParams.from_detuning(delta=0.3, lambda1=1.0, lambda2=0.5)
        sol = analytic.solve_manifold(np.zeros(4, dtype=complex), p, 7)
        assert not sol.deltas.any()
        out = analytic.evolve_block(sol, p, np.linspace(0.0, 10.0, 7))
        assert not out.any()

    def test_time_zero_reproduces_the_initial_block(self, rng):
        for _ in range(25):
            p = random_params(rng)
            n = int(rng.integers(0, 50))
            init = random_block(rng)
            sol = analytic.solve_manifold(init, p, n)
            np.testing.assert_allclose(
                analytic.evolve_block(sol, p, 0.0), init, atol=1e-12
            )

    def test_vector_times_match_scalar_times(self, rng):
        p = random_params(rng)
        init = random_block(rng)
        sol = analytic.solve_manifold(init, p, 3)
        ts = np.linspace(0.0, 20.0, 9)
        batch = analytic.evolve_block(sol, p, ts)
        for k, t in enumerate(ts):
            np.testing.assert_allclose(
                batch[:, k], analytic.evolve_block(sol, p, float(t)), atol=1e-13
            )

    def test_excited_block_on_resonance_has_an_inert_zero_mode(self):
        # Initial weight only on the top level, no exchange, no detuning:
        # the zero-frequency mode carries nothing and the two side modes
        # cancel each other at t = 0.
        p = ModelParams.from_detuning(delta=0.0, lambda1=1.0, lambda2=0.0)
        n = 6
        roots = cubic.block_roots(p, n)
        deltas = analytic.block_deltas(roots, np.array([1.0, 0, 0, 0], dtype=complex), p, n)
        order = np.argsort(np.abs(np.asarray(roots.m)))
        assert abs(deltas[order[0]]) < 1e-12
        assert abs(deltas[order[1]] + deltas[order[2]]) < 1e-12

    def test_two_delta_routes_agree(self, rng):
        for _ in range(200):
            p = random_params(rng)
            n = int(rng.integers(0, 50))
            roots = cubic.block_roots(p, n)
            if cubic.is_degenerate(roots, p.block_scale(n)):
                continue
            init = random_block(rng)
            direct = analytic.block_deltas(roots, init, p, n)
            explicit = analytic.block_deltas_explicit(roots, init, p, n)
            scale = max(1.0, float(np.max(np.abs(direct))))
            np.testing.assert_allclose(direct, explicit, atol=1e-9 * scale)

    def test_single_block_matches_the_eigendecomposition(self, rng):
        ts = np.linspace(0.0, 50.0, 21)
        for _ in range(40):
            p = random_params(rng)
            n = int(rng.integers(0, 50))
            init = random_block(rng)
            sol = analytic.solve_manifold(init, p, n)
            ours = analytic.evolve_block(sol, p, ts)
            for k, t in enumerate(ts):
                ref = oracle.evolve_block_exact(p, n, init, float(t))
                assert np.max(np.abs(ours[:, k] - ref)) < 1e-8

    def test_near_degenerate_roots_stay_accurate(self):
        # Weak field coupling pushes two roots within ~1e-5 of each other,
        # exercising the guarded small-argument growth factor.
        p = ModelParams.from_detuning(delta=0.0, lambda1=1e-3, lambda2=1.0)
        n = 0
        roots = cubic.block_roots(p, n)
        assert cubic.min_separation(roots) < 1e-4
        init = np.array([0.6, 0.5j, -0.4, 0.2 + 0.3j])
        init /= np.linalg.norm(init)
        sol = analytic.solve_manifold(init, p, n)
        for t in (0.1, 5.0, 50.0):
            ref = oracle.evolve_block_exact(p, n, init, t)
            assert np.max(np.abs(analytic.evolve_block(sol, p, t) - ref)) < 1e-9


class TestWholeStateEvolution:
    def test_time_zero_identity(self):
        state = fresh_state("psi_s", 10.0)
        p = ModelParams.from_detuning(delta=0.0, lambda1=1.0, lambda2=0.5)
        evolved = analytic.evolve_state(state, p, 0.0)
        np.testing.assert_allclose(evolved.A, state.A, atol=1e-14)
        np.testing.assert_allclose(evolved.D, state.D, atol=1e-14)
        np.testing.assert_allclose(
            evolved.frozen.amplitudes, state.frozen.amplitudes, atol=1e-14
        )

    def test_norm_and_excitation_are_conserved(self, rng):
        state = fresh_state("psi_b", 10.0)
        for _ in range(5):
            p = random_params(rng)
            t = float(rng.uniform(0.0, 30.0))
            evolved = analytic.evolve_state(state, p, t)
            assert abs(evolved.norm() - state.norm()) < 1e-12
            assert (
                abs(evolved.excitation_expectation() - state.excitation_expectation())
                < 1e-9 * state.excitation_expectation()
            )

    def test_matches_the_full_numeric_oracle(self):
        state = fresh_state("psi_b", 20.0)
        p = ModelParams.from_detuning(delta=1.0, lambda1=1.0, lambda2=0.5)
        ours = analytic.evolve_state(state, p, 10.0)
        ref = oracle.evolve_state_exact(state, p, 10.0)
        report = oracle.compare_states(ours, ref)
        assert report.max_abs < 1e-8

    def test_exchange_only_evolution_follows_the_rotation_closed_form(self):
        # Decoupled field: top/bottom amplitudes freeze, the singly excited
        # pair rotates at the exchange frequency in counter-phase.
        state = fresh_state("psi_s", 10.0)
        lam2 = 1.0
        p = ModelParams.from_detuning(delta=0.0, lambda1=0.0, lambda2=lam2)
        prop = analytic.propagator_for(state, p)
        assert len(prop.degenerate_manifolds) == state.nmax + 1
        for t in (0.7, 3.1):
            ev = prop.state_at(t)
            np.testing.assert_allclose(ev.A, state.A, atol=1e-12)
            np.testing.assert_allclose(ev.D, state.D, atol=1e-12)
            np.testing.assert_allclose(
                ev.B + ev.C, np.exp(-1j * lam2 * t) * (state.B + state.C), atol=1e-12
            )
            np.testing.assert_allclose(
                ev.B - ev.C, np.exp(+1j * lam2 * t) * (state.B - state.C), atol=1e-12
            )

    def test_generic_grid_has_no_degenerate_manifolds(self):
        state = fresh_state("psi_e", 20.0)
        p = ModelParams.from_detuning(delta=0.5, lambda1=1.0, lambda2=0.5)
        assert analytic.propagator_for(state, p).degenerate_manifolds == ()


class TestPropagator:
    def test_identical_requests_share_one_propagator(self):
        state = fresh_state("psi_e", 5.0)
        p = ModelParams.from_detuning(delta=0.0, lambda1=1.0, lambda2=0.1)
        assert analytic.propagator_for(state, p) is analytic.propagator_for(state, p)
        q = ModelParams.from_detuning(delta=0.0, lambda1=1.0, lambda2=0.2)
        assert analytic.propagator_for(state, p) is not analytic.propagator_for(state, q)

    def test_coefficient_table_layout(self):
        state = fresh_state("psi_s", 5.0)
        p = ModelParams.from_detuning(delta=0.2, lambda1=0.8, lambda2=0.3)
        ts = np.linspace(0.0, 4.0, 5)
        co = analytic.propagator_for(state, p).coefficients_at(ts)
        rows = state.nmax + 1
        assert co.a.shape == co.b.shape == co.c.shape == co.d.shape == (rows, 5)
        assert co.frozen.shape == (4, 5)
        np.testing.assert_allclose(co.a[:, 0], state.A, atol=1e-13)
        np.testing.assert_allclose(co.frozen[:, 0], state.frozen.amplitudes, atol=1e-13)

    def test_state_at_agrees_with_coefficient_slices(self):
        state = fresh_state("psi_b", 8.0)
        p = ModelParams.from_detuning(delta=0.0, lambda1=1.0, lambda2=1.0)
        prop = analytic.propagator_for(state, p)
        t = 6.5
        co = prop.coefficients_at(np.array([t]))
        sv = prop.state_at(t)
        np.testing.assert_allclose(sv.A, co.a[:, 0], atol=1e-14)
        np.testing.assert_allclose(sv.B, co.b[:, 0], atol=1e-14)
        np.testing.assert_allclose(sv.frozen.amplitudes, co.frozen[:, 0], atol=1e-14)
        assert sv.time_tag == t
