"""Compiled and pure-Python kernels must be interchangeable."""

from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest

from conftest import fresh_state, random_params
from tcxy import analytic, backend
from tcxy.errors import ConfigError

HAVE_COMPILED = "compiled" in backend.available_backends()

needs_compiled = pytest.mark.skipif(
    not HAVE_COMPILED, reason="compiled extension not built in this environment"
)


def kernel_inputs(rng, nbar: float = 8.0):
    """Stacked per-manifold arrays for a random admissible configuration."""
    state = fresh_state("psi_s", nbar)
    params = random_params(rng)
    nm = state.nmax + 1
    init = np.column_stack([state.A, state.B, state.C, state.D])
    roots = np.zeros((nm, 3), dtype=complex)
    deltas = np.zeros((nm, 3), dtype=complex)
    for n in range(nm):
        sol = analytic.solve_manifold(init[n], params, n)
        roots[n] = sol.roots.as_array
        deltas[n] = sol.deltas
    alpha = params.lambda1 * np.sqrt(np.arange(1, nm + 1, dtype=float))
    beta = params.lambda1 * np.sqrt(np.arange(2, nm + 2, dtype=float))
    times = np.linspace(0.0, 25.0, 64)
    return roots, deltas, init, alpha, beta, params.delta, params.lambda2, times


class TestSelection:
    def test_active_backend_is_available(self):
        assert backend.BACKEND_NAME in backend.available_backends()
        assert backend.BACKEND_NAME in ("python", "compiled")

    def test_python_backend_always_loads(self):
        mod = backend.get_backend("python")
        assert hasattr(mod, "evolve_blocks") and hasattr(mod, "rdm_series")

    def test_unknown_backend_name_is_rejected(self):
        with pytest.raises(ConfigError):
            backend.get_backend("fortran")

    def test_bogus_environment_selection_fails_at_import(self):
        proc = subprocess.run(
            [sys.executable, "-c", "import tcxy"],
            capture_output=True,
            text=True,
            env={"TCXY_BACKEND": "bogus", "PATH": "/usr/bin:/bin"},
        )
        assert proc.returncode != 0
        assert "TCXY_BACKEND" in proc.stderr

    def test_forced_python_selection(self):
        proc = subprocess.run(
            [
                sys.executable,
                "-c",
                "from tcxy import backend; print(backend.BACKEND_NAME)",
            ],
            capture_output=True,
            text=True,
            env={"TCXY_BACKEND": "python", "PATH": "/usr/bin:/bin"},
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "python"


@needs_compiled
class TestCrossBackendAgreement:
    def test_block_evolution_matches(self, rng):
        py = backend.get_backend("python")
        cc = backend.get_backend("compiled")
        for _ in range(5):
            args = kernel_inputs(rng)
            out_py = py.evolve_blocks(*args)
            out_cc = cc.evolve_blocks(*args)
            for p_arr, c_arr in zip(out_py, out_cc):
                assert np.max(np.abs(p_arr - c_arr)) < 1e-13

    def test_density_series_matches(self, rng):
        py = backend.get_backend("python")
        cc = backend.get_backend("compiled")
        for _ in range(5):
            args = kernel_inputs(rng)
            a, b, c, d = py.evolve_blocks(*args)
            frozen = rng.normal(size=(4, args[-1].size)) + 1j * rng.normal(
                size=(4, args[-1].size)
            )
            rho_py = py.rdm_series(a, b, c, d, frozen)
            rho_cc = cc.rdm_series(a, b, c, d, frozen)
            assert rho_py.shape == rho_cc.shape == (args[-1].size, 4, 4)
            assert np.max(np.abs(rho_py - rho_cc)) < 1e-13

    def test_compiled_kernels_accept_read_only_arrays(self):
        state = fresh_state("psi_b", 6.0)
        cc = backend.get_backend("compiled")
        rho = cc.rdm_series(
            state.A[:, None], state.B[:, None], state.C[:, None], state.D[:, None],
            state.frozen.amplitudes[:, None],
        )
        assert rho.shape == (1, 4, 4)

    def test_same_backend_is_bit_deterministic(self, rng):
        cc = backend.get_backend("compiled")
        args = kernel_inputs(rng)
        first = cc.evolve_blocks(*args)
        second = cc.evolve_blocks(*args)
        for x, y in zip(first, second):
            np.testing.assert_array_equal(x, y)
