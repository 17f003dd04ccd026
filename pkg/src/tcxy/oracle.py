"""Independent numeric propagators used to validate the closed-form solution.

Two reference paths are provided per manifold: direct integration of the
interaction-picture equations of motion with an adaptive high-order
Runge-Kutta scheme, and exact evolution through the eigendecomposition of the
static four-dimensional block Hamiltonian.  Neither path shares code with the
closed-form propagator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (ConfigError, NumericalDegradationError,
                     OracleIntegrationError, ShapeMismatchError)
from .model import FrozenSector, ModelParams, StateVector

EIG_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class BlockHamiltonian:
    """Static Hamiltonian of manifold ``n`` in the lab frame."""

    n: int
    h: np.ndarray

    def __post_init__(self):
        self.h.setflags(write=False)


@dataclass(frozen=True)
class EigBlock:
    """Eigendecomposition of one manifold block: ``h = u @ diag(w) @ u.conj().T``."""

    n: int
    w: np.ndarray
    u: np.ndarray


def block_hamiltonian(params: ModelParams, n: int) -> BlockHamiltonian:
    """Four-dimensional block over (|ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>).

    Diagonal entries are absolute energies (no manifold-dependent shift is
    removed); hbar = 1 throughout.
    """
    if n < 0:
        raise ConfigError(f"manifold index must be >= 0, got {n}")
    a_n = params.alpha_n(n)
    b_n = params.beta_n(n)
    om, om0, lam2 = params.omega, params.omega0, params.lambda2
    h = np.array([
        [om * n + om0,  a_n,            a_n,            0.0],
        [a_n,           om * (n + 1),   lam2,           b_n],
        [a_n,           lam2,           om * (n + 1),   b_n],
        [0.0,           b_n,            b_n,            om * (n + 2) - om0],
    ], dtype=complex)
    return BlockHamiltonian(n=n, h=h)


def h0_diagonal(params: ModelParams, n: int) -> np.ndarray:
    """Free-Hamiltonian diagonal generating the interaction picture in block ``n``."""
    base = params.omega * (n + 1)
    d = params.delta
    return np.array([base + d, base, base, base - d], dtype=float)


def eig_block(params: ModelParams, n: int) -> EigBlock:
    """Hermitian eigendecomposition of the block, with a residual audit."""
    block = block_hamiltonian(params, n)
    w, u = np.linalg.eigh(block.h)
    scale = np.linalg.norm(block.h)
    residual = np.linalg.norm(block.h @ u - u * w)
    if residual > EIG_RESIDUAL_TOL * max(scale, 1.0):
        raise NumericalDegradationError(
            f"eigendecomposition residual {residual:.3e} on manifold {n}")
    return EigBlock(n=n, w=w, u=u)


def evolve_block_exact(params: ModelParams, n: int, initial, t,
                       picture: str = "interaction") -> np.ndarray:
    """Exact block evolution through the eigendecomposition.

    ``t`` may be a scalar or a 1-d array; the result has shape (4,) or
    (4, len(t)).  ``picture`` selects interaction-picture output (default)
    or lab-frame (``"schrodinger"``) output.
    """
    if picture not in ("interaction", "schrodinger"):
        raise ConfigError(f"unknown picture {picture!r}")
    eig = eig_block(params, n)
    psi0 = np.asarray(initial, dtype=complex)
    if psi0.shape != (4,):
        raise ShapeMismatchError(f"block initial must have shape (4,), got {psi0.shape}")
    times = np.atleast_1d(np.asarray(t, dtype=float))
    modes = eig.u.conj().T @ psi0
    psi_s = eig.u @ (np.exp(-1j * np.outer(eig.w, times)) * modes[:, None])
    if picture == "interaction":
        h0 = h0_diagonal(params, n)
        psi_s = np.exp(1j * np.outer(h0, times)) * psi_s
    if np.isscalar(t) or np.ndim(t) == 0:
        return psi_s[:, 0]
    return psi_s


def integrate_block(params: ModelParams, n: int, initial, t,
                    tol: float = 1e-12) -> np.ndarray:
    """Integrate the interaction-picture equations of motion for one block.

    Uses an adaptive 8th-order Runge-Kutta scheme with embedded error
    control.  ``tol`` bounds both relative and absolute local error and must
    lie in [1e-14, 1e-6].
    """
    if not (1e-14 <= tol <= 1e-6):
        raise ConfigError(f"tol must lie in [1e-14, 1e-6], got {tol!r}")
    psi0 = np.asarray(initial, dtype=complex)
    if psi0.shape != (4,):
        raise ShapeMismatchError(f"block initial must have shape (4,), got {psi0.shape}")
    scalar = np.isscalar(t) or np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ConfigError("times must be non-negative and non-decreasing")

    a_n, b_n = params.alpha_n(n), params.beta_n(n)
    lam2, delta = params.lambda2, params.delta

    def rhs(time, y):
        ep = np.exp(1j * delta * time)
        em = ep.conjugate()
        k = y[1] + y[2]
        return np.array([
            -1j * a_n * ep * k,
            -1j * (a_n * em * y[0] + lam2 * y[2] + b_n * ep * y[3]),
            -1j * (a_n * em * y[0] + lam2 * y[1] + b_n * ep * y[3]),
            -1j * b_n * em * k,
        ])

    t_end = float(times[-1])
    if t_end == 0.0:
        out = np.repeat(psi0[:, None], times.size, axis=1)
        return out[:, 0] if scalar else out
    sol = solve_ivp(rhs, (0.0, t_end), psi0, method="DOP853",
                    t_eval=times, rtol=tol, atol=tol)
    if not sol.success:
        raise OracleIntegrationError(
            f"stiff or non-convergent integration on manifold {n}: {sol.message}")
    return sol.y[:, 0] if scalar else sol.y


def boundary_hamiltonian(params: ModelParams) -> np.ndarray:
    """Zero-excitation block over (|eg,0>, |ge,0>, |gg,1>), lab frame.

    Energies are written relative to nothing: the diagonal already equals
    (0, 0, -delta) because the bare frequencies cancel in this block.
    """
    lam1, lam2 = params.lambda1, params.lambda2
    return np.array([
        [0.0,  lam2, lam1],
        [lam2, 0.0,  lam1],
        [lam1, lam1, -params.delta],
    ], dtype=complex)


def evolve_frozen(params: ModelParams, frozen0: FrozenSector, t) -> np.ndarray:
    """Frozen-sector amplitudes at ``t`` (scalar or array) in the interaction picture.

    Output rows follow ``FrozenSector.amplitudes`` order: (b_eg0, c_ge0,
    d_gg0, d_gg1).  |gg,0> evolves by a pure phase that the interaction
    picture removes entirely, so that row is constant.
    """
    scalar = np.isscalar(t) or np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    h3 = boundary_hamiltonian(params)
    w, u = np.linalg.eigh(h3)
    psi0 = np.array([frozen0.b_eg0, frozen0.c_ge0, frozen0.d_gg1], dtype=complex)
    modes = u.conj().T @ psi0
    psi_s = u @ (np.exp(-1j * np.outer(w, times)) * modes[:, None])
    h0 = np.array([0.0, 0.0, -params.delta])
    psi_i = np.exp(1j * np.outer(h0, times)) * psi_s
    out = np.empty((4, times.size), dtype=complex)
    out[0] = psi_i[0]
    out[1] = psi_i[1]
    out[2] = frozen0.d_gg0
    out[3] = psi_i[2]
    return out[:, 0] if scalar else out


def integrate_frozen(params: ModelParams, frozen0: FrozenSector, t,
                     tol: float = 1e-12) -> np.ndarray:
    """ODE cross-check of :func:`evolve_frozen`; same output layout."""
    if not (1e-14 <= tol <= 1e-6):
        raise ConfigError(f"tol must lie in [1e-14, 1e-6], got {tol!r}")
    scalar = np.isscalar(t) or np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    lam1, lam2, delta = params.lambda1, params.lambda2, params.delta

    def rhs(time, y):
        # Interaction picture of the zero-excitation block.
        ep = np.exp(1j * delta * time)
        em = ep.conjugate()
        return np.array([
            -1j * (lam2 * y[1] + lam1 * ep * y[2]),
            -1j * (lam2 * y[0] + lam1 * ep * y[2]),
            -1j * lam1 * em * (y[0] + y[1]),
        ])

    psi0 = np.array([frozen0.b_eg0, frozen0.c_ge0, frozen0.d_gg1], dtype=complex)
    t_end = float(times[-1])
    if t_end == 0.0:
        psi = np.repeat(psi0[:, None], times.size, axis=1)
    else:
        sol = solve_ivp(rhs, (0.0, t_end), psi0, method="DOP853",
                        t_eval=times, rtol=tol, atol=tol)
        if not sol.success:
            raise OracleIntegrationError(
                f"stiff or non-convergent integration on the frozen sector: {sol.message}")
        psi = sol.y
    out = np.empty((4, times.size), dtype=complex)
    out[0], out[1], out[3] = psi[0], psi[1], psi[2]
    out[2] = frozen0.d_gg0
    return out[:, 0] if scalar else out


def coefficients_exact(state0: StateVector, params: ModelParams,
                       times) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Eigendecomposition evolution of every manifold plus the frozen sector.

    Returns arrays (A, B, C, D) of shape (nmax + 1, nt) and a (4, nt) frozen
    block, matching the layout of the closed-form propagator.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    nm = state0.nmax + 1
    coeff = np.empty((nm, 4, times.size), dtype=complex)
    for n in range(nm):
        psi0 = np.array([state0.A[n], state0.B[n], state0.C[n], state0.D[n]])
        coeff[n] = evolve_block_exact(params, n, psi0, times)
    frozen = evolve_frozen(params, state0.frozen, times)
    return coeff[:, 0, :], coeff[:, 1, :], coeff[:, 2, :], coeff[:, 3, :], frozen


def evolve_state_exact(state0: StateVector, params: ModelParams, t: float) -> StateVector:
    """Full-state oracle propagation to a single time."""
    if state0.time_tag != 0.0:
        raise ConfigError("oracle propagation expects a state tagged at time zero")
    a, b, c, d, frozen = coefficients_exact(state0, params, [float(t)])
    return StateVector(
        nmax=state0.nmax, A=a[:, 0], B=b[:, 0], C=c[:, 0], D=d[:, 0],
        frozen=FrozenSector(*frozen[:, 0]), time_tag=float(t),
    )


@dataclass(frozen=True)
class StateDiscrepancy:
    """Elementwise comparison of two states on identical layouts.

    ``worst_manifold`` is the manifold index holding the largest deviation,
    with -1 denoting the frozen sector.
    """

    max_abs: float
    rms: float
    worst_manifold: int
    norm_diff: float


def compare_states(state_a: StateVector, state_b: StateVector) -> StateDiscrepancy:
    """Coefficient-wise discrepancy between two states of identical layout."""
    if state_a.nmax != state_b.nmax:
        raise ShapeMismatchError(
            f"cannot compare states with nmax {state_a.nmax} and {state_b.nmax}")
    devs = np.stack([np.abs(getattr(state_a, k) - getattr(state_b, k))
                     for k in ("A", "B", "C", "D")])
    frozen_dev = np.abs(state_a.frozen.amplitudes - state_b.frozen.amplitudes)
    per_manifold = devs.max(axis=0)
    worst = int(np.argmax(per_manifold))
    max_manifold = float(per_manifold[worst])
    max_frozen = float(frozen_dev.max())
    if max_frozen > max_manifold:
        worst, max_abs = -1, max_frozen
    else:
        max_abs = max_manifold
    count = devs.size + frozen_dev.size
    rms = float(np.sqrt((np.sum(devs**2) + np.sum(frozen_dev**2)) / count))
    return StateDiscrepancy(max_abs=max_abs, rms=rms, worst_manifold=worst,
                            norm_diff=float(state_a.norm() - state_b.norm()))
