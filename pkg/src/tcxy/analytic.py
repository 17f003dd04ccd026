"""Closed-form time evolution of every excitation manifold.

Within manifold ``n`` the symmetric combination K = B + C of the singly
excited amplitudes is a sum of three exponentials whose rates are the cubic
roots supplied by :mod:`tcxy.cubic`.  The remaining coefficients follow from
K by quadrature, so a manifold is fully described by its three roots, three
mode amplitudes, and initial coefficients.  Blocks whose roots collide (for
example when the field coupling vanishes) are routed transparently to the
numeric oracle's eigendecomposition propagator.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend, oracle
from .cubic import CubicRoots, block_roots, is_degenerate
from .errors import BranchSelectionError, ConfigError, DegenerateRootsError
from .model import FrozenSector, ModelParams, StateVector


@dataclass(frozen=True)
class BlockCouplings:
    """Field couplings of the two transitions inside manifold ``n``."""

    n: int
    alpha_n: float
    beta_n: float

    @classmethod
    def from_params(cls, params: ModelParams, n: int) -> "BlockCouplings":
        return cls(n=n, alpha_n=params.alpha_n(n), beta_n=params.beta_n(n))


@dataclass(frozen=True)
class ManifoldSolution:
    """Everything needed to evaluate one manifold at arbitrary times."""

    couplings: BlockCouplings
    roots: CubicRoots
    deltas: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        for name in ("deltas", "initial"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _k_seeds(initial, params: ModelParams, n: int) -> tuple[complex, complex, complex]:
    """Value and first two derivatives of K = B + C at time zero."""
    a0, b0, c0, d0 = initial
    al = params.alpha_n(n)
    be = params.beta_n(n)
    lam2, delta = params.lambda2, params.delta
    k0 = b0 + c0
    k1 = -1j * (2.0 * al * a0 + 2.0 * be * d0 + lam2 * k0)
    k2 = (2.0 * al * a0 * (-delta - lam2) + 2.0 * be * d0 * (delta - lam2)
          - (2.0 * (al**2 + be**2) + lam2**2) * k0)
    return k0, k1, k2


def block_deltas(roots: CubicRoots, initial, params: ModelParams, n: int) -> np.ndarray:
    """Mode amplitudes of K for manifold ``n`` via the seed linear system.

    Solves the 3x3 Vandermonde system matching K and its first two
    derivatives at time zero.  Raises ``DegenerateRootsError`` when a root
    collision makes the system near singular; callers then use the oracle.
    """
    if is_degenerate(roots, params.block_scale(n)):
        raise DegenerateRootsError(
            f"root collision on manifold {n}: separations too small for the "
            "mode-amplitude system")
    k0, k1, k2 = _k_seeds(initial, params, n)
    m = roots.as_array
    vand = np.vstack([np.ones(3, dtype=complex), m, m * m])
    return np.linalg.solve(vand, np.array([k0, k1, k2], dtype=complex))


def block_deltas_explicit(roots: CubicRoots, initial, params: ModelParams,
                          n: int) -> np.ndarray:
    """Mode amplitudes through the explicit ratio expressions.

    Algebraically identical to :func:`block_deltas`; kept as an independent
    cross-check of the linear-system route.
    """
    a0, b0, c0, d0 = (complex(z) for z in initial)
    m1, m2, m3 = roots.m
    al = params.alpha_n(n)
    be = params.beta_n(n)
    lam2, delta = params.lambda2, params.delta
    k0 = b0 + c0
    two_ab = 2.0 * (al**2 + be**2)

    def bracket(msum: complex) -> complex:
        return 1j * msum * (lam2 - 1j * m1) - two_ab - lam2**2 - m1**2

    num2 = (2.0 * al * a0 * (1j * (m1 + m3) - lam2 - delta)
            + 2.0 * be * d0 * (1j * (m1 + m3) - lam2 + delta)
            + bracket(m1 + m3) * k0)
    num3 = (2.0 * al * a0 * (1j * (m1 + m2) - lam2 - delta)
            + 2.0 * be * d0 * (1j * (m1 + m2) - lam2 + delta)
            + bracket(m1 + m2) * k0)
    d2 = num2 / ((m1 - m2) * (m3 - m2))
    d3 = num3 / ((m1 - m3) * (m2 - m3))
    d1 = k0 - d2 - d3
    return np.array([d1, d2, d3], dtype=complex)


def solve_manifold(initial, params: ModelParams, n: int) -> ManifoldSolution:
    """Roots plus mode amplitudes for one manifold.

    Raises ``BranchSelectionError`` or ``DegenerateRootsError`` when the
    closed form is unavailable; the propagator then falls back to the oracle.
    """
    initial = np.asarray(initial, dtype=complex)
    roots = block_roots(params, n)
    deltas = block_deltas(roots, initial, params, n)
    return ManifoldSolution(
        couplings=BlockCouplings.from_params(params, n),
        roots=roots, deltas=deltas, initial=initial,
    )


def evolve_block(sol: ManifoldSolution, params: ModelParams, t) -> np.ndarray:
    """Closed-form coefficients of one manifold at ``t`` (scalar or array).

    Output shape is (4,) for scalar ``t`` and (4, len(t)) otherwise, in
    (A, B, C, D) order, interaction picture.
    """
    scalar = np.isscalar(t) or np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    a, b, c, d = backend.evolve_blocks(
        sol.roots.as_array[None, :], sol.deltas[None, :], sol.initial[None, :],
        np.array([sol.couplings.alpha_n]), np.array([sol.couplings.beta_n]),
        params.delta, params.lambda2, times,
    )
    out = np.vstack([a[0], b[0], c[0], d[0]])
    return out[:, 0] if scalar else out


class BlockCoefficients(NamedTuple):
    """Stacked coefficients on a time grid: (nmax + 1, nt) arrays plus frozen (4, nt)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    frozen: np.ndarray


class AnalyticPropagator:
    """Prepares every manifold of a product state once, then evaluates cheaply.

    Construction solves each manifold's cubic and mode amplitudes; evaluation
    at arbitrary time grids is a closed-form kernel call.  Manifolds whose
    closed form is unavailable (root collision or branch-selection failure)
    are evolved through the oracle's eigendecomposition instead; their
    indices are listed in ``degenerate_manifolds``.
    """

    def __init__(self, state0: StateVector, params: ModelParams):
        if state0.time_tag != 0.0:
            raise ConfigError("propagator construction expects a state tagged at time zero")
        self.state0 = state0
        self.params = params
        self.nmax = state0.nmax

        nm = self.nmax + 1
        self._init = np.column_stack([state0.A, state0.B, state0.C, state0.D])
        self._alpha = params.lambda1 * np.sqrt(np.arange(1, nm + 1, dtype=float))
        self._beta = params.lambda1 * np.sqrt(np.arange(2, nm + 2, dtype=float))
        self._roots = np.zeros((nm, 3), dtype=complex)
        self._deltas = np.zeros((nm, 3), dtype=complex)
        self._solutions: list[ManifoldSolution | None] = [None] * nm
        self._eig_fallback: dict[int, oracle.EigBlock] = {}

        for n in range(nm):
            try:
                sol = solve_manifold(self._init[n], params, n)
            except (BranchSelectionError, DegenerateRootsError):
                self._eig_fallback[n] = oracle.eig_block(params, n)
                continue
            self._solutions[n] = sol
            self._roots[n] = sol.roots.as_array
            self._deltas[n] = sol.deltas

    @property
    def degenerate_manifolds(self) -> tuple[int, ...]:
        return tuple(sorted(self._eig_fallback))

    def manifold_solution(self, n: int) -> ManifoldSolution:
        """Closed-form data of manifold ``n``; raises if it fell back to the oracle."""
        if not 0 <= n <= self.nmax:
            raise ConfigError(f"manifold index {n} outside [0, {self.nmax}]")
        sol = self._solutions[n]
        if sol is None:
            raise DegenerateRootsError(
                f"manifold {n} is served by the oracle fallback, no closed form held")
        return sol

    def coefficients_at(self, times) -> BlockCoefficients:
        """Evaluate all manifolds plus the frozen sector on a time grid."""
        times = np.ascontiguousarray(np.atleast_1d(times), dtype=float)
        if not np.all(np.isfinite(times)):
            raise ConfigError("evaluation times must be finite")
        a, b, c, d = backend.evolve_blocks(
            self._roots, self._deltas, self._init, self._alpha, self._beta,
            self.params.delta, self.params.lambda2, times,
        )
        for n, eig in self._eig_fallback.items():
            h0 = oracle.h0_diagonal(self.params, n)
            modes = eig.u.conj().T @ self._init[n]
            psi = eig.u @ (np.exp(-1j * np.outer(eig.w, times)) * modes[:, None])
            psi *= np.exp(1j * np.outer(h0, times))
            a[n], b[n], c[n], d[n] = psi
        frozen = oracle.evolve_frozen(self.params, self.state0.frozen, times)
        return BlockCoefficients(a=a, b=b, c=c, d=d, frozen=frozen)

    def state_at(self, t: float) -> StateVector:
        """Full state at a single time."""
        coeff = self.coefficients_at([float(t)])
        return StateVector(
            nmax=self.nmax, A=coeff.a[:, 0], B=coeff.b[:, 0], C=coeff.c[:, 0],
            D=coeff.d[:, 0], frozen=FrozenSector(*coeff.frozen[:, 0]),
            time_tag=float(t),
        )


_CACHE_LOCK = threading.Lock()
_CACHE_SIZE = 16
_PROPAGATORS: OrderedDict = OrderedDict()


def propagator_for(state0: StateVector, params: ModelParams) -> AnalyticPropagator:
    """Memoized propagator per (initial state, params); thread safe.

    The cache holds strong references, so an entry's key (the id of its
    state) cannot be reused while the entry lives.
    """
    key = (id(state0), params)
    with _CACHE_LOCK:
        prop = _PROPAGATORS.get(key)
        if prop is not None:
            _PROPAGATORS.move_to_end(key)
            return prop
        prop = AnalyticPropagator(state0, params)
        _PROPAGATORS[key] = prop
        while len(_PROPAGATORS) > _CACHE_SIZE:
            _PROPAGATORS.popitem(last=False)
        return prop


def evolve_state(state0: StateVector, params: ModelParams, t: float) -> StateVector:
    """Closed-form full-state propagation from time zero to ``t``."""
    if state0.time_tag != 0.0:
        raise ConfigError("evolution expects a state tagged at time zero")
    return propagator_for(state0, params).state_at(t)
