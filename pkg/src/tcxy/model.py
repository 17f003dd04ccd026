"""Model definition: parameters, qubit presets, coherent field, and state layout.

Two two-level systems share a single cavity mode.  Each system couples to the
mode with strength ``lambda1`` (rotating-wave photon exchange) and the two
systems exchange excitations directly with strength ``lambda2``.  The total
excitation number (photons plus half the population difference) is conserved,
so the state splits into four-dimensional manifolds labelled by the photon
number ``n`` seen from the doubly excited level, plus a small frozen sector at
the bottom of the spectrum.

Amplitude layout used throughout the package (``n = 0 .. nmax``):

    A[n] -> |e1 e2, n>      B[n] -> |e1 g2, n+1>
    C[n] -> |g1 e2, n+1>    D[n] -> |g1 g2, n+2>

plus the frozen sector |e1 g2, 0>, |g1 e2, 0>, |g1 g2, 0>, |g1 g2, 1> that no
manifold reaches.  All dynamical amplitudes are stored in the interaction
picture generated by the free Hamiltonian; populations are picture independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError, TcxyError

PRESET_NAMES = ("psi_e", "psi_b", "psi_s")


@dataclass(frozen=True)
class ModelParams:
    """Frequencies and couplings of the two-qubit / single-mode model.

    Parameters
    ----------
    omega : float
        Cavity mode angular frequency.
    omega0 : float
        Shared transition angular frequency of both two-level systems.
    lambda1 : float
        Qubit-field coupling (identical for both systems), >= 0.
    lambda2 : float
        Direct excitation-exchange coupling between the systems, >= 0.
    allow_free : bool
        Permit the trivial case lambda1 == lambda2 == 0.

    The detuning ``delta = omega0 - omega`` is derived, not supplied.
    Hbar is set to one, so frequencies and couplings share units.
    """

    omega: float
    omega0: float
    lambda1: float
    lambda2: float
    allow_free: bool = False
    delta: float = field(init=False, default=0.0)

    def __post_init__(self):
        for name in ("omega", "omega0", "lambda1", "lambda2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ConfigError("couplings are magnitudes and must be >= 0")
        if self.lambda1 == 0 and self.lambda2 == 0 and not self.allow_free:
            raise ConfigError(
                "lambda1 and lambda2 are both zero; pass allow_free=True "
                "if a free evolution is intended"
            )
        object.__setattr__(self, "delta", self.omega0 - self.omega)

    @classmethod
    def from_detuning(cls, delta=0.0, lambda1=1.0, lambda2=0.0, omega=1.0,
                      allow_free=False) -> "ModelParams":
        """Build params from the detuning instead of the bare frequencies."""
        return cls(omega=omega, omega0=omega + delta, lambda1=lambda1,
                   lambda2=lambda2, allow_free=allow_free)

    @property
    def coupling_ratio(self) -> float:
        """lambda2 / lambda1, +inf when only the direct exchange is on."""
        if self.lambda1 == 0:
            return math.inf
        return self.lambda2 / self.lambda1

    def alpha_n(self, n: int) -> float:
        """Field coupling of the upper transition inside manifold ``n``."""
        return self.lambda1 * math.sqrt(n + 1.0)

    def beta_n(self, n: int) -> float:
        """Field coupling of the lower transition inside manifold ``n``."""
        return self.lambda1 * math.sqrt(n + 2.0)

    def block_scale(self, n: int) -> float:
        """Frequency scale of manifold ``n``, used to set residual tolerances."""
        return max(1.0, self.beta_n(n), self.lambda2, abs(self.delta))


@dataclass(frozen=True)
class QubitInitState:
    """Normalized two-qubit amplitudes (a, b, c, d) on |ee>, |eg>, |ge>, |gg>."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm = abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > 1e-12:
            raise ConfigError(f"qubit amplitudes must be normalized, |psi|^2 = {norm!r}")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=complex)


_PRESETS = {
    "psi_e": (1.0, 0.0, 0.0, 0.0),
    "psi_b": (2.0 ** -0.5, 0.0, 0.0, 2.0 ** -0.5),
    "psi_s": (0.5, 0.5, 0.5, 0.5),
}


def preset(name: str) -> QubitInitState:
    """Return one of the named initial two-qubit states.

    ``psi_e``: both systems excited.  ``psi_b``: Bell-like superposition of
    |ee> and |gg>.  ``psi_s``: fully separable balanced superposition.
    """
    try:
        a, b, c, d = _PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    return QubitInitState(a, b, c, d)


@dataclass(frozen=True, eq=False)
class CoherentField:
    """Truncated coherent-state expansion of the cavity mode.

    ``weights[n]`` is the amplitude on the ``n``-photon Fock state; ``nmax``
    is the truncation index (count of retained Fock states minus one).
    """

    alpha: complex
    nbar: float
    nmax: int
    weights: np.ndarray

    def __post_init__(self):
        self.weights.setflags(write=False)


def coherent_weights(alpha, tail_tolerance: float = 1e-12) -> CoherentField:
    """Expand a coherent state |alpha> over Fock states with a bounded tail.

    Parameters
    ----------
    alpha : complex
        Coherent amplitude; mean photon number is |alpha|^2.
    tail_tolerance : float
        Maximum discarded probability, in (0, 1e-3].

    Returns
    -------
    CoherentField
        Weights computed in the log domain, truncated at the smaller of the
        minimal tail-compliant index and a safety floor, with underflowed
        trailing zeros dropped.
    """
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise ConfigError(f"alpha must be finite, got {alpha!r}")
    nbar = abs(alpha) ** 2
    if nbar > 1e4:
        raise ConfigError(f"mean photon number {nbar:g} exceeds the supported 1e4")
    if not (0.0 < tail_tolerance <= 1e-3):
        raise ConfigError("tail_tolerance must lie in (0, 1e-3]")

    if nbar == 0.0:
        weights = np.ones(1, dtype=complex)
        return CoherentField(alpha=alpha, nbar=0.0, nmax=0, weights=weights)

    # Safety floor keeps short grids honest even for loose tolerances.
    floor_n = int(math.ceil(nbar + 10.0 * math.sqrt(nbar) + 10.0))
    hi = floor_n
    while True:
        ns = np.arange(hi + 1, dtype=float)
        logp = ns * math.log(nbar) - gammaln(ns + 1.0) - nbar  # Poisson log-pmf
        pmf = np.exp(logp)
        cum = np.cumsum(pmf)
        if 1.0 - cum[-1] < tail_tolerance:
            break
        hi += max(16, hi // 4)
        if hi > 200000:
            raise ConfigError("coherent expansion did not meet the tail tolerance")
    k_tail = int(np.searchsorted(cum, 1.0 - tail_tolerance))
    nmax = max(k_tail, floor_n)
    nonzero = np.nonzero(pmf[: nmax + 1])[0]
    nmax = int(nonzero[-1])

    magnitude = np.exp(0.5 * logp[: nmax + 1])
    phase = np.exp(1j * np.angle(alpha) * np.arange(nmax + 1))
    weights = magnitude * phase

    captured = float(np.sum(magnitude**2))
    if 1.0 - captured >= tail_tolerance:
        raise TcxyError("tail bound violated after truncation")
    mean = float(np.sum(np.arange(nmax + 1) * magnitude**2))
    if abs(mean - nbar) > 1e-8 * max(nbar, 1.0):
        raise TcxyError("retained weights do not reproduce the mean photon number")
    return CoherentField(alpha=alpha, nbar=nbar, nmax=nmax, weights=weights)


@dataclass(frozen=True)
class FrozenSector:
    """Amplitudes outside every four-dimensional manifold.

    ``b_eg0``/``c_ge0`` sit on |e1 g2, 0> and |g1 e2, 0>, ``d_gg0``/``d_gg1``
    on |g1 g2, 0> and |g1 g2, 1>.  They exchange population only among
    themselves (the zero- and minus-one-excitation blocks).
    """

    b_eg0: complex = 0.0
    c_ge0: complex = 0.0
    d_gg0: complex = 0.0
    d_gg1: complex = 0.0

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.b_eg0, self.c_ge0, self.d_gg0, self.d_gg1], dtype=complex)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Interaction-picture amplitudes over all manifolds plus the frozen sector.

    Arrays ``A, B, C, D`` have length ``nmax + 1`` and follow the photon
    offsets documented in the module docstring.  ``time_tag`` records the
    evolution time at which the amplitudes are valid.
    """

    nmax: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    frozen: FrozenSector
    time_tag: float = 0.0

    def __post_init__(self):
        expected = self.nmax + 1
        for name in ("A", "B", "C", "D"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (expected,):
                raise ConfigError(f"{name} must have shape ({expected},), got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def norm(self) -> float:
        """Total squared amplitude, 1 minus the truncation tail for fresh states."""
        total = sum(float(np.sum(np.abs(arr) ** 2)) for arr in (self.A, self.B, self.C, self.D))
        return total + self.frozen.norm_squared()

    def excitation_expectation(self) -> float:
        """Expectation of the conserved excitation number."""
        ns = np.arange(self.nmax + 1, dtype=float)
        weights = (np.abs(self.A) ** 2 + np.abs(self.B) ** 2
                   + np.abs(self.C) ** 2 + np.abs(self.D) ** 2)
        total = float(np.sum((ns + 1.0) * weights))
        # |e g, 0>, |g e, 0>, |g g, 1> carry zero excitation; |g g, 0> carries -1.
        total -= abs(self.frozen.d_gg0) ** 2
        return total

    def photon_amplitudes(self) -> np.ndarray:
        """Dense (4, nmax + 3) composite amplitudes indexed by photon number.

        Row order |ee>, |eg>, |ge>, |gg>; column k is the k-photon component.
        Used by the dense partial-trace oracle and layout-sensitive tests.
        """
        k = self.nmax + 3
        dense = np.zeros((4, k), dtype=complex)
        dense[0, : self.nmax + 1] = self.A
        dense[1, 0] = self.frozen.b_eg0
        dense[1, 1 : self.nmax + 2] = self.B
        dense[2, 0] = self.frozen.c_ge0
        dense[2, 1 : self.nmax + 2] = self.C
        dense[3, 0] = self.frozen.d_gg0
        dense[3, 1] = self.frozen.d_gg1
        dense[3, 2 : self.nmax + 3] = self.D
        return dense


def initial_state(qubits: QubitInitState, field: CoherentField,
                  frozen_sector: bool = True) -> StateVector:
    """Product state (two-qubit amplitudes) x (coherent field) at time zero.

    ``frozen_sector=False`` drops the amplitudes outside the four-dimensional
    manifolds; the state then starts with a norm deficit of order
    ``|Q_0|^2 (|b|^2 + |c|^2 + |d|^2)`` and observables omit those terms.
    """
    q = field.weights
    nmax = field.nmax
    a, b, c, d = qubits.a, qubits.b, qubits.c, qubits.d

    A = q * a
    B = np.zeros(nmax + 1, dtype=complex)
    C = np.zeros(nmax + 1, dtype=complex)
    D = np.zeros(nmax + 1, dtype=complex)
    B[:nmax] = q[1:] * b
    C[:nmax] = q[1:] * c
    if nmax >= 2:
        D[: nmax - 1] = q[2:] * d

    if frozen_sector:
        frozen = FrozenSector(
            b_eg0=q[0] * b,
            c_ge0=q[0] * c,
            d_gg0=q[0] * d,
            d_gg1=(q[1] * d) if nmax >= 1 else 0.0,
        )
    else:
        frozen = FrozenSector()
    return StateVector(nmax=nmax, A=A, B=B, C=C, D=D, frozen=frozen, time_tag=0.0)
