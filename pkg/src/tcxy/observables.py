"""Observables: reduced density matrices, inversion, and entanglement measures.

The two-qubit reduced density matrix traces the field out by matching photon
numbers across the four qubit levels; amplitudes whose photon numbers differ
contribute nothing.  The frozen sector enters the same sums at photon numbers
zero and one.  Entanglement is quantified by the spin-flip concurrence and
the entanglement of formation derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ConfigError, NumericalDegradationError
from .model import StateVector

TRACE_TOL = 1e-10
HERM_TOL = 1e-12
EIG_FLOOR = -1e-10
IMAG_RESIDUE_TOL = 1e-8
PURITY_TOL = 1e-13

# sigma_y (x) sigma_y, the two-qubit spin-flip operator.
_SY2 = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=complex)


@dataclass(frozen=True)
class TwoQubitDensity:
    """Validated 4x4 reduced density matrix on |ee>, |eg>, |ge>, |gg>.

    The trace equals the squared norm of the underlying state (unit for full
    states, short by the truncation tail or a dropped frozen sector
    otherwise).
    """

    rho: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.rho, dtype=complex)
        if arr.shape != (4, 4):
            raise ConfigError(f"density matrix must be 4x4, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "rho", arr)

    @property
    def trace(self) -> float:
        return float(self.rho.trace().real)


@dataclass(frozen=True)
class EntanglementResult:
    """Spin-flip spectrum and the two derived entanglement measures."""

    concurrence: float
    eof: float
    eps: np.ndarray


def _validate_density(rho: np.ndarray, expected_trace: float) -> None:
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERM_TOL:
        raise NumericalDegradationError(f"density hermiticity defect {herm:.3e}")
    trace_defect = abs(rho.trace().real - expected_trace)
    if trace_defect > TRACE_TOL:
        raise NumericalDegradationError(f"density trace defect {trace_defect:.3e}")
    low = float(np.min(np.linalg.eigvalsh(rho)))
    if low < EIG_FLOOR:
        raise NumericalDegradationError(f"density eigenvalue {low:.3e} below floor")


def qubits_rdm(state: StateVector, validate: bool = True) -> TwoQubitDensity:
    """Two-qubit reduced density matrix with photon-number-matched sums."""
    rho = backend.rdm_series(
        state.A[:, None], state.B[:, None], state.C[:, None], state.D[:, None],
        state.frozen.amplitudes[:, None],
    )[0]
    if validate:
        _validate_density(rho, state.norm())
    return TwoQubitDensity(rho=rho)


def dense_qubits_rdm(state: StateVector) -> np.ndarray:
    """Independent dense partial trace over the composite photon basis.

    Builds the full (4, photon) amplitude table and contracts the photon
    index; used as an oracle for :func:`qubits_rdm`.
    """
    psi = state.photon_amplitudes()
    return psi @ psi.conj().T


def single_rdm(state: StateVector, system: int = 1) -> np.ndarray:
    """2x2 reduced density matrix of one qubit (system 1 or 2)."""
    rho = qubits_rdm(state, validate=False).rho
    if system == 1:
        return np.array([
            [rho[0, 0] + rho[1, 1], rho[0, 2] + rho[1, 3]],
            [rho[2, 0] + rho[3, 1], rho[2, 2] + rho[3, 3]],
        ])
    if system == 2:
        return np.array([
            [rho[0, 0] + rho[2, 2], rho[0, 1] + rho[2, 3]],
            [rho[1, 0] + rho[3, 2], rho[1, 1] + rho[3, 3]],
        ])
    raise ConfigError(f"system must be 1 or 2, got {system!r}")


def inversion(state: StateVector, system: int = 1) -> float:
    """Population inversion <sigma_z> of one qubit."""
    r = single_rdm(state, system)
    return float((r[0, 0] - r[1, 1]).real)


def inversion_series(rho: np.ndarray, system: int = 1) -> np.ndarray:
    """Inversion along a (nt, 4, 4) density series."""
    if system == 1:
        return (rho[:, 0, 0] + rho[:, 1, 1] - rho[:, 2, 2] - rho[:, 3, 3]).real
    if system == 2:
        return (rho[:, 0, 0] + rho[:, 2, 2] - rho[:, 1, 1] - rho[:, 3, 3]).real
    raise ConfigError(f"system must be 1 or 2, got {system!r}")


def _pure_eps(rho: np.ndarray) -> np.ndarray:
    """Spin-flip spectrum of (effectively) rank-1 matrices: one nonzero entry.

    For a projector the generic eigenvalue path squares then square-roots,
    turning O(1e-16) eigenvalue noise into O(1e-8) spectrum noise; reading
    the dominant eigenvector instead keeps full precision at the pure limit.
    """
    w, v = np.linalg.eigh(rho)
    top = v[..., :, -1]
    c = 2.0 * np.abs(top[..., 0] * top[..., 3] - top[..., 1] * top[..., 2])
    eps = np.zeros(rho.shape[:-2] + (4,))
    eps[..., 0] = c * w[..., -1]
    return eps


def _generic_eps(rho: np.ndarray) -> np.ndarray:
    tilde = _SY2 @ rho.conj() @ _SY2
    ev = np.linalg.eigvals(rho @ tilde)
    imag = float(np.max(np.abs(ev.imag)))
    if imag > IMAG_RESIDUE_TOL:
        raise NumericalDegradationError(
            f"spin-flip spectrum imaginary residue {imag:.3e}")
    re = ev.real
    low = float(re.min())
    if low < -IMAG_RESIDUE_TOL:
        raise NumericalDegradationError(
            f"spin-flip spectrum negative residue {low:.3e}")
    # abs() instead of clipping avoids sqrt of the tiny negatives left over.
    eps = np.sqrt(np.abs(re))
    eps.sort(axis=-1)
    return eps[..., ::-1]


def _spin_flip_eps(rho: np.ndarray) -> np.ndarray:
    """Descending square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy)."""
    stacked = rho if rho.ndim == 3 else rho[None]
    herm = float(np.max(np.abs(stacked - stacked.conj().transpose(0, 2, 1))))
    if herm > HERM_TOL:
        raise NumericalDegradationError(
            f"spin-flip input hermiticity residue {herm:.3e}")
    trace = np.einsum("tii->t", stacked).real
    purity = np.einsum("tij,tji->t", stacked, stacked).real
    pure = (trace**2 - purity) <= PURITY_TOL * np.maximum(trace, 1e-300) ** 2
    eps = np.empty((stacked.shape[0], 4))
    if pure.any():
        eps[pure] = _pure_eps(stacked[pure])
    if not pure.all():
        eps[~pure] = _generic_eps(stacked[~pure])
    return eps if rho.ndim == 3 else eps[0]


def concurrence(rho) -> EntanglementResult:
    """Wootters concurrence of a two-qubit density matrix."""
    mat = rho.rho if isinstance(rho, TwoQubitDensity) else np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise ConfigError(f"density matrix must be 4x4, got {mat.shape}")
    eps = _spin_flip_eps(mat)
    c = max(0.0, float(eps[0] - eps[1] - eps[2] - eps[3]))
    return EntanglementResult(concurrence=c, eof=eof(c), eps=eps)


def concurrence_series(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Concurrence along a (nt, 4, 4) density series; returns (c, eps)."""
    eps = _spin_flip_eps(np.asarray(rho, dtype=complex))
    c = np.maximum(0.0, eps[:, 0] - eps[:, 1] - eps[:, 2] - eps[:, 3])
    return c, eps


def eof(c) -> float | np.ndarray:
    """Entanglement of formation from the concurrence.

    Accepts a scalar or an array; the binary entropy is continuously
    extended with h(0) = h(1) = 0.
    """
    c_arr = np.asarray(c, dtype=float)
    if np.any(c_arr < -1e-12) or np.any(c_arr > 1.0 + 1e-12):
        raise ConfigError("concurrence must lie in [0, 1]")
    c_arr = np.clip(c_arr, 0.0, 1.0)
    x = 0.5 * (1.0 + np.sqrt(1.0 - c_arr**2))
    inner = x < 1.0  # x >= 0.5 always; only the upper edge needs guarding
    x_safe = np.where(inner, x, 0.5)
    with np.errstate(invalid="ignore"):
        h = -(x_safe * np.log2(x_safe) + (1.0 - x_safe) * np.log2(1.0 - x_safe))
    out = np.where(inner, h, 0.0)
    if np.isscalar(c) or np.ndim(c) == 0:
        return float(out)
    return out


def validate_density_series(rho: np.ndarray, expected_trace) -> None:
    """Series analogue of the single-matrix density checks."""
    trace = np.einsum("tii->t", rho).real
    defect = float(np.max(np.abs(trace - expected_trace)))
    if defect > TRACE_TOL:
        raise NumericalDegradationError(f"density series trace defect {defect:.3e}")
    low = float(np.min(np.linalg.eigvalsh(rho)))
    if low < EIG_FLOOR:
        raise NumericalDegradationError(f"density series eigenvalue {low:.3e} below floor")
