"""Characteristic cubic of the symmetric exchange channel.

Inside manifold ``n`` the combination K = B + C of the singly excited
amplitudes obeys a third-order linear ODE with constant coefficients.  Its
characteristic polynomial is a cubic whose three roots are purely imaginary
for any physical parameter set (the underlying generator is Hermitian).  The
roots are obtained in closed form; the cube-root branch pair is selected by
enumerating all nine combinations and filtering on the polynomial residual
and on the vanishing real part.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import BranchSelectionError
from .model import ModelParams

# Primitive cube roots of unity, used to enumerate branch pairings.
_W1 = complex(-0.5, 0.5 * np.sqrt(3.0))
_W2 = complex(-0.5, -0.5 * np.sqrt(3.0))
_CUBE_PHASES = (1.0 + 0.0j, _W1, _W2)

RESIDUAL_TOL = 1e-10
REALPART_TOL = 1e-9
SEPARATION_TOL = 1e-6


@dataclass(frozen=True)
class CubicRoots:
    """Roots of one manifold cubic plus the intermediates that produced them.

    ``m`` holds the three roots sorted by descending imaginary part (ties by
    descending real part).  ``v1``/``v2`` are the selected cube roots, ``mu``
    and ``eta`` the depressed-cubic constant and linear coefficients, and
    ``branch_id`` identifies the chosen pairing (3 * k1 + k2).
    """

    m: tuple[complex, complex, complex]
    v1: complex
    v2: complex
    mu: complex
    eta: float
    branch_id: int

    @property
    def m1(self) -> complex:
        return self.m[0]

    @property
    def m2(self) -> complex:
        return self.m[1]

    @property
    def m3(self) -> complex:
        return self.m[2]

    @property
    def as_array(self) -> np.ndarray:
        return np.array(self.m, dtype=complex)


def characteristic_coeffs(params: ModelParams, n: int) -> tuple[complex, complex, complex]:
    """Coefficients (c2, c1, c0) of m^3 + c2 m^2 + c1 m + c0 for manifold ``n``."""
    a2 = params.alpha_n(n) ** 2
    b2 = params.beta_n(n) ** 2
    delta = params.delta
    lam2 = params.lambda2
    c2 = 1j * lam2
    c1 = 2.0 * (a2 + b2) + delta**2
    c0 = -1j * (2.0 * delta * (a2 - b2) - lam2 * delta**2)
    return c2, c1, c0


def polynomial_residual(m, coeffs) -> float:
    """Max |P(m_j)| over the supplied roots."""
    c2, c1, c0 = coeffs
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(((m + c2) * m + c1) * m + c0)))


def _cube_root(z: complex) -> complex:
    if z == 0:
        return 0.0 + 0.0j
    return z ** (1.0 / 3.0)


def block_roots(params: ModelParams, n: int,
                residual_tol: float = RESIDUAL_TOL,
                realpart_tol: float = REALPART_TOL) -> CubicRoots:
    """Closed-form roots of the manifold-``n`` characteristic cubic.

    All nine cube-root pairings are formed; a pairing is admissible when its
    polynomial residual stays below ``residual_tol`` times the cubed manifold
    frequency scale and every root's real part stays below ``realpart_tol``
    times that scale.  The minimum-residual admissible pairing wins (first on
    ties, so the selection is deterministic).

    Raises
    ------
    BranchSelectionError
        If no pairing is admissible; callers fall back to the numeric oracle.
    """
    a2 = params.alpha_n(n) ** 2
    b2 = params.beta_n(n) ** 2
    delta = params.delta
    lam2 = params.lambda2
    coeffs = characteristic_coeffs(params, n)
    scale = params.block_scale(n)

    eta = (6.0 * (a2 + b2) + 3.0 * delta**2 + lam2**2) / 3.0
    mu = -1j * (2.0 * lam2**3 + 18.0 * lam2 * (a2 + b2 - delta**2)
                + 54.0 * delta * (a2 - b2)) / 27.0

    disc = mu * mu / 4.0 + eta**3 / 27.0
    s = np.sqrt(complex(disc))
    v1_base = _cube_root(-mu / 2.0 + s)
    v2_base = _cube_root(-mu / 2.0 - s)
    shift = -1j * lam2 / 3.0

    best = None
    for k1, p1 in enumerate(_CUBE_PHASES):
        v1 = v1_base * p1
        for k2, p2 in enumerate(_CUBE_PHASES):
            v2 = v2_base * p2
            half = -0.5 * (v1 + v2)
            wing = 0.5j * np.sqrt(3.0) * (v1 - v2)
            roots = ((v1 + v2) + shift, half + wing + shift, half - wing + shift)
            residual = polynomial_residual(roots, coeffs)
            realpart = max(abs(r.real) for r in roots)
            if residual <= residual_tol * scale**3 and realpart <= realpart_tol * scale:
                if best is None or residual < best[0]:
                    best = (residual, 3 * k1 + k2, v1, v2, roots)
    if best is None:
        raise BranchSelectionError(
            f"no admissible cube-root pairing for manifold {n} "
            f"(lambda1={params.lambda1}, lambda2={params.lambda2}, delta={delta})"
        )
    _, branch_id, v1, v2, roots = best
    ordered = tuple(sorted(roots, key=lambda r: (-r.imag, -r.real)))
    return CubicRoots(m=ordered, v1=v1, v2=v2, mu=mu, eta=float(eta),
                      branch_id=branch_id)


def companion_roots(params: ModelParams, n: int) -> np.ndarray:
    """Roots via the companion-matrix eigenproblem; redundant cross-check."""
    c2, c1, c0 = characteristic_coeffs(params, n)
    roots = np.roots([1.0, c2, c1, c0])
    return np.array(sorted(roots, key=lambda r: (-r.imag, -r.real)))


def min_separation(roots) -> float:
    """Smallest pairwise distance among a root triple (CubicRoots or iterable)."""
    triple = roots.m if isinstance(roots, CubicRoots) else roots
    return min(abs(x - y) for x, y in combinations(triple, 2))


def is_degenerate(roots: CubicRoots, scale: float,
                  separation_tol: float = SEPARATION_TOL) -> bool:
    """True when a root collision makes the mode-amplitude system unreliable."""
    return min_separation(roots) < separation_tol * scale


def vieta_residuals(roots: CubicRoots, params: ModelParams, n: int) -> tuple[float, float, float]:
    """Absolute defects of the three symmetric-function identities."""
    c2, c1, c0 = characteristic_coeffs(params, n)
    m1, m2, m3 = roots.m
    r_sum = abs(m1 + m2 + m3 + c2)
    r_pair = abs(m1 * m2 + m1 * m3 + m2 * m3 - c1)
    r_prod = abs(m1 * m2 * m3 + c0)
    return r_sum, r_pair, r_prod
