"""Pure NumPy kernels: reference implementation of the compiled extension.

Both backends expose the same two entry points with identical semantics:

``evolve_blocks``
    Closed-form interaction-picture coefficients of every manifold on a time
    grid, given the per-manifold cubic roots and mode amplitudes.

``rdm_series``
    Photon-number-matched reduced density matrices of the two-qubit
    subsystem on the same grid.

The growth factor (e^{x t} - 1) / x is evaluated through sinh of the half
argument, which removes the subtractive cancellation at small |x t| without
a separate truncated series regime; the remaining small-argument branch only
guards the removable singularity of sinh(z)/z.
"""

from __future__ import annotations

import numpy as np

_TIME_CHUNK = 1024


def _growth_chunk(x, tt, ext):
    """(e^{x t} - 1) / x for x of shape (nm, 3) and tt of shape (ntc,)."""
    z = 0.5 * x[:, :, None] * tt
    az = np.abs(z)
    small = az < 0.25
    tiny = az < 1e-4
    z_safe = np.where(tiny, 1.0, z)
    ratio = np.where(tiny, 1.0 + z * z / 6.0, np.sinh(z_safe) / z_safe)
    sinh_form = tt * np.exp(z) * ratio
    x_safe = np.where(np.abs(x) == 0.0, 1.0, x)[:, :, None]
    with np.errstate(invalid="ignore", over="ignore"):
        direct = (ext - 1.0) / x_safe
    return np.where(small, sinh_form, direct)


def evolve_blocks(roots, deltas, init, alpha, beta, detuning, lam2, times):
    """Evaluate every manifold's coefficients on a time grid.

    Parameters
    ----------
    roots, deltas : (nm, 3) complex
        Cubic roots and mode amplitudes of the symmetric channel, per manifold.
    init : (nm, 4) complex
        Initial (A, B, C, D) of each manifold.
    alpha, beta : (nm,) float
        Field couplings of the upper and lower transitions.
    detuning, lam2 : float
        Detuning and direct exchange coupling.
    times : (nt,) float
        Evaluation times.

    Returns
    -------
    (A, B, C, D) : four (nm, nt) complex arrays.
    """
    roots = np.ascontiguousarray(roots, dtype=complex)
    deltas = np.ascontiguousarray(deltas, dtype=complex)
    init = np.ascontiguousarray(init, dtype=complex)
    times = np.ascontiguousarray(times, dtype=float)
    nm, nt = roots.shape[0], times.shape[0]
    out_a = np.empty((nm, nt), dtype=complex)
    out_b = np.empty((nm, nt), dtype=complex)
    out_c = np.empty((nm, nt), dtype=complex)
    out_d = np.empty((nm, nt), dtype=complex)

    x_a = roots + 1j * detuning
    x_d = roots - 1j * detuning
    a0 = init[:, 0][:, None]
    d0 = init[:, 3][:, None]
    bc0 = (init[:, 1] - init[:, 2])[:, None]
    al = np.asarray(alpha, dtype=float)[:, None]
    be = np.asarray(beta, dtype=float)[:, None]

    for start in range(0, nt, _TIME_CHUNK):
        sl = slice(start, min(start + _TIME_CHUNK, nt))
        tt = times[sl]
        emt = np.exp(roots[:, :, None] * tt)
        k_sum = np.einsum("nj,njt->nt", deltas, emt)
        pha = np.exp(1j * detuning * tt)
        g_a = _growth_chunk(x_a, tt, emt * pha)
        g_d = _growth_chunk(x_d, tt, emt * pha.conj())
        f_a = np.einsum("nj,njt->nt", deltas, g_a)
        f_d = np.einsum("nj,njt->nt", deltas, g_d)
        el2 = np.exp(1j * lam2 * tt)
        out_a[:, sl] = a0 - 1j * al * f_a
        out_d[:, sl] = d0 - 1j * be * f_d
        out_b[:, sl] = 0.5 * (bc0 * el2 + k_sum)
        out_c[:, sl] = 0.5 * (-bc0 * el2 + k_sum)
    return out_a, out_b, out_c, out_d


def rdm_series(a, b, c, d, frozen):
    """Two-qubit reduced density matrices on a time grid.

    Parameters
    ----------
    a, b, c, d : (nm, nt) complex
        Manifold coefficients (photon offsets 0, +1, +1, +2 respectively).
    frozen : (4, nt) complex
        Frozen-sector amplitudes (b_eg0, c_ge0, d_gg0, d_gg1).

    Returns
    -------
    rho : (nt, 4, 4) complex
        Hermitian reduced density matrices in the |ee>, |eg>, |ge>, |gg> basis,
        one per time, traced over the field with matched photon numbers.
    """
    nm = a.shape[0]
    b0, c0, d0, d1 = frozen[0], frozen[1], frozen[2], frozen[3]

    r11 = np.sum(np.abs(a) ** 2, axis=0)
    r22 = np.sum(np.abs(b) ** 2, axis=0) + np.abs(b0) ** 2
    r33 = np.sum(np.abs(c) ** 2, axis=0) + np.abs(c0) ** 2
    r44 = np.sum(np.abs(d) ** 2, axis=0) + np.abs(d0) ** 2 + np.abs(d1) ** 2

    r12 = np.sum(a[1:] * b[: nm - 1].conj(), axis=0) + a[0] * b0.conj()
    r13 = np.sum(a[1:] * c[: nm - 1].conj(), axis=0) + a[0] * c0.conj()
    r14 = np.sum(a[2:] * d[: nm - 2].conj(), axis=0) + a[0] * d0.conj()
    if nm >= 2:
        r14 = r14 + a[1] * d1.conj()
    r23 = np.sum(b * c.conj(), axis=0) + b0 * c0.conj()
    r24 = np.sum(b[1:] * d[: nm - 1].conj(), axis=0) + b0 * d0.conj() + b[0] * d1.conj()
    r34 = np.sum(c[1:] * d[: nm - 1].conj(), axis=0) + c0 * d0.conj() + c[0] * d1.conj()

    nt = a.shape[1]
    rho = np.empty((nt, 4, 4), dtype=complex)
    rho[:, 0, 0] = r11
    rho[:, 1, 1] = r22
    rho[:, 2, 2] = r33
    rho[:, 3, 3] = r44
    rho[:, 0, 1] = r12
    rho[:, 0, 2] = r13
    rho[:, 0, 3] = r14
    rho[:, 1, 2] = r23
    rho[:, 1, 3] = r24
    rho[:, 2, 3] = r34
    rho[:, 1, 0] = r12.conj()
    rho[:, 2, 0] = r13.conj()
    rho[:, 3, 0] = r14.conj()
    rho[:, 2, 1] = r23.conj()
    rho[:, 3, 1] = r24.conj()
    rho[:, 3, 2] = r34.conj()
    return rho
