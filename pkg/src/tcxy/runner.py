"""Trajectory and sweep drivers, revival detection, and the verification grid.

A run evaluates one parameter set on a scaled-time grid tau = coupling * t
and produces observable columns; a sweep repeats a base run across one
parameter axis with per-value failure isolation.  The canned figure catalog
reproduces the datasets behind the reference plots.
"""

from __future__ import annotations

import math
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from . import __version__, backend, observables, oracle
from .analytic import AnalyticPropagator
from .cubic import polynomial_residual, characteristic_coeffs, vieta_residuals
from .errors import ConfigError, TcxyError
from .model import (ModelParams, QubitInitState, coherent_weights,
                    initial_state, preset)

OBSERVABLE_NAMES = ("inversion", "inversion2", "concurrence", "eof", "norm", "nexp")


@dataclass(frozen=True)
class RunConfig:
    """Full description of one trajectory computation.

    ``tau_max`` and the grid are in scaled time tau = coupling * t, where the
    coupling is chosen by ``time_scale`` (``lambda1``, ``lambda2``, or None
    for automatic: lambda1 unless it vanishes).
    """

    qubits: QubitInitState
    nbar: float
    lambda1: float
    lambda2: float
    delta: float = 0.0
    omega: float = 1.0
    tau_max: float = 25.0
    points: int = 4096
    time_scale: Optional[str] = None
    observables: tuple[str, ...] = ("inversion", "concurrence", "eof")
    oracle_check: bool = False
    tail_tolerance: float = 1e-12
    frozen_sector: bool = True
    params: ModelParams = field(init=False)

    def __post_init__(self):
        if isinstance(self.qubits, str):
            object.__setattr__(self, "qubits", preset(self.qubits))
        elif not isinstance(self.qubits, QubitInitState):
            raise ConfigError(
                f"qubits must be a QubitInitState or preset name, got {type(self.qubits).__name__}")
        if not (math.isfinite(self.tau_max) and self.tau_max > 0):
            raise ConfigError(f"tau_max must be positive and finite, got {self.tau_max!r}")
        if not isinstance(self.points, int) or self.points < 2:
            raise ConfigError(f"points must be an integer >= 2, got {self.points!r}")
        if not (0.0 <= self.nbar <= 1e4):
            raise ConfigError(f"nbar must lie in [0, 1e4], got {self.nbar!r}")
        obs = tuple(self.observables)
        if not obs:
            raise ConfigError("at least one observable is required")
        unknown = [o for o in obs if o not in OBSERVABLE_NAMES]
        if unknown:
            raise ConfigError(f"unknown observables {unknown}; choose from {OBSERVABLE_NAMES}")
        if len(set(obs)) != len(obs):
            raise ConfigError("observables must not repeat")
        object.__setattr__(self, "observables", obs)
        if self.time_scale not in (None, "lambda1", "lambda2"):
            raise ConfigError(f"time_scale must be lambda1 or lambda2, got {self.time_scale!r}")
        params = ModelParams.from_detuning(
            delta=self.delta, lambda1=self.lambda1, lambda2=self.lambda2,
            omega=self.omega)
        object.__setattr__(self, "params", params)
        if self.scale_coupling() == 0.0:
            raise ConfigError(
                f"time scale {self.resolved_time_scale()!r} refers to a vanishing coupling")

    def resolved_time_scale(self) -> str:
        if self.time_scale is not None:
            return self.time_scale
        return "lambda1" if self.lambda1 != 0.0 else "lambda2"

    def scale_coupling(self) -> float:
        return getattr(self.params, self.resolved_time_scale())

    def taus(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.points)

    def times(self) -> np.ndarray:
        return self.taus() / self.scale_coupling()

    def to_dict(self) -> dict:
        q = self.qubits
        return {
            "qubits": [[z.real, z.imag] for z in (q.a, q.b, q.c, q.d)],
            "nbar": self.nbar,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "delta": self.delta,
            "omega": self.omega,
            "tau_max": self.tau_max,
            "points": self.points,
            "time_scale": self.resolved_time_scale(),
            "observables": list(self.observables),
            "oracle_check": self.oracle_check,
            "tail_tolerance": self.tail_tolerance,
            "frozen_sector": self.frozen_sector,
        }


@dataclass(frozen=True)
class TrajectoryResult:
    """Scaled-time grid, observable columns in request order, and run metadata."""

    taus: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict


def _norm_series(coeff) -> np.ndarray:
    total = (np.abs(coeff.a) ** 2 + np.abs(coeff.b) ** 2
             + np.abs(coeff.c) ** 2 + np.abs(coeff.d) ** 2).sum(axis=0)
    return total + (np.abs(coeff.frozen) ** 2).sum(axis=0)


def _nexp_series(coeff) -> np.ndarray:
    nm = coeff.a.shape[0]
    weights = (np.abs(coeff.a) ** 2 + np.abs(coeff.b) ** 2
               + np.abs(coeff.c) ** 2 + np.abs(coeff.d) ** 2)
    total = (np.arange(1, nm + 1, dtype=float)[:, None] * weights).sum(axis=0)
    return total - np.abs(coeff.frozen[2]) ** 2


def run_trajectory(cfg: RunConfig) -> TrajectoryResult:
    """Evaluate one configuration over its scaled-time grid."""
    field_state = coherent_weights(math.sqrt(cfg.nbar), cfg.tail_tolerance)
    state0 = initial_state(cfg.qubits, field_state, cfg.frozen_sector)
    prop = AnalyticPropagator(state0, cfg.params)
    times = cfg.times()
    coeff = prop.coefficients_at(times)

    needs_rho = bool({"inversion", "inversion2", "concurrence", "eof"}
                     & set(cfg.observables))
    rho = None
    conc = None
    if needs_rho:
        rho = backend.rdm_series(coeff.a, coeff.b, coeff.c, coeff.d, coeff.frozen)
        observables.validate_density_series(rho, state0.norm())
    if {"concurrence", "eof"} & set(cfg.observables):
        conc, _ = observables.concurrence_series(rho)

    columns: dict[str, np.ndarray] = {}
    for name in cfg.observables:
        if name == "inversion":
            columns[name] = observables.inversion_series(rho, system=1)
        elif name == "inversion2":
            columns[name] = observables.inversion_series(rho, system=2)
        elif name == "concurrence":
            columns[name] = conc
        elif name == "eof":
            columns[name] = observables.eof(conc)
        elif name == "norm":
            columns[name] = _norm_series(coeff)
        elif name == "nexp":
            columns[name] = _nexp_series(coeff)
    if cfg.oracle_check:
        ea, eb, ec, ed, ef = oracle.coefficients_exact(state0, cfg.params, times)
        dev = np.zeros(times.size)
        for ours, ref in ((coeff.a, ea), (coeff.b, eb), (coeff.c, ec),
                          (coeff.d, ed), (coeff.frozen, ef)):
            dev = np.maximum(dev, np.abs(ours - ref).max(axis=0))
        columns["oracle_dev"] = dev

    metadata = {
        "generator": "tcxy",
        "version": __version__,
        "backend": backend.BACKEND_NAME,
        "config": cfg.to_dict(),
        "nmax": state0.nmax,
        "degenerate_manifolds": list(prop.degenerate_manifolds),
        "initial_norm": state0.norm(),
    }
    return TrajectoryResult(taus=cfg.taus(), columns=columns, metadata=metadata)


@dataclass(frozen=True)
class SweepEntry:
    """One axis value with either its trajectory or the error that stopped it."""

    value: float
    result: Optional[TrajectoryResult]
    error: Optional[str]


@dataclass(frozen=True)
class SweepResult:
    axis: str
    entries: tuple[SweepEntry, ...]
    metadata: dict


SWEEP_AXES = ("lambda1", "lambda2", "delta", "nbar")


def run_sweep(cfg: RunConfig, axis: str, values, threads: int = 1) -> SweepResult:
    """Repeat ``cfg`` across one parameter axis.

    Failures of individual values are isolated: the entry records the error
    message and the sweep continues.  With ``threads > 1`` trajectories run
    in a thread pool; assembly order (and therefore output) is unchanged.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    values = [float(v) for v in values]
    if not values:
        raise ConfigError("sweep needs at least one axis value")
    if not all(math.isfinite(v) for v in values):
        raise ConfigError("sweep values must be finite")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads!r}")

    def one(value: float) -> SweepEntry:
        try:
            sub = replace(cfg, **{axis: value})
            return SweepEntry(value=value, result=run_trajectory(sub), error=None)
        except TcxyError as exc:
            return SweepEntry(value=value, result=None, error=str(exc))

    if threads == 1:
        entries = [one(v) for v in values]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(one, values))
    metadata = {
        "generator": "tcxy",
        "version": __version__,
        "backend": backend.BACKEND_NAME,
        "axis": axis,
        "values": values,
        "base_config": cfg.to_dict(),
    }
    return SweepResult(axis=axis, entries=tuple(entries), metadata=metadata)


@dataclass(frozen=True)
class ActiveWindow:
    """One activity burst: grid span plus summary statistics."""

    start: float
    end: float
    start_index: int
    end_index: int
    mean: float
    amplitude: float
    peak: float


@dataclass(frozen=True)
class RevivalReport:
    """Collapse plateau and activity bursts of an oscillating series."""

    plateau: float
    mad: float
    threshold: float
    windows: tuple[ActiveWindow, ...]
    smooth_length: int

    @property
    def onsets(self) -> tuple[float, ...]:
        return tuple(w.start for w in self.windows)

    @property
    def revival_onset(self) -> Optional[float]:
        """Start of the first burst that does not touch the grid origin."""
        for w in self.windows:
            if w.start_index > self.smooth_length:
                return w.start
        return None


def detect_revival(taus, values, k: float = 10.0, hysteresis: float = 0.5,
                   quiet_fraction: float = 0.1) -> RevivalReport:
    """Locate collapse plateaus and revival bursts in an observable series.

    The plateau is the median over low-local-amplitude (quiet) samples; a
    burst is entered when the locally dilated deviation from the plateau
    exceeds ``k`` median absolute deviations and left below ``hysteresis * k``
    of them.  Onsets are refined to the first raw crossing inside each burst,
    so a synthetic burst is located within one grid step.
    """
    taus = np.asarray(taus, dtype=float)
    values = np.asarray(values, dtype=float)
    if taus.shape != values.shape or taus.ndim != 1:
        raise ConfigError("taus and values must be 1-d arrays of equal length")
    n = taus.size
    if n < 64:
        raise ConfigError(f"revival detection needs at least 64 samples, got {n}")
    if not (k > 0 and 0 < hysteresis <= 1):
        raise ConfigError("need k > 0 and hysteresis in (0, 1]")

    w = max(5, n // 128)
    span = float(values.max() - values.min())
    if span == 0.0:
        return RevivalReport(plateau=float(values[0]), mad=0.0, threshold=0.0,
                             windows=(), smooth_length=w)

    local_amp = (maximum_filter1d(values, w, mode="nearest")
                 - minimum_filter1d(values, w, mode="nearest"))
    quiet = local_amp <= quiet_fraction * span
    base = values[quiet] if np.any(quiet) else values
    plateau = float(np.median(base))
    mad = float(np.median(np.abs(base - plateau)))

    dev = np.abs(values - plateau)
    act = maximum_filter1d(dev, w, mode="nearest")
    floor = 1e-12 + 1e-9 * span  # keeps thresholds positive on exact plateaus
    thr_on = k * mad + floor
    thr_off = hysteresis * k * mad + floor

    windows = []
    active = False
    start_idx = 0
    for i in range(n):
        if not active and act[i] > thr_on:
            active = True
            start_idx = i
        elif active and act[i] < thr_off:
            windows.append((start_idx, i - 1))
            active = False
    if active:
        windows.append((start_idx, n - 1))

    refined = []
    for i0, i1 in windows:
        raw = np.nonzero(dev[i0:i1 + 1] > thr_on)[0]
        j0 = i0 + int(raw[0]) if raw.size else i0
        seg = values[i0:i1 + 1]
        refined.append(ActiveWindow(
            start=float(taus[j0]), end=float(taus[i1]),
            start_index=j0, end_index=i1,
            mean=float(seg.mean()),
            amplitude=float(seg.max() - seg.min()),
            peak=float(seg.max()),
        ))
    return RevivalReport(plateau=plateau, mad=mad, threshold=thr_on,
                         windows=tuple(refined), smooth_length=w)


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of the oracle-equivalence and conservation grid."""

    configs: int
    manifolds: int
    max_coeff_dev: float
    max_norm_drift: float
    max_nexp_drift: float
    max_vieta: float
    max_charpoly: float
    elapsed: float
    coeff_tol: float = 1e-8
    norm_tol: float = 1e-10
    nexp_tol: float = 1e-9
    root_tol: float = 1e-10

    @property
    def passed(self) -> bool:
        return (self.max_coeff_dev < self.coeff_tol
                and self.max_norm_drift < self.norm_tol
                and self.max_nexp_drift < self.nexp_tol
                and self.max_vieta < self.root_tol
                and self.max_charpoly < self.root_tol)

    def lines(self) -> list[str]:
        def mark(ok: bool) -> str:
            return "ok" if ok else "FAIL"
        return [
            f"configs checked          {self.configs} ({self.manifolds} manifolds)",
            f"coefficient deviation    {self.max_coeff_dev:.3e} < {self.coeff_tol:.0e}"
            f"  [{mark(self.max_coeff_dev < self.coeff_tol)}]",
            f"norm drift               {self.max_norm_drift:.3e} < {self.norm_tol:.0e}"
            f"  [{mark(self.max_norm_drift < self.norm_tol)}]",
            f"excitation drift (rel)   {self.max_nexp_drift:.3e} < {self.nexp_tol:.0e}"
            f"  [{mark(self.max_nexp_drift < self.nexp_tol)}]",
            f"root-sum identities      {self.max_vieta:.3e} < {self.root_tol:.0e}"
            f"  [{mark(self.max_vieta < self.root_tol)}]",
            f"characteristic residual  {self.max_charpoly:.3e} < {self.root_tol:.0e}"
            f"  [{mark(self.max_charpoly < self.root_tol)}]",
            f"elapsed                  {self.elapsed:.1f} s",
        ]


def verify_grid(quick: bool = False) -> VerifyReport:
    """Closed form versus oracle across the reference parameter grid.

    The full grid covers the three presets, relative couplings {0, 0.1, 0.5,
    1}, detunings {0, 0.5, 1}, and mean photon numbers {10, 20} on 512 times
    over tau in [0, 50]; ``quick`` shrinks every axis for a smoke check.
    """
    if quick:
        presets = ("psi_e", "psi_b")
        lam2s = (0.0, 0.5)
        deltas = (0.0, 1.0)
        nbars = (10.0,)
        taus = np.linspace(0.0, 20.0, 128)
    else:
        presets = ("psi_e", "psi_b", "psi_s")
        lam2s = (0.0, 0.1, 0.5, 1.0)
        deltas = (0.0, 0.5, 1.0)
        nbars = (10.0, 20.0)
        taus = np.linspace(0.0, 50.0, 512)

    t0 = _time.perf_counter()
    max_dev = 0.0
    max_norm = 0.0
    max_nexp = 0.0
    max_vieta = 0.0
    max_char = 0.0
    configs = 0
    manifolds = 0
    for nbar in nbars:
        field_cache = coherent_weights(math.sqrt(nbar))
        for name in presets:
            state0 = initial_state(preset(name), field_cache)
            norm0 = state0.norm()
            nexp0 = state0.excitation_expectation()
            for lam2 in lam2s:
                for delta in deltas:
                    params = ModelParams.from_detuning(
                        delta=delta, lambda1=1.0, lambda2=lam2)
                    prop = AnalyticPropagator(state0, params)
                    coeff = prop.coefficients_at(taus)
                    ea, eb, ec, ed, ef = oracle.coefficients_exact(state0, params, taus)
                    for ours, ref in ((coeff.a, ea), (coeff.b, eb), (coeff.c, ec),
                                      (coeff.d, ed), (coeff.frozen, ef)):
                        max_dev = max(max_dev, float(np.abs(ours - ref).max()))
                    norm_t = _norm_series(coeff)
                    max_norm = max(max_norm, float(np.abs(norm_t - norm0).max()))
                    nexp_t = _nexp_series(coeff)
                    max_nexp = max(max_nexp,
                                   float(np.abs(nexp_t - nexp0).max()) / abs(nexp0))
                    for n in range(state0.nmax + 1):
                        if n in prop.degenerate_manifolds:
                            continue
                        roots = prop.manifold_solution(n).roots
                        scale = params.block_scale(n)
                        rs, rp, rr = vieta_residuals(roots, params, n)
                        max_vieta = max(max_vieta, rs / scale,
                                        rp / scale**2, rr / scale**3)
                        cres = polynomial_residual(
                            roots.as_array, characteristic_coeffs(params, n))
                        max_char = max(max_char, cres / scale**3)
                        manifolds += 1
                    configs += 1
    return VerifyReport(
        configs=configs, manifolds=manifolds, max_coeff_dev=max_dev,
        max_norm_drift=max_norm, max_nexp_drift=max_nexp,
        max_vieta=max_vieta, max_charpoly=max_char,
        elapsed=_time.perf_counter() - t0,
    )


def figure_runs(figure_id: str, points: Optional[int] = None):
    """Canned (panel, curve, config) list reproducing one reference dataset."""
    inversion_obs = ("inversion",)
    eof_obs = ("concurrence", "eof")
    lam2_line = (0.0, 0.1, 0.5, 1.0)
    lam2_grid = tuple(round(0.05 * i, 2) for i in range(21))

    def cfg(qubits, nbar, lam1, lam2, delta, tau_max, npts, obs, scale=None):
        return RunConfig(qubits=qubits, nbar=nbar, lambda1=lam1, lambda2=lam2,
                         delta=delta, tau_max=tau_max,
                         points=points if points is not None else npts,
                         time_scale=scale, observables=obs)

    runs: list[tuple[str, str, RunConfig]] = []
    if figure_id in ("fig2", "fig3"):
        nbar, tau_max = (10.0, 25.0) if figure_id == "fig2" else (20.0, 50.0)
        for panel, delta in zip("abc", (0.0, 0.5, 1.0)):
            for lam2 in lam2_line:
                runs.append((panel, f"lam2={lam2:g}",
                             cfg(preset("psi_e"), nbar, 1.0, lam2, delta,
                                 tau_max, 2049, inversion_obs)))
    elif figure_id in ("fig4", "fig5", "fig6"):
        nbar = 10.0 if figure_id in ("fig4", "fig6") else 20.0
        tau_max = 25.0 if nbar == 10.0 else 50.0
        state = preset("psi_b") if figure_id == "fig6" else preset("psi_e")
        for panel, delta in zip("ab", (0.0, 1.0)):
            for lam2 in lam2_grid:
                runs.append((panel, f"lam2={lam2:g}",
                             cfg(state, nbar, 1.0, lam2, delta,
                                 tau_max, 1025, inversion_obs)))
    elif figure_id in ("fig7", "fig9", "fig11"):
        delta = 0.5 if figure_id == "fig9" else 0.0
        nbar = 10.0 if figure_id == "fig11" else 20.0
        for panel, lam2 in zip("abcd", (0.0, 0.01, 0.1, 0.5)):
            for name in ("psi_e", "psi_b", "psi_s"):
                runs.append((panel, name,
                             cfg(preset(name), nbar, 1.0, lam2, delta,
                                 25.0, 2049, eof_obs)))
    elif figure_id in ("fig8", "fig10", "fig12"):
        if figure_id == "fig8":
            delta, nbar = 0.0, 20.0
            panels = zip("abcd", (1.0, 0.5, 0.01, 0.0), (25.0, 25.0, 8000.0, 12.0),
                         (2049, 2049, 8193, 2049))
        elif figure_id == "fig10":
            delta, nbar = 0.5, 20.0
            panels = zip("abcd", (1.0, 0.5, 0.1, 0.01), (25.0, 25.0, 700.0, 8000.0),
                         (2049, 2049, 4097, 8193))
        else:
            delta, nbar = 0.0, 10.0
            panels = zip("abc", (1.0, 0.5, 0.01), (25.0, 25.0, 8000.0),
                         (2049, 2049, 8193))
        for panel, lam1, tau_max, npts in panels:
            for name in ("psi_e", "psi_b", "psi_s"):
                runs.append((panel, name,
                             cfg(preset(name), nbar, lam1, 1.0, delta,
                                 tau_max, npts, eof_obs, scale="lambda2")))
    else:
        raise ConfigError(
            f"unknown figure id {figure_id!r}; available: {sorted(FIGURE_IDS)}")
    return runs


FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
              "fig9", "fig10", "fig11", "fig12")

FIGURE_NOTES = {
    "fig2": "inversion, excited preset, nbar=10, panels by detuning, curves by exchange coupling",
    "fig3": "inversion, excited preset, nbar=20, panels by detuning, curves by exchange coupling",
    "fig4": "inversion surface over (tau, exchange coupling), excited preset, nbar=10",
    "fig5": "inversion surface over (tau, exchange coupling), excited preset, nbar=20",
    "fig6": "inversion surface over (tau, exchange coupling), Bell preset, nbar=10",
    "fig7": "entanglement vs tau (field-coupling units), nbar=20, zero detuning",
    "fig8": "entanglement vs tau (exchange-coupling units), nbar=20, zero detuning",
    "fig9": "entanglement vs tau (field-coupling units), nbar=20, detuning 0.5",
    "fig10": "entanglement vs tau (exchange-coupling units), nbar=20, detuning 0.5",
    "fig11": "entanglement vs tau (field-coupling units), nbar=10, zero detuning",
    "fig12": "entanglement vs tau (exchange-coupling units), nbar=10, zero detuning",
}


@dataclass(frozen=True)
class FigureResult:
    """All trajectories of one figure, keyed by (panel, curve)."""

    figure_id: str
    runs: tuple[tuple[str, str, TrajectoryResult], ...]
    metadata: dict


def run_figure(figure_id: str, points: Optional[int] = None,
               threads: int = 1) -> FigureResult:
    """Compute every dataset of one canned figure."""
    plan = figure_runs(figure_id, points)

    def one(item):
        panel, curve, cfg = item
        return (panel, curve, run_trajectory(cfg))

    if threads == 1:
        done = [one(item) for item in plan]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = list(pool.map(one, plan))
    metadata = {
        "generator": "tcxy",
        "version": __version__,
        "backend": backend.BACKEND_NAME,
        "figure": figure_id,
        "note": FIGURE_NOTES[figure_id],
        "panels": sorted({p for p, _, _ in done}),
    }
    return FigureResult(figure_id=figure_id, runs=tuple(done), metadata=metadata)
