"""Command-line interface: run, sweep, verify, repro, and bench verbs.

Exit codes: 0 success, 2 configuration error (also used by argparse itself),
3 numerical failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, backend, datafmt, runner
from .analytic import solve_manifold
from .errors import (BranchSelectionError, ConfigError, DegenerateRootsError,
                     NumericalDegradationError, OracleIntegrationError,
                     ShapeMismatchError, TcxyError)
from .model import (PRESET_NAMES, QubitInitState, coherent_weights,
                    initial_state, preset)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

_RUN_DEFAULTS = {
    "preset": "psi_e",
    "a": None,
    "b": None,
    "c": None,
    "d": None,
    "nbar": 20.0,
    "lambda1": 1.0,
    "lambda2": 0.0,
    "delta": 0.0,
    "omega": 1.0,
    "tau_max": 25.0,
    "points": 4096,
    "time_scale": None,
    "observables": "inversion,concurrence,eof",
    "oracle_check": False,
    "frozen_sector": True,
    "tail_tolerance": 1e-12,
    "format": "csv",
    "out": None,
}


def _add_run_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file with any of the run options; flags override it")
    p.add_argument("--preset", choices=PRESET_NAMES, default=None,
                   help="named initial two-qubit state (default psi_e)")
    for flag, ket in (("a", "|e1 e2>"), ("b", "|e1 g2>"),
                      ("c", "|g1 e2>"), ("d", "|g1 g2>")):
        p.add_argument(f"--{flag}", default=None, metavar="RE,IM",
                       help=f"custom amplitude on {ket} as re,im "
                            "(all four together override --preset)")
    p.add_argument("--nbar", type=float, default=None,
                   help="mean photon number of the coherent field (default 20)")
    p.add_argument("--lambda1", type=float, default=None,
                   help="qubit-field coupling (default 1)")
    p.add_argument("--lambda2", type=float, default=None,
                   help="qubit-qubit exchange coupling (default 0)")
    p.add_argument("--delta", type=float, default=None,
                   help="detuning omega0 - omega (default 0)")
    p.add_argument("--omega", type=float, default=None,
                   help="cavity frequency; observables do not depend on it (default 1)")
    p.add_argument("--tau-max", type=float, default=None,
                   help="scaled-time horizon (default 25)")
    p.add_argument("--points", type=int, default=None,
                   help="grid size including both endpoints (default 4096)")
    p.add_argument("--time-scale", choices=("lambda1", "lambda2"), default=None,
                   help="coupling defining tau = coupling * t "
                        "(default: lambda1, or lambda2 when lambda1 is 0)")
    p.add_argument("--observables", default=None,
                   help="comma list from inversion, inversion2, concurrence, eof, "
                        "norm, nexp (default inversion,concurrence,eof)")
    p.add_argument("--oracle-check", action="store_true", default=None,
                   help="add an oracle_dev column with the numeric-oracle deviation")
    p.add_argument("--no-frozen-sector", dest="frozen_sector",
                   action="store_false", default=None,
                   help="drop the amplitudes outside the four-state manifolds")
    p.add_argument("--tail-tolerance", type=float, default=None,
                   help="maximum discarded coherent-state probability (default 1e-12)")
    p.add_argument("--format", choices=datafmt.FORMATS, default=None,
                   help="output format (default csv)")
    p.add_argument("--out", type=Path, default=None,
                   help="output path; extension is derived from --format")


def _parse_amplitude(flag: str, value) -> complex:
    """Parse one amplitude given as "re,im", a bare real, or a [re, im] pair."""
    if isinstance(value, (list, tuple)):
        parts = [str(piece) for piece in value]
    else:
        parts = [piece.strip() for piece in str(value).split(",")]
    if len(parts) not in (1, 2):
        raise ConfigError(f"--{flag} takes re or re,im; got {value!r}")
    try:
        numbers = [float(piece) for piece in parts]
    except ValueError as exc:
        raise ConfigError(f"could not parse --{flag} value {value!r}: {exc}") from None
    return complex(numbers[0], numbers[1] if len(numbers) == 2 else 0.0)


def _merge_options(args: argparse.Namespace) -> dict:
    merged = dict(_RUN_DEFAULTS)
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"could not read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(_RUN_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        merged.update(loaded)
    for key in _RUN_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _build_config(options: dict) -> runner.RunConfig:
    custom = {flag: options[flag] for flag in "abcd" if options[flag] is not None}
    if len(custom) == 4:
        amps = [_parse_amplitude(f, options[f]) for f in "abcd"]
        norm = sum(abs(z) ** 2 for z in amps)
        if abs(norm - 1.0) > 1e-6:
            raise ConfigError(
                f"custom state must be normalized within 1e-6, |psi|^2 = {norm}")
        if abs(norm - 1.0) > 1e-12:
            scale = norm ** -0.5
            amps = [z * scale for z in amps]
        qubits = QubitInitState(*amps)
    elif custom:
        missing = [f"--{f}" for f in "abcd" if f not in custom]
        raise ConfigError(f"custom state needs all of --a --b --c --d; missing {missing}")
    else:
        qubits = preset(str(options["preset"]))
    observables = options["observables"]
    if isinstance(observables, str):
        observables = tuple(s.strip() for s in observables.split(",") if s.strip())
    else:
        observables = tuple(observables)
    points = options["points"]
    if not isinstance(points, int):
        raise ConfigError(f"points must be an integer, got {points!r}")
    return runner.RunConfig(
        qubits=qubits,
        nbar=float(options["nbar"]),
        lambda1=float(options["lambda1"]),
        lambda2=float(options["lambda2"]),
        delta=float(options["delta"]),
        omega=float(options["omega"]),
        tau_max=float(options["tau_max"]),
        points=points,
        time_scale=options["time_scale"],
        observables=observables,
        oracle_check=bool(options["oracle_check"]),
        tail_tolerance=float(options["tail_tolerance"]),
        frozen_sector=bool(options["frozen_sector"]),
    )


def _require_out(options: dict) -> Path:
    if not options["out"]:
        raise ConfigError("--out is required (or set \"out\" in the config file)")
    return Path(options["out"])


def _cmd_run(args: argparse.Namespace) -> int:
    options = _merge_options(args)
    cfg = _build_config(options)
    out = _require_out(options)
    result = runner.run_trajectory(cfg)
    header, columns = datafmt.trajectory_table(result)
    written = datafmt.write_table(out, options["format"], result.metadata,
                                  header, columns)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    options = _merge_options(args)
    cfg = _build_config(options)
    out = _require_out(options)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"could not parse --values: {exc}") from None
    sweep = runner.run_sweep(cfg, args.axis, values, threads=args.threads)
    for entry in sweep.entries:
        if entry.error is not None:
            print(f"warning: {sweep.axis}={entry.value:g} failed: {entry.error}",
                  file=sys.stderr)
    header, columns = datafmt.sweep_table(sweep)
    written = datafmt.write_table(out, options["format"], sweep.metadata,
                                  header, columns)
    for path in written:
        print(path)
    return EXIT_OK if all(e.error is None for e in sweep.entries) else EXIT_NUMERIC


def _cmd_verify(args: argparse.Namespace) -> int:
    report = runner.verify_grid(quick=args.quick)
    for line in report.lines():
        print(line)
    if report.passed:
        print("verification PASSED")
        return EXIT_OK
    print("verification FAILED")
    return EXIT_VERIFY


def _cmd_repro(args: argparse.Namespace) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    result = runner.run_figure(args.figure, points=args.points,
                               threads=args.threads)
    header, columns = datafmt.figure_table(result)
    written = datafmt.write_table(outdir / args.figure, args.format,
                                  result.metadata, header, columns)
    for path in written:
        print(path)
    return EXIT_OK


def _bench_workload(nbar: float, points: int):
    params_cfg = runner.RunConfig(
        qubits=preset("psi_b"), nbar=nbar, lambda1=1.0, lambda2=0.5,
        delta=0.5, tau_max=25.0, points=points)
    field = coherent_weights(math.sqrt(nbar))
    state0 = initial_state(preset("psi_b"), field)
    params = params_cfg.params
    nm = state0.nmax + 1
    init = np.column_stack([state0.A, state0.B, state0.C, state0.D])
    roots = np.empty((nm, 3), dtype=complex)
    deltas = np.empty((nm, 3), dtype=complex)
    for n in range(nm):
        sol = solve_manifold(init[n], params, n)
        roots[n] = sol.roots.as_array
        deltas[n] = sol.deltas
    alpha = params.lambda1 * np.sqrt(np.arange(1, nm + 1, dtype=float))
    beta = params.lambda1 * np.sqrt(np.arange(2, nm + 2, dtype=float))
    frozen = np.repeat(state0.frozen.amplitudes[:, None], points, axis=1)
    times = params_cfg.times()
    return (roots, deltas, init, alpha, beta, params.delta, params.lambda2,
            times, frozen)


def _cmd_bench(args: argparse.Namespace) -> int:
    (roots, deltas, init, alpha, beta, delta, lam2,
     times, frozen) = _bench_workload(args.nbar, args.points)
    names = backend.available_backends()
    print(f"workload: {roots.shape[0]} manifolds x {times.size} times, "
          f"nbar={args.nbar:g}, best of {args.repeats}")
    timings: dict[str, tuple[float, float]] = {}
    reference = None
    for name in names:
        impl = backend.get_backend(name)
        best_evolve = math.inf
        best_rdm = math.inf
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            a, b, c, d = impl.evolve_blocks(roots, deltas, init, alpha, beta,
                                            delta, lam2, times)
            t1 = time.perf_counter()
            rho = impl.rdm_series(a, b, c, d, frozen)
            t2 = time.perf_counter()
            best_evolve = min(best_evolve, t1 - t0)
            best_rdm = min(best_rdm, t2 - t1)
        if reference is None:
            reference = (a, rho)
        else:
            dev = max(float(np.abs(a - reference[0]).max()),
                      float(np.abs(rho - reference[1]).max()))
            print(f"cross-backend deviation: {dev:.3e}")
        timings[name] = (best_evolve, best_rdm)
        print(f"{name:>9}: evolve_blocks {best_evolve * 1e3:8.2f} ms   "
              f"rdm_series {best_rdm * 1e3:8.2f} ms")
    if len(timings) == 2:
        pe = timings["python"][0] / timings["compiled"][0]
        pr = timings["python"][1] / timings["compiled"][1]
        print(f"speedup (python / compiled): evolve_blocks {pe:.1f}x, "
              f"rdm_series {pr:.1f}x")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcxy",
        description="Exact dynamics of two exchange-coupled qubits sharing a "
                    "single-mode coherent cavity field.")
    parser.add_argument("--version", action="version", version=f"tcxy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="compute one trajectory and write it out")
    _add_run_arguments(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="repeat a run across one parameter axis")
    _add_run_arguments(p_sweep)
    p_sweep.add_argument("--axis", choices=runner.SWEEP_AXES, required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser(
        "verify", help="closed form vs numeric oracle across the reference grid")
    p_verify.add_argument("--quick", action="store_true",
                          help="shrunken grid for a fast smoke check")
    p_verify.set_defaults(func=_cmd_verify)

    p_repro = sub.add_parser("repro", help="reproduce a reference figure dataset")
    p_repro.add_argument("figure", choices=runner.FIGURE_IDS)
    p_repro.add_argument("--outdir", type=Path, required=True)
    p_repro.add_argument("--points", type=int, default=None,
                         help="override the per-panel grid size")
    p_repro.add_argument("--threads", type=int, default=1)
    p_repro.add_argument("--format", choices=datafmt.FORMATS, default="csv")
    p_repro.set_defaults(func=_cmd_repro)

    p_bench = sub.add_parser("bench", help="compare the kernel backends")
    p_bench.add_argument("--nbar", type=float, default=20.0)
    p_bench.add_argument("--points", type=int, default=4096)
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits; keep main() returning codes
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BranchSelectionError, DegenerateRootsError, NumericalDegradationError,
            OracleIntegrationError, ShapeMismatchError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TcxyError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
