"""Command-line interface emitting CSV or JSON data tables.

Subcommands:

* ``recurrence-run``: iterate a purification protocol, one row per round.
* ``thresholds``: purification regimes and worst tolerable gate noise.
* ``hashing``: minimum fidelities, noise thresholds, finite-size sweeps.
* ``ghz``: multiparty hashing yields.
* ``oracle-check``: dense-simulation validation suite.

All numbers are printed with 12 significant digits; every command is
deterministic given its flags (and ``--seed`` where randomness is
involved).  Exit codes: 0 success, 1 I/O failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import hashing, multipartite, oracle, recurrence
from .indices import check_dimension, is_prime, primes_in
from .states import StatePreset, make_preset, read_state_file

__all__ = [
    "cmd_ghz",
    "cmd_hashing",
    "cmd_oracle_check",
    "cmd_recurrence_run",
    "cmd_thresholds",
    "main",
]

PROTOCOL_NAMES = {
    "p1p2": recurrence.P1P2,
    "dejmps": recurrence.DEJMPS,
    "bbpssw": recurrence.BBPSSW,
    "three-copy": recurrence.THREE_COPY,
}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def _csv(header: list[str], rows: list[tuple]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def _write_output(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_int_list(text: str) -> list[int]:
    """Parse "2", "2,3,5" or "a..b" (inclusive) into a sorted int list."""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo_s, hi_s = part.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ValueError(f"empty range {part!r}")
            values.extend(range(lo, hi + 1))
        elif part:
            values.append(int(part))
    if not values:
        raise ValueError(f"no values in {text!r}")
    return sorted(set(values))


def _parse_d_range(text: str) -> list[int]:
    """Like :func:`_parse_int_list`, plus "primes:a..b" for primes only."""
    if text.startswith("primes:"):
        body = text[len("primes:"):]
        if ".." not in body:
            raise ValueError(f"primes range must look like primes:a..b, got {text!r}")
        lo_s, hi_s = body.split("..", 1)
        values = primes_in(int(lo_s), int(hi_s))
        if not values:
            raise ValueError(f"no primes in range {text!r}")
        return values
    return _parse_int_list(text)


def _parse_float_grid(text: str) -> list[float]:
    """Parse "x", "x,y,z" or "lo:hi:count" into a float list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must look like lo:hi:count, got {text!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError(f"grid count must be positive, got {count}")
        return list(np.linspace(lo, hi, count))
    return [float(p) for p in text.split(",") if p.strip()]


def _parse_sweep(text: str) -> list[int]:
    """Parse "lo:hi" or "lo:hi:step" into an inclusive integer sweep."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"sweep must look like lo:hi[:step], got {text!r}")
    lo, hi = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) == 3 else 1
    if step < 1 or hi < lo:
        raise ValueError(f"invalid sweep {text!r}")
    return list(range(lo, hi + 1, step))


def _load_initial_state(args):
    if args.state_file is not None:
        return read_state_file(args.state_file)
    if args.d is None or args.F is None:
        raise ValueError("need either --state-file or both --d and --F")
    preset = StatePreset(kind=args.preset, F=args.F, x_weight=args.x_weight)
    return make_preset(preset, args.d)


def cmd_recurrence_run(args) -> str:
    """Iterate one protocol and tabulate the trajectory."""
    state = _load_initial_state(args)
    protocol = PROTOCOL_NAMES[args.protocol]
    noise = recurrence.NoiseParams(Q=args.Q)
    traj = recurrence.run_protocol(
        protocol, state, noise, epsilon=args.epsilon, max_iters=args.max_iters
    )
    rows = [(0, "INIT", state.fidelity, 1.0, 1.0)]
    rows.extend(
        (i, s.step, s.state.fidelity, s.success_prob, s.cumulative_yield)
        for i, s in enumerate(traj.steps, start=1)
    )
    if args.format == "json":
        return _json(
            {
                "protocol": protocol,
                "Q": args.Q,
                "target_fidelity": traj.target_fidelity,
                "reached_target": traj.reached_target,
                "steps": [
                    {
                        "iter": r[0],
                        "step": r[1],
                        "F": r[2],
                        "success_prob": r[3],
                        "cum_yield": r[4],
                    }
                    for r in rows
                ],
            }
        )
    return _csv(["iter", "step", "F", "success_prob", "cum_yield"], rows)


def cmd_thresholds(args) -> str:
    """Tabulate noise thresholds and purification regimes per dimension."""
    protocol = PROTOCOL_NAMES[args.protocol]
    if protocol == recurrence.THREE_COPY:
        raise ValueError("thresholds are defined for two-copy protocols")
    rows = []
    for d in _parse_d_range(args.d_range):
        check_dimension(d)
        if protocol == recurrence.BBPSSW:
            q_th = recurrence.bbpssw_threshold(d)
            regime = recurrence.bbpssw_fixed_points(d, args.Q)
        else:
            q_th = recurrence.noise_threshold(
                protocol,
                d,
                args.preset,
                q_tol=args.q_tol,
                grid=args.grid,
                iterations=args.iterations,
            )
            regime = recurrence.regime_scan(
                protocol,
                d,
                args.Q,
                args.preset,
                grid=args.grid,
                iterations=args.iterations,
            )
        rows.append(
            (d, protocol, args.Q, q_th, regime.F_min, regime.F_max, regime.purifiable)
        )
    header = ["d", "protocol", "Q", "Q_th", "F_min", "F_max", "purifiable"]
    if args.format == "json":
        return _json([dict(zip(header, map(_jsonable, row))) for row in rows])
    return _csv(header, rows)


def cmd_hashing(args) -> str:
    """Hashing yields: minimum fidelity, noise thresholds, or block sweeps."""
    modes = [args.fmin, args.threshold, args.n_sweep is not None, args.n is not None]
    if sum(bool(m) for m in modes) != 1:
        raise ValueError("pick exactly one of --fmin, --threshold, --n-sweep, --n")

    if args.fmin:
        if args.d is None:
            raise ValueError("--fmin needs --d")
        result = {"d": args.d, "F_min": hashing.min_fidelity(args.d)}
        if args.format == "csv":
            return _csv(["d", "F_min"], [(args.d, result["F_min"])])
        return _json(result)

    if args.threshold:
        d_values = (
            _parse_d_range(args.d_range)
            if args.d_range
            else ([args.d] if args.d is not None else None)
        )
        if d_values is None:
            raise ValueError("--threshold needs --d or --d-range")
        rows = []
        for d in d_values:
            if not is_prime(d):
                raise ValueError(f"hashing thresholds need prime d, got {d}")
            F_min = hashing.min_fidelity(d)
            p_min, q_min = hashing.noisy_thresholds(d)
            rows.append((d, F_min, p_min, q_min, hashing.universal_threshold(d)))
        header = ["d", "F_min", "p_min", "q_min", "universal_q_th"]
        if args.format == "json":
            return _json([dict(zip(header, map(_jsonable, row))) for row in rows])
        return _csv(header, rows)

    if args.d is None or args.F is None:
        raise ValueError("finite-size hashing needs --d and --F")

    if args.n is not None:
        report = hashing.finite_size_report(args.d, args.n, args.F, args.delta)
        obj = {
            "d": report.d,
            "n": report.n,
            "F": report.F,
            "delta": report.delta,
            "S": report.S,
            "r": report.r,
            "yield": report.yield_,
            "p1_bound": report.p1_bound,
            "p2": report.p2,
            "F_out_bound": report.F_out_bound,
            "yield_raw": report.yield_raw,
            "F_out_raw": report.F_out_raw,
            "feasible": report.feasible,
        }
        if args.format == "csv":
            header = list(obj)
            return _csv(header, [tuple(obj[k] for k in header)])
        return _json(obj)

    rows = []
    for n in _parse_sweep(args.n_sweep):
        rep = hashing.finite_size_report(args.d, n, args.F, args.delta)
        rows.append(
            (n, rep.delta, rep.S, rep.r, rep.yield_, rep.p1_bound, rep.p2, rep.F_out_bound)
        )
    header = ["n", "delta", "S", "r", "yield", "p1_bound", "p2", "F_out_bound"]
    if args.format == "json":
        return _json([dict(zip(header, map(_jsonable, row))) for row in rows])
    return _csv(header, rows)


def cmd_ghz(args) -> str:
    """Multiparty hashing yields over a (d, N, F) grid or one explicit state."""
    if args.state_file is not None:
        with open(args.state_file, "r", encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"invalid JSON in state file: {exc}") from exc
        state = multipartite.ghz_from_json(obj)
        h_phase, h_amp = multipartite.index_entropies(state)
        report = {
            "d": state.d,
            "N": state.N,
            "F": state.fidelity,
            "H_phase": h_phase,
            "H_amp_max": h_amp,
            "yield": multipartite.multipartite_yield(state),
            "index_correlation": multipartite.index_correlation(state),
        }
        if args.format == "csv":
            header = list(report)
            return _csv(header, [tuple(report[k] for k in header)])
        return _json(report)

    ds = _parse_d_range(args.d_list)
    Ns = _parse_int_list(args.N_list)
    Fs = _parse_float_grid(args.F_grid)
    rows = []
    for d in ds:
        for N in Ns:
            for F in Fs:
                rows.append((d, N, F, multipartite.isotropic_yield_formula(d, N, F)))
    header = ["d", "N", "F", "yield"]
    if args.format == "json":
        return _json([dict(zip(header, map(_jsonable, row))) for row in rows])
    return _csv(header, rows)


def cmd_oracle_check(args) -> str:
    """Dense-simulation validation suite; reports max deviations per check."""
    d_values = _parse_int_list(args.d)
    for d in d_values:
        check_dimension(d)
        if d > oracle.MAX_TWO_PAIR_D:
            raise ValueError(
                f"oracle checks are limited to d <= {oracle.MAX_TWO_PAIR_D}, got {d}"
            )
    checks: dict[str, float] = {}
    mgxor_ok = True
    for d in d_values:
        index_devs = oracle.verify_bell_index_maps(d)
        for name, dev in index_devs.items():
            checks[f"{name}_index_map_d{d}"] = dev
        for variant, pairs in (("P1", 2), ("P2", 2), ("THREE_COPY", 3)):
            if d > oracle.MAX_THREE_PAIR_D and pairs == 3:
                continue
            state_dev, prob_dev = oracle.recurrence_map_deviation(
                d, variant, trials=args.trials, seed=args.seed
            )
            checks[f"{variant}_state_d{d}"] = state_dev
            checks[f"{variant}_prob_d{d}"] = prob_dev
        checks[f"twirl_offdiag_d{d}"] = oracle.verify_depolarization_identity(
            d, trials=3, seed=args.seed
        )
        if d <= oracle.MAX_THREE_PAIR_D:
            mgxor_ok = mgxor_ok and oracle.verify_mgxor_index_map(d)
    worst = max(checks.values())
    return _json(
        {
            "d": d_values,
            "seed": args.seed,
            "trials": args.trials,
            "checks": {k: _jsonable(v) for k, v in sorted(checks.items())},
            "mgxor_index_map_ok": mgxor_ok,
            "max_abs_deviation": worst,
            "tolerance": 1e-10,
            "pass": bool(mgxor_ok and worst < 1e-10),
        }
    )


def _add_output_flags(sub) -> None:
    sub.add_argument("--output", default="-", help="output path, or - for stdout")
    sub.add_argument("--format", choices=("csv", "json"), default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditpure",
        description="Entanglement purification analysis for d-level systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recurrence-run", help="iterate a purification protocol")
    p.add_argument("--d", type=int)
    p.add_argument("--preset", choices=("isotropic", "x_only", "z_only", "xz_mixture"),
                   default="isotropic")
    p.add_argument("--F", type=float)
    p.add_argument("--x-weight", dest="x_weight", type=float, default=0.25)
    p.add_argument("--state-file")
    p.add_argument("--protocol", choices=tuple(PROTOCOL_NAMES), default="p1p2")
    p.add_argument("--Q", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=200)
    _add_output_flags(p)
    p.set_defaults(handler=cmd_recurrence_run)

    p = sub.add_parser("thresholds", help="noise thresholds and regimes")
    p.add_argument("--protocol", choices=("bbpssw", "p1p2", "dejmps"), default="bbpssw")
    p.add_argument("--d-range", dest="d_range", default="2..8")
    p.add_argument("--Q", type=float, default=1.0)
    p.add_argument("--preset", choices=("isotropic", "x_only", "z_only", "xz_mixture"),
                   default="isotropic")
    p.add_argument("--q-tol", dest="q_tol", type=float, default=1e-3)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--iterations", type=int, default=160)
    _add_output_flags(p)
    p.set_defaults(handler=cmd_thresholds)

    p = sub.add_parser("hashing", help="hashing yields and thresholds")
    p.add_argument("--d", type=int)
    p.add_argument("--d-range", dest="d_range")
    p.add_argument("--F", type=float)
    p.add_argument("--fmin", action="store_true",
                   help="print the minimal purifiable isotropic fidelity")
    p.add_argument("--threshold", action="store_true",
                   help="tabulate noisy-source thresholds")
    p.add_argument("--n", type=int, help="single finite-size report")
    p.add_argument("--n-sweep", dest="n_sweep",
                   help="block-size sweep lo:hi[:step]")
    p.add_argument("--delta", default="npow:-0.25",
                   help="typicality margin policy: fixed:x, npow:p, n_to_1")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_hashing)

    p = sub.add_parser("ghz", help="multiparty hashing yields")
    p.add_argument("--d-list", dest="d_list", default="2")
    p.add_argument("--N-list", dest="N_list", default="3")
    p.add_argument("--F-grid", dest="F_grid", default="0.9")
    p.add_argument("--state-file")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_ghz)

    p = sub.add_parser("oracle-check", help="dense-simulation validation suite")
    p.add_argument("--d", default="2,3", help="dimensions, e.g. 2,3")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=12345)
    _add_output_flags(p)
    p.set_defaults(handler=cmd_oracle_check)

    return parser


def _default_format(args) -> str:
    """CSV for tables, JSON for single-object reports."""
    if args.command == "oracle-check":
        return "json"
    if args.command == "hashing":
        return "json" if (args.fmin or args.n is not None) else "csv"
    if args.command == "ghz":
        return "json" if args.state_file else "csv"
    return "csv"


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = _default_format(args)
    try:
        text = args.handler(args)
        _write_output(args.output, text)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
