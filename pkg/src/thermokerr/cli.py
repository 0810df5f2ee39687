"""Command-line front end: regenerates the package's reference datasets as CSV
or JSON with reproducible seeds.

Subcommands: fig3, cascade, fig6, fig8a, fig8b, identify, ergotropy.
Every run validates its configuration strictly (unknown keys rejected),
writes output atomically (temp file + rename, never a partial file), appends
a `# config: ...` provenance line to CSVs, and prints a one-line summary.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import engine, fock, metrology, sensor, thermo

_ANGLES = {"pi": math.pi, "pi/2": math.pi / 2, "pi/4": math.pi / 4,
           "2pi": 2 * math.pi}


class ConfigError(ValueError):
    pass


def parse_angle(text: str) -> float:
    """Decimal radians or the literal tokens pi, pi/2, pi/4, 2pi (optionally
    signed)."""
    t = str(text).strip().lower()
    sign = 1.0
    if t.startswith("-"):
        sign, t = -1.0, t[1:]
    if t in _ANGLES:
        return sign * _ANGLES[t]
    try:
        return sign * float(t)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r} (use radians or pi, pi/2, pi/4)")


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{ln}: expected key=value, got {line!r}")
                key, val = line.split("=", 1)
                values[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    return values


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tk-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows, config: dict) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    cfg = " ".join(f"{k}={config[k]}" for k in sorted(config))
    lines.append(f"# config: {cfg}")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _config_dict(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _pool_map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands

def _run_fig3(args) -> str:
    params = engine.EngineParams.from_transmissivity(args.nbar, args.s2, 0.0)
    grid = np.linspace(args.chi_min, args.chi_max, args.points)
    rows = engine.amplification_curve(params, grid, n_samples=args.samples,
                                      seed=args.seed)
    cfg = _config_dict(args, ("nbar", "s2", "chi_min", "chi_max", "points",
                              "samples", "seed"))
    text = _csv(("chi", "ratio_1f", "ratio_4f", "stderr_1f", "stderr_4f"), rows, cfg)
    _atomic_write(args.out, text)
    chi_star, peak = engine.peak_amplification(
        engine.EngineParams.from_transmissivity(args.nbar, args.s2, 1.0))
    best = max(rows, key=lambda r: r[1])
    return (f"fig3: {len(rows)} points; MC peak ratio {best[1]:.4f} at chi={best[0]:.4f} "
            f"(closed form {peak:.4f} at chi*={chi_star:.4f}) -> {args.out}")


def _run_cascade(args) -> str:
    params = engine.EngineParams.from_transmissivity(args.nbar, args.s2, args.chi,
                                                     n_blocks=args.blocks)
    outs = engine.cascade(params, args.samples, args.seed)
    rows = [(i + 1, o.mean_intensity_1f, o.ergotropy_1f)
            for i, o in enumerate(outs)]
    cfg = _config_dict(args, ("nbar", "s2", "chi", "blocks", "samples", "seed"))
    text = _csv(("stage", "intensity_1f", "ergotropy_1f"), rows, cfg)
    _atomic_write(args.out, text)
    return (f"cascade: {args.blocks} stages; final intensity_1f "
            f"{outs[-1].mean_intensity_1f:.4f}, ergotropy_1f "
            f"{outs[-1].ergotropy_1f:.2e} -> {args.out}")


def _run_fig6(args) -> str:
    nbars = list(range(1, args.nbar_max + 1))
    chi = parse_angle(args.chi)

    def one(nbar):
        return metrology.phase_error_curve(
            args.kind, [nbar], chi, tail_eps=args.tail_eps,
            nonlinearity=args.nonlinearity)[0]

    rows = sorted(_pool_map(one, nbars, args.threads), key=lambda r: r[0])
    rows = [(r[0], r[1], r[2], r[3], args.kind, chi) for r in rows]
    cfg = _config_dict(args, ("kind", "chi", "nbar_max", "tail_eps",
                              "nonlinearity", "threads"))
    text = _csv(("nbar", "dphi_min", "dphi_sql", "dphi_hl", "kind", "chi"), rows, cfg)
    _atomic_write(args.out, text)
    last = rows[-1]
    return (f"fig6: kind={args.kind}, {len(rows)} points; at nbar={last[0]:g} "
            f"dphi_min={last[1]:.4f} (SQL {last[2]:.4f}, HL {last[3]:.4f}) -> {args.out}")


def _run_fig8a(args) -> str:
    proc = sensor.process_from_label(args.process, coupling=args.coupling)
    grid = np.linspace(0.0, args.t_max, args.points)
    trace = sensor.wc_trace(proc, args.nbar_a, grid, tail_eps=args.tail_eps)
    rows = list(zip(trace.times, trace.eta, trace.wc, trace.mean_na_out))
    cfg = _config_dict(args, ("process", "coupling", "nbar_a", "t_max",
                              "points", "tail_eps"))
    text = _csv(("t", "eta", "wc", "mean_na_out"), rows, cfg)
    _atomic_write(args.out, text)
    return (f"fig8a: process={proc.label}, eta_max(grid)={trace.eta.max():.4f} "
            f"-> {args.out}")


def _run_fig8b(args) -> str:
    nbars = [float(x) for x in args.nbar_a_grid.split(",")]
    grid = np.linspace(0.0, args.t_max, args.points)
    rows = []
    for label in args.processes.split(","):
        proc = sensor.process_from_label(label, coupling=args.coupling)

        def one(nbar, proc=proc):
            eta_max, _ = sensor.max_efficiency(proc, nbar, grid,
                                               tail_eps=args.tail_eps)
            return (nbar, eta_max, proc.label)

        rows.extend(sorted(_pool_map(one, nbars, args.threads)))
    cfg = _config_dict(args, ("processes", "coupling", "nbar_a_grid", "t_max",
                              "points", "tail_eps", "threads"))
    text = _csv(("nbar_a", "eta_max", "process"), rows, cfg)
    _atomic_write(args.out, text)
    return f"fig8b: {len(rows)} rows over processes {args.processes} -> {args.out}"


def _read_trace_csv(path: str) -> tuple[np.ndarray, np.ndarray, dict]:
    times, etas, meta = [], [], {}
    with open(path, "r", encoding="utf-8") as fh:
        header = None
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("# config:"):
                for tok in line[len("# config:"):].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
                continue
            if header is None:
                header = line.split(",")
                for col in ("t", "eta"):
                    if col not in header:
                        raise ConfigError(f"trace CSV missing column {col!r}")
                ti, ei = header.index("t"), header.index("eta")
                continue
            parts = line.split(",")
            times.append(float(parts[ti]))
            etas.append(float(parts[ei]))
    if header is None:
        raise ConfigError(f"trace CSV {path} is empty")
    return np.array(times), np.array(etas), meta


def _run_identify(args) -> str:
    times, etas, meta = _read_trace_csv(args.trace)
    nbar_a = args.nbar_a if args.nbar_a is not None else float(meta.get("nbar_a", "nan"))
    if not np.isfinite(nbar_a):
        raise ConfigError("nbar_a not given and absent from the trace metadata")
    trace = sensor.EfficiencyTrace(process=None, nbar_a=nbar_a, times=times,
                                   eta=etas, wc=etas * nbar_a,
                                   mean_na_out=np.full_like(etas, math.nan))
    result = sensor.identify_process(trace, args.candidates.split(","),
                                     coupling_max=args.coupling_max)
    _atomic_write(args.out, result.to_json() + "\n")
    label = "ambiguous" if result.ambiguous else (
        f"{result.kind} (coupling {result.coupling:.4f})")
    return f"identify: {label}, residual {result.residual:.3e} -> {args.out}"


def _run_ergotropy(args) -> str:
    eps = args.epsilon
    if args.kind == "thermal":
        d = fock.choose_cutoff(args.nbar, eps, kind="thermal")
        state = fock.make_thermal(args.nbar, d)
    elif args.kind == "coherent":
        d = fock.choose_cutoff(args.nbar, eps, kind="coherent")
        state = fock.make_coherent(math.sqrt(args.nbar), d, tail_eps=eps)
    elif args.kind == "number":
        state = fock.make_number(int(args.nbar), int(args.nbar) + 1)
    else:
        raise ConfigError(f"unknown state kind {args.kind!r}")
    report = thermo.ergotropy(fock.reduced_density(state, 0))
    _atomic_write(args.out, report.to_json() + "\n")
    return (f"ergotropy: kind={args.kind} nbar={args.nbar:g} -> "
            f"W={report.ergotropy:.6g} quanta -> {args.out}")


# ---------------------------------------------------------------------------
# argument plumbing

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="thermokerr",
        description="Nonlinear-interferometer datasets: engine amplification, "
                    "phase-estimation bounds, and black-box sensing traces.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, stochastic=False):
        sp.add_argument("--out", required=True, help="output file path")
        sp.add_argument("--config", help="key=value config file (flags override)")
        sp.add_argument("--threads", type=int, default=1)
        if stochastic:
            sp.add_argument("--seed", type=int, help="RNG seed (required)")

    sp = sub.add_parser("fig3", help="amplification ratio vs chi (Monte Carlo)")
    sp.add_argument("--nbar", type=float, default=1.0)
    sp.add_argument("--s2", type=float, default=0.1)
    sp.add_argument("--chi-min", dest="chi_min", type=parse_angle, default=0.0)
    sp.add_argument("--chi-max", dest="chi_max", type=parse_angle, default=20.0)
    sp.add_argument("--points", type=int, default=41)
    sp.add_argument("--samples", type=int, default=100_000)
    common(sp, stochastic=True)
    sp.set_defaults(func=_run_fig3)

    sp = sub.add_parser("cascade", help="multi-block cascade intensities and ergotropy")
    sp.add_argument("--nbar", type=float, default=1.0)
    sp.add_argument("--s2", type=float, default=0.1)
    sp.add_argument("--chi", type=parse_angle, default=1.0)
    sp.add_argument("--blocks", type=int, default=4)
    sp.add_argument("--samples", type=int, default=20_000)
    common(sp, stochastic=True)
    sp.set_defaults(func=_run_cascade)

    sp = sub.add_parser("fig6", help="minimal phase error vs nbar with SQL/HL")
    sp.add_argument("--kind", choices=metrology.INPUT_KINDS, default="thermal")
    sp.add_argument("--chi", default="pi/2")
    sp.add_argument("--nbar-max", dest="nbar_max", type=int, default=8)
    sp.add_argument("--tail-eps", dest="tail_eps", type=float, default=1e-12)
    sp.add_argument("--nonlinearity", choices=metrology.NONLINEARITIES, default="ck")
    common(sp)
    sp.set_defaults(func=_run_fig6)

    sp = sub.add_parser("fig8a", help="efficiency trace eta(t) for one process")
    sp.add_argument("--process", default="ck", help="ck, ck2, k2, k3, ...")
    sp.add_argument("--coupling", type=float, default=1.0)
    sp.add_argument("--nbar-a", dest="nbar_a", type=float, default=1.0)
    sp.add_argument("--t-max", dest="t_max", type=parse_angle, default=math.pi)
    sp.add_argument("--points", type=int, default=64)
    sp.add_argument("--tail-eps", dest="tail_eps", type=float, default=1e-8)
    common(sp)
    sp.set_defaults(func=_run_fig8a)

    sp = sub.add_parser("fig8b", help="maximal efficiency vs nbar_a per process")
    sp.add_argument("--processes", default="ck,k2,k3")
    sp.add_argument("--coupling", type=float, default=1.0)
    sp.add_argument("--nbar-a-grid", dest="nbar_a_grid", default="1,2,4,8")
    sp.add_argument("--t-max", dest="t_max", type=parse_angle, default=2 * math.pi)
    sp.add_argument("--points", type=int, default=65)
    sp.add_argument("--tail-eps", dest="tail_eps", type=float, default=1e-8)
    common(sp)
    sp.set_defaults(func=_run_fig8b)

    sp = sub.add_parser("identify", help="classify a WC trace among candidates")
    sp.add_argument("--trace", required=True, help="CSV with t and eta columns")
    sp.add_argument("--candidates", default="ck,k2,k3")
    sp.add_argument("--nbar-a", dest="nbar_a", type=float,
                    help="probe mean photon number (defaults to trace metadata)")
    sp.add_argument("--coupling-max", dest="coupling_max", type=float, default=4.0)
    common(sp)
    sp.set_defaults(func=_run_identify)

    sp = sub.add_parser("ergotropy", help="ergotropy report for a single-mode state")
    sp.add_argument("--kind", choices=("thermal", "coherent", "number"),
                    default="thermal")
    sp.add_argument("--nbar", type=float, default=1.0)
    sp.add_argument("--epsilon", type=float, default=1e-10)
    common(sp)
    sp.set_defaults(func=_run_ergotropy)

    return p


_STOCHASTIC = {"fig3", "cascade"}


def _apply_config_file(args, parser, argv):
    """Merge key=value file entries under explicit command-line flags."""
    if not getattr(args, "config", None):
        return args
    file_values = _read_config_file(args.config)
    sub = args.subcommand
    sub_parser = None
    for action in parser._subparsers._group_actions:
        sub_parser = action.choices.get(sub)
    known = {a.dest for a in sub_parser._actions if a.dest != "help"}
    for key, raw in file_values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r} for subcommand {sub}")
        if f"--{key.replace('_', '-')}" in argv or f"--{key}" in argv:
            continue  # explicit flag wins
        action = next(a for a in sub_parser._actions if a.dest == key)
        if action.type is not None:
            try:
                setattr(args, key, action.type(raw))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"config key {key!r}: {exc}")
        elif isinstance(sub_parser.get_default(key), bool):
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        else:
            setattr(args, key, raw)
    return args


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(argv)
        args = _apply_config_file(args, parser, list(argv))
        if args.subcommand in _STOCHASTIC and args.seed is None:
            raise ConfigError(f"--seed is required for {args.subcommand}")
        if getattr(args, "threads", 1) < 1:
            raise ConfigError("--threads must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        summary = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, MemoryError, fock.CutoffError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
