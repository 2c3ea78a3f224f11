"""Command-line front end: ``ltsab <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import reference_tables
from .coefficients import InsufficientHistory, UndefinedStep, accumulate_full_step
from .experiments import RunConfig, evolve, run_conservation, run_convergence, run_speed
from .integrator import MODES, StepLog
from .time_grid import StepSequence, load_grid, merge_union

log = logging.getLogger("ltsab")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file; flags given explicitly override it")
    p.add_argument("--order", type=int)
    p.add_argument("--problem", choices=("bump", "wave"))
    p.add_argument("--elements", type=int)
    p.add_argument("--nodes", type=int)
    p.add_argument("--left", type=Fraction)
    p.add_argument("--right", type=Fraction)
    p.add_argument("--periodic", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--t-start", type=Fraction)
    p.add_argument("--t-end", type=Fraction)
    p.add_argument("--threshold", type=lambda s: float(Fraction(s)))
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--initial-step-ticks", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--seed", type=int)


_RUN_KEYS = (
    "order", "problem", "elements", "nodes", "left", "right", "periodic", "t_start", "t_end",
    "threshold", "mode", "initial_step_ticks", "output_dir", "seed",
)


def _config(args, base: RunConfig | None = None) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else (base or RunConfig())
    given = {k: getattr(args, k) for k in _RUN_KEYS if getattr(args, k, None) is not None}
    return cfg.replace(**given) if given else cfg


def _out(args, name: str):
    if args.output_dir:
        d = Path(args.output_dir)
        d.mkdir(parents=True, exist_ok=True)
        return open(d / name, "w", newline="")
    return None


def _write_csv(fh, header, rows) -> None:
    w = csv.writer(fh)
    w.writerow(header)
    w.writerows(rows)


# -- coeffs ------------------------------------------------------------------

def format_table(entries: dict, set_ids, times) -> list[str]:
    """Render a two-set table: rows are the first set's times, columns the second's."""
    rows = sorted({q[0] for q in entries}, reverse=True)
    cols = sorted({q[1] for q in entries}, reverse=True)
    cells = [[""] + [str(times[1][c]) for c in cols]]
    for r in rows:
        cells.append([str(times[0][r])] + [str(entries.get((r, c), 0)) for c in cols])
    width = max(len(c) for row in cells for c in row)
    return [" ".join(c.rjust(width) for c in row) for row in cells]


def full_step_tables(seqs: list[StepSequence], k: int):
    """Every full-step table the pattern supports, as ``(set, m, table)``."""
    grid = merge_union(seqs)
    for s in grid.set_ids:
        n_steps = len(grid.set_times[grid.position(s)]) - 1
        for m in range(n_steps):
            try:
                yield s, m, accumulate_full_step(grid, k, s, m)
            except (InsufficientHistory, UndefinedStep):
                continue


def cmd_coeffs(args) -> int:
    if args.pattern:
        r, loaded = load_grid(Path(args.pattern).read_text())
        # tables are scale invariant, so work on plain tick counts
        seqs = [StepSequence(s.set_id, [t.ticks for t in s.times]) for s in loaded]
        unit = Fraction(2) ** r
    else:
        a, b = reference_tables.pattern(args.builtin)
        seqs = [StepSequence("A", a), StepSequence("B", b)]
        unit = Fraction(1)
    times = [[t * unit for t in s.times] for s in seqs]
    out = sys.stdout
    for s, m, table in full_step_tables(seqs, args.order):
        p = [q.set_id for q in seqs].index(s)
        out.write(f"# set {s} step {m}: {times[p][m]} -> {times[p][m + 1]}\n")
        if len(seqs) == 2 and not args.records_only:
            for line in format_table(table.entries, table.set_ids, times):
                out.write(line + "\n")
        for q, v in sorted(table.entries.items()):
            v = Fraction(v)
            out.write(f"record {s}:{m} {','.join(map(str, q))} {v.numerator} {v.denominator}\n")
    return 0


# -- experiments ---------------------------------------------------------------

def cmd_evolve(args) -> int:
    cfg = _config(args)
    log_fh = _out(args, "steps.txt")
    step_log = StepLog(sink=log_fh) if log_fh else None
    report = evolve(cfg, step_log=step_log)
    if log_fh:
        log_fh.close()
    snap = _out(args, "snapshot.txt")
    if snap:
        from .experiments import build_problem

        mesh = build_problem(cfg)[0]
        for e, (x, u) in enumerate(zip(mesh.coordinates(), report.states)):
            for xi, ui in zip(x, u):
                snap.write(f"{e} {xi!r} {ui!r}\n")
        snap.close()
    print(f"steps={report.total_steps} volume_evals={report.volume_evaluations} "
          f"coupling_evals={report.coupling_evaluations} error={report.error} drift={report.max_drift:.3e}")
    return 0


def cmd_convergence(args) -> int:
    cfg = _config(args)
    ths = [2.0 ** -e for e in range(args.coarsest, args.coarsest + args.levels)]
    rows = run_convergence(cfg, args.orders, ths)
    fh = _out(args, "convergence.csv") or sys.stdout
    _write_csv(fh, ["order", "threshold", "linf_error", "slope"],
               [(r.order, repr(r.threshold), repr(r.error), f"{r.slope:.4f}") for r in rows])
    return 0


def cmd_conserve(args) -> int:
    cfg = _config(args, RunConfig.wave())
    report = run_conservation(cfg)
    fh = _out(args, "conservation.csv") or sys.stdout
    _write_csv(fh, ["time_ticks", "integral"], [(t, repr(c)) for t, c in report.conserved_trace])
    print(f"max relative drift {report.max_drift:.3e}", file=sys.stderr)
    return 0


def cmd_speed(args) -> int:
    cfg = _config(args)
    sp = run_speed(cfg)
    fh = _out(args, "speed.csv") or sys.stdout
    rows = [(m, r.total_steps, r.volume_evaluations, r.coupling_evaluations, f"{r.wall_time:.3f}")
            for m, r in sp.reports.items()]
    _write_csv(fh, ["mode", "steps", "volume_evals", "coupling_evals", "wall_seconds"], rows)
    print(f"step ratio {sp.step_ratio:.4f}, evaluation ratio {sp.evaluation_ratio:.4f}, "
          f"wall ratio {sp.wall_ratio:.3f}", file=sys.stderr)
    return 0


def cmd_selftest(args) -> int:
    from . import selftest

    failures = selftest.run(verbose=True)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ltsab", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="exact full-step coefficient tables for a step pattern")
    p.add_argument("--order", type=int, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pattern", help="tick file: 'resolution R' header, then one line per set")
    src.add_argument("--builtin", choices=("steady", "lts_decrease", "lts_increase", "gts_decrease", "gts_increase"))
    p.add_argument("--records-only", action="store_true")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("evolve", help="one evolution; writes step log and final snapshot")
    _add_run_flags(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("convergence", help="error against threshold for several orders")
    _add_run_flags(p)
    p.add_argument("--orders", type=int, nargs="+", default=[4, 5, 6])
    p.add_argument("--coarsest", type=int, default=11, help="largest threshold is 2**-COARSEST")
    p.add_argument("--levels", type=int, default=4)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("conserve", help="integral of u over a periodic run")
    _add_run_flags(p)
    p.set_defaults(func=cmd_conserve)

    p = sub.add_parser("speed", help="global against local step counts")
    _add_run_flags(p)
    p.set_defaults(func=cmd_speed)

    p = sub.add_parser("selftest", help="fast end-to-end gates; nonzero exit on failure")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
