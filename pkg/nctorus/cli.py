"""
Command line interface.

Reports go to stdout (byte-identical for identical configs), progress bars and
log records to stderr. Exit codes: 0 success, 1 tolerance failure,
2 configuration or I/O error.
"""

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
import typing as t
from multiprocessing import Pool

import numpy as np
from tqdm import tqdm

from nctorus import algebra, config, debug, gauge, powers_rieffel, selftest, serialization, spectral
from nctorus.errors import (
    ArgumentError,
    CompatibilityError,
    ConfigError,
    ElementFormatError,
    PreconditionError,
)


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

# convergence columns that must strictly decrease with K: l1(e² - e), chern2 error, winding error
CONVERGENCE_COLUMNS = (1, 3, 4)


class CustomFormatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


@dataclasses.dataclass
class Report:
    command: str
    columns: t.List[str]
    rows: t.List[t.List[t.Any]] = dataclasses.field(default_factory=list)
    summary: t.Dict[str, t.Any] = dataclasses.field(default_factory=dict)
    passed: bool = True

    def to_json(self) -> str:
        data = {
            "command": self.command,
            "passed": self.passed,
            "rows": [dict(zip(self.columns, map(_plain, row))) for row in self.rows],
            "summary": {key: _plain(value) for key, value in self.summary.items()},
        }
        return json.dumps(data, indent=2)

    def to_text(self) -> str:
        lines = [f"# {self.command}"]
        for key, value in self.summary.items():
            lines.append(f"{key:<24} {_fmt(value)}")
        if self.rows:
            lines.append("  ".join(f"{col:>16}" for col in self.columns))
            for row in self.rows:
                lines.append("  ".join(f"{_fmt(value):>16}" for value in row))
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _plain(value: t.Any) -> t.Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _fmt(value: t.Any) -> str:
    if isinstance(value, complex):
        return f"{value.real:.10g}{value.imag:+.3e}j"
    if isinstance(value, float):
        return f"{value:.10g}" if abs(value) >= 1e-3 or value == 0 else f"{value:.3e}"
    return str(value)


def build_unitary(pr: powers_rieffel.PRConfig, bott: bool, tol_proj: float) -> algebra.TorusElement:
    e = powers_rieffel.build_projection(pr)
    if bott:
        return powers_rieffel.build_bott_unitary(e, tol_proj)
    return powers_rieffel.build_unitary(e, tol_proj)


def worker_winding_row(args: t.Tuple) -> t.List[t.Any]:
    """Worker used by multiprocessing pool. One row of the winding table."""
    pr, bott, tol_proj, tol_unitary, n = args
    u = powers_rieffel.power(build_unitary(pr, bott, tol_proj), n)
    expected = n * (powers_rieffel.BOTT_UNITARY_WINDING if bott else powers_rieffel.SYMMETRIC_UNITARY_WINDING)
    w = gauge.winding(u, tol_u=n * tol_unitary)
    return [n, w.real, expected, abs(w - expected), algebra.defect_unitary(u)]


def worker_convergence_row(args: t.Tuple) -> t.List[t.Any]:
    """Worker used by multiprocessing pool. One truncation of the convergence study."""
    pr = args
    e = powers_rieffel.build_projection(pr)
    u = powers_rieffel.build_unitary(e, tol_proj=math.inf)
    chern = gauge.chern2(e)
    w = gauge.winding(u, tol_u=math.inf)
    return [
        pr.trunc,
        powers_rieffel.projection_defect(e),
        algebra.defect_unitary(u),
        abs(chern - powers_rieffel.CHERN_NUMBER),
        abs(w - powers_rieffel.SYMMETRIC_UNITARY_WINDING),
    ]


def pool_rows(worker: t.Callable, input_data: t.List, progress: bool) -> t.List:
    """Rows in input order; NCTORUS_THREADS=1 keeps everything in this process."""
    workers = min(config.worker_count(), len(input_data))
    rows = []
    with tqdm(total=len(input_data), file=sys.stderr, disable=not progress) as bar:
        if workers <= 1:
            for args in input_data:
                rows.append(worker(args))
                bar.update(1)
        else:
            with Pool(processes=workers) as pool:
                for row in pool.imap(worker, input_data):
                    rows.append(row)
                    bar.update(1)
    return rows


def cmd_winding(cfg: config.RunConfig, args: argparse.Namespace) -> Report:
    tol_proj = cfg.tol("projection")
    input_data = [(cfg.pr, args.bott, tol_proj, cfg.tol("unitary"), n) for n in range(1, cfg.max_power + 1)]
    rows = pool_rows(worker_winding_row, input_data, args.progress)

    passed = all(
        row[3] <= cfg.tol("winding" if row[0] == 1 else "winding_power") for row in rows
    )
    summary = {
        "unitary": "bott" if args.bott else "symmetric",
        "alpha": cfg.pr.alpha,
        "eps": cfg.pr.eps,
        "trunc": cfg.pr.trunc,
    }
    return Report("winding", ["n", "winding", "expected", "error", "defect_unitary"], rows, summary, passed)


def cmd_projection(cfg: config.RunConfig, args: argparse.Namespace) -> Report:
    e = powers_rieffel.build_projection(cfg.pr)
    trace = algebra.trace(e)
    defect = powers_rieffel.projection_defect(e)
    chern = gauge.chern2(e)

    summary = {
        "alpha": cfg.pr.alpha,
        "trunc": cfg.pr.trunc,
        "modes": len(e),
        "trace": trace.real,
        "l1(e^2 - e)": defect,
        "chern2": chern,
        "chern2 expected": powers_rieffel.CHERN_NUMBER,
    }
    for name, value in powers_rieffel.bump_residuals(cfg.pr).items():
        summary[f"bump {name}"] = value

    if defect <= cfg.tol("projection"):
        u = powers_rieffel.build_unitary(e, cfg.tol("projection"))
        for name, value in powers_rieffel.unitary_derivative_residuals(e, u).items():
            summary[f"U residual {name}"] = value

    passed = (
        abs(trace - cfg.pr.alpha) <= cfg.tol("trace")
        and abs(chern - powers_rieffel.CHERN_NUMBER) <= cfg.tol("chern")
        and defect <= cfg.tol("projection")
    )
    return Report("projection", [], [], summary, passed)


def cmd_gauge_check(cfg: config.RunConfig, args: argparse.Namespace) -> Report:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    first_action = None
    for trial in range(cfg.trials):
        A = gauge.GaugePotential(
            tuple(
                algebra.random_element(rng, cfg.theta, cfg.n, radius=cfg.radius, kind="skew")
                for _ in range(3)
            )
        )
        if trial == 0:
            u = algebra.one(cfg.theta, cfg.n)
            first_action = gauge.cs_action(A, cfg.k)
        else:
            p = tuple(int(x) for x in rng.integers(-2, 3, size=3))
            u = algebra.monomial(cfg.theta, cfg.n, p, np.exp(2j * np.pi * rng.random()))
        defect = gauge.gauge_variation_defect(A, u, cfg.k, tol_u=cfg.tol("unitary"))
        scale = gauge.variation_scale(A, u, cfg.k)
        rows.append([trial, str(tuple(int(x) for x in u.modes[0])), defect, defect / scale])

    summary = {
        "theta": str(cfg.theta),
        "n": cfg.n,
        "k": cfg.k,
        "cs_action(A0)": first_action,
        "max relative defect": max(row[3] for row in rows),
    }
    passed = summary["max relative defect"] <= cfg.tol("gauge")
    return Report("gauge-check", ["trial", "u mode", "defect", "relative"], rows, summary, passed)


def cmd_residue(cfg: config.RunConfig, args: argparse.Namespace) -> Report:
    estimate = spectral.residue_estimate(cfg.t_grid)
    rel = abs(estimate - spectral.RESIDUE) / spectral.RESIDUE
    rows = [[x, spectral.heat_trace(x), (spectral.heat_trace(x) + 1) * (4 * math.pi * x) ** 1.5] for x in cfg.t_grid]

    if args.csv:
        with open(args.csv, "w", newline="") as csv_file:
            writer = csv.writer(csv_file)
            writer.writerow(["t", "heat_trace"])
            for x, heat, _ in rows:
                writer.writerow([repr(x), repr(heat)])

    summary = {
        "estimate": estimate,
        "expected 1/(4 pi^2)": spectral.RESIDUE,
        "relative error": rel,
        "free slope": spectral.loglog_slope(cfg.t_grid),
        "doubled / plain": spectral.residue_estimate(cfg.t_grid, scale=2.0) / estimate,
    }
    return Report("residue", ["t", "heat_trace", "normalized"], rows, summary, rel <= cfg.tol("residue"))


def cmd_selftest(cfg: config.RunConfig, args: argparse.Namespace) -> Report:
    results = selftest.run_selftest(cfg, progress=args.progress)
    rows = [[r.name, r.max_error, r.tolerance, "pass" if r.passed else "FAIL"] for r in results]
    summary = {"seed": cfg.seed, "n": cfg.n}
    return Report("selftest", ["suite", "max_error", "tolerance", "status"], rows, summary, all(r.passed for r in results))


def cmd_convergence(cfg: config.RunConfig, args: argparse.Namespace) -> Report:
    input_data = [
        dataclasses.replace(cfg.pr, trunc=K, samples=max(cfg.pr.samples, 8 * K))
        for K in sorted(cfg.truncations)
    ]
    rows = pool_rows(worker_convergence_row, input_data, args.progress)
    passed = all(
        later[col] < earlier[col] for earlier, later in zip(rows, rows[1:]) for col in CONVERGENCE_COLUMNS
    )
    summary = {"alpha": cfg.pr.alpha, "eps": cfg.pr.eps}
    return Report(
        "convergence",
        ["K", "l1(e^2 - e)", "defect_unitary", "chern2 error", "winding error"],
        rows,
        summary,
        passed,
    )


def cmd_export(cfg: config.RunConfig, args: argparse.Namespace) -> Report:
    if args.what == "potential":
        rng = np.random.default_rng(cfg.seed)
        A = gauge.GaugePotential(
            tuple(
                algebra.random_element(rng, cfg.theta, cfg.n, radius=cfg.radius, kind="skew")
                for _ in range(3)
            )
        )
        serialization.save_potential(A, cfg.k, args.output)
        return Report("export", [], [], {"what": args.what, "output": args.output})

    e = powers_rieffel.build_projection(cfg.pr)
    if args.what == "projection":
        element = e
    elif args.what == "bott":
        element = powers_rieffel.build_bott_unitary(e, cfg.tol("projection"))
    else:
        element = powers_rieffel.build_unitary(e, cfg.tol("projection"))
    serialization.save(element, args.output)
    return Report("export", [], [], {"what": args.what, "output": args.output, "modes": len(element)})


def cmd_import(cfg: config.RunConfig, args: argparse.Namespace) -> Report:
    if args.manifest:
        A, k = serialization.load_potential(args.path)
        summary = {"k": k, "n": A.n, "theta": str(A.theta), "cs_action": gauge.cs_action(A, k)}
        return Report("import", [], [], summary)

    a = serialization.load(args.path)
    l1, linf = algebra.norms(a)
    summary = {
        "n": a.n,
        "theta": str(a.theta),
        "modes": len(a),
        "support radius": a.support_radius(),
        "trace": algebra.trace(a),
        "l1": l1,
        "linf": linf,
        "hermitian": algebra.is_hermitian(a, 1e-12 * max(1.0, l1)),
        "defect_unitary": algebra.defect_unitary(a),
    }
    return Report("import", [], [], summary)


COMMANDS = {
    "winding": cmd_winding,
    "projection": cmd_projection,
    "gauge-check": cmd_gauge_check,
    "residue": cmd_residue,
    "selftest": cmd_selftest,
    "convergence": cmd_convergence,
    "export": cmd_export,
    "import": cmd_import,
}


def common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand; defaults are None so the config file can fill them."""
    parser = argparse.ArgumentParser(add_help=False, formatter_class=CustomFormatter)
    parser.add_argument("--config", metavar="PATH", help="INI file with [algebra] [powers_rieffel] [gauge] [tolerances] [run] sections")
    parser.add_argument("--theta12", type=float, help="deformation parameter (default 0)")
    parser.add_argument("--theta13", type=float, help="deformation parameter (default 0)")
    parser.add_argument("--theta23", type=float, help="deformation parameter (default 0)")
    parser.add_argument("--n", type=int, help="matrix size N (default 1)")
    parser.add_argument("--alpha", type=float, help="projection trace, theta12 of the projection (default 0.25)")
    parser.add_argument("--eps", type=float, help="bump ramp width (default 0.125)")
    parser.add_argument("--trunc", type=int, help="Fourier modes kept, |k| <= trunc (default 64)")
    parser.add_argument("--samples", type=int, help="sample grid size, at least 8 * trunc (default 1024)")
    parser.add_argument("--k", type=float, help="Chern-Simons coupling (default 1)")
    parser.add_argument("--seed", type=int, help="seed of randomized suites (default 0)")
    parser.add_argument("--trials", type=int, help="gauge-check trials (default 8)")
    parser.add_argument("--radius", type=int, help="support radius of random potentials (default 2)")
    parser.add_argument("--max-power", type=int, help="largest power in the winding table (default 2)")
    parser.add_argument("--truncations", help="truncations of the convergence study (default '16 32 64 128')")
    parser.add_argument("--t-grid", help="heat kernel times (default '0.01 0.005 0.002 0.001')")
    for name, value in config.TOLERANCES.items():
        parser.add_argument(f"--tol-{name.replace('_', '-')}", type=float, dest=f"tol_{name}", help=f"default {value}")
    parser.add_argument("--json", action="store_true", help="print the report as JSON")
    parser.add_argument("--no-progress", dest="progress", action="store_false", help="hide progress bars")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--debug-tty", metavar="TTY", help="send log records to other terminal, e.g. /dev/pts/1")
    return parser


def parse_args(argv: t.Optional[t.Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = common_parser()
    parser = argparse.ArgumentParser(
        prog="nctorus",
        description="Gauge theory on the noncommutative 3-torus\n"
        "\n"
        "Example:\n"
        "$ python -m nctorus winding --trunc 64 --max-power 2\n"
        "$ NCTORUS_THREADS=1 python -m nctorus selftest --seed 7 --json\n",
        usage="Please try to use -h, --help for more information's",
        epilog=" \n",
        formatter_class=CustomFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    winding = sub.add_parser("winding", parents=[common], formatter_class=CustomFormatter, help="winding numbers of U^n")
    winding.add_argument("--bott", action="store_true", help="use (1 - e) + e U3 instead of e U3 + (1 - e) U3*")
    sub.add_parser("projection", parents=[common], formatter_class=CustomFormatter, help="trace, defect and Chern number of e")
    sub.add_parser("gauge-check", parents=[common], formatter_class=CustomFormatter, help="gauge variation of the Chern-Simons action")
    residue = sub.add_parser("residue", parents=[common], formatter_class=CustomFormatter, help="zeta residue from heat trace")
    residue.add_argument("--csv", metavar="PATH", help="write (t, heat_trace) pairs")
    sub.add_parser("selftest", parents=[common], formatter_class=CustomFormatter, help="seeded invariant suites")
    sub.add_parser("convergence", parents=[common], formatter_class=CustomFormatter, help="truncation sweep of the projection")
    export = sub.add_parser("export", parents=[common], formatter_class=CustomFormatter, help="write an element file")
    export.add_argument("what", choices=["projection", "unitary", "bott", "potential"])
    export.add_argument("output", help="element file, or manifest for a potential")
    imp = sub.add_parser("import", parents=[common], formatter_class=CustomFormatter, help="read and summarize an element file")
    imp.add_argument("path")
    imp.add_argument("--manifest", action="store_true", help="path is a potential manifest")

    return parser.parse_args(argv)


def overrides(args: argparse.Namespace) -> t.Dict[str, t.Any]:
    return {key: getattr(args, key, None) for key in config.DEFAULTS}


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    args = parse_args(argv)
    debug.setup_stderr(args.debug_tty, args.verbose)

    try:
        cfg = config.build(args.config, overrides(args))
        report = COMMANDS[args.command](cfg, args)
    except (ConfigError, ElementFormatError, CompatibilityError, ArgumentError, OSError) as e:
        print(f"nctorus: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except PreconditionError as e:
        print(f"nctorus: precondition failed: {e}", file=sys.stderr)
        return EXIT_FAIL

    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL
