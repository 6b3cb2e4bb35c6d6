"""Command-line front end: ``hbvm <command> [options]``.

Every command writes CSV (to stdout or ``--out``) whose first lines are
``#`` comments recording the parameters. Exit status is 0 on success,
1 when a verification fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile

import numpy as np

from . import blended, integrator, partition, systems, tableau
from .errors import HbvmError, InvalidArgumentError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def fmt(x) -> str:
    return f"{float(x):.16g}"


def fmt4(x) -> str:
    return f"{float(x):.4f}"


class Report:
    """Collects comment lines and CSV rows, then writes them in one go."""

    def __init__(self, command: str, params: dict):
        self.lines = ["# hbvm " + command + " " + " ".join(f"{k}={v}" for k, v in params.items())]

    def comment(self, text: str):
        self.lines.append("# " + text)

    def row(self, *fields):
        self.lines.append(",".join(str(f) for f in fields))

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def write(self, out: str | None, stream=None):
        if out is None:
            (stream or sys.stdout).write(self.text())
            return
        directory = os.path.dirname(os.path.abspath(out))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hbvm-", suffix=".csv")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.text())
        os.replace(tmp, out)


def _initial_state(args, system):
    return np.array([args.q0, args.p0] if system.dim == 2 else [args.q0] * system.dim, dtype=float)


def _cfg(args):
    return blended.BlendedConfig(gamma=args.gamma)


def _require_ks(args):
    if args.k is None or args.s is None:
        raise InvalidArgumentError("--k and --s are required")
    if not 1 <= args.s <= args.k:
        raise InvalidArgumentError(f"need k >= s >= 1, got k={args.k}, s={args.s}")


# ---------------------------------------------------------------------------
# commands; each returns (Report, exit status)


def cmd_tableau(args):
    _require_ks(args)
    tab = tableau.hbvm_tableau(args.k, args.s)
    rep = Report("tableau", {"k": args.k, "s": args.s})
    rep.row("i", "t", "w", *[f"a{j + 1}" for j in range(tab.k)])
    for i in range(tab.k):
        rep.row(i + 1, fmt(tab.nodes[i]), fmt(tab.weights[i]), *map(fmt, tab.A[i]))
    return rep, EXIT_OK


def cmd_isospectral(args):
    _require_ks(args)
    res = tableau.verify_isospectral(args.k, args.s, args.tol)
    rep = Report("isospectral", {"k": args.k, "s": args.s, "tol": args.tol})
    rep.comment(f"zero_count={res.zero_count} expected={args.k - args.s}")
    rep.comment(f"max_pairing_error={res.max_pairing_error:.3e}")
    rep.comment("PASS" if res.passed else "FAIL")
    rep.row("index", "re", "im")
    order = np.lexsort((res.eigenvalues.imag, res.eigenvalues.real))
    for i, lam in enumerate(res.eigenvalues[order]):
        rep.row(i + 1, fmt(lam.real), fmt(lam.imag))
    return rep, EXIT_OK if res.passed else EXIT_FAIL


def gamma_table(s_max: int, include_s1: bool = False):
    """Rows ``(s, gamma_opt, rho_star)`` from the spectrum of the Gauss-s matrix."""
    if not 1 <= s_max <= 10:
        raise InvalidArgumentError(f"s_max must be in [1, 10], got {s_max}")
    rows = []
    for s in range(1 if include_s1 else 2, s_max + 1):
        mu = tableau.eigenvalues(tableau.x_matrix(s))
        rows.append((s, blended.gamma_opt(mu), blended.rho_star_optimal(mu)))
    return rows


def cmd_gamma_table(args):
    rep = Report("gamma-table", {"s_max": args.s_max, "include_s1": args.include_s1})
    rep.row("s", "gamma", "rho_star")
    for s, g, r in gamma_table(args.s_max, args.include_s1):
        rep.row(s, fmt4(g), fmt4(r))
    return rep, EXIT_OK


def condition_sweep(s: int, k_max: int, selection: str):
    """``(k, cond C(k, s))`` for k from s to k_max; the rule of thumb only visits even gaps."""
    rows = []
    for k in range(s, k_max + 1):
        if selection == "rule-of-thumb" and (k - s) % 2:
            continue
        part = integrator.make_partition(k, s, selection)
        rows.append((k, partition.condition_number(part.C)))
    return rows


def cmd_cond(args):
    if args.s is None:
        raise InvalidArgumentError("--s is required")
    if args.k_max < args.s:
        raise InvalidArgumentError("--k-max must be >= --s")
    rep = Report("cond", {"s": args.s, "k_max": args.k_max, "selection": args.selection})
    rep.row("k", "cond")
    for k, c in condition_sweep(args.s, args.k_max, args.selection):
        rep.row(k, fmt(c))
    return rep, EXIT_OK


def cmd_amplification(args):
    if args.s is None:
        raise InvalidArgumentError("--s is required")
    k = args.k if args.k is not None else args.s
    if k < args.s:
        raise InvalidArgumentError(f"need k >= s, got k={k}, s={args.s}")
    part = integrator.make_partition(k, args.s)
    an = blended.linear_analysis(part.C, args.gamma, args.grid)
    rep = Report("amplification", {"k": k, "s": args.s, "gamma": args.gamma, "grid": args.grid})
    rep.comment(f"gamma={fmt(an.gamma)} rho_star={fmt(an.rho_star)}")
    rep.row("y", "rho")
    for q, r in zip(an.q_grid, an.rho):
        rep.row(fmt(q.imag), fmt(r))
    return rep, EXIT_OK


def cmd_integrate(args):
    _require_ks(args)
    system = systems.get_problem(args.problem)
    y0 = _initial_state(args, system)
    res = integrator.integrate(system, y0, args.steps * args.h, args.h, args.k, args.s,
                               _cfg(args), args.selection)
    rep = Report("integrate", {"problem": args.problem, "k": args.k, "s": args.s, "h": args.h,
                               "steps": args.steps, "q0": args.q0, "p0": args.p0})
    rep.row("t", *[f"y{i + 1}" for i in range(system.dim)], "H", "iterations")
    iters = [0] + list(res.iterations)
    for t, y, e, it in zip(res.times, res.states, res.energy, iters):
        rep.row(fmt(t), *map(fmt, y), fmt(e), it)
    for f in res.failures:
        rep.comment(f"failure step={f['step']} {f['error']}")
    return rep, EXIT_OK if res.completed else EXIT_FAIL


def cmd_energy(args):
    _require_ks(args)
    system = systems.get_problem(args.problem)
    y0 = _initial_state(args, system)
    res = integrator.integrate(system, y0, args.steps * args.h, args.h, args.k, args.s,
                               _cfg(args), args.selection)
    rep = Report("energy", {"problem": args.problem, "k": args.k, "s": args.s, "h": args.h,
                            "steps": args.steps, "q0": args.q0, "p0": args.p0})
    rep.row("problem", "k", "s", "h", "steps", "H0", "max_drift", "max_rel_drift")
    rep.row(args.problem, args.k, args.s, fmt(args.h), len(res.states) - 1, fmt(res.energy[0]),
            fmt(res.max_energy_drift()), fmt(res.max_relative_energy_drift()))
    return rep, EXIT_OK if res.completed else EXIT_FAIL


def cmd_order(args):
    _require_ks(args)
    system = systems.get_problem(args.problem)
    y0 = _initial_state(args, system)
    t_end = args.t_end
    hs = args.h / 2.0 ** np.arange(args.levels)
    exact = None
    if args.problem == "pendulum" and args.p0 == 0.0:
        exact = systems.pendulum_exact(t_end, args.q0)
    elif args.problem == "harmonic":
        exact = systems.harmonic_exact(t_end, y0)
    hs, errs = integrator.convergence_errors(system, y0, t_end, args.k, args.s, hs, exact, _cfg(args))
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    rep = Report("order", {"problem": args.problem, "k": args.k, "s": args.s, "h": args.h,
                           "levels": args.levels, "t_end": t_end, "q0": args.q0, "p0": args.p0})
    rep.comment(f"reference={'analytic' if exact is not None else 'h_min/64'} slope={slope:.4f}")
    rep.row("h", "error")
    for h, e in zip(hs, errs):
        rep.row(fmt(h), fmt(e))
    return rep, EXIT_OK


COMMANDS = {
    "tableau": cmd_tableau,
    "isospectral": cmd_isospectral,
    "gamma-table": cmd_gamma_table,
    "cond": cmd_cond,
    "amplification": cmd_amplification,
    "integrate": cmd_integrate,
    "order": cmd_order,
    "energy": cmd_energy,
}


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbvm", description="Hamiltonian Boundary Value Methods HBVM(k,s).")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--k", type=_positive_int)
    parser.add_argument("--s", type=_positive_int)
    parser.add_argument("--h", type=_positive_float, default=0.1)
    parser.add_argument("--steps", type=int, default=100)
    parser.add_argument("--problem", choices=sorted(systems.PROBLEMS), default="pendulum")
    parser.add_argument("--gamma", type=_positive_float, default=None,
                        help="blending parameter (default: optimal)")
    parser.add_argument("--selection", choices=integrator.SELECTIONS, default="rule-of-thumb")
    parser.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    parser.add_argument("--s-max", type=_positive_int, default=10)
    parser.add_argument("--include-s1", action="store_true")
    parser.add_argument("--k-max", type=_positive_int, default=100)
    parser.add_argument("--tol", type=_positive_float, default=1e-9)
    parser.add_argument("--grid", type=int, default=200)
    parser.add_argument("--levels", type=int, default=4)
    parser.add_argument("--t-end", type=_positive_float, default=10.0)
    parser.add_argument("--q0", type=float, default=1.0)
    parser.add_argument("--p0", type=float, default=0.0)
    return parser


def main(argv=None, stdout=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.steps < 0:
        parser.print_usage(sys.stderr)
        print("hbvm: error: --steps must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        rep, status = COMMANDS[args.command](args)
    except InvalidArgumentError as exc:
        parser.print_usage(sys.stderr)
        print(f"hbvm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HbvmError as exc:
        print(f"hbvm: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rep.write(args.out, stdout)
    return status


def run(argv) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout; handy for tests."""
    buf = io.StringIO()
    status = main(argv, buf)
    return status, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
