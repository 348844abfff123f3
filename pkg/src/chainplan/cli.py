"""Command-line front end: plan, sample, check, bench, bundle, report.

Plans are exchanged as self-contained JSON documents (problem echo, profile,
switching times, coefficient tensor), so ``sample`` and ``check`` can run
without the original problem definition.  ``report`` writes the sampled
trajectory as CSV together with rendered figures of the states and input.

Exit codes: 0 success, 1 usage error, 2 planning failure, 3 check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .bundles import Bundle, builtin_bundle, load_bundle
from .instances import random_problem
from .model import Problem, boundary_feasible, validate_problem
from .oracle import check_plan
from .planner import NoSolutionError, Plan, plan as plan_problem
from .trajectory import PiecewiseTrajectory

DOCUMENT_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PLAN_FAILURE = 2
EXIT_CHECK_FAILURE = 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# problem input: key=value files and flags (file entries win on conflict)

def _parse_vector(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def parse_problem_file(path: str) -> dict:
    """Plain-text problem definition, one ``key=value`` per line.

    Keys: ``n``, ``x0``, ``xf``, ``umin``, ``umax``, ``xmin``, ``xmax``;
    vectors are comma-separated.  Blank lines and ``#`` comments are skipped.
    """
    out: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "n":
                out["n"] = int(value)
            elif key in ("umin", "umax"):
                out[key] = float(value)
            elif key in ("x0", "xf", "xmin", "xmax"):
                out[key] = _parse_vector(value)
            else:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def _problem_from_args(args) -> Problem:
    fields: dict = {}
    for key in ("n", "x0", "xf", "umin", "umax", "xmin", "xmax"):
        value = getattr(args, key, None)
        if value is not None:
            fields[key] = value
    if getattr(args, "problem", None):
        from_file = parse_problem_file(args.problem)
        for key, value in from_file.items():
            if key in fields and fields[key] != value:
                print(f"warning: {key} from {args.problem} overrides the "
                      "command-line flag", file=sys.stderr)
        fields.update(from_file)
    missing = [k for k in ("n", "x0", "xf", "umin", "umax") if k not in fields]
    if missing:
        raise UsageError(f"missing problem fields: {', '.join(missing)}")
    fields.setdefault("xmin", ())
    fields.setdefault("xmax", ())
    problem = Problem(**fields)
    validate_problem(problem)
    return problem


# ---------------------------------------------------------------------------
# plan documents

def _bound_to_json(v: float):
    return None if math.isinf(v) else v


def _bound_from_json(v, sign: float) -> float:
    return sign * math.inf if v is None else float(v)


def plan_to_document(p: Plan, bundle_source: str) -> dict:
    problem = p.problem
    warnings = []
    if p.bound_violation > 0.0:
        warnings.append(
            f"best-effort plan: state bounds exceeded by {p.bound_violation:.6e} "
            "(boundary states cannot be connected inside the bound box)")
    return {
        "document_version": DOCUMENT_VERSION,
        "tool_version": __version__,
        "bundle": bundle_source,
        "problem": {
            "n": problem.n,
            "x0": list(problem.x0),
            "xf": list(problem.xf),
            "umin": problem.umin,
            "umax": problem.umax,
            "xmin": [_bound_to_json(v) for v in problem.xmin],
            "xmax": [_bound_to_json(v) for v in problem.xmax],
        },
        "profile": p.profile,
        "sigma0": p.sigma0,
        "times": list(p.times),
        "T": p.duration,
        "inputs": list(p.trajectory.inputs),
        "coeffs": p.trajectory.coeffs.tolist(),
        "terminal_error": p.terminal_error,
        "guarded": p.guarded,
        "bound_violation": p.bound_violation,
        "warnings": warnings,
    }


def document_to_plan(doc: dict) -> Plan:
    if doc.get("document_version") != DOCUMENT_VERSION:
        raise UsageError(
            f"unsupported plan document version {doc.get('document_version')!r}")
    raw = doc["problem"]
    problem = Problem(
        n=int(raw["n"]),
        x0=tuple(raw["x0"]),
        xf=tuple(raw["xf"]),
        umin=raw["umin"],
        umax=raw["umax"],
        xmin=tuple(_bound_from_json(v, -1.0) for v in raw["xmin"]),
        xmax=tuple(_bound_from_json(v, +1.0) for v in raw["xmax"]),
    )
    traj = PiecewiseTrajectory(
        n=problem.n,
        times=tuple(doc["times"]),
        inputs=tuple(doc["inputs"]),
        coeffs=np.asarray(doc["coeffs"], dtype=float),
    )
    return Plan(
        problem=problem,
        sigma0=int(doc["sigma0"]),
        profile=doc["profile"],
        times=tuple(doc["times"]),
        trajectory=traj,
        terminal_error=float(doc["terminal_error"]),
        guarded=bool(doc.get("guarded", False)),
        bound_violation=float(doc.get("bound_violation", 0.0)),
    )


def _write_json(doc: dict, out: str | None):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out in (None, "-"):
        print(text)
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _load_document(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _resolve_bundle(args, n: int) -> tuple[Bundle, str]:
    if getattr(args, "bundle", None):
        return load_bundle(args.bundle), args.bundle
    return builtin_bundle(n), f"builtin:n{n}"


# ---------------------------------------------------------------------------
# sampling

def sample_rows(traj: PiecewiseTrajectory, dt: float | None,
                count: int | None) -> np.ndarray:
    """Rows ``[t, x_1..x_n, u]`` on a uniform grid plus every switch.

    Input discontinuities get two rows at the same instant: the left-limit
    input first, then the right-limit one.
    """
    T = traj.duration
    if T <= 0.0:
        row = np.concatenate([[0.0], traj.state(0.0), [traj.input(0.0)]])
        return row.reshape(1, -1)
    if dt is not None:
        count = max(int(round(T / dt)), 1)
    elif count is None:
        count = 100
    ts = set(np.linspace(0.0, T, count + 1).tolist())
    ts.update(t for t in traj.times if 0.0 <= t <= T)
    rows = []
    for t in sorted(ts):
        rows.append(np.concatenate([[t], traj.state(t), [traj.input(t)]]))
        # duplicate the row when the input jumps at an interior switch
        if 0.0 < t < T and t in traj.times:
            # collapsed segments share this instant; the right limit is the
            # input of the first segment with actual extent after it
            j = len(traj.times) - 1 - traj.times[::-1].index(t)
            left = traj.input(t)
            right = traj.inputs[min(j + 1, len(traj.inputs) - 1)]
            if left != right:
                rows.append(np.concatenate([[t], traj.state(t), [right]]))
    return np.vstack(rows)


def write_csv(rows: np.ndarray, n: int, out: str | None):
    header = "t," + ",".join(f"x{i}" for i in range(1, n + 1)) + ",u"
    lines = [header]
    for row in rows:
        lines.append(",".join(format(v, ".17g") for v in row))
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# figures

def render_figures(p: Plan, out_states: str, out_input: str):
    """Render the state evolution and the input staircase to image files."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    traj = p.trajectory
    problem = p.problem
    T = max(traj.duration, 1e-9)
    ts = np.unique(np.concatenate([np.linspace(0.0, T, 600),
                                   np.asarray(traj.times)]))
    states = np.array([traj.state(t) for t in ts])

    fig, axes = plt.subplots(problem.n, 1, sharex=True,
                             figsize=(7, 2.2 * problem.n), squeeze=False)
    for i in range(problem.n):
        ax = axes[i, 0]
        ax.plot(ts, states[:, i], lw=1.5)
        if i >= 1:
            lo, hi = problem.state_bounds(i + 1)
            span = float(np.ptp(states[:, i])) or 1.0
            for b in (lo, hi):
                # skip bounds far outside the motion so they cannot squash
                # the axis
                if math.isfinite(b) and abs(b) < np.max(np.abs(states[:, i])) + 3 * span:
                    ax.axhline(b, color="tab:red", lw=0.8, ls="--")
        for t in traj.times[:-1]:
            ax.axvline(t, color="0.8", lw=0.6)
        ax.set_ylabel(f"x{i + 1}")
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel("t")
    fig.suptitle(f"profile {p.profile}, T = {traj.duration:.6g}")
    fig.tight_layout()
    fig.savefig(out_states, dpi=130)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 2.6))
    edges = [0.0, *traj.times]
    for j, u in enumerate(traj.inputs):
        ax.plot([edges[j], edges[j + 1]], [u, u], color="tab:blue", lw=1.8)
    for b in (problem.umin, problem.umax):
        ax.axhline(b, color="tab:red", lw=0.8, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("u")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_input, dpi=130)
    plt.close(fig)


# ---------------------------------------------------------------------------
# subcommands

def cmd_plan(args) -> int:
    problem = _problem_from_args(args)
    bundle, source = _resolve_bundle(args, problem.n)
    if not boundary_feasible(problem):
        print("warning: boundary states cannot be connected without leaving "
              "the bound box; expect a best-effort plan", file=sys.stderr)
    try:
        result = plan_problem(problem, bundle)
    except NoSolutionError as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return EXIT_PLAN_FAILURE
    _write_json(plan_to_document(result, source), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    p = document_to_plan(_load_document(args.plan))
    rows = sample_rows(p.trajectory, args.dt, args.count)
    write_csv(rows, p.problem.n, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    p = document_to_plan(_load_document(args.plan))
    if args.problem:
        declared = parse_problem_file(args.problem)
        echoed = {"n": p.problem.n, "x0": p.problem.x0, "xf": p.problem.xf,
                  "umin": p.problem.umin, "umax": p.problem.umax,
                  "xmin": p.problem.xmin, "xmax": p.problem.xmax}
        for key, value in declared.items():
            if echoed.get(key) != value:
                print(f"check failed: plan was made for a different problem "
                      f"({key} = {echoed.get(key)}, file says {value})")
                return EXIT_CHECK_FAILURE
    report = check_plan(p, rel_tol_terminal=args.terminal_tol,
                        rel_tol_bounds=args.bounds_tol,
                        rel_tol_continuity=args.continuity_tol)
    print(f"verdict: {'PASS' if report['ok'] else 'FAIL'}")
    print(f"terminal_error: {report['terminal_error']:.6e}")
    print(f"continuity_error: {report['continuity_error']:.6e}")
    print(f"bound_excursion: {report['bound_excursion']:.6e}")
    if p.bound_violation > 0.0:
        print(f"warning: best-effort plan with declared bound excursion "
              f"{p.bound_violation:.6e}")
    for issue in report["issues"]:
        print(f"issue: {issue}")
    return EXIT_OK if report["ok"] else EXIT_CHECK_FAILURE


def cmd_bench(args) -> int:
    if args.count <= 0:
        print("no instances requested; nothing to time")
        return EXIT_OK
    bundle, _ = _resolve_bundle(args, args.n)
    rng = np.random.default_rng(args.seed)
    problems = [random_problem(args.n, rng) for _ in range(args.count)]
    latencies = []
    failures = 0
    for problem in problems:
        start = time.perf_counter()
        try:
            plan_problem(problem, bundle)
        except NoSolutionError:
            failures += 1
            continue
        latencies.append(time.perf_counter() - start)
    lat = np.asarray(latencies)
    print(f"n={args.n} instances={args.count} seed={args.seed}")
    print(f"failures: {failures}")
    if lat.size:
        print(f"median_ms: {1e3 * np.median(lat):.4f}")
        print(f"p95_ms: {1e3 * np.percentile(lat, 95):.4f}")
        print(f"max_ms: {1e3 * np.max(lat):.4f}")
    return EXIT_OK if failures == 0 else EXIT_PLAN_FAILURE


def cmd_bundle(args) -> int:
    try:
        if args.path:
            bundle = load_bundle(args.path)
        else:
            bundle = builtin_bundle(args.n)
    except Exception as exc:
        print(f"bundle invalid: {exc}")
        return EXIT_CHECK_FAILURE
    if args.action == "verify":
        print(f"OK: order {bundle.n}, {len(bundle.profiles)} profiles")
        return EXIT_OK
    print(f"bundle for chain order {bundle.n}")
    print(f"parameters: {', '.join(bundle.parameters)}")
    for profile in bundle.profiles:
        print(f"profile {profile.bits}: free times "
              f"{', '.join(f't{j}' for j in profile.free_times)}; "
              f"{len(profile.systems)} system(s)")
        for k, system in enumerate(profile.systems):
            degrees = ", ".join(f"{s.unknown}:deg{s.degree}"
                                for s in system.steps)
            kind = "default" if not system.guard_fns \
                else f"{len(system.guard_fns)} guard(s)"
            print(f"  system {k} ({kind}): {degrees}")
    return EXIT_OK


def cmd_report(args) -> int:
    import os

    problem = _problem_from_args(args)
    bundle, source = _resolve_bundle(args, problem.n)
    try:
        result = plan_problem(problem, bundle)
    except NoSolutionError as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return EXIT_PLAN_FAILURE
    os.makedirs(args.out_dir, exist_ok=True)
    plan_path = os.path.join(args.out_dir, "plan.json")
    csv_path = os.path.join(args.out_dir, "trajectory.csv")
    states_path = os.path.join(args.out_dir, "states.png")
    input_path = os.path.join(args.out_dir, "input.png")
    _write_json(plan_to_document(result, source), plan_path)
    rows = sample_rows(result.trajectory, args.dt, args.count)
    write_csv(rows, problem.n, csv_path)
    render_figures(result, states_path, input_path)
    for path in (plan_path, csv_path, states_path, input_path):
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------

def _add_problem_flags(sub):
    sub.add_argument("--n", type=int, help="chain order")
    sub.add_argument("--x0", type=_parse_vector, help="initial state, comma-separated")
    sub.add_argument("--xf", type=_parse_vector, help="final state, comma-separated")
    sub.add_argument("--umin", type=float, help="lower input bound (< 0)")
    sub.add_argument("--umax", type=float, help="upper input bound (> 0)")
    sub.add_argument("--xmin", type=_parse_vector,
                     help="lower bounds of x2..xn, comma-separated")
    sub.add_argument("--xmax", type=_parse_vector,
                     help="upper bounds of x2..xn, comma-separated")
    sub.add_argument("--problem", help="key=value problem file (wins over flags)")
    sub.add_argument("--bundle", help="bundle JSON path (default: builtin)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chainplan",
                     description="Time-optimal trajectory planning for "
                                 "integrator chains")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("plan", help="plan a trajectory, emit a plan document")
    _add_problem_flags(sub)
    sub.add_argument("--out", help="output file ('-' for stdout)")
    sub.set_defaults(func=cmd_plan)

    sub = subs.add_parser("sample", help="sample a plan document as CSV")
    sub.add_argument("--plan", required=True, help="plan document path")
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--dt", type=float, help="sampling step")
    group.add_argument("--count", type=int, help="number of uniform intervals")
    sub.add_argument("--out", help="output file ('-' for stdout)")
    sub.set_defaults(func=cmd_sample)

    sub = subs.add_parser("check", help="audit a plan document")
    sub.add_argument("--plan", required=True, help="plan document path")
    sub.add_argument("--problem", help="problem file to cross-check the echo")
    sub.add_argument("--terminal-tol", type=float, default=1e-7)
    sub.add_argument("--bounds-tol", type=float, default=1e-6)
    sub.add_argument("--continuity-tol", type=float, default=1e-10)
    sub.set_defaults(func=cmd_check)

    sub = subs.add_parser("bench", help="time random instances")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--count", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--bundle", help="bundle JSON path (default: builtin)")
    sub.set_defaults(func=cmd_bench)

    sub = subs.add_parser("bundle", help="inspect or verify a bundle")
    sub.add_argument("action", choices=("inspect", "verify"))
    sub.add_argument("path", nargs="?", help="bundle JSON path")
    sub.add_argument("--n", type=int, default=3,
                     help="builtin bundle order when no path is given")
    sub.set_defaults(func=cmd_bundle)

    sub = subs.add_parser("report",
                          help="plan, then write CSV samples and figures")
    _add_problem_flags(sub)
    sub.add_argument("--out-dir", required=True, help="output directory")
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--dt", type=float, help="sampling step")
    group.add_argument("--count", type=int, help="number of uniform intervals")
    sub.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
