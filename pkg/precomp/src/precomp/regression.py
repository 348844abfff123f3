"""Numeric regression check for generated bundles.

Replays a third-order reference scenario with a known closed-form answer
directly against the serialized bundle document, using an independent
evaluator for the expression trees.  This exercises the full chain —
condition generation, elimination, guard derivation and serialization —
without importing the online planner.

The scenario starts at position -2 with velocity 0.5 and acceleration 1,
ends at rest at position +2, with symmetric unit input bounds and no state
bounds.  Its parameters sit exactly on the singular surface of the
unconstrained default system, so the check also verifies that a guard is
present, fires, and that the substitute system delivers the total duration
``(400/3)**(1/3) - 1``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

REFERENCE_ENV = {
    "umax": 1.0,
    "umin": -1.0,
    "dx_1": 4.0,
    "x0_2": 0.5,
    "x0_3": 1.0,
    "xf_2": 0.0,
    "xf_3": 0.0,
}

REFERENCE_TOTAL = (400.0 / 3.0) ** (1.0 / 3.0) - 1.0
REFERENCE_ROUNDED = {"t1": 0.28, "t3": 2.83, "t7": 4.11}

GUARD_REL_TOL = 1e-9
ROUNDED_ABS_TOL = 5e-3
TOTAL_ABS_TOL = 1e-10


def eval_tree(tree, env: dict[str, float]) -> float:
    """Evaluate a serialized expression tree over numeric parameter values."""
    if isinstance(tree, str):
        return float(env[tree])
    op = tree[0]
    if op == "rat":
        return float(Fraction(int(tree[1]), int(tree[2])))
    if op == "^":
        return eval_tree(tree[1], env) ** int(tree[2])
    args = [eval_tree(a, env) for a in tree[1:]]
    if op == "+":
        return sum(args)
    if op == "-":
        return args[0] - sum(args[1:]) if len(args) > 1 else -args[0]
    if op == "*":
        out = 1.0
        for a in args:
            out *= a
        return out
    if op == "/":
        return args[0] / args[1]
    raise ValueError(f"unknown expression node {op!r}")


def guard_vanishes(divisor_terms, env: dict[str, float],
                   rel_tol: float = GUARD_REL_TOL) -> bool:
    """A divisor (list of monomial trees) vanishes relative to its terms."""
    terms = [eval_tree(t, env) for t in divisor_terms]
    mag = max((abs(t) for t in terms), default=0.0)
    return abs(sum(terms)) <= rel_tol * max(mag, 1.0)


def select_system(profile_doc: dict, env: dict[str, float]) -> dict:
    """First system (deepest substitutions first) whose guards all vanish."""
    for system in profile_doc["systems"]:
        if all(guard_vanishes(g, env) for g in system["guards"]):
            return system
    raise ValueError("no applicable system: the guard-free default is missing")


def solve_numeric(system: dict, env: dict[str, float],
                  eps: float = 1e-9) -> list[dict[str, float]]:
    """All real nonnegative assignments of the triangular solve steps."""
    out: list[dict[str, float]] = []

    def rec(k: int, env_k: dict[str, float]):
        if k == len(system["steps"]):
            out.append({s["unknown"]: env_k[s["unknown"]]
                        for s in system["steps"]})
            return
        step = system["steps"][k]
        coeffs = [eval_tree(c, env_k) for c in step["coeffs"]]
        if not any(coeffs):
            return
        for r in np.roots(coeffs):
            if abs(r.imag) > 1e-8 * (1.0 + abs(r.real)) or r.real < -eps:
                continue
            rec(k + 1, {**env_k, step["unknown"]: max(float(r.real), 0.0)})

    rec(0, dict(env))
    return out


def regression_check(bundle_doc: dict) -> dict:
    """Run the reference scenario against a bundle document.

    Returns a report dict with an ``ok`` flag and per-check details; the
    bundle must be for chain order 3 and contain the all-zeros profile.
    """
    report: dict = {"ok": False, "issues": []}
    if bundle_doc.get("n") != 3:
        report["issues"].append(f"bundle order is {bundle_doc.get('n')}, need 3")
        return report
    profile = next((p for p in bundle_doc["profiles"] if p["bits"] == "000"),
                   None)
    if profile is None:
        report["issues"].append("profile 000 missing from bundle")
        return report

    env = dict(REFERENCE_ENV)
    system = select_system(profile, env)
    report["guard_fired"] = bool(system["guards"])
    if not system["guards"]:
        report["issues"].append(
            "reference parameters are singular but no guard fired")

    best = None
    for sol in solve_numeric(system, env):
        ts = [sol.get(f"t{j}") for j in profile["free_times"]]
        if any(t is None for t in ts) or any(
                b < a - 1e-9 for a, b in zip(ts, ts[1:])):
            continue
        if best is None or sol[f"t{profile['free_times'][-1]}"] < \
                best[f"t{profile['free_times'][-1]}"]:
            best = sol
    if best is None:
        report["issues"].append("no ordered nonnegative solution found")
        return report
    report["times"] = dict(best)

    err_total = abs(best["t7"] - REFERENCE_TOTAL)
    report["total_time_error"] = err_total
    if err_total > TOTAL_ABS_TOL:
        report["issues"].append(
            f"total duration off by {err_total:.3e} (tol {TOTAL_ABS_TOL:.0e})")
    for name, want in REFERENCE_ROUNDED.items():
        err = abs(best[name] - want)
        if err > ROUNDED_ABS_TOL:
            report["issues"].append(
                f"{name} = {best[name]:.6f}, expected {want} +- {ROUNDED_ABS_TOL}")

    report["ok"] = not report["issues"]
    return report
