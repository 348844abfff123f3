"""Online time-optimal planning from precomputed triangular systems.

The planner enumerates constraint profiles (fewest active state constraints
first) and both leading input signs, evaluates the matching precomputed
system to get candidate switching times, and validates every candidate by
reconstructing the exact piecewise-polynomial trajectory.  The shortest
valid candidate wins; if the unconstrained profile already yields a valid
trajectory it is optimal and the search stops early.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import combinatorics as cb
from .bundles import Bundle, CompiledProfile, builtin_bundle, solve_system
from .model import Problem, problem_scale, validate_problem
from .trajectory import PiecewiseTrajectory, build_trajectory

# Tolerances are relative to the problem magnitude scale.
TERMINAL_REL_TOL = 1e-7
BOUND_REL_TOL = 1e-6
ORDER_SNAP_REL = 1e-9


class NoSolutionError(RuntimeError):
    """No profile produced a valid trajectory for this problem."""


@dataclass(frozen=True)
class Plan:
    """A validated time-optimal plan.

    ``times`` holds the absolute end times of all ``2**n - 1`` segments
    (collapsed segments repeat their predecessor's time) and ``trajectory``
    the exact piecewise-polynomial motion on the original, unmirrored
    problem.
    """

    problem: Problem
    sigma0: int
    profile: str
    times: tuple[float, ...]
    trajectory: PiecewiseTrajectory
    terminal_error: float
    guarded: bool = False
    # largest excursion beyond a state bound; zero for a strictly valid
    # plan, positive when only a best-effort plan exists because a boundary
    # state cannot be connected without briefly leaving the bound box
    bound_violation: float = 0.0

    @property
    def duration(self) -> float:
        return self.trajectory.duration


@dataclass
class PlanDiagnostics:
    """Search trace: what was attempted and why candidates were rejected."""

    attempts: list = field(default_factory=list)

    def record(self, profile: str, sigma0: int, outcome: str):
        self.attempts.append((profile, sigma0, outcome))


def problem_env(p: Problem) -> dict[str, float]:
    env = {
        "umax": p.umax,
        "umin": p.umin,
        "dx_1": p.xf[0] - p.x0[0],
    }
    for i in range(2, p.n + 1):
        lo, hi = p.state_bounds(i)
        env[f"x0_{i}"] = p.x0[i - 1]
        env[f"xf_{i}"] = p.xf[i - 1]
        env[f"xmin_{i}"] = lo
        env[f"xmax_{i}"] = hi
    return env


def segment_inputs(p: Problem, n: int, sigma0: int) -> tuple[float, ...]:
    """Constant input of each segment for the given leading sign."""
    pat = cb.switching_sequence(n, 1)
    pos, neg = (p.umax, p.umin) if sigma0 == 1 else (p.umin, p.umax)
    return tuple(pos if s == 1 else neg if s == -1 else 0.0 for s in pat.sigma)


def _profile_bounds_usable(p: Problem, bits: str, sigma0: int) -> bool:
    """Active cruise segments need a finite bound on the side they ride."""
    n = p.n
    pat = cb.switching_sequence(n, 1)
    for seg, bit in zip(cb.cruise_segments(n), bits):
        if bit != "1":
            continue
        i = abs(pat.constraint_map[seg - 1])
        side = (1 if pat.constraint_map[seg - 1] > 0 else -1) * sigma0
        lo, hi = p.state_bounds(i)
        if side > 0 and not np.isfinite(hi):
            return False
        if side < 0 and not np.isfinite(lo):
            return False
    return True


def _snap_times(free: dict[str, float], entry: CompiledProfile,
                n: int, snap: float):
    """Expand free times through the ties; reject badly ordered candidates.

    Tiny negative segment durations (roundoff from independent root solves)
    snap to zero; anything larger means the candidate is spurious.
    """
    assignment = {j: free[f"t{j}"] for j in entry.free_times}
    tmap = cb.TieMap(n=n, free_unknowns=entry.free_times, ties=entry.ties)
    times = tmap.full_times(assignment)
    prev = 0.0
    snapped = []
    for t in times:
        if t < prev - snap:
            return None
        t = max(t, prev)
        snapped.append(t)
        prev = t
    return tuple(snapped)


def _validate_candidate(p: Problem, times, sigma0: int, entry: CompiledProfile,
                        scale: float):
    """Returns ``(trajectory, terminal_error, bound_violation)`` or a reason."""
    inputs = segment_inputs(p, p.n, sigma0)
    traj = build_trajectory(p.n, p.x0, inputs, times)
    err = float(np.max(np.abs(traj.terminal_state() - np.asarray(p.xf))))
    if err > TERMINAL_REL_TOL * scale:
        return None, f"terminal error {err:.3e}"
    violation = 0.0
    for i in range(2, p.n + 1):
        lo, hi = p.state_bounds(i)
        vmin, vmax = traj.state_range(i)
        violation = max(violation, lo - vmin, vmax - hi)
    return (traj, err, violation), None


def plan(problem: Problem, bundle: Bundle | None = None,
         diagnostics: PlanDiagnostics | None = None) -> Plan:
    """Time-optimal plan for ``problem``; raises NoSolutionError on failure."""
    validate_problem(problem)
    n = problem.n
    if bundle is None:
        bundle = builtin_bundle(n)
    if bundle.n != n:
        raise ValueError(f"bundle is for order {bundle.n}, problem has order {n}")
    scale = problem_scale(problem)
    snap = ORDER_SNAP_REL * scale

    mirrored = problem.mirrored()
    envs = {1: problem_env(problem), -1: problem_env(mirrored)}

    tol = BOUND_REL_TOL * scale
    best: Plan | None = None
    best_soft: Plan | None = None
    # fastest duration meeting the terminal state regardless of state
    # bounds; once a valid plan reaches this lower bound nothing later can
    # beat it (activating constraints never speeds a profile up)
    lower_bound = np.inf
    prev_popcount = 0
    for entry in bundle.profiles:
        popcount = entry.bits.count("1")
        if popcount > prev_popcount and best is not None \
                and np.isfinite(lower_bound) \
                and best.duration <= lower_bound + ORDER_SNAP_REL * scale:
            break
        prev_popcount = popcount
        for sigma0 in (1, -1):
            if not _profile_bounds_usable(problem, entry.bits, sigma0):
                if diagnostics:
                    diagnostics.record(entry.bits, sigma0, "unbounded constraint side")
                continue
            env = envs[sigma0]
            system = entry.select_system(env)
            t_cap = np.inf if best is None else best.duration + snap
            for free in solve_system(system, env, t_cap):
                times = _snap_times(free, entry, n, snap)
                if times is None:
                    if diagnostics:
                        diagnostics.record(entry.bits, sigma0, "unordered times")
                    continue
                # a slower candidate can never displace the incumbent, and
                # because the incumbent already capped the duration lower
                # bound it cannot tighten that either
                if best is not None and times[-1] > best.duration + snap:
                    continue
                result, why = _validate_candidate(problem, times, sigma0, entry, scale)
                if result is None:
                    if diagnostics:
                        diagnostics.record(entry.bits, sigma0, why)
                    continue
                traj, err, violation = result
                lower_bound = min(lower_bound, times[-1])
                if violation <= tol:
                    # roundoff-level excursions within tolerance count as
                    # strictly valid and are not reported
                    cand = Plan(problem=problem, sigma0=sigma0,
                                profile=entry.bits, times=times,
                                trajectory=traj, terminal_error=err,
                                guarded=bool(system.guard_fns))
                    if best is None or cand.duration < best.duration:
                        best = cand
                else:
                    cand = Plan(problem=problem, sigma0=sigma0,
                                profile=entry.bits, times=times,
                                trajectory=traj, terminal_error=err,
                                guarded=bool(system.guard_fns),
                                bound_violation=violation)
                    if diagnostics:
                        diagnostics.record(entry.bits, sigma0,
                                           f"bound excursion {violation:.3e}")
                    if best_soft is None or _soft_better(cand, best_soft):
                        best_soft = cand
    if best is not None:
        return best
    if best_soft is not None:
        # a boundary state that cannot be connected without leaving the
        # bound box still gets the least-violating plan, flagged via
        # bound_violation (see model.boundary_feasible)
        return best_soft
    raise NoSolutionError(
        "no profile system produced a trajectory matching the terminal "
        "state; the problem is outside the supported structure")


def _soft_better(a: Plan, b: Plan) -> bool:
    """Order best-effort plans: smaller excursion first, then shorter."""
    if a.bound_violation != b.bound_violation:
        return a.bound_violation < b.bound_violation
    return a.duration < b.duration
