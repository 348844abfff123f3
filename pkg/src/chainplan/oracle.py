"""Independent verification oracles for planned trajectories.

Nothing here shares code with the planner's trajectory construction: plans
are re-checked by Runge-Kutta integration of the chain dynamics (exact for
polynomial solutions of these orders when steps align with the switches), by
a closed-form minimum time for the double integrator, and by a feasibility
bisection for the input-constrained triple integrator.
"""

from __future__ import annotations

import math

import numpy as np

from .model import Problem, problem_scale

RK4_STEPS_PER_SEGMENT = 16


def rk4_states(n: int, x0, inputs, times, steps_per_segment: int = RK4_STEPS_PER_SEGMENT):
    """Integrate the chain through the plan's segments; returns final state.

    The chain with constant input has polynomial solutions of degree at most
    ``n``; classical RK4 reproduces polynomials up to degree four exactly,
    so for ``n <= 4`` the only error is floating-point roundoff.
    """
    x = np.asarray(x0, dtype=float).copy()
    prev = 0.0
    for t_end, u in zip(times, inputs):
        d = t_end - prev
        if d > 0.0:
            h = d / steps_per_segment

            def f(state):
                out = np.empty(n)
                out[:-1] = state[1:]
                out[-1] = u
                return out

            for _ in range(steps_per_segment):
                k1 = f(x)
                k2 = f(x + 0.5 * h * k1)
                k3 = f(x + 0.5 * h * k2)
                k4 = f(x + h * k3)
                x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        prev = t_end
    return x


def double_integrator_time(p: Problem) -> float:
    """Closed-form minimum time for order 2 with asymmetric bounds.

    Tries the peak (accelerate-then-brake) and valley arcs, switching to a
    cruise at the velocity bound when the extremal velocity would exceed it.
    Returns ``inf`` when neither arc is admissible.
    """
    if p.n != 2:
        raise ValueError("closed form only covers order 2")
    dx = p.xf[0] - p.x0[0]
    v0, vf = p.x0[1], p.xf[1]
    vlo, vhi = p.state_bounds(2)
    best = math.inf

    for up, down in ((p.umax, p.umin), (p.umin, p.umax)):
        # velocity rises (falls) with `up` to an extremal value ve, then
        # returns with `down`; areas under the two arcs must add up to dx
        ve_sq = (dx + v0 * v0 / (2.0 * up) - vf * vf / (2.0 * down)) \
            / (1.0 / (2.0 * up) - 1.0 / (2.0 * down))
        if ve_sq >= 0.0:
            ve = math.sqrt(ve_sq) if up > 0 else -math.sqrt(ve_sq)
            t1 = (ve - v0) / up
            t2 = (vf - ve) / down
            if t1 >= -1e-12 and t2 >= -1e-12 and vlo <= ve <= vhi:
                best = min(best, max(t1, 0.0) + max(t2, 0.0))
        # trapezoid: cruise at the bound the extremal arc would overrun
        vc = vhi if up > 0 else vlo
        t1 = (vc - v0) / up
        t2 = (vf - vc) / down
        if t1 >= -1e-12 and t2 >= -1e-12:
            d_arcs = (vc * vc - v0 * v0) / (2.0 * up) \
                + (vf * vf - vc * vc) / (2.0 * down)
            if vc != 0.0:
                tc = (dx - d_arcs) / vc
                if tc >= -1e-12:
                    best = min(best, max(t1, 0.0) + max(tc, 0.0) + max(t2, 0.0))
    return best


def _support_margin(p: Problem, T: float, lam: np.ndarray) -> np.ndarray:
    """Support-function slack of the reachable set in directions ``lam``.

    For the triple integrator the state reached at ``T`` is the free
    response plus ``int_0^T g(s) u(T - s) ds`` with ``g(s) = [s^2/2, s, 1]``.
    The target is reachable iff for every direction the support of that
    control integral is at least the projection of the required correction.
    ``lam`` has one direction per row; the per-row slack is returned.
    """
    x0 = p.x0
    free = np.array([
        x0[0] + x0[1] * T + x0[2] * T * T / 2.0,
        x0[1] + x0[2] * T,
        x0[2],
    ])
    d = np.asarray(p.xf) - free

    l1, l2, l3 = lam[:, 0], lam[:, 1], lam[:, 2]

    def antiderivative(s):
        # integral of q(s) = l1 s^2/2 + l2 s + l3
        return l1 * s**3 / 6.0 + l2 * s * s / 2.0 + l3 * s

    # sign changes of the quadratic q on [0, T]
    disc = l2 * l2 - 2.0 * l1 * l3
    sq = np.sqrt(np.maximum(disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(l1 != 0.0, (-l2 - sq) / l1, np.where(l2 != 0.0, -l3 / l2, 0.0))
        r2 = np.where(l1 != 0.0, (-l2 + sq) / l1, r1)
    r1, r2 = np.minimum(r1, r2), np.maximum(r1, r2)
    valid = np.where(disc >= 0.0, 1.0, 0.0)
    b1 = np.clip(np.where(valid > 0, r1, 0.0), 0.0, T)
    b2 = np.clip(np.where(valid > 0, r2, 0.0), 0.0, T)

    support = np.zeros(len(lam))
    for lo, hi in ((np.zeros_like(b1), b1), (b1, b2), (b2, np.full_like(b1, T))):
        piece = antiderivative(hi) - antiderivative(lo)
        support += np.where(piece >= 0.0, p.umax * piece, p.umin * piece)
    return support - lam @ d


def _reachable(p: Problem, T: float, lam_grid: np.ndarray, scale: float) -> bool:
    """Support-based reachability test with local refinement."""
    from scipy.optimize import minimize

    margins = _support_margin(p, T, lam_grid)
    tol = 1e-11 * scale * max(T, 1.0) ** 3
    if np.min(margins) < -tol:
        return False
    if np.min(margins) > 5e-2 * scale * max(T, 1.0) ** 3:
        return True  # clearly inside; no refinement needed
    # polish the most suspicious directions: the violating cone can be
    # narrow enough to slip between grid points near the boundary
    for k in np.argsort(margins)[:8]:
        res = minimize(lambda v: _support_margin(p, T, v.reshape(1, 3))[0]
                       / max(np.linalg.norm(v), 1e-12),
                       lam_grid[k], method="Nelder-Mead",
                       options={"fatol": tol * 1e-3, "xatol": 1e-10, "maxiter": 600})
        if res.fun < -tol:
            return False
    return True


def _sphere_grid(m: int) -> np.ndarray:
    k = np.arange(m) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / m)
    theta = np.pi * (1.0 + math.sqrt(5.0)) * k
    return np.column_stack([np.sin(phi) * np.cos(theta),
                            np.sin(phi) * np.sin(theta),
                            np.cos(phi)])


def triple_integrator_time_bracket(p: Problem, width: float = 1e-4,
                                   scan_points: int = 600,
                                   t_hi: float | None = None):
    """Bisection bracket for the minimum time of an input-bound-only order-3
    problem; returns ``(lo, hi)`` with the optimum inside.

    Reachability of the target at an exact horizon is decided through the
    support function of the (convex) fixed-time reachable set.  Because the
    free dynamics drift, these sets are *not* nested in the horizon: the
    target can leave and re-enter them.  The minimum time is the lower edge
    of the first feasibility window, so a fine scan locates that window
    before bisection refines its edge.
    """
    if p.n != 3:
        raise ValueError("bracket oracle only covers order 3")
    lam_grid = _sphere_grid(16384)
    scale = problem_scale(p)
    if t_hi is not None:
        if not _reachable(p, t_hi, lam_grid, scale):
            raise RuntimeError(f"supplied horizon {t_hi} is not feasible")
        t_any = t_hi
    else:
        t_any = 1e-3
        for _ in range(120):
            if _reachable(p, t_any, lam_grid, scale):
                break
            t_any *= 1.6
        else:
            raise RuntimeError("no feasible horizon found")
    # downward scan for the earliest feasible window
    grid = np.linspace(0.0, t_any, scan_points + 1)
    hi = t_any
    lo = grid[-2]
    for a, b in zip(grid[:-1], grid[1:]):
        if b > 0.0 and _reachable(p, b, lam_grid, scale):
            lo, hi = a, b
            break
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if _reachable(p, mid, lam_grid, scale):
            hi = mid
        else:
            lo = mid
    return lo, hi


def bisection_T_oracle(x0, xf, umin: float, umax: float,
                       t_lo: float = 0.0, t_hi: float | None = None,
                       tol: float = 1e-4):
    """Bracket ``(lo, hi)`` on the minimal feasible horizon, width <= tol.

    Thin front end over :func:`triple_integrator_time_bracket` for
    input-bound-only order-3 problems.  ``t_hi``, when given, must be a
    feasible horizon; ``t_lo`` defaults to zero.
    """
    if tuple(float(v) for v in x0) == tuple(float(v) for v in xf):
        return 0.0, tol
    p = Problem(n=3, x0=x0, xf=xf, umin=umin, umax=umax)
    lo, hi = triple_integrator_time_bracket(p, width=tol, t_hi=t_hi)
    return max(lo, t_lo), hi


def check_plan(plan, rel_tol_terminal: float = 1e-7,
               rel_tol_bounds: float = 1e-6,
               rel_tol_continuity: float = 1e-10,
               samples_per_segment: int = 33) -> dict:
    """Independent audit of a plan; returns a report with an ``ok`` flag.

    Verifies the final state by RK4 integration, state continuity across
    segment boundaries, input admissibility and state bounds on a dense
    sample grid.  Tolerances are relative to the problem magnitude.
    """
    p = plan.problem
    scale = problem_scale(p)
    traj = plan.trajectory
    report: dict = {"issues": []}

    final = rk4_states(p.n, p.x0, traj.inputs, traj.times)
    term_err = float(np.max(np.abs(final - np.asarray(p.xf))))
    report["terminal_error"] = term_err
    if term_err > rel_tol_terminal * scale:
        report["issues"].append(f"terminal state off by {term_err:.3e}")
    poly_err = float(np.max(np.abs(traj.terminal_state() - np.asarray(p.xf))))
    if poly_err > rel_tol_terminal * scale:
        report["issues"].append(
            f"polynomial terminal state off by {poly_err:.3e}")

    if any(b < a for a, b in zip(traj.times, traj.times[1:])) \
            or (traj.times and traj.times[0] < 0.0):
        report["issues"].append("switching times are not nondecreasing")

    cont_err = 0.0
    prev = 0.0
    x = np.asarray(p.x0, dtype=float)
    for j in range(len(traj.times)):
        d = traj.times[j] - prev
        seg_end = np.array([np.polyval(traj.coeffs[j, i], d) for i in range(p.n)])
        seg_start = np.array([np.polyval(traj.coeffs[j, i], 0.0) for i in range(p.n)])
        cont_err = max(cont_err, float(np.max(np.abs(seg_start - x))))
        x = seg_end
        prev = traj.times[j]
    report["continuity_error"] = cont_err
    if cont_err > rel_tol_continuity * max(scale, 1.0):
        report["issues"].append(f"discontinuity of {cont_err:.3e} at a switch")

    u_tol = rel_tol_bounds * scale
    for u in traj.inputs:
        if u < p.umin - u_tol or u > p.umax + u_tol:
            report["issues"].append(f"input {u} outside bounds")
            break

    grid = np.linspace(0.0, traj.duration, samples_per_segment * max(len(traj.times), 1))
    states = np.array([traj.state(t) for t in grid])
    worst = 0.0
    for i in range(2, p.n + 1):
        lo, hi = p.state_bounds(i)
        vals = states[:, i - 1]
        worst = max(worst, float(np.max(vals - hi, initial=0.0)),
                    float(np.max(lo - vals, initial=0.0)))
    report["bound_excursion"] = worst
    allowed = max(rel_tol_bounds * scale, getattr(plan, "bound_violation", 0.0) * (1 + 1e-9) + rel_tol_bounds * scale)
    if worst > allowed:
        report["issues"].append(f"state bound exceeded by {worst:.3e}")

    report["ok"] = not report["issues"]
    return report


def inject_fault(plan, kind: str, rng):
    """Return a corrupted copy of ``plan`` for detector calibration.

    ``kind``: ``time`` jitters one switching time, ``coeff`` one polynomial
    coefficient, ``input`` one segment input, ``swap`` two switching times.
    """
    from dataclasses import replace

    traj = plan.trajectory
    times = list(traj.times)
    inputs = list(traj.inputs)
    coeffs = traj.coeffs.copy()
    T = max(traj.duration, 1.0)
    durations = np.diff([0.0, *times])
    if kind == "time":
        j = int(rng.integers(0, len(times)))
        times[j] += float(rng.choice([-1, 1])) * 1e-3 * T
        times = list(np.maximum.accumulate(np.maximum(times, 0.0)))
        if tuple(times) == traj.times:
            return None  # jitter swallowed by a collapsed neighbour
    elif kind == "coeff":
        live = [j for j in range(len(times)) if durations[j] > 0.0]
        if not live:
            return None
        j = int(rng.choice(live))
        i = int(rng.integers(0, coeffs.shape[1]))
        k = int(rng.integers(0, coeffs.shape[2]))
        coeffs[j, i, k] += float(rng.choice([-1, 1])) * 1e-3 * (1.0 + abs(coeffs[j, i, k]))
    elif kind == "input":
        live = [j for j in range(len(inputs)) if durations[j] > 0.0]
        if not live:
            return None
        j = int(rng.choice(live))
        inputs[j] += float(rng.choice([-1, 1])) * 1e-2 * max(abs(plan.problem.umax), abs(plan.problem.umin))
    elif kind == "swap":
        if len(times) < 2:
            return None
        j = int(rng.integers(0, len(times) - 1))
        if times[j] == times[j + 1]:
            return None
        times[j], times[j + 1] = times[j + 1], times[j]
    else:
        raise ValueError(f"unknown fault kind {kind!r}")
    new_traj = replace(traj, times=tuple(times), inputs=tuple(inputs), coeffs=coeffs)
    return replace(plan, trajectory=new_traj, times=tuple(times))
