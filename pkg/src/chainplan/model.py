"""Problem definition and validation for integrator-chain planning.

The plant is a chain of ``n`` integrators: state ``x_1`` is the output,
``x_{i+1}`` is the derivative of ``x_i`` and the input ``u`` drives ``x_n``.
A problem asks for the time-optimal motion between two states subject to an
asymmetric input bound and optional bounds on the derivative states
``x_2 .. x_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .combinatorics import N_SUPPORTED


class InfeasibleProblemError(ValueError):
    """The boundary states or bounds make the problem unsolvable."""


@dataclass(frozen=True)
class Problem:
    """Boundary states and bounds of a planning instance.

    ``xmin``/``xmax`` hold bounds for the derivative states in order
    ``x_2 .. x_n``; entries may be ``-inf``/``inf`` for unbounded states.
    """

    n: int
    x0: tuple[float, ...]
    xf: tuple[float, ...]
    umin: float
    umax: float
    xmin: tuple[float, ...] = ()
    xmax: tuple[float, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or not 1 <= self.n <= N_SUPPORTED:
            raise ValueError(f"chain order must be in [1, {N_SUPPORTED}], got {self.n!r}")
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        object.__setattr__(self, "xf", tuple(float(v) for v in self.xf))
        object.__setattr__(self, "umin", float(self.umin))
        object.__setattr__(self, "umax", float(self.umax))
        xmin = tuple(float(v) for v in self.xmin) or (-math.inf,) * (self.n - 1)
        xmax = tuple(float(v) for v in self.xmax) or (math.inf,) * (self.n - 1)
        object.__setattr__(self, "xmin", xmin)
        object.__setattr__(self, "xmax", xmax)

    def state_bounds(self, i: int) -> tuple[float, float]:
        """Bounds of state ``x_i`` for ``i`` in ``2 .. n``."""
        return self.xmin[i - 2], self.xmax[i - 2]

    def mirrored(self) -> "Problem":
        """The sign-flipped problem: ``x -> -x``, ``u -> -u``.

        Planning the mirrored problem with a positive leading input sign is
        equivalent to planning the original with a negative one; the switching
        times are shared and states/input mirror back.
        """
        return Problem(
            n=self.n,
            x0=tuple(-v for v in self.x0),
            xf=tuple(-v for v in self.xf),
            umin=-self.umax,
            umax=-self.umin,
            xmin=tuple(-v for v in self.xmax),
            xmax=tuple(-v for v in self.xmin),
        )


def validate_problem(p: Problem) -> None:
    """Raise if the problem is malformed or trivially infeasible."""
    if len(p.x0) != p.n or len(p.xf) != p.n:
        raise ValueError(
            f"boundary states must have length n={p.n}, "
            f"got {len(p.x0)} and {len(p.xf)}")
    if len(p.xmin) != p.n - 1 or len(p.xmax) != p.n - 1:
        raise ValueError(
            f"state bounds must have length n-1={p.n - 1}, "
            f"got {len(p.xmin)} and {len(p.xmax)}")
    for name, v in (("umin", p.umin), ("umax", p.umax)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")
    for vec in (p.x0, p.xf):
        for v in vec:
            if not math.isfinite(v):
                raise ValueError(f"boundary states must be finite, got {v!r}")
    if not p.umin < 0.0 < p.umax:
        raise InfeasibleProblemError(
            f"input bounds must straddle zero (umin={p.umin}, umax={p.umax}): "
            "otherwise no rest state can be held")
    for i in range(2, p.n + 1):
        lo, hi = p.state_bounds(i)
        if not lo < 0.0 < hi:
            raise InfeasibleProblemError(
                f"bounds of state x_{i} must straddle zero, got [{lo}, {hi}]: "
                "the lower derivatives could never come to rest")
        for vec, which in ((p.x0, "initial"), (p.xf, "final")):
            if not lo <= vec[i - 1] <= hi:
                raise InfeasibleProblemError(
                    f"{which} state x_{i}={vec[i - 1]} violates its bounds "
                    f"[{lo}, {hi}]")


def boundary_feasible(p: Problem) -> bool:
    """Whether both boundary states admit trajectories inside the bounds.

    A state can sit inside the bound box yet still force a violation: with
    ``x_3 > 0`` the velocity keeps rising until ``x_3`` is braked to zero,
    which costs at least ``x_3**2 / (2 |u|)`` of velocity headroom.  This
    check covers orders up to 3 exactly; for order 4 it is necessary but not
    sufficient (the nested acceleration transient is not accounted for).
    """
    if p.n < 3:
        return True

    def headroom_ok(x2: float, x3: float) -> bool:
        lo, hi = p.state_bounds(2)
        if x3 > 0.0:
            return x2 + x3 * x3 / (2.0 * abs(p.umin)) <= hi
        if x3 < 0.0:
            return x2 - x3 * x3 / (2.0 * p.umax) >= lo
        return True

    # reversing time negates x_3 and swaps the roles of the input bounds in
    # a way that lands on the same two inequalities, so the final state is
    # checked with the acceleration sign flipped
    return headroom_ok(p.x0[1], p.x0[2]) and headroom_ok(p.xf[1], -p.xf[2])


def problem_scale(p: Problem) -> float:
    """Magnitude scale used for relative tolerances in checks."""
    vals = [abs(v) for v in p.x0] + [abs(v) for v in p.xf]
    vals += [abs(p.umin), abs(p.umax)]
    return max(1.0, *vals)
