"""Deterministic random problem generation for benchmarks and test suites."""

from __future__ import annotations

import numpy as np

from .model import Problem, boundary_feasible


def random_problem(n: int, rng: np.random.Generator,
                   with_bounds: bool = True) -> Problem:
    """A random feasible planning instance of order ``n``.

    Boundary states land strictly inside the bound box, with enough
    derivative headroom that both can be connected without leaving it
    (see :func:`chainplan.model.boundary_feasible`).
    """
    while True:
        umax = float(rng.uniform(0.3, 3.0))
        umin = -float(rng.uniform(0.3, 3.0))
        if with_bounds and n >= 2:
            xmax = tuple(float(rng.uniform(0.5, 5.0)) for _ in range(n - 1))
            xmin = tuple(-float(rng.uniform(0.5, 5.0)) for _ in range(n - 1))
        else:
            xmax = (np.inf,) * (n - 1)
            xmin = (-np.inf,) * (n - 1)

        def sample_state():
            out = [float(rng.uniform(-5.0, 5.0))]
            for lo, hi in zip(xmin, xmax):
                span_lo = max(lo, -5.0)
                span_hi = min(hi, 5.0)
                out.append(float(rng.uniform(0.9 * span_lo, 0.9 * span_hi)))
            return tuple(out)

        p = Problem(n=n, x0=sample_state(), xf=sample_state(),
                    umin=umin, umax=umax, xmin=xmin, xmax=xmax)
        if boundary_feasible(p):
            return p
