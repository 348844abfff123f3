"""Piecewise-polynomial trajectories of an integrator chain.

A planned motion is a sequence of segments with constant input; on each
segment every state is an exact polynomial in the segment-local time.  The
coefficient tensor has one ``(n, n+1)`` matrix per segment with rows ordered
``x_1 .. x_n`` and columns highest degree first, zero-padded so all rows
share one width.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np


def _horner(coeffs, x: float) -> float:
    """Scalar Horner evaluation; avoids np.polyval overhead on short rows."""
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class PiecewiseTrajectory:
    """Exact polynomial description of a multi-segment trajectory.

    ``times`` are the absolute segment end times ``t_1 <= ... <= t_N``; the
    final entry is the total duration.  Sampling treats segment boundaries
    as belonging to the earlier segment, so the input is right-continuous
    from the left at switches.
    """

    n: int
    times: tuple[float, ...]
    inputs: tuple[float, ...]
    coeffs: np.ndarray  # (N, n, n + 1), row i-1 is x_i, highest degree first

    @property
    def duration(self) -> float:
        return self.times[-1] if self.times else 0.0

    def segment_of(self, t: float) -> int:
        """0-based segment index holding time ``t`` (boundaries go left)."""
        j = int(np.searchsorted(self.times, t, side="left"))
        j = min(max(j, 0), len(self.times) - 1)
        # a zero-duration segment cannot hold a time point; fall through to
        # the next segment that actually has extent
        while j + 1 < len(self.times) and t >= self.times[j] \
                and self.times[j] == (self.times[j - 1] if j else 0.0):
            j += 1
        return j

    def state(self, t: float) -> np.ndarray:
        j = self.segment_of(t)
        tau = t - (0.0 if j == 0 else self.times[j - 1])
        return np.array([_horner(self.coeffs[j, i], tau)
                         for i in range(self.n)])

    def input(self, t: float) -> float:
        return self.inputs[self.segment_of(t)]

    def sample(self, ts) -> np.ndarray:
        """Rows ``[t, x_1 .. x_n, u]`` for each requested time."""
        ts = np.asarray(ts, dtype=float)
        out = np.empty((ts.size, self.n + 2))
        for k, t in enumerate(ts):
            out[k, 0] = t
            out[k, 1:-1] = self.state(t)
            out[k, -1] = self.input(t)
        return out

    def terminal_state(self) -> np.ndarray:
        return self.state(self.duration)

    def state_range(self, i: int) -> tuple[float, float]:
        """Exact min/max of state ``x_i`` over the whole trajectory.

        Polynomial extrema occur at segment boundaries or at interior roots
        of the derivative, which is available exactly: it is the next state's
        polynomial on the same segment (or zero for ``x_n`` on a cruise).
        """
        lo, hi = np.inf, -np.inf
        prev_end = 0.0
        for j in range(len(self.times)):
            d = self.times[j] - prev_end
            c = self.coeffs[j, i - 1]
            for tau in self._critical_taus(j, i, d):
                v = _horner(c, tau)
                lo, hi = min(lo, v), max(hi, v)
            prev_end = self.times[j]
        return lo, hi

    def _critical_taus(self, j: int, i: int, d: float):
        taus = [0.0, d]
        if d <= 0.0:
            return taus
        if i == self.n:
            return taus
        deriv = [float(v) for v in self.coeffs[j, i]]
        while deriv and deriv[0] == 0.0:
            deriv.pop(0)
        if len(deriv) == 2:
            r = -deriv[1] / deriv[0]
            if 0.0 < r < d:
                taus.append(r)
        elif len(deriv) == 3:
            a, b, c = deriv
            disc = b * b - 4.0 * a * c
            if disc >= 0.0:
                s = disc ** 0.5
                q = -0.5 * (b + s) if b >= 0.0 else -0.5 * (b - s)
                for r in (q / a, c / q if q != 0.0 else 0.0):
                    if 0.0 < r < d:
                        taus.append(r)
        elif len(deriv) > 3:
            for r in np.roots(deriv):
                if abs(r.imag) < 1e-9 * (1.0 + abs(r.real)) and 0.0 < r.real < d:
                    taus.append(float(r.real))
        return taus


def build_trajectory(n: int, x_start, inputs, times) -> PiecewiseTrajectory:
    """Propagate the chain through segments of constant input.

    ``times`` are absolute nondecreasing segment end times and ``inputs`` the
    constant input of each segment.  Propagation uses the exact finite Taylor
    expansion of the chain, so the result is a certificate, not an
    approximation.
    """
    times = tuple(float(t) for t in times)
    inputs = tuple(float(u) for u in inputs)
    if len(times) != len(inputs):
        raise ValueError("one input per segment required")
    state = np.asarray(x_start, dtype=float).copy()
    coeffs = np.zeros((len(times), n, n + 1))
    prev_end = 0.0
    for j, (t_end, u) in enumerate(zip(times, inputs)):
        d = t_end - prev_end
        for i in range(1, n + 1):
            deg = n - i + 1
            # tau^0 .. tau^deg term coefficients, then reversed to np order
            poly = [state[i - 1 + k] / factorial(k) for k in range(0, n - i + 1)]
            poly.append(u / factorial(deg))
            coeffs[j, i - 1, n - deg:] = poly[::-1]
        state = np.array([_horner(coeffs[j, i - 1], d) for i in range(1, n + 1)])
        prev_end = t_end
    return PiecewiseTrajectory(n=n, times=times, inputs=inputs, coeffs=coeffs)
