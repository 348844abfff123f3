"""Exact piecewise-polynomial propagation and range queries."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chainplan.oracle import rk4_states
from chainplan.trajectory import build_trajectory


def test_single_segment_double_integrator():
    traj = build_trajectory(2, (0.0, 0.0), (1.0,), (2.0,))
    assert traj.state(2.0) == pytest.approx([2.0, 2.0])
    assert traj.state(1.0) == pytest.approx([0.5, 1.0])
    assert traj.input(0.5) == 1.0


def test_terminal_matches_rk4():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        x0 = rng.uniform(-2, 2, size=n)
        k = int(rng.integers(1, 6))
        times = np.sort(rng.uniform(0.1, 3.0, size=k))
        inputs = rng.uniform(-2, 2, size=k)
        traj = build_trajectory(n, x0, inputs, times)
        ref = rk4_states(n, x0, inputs, times)
        assert np.allclose(traj.terminal_state(), ref, atol=1e-10)


def test_zero_duration_segments_are_transparent():
    times = (1.0, 1.0, 2.0)
    inputs = (1.0, 5.0, -1.0)  # the middle segment never applies
    traj = build_trajectory(2, (0.0, 0.0), inputs, times)
    assert traj.input(1.0) == 1.0        # boundary belongs to the left
    assert traj.input(1.0000001) == -1.0
    assert traj.state(2.0) == pytest.approx([1.0, 0.0])


def test_sample_rows_shape():
    traj = build_trajectory(3, (0.0, 0.0, 0.0), (1.0, -1.0), (1.0, 2.0))
    rows = traj.sample([0.0, 0.5, 1.5, 2.0])
    assert rows.shape == (4, 5)
    assert rows[0, 1:4] == pytest.approx([0.0, 0.0, 0.0])
    assert rows[-1, -1] == -1.0


def test_state_range_exact_interior_extremum():
    # symmetric bang-bang: velocity peaks mid-trajectory at u * t1
    traj = build_trajectory(2, (0.0, 0.0), (1.0, -1.0), (1.0, 2.0))
    lo, hi = traj.state_range(2)
    assert hi == pytest.approx(1.0, abs=1e-12)
    assert lo == pytest.approx(0.0, abs=1e-12)
    # position is monotone here; extremes at the ends
    plo, phi = traj.state_range(1)
    assert (plo, phi) == pytest.approx((0.0, 1.0))


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_state_range_bounds_dense_samples(data):
    n = data.draw(st.integers(2, 4))
    rng = np.random.default_rng(data.draw(st.integers(0, 10**6)))
    x0 = rng.uniform(-1, 1, size=n)
    k = int(rng.integers(1, 2 ** n))
    times = np.sort(rng.uniform(0.0, 2.0, size=k))
    inputs = rng.uniform(-2, 2, size=k)
    traj = build_trajectory(n, x0, inputs, times)
    grid = np.linspace(0.0, traj.duration, 200)
    for i in range(2, n + 1):
        vals = np.array([traj.state(t)[i - 1] for t in grid])
        lo, hi = traj.state_range(i)
        assert lo <= vals.min() + 1e-9
        assert hi >= vals.max() - 1e-9


def test_input_count_mismatch():
    with pytest.raises(ValueError):
        build_trajectory(2, (0.0, 0.0), (1.0,), (1.0, 2.0))
