"""Switching patterns, profile enumeration and tie-map structure."""

import pytest

from chainplan import combinatorics as cb


def test_segment_counts():
    assert [cb.segment_count(n) for n in range(1, 5)] == [1, 3, 7, 15]
    assert [cb.state_segment_count(n) for n in range(1, 5)] == [0, 1, 3, 7]


def test_switching_sequence_order3_positive():
    pat = cb.switching_sequence(3, 1)
    assert pat.sigma == (1, 0, -1, 0, -1, 0, 1)
    assert pat.constraint_map == (4, 3, -4, 2, -4, -3, 4)


def test_switching_sequence_negative_sign_mirrors_constraints():
    for n in range(1, 5):
        pos = cb.switching_sequence(n, 1)
        neg = cb.switching_sequence(n, -1)
        assert neg.sigma == tuple(-s for s in pos.sigma)
        assert neg.constraint_map == tuple(-b for b in pos.constraint_map)


def test_switching_sequence_order2():
    pat = cb.switching_sequence(2, 1)
    assert pat.sigma == (1, 0, -1)
    assert pat.constraint_map == (3, 2, -3)


def test_cruise_segments_are_even_indices():
    assert cb.cruise_segments(3) == (2, 4, 6)
    assert cb.cruise_states(3) == (3, 2, 3)
    assert cb.cruise_states(4) == (4, 3, 4, 2, 4, 3, 4)


def test_enumeration_order_popcount_then_lex():
    profiles = [str(p) for p in cb.enumerate_profile_types(3)]
    assert profiles == ["000", "001", "010", "100", "011", "101", "110", "111"]
    assert len(cb.enumerate_profile_types(4)) == 128


def test_condition_counts_order3():
    counts = {str(p): cb.condition_count(3, p)
              for p in cb.enumerate_profile_types(3)}
    assert counts["000"] == 3
    assert counts["010"] == 5  # x2 constraint: bound + one contact condition
    assert counts["001"] == 4
    assert counts["111"] == 7


def test_condition_count_equals_free_time_count():
    for n in (1, 2, 3, 4):
        for profile in cb.enumerate_profile_types(n):
            try:
                tmap = cb.tie_map(n, profile)
            except cb.UnsupportedProfileError:
                continue
            assert len(tmap.free_unknowns) == cb.condition_count(n, profile)


def test_all_zero_profile_reduces_to_n_bangs():
    # classic result: without state constraints the optimum has at most
    # n - 1 switches, i.e. n alternating bang segments
    for n in (1, 2, 3, 4):
        profile = cb.ProfileType((0,) * cb.state_segment_count(n))
        tmap = cb.tie_map(n, profile)
        sigma = cb.switching_sequence(n, 1).sigma
        assert len(tmap.free_unknowns) == n
        signs = [sigma[j - 1] for j in tmap.free_unknowns]
        assert all(s != 0 for s in signs)
        assert all(a == -b for a, b in zip(signs, signs[1:]))


def test_all_one_profile_keeps_every_segment():
    for n in (2, 3, 4):
        profile = cb.ProfileType((1,) * cb.state_segment_count(n))
        tmap = cb.tie_map(n, profile)
        assert tmap.free_unknowns == tuple(range(1, cb.segment_count(n) + 1))
        assert tmap.ties == ()


def test_order3_all_profiles_supported():
    for profile in cb.enumerate_profile_types(3):
        cb.tie_map(3, profile)  # must not raise


def test_order4_unsupported_profiles_raise():
    unsupported = 0
    for profile in cb.enumerate_profile_types(4):
        try:
            cb.tie_map(4, profile)
        except cb.UnsupportedProfileError:
            unsupported += 1
    assert unsupported == 16


def test_tie_map_full_times_expansion():
    tmap = cb.tie_map(3, cb.ProfileType.from_string("010"))
    assert tmap.free_unknowns == (1, 3, 4, 5, 7)
    times = tmap.full_times({1: 0.5, 3: 1.0, 4: 2.0, 5: 3.0, 7: 4.0})
    assert times == [0.5, 0.5, 1.0, 2.0, 3.0, 3.0, 4.0]


def test_bad_inputs_raise():
    with pytest.raises(ValueError):
        cb.switching_sequence(0)
    with pytest.raises(ValueError):
        cb.switching_sequence(3, 2)
    with pytest.raises(ValueError):
        cb.condition_count(3, cb.ProfileType((0, 1)))
    with pytest.raises(ValueError):
        cb.ProfileType((0, 2, 1))
