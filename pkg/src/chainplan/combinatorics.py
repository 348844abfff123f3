"""Switching sequences, profile types and collapsed switching-time bookkeeping.

The input of a planned trajectory alternates between bang segments (input at a
bound) and cruise segments (input zero, one state derivative pinned at a
bound).  For chain order ``n`` there are ``2**n - 1`` segments; the cruise
segments are the even-indexed ones.  A profile type selects which cruise
segments actually occur; the remaining ones collapse to zero duration and
their switching times tie back to the previous free time.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

N_SUPPORTED = 4


class UnsupportedProfileError(ValueError):
    """No balanced segment structure exists for this profile type."""


def segment_count(n: int) -> int:
    return 2 ** n - 1


def state_segment_count(n: int) -> int:
    return 2 ** (n - 1) - 1


def _check_order(n: int, limit: int = 16) -> None:
    if not isinstance(n, int) or n < 1 or n > limit:
        raise ValueError(f"chain order must be an integer in [1, {limit}], got {n!r}")


@dataclass(frozen=True)
class SwitchingPattern:
    """Sign sequence and per-segment constraint assignment.

    ``sigma[j]`` is the input sign of segment ``j+1`` (0 = cruise).
    ``constraint_map[j]`` identifies the bound governing segment ``j+1``:
    magnitude ``n+1`` means an input bound, magnitude ``i`` in ``[2, n]`` the
    bound on state ``i``; positive = upper bound, negative = lower bound.
    """

    n: int
    sigma0: int
    sigma: tuple[int, ...]
    constraint_map: tuple[int, ...]


@lru_cache(maxsize=None)
def switching_sequence(n: int, sigma0: int = 1) -> SwitchingPattern:
    """Recursive bang/cruise sign pattern and constraint assignment."""
    _check_order(n)
    if sigma0 not in (1, -1):
        raise ValueError(f"sigma0 must be +1 or -1, got {sigma0!r}")
    sigma = [sigma0]
    cmap = [n + 1]
    for i in range(1, n):
        sigma = sigma + [0] + [-s for s in sigma]
        cmap = cmap + [n - i + 1] + [-b for b in cmap]
    cmap = [sigma0 * b for b in cmap]
    return SwitchingPattern(n=n, sigma0=sigma0, sigma=tuple(sigma),
                            constraint_map=tuple(cmap))


@lru_cache(maxsize=None)
def cruise_segments(n: int) -> tuple[int, ...]:
    """1-based indices of the cruise (state-constraint) segments."""
    return tuple(range(2, segment_count(n), 2))


@lru_cache(maxsize=None)
def cruise_states(n: int) -> tuple[int, ...]:
    """Constrained state index for each cruise segment, in segment order."""
    cmap = switching_sequence(n, 1).constraint_map
    return tuple(abs(cmap[j - 1]) for j in cruise_segments(n))


@dataclass(frozen=True)
class ProfileType:
    """Binary sequence marking active state constraints in chronological order."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"profile bits must be 0/1, got {self.bits!r}")

    @classmethod
    def from_string(cls, s: str) -> "ProfileType":
        return cls(tuple(int(c) for c in s))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def active_count(self) -> int:
        return sum(self.bits)


def _check_profile(n: int, profile: ProfileType) -> None:
    if len(profile.bits) != state_segment_count(n):
        raise ValueError(
            f"profile length {len(profile.bits)} does not match "
            f"n={n} (expected {state_segment_count(n)})")


def enumerate_profile_types(n: int) -> list[ProfileType]:
    """All profile types, fewest active constraints first, then lexicographic.

    The all-zeros type comes first so the planner can try the unconstrained
    case before any state-constrained one.
    """
    _check_order(n)
    nx = state_segment_count(n)
    out = []
    for k in range(nx + 1):
        rows = []
        for ones in combinations(range(nx), k):
            bits = [0] * nx
            for i in ones:
                bits[i] = 1
            rows.append(tuple(bits))
        out.extend(ProfileType(bits) for bits in sorted(rows))
    return out


def condition_count(n: int, profile: ProfileType) -> int:
    """Number of algebraic conditions pinning this profile's trajectory.

    ``n`` terminal conditions, one bound condition per active constraint and
    one contact condition per higher derivative of each actively constrained
    state.  Always equals the number of free switching times.
    """
    _check_order(n)
    _check_profile(n, profile)
    states = cruise_states(n)
    total = n
    for bit, state in zip(profile.bits, states):
        if bit:
            total += 1 + (n - state)
    return total


@dataclass(frozen=True)
class TieMap:
    """Which switching times vanish and where they tie back to.

    ``ties`` maps each vanished time index to the nearest preceding free
    index (0 means the trajectory start).  ``free_unknowns`` are the indices
    that remain unknowns of the polynomial system.
    """

    n: int
    free_unknowns: tuple[int, ...]
    ties: tuple[tuple[int, int], ...]

    def tie_dict(self) -> dict[int, int]:
        return dict(self.ties)

    def full_times(self, assignment: dict[int, float]) -> list[float]:
        """Expand an assignment of free times into the full t_1..t_N vector."""
        times = []
        tied = self.tie_dict()
        for j in range(1, segment_count(self.n) + 1):
            if j in tied:
                pred = tied[j]
                times.append(0.0 if pred == 0 else times[pred - 1])
            else:
                times.append(float(assignment[j]))
        return times


def _merge_propagate(alive: set[int], sigma: tuple[int, ...], lo: int, hi: int) -> int:
    """Collapse same-sign bang segments that became adjacent; returns removals."""
    removed = 0
    changed = True
    while changed:
        changed = False
        prev_bang = None
        for j in sorted(alive):
            if j < lo or j > hi:
                continue
            if sigma[j - 1] == 0:
                prev_bang = None  # an alive cruise separates bang runs
                continue
            if prev_bang is not None and sigma[j - 1] == sigma[prev_bang - 1]:
                alive.discard(j)
                removed += 1
                changed = True
                break
            prev_bang = j
    return removed


def _structure_valid(alive: set[int], sigma: tuple[int, ...],
                     lo: int, hi: int) -> bool:
    """Every surviving cruise keeps bang neighbours with the original signs."""
    for j in sorted(alive):
        if j < lo or j > hi or sigma[j - 1] != 0:
            continue
        prev_bang = None
        for k in range(j - 1, lo - 1, -1):
            if k in alive:
                if sigma[k - 1] == 0:
                    return False  # two cruises with nothing between
                prev_bang = k
                break
        nxt_bang = None
        for k in range(j + 1, hi + 1):
            if k in alive:
                if sigma[k - 1] == 0:
                    return False
                nxt_bang = k
                break
        if prev_bang is None or sigma[prev_bang - 1] != sigma[j - 2]:
            return False
        if nxt_bang is None or sigma[nxt_bang - 1] != sigma[j]:
            return False
    return True


_KILL_PLANS = (("B",), ("A",), ("B", "B"), ("A", "B"), ("B", "A"), ("A", "A"))


def _derive_alive(n_l: int, lo: int, bits: tuple[int, ...],
                  sigma: tuple[int, ...]) -> set[int]:
    if n_l == 1:
        return {lo}
    half_bits = 2 ** (n_l - 2) - 1
    n_a = 2 ** (n_l - 1) - 1
    mid = lo + n_a
    hi = lo + 2 ** n_l - 2
    alive_a = _derive_alive(n_l - 1, lo, bits[:half_bits], sigma)
    alive_b = _derive_alive(n_l - 1, mid + 1, bits[half_bits + 1:], sigma)
    if bits[half_bits]:
        return alive_a | {mid} | alive_b
    alive = alive_a | alive_b
    need = n_l - 2
    if need == 0:
        return alive
    for plan in _KILL_PLANS:
        trial = set(alive)
        removed = 0
        ok = True
        for side in plan:
            if side == "B":
                cands = [j for j in sorted(trial) if j > mid and sigma[j - 1] != 0]
            else:
                cands = [j for j in sorted(trial, reverse=True)
                         if j < mid and sigma[j - 1] != 0]
            if not cands:
                ok = False
                break
            trial.discard(cands[0])
            removed += 1
            removed += _merge_propagate(trial, sigma, lo, hi)
            if removed > need:
                ok = False
                break
        if ok and removed == need and _structure_valid(trial, sigma, lo, hi):
            return trial
    raise UnsupportedProfileError(
        f"no balanced segment structure for bits {''.join(map(str, bits))} "
        f"at order {n_l}")


def tie_map(n: int, profile: ProfileType) -> TieMap:
    """Derive which switching times remain free for a profile type.

    Inactive cruise segments collapse onto their predecessor; when a collapse
    leaves two bang segments of equal sign adjacent, the later one collapses
    too.  The all-zeros profile of order ``n`` thereby reduces to the
    classical alternating ``n``-bang pattern.
    """
    _check_order(n, N_SUPPORTED)
    _check_profile(n, profile)
    sigma = switching_sequence(n, 1).sigma
    alive = _derive_alive(n, 1, profile.bits, sigma)
    ties = []
    last_free = 0
    for j in range(1, segment_count(n) + 1):
        if j in alive:
            last_free = j
        else:
            ties.append((j, last_free))
    free = tuple(sorted(alive))
    tmap = TieMap(n=n, free_unknowns=free, ties=tuple(ties))
    if len(free) != condition_count(n, profile):
        raise UnsupportedProfileError(
            f"profile {profile} of order {n}: {len(free)} free times vs "
            f"{condition_count(n, profile)} conditions")
    return tmap
