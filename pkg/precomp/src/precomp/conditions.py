"""Symbolic condition polynomials for a bang/cruise trajectory profile.

The chain state is propagated segment by segment with exact Taylor expansion
(the dynamics are a pure integrator chain, so the expansion is finite).  At
the entry of every active cruise segment the constrained state must sit on
its bound and all higher states must vanish; at the final time the state must
match the target.  Collapsed switching times are substituted away up front so
only the free times appear as unknowns.
"""

from __future__ import annotations

import sympy as sp

from .combinatorics import (
    ProfileType,
    cruise_segments,
    cruise_states,
    segment_count,
    switching_sequence,
    tie_map,
)


def problem_symbols(n: int) -> dict[str, sp.Symbol]:
    """All parameter symbols of an order-``n`` problem, keyed by name.

    ``dx_1`` stands for the net displacement ``xf_1 - x0_1``; the individual
    endpoint positions never appear separately in any condition.
    """
    syms: dict[str, sp.Symbol] = {
        "umax": sp.Symbol("umax"),
        "umin": sp.Symbol("umin"),
        "dx_1": sp.Symbol("dx_1"),
    }
    for i in range(2, n + 1):
        for name in (f"x0_{i}", f"xf_{i}", f"xmax_{i}", f"xmin_{i}"):
            syms[name] = sp.Symbol(name)
    return syms


def time_symbols(n: int) -> dict[int, sp.Symbol]:
    return {j: sp.Symbol(f"t{j}") for j in range(1, segment_count(n) + 1)}


def build_conditions(n: int, profile: ProfileType):
    """Condition polynomials for one profile, in chronological order.

    Returns ``(conds, unknowns, tmap)`` where ``conds`` is a list of
    ``(expr, tag)`` pairs ordered bound/contact conditions first (in segment
    order) and terminal conditions last (highest state first), ``unknowns``
    the free switching-time symbols in chronological order and ``tmap`` the
    tie map of the profile.
    """
    pat = switching_sequence(n, 1)
    tmap = tie_map(n, profile)
    syms = problem_symbols(n)
    tsym = time_symbols(n)
    tied = tmap.tie_dict()

    T: dict[int, sp.Expr] = {0: sp.Integer(0)}
    for j in range(1, segment_count(n) + 1):
        if j in tmap.free_unknowns:
            T[j] = tsym[j]
        else:
            T[j] = sp.Integer(0) if tied[j] == 0 else T[tied[j]]

    # state[i-1] tracks x_{i+1..n} directly and x_1 relative to its start,
    # so the only position parameter is the displacement dx_1.
    state: list[sp.Expr] = [sp.Integer(0)] + [syms[f"x0_{i}"] for i in range(2, n + 1)]
    uval = {1: syms["umax"], -1: syms["umin"], 0: sp.Integer(0)}
    bit_of = dict(zip(cruise_segments(n), profile.bits))
    state_of = dict(zip(cruise_segments(n), cruise_states(n)))

    conds: list[tuple[sp.Expr, str]] = []
    for j in range(1, segment_count(n) + 1):
        if bit_of.get(j):
            i = state_of[j]
            b = pat.constraint_map[j - 1]
            bound = syms[f"xmax_{i}"] if b > 0 else syms[f"xmin_{i}"]
            conds.append((sp.expand(state[i - 1] - bound), f"bound seg{j} x{i}"))
            for k in range(i + 1, n + 1):
                conds.append((sp.expand(state[k - 1]), f"contact seg{j} x{k}"))
            # Reduce the downstream propagation modulo the conditions just
            # emitted: on the cruise the constrained state equals its bound
            # and the higher states are zero.  Same ideal, far sparser terms.
            state[i - 1] = bound
            for k in range(i + 1, n + 1):
                state[k - 1] = sp.Integer(0)
        d = T[j] - T[j - 1]
        u = uval[pat.sigma[j - 1]]
        new = []
        for i in range(1, n + 1):
            e = sum(state[i - 1 + k] * d**k / sp.factorial(k)
                    for k in range(0, n - i + 1))
            e += u * d ** (n - i + 1) / sp.factorial(n - i + 1)
            new.append(sp.expand(e))
        state = new

    for i in range(n, 0, -1):
        target = syms["dx_1"] if i == 1 else syms[f"xf_{i}"]
        conds.append((sp.expand(state[i - 1] - target), f"terminal x{i}"))

    unknowns = [tsym[j] for j in sorted(tmap.free_unknowns)]
    return conds, unknowns, tmap


def split_blocks(conds, unknowns):
    """Split chronologically ordered conditions into square triangular blocks.

    A block closes as soon as the number of conditions seen equals the number
    of distinct unknowns they involve; each block can then be solved knowing
    only the unknowns of earlier blocks.
    """
    blocks = []
    cur_conds: list = []
    cur_unk: list = []
    seen: set = set()
    for e, tag in conds:
        cur_conds.append((e, tag))
        for u in unknowns:
            if u not in seen and e.has(u):
                seen.add(u)
                cur_unk.append(u)
        if cur_unk and len(cur_conds) == len(cur_unk):
            cur_unk.sort(key=unknowns.index)
            blocks.append((cur_conds, cur_unk))
            cur_conds, cur_unk = [], []
    if cur_conds:
        raise ValueError(
            f"unbalanced trailing conditions: {[t for _, t in cur_conds]}")
    return blocks
