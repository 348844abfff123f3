"""End-to-end bundle generation: profiles, guards, substitute systems."""

from __future__ import annotations

import sys
import time

import sympy as sp

from . import __version__, emit
from .combinatorics import (
    ProfileType,
    UnsupportedProfileError,
    enumerate_profile_types,
    segment_count,
    tie_map,
)
from .conditions import problem_symbols, time_symbols
from .eliminate import GB_TIMEOUT_DEFAULT, triangularize
from .guards import guard_divisors, solve_for_parameter

MAX_GUARD_DEPTH = 2


def _log(verbose, *msg):
    if verbose:
        print(*msg, file=sys.stderr, flush=True)


def _divisor_key(d):
    return sp.srepr(d)


def build_profile(n: int, profile: ProfileType,
                  gb_timeout: float = GB_TIMEOUT_DEFAULT,
                  max_depth: int = MAX_GUARD_DEPTH,
                  verbose: bool = False) -> dict:
    """Default system plus substitute systems for every reachable guard.

    Substitute systems are emitted deepest-first so a reader scanning the
    list can select the first system whose guard divisors all vanish.
    """
    unknown_syms = set(time_symbols(n).values())
    tmap = tie_map(n, profile)
    tri = triangularize(n, profile, gb_timeout=gb_timeout)
    _log(verbose, f"  profile {profile}: {len(tri.steps)} steps"
         + (" (resultants)" if tri.used_resultants else ""))
    systems_json: list[dict] = []

    def expand(subs_chain, guard_chain, divisors, depth):
        known = {_divisor_key(g) for g in guard_chain}
        for d in divisors:
            if _divisor_key(d) in known:
                continue
            sol = solve_for_parameter(d)
            if sol is None:
                _log(verbose, f"    guard {d}: no usable substitution, skipped")
                continue
            s, val = sol
            new_subs = subs_chain + [(s, val)]
            try:
                tri_sub = triangularize(n, profile, substitutions=new_subs,
                                        gb_timeout=gb_timeout)
            except (ValueError, sp.PolynomialError) as e:
                _log(verbose, f"    guard {d}: substitute elimination failed: {e}")
                continue
            guards = guard_chain + [d]
            if depth < max_depth:
                nested = guard_divisors(tri_sub.divisors, unknown_syms)
                expand(new_subs, guards, nested, depth + 1)
            _log(verbose, f"    guard {d}: substitute system via {s}")
            systems_json.append(emit.system_to_json(guards, new_subs, tri_sub))

    expand([], [], guard_divisors(tri.divisors, unknown_syms), 1)
    systems_json.append(emit.system_to_json([], [], tri))
    return emit.profile_to_json(profile, tmap, systems_json)


def build_bundle(n: int, profiles=None,
                 gb_timeout: float = GB_TIMEOUT_DEFAULT,
                 max_depth: int = MAX_GUARD_DEPTH,
                 verbose: bool = False) -> dict:
    """Bundle for order ``n`` covering the requested (or all feasible) profiles."""
    if profiles is None:
        profiles = []
        for p in enumerate_profile_types(n):
            try:
                tie_map(n, p)
            except UnsupportedProfileError:
                _log(verbose, f"  profile {p}: no balanced structure, skipped")
                continue
            profiles.append(p)
    start = time.time()
    entries = [build_profile(n, p, gb_timeout=gb_timeout, max_depth=max_depth,
                             verbose=verbose)
               for p in profiles]
    params = sorted(problem_symbols(n))
    provenance = {
        "generator": f"chainplan-precomp {__version__}",
        "sympy": sp.__version__,
        "monomial_order": "lex, final segment time solved first",
        "gb_timeout_s": gb_timeout,
        "wall_time_s": round(time.time() - start, 3),
    }
    return emit.bundle_to_json(n, entries, params, provenance)
