"""Loading and compiling precomputed switching-time system bundles.

A bundle is a JSON document produced offline.  Per chain order it lists one
entry per feasible constraint profile; each entry carries the tie structure
of the collapsed switching times and one or more *systems*: sequences of
univariate polynomial solve steps whose coefficients are expression trees
over the problem parameters and previously solved times.  The first system
whose singularity guards all fire is the one to evaluate; the last system of
every entry is the guard-free default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from . import combinatorics as cb
from .expr import compile_polynomial, compile_tree, tree_symbols, validate_tree
from .roots import real_nonneg_roots

FORMAT_VERSION = 1

# A guard divisor counts as vanished when its value is below this fraction
# of the sum of its monomial magnitudes.
GUARD_REL_TOL = 1e-9


@dataclass(frozen=True)
class CompiledStep:
    unknown: str
    coeff_fns: tuple
    degree: int


@dataclass(frozen=True)
class CompiledSystem:
    guard_fns: tuple      # tuple of divisors; each divisor a tuple of monomial fns
    substituted: tuple    # parameter names eliminated by the substitutions
    steps: tuple[CompiledStep, ...]

    def guards_fire(self, env: dict[str, float], rel_tol: float = GUARD_REL_TOL) -> bool:
        for monomials in self.guard_fns:
            vals = [m(env) for m in monomials]
            scale = sum(abs(v) for v in vals)
            if abs(sum(vals)) > rel_tol * scale:
                return False
        return True


@dataclass(frozen=True)
class CompiledProfile:
    bits: str
    free_times: tuple[int, ...]
    ties: tuple[tuple[int, int], ...]
    systems: tuple[CompiledSystem, ...]

    def select_system(self, env: dict[str, float]) -> CompiledSystem:
        """First system whose guards all fire; the default always matches."""
        for system in self.systems:
            if system.guards_fire(env):
                return system
        return self.systems[-1]


@dataclass(frozen=True)
class Bundle:
    n: int
    parameters: tuple[str, ...]
    profiles: tuple[CompiledProfile, ...]


class BundleFormatError(ValueError):
    """The bundle document is malformed or inconsistent."""


def _compile_step(raw: dict, allowed: set[str]) -> CompiledStep:
    coeffs = raw["coeffs"]
    if not coeffs:
        raise BundleFormatError("solve step with empty coefficient list")
    for c in coeffs:
        validate_tree(c, allowed)
    return CompiledStep(
        unknown=raw["unknown"],
        coeff_fns=tuple(compile_polynomial(c) for c in coeffs),
        degree=len(coeffs) - 1,
    )


def _compile_system(raw: dict, params: set[str], time_names: set[str]) -> CompiledSystem:
    for g in raw.get("guards", []):
        for m in g:
            validate_tree(m, params)
    steps = []
    solved: set[str] = set()
    for raw_step in raw["steps"]:
        u = raw_step["unknown"]
        if u not in time_names or u in solved:
            raise BundleFormatError(f"bad solve-step unknown {u!r}")
        steps.append(_compile_step(raw_step, params | solved))
        solved.add(u)
    return CompiledSystem(
        guard_fns=tuple(tuple(compile_tree(m) for m in g)
                        for g in raw.get("guards", [])),
        substituted=tuple(name for name, _ in raw.get("substitutions", [])),
        steps=tuple(steps),
    )


def _compile_profile(raw: dict, n: int, params: set[str]) -> CompiledProfile:
    bits = raw["bits"]
    profile = cb.ProfileType.from_string(bits)
    expected = cb.tie_map(n, profile)
    free = tuple(raw["free_times"])
    ties = tuple((int(a), int(b)) for a, b in raw["ties"])
    if free != expected.free_unknowns or ties != expected.ties:
        raise BundleFormatError(
            f"profile {bits}: tie structure disagrees with the segment rules")
    time_names = {f"t{j}" for j in free}
    systems = tuple(_compile_system(s, params, time_names)
                    for s in raw["systems"])
    if not systems or systems[-1].guard_fns:
        raise BundleFormatError(
            f"profile {bits}: last system must be the guard-free default")
    for system in systems:
        if {s.unknown for s in system.steps} != time_names:
            raise BundleFormatError(
                f"profile {bits}: steps do not cover the free times")
    return CompiledProfile(bits=bits, free_times=free, ties=ties, systems=systems)


def load_bundle(doc) -> Bundle:
    """Compile a bundle from a parsed JSON document or a file path."""
    if isinstance(doc, (str, bytes)):
        with open(doc) as fh:
            doc = json.load(fh)
    if doc.get("format_version") != FORMAT_VERSION:
        raise BundleFormatError(
            f"unsupported bundle format version {doc.get('format_version')!r}")
    n = int(doc["n"])
    params = set(doc["parameters"])
    profiles = tuple(_compile_profile(p, n, params) for p in doc["profiles"])
    return Bundle(n=n, parameters=tuple(doc["parameters"]), profiles=profiles)


_BUILTIN_CACHE: dict[int, Bundle] = {}


def builtin_bundle(n: int) -> Bundle:
    """Bundled system set shipped with the package for order ``n``."""
    if n not in _BUILTIN_CACHE:
        ref = resources.files("chainplan.data").joinpath(f"n{n}.json")
        try:
            text = ref.read_text()
        except FileNotFoundError:
            raise ValueError(f"no bundled systems for chain order {n}") from None
        _BUILTIN_CACHE[n] = load_bundle(json.loads(text))
    return _BUILTIN_CACHE[n]


def solve_system(system: CompiledSystem, env: dict[str, float],
                 t_cap: float = float("inf")):
    """All nonnegative-time assignments of a triangular system.

    Depth-first over the real nonnegative roots of each step; spurious
    branches die out either here (no admissible roots downstream) or in the
    planner's trajectory validation.  Every unknown is an absolute segment
    end time, so any root above ``t_cap`` (an upper bound on useful total
    durations) prunes its whole branch.
    """
    out: list[dict[str, float]] = []
    env_k = dict(env)

    def rec(k: int):
        if k == len(system.steps):
            out.append({s.unknown: env_k[s.unknown] for s in system.steps})
            return
        step = system.steps[k]
        coeffs = [f(env_k) for f in step.coeff_fns]
        if not all(map(_finite, coeffs)):
            return
        try:
            roots = real_nonneg_roots(coeffs)
        except ValueError:
            return
        for r in roots:
            if r > t_cap:
                continue
            env_k[step.unknown] = r
            rec(k + 1)
        env_k.pop(step.unknown, None)

    rec(0)
    return out


def _finite(v: float) -> bool:
    return v == v and abs(v) != float("inf")
