"""Triangularization of condition blocks into sequential univariate solves.

Each block of conditions is reduced in three stages:

1. *linear presolve* — conditions of total degree one in the unknowns are
   solved for the earliest unknown whose pivot coefficient involves no other
   unknown, and substituted away;
2. *lex Groebner basis* over the rational-function field of the parameters,
   attempted under a wall-clock budget;
3. *iterated resultants* as a fallback when the basis computation does not
   finish — successively eliminating the earliest unknown keeps the final
   segment time as the variable of the closing univariate polynomial.

The resultant route can introduce spurious roots; the online planner filters
those by validating every candidate against the reconstructed trajectory, so
only completeness of the root set matters here.

Every division performed on the way (presolve pivots, coefficient clearing,
parameter-only factors stripped from resultants) is recorded: their factors
are the candidate divisors for singularity guards.
"""

from __future__ import annotations

import signal
from dataclasses import dataclass, field

import sympy as sp

from .combinatorics import ProfileType
from .conditions import build_conditions, split_blocks

GB_TIMEOUT_DEFAULT = 20.0


@dataclass
class SolveStep:
    """One univariate solve: roots of ``sum(coeffs[i] * unknown**(d-i))``.

    Coefficients are division-free polynomials in the problem parameters and
    the unknowns of earlier steps.
    """

    unknown: sp.Symbol
    coeffs: list


@dataclass
class Triangularization:
    """Evaluation-ordered solve steps plus collected division witnesses."""

    steps: list = field(default_factory=list)
    divisors: list = field(default_factory=list)
    used_resultants: bool = False


class _Budget:
    """SIGALRM-based wall-clock budget for a sympy computation."""

    def __init__(self, seconds: float):
        self.seconds = seconds

    def __enter__(self):
        def _raise(signum, frame):
            raise TimeoutError("symbolic computation budget exhausted")

        self._old = signal.signal(signal.SIGALRM, _raise)
        signal.setitimer(signal.ITIMER_REAL, self.seconds)
        return self

    def __exit__(self, *exc):
        signal.setitimer(signal.ITIMER_REAL, 0.0)
        signal.signal(signal.SIGALRM, self._old)
        return False


def _clear(expr: sp.Expr, divisors: list) -> sp.Expr:
    """Numerator of ``expr`` after putting it over a common denominator."""
    num, den = sp.fraction(sp.together(expr))
    if den != 1:
        divisors.append(den)
    return sp.expand(num)


def linear_presolve(polys, unks, divisors):
    """Substitute away unknowns pinned by degree-one conditions.

    Returns ``(polys, unks, chain)`` where ``chain`` holds
    ``(unknown, numerator, denominator)`` triples in the order they were
    solved; each solution may reference unknowns solved later in the chain
    and the unknowns that remain.
    """
    polys = list(polys)
    unks = list(unks)
    chain = []
    changed = True
    while changed and unks:
        changed = False
        for p in polys:
            if sp.Poly(p, *unks).total_degree() != 1:
                continue
            for u in unks:
                c = sp.diff(p, u)
                if c == 0 or set(c.free_symbols) & set(unks):
                    continue
                rest = sp.expand(p - c * u)
                num, den = sp.fraction(sp.together(-rest / c))
                num, den = sp.expand(num), sp.expand(den)
                divisors.append(den)
                chain.append((u, num, den))
                sol = num / den
                polys = [_clear(q.subs(u, sol), divisors)
                         for q in polys if q is not p]
                unks = [v for v in unks if v is not u]
                changed = True
                break
            if changed:
                break
    return polys, unks, chain


def _strip_parameter_factors(expr: sp.Expr, unks, divisors) -> sp.Expr:
    """Squarefree product of the factors involving unknowns.

    Parameter-only factors are recorded as division witnesses: if one of
    them vanishes the whole product degenerates, which is exactly the
    situation a guard must detect.
    """
    const, factors = sp.factor_list(expr)
    keep = []
    for f, _mult in factors:
        if set(f.free_symbols) & set(unks):
            keep.append(f)
        else:
            divisors.append(f)
    if not keep:
        return sp.Integer(0)
    out = sp.Integer(1)
    for f in keep:
        out *= f
    return sp.expand(out)


def _resultant_eliminate(polys, unks, divisors):
    """Triangularize by eliminating the earliest unknown repeatedly."""
    work = list(polys)
    backsolve = []
    for u in unks[:-1]:
        having = [p for p in work if p.has(u)]
        if not having:
            raise ValueError(f"unknown {u} absent from remaining conditions")
        pivot = min(having, key=lambda p: sp.degree(p, u))
        backsolve.append((u, pivot))
        nxt = []
        for p in work:
            if p is pivot:
                continue
            if p.has(u):
                r = sp.resultant(pivot, p, u)
                r = _strip_parameter_factors(sp.expand(r), unks, divisors)
                if r == 0:
                    raise ValueError(
                        f"resultant degenerated while eliminating {u}")
                nxt.append(r)
            else:
                nxt.append(p)
        work = nxt
    last = unks[-1]
    univs = [p for p in work if p.has(last)]
    if not univs:
        raise ValueError(f"no closing univariate polynomial in {last}")
    univ = min(univs, key=lambda p: sp.degree(p, last))
    steps = [(last, univ)] + list(reversed(backsolve))
    return steps


def _gb_steps(polys, unks, params, timeout):
    """Lex basis triangularization; ``None`` if the budget runs out.

    A direct lex basis is often prohibitively slow, so the lex basis is
    obtained from a cheap grevlex basis via FGLM order conversion (the
    blocks are square, hence zero-dimensional over the parameter field);
    the direct computation remains as a fallback.
    """
    dom = sp.QQ.frac_field(*params) if params else sp.QQ
    try:
        with _Budget(timeout):
            try:
                gb = sp.groebner(polys, *unks, order="grevlex",
                                 domain=dom).fglm("lex")
            except (NotImplementedError, sp.PolynomialError, ValueError):
                gb = sp.groebner(polys, *unks, order="lex", domain=dom)
            exprs = [sp.together(g) for g in gb.exprs]
    except TimeoutError:
        return None
    steps = []
    remaining = list(exprs)
    for i in range(len(unks) - 1, -1, -1):
        u = unks[i]
        allowed = set(unks[i:])
        cands = [g for g in remaining
                 if g.has(u) and set(g.free_symbols) & set(unks) <= allowed]
        if not cands:
            return None
        g = min(cands, key=lambda g: sp.degree(g, u))
        steps.append((u, g))
        remaining = [h for h in remaining if h is not g]
    return steps


def _poly_to_step(u, expr, unks_known, divisors) -> SolveStep:
    num = _clear(expr, divisors)
    poly = sp.Poly(num, u)
    coeffs = [sp.expand(c) for c in poly.all_coeffs()]
    return SolveStep(unknown=u, coeffs=coeffs)


def triangularize(n: int, profile: ProfileType, substitutions=None,
                  gb_timeout: float = GB_TIMEOUT_DEFAULT) -> Triangularization:
    """Full pipeline for one profile: conditions, blocks, triangular steps.

    ``substitutions`` is a list of ``(symbol, expression)`` pairs applied in
    order (a later pair may rewrite symbols introduced by an earlier value);
    it realizes the substitute systems that handle guard singularities.
    """
    conds, unknowns, _tmap = build_conditions(n, profile)
    result = Triangularization()
    for s, val in substitutions or ():
        conds = [(_clear(e.subs(s, val), result.divisors), tag)
                 for e, tag in conds]
    blocks = split_blocks(conds, unknowns)
    solved: list = []
    for conds_b, unk_b in blocks:
        polys = [_clear(e, result.divisors) for e, _ in conds_b]
        polys, rem, chain = linear_presolve(polys, unk_b, result.divisors)
        raw_steps = []
        if rem:
            if len(rem) == 1:
                univs = [p for p in polys if p.has(rem[0])]
                if not univs:
                    raise ValueError(f"lost unknown {rem[0]}")
                raw_steps = [(rem[0], min(univs, key=lambda p: sp.degree(p, rem[0])))]
            else:
                params = sorted(
                    set().union(*[p.free_symbols for p in polys]) - set(rem),
                    key=str)
                raw_steps = _gb_steps(polys, rem, params, gb_timeout)
                if raw_steps is None:
                    raw_steps = _resultant_eliminate(polys, rem, result.divisors)
                    result.used_resultants = True
        for u, expr in raw_steps:
            result.steps.append(_poly_to_step(u, expr, solved, result.divisors))
        for u, num, den in reversed(chain):
            # linear step: den * u - num == 0
            result.steps.append(SolveStep(unknown=u,
                                          coeffs=[sp.expand(den),
                                                  sp.expand(-num)]))
        solved = solved + unk_b
    return result
