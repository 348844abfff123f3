"""Singularity guards: which parameter combinations break a default system.

Candidate divisors accumulate during triangularization (presolve pivots,
cleared denominators, parameter-only factors stripped from resultants).
A divisor becomes a guard when it involves only problem parameters and is
not structurally sign-definite under the validity conditions
``umin < 0 < umax`` and ``xmin_i < 0 < xmax_i``.

For each guard the tool derives a substitute system by solving the divisor
for one boundary-state parameter and re-running the elimination with that
parameter replaced, so the planner can fall back to it when the guard fires.
"""

from __future__ import annotations

import sympy as sp

_SUBSTITUTION_PREFERENCE = ("x0_", "xf_", "dx_")


def _definite_sign_basis(expr: sp.Expr):
    """Rewrite with positive symbols for every sign-definite parameter."""
    subs = {}
    for s in expr.free_symbols:
        name = s.name
        if name == "umax" or name.startswith("xmax_"):
            subs[s] = sp.Symbol(f"pos_{name}", positive=True)
        elif name == "umin" or name.startswith("xmin_"):
            subs[s] = -sp.Symbol(f"pos_{name}", positive=True)
    return sp.expand(expr.subs(subs))


def never_zero(expr: sp.Expr) -> bool:
    """True when the expression cannot vanish for any valid problem."""
    e = sp.expand(expr)
    if e.is_number:
        return e != 0
    pos = _definite_sign_basis(e)
    if pos.is_number:
        return pos != 0
    if any(not s.is_positive for s in pos.free_symbols):
        # a symbol without a definite sign remains (boundary state or
        # displacement), so the expression can always be steered to zero
        return False
    poly_syms = sorted(pos.free_symbols, key=str)
    try:
        coeffs = sp.Poly(pos, *poly_syms).coeffs()
    except sp.PolynomialError:
        return False
    if all(c.is_positive for c in coeffs) or all(c.is_negative for c in coeffs):
        # every term is a same-signed monomial in positive symbols, so the
        # sum is bounded away from zero
        return True
    return False


def normalize_divisor(expr: sp.Expr) -> sp.Expr:
    """Canonical form: primitive part with a positive leading coefficient."""
    e = sp.expand(expr)
    syms = sorted(e.free_symbols, key=str)
    if not syms:
        return sp.Integer(1)
    poly = sp.Poly(e, *syms)
    _, prim = poly.primitive()
    if prim.LC() < 0:
        prim = -prim
    return prim.as_expr()


def guard_divisors(candidates, unknown_syms) -> list:
    """Distinct irreducible parameter-only divisors that can vanish."""
    seen = set()
    out = []
    unknown_syms = set(unknown_syms)
    for cand in candidates:
        if cand == 0 or (set(cand.free_symbols) & unknown_syms):
            continue
        for f, _mult in sp.factor_list(cand)[1]:
            if set(f.free_symbols) & unknown_syms:
                continue
            if never_zero(f):
                continue
            g = normalize_divisor(f)
            key = sp.srepr(g)
            if key not in seen:
                seen.add(key)
                out.append(g)
    return out


def solve_for_parameter(divisor: sp.Expr):
    """Solve ``divisor == 0`` for a boundary-state parameter, if possible.

    Prefers initial-state symbols, then final-state, then the displacement,
    and requires the chosen symbol to appear linearly with a sign-definite
    (never-zero) coefficient so the substitution is globally valid.
    Returns ``(symbol, solution)`` or ``None``.
    """
    syms = sorted(divisor.free_symbols, key=str)
    ranked = []
    for pref in _SUBSTITUTION_PREFERENCE:
        ranked.extend(s for s in syms if s.name.startswith(pref))
    for s in ranked:
        if sp.degree(divisor, s) != 1:
            continue
        c = sp.diff(divisor, s)
        if s in c.free_symbols or not never_zero(c):
            continue
        sol = sp.together(sp.expand(-(divisor - c * s)) / c)
        return s, sp.cancel(sol)
    return None
