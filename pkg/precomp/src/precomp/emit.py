"""Serialization of symbolic results into the JSON bundle exchange format.

Expression trees use nested lists: ``["rat", "p", "q"]`` for exact rational
constants, bare strings for parameter/unknown symbols, and operator nodes
``["+"|"-"|"*"|"/"|"^", ...]``.  Solve-step coefficients are division-free
polynomials, so ``"/"`` only ever appears inside substitution metadata.
"""

from __future__ import annotations

import sympy as sp

FORMAT_VERSION = 1


def expr_to_tree(e: sp.Expr):
    e = sp.sympify(e)
    if e.is_Rational:
        return ["rat", str(e.p), str(e.q)]
    if e.is_Symbol:
        return e.name
    args = sorted(e.args, key=sp.default_sort_key)
    if e.is_Add:
        return ["+", *[expr_to_tree(a) for a in args]]
    if e.is_Mul:
        num, den = sp.fraction(e)
        if den != 1:
            return ["/", expr_to_tree(num), expr_to_tree(den)]
        return ["*", *[expr_to_tree(a) for a in args]]
    if e.is_Pow:
        base, exp = e.args
        if exp.is_Integer and exp > 0:
            return ["^", expr_to_tree(base), int(exp)]
        if exp.is_Integer and exp < 0:
            return ["/", ["rat", "1", "1"], expr_to_tree(base ** (-exp))]
    raise ValueError(f"cannot serialize expression node {e!r}")


def step_to_json(step) -> dict:
    return {
        "unknown": step.unknown.name,
        "coeffs": [expr_to_tree(c) for c in step.coeffs],
    }


def divisor_to_json(divisor: sp.Expr) -> list:
    """A guard divisor as its list of monomials, for relative zero tests."""
    return [expr_to_tree(m) for m in sp.Add.make_args(sp.expand(divisor))]


def system_to_json(guards, substitutions, tri) -> dict:
    return {
        "guards": [divisor_to_json(d) for d in guards],
        "substitutions": [[s.name, expr_to_tree(v)] for s, v in substitutions],
        "steps": [step_to_json(st) for st in tri.steps],
        "via_resultants": bool(tri.used_resultants),
    }


def profile_to_json(profile, tmap, systems) -> dict:
    return {
        "bits": str(profile),
        "free_times": list(tmap.free_unknowns),
        "ties": [list(t) for t in tmap.ties],
        "systems": systems,
    }


def bundle_to_json(n: int, profiles: list, parameters: list[str],
                   provenance: dict | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "n": n,
        "parameters": parameters,
        "profiles": profiles,
    }
    if provenance is not None:
        doc["provenance"] = provenance
    return doc
