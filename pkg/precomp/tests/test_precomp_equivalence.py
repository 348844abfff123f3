"""Symbolic equivalence with the hand-derived third-order reference basis.

For the unconstrained third-order profile under symmetric input bounds and
rest terminal derivatives there is a known reduced basis in closed form: a
quartic in the final time plus expressions for the two earlier switching
times, and a simpler auxiliary basis (cubic final-time polynomial) on the
singular surface ``2*umax*x0_2 = x0_3**2``.  The generated systems keep the
terminal derivatives and both input bounds general, so the comparison
substitutes ``xf_2 = xf_3 = 0`` and ``umin = -umax`` first.

Equivalence is established at two levels: the closing univariate final-time
polynomial must agree up to a nonzero parameter-only factor (it generates
the elimination ideal), and the full systems must generate the same ideal
(verified by reducing each basis against a Groebner basis of the other over
the rational-function field of the parameters).
"""

import pytest
import sympy as sp

from precomp.combinatorics import ProfileType
from precomp.pipeline import build_profile

from _helpers import step_poly, tree_to_sympy

umax, umin = sp.symbols("umax umin")
dx_1 = sp.Symbol("dx_1")  # net displacement xf_1 - x0_1
x0_2, x0_3 = sp.symbols("x0_2 x0_3")
xf_2, xf_3 = sp.symbols("xf_2 xf_3")
t1, t3, t7 = sp.symbols("t1 t3 t7")

SPECIALIZE = {xf_2: 0, xf_3: 0, umin: -umax}
TSYMS = (t7, t3, t1)

D = 8 * umax * x0_2 - 4 * x0_3 ** 2

REFERENCE_DEFAULT = {
    "t1": (2 * umax * t1
           + 3 * umax * (4 * umax * x0_2 - x0_3 ** 2) / D * t7
           - (96 * umax ** 2 * dx_1 + 7 * x0_3 ** 3
              + 12 * umax * x0_2 * x0_3) / (24 * umax * x0_2 - 12 * x0_3 ** 2)
           + umax ** 3 / D * t7 ** 3
           + 3 * umax ** 2 * x0_3 / D * t7 ** 2),
    "t3": (t3
           + (umax ** 2 * t7 + 3 * umax * x0_3) / (2 * D) * t7 ** 2
           + (-96 * umax ** 2 * dx_1 + 5 * x0_3 ** 3
              - 36 * umax * x0_2 * x0_3)
           / (24 * umax * (2 * umax * x0_2 - x0_3 ** 2))
           + (x0_3 ** 2 + 4 * umax * x0_2) / (2 * D) * t7),
    "t7": (t7 ** 4
           + 4 * x0_3 / umax * t7 ** 3
           + (16 * umax * x0_2 - 2 * x0_3 ** 2) / umax ** 2 * t7 ** 2
           - (48 * umax ** 2 * x0_2 ** 2 + x0_3 ** 4
              + 96 * umax ** 2 * x0_3 * dx_1) / (3 * umax ** 4)
           - (96 * umax ** 2 * dx_1 + 4 * x0_3 ** 3) / (3 * umax ** 3) * t7),
}

REFERENCE_AUXILIARY = {
    "t1": 2 * umax * t1 - umax / 2 * t7 + sp.Rational(3, 2) * x0_3,
    "t3": t3 - sp.Rational(3, 4) * t7 + x0_3 / (4 * umax),
    "t7": ((3 * umax ** 3 * t7 ** 3 + 9 * umax ** 2 * x0_3 * t7 ** 2
            + 9 * umax * x0_3 ** 2 * t7
            - 96 * umax ** 2 * dx_1 - 13 * x0_3 ** 3) / (3 * umax ** 3)),
}


@pytest.fixture(scope="module")
def profile_doc():
    return build_profile(3, ProfileType.from_string("000"), gb_timeout=120)


def _symbol_table():
    return {s.name: s for s in (umax, umin, dx_1, x0_2, x0_3, xf_2, xf_3,
                                t1, t3, t7)}


def _clear(expr: sp.Expr) -> sp.Expr:
    return sp.fraction(sp.together(expr))[0]


def _assert_proportional(ours: sp.Expr, reference: sp.Expr, what: str):
    ratio = sp.cancel(sp.together(ours / reference))
    num, den = sp.fraction(ratio)
    assert ratio != 0, what
    assert not (num.free_symbols | den.free_symbols) & set(TSYMS), \
        f"{what}: ratio {ratio} is not a parameter-only factor"


def _assert_same_ideal(ours: list, reference: list, what: str):
    dom = sp.QQ.frac_field(umax, dx_1, x0_2, x0_3)
    gb_ref = sp.groebner(reference, *TSYMS, order="lex", domain=dom)
    gb_ours = sp.groebner(ours, *TSYMS, order="lex", domain=dom)
    for p in ours:
        _, rem = sp.reduced(p, gb_ref, *TSYMS, order="lex", domain=dom)
        assert rem == 0, f"{what}: generated polynomial outside reference ideal"
    for p in reference:
        _, rem = sp.reduced(p, gb_ours, *TSYMS, order="lex", domain=dom)
        assert rem == 0, f"{what}: reference polynomial outside generated ideal"


def test_default_system_matches_reference(profile_doc):
    system = profile_doc["systems"][-1]
    assert system["guards"] == []
    symbols = _symbol_table()
    by_unknown = {st["unknown"]: sp.cancel(step_poly(st, symbols)
                                           .subs(SPECIALIZE))
                  for st in system["steps"]}
    assert set(by_unknown) == {"t1", "t3", "t7"}
    # solve order: the univariate final-time polynomial comes first
    assert system["steps"][0]["unknown"] == "t7"
    assert len(system["steps"][0]["coeffs"]) == 5  # quartic
    _assert_proportional(by_unknown["t7"], REFERENCE_DEFAULT["t7"],
                         "default final-time polynomial")
    _assert_same_ideal([sp.expand(p) for p in by_unknown.values()],
                       [_clear(r) for r in REFERENCE_DEFAULT.values()],
                       "default system")


def test_auxiliary_system_matches_reference_on_singular_surface(profile_doc):
    symbols = _symbol_table()
    matched = None
    for system in profile_doc["systems"]:
        if not system["guards"]:
            continue
        subs = {name: tree_to_sympy(val, symbols)
                for name, val in system["substitutions"]}
        if "x0_2" in subs and sp.simplify(
                subs["x0_2"].subs(SPECIALIZE)
                - x0_3 ** 2 / (2 * umax)) == 0:
            matched = system
            break
    assert matched is not None, \
        "no substitute system solving the singular surface for x0_2"
    by_unknown = {st["unknown"]: sp.cancel(step_poly(st, symbols)
                                           .subs(SPECIALIZE))
                  for st in matched["steps"]}
    assert len(matched["steps"][0]["coeffs"]) == 4  # cubic final-time poly
    _assert_proportional(by_unknown["t7"],
                         _clear(REFERENCE_AUXILIARY["t7"]),
                         "auxiliary final-time polynomial")
    _assert_same_ideal([sp.expand(p) for p in by_unknown.values()],
                       [_clear(r) for r in REFERENCE_AUXILIARY.values()],
                       "auxiliary system")


def test_guard_is_the_singular_surface(profile_doc):
    symbols = _symbol_table()
    found = False
    for system in profile_doc["systems"]:
        for divisor in system["guards"]:
            expr = sp.expand(sp.Add(*[tree_to_sympy(t, symbols)
                                      for t in divisor]).subs(SPECIALIZE))
            ratio = sp.cancel(expr / (2 * umax * x0_2 - x0_3 ** 2))
            if not ratio.free_symbols and ratio != 0:
                found = True
    assert found, "no guard reduces to the singular surface " \
                  "2*umax*x0_2 = x0_3**2"
