"""Bundle loading, validation and triangular-system solving."""

import copy
import json
from importlib import resources

import pytest

from chainplan.bundles import (
    BundleFormatError,
    builtin_bundle,
    load_bundle,
    solve_system,
)


def _raw_doc(n: int) -> dict:
    text = resources.files("chainplan.data").joinpath(f"n{n}.json").read_text()
    return json.loads(text)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_builtin_bundles_load(n):
    bundle = builtin_bundle(n)
    assert bundle.n == n
    assert len(bundle.profiles) == 2 ** (2 ** (n - 1) - 1)
    # enumeration order: unconstrained profile first, default system last
    assert bundle.profiles[0].bits == "0" * (2 ** (n - 1) - 1)
    for profile in bundle.profiles:
        assert not profile.systems[-1].guard_fns


def test_missing_order_raises():
    with pytest.raises(ValueError):
        builtin_bundle(7)


def test_unconstrained_cubic_default_is_quartic():
    profile = builtin_bundle(3).profiles[0]
    default = profile.systems[-1]
    assert default.steps[0].unknown == "t7"
    assert default.steps[0].degree == 4
    assert [s.degree for s in default.steps[1:]] == [1, 1]
    # the auxiliary system on the singular manifold drops one degree
    assert profile.systems[0].guard_fns
    assert profile.systems[0].steps[0].degree == 3


def test_version_mismatch_rejected():
    doc = _raw_doc(2)
    doc["format_version"] = 99
    with pytest.raises(BundleFormatError):
        load_bundle(doc)


def test_tampered_ties_rejected():
    doc = _raw_doc(2)
    doc["profiles"][0]["ties"] = []
    with pytest.raises(BundleFormatError):
        load_bundle(doc)


def test_tampered_steps_rejected():
    doc = _raw_doc(2)
    doc["profiles"][0]["systems"][0]["steps"].pop()
    with pytest.raises(BundleFormatError):
        load_bundle(doc)


def test_unknown_symbol_rejected():
    doc = copy.deepcopy(_raw_doc(2))
    doc["profiles"][0]["systems"][0]["steps"][0]["coeffs"][0] = "bogus_param"
    with pytest.raises(ValueError):
        load_bundle(doc)


def test_solve_system_rest_to_rest_double_integrator():
    # d = 4, |u| <= 1, no velocity bound: symmetric triangle, t1 = 2, t3 = 4
    bundle = builtin_bundle(2)
    profile = bundle.profiles[0]
    env = {"dx_1": 4.0, "umax": 1.0, "umin": -1.0,
           "x0_2": 0.0, "xf_2": 0.0, "xmax_2": 1e9, "xmin_2": -1e9}
    solutions = solve_system(profile.systems[-1], env)
    assert any(abs(s["t1"] - 2.0) < 1e-9 and abs(s["t3"] - 4.0) < 1e-9
               for s in solutions)


def test_guard_selection_is_relative():
    # guards compare against the monomial magnitude, so uniform scaling of
    # the parameters must not change which system is selected
    bundle = builtin_bundle(3)
    profile = bundle.profiles[0]
    base = {"dx_1": 4.0, "umax": 1.0, "umin": -1.0,
            "x0_2": 0.5, "x0_3": 1.0, "xf_2": 0.0, "xf_3": 0.0,
            "xmax_2": 1e9, "xmin_2": -1e9, "xmax_3": 1e9, "xmin_3": -1e9}
    # the singular manifold: 2*umax*(x0_2 - xf_2) = x0_3^2 - xf_3^2
    assert base["x0_3"] ** 2 - base["xf_3"] ** 2 == pytest.approx(
        2 * base["umax"] * (base["x0_2"] - base["xf_2"]))
    chosen = profile.select_system(base)
    assert chosen is profile.systems[0]
    # the divisor is homogeneous, so uniform parameter scaling keeps it zero
    scaled = {k: v * 1e-6 for k, v in base.items()}
    assert profile.select_system(scaled) is profile.systems[0]
    off = dict(base, x0_2=0.7)
    assert profile.select_system(off) is profile.systems[-1]
