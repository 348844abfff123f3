"""Command line entry point: generate a planner bundle for one chain order."""

from __future__ import annotations

import argparse
import json
import sys

from .combinatorics import ProfileType, state_segment_count
from .eliminate import GB_TIMEOUT_DEFAULT
from .pipeline import MAX_GUARD_DEPTH, build_bundle


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="precomp",
        description="Precompute triangular switching-time systems for an "
                    "integrator chain of the given order.")
    ap.add_argument("--n", type=int, required=True, help="chain order (1..4)")
    ap.add_argument("--out", required=True, help="output bundle path, '-' for stdout")
    ap.add_argument("--profiles", nargs="*", default=None, metavar="BITS",
                    help="restrict to these profile bit strings (default: all feasible)")
    ap.add_argument("--gb-timeout", type=float, default=GB_TIMEOUT_DEFAULT,
                    help="seconds to spend on a Groebner basis before "
                         "falling back to resultants")
    ap.add_argument("--guard-depth", type=int, default=MAX_GUARD_DEPTH,
                    help="maximum nesting depth of substitute systems")
    ap.add_argument("--regression-check", action="store_true",
                    help="after generation, replay the built-in third-order "
                         "reference scenario against the bundle (order 3 "
                         "with the all-zeros profile required)")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)

    profiles = None
    if args.profiles is not None:
        width = state_segment_count(args.n)
        profiles = []
        for bits in args.profiles:
            if len(bits) != width or set(bits) - {"0", "1"}:
                ap.error(f"profile {bits!r} is not a {width}-bit string")
            profiles.append(ProfileType.from_string(bits))

    bundle = build_bundle(args.n, profiles=profiles,
                          gb_timeout=args.gb_timeout,
                          max_depth=args.guard_depth,
                          verbose=args.verbose)
    if args.regression_check:
        from .regression import regression_check
        report = regression_check(bundle)
        for issue in report["issues"]:
            print(f"regression check: {issue}", file=sys.stderr)
        if not report["ok"]:
            return 1
        if args.verbose:
            print("regression check passed", file=sys.stderr)
    text = json.dumps(bundle, indent=1)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        if args.verbose:
            print(f"wrote {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
