"""Univariate polynomial root finding for the triangular-system solver.

Coefficients are ordered highest degree first, matching ``numpy.roots``.
Degrees 1 and 2 use closed forms; higher degrees go through the companion
matrix.  Every root is polished with a few Newton steps on the original
polynomial because the companion-matrix eigenvalues of coefficient vectors
assembled from previously solved roots can carry noticeable error.
"""

from __future__ import annotations

import math

import numpy as np

# Leading coefficients below this fraction of the largest coefficient are
# treated as numerically vanished and deflated away.
LEAD_DEFLATION_REL = 1e-12

NEWTON_STEPS = 3

EPS_IM_DEFAULT = 1e-8
EPS_T_DEFAULT = 1e-9


class ZeroPolynomialError(ValueError):
    """The polynomial is identically zero: every value is a root."""


def _horner(coeffs, x):
    """Scalar Horner evaluation; much faster than np.polyval for few terms."""
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _derivative(coeffs):
    d = len(coeffs) - 1
    return [(d - i) * coeffs[i] for i in range(d)]


def _polish(coeffs, r: complex) -> complex:
    dcoeffs = _derivative(coeffs)
    for _ in range(NEWTON_STEPS):
        d = _horner(dcoeffs, r)
        if d == 0:
            break
        step = _horner(coeffs, r) / d
        if not (abs(step.real) + abs(step.imag) < math.inf):
            break
        r = r - step
    return r


def roots_all(coeffs) -> list[complex]:
    """All complex roots (with multiplicity) of sum(coeffs[i] * x^(d-i)).

    Raises ZeroPolynomialError for the identically zero polynomial; returns
    an empty list for nonzero constants.
    """
    c = [float(v) for v in coeffs]
    if not c:
        raise ValueError("coefficient vector must be 1-d and nonempty")
    scale = max(abs(v) for v in c)
    if scale == 0.0:
        raise ZeroPolynomialError("all coefficients are zero")
    # deflate numerically vanished leading terms
    k = 0
    while k < len(c) - 1 and abs(c[k]) <= LEAD_DEFLATION_REL * scale:
        k += 1
    c = c[k:]
    if abs(c[0]) <= LEAD_DEFLATION_REL * scale:
        raise ZeroPolynomialError("all coefficients numerically vanish")
    d = len(c) - 1
    if d == 0:
        return []
    if d == 1:
        return [complex(-c[1] / c[0])]
    if d == 2:
        a, b, cc = (complex(v) for v in c)
        disc = b * b - 4.0 * a * cc
        s = disc ** 0.5
        # Citardauq pairing avoids cancellation for |b| >> |ac|
        q = -0.5 * (b + s) if b.real >= 0 else -0.5 * (b - s)
        r1 = q / a
        r2 = cc / q if q != 0 else complex(0.0)
        return [r1, r2]
    if d in (3, 4):
        # fast closed forms; they lose accuracy near repeated roots, so a
        # residual check gates them with the companion matrix as fallback
        raw = _cubic(*c) if d == 3 else _quartic(*c)
        out = [_polish(c, r) for r in raw]
        # residuals catch inaccurate roots; the Vieta sum catches polish
        # collapsing two nearby seeds onto the same simple root (which
        # leaves only true roots but drops one of them)
        big = max(1.0, max(abs(r) for r in out))
        if abs(sum(out) + c[1] / c[0]) <= 1e-6 * d * big and \
                all(abs(_horner(c, r)) <= 1e-11 * scale * max(1.0, abs(r)) ** d
                    for r in out):
            return out
    comp = np.zeros((d, d), dtype=complex)
    comp[0, :] = [-v / c[0] for v in c[1:]]
    comp[1:, :-1] = np.eye(d - 1)
    eig = np.linalg.eigvals(comp)
    return [_polish(c, r) for r in eig]


_CUBE_ROOTS_OF_UNITY = (complex(1.0),
                        complex(-0.5, math.sqrt(3.0) / 2.0),
                        complex(-0.5, -math.sqrt(3.0) / 2.0))


def _cubic(a, b, c, d):
    """Closed-form complex roots of a cubic; raw values, polish afterwards."""
    b, c, d = b / a, c / a, d / a
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = complex(q * q / 4.0 + p ** 3 / 27.0) ** 0.5
    u3 = -q / 2.0 + disc
    if abs(u3) < abs(-q / 2.0 - disc):
        u3 = -q / 2.0 - disc
    if u3 == 0:
        return [complex(-shift)] * 3
    u = u3 ** (1.0 / 3.0)
    return [w * u - p / (3.0 * w * u) - shift for w in _CUBE_ROOTS_OF_UNITY]


def _quartic(a, b, c, d, e):
    """Closed-form complex roots via the resolvent cubic; polish afterwards."""
    b, c, d, e = b / a, c / a, d / a, e / a
    shift = b / 4.0
    # depressed quartic y^4 + p y^2 + q y + r
    p = c - 3.0 * b * b / 8.0
    q = d - b * c / 2.0 + b ** 3 / 8.0
    r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b ** 4 / 256.0
    # z^3 + 2p z^2 + (p^2 - 4r) z - q^2 = 0; any nonzero root splits the
    # quartic into two quadratics
    zs = _cubic(1.0, 2.0 * p, p * p - 4.0 * r, -q * q)
    z = max(zs, key=abs)
    if abs(z) < 1e-14 * (1.0 + abs(p) + abs(r)):
        # effectively biquadratic
        inner = complex(p * p - 4.0 * r) ** 0.5
        out = []
        for s in ((-p + inner) / 2.0, (-p - inner) / 2.0):
            root = complex(s) ** 0.5
            out.extend((root - shift, -root - shift))
        return out
    w = complex(z) ** 0.5
    out = []
    for sign in (1.0, -1.0):
        # y^2 -/+ w y + (p + z +/- q/w)/2
        bq = -sign * w
        cq = (p + z + sign * q / w) / 2.0
        disc = (bq * bq - 4.0 * cq) ** 0.5
        out.append((-bq + disc) / 2.0 - shift)
        out.append((-bq - disc) / 2.0 - shift)
    return out


def real_nonneg_roots(coeffs, eps_im: float = EPS_IM_DEFAULT,
                      eps_t: float = EPS_T_DEFAULT) -> list[float]:
    """Sorted real nonnegative roots; near-zero negatives clamp to 0.

    Roots are kept when the imaginary part is below ``eps_im`` relative to
    the root magnitude, and deduplicated within ``eps_t``.
    """
    out = []
    for r in roots_all(coeffs):
        if abs(r.imag) > eps_im * (1.0 + abs(r.real)):
            continue
        x = r.real
        if x < -eps_t:
            continue
        out.append(max(x, 0.0))
    out.sort()
    dedup: list[float] = []
    for x in out:
        if not dedup or x - dedup[-1] > eps_t:
            dedup.append(x)
    return dedup


def newton_polish_scalar(coeffs, r: float, steps: int = NEWTON_STEPS) -> float:
    """Real Newton refinement used after back-substitution of solved times."""
    c = np.asarray(coeffs, dtype=float)
    d = np.polyder(c)
    for _ in range(steps):
        den = _horner(d, r)
        if den == 0 or not math.isfinite(den):
            break
        step = _horner(c, r) / den
        if not math.isfinite(step):
            break
        r -= step
    return r
