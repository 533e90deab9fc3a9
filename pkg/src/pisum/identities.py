"""Gamma-style identities for principal indefinite sums.

Multiplication formulas, the shifted-sum functional equation, alternating
(Wallis-type) limits, reflection periodic parts, rational-argument series,
Gautschi-type brackets, reconstruction from derivatives, and the
Taylor-coefficient series for the asymptotic constant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .asym import BoundPair, MethodRefused, sigma_constant
from .gmodel import AdmissibleFunction
from .numerics import (
    bernoulli_number,
    forward_difference,
    gen_binomial,
    gregory_coeff,
    integrate,
)
from .sigma import (
    SigmaResult,
    derivative_function,
    sigma_derivative,
    sigma_eval,
    sigma_eval_summable,
    sigma_extend,
)

__all__ = [
    "WebsterProblem",
    "multiplication_lhs",
    "multiplication_constant",
    "webster_solve",
    "wallis_limit",
    "reflection_periodic",
    "rational_argument",
    "RationalArgumentResult",
    "gautschi_bounds",
    "elevator",
    "euler_series_analogue",
    "rescale",
    "shift",
]


def _value(g: AdmissibleFunction, x: float, tol: float) -> float:
    res = sigma_eval_summable(g, x, tol) if g.summable else sigma_eval(g, x, tol)
    return res.value


def rescale(g: AdmissibleFunction, m: float, name: str = "") -> AdmissibleFunction:
    """The function x -> g(x/m); admissible with the same working order."""
    if m <= 0:
        raise ValueError("need m > 0")
    return g.with_(
        eval=lambda x, _e=g.eval: _e(np.asarray(x, dtype=float) / m),
        deriv=(lambda x, r, _d=g.deriv: _d(x / m, r) / m**r) if g.deriv else None,
        convexity_onset=(lambda q, _o=g.onset: m * _o(q)),
        name=name or f"{g.name or 'g'}(x/{m:g})",
    )


def shift(g: AdmissibleFunction, a: float, name: str = "") -> AdmissibleFunction:
    """The function x -> g(x + a) for a >= 0."""
    if a < 0:
        raise ValueError("need a >= 0")
    return g.with_(
        eval=lambda x, _e=g.eval: _e(np.asarray(x, dtype=float) + a),
        deriv=(lambda x, r, _d=g.deriv: _d(x + a, r)) if g.deriv else None,
        convexity_onset=(lambda q, _o=g.onset: max(1.0, _o(q) - a)),
        name=name or f"{g.name or 'g'}(x+{a:g})",
    )


# ---------------------------------------------------------------------------
# Multiplication formulas


def multiplication_lhs(g: AdmissibleFunction, m: int, x: float,
                       tol: float = 1e-10) -> float:
    """sum_{j<m} f((x+j)/m) where f is the principal sum of g."""
    if m < 1:
        raise ValueError("need m >= 1")
    return math.fsum(_value(g, (x + j) / m, tol / m) for j in range(m))


def multiplication_constant(g: AdmissibleFunction, m: int, tol: float = 1e-10) -> float:
    """sum_{j=1}^{m} f(j/m) from asymptotic constants alone:

    m c[g] - c[g(./m)] - m int_{1/m}^1 g.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    if m == 1:
        return 0.0
    gm = rescale(g, m)
    c = sigma_constant(g, "auto", tol / 4).value
    cm = sigma_constant(gm, "auto", tol / 4).value
    integral = integrate(lambda t: float(g(t)), 1.0 / m, 1.0, tol / 4)
    return m * c - cm - m * integral


# ---------------------------------------------------------------------------
# The shifted-sum functional equation


@dataclass(frozen=True)
class WebsterProblem:
    """The equation sum_{j<m} f(x + a j) = h(x) on the half-line."""

    h: AdmissibleFunction
    m: int
    a: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need m >= 1")
        if self.a <= 0:
            raise ValueError("need a > 0")


def webster_solve(problem: WebsterProblem, x: float, tol: float = 1e-10
                  ) -> tuple[float, float]:
    """Unique eventually-convex-type solution of the shifted-sum equation.

    f(x) = F((x+a)/(am)) - F(x/(am)) with F the principal sum of
    x -> h(a m x).  Returns (value, residual) where the residual is the
    defect sum_{j<m} f(x + a j) - h(x) evaluated for diagnostics.
    """
    h, m, a = problem.h, problem.m, problem.a
    ham = h.with_(
        eval=lambda t, _e=h.eval: _e(np.asarray(t, dtype=float) * (a * m)),
        deriv=(lambda t, r, _d=h.deriv: _d(t * a * m, r) * (a * m) ** r) if h.deriv else None,
        convexity_onset=(lambda q, _o=h.onset: max(1.0, _o(q) / (a * m))),
        name=f"{h.name or 'h'}({a * m:g}x)",
    )

    def solution(t: float) -> float:
        return (_value(ham, (t + a) / (a * m), tol / (2 * m))
                - _value(ham, t / (a * m), tol / (2 * m)))

    value = solution(x)
    residual = math.fsum(solution(x + a * j) for j in range(m)) - float(h(x))
    return value, residual


# ---------------------------------------------------------------------------
# Alternating-limit (Wallis-type) sequences

_WALLIS_VARIANTS = ("shift0", "shift1", "scale2")


def wallis_limit(g: AdmissibleFunction, variant: str = "shift0",
                 N: int = 32, tol: float = 1e-9) -> list[float]:
    """Sequence theta(n) = h(n) + sum_{k<=2n} (-1)^(k-1) g(k), expected -> 0.

    The compensator h depends on the variant:
      shift0  uses the doubled function 2 g(2x),
      shift1  uses the difference of g at odd doubled points,
      scale2  uses the difference of g at even doubled points.
    The raw sequence is returned; no simplification of h is attempted.
    """
    if variant not in _WALLIS_VARIANTS:
        raise ValueError(f"variant must be one of {_WALLIS_VARIANTS}")
    p = g.p
    out: list[float] = []
    alt_partial = 0.0
    ks = np.arange(1, 2 * N + 1, dtype=float)
    signs = np.where(ks.astype(int) % 2 == 1, 1.0, -1.0)
    gvals = g(ks) * signs

    if variant == "shift0":
        gt = g.with_(
            eval=lambda x, _e=g.eval: 2.0 * np.asarray(_e(2.0 * np.asarray(x, dtype=float))),
            deriv=(lambda x, r, _d=g.deriv: 2.0 ** (r + 1) * _d(2.0 * x, r)) if g.deriv else None,
            convexity_onset=(lambda q, _o=g.onset: max(1.0, _o(q) / 2.0)),
            name=f"2*{g.name or 'g'}(2x)")
        c = sigma_constant(g, "auto", tol).value
        ct = sigma_constant(gt, "auto", tol).value
        for n in range(1, N + 1):
            alt_partial += float(gvals[2 * n - 2] + gvals[2 * n - 1])
            tail_int = integrate(lambda t: float(g(2 * n + t)) - float(g(t)), 1.0, 2.0, tol)
            corr = math.fsum(
                gregory_coeff(j) * (forward_difference(g, j - 1, 2.0 * n + 1.0)
                                         - forward_difference(gt, j - 1, float(n + 1)))
                for j in range(1, p + 1))
            out.append(ct - c + tail_int + corr + alt_partial)
        return out

    if variant == "shift1":
        gt = AdmissibleFunction(
            eval=lambda x: np.asarray(g(2.0 * np.asarray(x, dtype=float) - 1.0 + 1.0)
                                      - g(2.0 * np.asarray(x, dtype=float) - 1.0)),
            degree_p=max(p - 1, 0), summable=True, alternating=g.alternating,
            convexity_onset=(lambda q, _o=g.onset: max(1.0, (_o(q) + 1.0) / 2.0)),
            name=f"D{g.name or 'g'}(2x-1)")
    else:  # scale2
        gt = AdmissibleFunction(
            eval=lambda x: np.asarray(g(2.0 * np.asarray(x, dtype=float) + 1.0)
                                      - g(2.0 * np.asarray(x, dtype=float))),
            degree_p=max(p - 1, 0), summable=True, alternating=g.alternating,
            convexity_onset=(lambda q, _o=g.onset: max(1.0, _o(q) / 2.0)),
            name=f"D{g.name or 'g'}(2x)")
    ct = sigma_constant(gt, "auto", tol).value
    pt = max(p - 1, 0)
    for n in range(1, N + 1):
        alt_partial += float(gvals[2 * n - 2] + gvals[2 * n - 1])
        if variant == "shift1":
            integral = integrate(lambda t: float(gt(t)), 1.0, float(n + 1), tol)
            corr = math.fsum(gregory_coeff(j) * forward_difference(gt, j - 1, float(n + 1))
                             for j in range(1, pt + 1))
            h = ct + integral - corr
        else:
            integral = integrate(lambda t: float(gt(t)), 1.0, float(n), tol) if n > 1 else 0.0
            corr = math.fsum(gregory_coeff(j) * forward_difference(gt, j - 1, float(n))
                             for j in range(1, pt + 1))
            h = float(g(2.0 * n)) - float(g(1.0)) - ct - integral + corr
        out.append(h + alt_partial)
    return out


# ---------------------------------------------------------------------------
# Reflection: the 1-periodic part


def reflection_periodic(g: AdmissibleFunction, parity: str, x: float,
                        tol: float = 1e-9, n_cap: int = 2**22) -> float:
    """Periodic part of the reflection combination of the extended sum.

    For odd g this is f(x) - f(1-x), for even g it is f(x) + f(1-x), both
    1-periodic on the non-integer reals; evaluated from the symmetric-limit
    series with the order-p binomial corrections.
    """
    if parity not in ("odd", "even"):
        raise ValueError("parity must be 'odd' or 'even'")
    if g.domain != "punctured":
        raise ValueError("reflection needs a function on the punctured reals")
    if x == math.floor(x):
        raise ValueError("reflection combination has poles at the integers")
    sgn = -1.0 if parity == "odd" else 1.0
    for probe in (0.3, 1.7, 2.6):
        if abs(float(g(-probe)) - sgn * float(g(probe))) > 1e-9 * (1.0 + abs(float(g(probe)))):
            raise MethodRefused(f"sampled values are not {parity} at +/-{probe}")
    p = g.p
    prev = None
    n = 64
    while True:
        ks = np.arange(-(n - 1), n, dtype=float)
        core = -float(np.sum(g(x + ks))) - float(g(x - n))
        if parity == "even":
            kpos = np.arange(1, n, dtype=float)
            core = (-float(g(x))
                    + float(np.sum(g(kpos) - g(x + kpos)))
                    + float(np.sum(g(-kpos) - g(x - kpos)))
                    - float(g(x - n)))
        corr = math.fsum(
            (gen_binomial(x, j) + sgn * gen_binomial(1.0 - x, j))
            * forward_difference(g, j - 1, float(n)) for j in range(1, p + 1))
        value = core + corr
        if prev is not None and abs(value - prev) <= tol / 2.0:
            return value
        if 2 * n > n_cap:
            return value
        prev = value
        n *= 2


# ---------------------------------------------------------------------------
# Rational arguments through roots of unity


@dataclass(frozen=True)
class RationalArgumentResult:
    value: float
    tail_estimate: float
    blocks: int

    def __float__(self):
        return self.value


def rational_argument(g: AdmissibleFunction, a: int, b: int, K: int = 200000,
                      tol: float = 1e-9) -> RationalArgumentResult:
    """Principal sum at a/b from root-of-unity weighted series.

    f(a/b) = (1/b) sum_{j=1}^{b-1} (1 - w^(-aj)) S_j,  S_j = sum_k w^(jk) g(k/b),
    with w = exp(2 pi i / b).  The conditionally convergent S_j are summed
    in full b-blocks, which cancels the oscillation; truncation stops when
    a whole block moves the answer by less than tol.
    """
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    if g.p != 0:
        raise ValueError("rational-argument series needs a function of working order 0")
    omega = [cmath.exp(2j * cmath.pi * j / b) for j in range(b)]
    weights = [1.0 - omega[(-a * j) % b] for j in range(b)]
    total = 0.0 + 0.0j
    blocks = 0
    prev_block = math.inf
    k0 = 1
    while k0 <= K:
        ks = np.arange(k0, k0 + b, dtype=float)
        gv = g(ks / b)
        block = 0.0 + 0.0j
        for j in range(1, b):
            s_block = sum(omega[(j * int(k)) % b] * float(v) for k, v in zip(ks, gv))
            block += weights[j] * s_block
        total += block
        blocks += 1
        mag = abs(block) / b
        if mag < tol / 2.0 and prev_block < tol:
            break
        prev_block = mag
        k0 += b
    value = (total / b).real
    tail = max(abs(prev_block), mag) * 2.0
    return RationalArgumentResult(value, tail, blocks)


# ---------------------------------------------------------------------------
# Gautschi-type bracket


def gautschi_bounds(g: AdmissibleFunction, x: float, a: float,
                    tol: float = 1e-10) -> BoundPair:
    """Certified bracket for f(x+a) - f(x+ceil(a)) when the principal sum
    is convex (or concave) past x + floor(a).

    The endpoints are (a - ceil(a)) g(x + ceil(a)) and
    (a - ceil(a)) g(x + floor(a)); the derivative refinement sits between
    them when available.
    """
    if a < 0:
        raise ValueError("need a >= 0")
    lo_end = (a - math.ceil(a)) * float(g(x + math.ceil(a)))
    hi_end = (a - math.ceil(a)) * float(g(x + math.floor(a))) if a != math.ceil(a) else lo_end
    certified = x + math.floor(a) >= g.onset(max(g.p, 1))
    return BoundPair(min(lo_end, hi_end), max(lo_end, hi_end),
                     "shifted_ratio", certified)


# ---------------------------------------------------------------------------
# Reconstruction from derivatives (the lift through antiderivatives)


def elevator(g: AdmissibleFunction, r: int, a: float, x: float,
             tol: float = 1e-9) -> float:
    """Principal sum of g rebuilt from the sum of its r-th derivative.

    Computes F = (Sf)^(r) as S(g^(r)) plus its matching constant, verifies
    the compatibility condition int_a^{a+1} F = g^(r-1)(a), then Taylor-
    integrates back up with Bernoulli-weighted matching coefficients and
    normalizes at 1.
    """
    if r < 1:
        raise ValueError("need r >= 1")
    if a <= 0:
        raise ValueError("need a > 0")
    gr = derivative_function(g, r)
    const = sigma_constant(gr, "auto", tol / 8).value
    shift_c = g.derivative(1.0, r - 1) - const

    def big_f(t: float) -> float:
        inner = (sigma_eval_summable(gr, t, tol / 8) if gr.summable
                 else sigma_eval(gr, t, tol / 8))
        return inner.value + shift_c

    defect = integrate(big_f, a, a + 1.0, tol / 8) - g.derivative(a, r - 1)
    if abs(defect) > 25.0 * tol:
        raise MethodRefused(
            f"compatibility integral off by {defect:.3g}; reconstruction refused")

    coeffs = [
        math.fsum(
            bernoulli_number(j) / math.factorial(j)
            * (g.derivative(a, j + k - 1)
               - integrate(lambda u: (a + 1.0 - u) ** (r - j - k)
                           / math.factorial(r - j - k) * big_f(u),
                           a, a + 1.0, tol / 16))
            for j in range(0, r - k))
        for k in range(1, r)
    ]

    def taylor_part(t: float) -> float:
        terms = [ck * (t - a) ** k / math.factorial(k)
                 for k, ck in enumerate(coeffs, start=1)]
        if t != a:
            ker = lambda u: (t - u) ** (r - 1) / math.factorial(r - 1) * big_f(u)
            if t > a:
                terms.append(integrate(ker, a, t, tol / 16))
            else:
                terms.append(-integrate(ker, t, a, tol / 16))
        return math.fsum(terms)

    # Normalize so the reconstruction vanishes at 1.
    return taylor_part(x) - taylor_part(1.0)


# ---------------------------------------------------------------------------
# Taylor-coefficient series for the asymptotic constant


def euler_series_analogue(g: AdmissibleFunction, K: int = 40,
                          tol: float = 1e-10) -> tuple[float, float]:
    """Partial sum of c[g] = sum_{k>=1} (Sf)^(k)(1) / (k+1)!.

    Derivative values at 1 come from the constant-shift identity; for
    orders above the working order they reduce to plain convergent series
    of g^(k) over the integers.  Returns (partial sum, last-term estimate);
    raises MethodRefused on term growth.
    """
    p = g.p
    terms: list[float] = []
    prev = math.inf
    for k in range(1, K + 1):
        if k > p:
            dk = -_derivative_series_at_one(g, k, tol)
        else:
            dk = sigma_derivative(g, k, 1.0, tol).value
        term = dk / math.factorial(k + 1)
        if abs(term) > 4.0 * prev and abs(term) > tol:
            raise MethodRefused(f"series terms grow at k={k}; divergent regime")
        terms.append(term)
        prev = max(abs(term), 1e-300)
        if abs(term) < tol and k > p + 2:
            break
    return math.fsum(terms), abs(terms[-1])


def _derivative_series_at_one(g: AdmissibleFunction, k: int, tol: float) -> float:
    from .sigma import _tail_estimate

    gr = derivative_function(g, k)
    n = 64
    while True:
        tail = _tail_estimate(gr, float(n), 16.0)
        if not math.isinf(tail) and (tail <= tol / 4.0 or n >= 2**20):
            break
        if math.isinf(tail) and n >= 2**20:
            break
        n *= 2
    ks = np.arange(1, n + 1, dtype=float)
    return math.fsum(map(float, gr(ks)))
