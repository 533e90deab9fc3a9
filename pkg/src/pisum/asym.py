"""Asymptotic constants, residuals, expansions, and certified brackets.

The asymptotic constant of g is the integral of its principal sum over
(1, 2); it plays the role that log sqrt(2*pi) plays for the log-gamma
function.  This module computes it by several independent routes
(integral of the sum, tail limits of corrected partial sums, Gregory and
Euler-Maclaurin series, oscillatory integrals) and provides the related
machinery: the generalized Binet function, Stirling/Burnside residuals,
asymptotic expansions, and two-sided bounds of Wendel, Stirling, Webster,
and nested-refinement type.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .gmodel import AdmissibleFunction, ConvexityViolation, convexity_probe
from .numerics import (
    bernoulli_number,
    bernoulli_poly,
    forward_difference,
    gen_binomial,
    gregory_coeff,
    gregory_tail,
    integrate,
)
from .sigma import sigma_eval, sigma_eval_summable, sigma_at_integers

__all__ = [
    "ConstantEstimate",
    "BoundPair",
    "MethodRefused",
    "binet_J",
    "sigma_constant",
    "euler_constant",
    "stirling_residual",
    "burnside_residual",
    "asymptotic_expansion",
    "ExpansionResult",
    "liu_eval",
    "wendel_bounds",
    "stirling_bounds",
    "bracket_refine",
    "webster_bounds",
]

_METHOD_ALIASES = {
    "raabe": "raabe_integral",
    "raabe_integral": "raabe_integral",
    "stirling": "stirling_limit",
    "stirling_limit": "stirling_limit",
    "gregory": "gregory_series",
    "gregory_series": "gregory_series",
    "em": "euler_maclaurin",
    "euler_maclaurin": "euler_maclaurin",
    "liu": "liu_integral",
    "liu_integral": "liu_integral",
    "summable": "summable_split",
    "summable_split": "summable_split",
    "auto": "auto",
}


class MethodRefused(RuntimeError):
    """A constant-estimation method declined (divergence or failed precondition)."""


@dataclass(frozen=True)
class ConstantEstimate:
    """An estimate of an asymptotic-type constant with method provenance."""

    value: float
    method: str
    error_estimate: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class BoundPair:
    """Certified lower/upper bounds on a tagged quantity."""

    lower: float
    upper: float
    target: str
    certified: bool = True

    def __post_init__(self):
        if self.lower > self.upper + 1e-300:
            raise ValueError("lower bound exceeds upper bound")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


# ---------------------------------------------------------------------------
# Generalized Binet function


def binet_J(g: AdmissibleFunction, q: int, x: float, tol: float = 1e-12) -> float:
    """Trend residual sum_{j<q} G_j D^j g(x) - int_x^{x+1} g."""
    if q < 0:
        raise ValueError("need q >= 0")
    if x <= 0 and g.domain == "positive":
        raise ValueError("need x > 0")
    head = math.fsum(gregory_coeff(j) * forward_difference(g, j, x) for j in range(q))
    return head - integrate(lambda t: float(g(t)), x, x + 1.0, tol)


def _int_from_1(g: AdmissibleFunction, x: float, tol: float) -> float:
    if x == 1.0:
        return 0.0
    if x > 1.0:
        return integrate(lambda t: float(g(t)), 1.0, x, tol)
    return -integrate(lambda t: float(g(t)), x, 1.0, tol)


# ---------------------------------------------------------------------------
# The asymptotic constant, by several methods

_CONSTANT_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def sigma_constant(g: AdmissibleFunction, method: str = "raabe_integral",
                   tol: float = 1e-10) -> ConstantEstimate:
    """Asymptotic constant of g (the integral of its principal sum over (1,2)).

    Methods:
      raabe_integral   adaptive integral of certified principal-sum values
                       (the default; inherits the engine's certification)
      stirling_limit   corrected partial sums with a Gregory-tail bound
      gregory_series   Gregory-coefficient series anchored at an integer
      euler_maclaurin  Bernoulli-corrected partial sums
      liu_integral     sawtooth-kernel oscillatory integral
      summable_split   series-minus-integral split for summable g
      auto             summable_split when applicable, else raabe_integral

    Results are memoized per function and method under compute-once
    semantics.
    """
    method = _METHOD_ALIASES.get(method)
    if method is None:
        raise ValueError(f"unknown method; choose from {sorted(set(_METHOD_ALIASES))}")
    if method == "auto":
        method = "summable_split" if g.summable else "raabe_integral"
    key = (g, method)
    with _CACHE_LOCK:
        hit = _CONSTANT_CACHE.get(key)
    if hit is not None and hit.error_estimate <= tol * 1.0000001:
        return hit
    est = _SIGMA_METHODS[method](g, tol)
    with _CACHE_LOCK:
        prev = _CONSTANT_CACHE.get(key)
        if prev is None or est.error_estimate < prev.error_estimate:
            _CONSTANT_CACHE[key] = est
    return est


def _sigma_raabe(g: AdmissibleFunction, tol: float) -> ConstantEstimate:
    inner_tol = tol / 4.0
    quad_tol = tol / 4.0
    evals = 0
    worst = 0.0

    def integrand(t: float) -> float:
        nonlocal evals, worst
        evals += 1
        res = (sigma_eval_summable(g, 1.0 + t, inner_tol) if g.summable
               else sigma_eval(g, 1.0 + t, inner_tol))
        worst = max(worst, res.error_bound)
        return res.value

    value = integrate(integrand, 0.0, 1.0, quad_tol)
    return ConstantEstimate(value, "raabe_integral", quad_tol + worst,
                            {"points": evals, "max_inner_bound": worst})


def _sigma_stirling(g: AdmissibleFunction, tol: float) -> ConstantEstimate:
    p = g.p + (2 if g.alternating else 0)
    onset = g.onset(p)
    if math.isinf(onset):
        p, onset = g.p, g.onset(g.p)
    n = max(4, 2 ** max(2, int(math.ceil(math.log2(max(onset, 2.0))))))
    partial = sigma_at_integers(g, n)
    quad_budget = tol / 8.0
    integral = _int_from_1(g, float(n), quad_budget)
    steps = 0
    while True:
        corr = math.fsum(gregory_coeff(j) * forward_difference(g, j - 1, float(n))
                         for j in range(1, p + 1))
        bound = gregory_tail(p) * abs(forward_difference(g, p, float(n)))
        value = partial - integral + corr
        if bound <= tol / 2.0 or n >= 2**22:
            return ConstantEstimate(value, "stirling_limit", bound + quad_budget,
                                    {"n": n, "order": p, "steps": steps})
        ks = np.arange(n, 2 * n, dtype=float)
        partial += float(np.sum(g(ks)))
        integral += integrate(lambda t: float(g(t)), float(n), float(2 * n), quad_budget)
        n *= 2
        steps += 1


_GS_MAX_TERMS = 60


def _sigma_gregory(g: AdmissibleFunction, tol: float,
                   anchor: Optional[int] = None) -> ConstantEstimate:
    anchors = [anchor] if anchor is not None else [1, 2, 4, 8, 16, 32, 64]
    last_exc: Optional[Exception] = None
    for m in anchors:
        try:
            return _sigma_gregory_at(g, tol, int(m))
        except MethodRefused as exc:
            last_exc = exc
    raise MethodRefused(f"Gregory series diverged at every anchor tried: {last_exc}")


def _sigma_gregory_at(g: AdmissibleFunction, tol: float, m: int) -> ConstantEstimate:
    head = sigma_at_integers(g, m) - _int_from_1(g, float(m), tol / 8.0)
    terms: list[float] = []
    stencil_mass = 0.0
    for n in range(1, _GS_MAX_TERMS + 1):
        diff = forward_difference(g, n - 1, float(m))
        t = gregory_coeff(n) * diff
        terms.append(t)
        pts = float(m) + np.arange(n, dtype=float)
        stencil_mass = max(stencil_mass, float(np.max(np.abs(g(pts)))) * 2.0 ** (n - 1))
        if n >= 4:
            window = [abs(v) for v in terms[-3:]]
            if window[2] > window[1] > window[0] and window[2] > tol:
                raise MethodRefused(
                    f"terms grow at anchor {m} (|t_{n}|={window[2]:.3g}); divergent regime")
            decreasing = window[0] >= window[1] >= window[2]
            if abs(t) < tol and decreasing:
                break
    value = head + math.fsum(terms)
    last = abs(terms[-1])
    ratio = min(abs(terms[-1]) / abs(terms[-2]), 0.95) if abs(terms[-2]) > 0 else 0.5
    tail = last * ratio / (1.0 - ratio)
    noise = 2.2e-16 * stencil_mass
    err = last + tail + noise
    if err > max(tol, 1e-15) * 4 and m < 4096:
        raise MethodRefused(f"anchor {m}: series stalled at estimated error {err:.3g}")
    return ConstantEstimate(value, "gregory_series", err,
                            {"anchor": m, "terms": len(terms), "cancellation": noise})


def _sigma_euler_maclaurin(g: AdmissibleFunction, tol: float) -> ConstantEstimate:
    p = g.p
    n_terms = p + (4 if (g.alternating and g.has_derivatives) else 0)
    if n_terms >= 2 and not g.has_derivatives:
        n_terms = min(n_terms, 1)
    n = 8
    partial = sigma_at_integers(g, n)
    quad_budget = tol / 8.0
    integral = _int_from_1(g, float(n), quad_budget)
    prev = None
    while True:
        corr = math.fsum(bernoulli_number(k) / math.factorial(k) * g.derivative(float(n), k - 1)
                         for k in range(1, n_terms + 1))
        value = partial - integral - corr
        k_next = n_terms + 1 if bernoulli_number(n_terms + 1) != 0.0 else n_terms + 2
        omitted = abs(bernoulli_number(k_next)) / math.factorial(k_next) \
            * abs(g.derivative(float(n), k_next - 1))
        change = abs(value - prev) if prev is not None else math.inf
        err = 2.0 * omitted + (0.0 if prev is None else change)
        if (err <= tol / 2.0 and prev is not None) or n >= 2**22:
            return ConstantEstimate(value, "euler_maclaurin", err + quad_budget,
                                    {"n": n, "terms": n_terms})
        prev = value
        ks = np.arange(n, 2 * n, dtype=float)
        partial += float(np.sum(g(ks)))
        integral += integrate(lambda t: float(g(t)), float(n), float(2 * n), quad_budget)
        n *= 2


def _bernoulli_poly_max(n: int) -> float:
    grid = np.linspace(0.0, 1.0, 257)
    return max(abs(bernoulli_poly(n, float(u))) for u in grid)


def _sigma_liu(g: AdmissibleFunction, tol: float) -> ConstantEstimate:
    p = g.p
    if p <= 1:
        # half-minus-sawtooth kernel against g'
        def d1(t: float) -> float:
            return abs(g.derivative(t, 1))

        if not (d1(64.0) < d1(8.0)):
            raise MethodRefused("derivative tail not decreasing; sawtooth route refused")
        total: list[float] = []
        k = 1
        while True:
            block = integrate(lambda u: (u - 0.5) * g.derivative(k + u, 1), 0.0, 1.0, tol / 16.0)
            total.append(block)
            tail = abs(g.derivative(float(k + 1), 1)) / 6.0
            if tail <= tol / 2.0 and k >= 4:
                break
            if k > 200000:
                raise MethodRefused("sawtooth tail did not converge")
            k += 1
        value = 0.5 * g(1.0) + math.fsum(total)
        return ConstantEstimate(value, "liu_integral", tail + tol / 8.0, {"periods": k})
    # Bernoulli-kernel variant for higher order
    q = (p + 1 + 1) // 2
    if not g.has_derivatives:
        raise MethodRefused("higher-order sawtooth route needs analytic derivatives")
    fac = math.factorial(2 * q)
    head = 0.5 * g(1.0) - math.fsum(
        bernoulli_number(2 * k) / math.factorial(2 * k) * g.derivative(1.0, 2 * k - 1)
        for k in range(1, q + 1))
    mfac = _bernoulli_poly_max(2 * q + 1) / math.factorial(2 * q + 1)
    total = []
    k = 1
    while True:
        block = integrate(lambda u: bernoulli_poly(2 * q, u) / fac * g.derivative(k + u, 2 * q),
                          0.0, 1.0, tol / 16.0)
        total.append(block)
        tail = 1.2 * mfac * abs(g.derivative(float(k + 1), 2 * q))
        if tail <= tol / 2.0 and k >= 4:
            break
        if k > 200000:
            raise MethodRefused("Bernoulli-kernel tail did not converge")
        k += 1
    value = head - math.fsum(total)
    return ConstantEstimate(value, "liu_integral", tail + tol / 8.0,
                            {"periods": k, "kernel_order": 2 * q})


def _sigma_summable(g: AdmissibleFunction, tol: float) -> ConstantEstimate:
    from .sigma import _tail_estimate  # shared decay-rate machinery

    if not g.summable:
        raise MethodRefused("series-minus-integral split needs a summable g")
    n = 64
    while True:
        series_tail = _tail_estimate(g, float(n), 16.0)
        if math.isinf(series_tail):
            raise MethodRefused("tail not summable by the decay-rate estimate")
        if series_tail <= tol / 4.0 or n >= 2**22:
            break
        n *= 2
    partial = sigma_at_integers(g, n + 1)
    integral = _int_from_1(g, float(n), tol / 8.0)
    value = partial - integral - _signed_tail_integral(g, float(n), tol / 4.0)
    err = series_tail + tol / 2.0
    return ConstantEstimate(value, "summable_split", err, {"n": n})


def _signed_tail_integral(g: AdmissibleFunction, start: float, tol: float) -> float:
    """int_start^{oo} g, integrating outward until increments pass below tol."""
    total: list[float] = []
    lo = start
    width = max(start, 1.0)
    while True:
        block = integrate(lambda t: float(g(t)), lo, lo + width, tol / 8.0)
        total.append(block)
        if abs(block) <= tol / 4.0 and len(total) >= 3:
            return math.fsum(total)
        if len(total) > 200:
            return math.fsum(total)
        lo += width
        width *= 2.0


_SIGMA_METHODS = {
    "raabe_integral": _sigma_raabe,
    "stirling_limit": _sigma_stirling,
    "gregory_series": _sigma_gregory,
    "euler_maclaurin": _sigma_euler_maclaurin,
    "liu_integral": _sigma_liu,
    "summable_split": _sigma_summable,
}


def euler_constant(g: AdmissibleFunction, tol: float = 1e-10,
                   cross_check: bool = False) -> ConstantEstimate:
    """Rectangle/trapezoid-rule remainder constant of g on [1, oo).

    Computed from the asymptotic constant through the Gregory-coefficient
    conversion; optionally cross-checked against the direct series of
    trend residuals at the integers.
    """
    p = g.p
    base = sigma_constant(g, "auto", tol / 2)
    conv = math.fsum(gregory_coeff(j) * forward_difference(g, j - 1, 1.0)
                     for j in range(1, p + 1))
    value = base.value - conv
    diag = {"from": base.method, "order": p}
    err = base.error_estimate
    if cross_check:
        direct, direct_err = _euler_constant_series(g, p, tol)
        diag["series_value"] = direct
        diag["series_error"] = direct_err
        diag["discrepancy"] = abs(direct - value)
    return ConstantEstimate(value, "gregory_conversion", err, diag)


def _euler_constant_series(g: AdmissibleFunction, p: int, tol: float) -> tuple[float, float]:
    terms: list[float] = []
    k = 1
    while True:
        terms.append(binet_J(g, p + 1, float(k), tol / 64.0))
        tail = gregory_tail(p) * abs(forward_difference(g, p, float(k + 1)))
        if tail <= tol / 2.0 and k >= 4:
            return math.fsum(terms), tail + tol / 8.0
        if k > 200000:
            return math.fsum(terms), tail + tol / 8.0
        k += 1


# ---------------------------------------------------------------------------
# Residuals and expansions


def stirling_residual(g: AdmissibleFunction, x: float, tol: float = 1e-10) -> float:
    """Trend residual of the principal sum: f(x) - c - int_1^x g + Gregory terms.

    Vanishes at infinity; for the log function it is Binet's function.
    """
    p = g.p
    f = _engine_value(g, x, tol / 4)
    c = sigma_constant(g, "auto", tol / 4).value
    integral = _int_from_1(g, x, tol / 8)
    corr = math.fsum(gregory_coeff(j) * forward_difference(g, j - 1, x)
                     for j in range(1, p + 1))
    return f - c - integral + corr


def burnside_residual(g: AdmissibleFunction, x: float, tol: float = 1e-10) -> float:
    """Midpoint-trend residual f(x) - c - int_1^{x-1/2} g; orders 0 and 1 only."""
    if g.p >= 2:
        raise ValueError("midpoint trend approximation fails for order >= 2")
    if x <= 0.5:
        raise ValueError("need x > 1/2")
    f = _engine_value(g, x, tol / 4)
    c = sigma_constant(g, "auto", tol / 4).value
    return f - c - _int_from_1(g, x - 0.5, tol / 8)


def _engine_value(g: AdmissibleFunction, x: float, tol: float) -> float:
    res = sigma_eval_summable(g, x, tol) if g.summable else sigma_eval(g, x, tol)
    return res.value


@dataclass(frozen=True)
class ExpansionResult:
    value: float
    remainder_bound: float

    def __float__(self):
        return self.value


def asymptotic_expansion(g: AdmissibleFunction, q: int, m: int, x: float,
                         tol: float = 1e-10) -> ExpansionResult:
    """Bernoulli asymptotic expansion of the principal sum (m=1) or of the
    m-point average (1/m) sum_j f(x + j/m).

    value = c + int_1^x g - g(x)/(2m) + sum_{k<=q} B_{2k}/((2k)! m^{2k}) g^{(2k-1)}(x),
    with the first-omitted-term remainder bound, valid once x is inside the
    convexity window.
    """
    if q < 1 or m < 1:
        raise ValueError("need q >= 1 and m >= 1")
    if g.deriv is None and 2 * q - 1 > 4:
        raise ValueError("expansion of this order needs analytic derivatives")
    c = sigma_constant(g, "auto", tol).value
    terms = [c, _int_from_1(g, x, tol / 8), -g(x) / (2.0 * m)]
    for k in range(1, q + 1):
        terms.append(bernoulli_number(2 * k) / math.factorial(2 * k) / m ** (2 * k)
                     * g.derivative(x, 2 * k - 1))
    bound = (abs(bernoulli_number(2 * q)) / math.factorial(2 * q) / m ** (2 * q)
             * abs(g.derivative(x, 2 * q - 1)))
    return ExpansionResult(math.fsum(terms), 2.0 * bound)


def liu_eval(g: AdmissibleFunction, q: int, x: float, tol: float = 1e-10) -> float:
    """Exact sawtooth-integral representation of the principal sum at x.

    q = 0 uses the half-minus-fractional-part kernel against g'; q >= 1
    uses the degree-2q Bernoulli kernel against g^(2q).  The tail is summed
    period by period and bounded by the first omitted period's envelope.
    """
    c = sigma_constant(g, "auto", tol / 4).value
    head = c + _int_from_1(g, x, tol / 8) - 0.5 * g(x)
    if q == 0:
        if not (abs(g.derivative(x + 64.0, 1)) < abs(g.derivative(x + 8.0, 1))):
            raise MethodRefused("derivative tail not decreasing; refused")
        total: list[float] = []
        k = 0
        while True:
            block = integrate(lambda u: (0.5 - u) * g.derivative(x + k + u, 1),
                              0.0, 1.0, tol / 16.0)
            total.append(block)
            tail = abs(g.derivative(x + k + 1.0, 1)) / 6.0
            if tail <= tol / 2.0 and k >= 4:
                break
            if k > 200000:
                raise MethodRefused("sawtooth tail did not converge")
            k += 1
        return head + math.fsum(total)
    fac = math.factorial(2 * q)
    mfac = _bernoulli_poly_max(2 * q + 1) / math.factorial(2 * q + 1)
    head += math.fsum(bernoulli_number(2 * k) / math.factorial(2 * k) * g.derivative(x, 2 * k - 1)
                      for k in range(1, q + 1))
    total = []
    k = 0
    while True:
        block = integrate(lambda u: bernoulli_poly(2 * q, u) / fac * g.derivative(x + k + u, 2 * q),
                          0.0, 1.0, tol / 16.0)
        total.append(block)
        tail = 1.2 * mfac * abs(g.derivative(x + k + 1.0, 2 * q))
        if tail <= tol / 2.0 and k >= 4:
            break
        if k > 200000:
            raise MethodRefused("Bernoulli-kernel tail did not converge")
        k += 1
    return head + math.fsum(total)


# ---------------------------------------------------------------------------
# Certified bounds


def _sign_at_order(g: AdmissibleFunction, order: int) -> int:
    """Convexity sign of g at the given order (alternates above the base order)."""
    base = g.p
    if order == base or not g.alternating:
        return g.convexity_sign
    return g.convexity_sign * (-1) ** (order - base)


def _epsilon(a: float, k: int) -> int:
    """Sign of the falling power a(a-1)...(a-k+1)."""
    prod = 1
    for i in range(k):
        t = a - i
        if t == 0:
            return 0
        if t < 0:
            prod = -prod
    return prod


def wendel_bounds(g: AdmissibleFunction, x: float, a: float) -> BoundPair:
    """Certified bracket on the shifted-sum residual
    f(x+a) - f(x) - sum_{j<=p} C(a,j) D^{j-1} g(x).

    One side is exactly zero; the other comes from the order-p difference
    of g.  Equality holds at integer a up to p.
    """
    if a < 0:
        raise ValueError("need a >= 0")
    p = g.p
    certified = x >= g.onset(p)
    if p >= 1:
        d = abs(forward_difference(g, p - 1, x + a) - forward_difference(g, p - 1, x))
        width = abs(gen_binomial(a - 1.0, p)) * d
    else:
        width = math.ceil(a) * abs(g(x))
    s = _sign_at_order(g, p)
    orient = s * (-1) * _epsilon(a, p + 1)
    if orient > 0:
        return BoundPair(0.0, width, "shifted_sum_residual", certified)
    if orient < 0:
        return BoundPair(-width, 0.0, "shifted_sum_residual", certified)
    return BoundPair(0.0, 0.0, "shifted_sum_residual", certified)


def stirling_bounds(g: AdmissibleFunction, x: float) -> BoundPair:
    """Certified bracket on the trend residual of the principal sum at x.

    One side is zero, the other is the Gregory-tail bound on the order-p
    difference of g.
    """
    p = g.p
    certified = x >= g.onset(p)
    s = _sign_at_order(g, p)
    width = gregory_tail(p) * abs(forward_difference(g, p, x))
    orient = s * (-1) ** p
    if orient > 0:
        return BoundPair(0.0, width, "trend_residual", certified)
    return BoundPair(-width, 0.0, "trend_residual", certified)


def bracket_refine(g: AdmissibleFunction, r: int, x: float) -> BoundPair:
    """Nested refinement of the trend-residual bracket using r extra orders.

    The brackets shrink as r grows and collapse onto the Gregory series of
    the residual; r = 0 reproduces the symmetric Stirling-type bracket.
    """
    if r < 0:
        raise ValueError("need r >= 0")
    p = g.p
    if g.alternating:
        certified = x >= max(g.onset(p + r), g.onset(p + r + 1))
    else:
        probe = convexity_probe(g, p + r, x, x + 4.0 * (p + r + 2), samples=24)
        if isinstance(probe, ConvexityViolation):
            raise MethodRefused(f"convexity probe failed at order {p + r}: {probe}")
        certified = False
    tailed = gregory_tail(p + r) * abs(forward_difference(g, p + r, x))
    shift = -math.fsum(gregory_coeff(j) * forward_difference(g, j - 1, x)
                       for j in range(p + 1, p + r + 1))
    return BoundPair(shift - tailed, shift + tailed, "trend_residual", certified)


def webster_bounds(g: AdmissibleFunction, p: int, x: float,
                   tol: float = 1e-12) -> BoundPair:
    """Sharper trend-residual bracket obtained by integrating shift bounds.

    For p >= 1 the bracket is [J_{p+1}[g](x), A_p[g](x)] up to orientation,
    where A_p adds a weighted unit-interval moment of g; for p = 0 it is the
    rectangle-versus-average comparison.  Both ends need only g itself.
    """
    if x < g.onset(p) and not g.alternating:
        raise MethodRefused("outside the declared convexity window")
    certified = x >= g.onset(p)
    if p == 0:
        avg = integrate(lambda t: float(g(t)), x, x + 1.0, tol)
        ends = (-(g(x) - avg), -(g(x) + g(x + 1.0) - avg))
        return BoundPair(min(ends), max(ends), "trend_residual", certified)
    jg = binet_J(g, p + 1, x, tol)
    moment = integrate(lambda t: float(g(x + t)) * t, 0.0, 1.0, tol)
    corr = math.fsum(j * gregory_coeff(j) * forward_difference(g, j - 1, x + 1.0)
                     for j in range(1, p + 1))
    a_end = jg + (moment - corr) / p
    # The oriented chain brackets the residual between -jg and -a_end.
    return BoundPair(min(-jg, -a_end), max(-jg, -a_end), "trend_residual", certified)
