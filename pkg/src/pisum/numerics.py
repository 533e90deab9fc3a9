"""Exact coefficients and interpolation primitives.

Gregory coefficients, Bernoulli numbers and polynomials, generalized
binomials, forward and divided differences, Newton interpolation, and a
generic adaptive integrator.  Everything here is deterministic and pure;
the coefficient tables are computed once in exact rational arithmetic and
shared read-only.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "CoefficientCache",
    "NodeSet",
    "COEFFS",
    "gregory_coeff",
    "gregory_tail",
    "bernoulli_number",
    "bernoulli_poly",
    "gen_binomial",
    "log_abs_gen_binomial",
    "forward_difference",
    "forward_difference_2",
    "divided_difference",
    "newton_interpolate",
    "integrate",
    "IntegrationError",
    "CANCELLATION_ORDER",
]

# Forward differences of order above this lose ~2^j ulp to cancellation.
CANCELLATION_ORDER = 25


class CoefficientCache:
    """Rational tables of Gregory coefficients, their tails, and Bernoulli numbers.

    The cache grows on demand under a single-writer lock and is safe to
    share read-only across threads.
    """

    def __init__(self, capacity: int = 64):
        self._lock = threading.Lock()
        self._gregory: list[Fraction] = [Fraction(1)]
        self._gregory_tail: list[Fraction] = [Fraction(1)]
        self._bernoulli: list[Fraction] = [Fraction(1)]
        self._grow(capacity)

    def _grow(self, n: int) -> None:
        with self._lock:
            # Gregory coefficients from the triangular system produced by
            # expanding t/ln(1+t): sum_{k<=n} (-1)^(n-k) G_k / (n-k+1) = 0 for n >= 1.
            while len(self._gregory) <= n:
                m = len(self._gregory)
                acc = Fraction(0)
                for k, gk in enumerate(self._gregory):
                    acc += gk * (-1) ** (m - k - 1) * Fraction(1, m - k + 1)
                self._gregory.append(acc)
                self._gregory_tail.append(self._gregory_tail[-1] - abs(acc))
            while len(self._bernoulli) <= n:
                m = len(self._bernoulli)
                acc = Fraction(0)
                for j, bj in enumerate(self._bernoulli):
                    acc += math.comb(m + 1, j) * bj
                self._bernoulli.append(Fraction(-acc, m + 1))

    @property
    def capacity(self) -> int:
        return len(self._gregory) - 1

    def gregory(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("index must be nonnegative")
        if n > self.capacity:
            self._grow(n)
        return self._gregory[n]

    def gregory_tail(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("index must be nonnegative")
        if n > self.capacity:
            self._grow(n)
        return self._gregory_tail[n]

    def bernoulli(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("index must be nonnegative")
        if n >= len(self._bernoulli):
            self._grow(n)
        return self._bernoulli[n]


#: Shared coefficient cache, built at import time.
COEFFS = CoefficientCache()


def gregory_coeff(n: int) -> float:
    """n-th Gregory coefficient (Bernoulli number of the second kind).

    G_0 = 1, G_1 = 1/2, G_2 = -1/12, G_3 = 1/24, G_4 = -19/720, ...
    Computed by exact rational recurrence, not numeric integration.
    """
    return float(COEFFS.gregory(n))


def gregory_tail(n: int) -> float:
    """Tail sum 1 - sum_{j<=n} |G_j|; decreases to zero."""
    return float(COEFFS.gregory_tail(n))


def bernoulli_number(n: int) -> float:
    """n-th Bernoulli number, from the defining triangular system."""
    return float(COEFFS.bernoulli(n))


def bernoulli_poly(n: int, x: float) -> float:
    """Bernoulli polynomial B_n(x) = sum_k C(n,k) B_{n-k} x^k."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    acc = Fraction(0)
    xf = Fraction(x) if isinstance(x, (int, Fraction)) else None
    if xf is not None:
        for k in range(n + 1):
            acc += math.comb(n, k) * COEFFS.bernoulli(n - k) * xf**k
        return float(acc)
    # Horner in float for real arguments.
    total = 0.0
    for k in range(n, -1, -1):
        total = total * x + float(COEFFS.bernoulli(n - k)) * math.comb(n, k)
    return total


def gen_binomial(x: float, j: int) -> float:
    """Generalized binomial C(x, j) = x(x-1)...(x-j+1)/j! for real x."""
    if j < 0:
        raise ValueError("lower index must be nonnegative")
    prod = 1.0
    for i in range(j):
        prod *= (x - i) / (i + 1)
    return prod


def log_abs_gen_binomial(x: float, j: int) -> tuple[float, int]:
    """(log|C(x,j)|, sign) evaluated stably for large |x|.

    Returns (-inf, 0) when the binomial vanishes (x a nonnegative integer
    below j).
    """
    if j == 0:
        return 0.0, 1
    log_abs = -math.lgamma(j + 1)
    sign = 1
    for i in range(j):
        t = x - i
        if t == 0.0:
            return -math.inf, 0
        if t < 0:
            sign = -sign
        log_abs += math.log(abs(t))
    return log_abs, sign


def forward_difference_2(g: Callable[[np.ndarray], np.ndarray], j: int, x: float
                         ) -> tuple[float, float]:
    """Forward difference of order j at x, with its rounding-noise level.

    The alternating binomial sum is evaluated with error-free summation
    (math.fsum), so the only irreducible error is the rounding of the
    inputs; the second return value is that noise level, about one ulp of
    the largest weighted term.  For j > CANCELLATION_ORDER a warning
    reports the expected ~2^j ulp loss.
    """
    if j < 0:
        raise ValueError("order must be nonnegative")
    if j == 0:
        v = float(np.asarray(g(np.asarray([x], dtype=float)))[0])
        return v, abs(v) * 1.1e-16
    if j > CANCELLATION_ORDER:
        warnings.warn(
            f"forward difference of order {j}: expect ~2^{j} ulp cancellation loss",
            RuntimeWarning,
            stacklevel=2,
        )
    pts = x + np.arange(j + 1, dtype=float)
    vals = np.asarray(g(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"function not finite on difference stencil at x={x}, order {j}")
    terms = [(-1.0) ** (j - k) * math.comb(j, k) * float(vals[k]) for k in range(j + 1)]
    noise = 1.1e-16 * math.fsum(abs(t) for t in terms)
    return math.fsum(terms), noise


def forward_difference(g: Callable[[np.ndarray], np.ndarray], j: int, x: float) -> float:
    """Forward difference of order j at x by the alternating binomial sum."""
    return forward_difference_2(g, j, x)[0]


@dataclass(frozen=True)
class NodeSet:
    """Sorted distinct interpolation nodes together with function values."""

    nodes: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.values):
            raise ValueError("nodes and values must have equal length")
        if len(self.nodes) == 0:
            raise ValueError("at least one node required")
        for a, b in zip(self.nodes, self.nodes[1:]):
            if not b > a:
                raise ValueError("nodes must be strictly increasing; repeated nodes are not supported")

    @classmethod
    def from_function(cls, f: Callable[[float], float], nodes: Sequence[float]) -> "NodeSet":
        pts = tuple(sorted(float(t) for t in nodes))
        return cls(pts, tuple(float(f(t)) for t in pts))


def _divided_difference_row(f: NodeSet) -> list[float]:
    """Leading column of the divided-difference table: f[x_0..x_k] for all k."""
    coeffs = list(f.values)
    n = len(coeffs)
    out = [coeffs[0]]
    for level in range(1, n):
        for i in range(n - level):
            coeffs[i] = (coeffs[i + 1] - coeffs[i]) / (f.nodes[i + level] - f.nodes[i])
        out.append(coeffs[0])
    return out


def divided_difference(f: NodeSet) -> float:
    """Divided difference f[x_0, ..., x_n] over all nodes of the set.

    Computed by the standard recurrence.  When the nodes are consecutive
    integers shifted by x this equals the forward difference divided by p!.
    """
    return _divided_difference_row(f)[-1]


def newton_interpolate(f: NodeSet, x: float) -> float:
    """Value at x of the Newton-form interpolating polynomial through f."""
    coeffs = _divided_difference_row(f)
    total = 0.0
    prod = 1.0
    for c, node in zip(coeffs, f.nodes):
        total += c * prod
        prod *= x - node
    return total


class IntegrationError(RuntimeError):
    """Adaptive integration failed to converge; carries the best estimate."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


# Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
_GK_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_GK_WEIGHTS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_G_WEIGHTS = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    pts = c + h * _GK_NODES
    vals = np.array([f(t) for t in pts], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"integrand not finite inside [{a}, {b}]")
    k = h * float(np.dot(_GK_WEIGHTS, vals))
    g = h * float(np.dot(_G_WEIGHTS, vals[1::2]))
    return k, abs(k - g)


def integrate(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12,
              max_intervals: int = 4096) -> float:
    """Adaptive Gauss-Kronrod estimate of the integral of f over [a, b].

    Subdivides the interval with an embedded error estimate until the
    summed absolute error is below tol.  Endpoint singularities that are
    integrable are handled by never sampling the endpoints themselves.

    Raises IntegrationError (carrying the best estimate) when the budget of
    subdivisions is exhausted.
    """
    if not (b > a):
        if b == a:
            return 0.0
        raise ValueError("need a < b")
    if math.isinf(b):
        raise ValueError("infinite upper limit: truncate with a caller-supplied tail bound")
    segments = [(a, b) + _gk15(f, a, b)]
    for _ in range(max_intervals):
        total_err = math.fsum(s[3] for s in segments)
        if total_err <= tol:
            return math.fsum(s[2] for s in segments)
        worst = max(range(len(segments)), key=lambda i: segments[i][3])
        lo, hi, _, _ = segments.pop(worst)
        mid = 0.5 * (lo + hi)
        segments.append((lo, mid) + _gk15(f, lo, mid))
        segments.append((mid, hi) + _gk15(f, mid, hi))
    estimate = math.fsum(s[2] for s in segments)
    error = math.fsum(s[3] for s in segments)
    raise IntegrationError(
        f"no convergence to tol={tol:g} after {max_intervals} subdivisions "
        f"(estimated error {error:g})", estimate, error)
