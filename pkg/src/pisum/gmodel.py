"""The admissible-function abstraction.

An AdmissibleFunction packages a right-hand side g of the difference
equation f(x+1) - f(x) = g(x) together with the metadata the summation
engine needs: the working order p (one plus the asymptotic degree),
where higher-order convexity sets in, whether g(n) is summable, and
optional analytic derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .numerics import divided_difference, forward_difference, NodeSet

__all__ = [
    "AdmissibleFunction",
    "ConvexityViolation",
    "estimate_degree",
    "ratio_test_diagnostic",
    "convexity_probe",
    "elasticity_diagnostic",
]

DEGREE_CAP = 12
_DEGREE_TOL = 1e-6
_PROBE_TOL = 1e-11


def _vectorize(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap a scalar-only callable so it accepts numpy arrays."""

    def wrapped(x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return np.asarray(fn(float(arr)), dtype=float)
        return np.array([fn(float(t)) for t in arr], dtype=float)

    return wrapped


@dataclass(frozen=True)
class AdmissibleFunction:
    """A function g on (0, oo) admissible for principal indefinite summation.

    Fields
    ------
    eval:
        Vectorized evaluator; must accept numpy arrays.  Construct with
        ``vectorized=False`` to wrap a scalar-only callable.
    deriv:
        Optional analytic derivative, called as deriv(x, order).
    degree_p:
        Working order p >= 0 (one plus the asymptotic degree), or "auto"
        to resolve it numerically on first use.
    convexity_onset:
        Abscissa from which g is declared p-convex or p-concave.  Either a
        scalar (valid for every order when ``alternating``) or a callable
        order -> onset.
    convexity_sign:
        +1 when g is eventually p-convex, -1 when p-concave.
    summable:
        True when sum g(n) converges (then degree_p must be 0).
    alternating:
        True when g is eventually q-convex/q-concave for every q >= p with
        alternating signs; lets the engine raise the truncation order.
    domain:
        "positive" (default) or "punctured" for functions defined on all
        reals except 0, enabling extension of the sum to negative arguments.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Optional[Callable[[float, int], float]] = None
    degree_p: Union[int, str] = "auto"
    convexity_onset: Union[float, Callable[[int], float]] = 1.0
    convexity_sign: int = 1
    summable: bool = False
    alternating: bool = False
    domain: str = "positive"
    name: str = ""
    vectorized: bool = True

    def __post_init__(self):
        if not self.vectorized:
            object.__setattr__(self, "eval", _vectorize(self.eval))
            object.__setattr__(self, "vectorized", True)
        if self.domain not in ("positive", "punctured"):
            raise ValueError("domain must be 'positive' or 'punctured'")
        if self.summable and self.degree_p not in (0, "auto"):
            raise ValueError("a summable g has working order 0")

    # -- evaluation helpers -------------------------------------------------

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if self.domain == "positive" and np.any(arr <= 0.0):
            raise ValueError(f"{self.name or 'g'} is only defined for x > 0")
        if self.domain == "punctured" and np.any(arr == 0.0):
            raise ValueError(f"{self.name or 'g'} has a pole at 0")
        out = np.asarray(self.eval(arr), dtype=float)
        if arr.ndim == 0:
            return float(out)
        return out

    def derivative(self, x: float, order: int) -> float:
        """Analytic derivative when available, else central differences.

        The finite-difference step follows the usual optimal-step balancing
        h ~ eps^(1/(order+2)) * max(1, |x|).
        """
        if order == 0:
            return self(x)
        if self.deriv is not None:
            return float(self.deriv(float(x), int(order)))
        h = (2.2e-16) ** (1.0 / (order + 2)) * max(1.0, abs(x))
        if x - order * h / 2 <= 0 and self.domain == "positive":
            h = 1.9 * x / (order + 1)
        pts = x + h * (np.arange(order + 1) - order / 2.0)
        vals = self(pts)
        acc = math.fsum((-1.0) ** (order - k) * math.comb(order, k) * vals[k]
                        for k in range(order + 1))
        return acc / h**order

    @property
    def has_derivatives(self) -> bool:
        return self.deriv is not None

    # -- resolved metadata --------------------------------------------------

    @property
    def p(self) -> int:
        """Resolved working order (1 + asymptotic degree)."""
        if self.degree_p == "auto":
            q = estimate_degree(self)
            if math.isinf(q):
                raise ValueError(f"{self.name or 'g'}: no finite asymptotic degree found")
            object.__setattr__(self, "degree_p", int(q))
        return int(self.degree_p)

    def onset(self, order: int) -> float:
        """Convexity onset for the given order, if known."""
        if callable(self.convexity_onset):
            return float(self.convexity_onset(order))
        if order == self.p or self.alternating:
            return float(self.convexity_onset)
        return math.inf

    def with_(self, **changes) -> "AdmissibleFunction":
        return replace(self, **changes)


@dataclass(frozen=True)
class ConvexityViolation:
    """Witness of a failed p-convexity/concavity probe."""

    order: int
    nodes: tuple[float, ...]
    value: float

    def __repr__(self):
        return (f"ConvexityViolation(order={self.order}, value={self.value:.3e}, "
                f"nodes={tuple(round(t, 4) for t in self.nodes)})")


def estimate_degree(g: AdmissibleFunction, n_max: int = 2**14) -> float:
    """Smallest order q <= 12 with the q-th difference of g vanishing at infinity.

    Probes |delta^q g(n)| along a geometric ladder of n, requiring it to
    fall below a relative tolerance with a decreasing trend.  Returns inf
    when no order up to the cap qualifies.
    """
    ladder = [n for n in (2**k for k in range(4, 15)) if n <= n_max] or [n_max]
    g0 = abs(g(float(ladder[-1])))
    for q in range(DEGREE_CAP + 1):
        vals = [abs(forward_difference(g, q, float(n))) for n in ladder]
        small = vals[-1] <= _DEGREE_TOL * (1.0 + g0)
        trending = all(b <= a * 1.05 + 1e-300 for a, b in zip(vals[-4:], vals[-3:]))
        if small and trending:
            return q
    return math.inf


def ratio_test_diagnostic(g: AdmissibleFunction, n_max: int = 4096) -> float:
    """Running max of g(n+1)/g(n) over the sampled tail.

    Values beyond 1 + epsilon flag functions growing too fast to be
    admissible (no strictly increasing exponential qualifies).
    """
    n0 = max(2, n_max // 16)
    ns = np.unique(np.geomspace(n0, n_max, 24).astype(int)).astype(float)
    num = g(ns + 1.0)
    den = g(ns)
    if np.any(den == 0.0):
        raise ZeroDivisionError("eventually zero tail: ratio test undefined")
    return float(np.max(num / den))


def convexity_probe(g: AdmissibleFunction, p: int, x_lo: float, x_hi: float,
                    samples: int = 40, rng=None,
                    tol: float = _PROBE_TOL) -> Union[int, ConvexityViolation]:
    """Probe the sign of order-(p+1) divided differences of g on [x_lo, x_hi].

    Returns +1 when every sampled difference over p+2 random points is
    nonnegative (up to tol), -1 when every one is nonpositive, and a
    ConvexityViolation witness otherwise.  Sampling evidence only.
    """
    if not x_hi > x_lo:
        raise ValueError("need x_lo < x_hi")
    rng = np.random.default_rng(0xC0FFEE) if rng is None else rng
    lo_sign, hi_sign = 1, -1
    for _ in range(samples):
        while True:
            pts = np.sort(rng.uniform(x_lo, x_hi, size=p + 2))
            if np.all(np.diff(pts) > 1e-9 * (x_hi - x_lo)):
                break
        vals = g(pts)
        dd = divided_difference(NodeSet(tuple(pts), tuple(vals)))
        scale = max(1.0, float(np.max(np.abs(vals))))
        if dd > tol * scale:
            hi_sign = 1
        elif dd < -tol * scale:
            lo_sign = -1
        if lo_sign == -1 and hi_sign == 1:
            return ConvexityViolation(p, tuple(pts), dd)
    return 1 if hi_sign == 1 else -1


def probe_onset(g: AdmissibleFunction, p: int, x_max: float = 4096.0) -> float:
    """Doubling search for an abscissa from which g looks p-convex or p-concave."""
    x0 = 1.0
    while x0 < x_max:
        if not isinstance(convexity_probe(g, p, x0, 4.0 * x0, samples=24), ConvexityViolation):
            return x0
        x0 *= 2.0
    return math.inf


def elasticity_diagnostic(g: AdmissibleFunction, n: float = 1e6) -> float:
    """Informational elasticity limit x * (g(x+1)-g(x)) / g(x) at large x.

    Only a diagnostic: its stated bracketing of the asymptotic degree is
    empirical, so no decision is ever based on it.
    """
    return float(n * (g(n + 1.0) - g(n)) / g(n))
