"""Independent reference evaluations for the catalog.

Everything here is computed by classical special-function routines
(scipy's real-argument ufuncs where speed matters, mpmath's arbitrary
precision everywhere else) and never touches the summation engine, so the
engine can be validated against these values as a genuinely independent
route.  Target accuracy is 1e-12 relative or better; mpmath calls are made
at 30 significant digits.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import special as sp

__all__ = [
    "EULER_GAMMA",
    "LN_GLAISHER",
    "GLAISHER_A",
    "ZETA_PRIME_MINUS1",
    "lgamma",
    "digamma",
    "polygamma",
    "psi_m2",
    "psi_m3",
    "ln_barnes_g",
    "hurwitz_zeta",
    "hurwitz_zeta_sderiv",
    "stieltjes_gamma",
    "ln_qgamma",
    "ln_catalan",
    "harmonic",
    "polylog",
    "qpochhammer_inf",
    "expint_e1",
    "erf",
    "li",
    "zeta",
    "oracle_names",
    "oracle_eval",
]

mp.mp.dps = 30

# Pinned to 20 significant digits; cross-checked against mpmath in the
# test suite so a typo cannot survive.
EULER_GAMMA = 0.57721566490153286061
LN_GLAISHER = 0.24875447031469709062
GLAISHER_A = 1.28242712910062263688
ZETA_PRIME_MINUS1 = 1.0 / 12.0 - LN_GLAISHER


def lgamma(x: float) -> float:
    return float(sp.gammaln(x))


def digamma(x: float) -> float:
    return float(sp.digamma(x))


def polygamma(nu: int, x: float) -> float:
    """Polygamma of any integer order; negative orders are the iterated
    antiderivatives of the log-gamma function."""
    if nu >= 0:
        return float(sp.polygamma(nu, x))
    if nu == -1:
        return lgamma(x)
    if nu == -2:
        return psi_m2(x)
    if nu == -3:
        return psi_m3(x)
    raise ValueError("orders below -3 are not provided")


@lru_cache(maxsize=4096)
def psi_m2(x: float) -> float:
    """Antiderivative of log-gamma from 0, via the Barnes-G conversion."""
    xm = mp.mpf(x)
    val = (-xm * (xm - 1) / 2 + (xm - 1) * mp.loggamma(xm)
           + xm * mp.log(2 * mp.pi) / 2 - mp.log(mp.barnesg(xm)))
    return float(val)


@lru_cache(maxsize=4096)
def psi_m3(x: float) -> float:
    """Second iterated antiderivative of log-gamma from 0 (numerical)."""
    return float(mp.quad(lambda t: mp.mpf(psi_m2(float(t))), [0, x]))


def ln_barnes_g(x: float) -> float:
    return float(mp.log(mp.barnesg(mp.mpf(x))))


@lru_cache(maxsize=16384)
def hurwitz_zeta(s: float, x: float) -> float:
    return float(mp.zeta(mp.mpf(s), mp.mpf(x)))


@lru_cache(maxsize=4096)
def hurwitz_zeta_sderiv(s: float, x: float, order: int = 1) -> float:
    return float(mp.zeta(mp.mpf(s), mp.mpf(x), order))


@lru_cache(maxsize=1024)
def stieltjes_gamma(n: int, x: float = 1.0) -> float:
    return float(mp.stieltjes(n, mp.mpf(x)) if x != 1.0 else mp.stieltjes(n))


@lru_cache(maxsize=4096)
def ln_qgamma(x: float, q: float) -> float:
    return float(mp.log(mp.qgamma(mp.mpf(x), mp.mpf(q))))


def ln_catalan(x: float) -> float:
    """log of the Catalan number function Gamma(2x+1)/(Gamma(x+1) Gamma(x+2))."""
    return lgamma(2 * x + 1) - lgamma(x + 1) - lgamma(x + 2)


def harmonic(x: float) -> float:
    return digamma(x + 1.0) + EULER_GAMMA


@lru_cache(maxsize=4096)
def polylog(s: float, z: float) -> float:
    return float(mp.polylog(mp.mpf(s), mp.mpf(z)))


@lru_cache(maxsize=256)
def qpochhammer_inf(q: float) -> float:
    return float(mp.qp(mp.mpf(q)))


def expint_e1(x: float) -> float:
    return float(sp.exp1(x))


def erf(x: float) -> float:
    return float(sp.erf(x))


@lru_cache(maxsize=1024)
def li(x: float) -> float:
    return float(mp.li(mp.mpf(x)))


@lru_cache(maxsize=4096)
def zeta(s: float) -> float:
    return float(mp.zeta(mp.mpf(s)))


_ORACLES = {
    "lgamma": lgamma,
    "digamma": digamma,
    "trigamma": lambda x: polygamma(1, x),
    "tetragamma": lambda x: polygamma(2, x),
    "psi_minus2": psi_m2,
    "psi_minus3": psi_m3,
    "ln_barnes_g": ln_barnes_g,
    "ln_catalan": ln_catalan,
    "harmonic": harmonic,
    "erf": erf,
    "expint_e1": expint_e1,
    "li": li,
}


def oracle_names() -> list[str]:
    return sorted(_ORACLES)


def oracle_eval(name: str, x: float, *extra) -> float:
    """Reference value of a named classical function.

    Parametric families use a colon suffix, e.g. "hurwitz:s=0.5" or
    "polygamma:nu=-2" or "stieltjes:q=1" or "qgamma:q=0.5".
    """
    if ":" in name:
        head, _, spec = name.partition(":")
        key, _, raw = spec.partition("=")
        val = float(raw)
        if head == "hurwitz" and key == "s":
            return hurwitz_zeta(val, x)
        if head == "polygamma" and key == "nu":
            return polygamma(int(val), x)
        if head == "stieltjes" and key == "q":
            return stieltjes_gamma(int(val), x)
        if head == "qgamma" and key == "q":
            return ln_qgamma(x, val)
        raise KeyError(f"unknown parametric oracle {name!r}")
    try:
        fn = _ORACLES[name]
    except KeyError:
        raise KeyError(f"unknown oracle {name!r}; known: {oracle_names()}") from None
    return float(fn(x, *extra))
