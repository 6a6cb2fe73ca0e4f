"""Gamma factors and archimedean L-factor ratios.

Everything is evaluated through complex log-gamma, with products formed in
log space and exponentiated once, so AFE integrands with many gamma
factors neither overflow nor lose accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .coeffs import GAMMA_C, GAMMA_R, CoefficientSeries

LOG_PI = float(np.log(np.pi))
LOG_2PI = float(np.log(2.0 * np.pi))
POLE_TOL = 1e-8


class PoleProximityError(ArithmeticError):
    """Evaluation point within POLE_TOL of a gamma pole."""


def _pole_distance(z) -> np.ndarray:
    """Distance to the nearest pole of Gamma (nonpositive integers)."""
    z = np.asarray(z, dtype=np.complex128)
    nearest = np.minimum(np.round(z.real), 0.0)
    return np.abs(z - nearest)


def _check_poles(z, what: str) -> None:
    d = _pole_distance(z)
    if np.any(d < POLE_TOL):
        bad = np.asarray(z, dtype=np.complex128).ravel()[np.argmin(d)]
        raise PoleProximityError(f"{what} within {POLE_TOL} of a gamma pole at argument {bad}")


def log_gamma_factor(kind: str, s):
    """log of Gamma_R(s) = pi^(-s/2) Gamma(s/2) or Gamma_C(s) = 2 (2pi)^(-s) Gamma(s)."""
    s = np.asarray(s, dtype=np.complex128)
    if kind == GAMMA_R:
        _check_poles(s / 2, "Gamma_R")
        return -s / 2 * LOG_PI + loggamma(s / 2)
    if kind == GAMMA_C:
        _check_poles(s, "Gamma_C")
        return np.log(2.0) - s * LOG_2PI + loggamma(s)
    raise ValueError(f"unknown gamma kind {kind!r}")


def gamma_factor(kind: str, s):
    return np.exp(log_gamma_factor(kind, s))


@dataclass(frozen=True)
class GammaProduct:
    """A finite product of shifted Gamma_R / Gamma_C factors."""

    factors: tuple[tuple[str, float], ...]

    def log_eval(self, s):
        s = np.asarray(s, dtype=np.complex128)
        total = np.zeros_like(s)
        for kind, shift in self.factors:
            total = total + log_gamma_factor(kind, s + shift)
        return total

    def eval(self, s):
        return np.exp(self.log_eval(s))

    def pole_distance(self, s) -> float:
        """Distance from s to the nearest pole of the product."""
        s = np.asarray(s, dtype=np.complex128)
        d = np.inf
        for kind, shift in self.factors:
            z = (s + shift) / 2 if kind == GAMMA_R else s + shift
            d = min(d, float(np.min(_pole_distance(z))))
        return d

    def degree(self) -> int:
        """Number of Gamma_R factors counted with Gamma_C = 2 Gamma_R."""
        return sum(2 if kind == GAMMA_C else 1 for kind, _ in self.factors)


def basechange_gammas(prov: CoefficientSeries) -> GammaProduct:
    """Archimedean factor of the quadratic basechange: the product of the
    provider's own shifts and its eta-twisted shifts (independent of the
    ring class character, whose infinity component is trivial)."""
    return GammaProduct(tuple(prov.gamma_shifts) + tuple(prov.gamma_shifts_eta))


def contragredient_gammas(prov: CoefficientSeries) -> GammaProduct:
    """Basechange gammas of the contragredient.  The built-in providers have
    real shifts, which are self-conjugate."""
    g = basechange_gammas(prov)
    return GammaProduct(tuple((kind, float(np.conj(shift))) for kind, shift in g.factors))


def basechange_arch(prov: CoefficientSeries, s) -> complex:
    """L(s, Pi_infty x pi(chi)_infty), independent of chi."""
    return complex(basechange_gammas(prov).eval(s))


def f_ratio(prov: CoefficientSeries, delta):
    """Quotient of archimedean factors F(s) at s = delta:
    dual basechange factor at 1-s over the factor at s."""
    num = contragredient_gammas(prov)
    den = basechange_gammas(prov)
    delta = np.asarray(delta, dtype=np.complex128)
    return np.exp(num.log_eval(1.0 - delta) - den.log_eval(delta))


def afe_gamma_ratio(j: int, prov: CoefficientSeries, s):
    """Normalized gamma-quotients entering the central-point cutoffs:
    j=1 uses the basechange factor, j=2 its contragredient, both divided
    by the basechange factor at 1/2."""
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    g = basechange_gammas(prov) if j == 1 else contragredient_gammas(prov)
    den = basechange_gammas(prov)
    s = np.asarray(s, dtype=np.complex128)
    return np.exp(g.log_eval(s + 0.5) - den.log_eval(np.asarray(0.5 + 0j)))


def stirling_log_gamma(z: complex) -> complex:
    """Stirling main term (z - 1/2) log z - z + log sqrt(2 pi)."""
    z = complex(z)
    return (z - 0.5) * np.log(z) - z + 0.5 * LOG_2PI


def stirling_log_main(g: GammaProduct, s: complex) -> float:
    """Stirling approximation to log |product| at s (main terms only)."""
    total = 0.0
    for kind, shift in g.factors:
        z = s + shift
        if kind == GAMMA_R:
            total += (-z / 2 * LOG_PI + stirling_log_gamma(z / 2)).real
        else:
            total += (np.log(2.0) - z * LOG_2PI + stirling_log_gamma(z)).real
    return total
