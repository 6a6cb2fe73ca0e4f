"""Smoothed cutoff functions realized as inverse Mellin transforms over a
vertical line.

Two variants share the machinery:

* ``central`` -- the symmetric central-point smoothing, with gamma-factor
  quotients of the basechange archimedean factor inside the integrand;
* ``strip``   -- the asymmetric in-strip smoothing, whose test function is
  multiplied by a shifted Dirichlet L-factor of the central character.

The test function is the Gaussian k0(s) = exp(width * s^2).  For the strip
variant, k0 is by default multiplied by a renormalized vanishing factor at
s = 3/4 - delta so the contour shift behind the evaluator never crosses
the pole of the shifted L-factor; with the knob off the strip sums do not
evaluate the L-function (kept for comparison runs).

Quadrature is fixed-step trapezoid with a halved-step Richardson check and
an explicit tail estimate; deterministic output is preferred over node
efficiency.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .archimedean import basechange_gammas, contragredient_gammas, f_ratio
from .coeffs import CoefficientSeries, sym2_partial_value
from .dirichlet import dirichlet_l, zeta
from .quadclass import DomainError


@dataclass(frozen=True)
class CutoffSpec:
    """Test function plus quadrature parameters defining the cutoffs."""

    variant: str                     # "central" or "strip"
    delta: complex = 0.5             # strip argument (central fixes 1/2)
    width: float = 1.0               # k0(s) = exp(width s^2)
    sigma0: float = 2.0
    T: float = 40.0
    nodes: int = 1601
    target_tol: float = 1e-9
    cancel_shift_pole: bool = True   # strip-only vanishing-factor knob

    def __post_init__(self):
        if self.variant not in ("central", "strip"):
            raise DomainError(f"unknown cutoff variant {self.variant!r}")
        if self.width <= 0 or self.T <= 0 or self.nodes < 33 or self.nodes % 2 == 0:
            raise DomainError("need width > 0, T > 0 and an odd node count >= 33")
        if self.variant == "strip":
            s0 = 0.75 - complex(self.delta)
            if abs(s0) < 1e-6:
                raise DomainError("strip variant degenerates at delta = 3/4")
            if not (0 < complex(self.delta).real):
                raise DomainError("strip variant needs Re(delta) > 0")

    def k0(self, s):
        """Gaussian test function, including the strip vanishing factor."""
        s = np.asarray(s, dtype=np.complex128)
        val = np.exp(self.width * s * s)
        if self.variant == "strip" and self.cancel_shift_pole:
            s0 = 0.75 - complex(self.delta)
            val = val * (s0 - s) / s0
        return val

    def k_at_zero(self, omega_bar_l) -> complex:
        """k(0): 1 for the central variant, the shifted L-factor otherwise."""
        if self.variant == "central":
            return 1.0 + 0j
        return omega_bar_l(4.0 * (1.0 - complex(self.delta)))


def _omega_bar_l(prov: CoefficientSeries):
    """s -> L(s, conj(omega)) for the provider's central character."""
    conj_omega = prov.omega.conjugate()

    def val(s: complex) -> complex:
        if conj_omega.is_trivial:
            return zeta(s)
        return dirichlet_l(s, conj_omega)
    return val


def _integrand_profile(spec: CutoffSpec, j: int, prov: CoefficientSeries,
                       t: np.ndarray, sigma: float | None = None) -> np.ndarray:
    """G(t) with V(y) = (1/2pi) int G(t) y^(-sigma - it) dt."""
    s = (spec.sigma0 if sigma is None else sigma) + 1j * t
    if spec.variant == "central":
        g = basechange_gammas(prov) if j == 1 else contragredient_gammas(prov)
        den = basechange_gammas(prov)
        ratio = np.exp(g.log_eval(s + 0.5) - den.log_eval(np.asarray(0.5 + 0j)))
        return spec.k0(s) * ratio / s
    delta = complex(spec.delta)
    lbar = _omega_bar_l(prov)
    if j == 1:
        zf = np.array([lbar(complex(4.0 * (1.0 - delta) - 4.0 * si)) for si in s])
        return spec.k0(s) * zf / s
    zf = np.array([lbar(complex(4.0 * (1.0 + si - delta))) for si in s])
    return spec.k0(-s) * zf * _f_on_nodes(prov, delta - s) / s


def _f_on_nodes(prov: CoefficientSeries, z: np.ndarray) -> np.ndarray:
    num = contragredient_gammas(prov)
    den = basechange_gammas(prov)
    return np.exp(num.log_eval(1.0 - z) - den.log_eval(z))


def _tail_estimate(spec: CutoffSpec, profile: np.ndarray, t: np.ndarray) -> float:
    """Magnitude estimate of the |t| > T remainder from the endpoint decay
    rate of |G| (both variants decay at least like the Gaussian)."""
    endv = max(abs(profile[0]), abs(profile[-1]))
    k = max(2, int(0.05 * len(t)))
    lam1 = np.log(max(abs(profile[-1 - k]), 1e-300) / max(abs(profile[-1]), 1e-300)) \
        / (t[-1] - t[-1 - k])
    lam = max(lam1, 2 * spec.width * spec.T * 0.5)
    return float(2.0 * endv / max(lam, 1e-3) / (2.0 * np.pi))


@dataclass
class CutoffValue:
    value: complex
    err: float


def v_cutoff(spec: CutoffSpec, j: int, prov: CoefficientSeries, y: float) -> CutoffValue:
    """One cutoff value V_j(y) with its quadrature error estimate."""
    out = v_cutoff_grid(spec, j, prov, np.asarray([float(y)]))
    return CutoffValue(complex(out[0][0]), float(out[1]))


def _low_line(spec: CutoffSpec) -> float:
    """A legal left contour for small-y evaluation: below sigma0 with no
    integrand pole in between, so the value is unchanged but the y^(-sigma)
    amplification of roundoff disappears."""
    sigma = 0.35
    if spec.variant == "strip" and not spec.cancel_shift_pole:
        d = complex(spec.delta).real
        sigma = max(sigma, 0.85 - d, d - 0.65)   # stay right of both zeta poles
    return min(sigma, spec.sigma0)


def _quad_on_line(spec: CutoffSpec, j: int, prov: CoefficientSeries,
                  ys: np.ndarray, sigma: float) -> tuple[np.ndarray, float]:
    t = np.linspace(-spec.T, spec.T, spec.nodes)
    dt = t[1] - t[0]
    profile = _integrand_profile(spec, j, prov, t, sigma)
    lny = np.log(ys)
    # V(y) = y^(-sigma)/(2 pi) * sum w G(t) e^(-i t ln y)
    phases = np.exp(-1j * np.outer(t, lny))
    w = np.ones_like(t)
    w[0] = w[-1] = 0.5
    scale = ys ** (-sigma)
    vals = scale * ((w * profile) @ phases) * dt / (2 * np.pi)
    half = scale * ((w[::2] * profile[::2]) @ phases[::2]) * (2 * dt) / (2 * np.pi)
    disc = float(np.max(np.abs(vals - half)) / 3.0)
    tail = _tail_estimate(spec, profile, t) * float(np.max(scale))
    round_err = float(np.max(scale)) * np.sum(np.abs(profile)) * dt * 1e-16
    return vals, disc + tail + round_err


def v_cutoff_grid(spec: CutoffSpec, j: int, prov: CoefficientSeries,
                  ys: np.ndarray) -> tuple[np.ndarray, float]:
    """V_j on an array of y > 0; returns (values, uniform error estimate).

    Small arguments are integrated on a lower vertical line (same value by
    analyticity) to avoid the y^(-sigma0) roundoff blow-up.  The error
    estimate combines the halved-step Richardson difference, the vertical
    tail estimate and a roundoff term; it fails loudly above target_tol.
    """
    ys = np.asarray(ys, dtype=np.float64)
    if np.any(ys <= 0):
        raise DomainError("cutoff argument must be positive")
    out = np.zeros(ys.shape, dtype=np.complex128)
    err = 0.0
    small = ys < 1e-2
    if np.any(small):
        vals, e = _quad_on_line(spec, j, prov, ys[small], _low_line(spec))
        out[small] = vals
        err = max(err, e)
    if np.any(~small):
        vals, e = _quad_on_line(spec, j, prov, ys[~small], spec.sigma0)
        out[~small] = vals
        err = max(err, e)
    if err > spec.target_tol:
        raise ArithmeticError(
            f"cutoff quadrature error {err:.3e} exceeds target {spec.target_tol:.3e} "
            f"(variant={spec.variant}, j={j}, T={spec.T}, nodes={spec.nodes})")
    return out, err


def small_y_limit(spec: CutoffSpec, j: int, prov: CoefficientSeries) -> complex:
    """V_j(0+): the s = 0 residue k(0) * (gamma ratio at the center)."""
    if spec.variant == "central":
        if j == 1:
            return 1.0 + 0j
        num = contragredient_gammas(prov)
        den = basechange_gammas(prov)
        return complex(np.exp(num.log_eval(np.asarray(0.5 + 0j))
                              - den.log_eval(np.asarray(0.5 + 0j))))
    lbar = _omega_bar_l(prov)
    k0 = lbar(4.0 * (1.0 - complex(spec.delta)))
    if j == 1:
        return k0
    return k0 * complex(f_ratio(prov, complex(spec.delta)))


class CutoffTable:
    """Dense log-grid samples of V_j with cubic-spline interpolation.

    The table covers [ylo, yhi]; below ylo the function has flattened onto
    its small-y limit, beyond yhi the stored bound certifies |V| there.
    """

    POINTS_PER_DECADE = 64

    def __init__(self, spec: CutoffSpec, j: int, prov: CoefficientSeries,
                 ylo: float = 1e-8):
        self.spec = spec
        self.j = j
        self.prov = prov
        self.ylo = ylo
        floor = max(spec.target_tol * 0.02, 1e-14)
        decades = []
        vals = []
        err = 0.0
        lo = np.log10(ylo)
        hi = lo + 1.0
        while True:
            grid = np.logspace(lo, hi, int(self.POINTS_PER_DECADE * (hi - lo)) + 1)
            block, e = v_cutoff_grid(spec, j, prov, grid)
            decades.append(grid)
            vals.append(block)
            err = max(err, e)
            if np.all(np.abs(block[-self.POINTS_PER_DECADE // 2:]) < floor) and hi > 1:
                break
            if hi > 14:
                raise ArithmeticError("cutoff decay not reached by y = 1e14")
            lo, hi = hi, hi + 1.0
        y = np.concatenate([g[:-1] for g in decades[:-1]] + [decades[-1]])
        v = np.concatenate([b[:-1] for b in vals[:-1]] + [vals[-1]])
        self.yhi = float(y[-1])
        self.err_quad = err
        self.bound_beyond = float(np.max(np.abs(v[-self.POINTS_PER_DECADE // 2:]))) + err
        self.v0 = small_y_limit(spec, j, prov)
        self._spline_re = CubicSpline(np.log(y), v.real)
        self._spline_im = CubicSpline(np.log(y), v.imag)
        # interpolation error probe at off-grid points
        probe = np.sqrt(y[:-1] * y[1:])[:: self.POINTS_PER_DECADE // 4]
        direct, _ = v_cutoff_grid(spec, j, prov, probe)
        self.err_interp = float(np.max(np.abs(self(probe) - direct)))

    def __call__(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=np.float64)
        out = np.zeros(ys.shape, dtype=np.complex128)
        lo = ys < self.ylo
        hi = ys > self.yhi
        mid = ~(lo | hi)
        out[lo] = self.v0
        ln = np.log(ys[mid])
        out[mid] = self._spline_re(ln) + 1j * self._spline_im(ln)
        return out

    @property
    def err(self) -> float:
        return self.err_quad + self.err_interp


@lru_cache(maxsize=64)
def cutoff_table(spec: CutoffSpec, j: int, prov_key: int) -> CutoffTable:
    prov = _PROV_REGISTRY[prov_key]
    return CutoffTable(spec, j, prov)


_PROV_REGISTRY: dict[int, CoefficientSeries] = {}


def table_for(spec: CutoffSpec, j: int, prov: CoefficientSeries) -> CutoffTable:
    """Cached cutoff table for (spec, j, provider)."""
    _PROV_REGISTRY[id(prov)] = prov
    return cutoff_table(spec, j, id(prov))


def residue_leading(spec: CutoffSpec, j: int, prov: CoefficientSeries,
                    w_K: int, *, sym2_terms: int = 200_000,
                    sym2_tol: float = 1e-3) -> complex:
    """Closed-form leading constant attached to the s = 0 residue of the
    b = 0 sums; the averages module consumes this.

    central j=1:  (1/w_K) L_1(1, Sym^2 Pi) / L_1(2, omega)
    central j=2:  the same with the contragredient data
    strip   j=1:  (1/w_K) (L(4(1-delta), conj omega)/L(4 delta, omega))
                  * L_1(2 delta, Sym^2 Pi)
    strip   j=2:  (1/w_K) F(delta) L_1(2(1-delta), Sym^2 contragredient)
    """
    if j not in (1, 2):
        raise DomainError("j must be 1 or 2")
    target = prov if j == 1 else prov.contragredient()
    if spec.variant == "central":
        pv = sym2_partial_value(target, 1.0, sym2_terms, tol=sym2_tol)
        l2 = dirichlet_l(2.0, target.omega)
        return pv.value / l2 / w_K
    delta = complex(spec.delta)
    lbar = _omega_bar_l(prov)
    if j == 1:
        pv = sym2_partial_value(target, 2 * delta, sym2_terms, tol=sym2_tol)
        l4 = dirichlet_l(4 * delta, prov.omega)
        return lbar(4 * (1 - delta)) / l4 * pv.value / w_K
    pv = sym2_partial_value(target, 2 * (1 - delta), sym2_terms, tol=sym2_tol)
    return complex(f_ratio(prov, delta)) * pv.value / w_K
