"""Coefficient providers for the GL(n) Dirichlet series, Hecke-character
coefficients, and symmetric-square partial values.

All coefficients are analytically normalized (functional equation at
s <-> 1-s), so the classical integral Fourier coefficients appear only
inside the providers.  The two built-in newforms come from eta products
computed by exact integer convolution; the long Ramanujan range uses a
residue/CRT convolution so no precision is lost before the final float
conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .dirichlet import DirichletCharacter, product_character, trivial_character
from .quadclass import ClassCharacter, ClassGroup, DomainError, rep_count_table

GAMMA_R = "GR"
GAMMA_C = "GC"

# Luo-Rudnick-Sarnak exponent toward Ramanujan for unramified places.
def lrs_exponent(dim_n: int) -> float:
    return 0.5 - 1.0 / (dim_n * dim_n + 1)


class CoefficientRangeError(ValueError):
    """Requested index beyond the provider's declared coefficient bound."""


# ---------------------------------------------------------------------------
# integer sieves
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def smallest_prime_factors(upto: int) -> np.ndarray:
    spf = np.zeros(upto + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, upto + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def primes_upto(upto: int) -> list[int]:
    spf = smallest_prime_factors(upto)
    return [p for p in range(2, upto + 1) if spf[p] == p]


def _multiplicative_array(upto: int, local, dtype=np.complex128) -> np.ndarray:
    """Assemble a multiplicative function from local(p, k) = f(p^k).

    local is called once per prime power <= upto; the rest is the SPF sieve.
    """
    out = np.zeros(upto + 1, dtype=dtype)
    out[1] = 1
    spf = smallest_prime_factors(upto)
    ppow_val: dict[int, complex] = {}
    for p in primes_upto(upto):
        q, k = p, 1
        while q <= upto:
            ppow_val[q] = local(p, k)
            q *= p
            k += 1
    for n in range(2, upto + 1):
        p = int(spf[n])
        q, m = p, n // p
        while m % p == 0:
            q *= p
            m //= p
        out[n] = ppow_val[q] * out[m] if m > 1 else ppow_val[q]
    return out


# ---------------------------------------------------------------------------
# eta products (exact integer expansions)
# ---------------------------------------------------------------------------

def _pentagonal(upto: int, stride: int = 1) -> list[tuple[int, int]]:
    """Sparse expansion of prod_k (1 - q^(stride*k)) up to q^upto."""
    terms = []
    k = 0
    while True:
        for kk in ((k, -k) if k else (0,)):
            e = stride * kk * (3 * kk - 1) // 2
            if 0 <= e <= upto:
                terms.append((e, -1 if kk % 2 else 1))
        if stride * k * (3 * k - 1) // 2 > upto and k > 0:
            break
        k += 1
    return sorted(set(terms))


def _jacobi_cube(upto: int) -> list[tuple[int, int]]:
    """Sparse expansion of prod_k (1 - q^k)^3 = sum (-1)^k (2k+1) q^(k(k+1)/2)."""
    terms = []
    k = 0
    while k * (k + 1) // 2 <= upto:
        terms.append((k * (k + 1) // 2, (2 * k + 1) * (-1 if k % 2 else 1)))
        k += 1
    return terms


def _sparse_conv_py(dense: list[int], sparse: list[tuple[int, int]], upto: int) -> list[int]:
    out = [0] * (upto + 1)
    for off, coef in sparse:
        for i in range(upto + 1 - off):
            v = dense[i]
            if v:
                out[i + off] += coef * v
    return out


def tau_exact(upto: int) -> list[int]:
    """Ramanujan tau(n) for 1 <= n <= upto, exact integers via the eta
    product Delta = q * (prod (1-q^k)^3)^8.  Pure-Python route, intended
    for n up to a few thousand (test oracle)."""
    m = upto  # need coefficients of J^8 up to q^(upto-1)
    jac = _jacobi_cube(m)
    dense = [0] * m
    for off, coef in jac:
        if off < m:
            dense[off] = coef
    for _ in range(7):
        dense = _sparse_conv_py(dense, jac, m - 1)
    return [dense[n - 1] for n in range(1, upto + 1)]


def _sparse_conv_wrap(dense: np.ndarray, sparse: list[tuple[int, int]]) -> np.ndarray:
    """Shifted-add convolution on int64 with two's-complement wraparound,
    i.e. exact arithmetic mod 2^64."""
    out = np.zeros_like(dense)
    n = dense.shape[0]
    with np.errstate(over="ignore"):
        for off, coef in sparse:
            if off < n:
                out[off:] += np.int64(coef) * dense[: n - off]
    return out


def _sparse_conv_mod(dense: np.ndarray, sparse: list[tuple[int, int]], p: int) -> np.ndarray:
    """Shifted-add convolution mod p.  The sparse coefficients stay small
    (|coef| < 4000) and dense entries sit in [0, p), so accumulating all
    terms before one final reduction stays inside int64."""
    out = np.zeros_like(dense)
    n = dense.shape[0]
    for off, coef in sparse:
        if off < n:
            out[off:] += np.int64(coef) * dense[: n - off]
    return out % p


_CRT_PRIMES = (2147483647, 2147483629, 2147483587)  # ~2^31, products stay in int64


@lru_cache(maxsize=4)
def _tau_residues(size: int) -> tuple:
    """J^8 coefficient array modulo 2^64 and the CRT primes."""
    jac = _jacobi_cube(size - 1)
    base = np.zeros(size, dtype=np.int64)
    for off, coef in jac:
        base[off] = coef
    wrap = base.copy()
    for _ in range(7):
        wrap = _sparse_conv_wrap(wrap, jac)
    mods = []
    for p in _CRT_PRIMES:
        cur = base % p
        for _ in range(7):
            cur = _sparse_conv_mod(cur, jac, p)
        mods.append(cur)
    return wrap, mods


def tau_array(upto: int) -> np.ndarray:
    """tau(n) for n <= upto as exact big integers (object array).

    Residues mod 2^64 and three ~2^31 primes are combined by CRT; the
    modulus ~1.8e47 dominates |tau(n)| <= d(n) n^{11/2} at desk scale.
    Per-element work stays in machine words (Garner mixed-radix digits)
    except the final big-integer combination.
    """
    wrap, mods = _tau_residues(upto)
    p1, p2, p3 = _CRT_PRIMES
    d1 = mods[0]
    d2 = (mods[1] - d1) % p2 * pow(p1, -1, p2) % p2
    d3 = ((mods[2] - d1) % p3 - d2 * (p1 % p3)) % p3 * pow(p1 * p2, -1, p3) % p3
    lo = d1 + p1 * d2                       # tau mod p1 p2, fits in int64
    P = p1 * p2 * p3
    x3 = lo.astype(object) + (p1 * p2) * d3.astype(object)   # tau mod P
    # tau = w + 2^64 t with w = tau mod 2^64 and t = (x3 - w)/2^64 mod P;
    # |tau| <= ~6e35 keeps t far from the CRT wraparound boundary.
    w = wrap.astype(np.uint64).astype(object)
    inv64 = pow(1 << 64, -1, P)
    t = (x3 - w) * inv64 % P
    t = np.where(t > P // 2, t - P, t)
    total = w + (t << 64)
    out = np.empty(upto + 1, dtype=object)
    out[0] = 0
    out[1:] = total  # tau(n) = [q^(n-1)] J^8
    return out


@lru_cache(maxsize=None)
def _delta_c_pow2(size: int) -> np.ndarray:
    import os
    cache_dir = os.environ.get("RSTWIST_CACHE_DIR")
    path = None
    if cache_dir:
        path = os.path.join(cache_dir, f"delta_c_{size}.npy")
        if os.path.exists(path):
            return np.load(path)
    tau = tau_array(size)
    n = np.arange(size + 1, dtype=np.float64)
    n[0] = 1.0
    out = np.array([float(t) for t in tau], dtype=np.float64) / n ** 5.5
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        np.save(path, out)
    return out


def delta_c_array(upto: int) -> np.ndarray:
    """Analytic coefficients c(n) = tau(n)/n^(11/2) of the level-one
    weight-12 cusp form, float64.  Built at power-of-two sizes so repeat
    requests share one construction."""
    size = 1 << max(12, (upto - 1).bit_length())
    return _delta_c_pow2(size)[: upto + 1]


def weight2_level11_a(upto: int) -> np.ndarray:
    """Integral coefficients a(n) of the weight-2, level-11 newform from
    the eta product q * prod (1-q^k)^2 (1-q^(11k))^2, exact in int64."""
    size = upto
    e1 = _pentagonal(size - 1, 1)
    e11 = _pentagonal(size - 1, 11)
    dense = np.zeros(size, dtype=np.int64)
    for off, coef in e1:
        dense[off] = coef
    dense = _sparse_conv_wrap(dense, e1)
    dense = _sparse_conv_wrap(dense, e11)
    dense = _sparse_conv_wrap(dense, e11)
    out = np.zeros(upto + 1, dtype=np.int64)
    out[1:] = dense
    return out


# ---------------------------------------------------------------------------
# providers
# ---------------------------------------------------------------------------

@dataclass
class CoefficientSeries:
    """A GL(n) coefficient provider in the analytic normalization."""

    label: str
    dim_n: int
    conductor: int
    omega: DirichletCharacter
    gamma_shifts: tuple[tuple[str, float], ...]
    gamma_shifts_eta: tuple[tuple[str, float], ...]
    selfdual: bool
    eps_half: complex | None
    coeff_bound: int
    _builder: object = None        # callable upto -> complex array
    _local: object = None          # callable p -> local L-poly [1, -e1, ...]
    _cache: np.ndarray | None = None
    real_coeffs: bool = True

    def coefficients(self, upto: int) -> np.ndarray:
        """c(n) for n = 0..upto (c(0) = 0)."""
        if upto > self.coeff_bound:
            raise CoefficientRangeError(
                f"{self.label}: requested n <= {upto} beyond bound {self.coeff_bound}")
        if self._cache is None or self._cache.shape[0] <= upto:
            have = 0 if self._cache is None else self._cache.shape[0]
            grow = min(self.coeff_bound, max(upto, 2 * have, 4096))
            self._cache = np.asarray(self._builder(grow), dtype=np.complex128)
        return self._cache[: upto + 1]

    def coefficient(self, n: int) -> complex:
        if n < 1:
            raise DomainError("coefficient index must be >= 1")
        return complex(self.coefficients(n)[n])

    def local_euler_poly(self, p: int) -> list[complex]:
        """Coefficients [1, -e1, e2, ...] of the local L-polynomial at p."""
        if self._local is not None:
            return list(self._local(p))
        # generic fallback: reconstruct from c(p^k); only for small p
        deg = self.dim_n if self.conductor % p else 1
        series = [1.0 + 0j] + [self.coefficient(p ** k) for k in range(1, deg + 1)]
        poly = [1.0 + 0j]
        for j in range(1, deg + 1):
            poly.append(-sum(poly[i] * series[j - i] for i in range(j)))
        return poly

    def local_coefficient(self, p: int, k: int) -> complex:
        """c(p^k) by the local Euler recursion (no array access for k >= 2)."""
        poly = self.local_euler_poly(p)
        vals = [1.0 + 0j]
        for j in range(1, k + 1):
            v = -sum(poly[i] * vals[j - i] for i in range(1, min(j, len(poly) - 1) + 1))
            vals.append(v)
        return vals[k]

    def contragredient(self) -> "CoefficientSeries":
        if self.real_coeffs:
            return self
        dual = replace(self, label=self.label + "~",
                       omega=self.omega.conjugate(),
                       eps_half=None if self.eps_half is None
                       else self.eps_half.conjugate())
        builder = self._builder
        local = self._local
        dual._builder = lambda upto: np.conj(builder(upto))
        dual._local = None if local is None else \
            (lambda p: [v.conjugate() for v in local(p)])
        dual._cache = None
        return dual


def _gl2_local(prov: CoefficientSeries):
    """Local L-polynomial closure for a GL(2) provider: degree 2 at good p
    with constant term omega(p), degree 1 at ramified p."""
    def local(p: int) -> list[complex]:
        cp = prov.coefficient(p)
        if prov.conductor % p == 0:
            return [1.0 + 0j, -cp]
        return [1.0 + 0j, -cp, prov.omega(p)]
    return local


def make_provider(kind: str, *, base: CoefficientSeries | None = None,
                  xi: DirichletCharacter | None = None,
                  coeff_bound: int = 4_000_000) -> CoefficientSeries:
    """Built-in providers: 'ramanujan_delta', 'weight2_level11',
    'sym_square' (of a GL(2) base), 'dirichlet_twist' (base by xi)."""
    if kind == "ramanujan_delta":
        prov = CoefficientSeries(
            label="ramanujan_delta", dim_n=2, conductor=1,
            omega=trivial_character(),
            gamma_shifts=((GAMMA_C, 5.5),),
            gamma_shifts_eta=((GAMMA_C, 5.5),),
            selfdual=True, eps_half=1.0 + 0j,
            coeff_bound=coeff_bound,
            _builder=lambda upto: delta_c_array(upto),
        )
        prov._local = _gl2_local(prov)
        return prov
    if kind == "weight2_level11":
        def build(upto):
            a = weight2_level11_a(upto).astype(np.float64)
            n = np.arange(upto + 1, dtype=np.float64)
            n[0] = 1.0
            return a / np.sqrt(n)
        prov = CoefficientSeries(
            label="weight2_level11", dim_n=2, conductor=11,
            omega=trivial_character(),
            gamma_shifts=((GAMMA_C, 0.5),),
            gamma_shifts_eta=((GAMMA_C, 0.5),),
            selfdual=True, eps_half=1.0 + 0j,
            coeff_bound=coeff_bound,
            _builder=build,
        )
        prov._local = _gl2_local(prov)
        return prov
    if kind == "sym_square":
        if base is None or base.dim_n != 2:
            raise DomainError("sym_square needs a GL(2) base provider")
        return _sym_square(base, coeff_bound)
    if kind == "dirichlet_twist":
        if base is None or xi is None:
            raise DomainError("dirichlet_twist needs base and xi")
        return dirichlet_twist(base, xi)
    raise DomainError(f"unknown provider kind {kind!r}")


def _sym_square(base: CoefficientSeries, coeff_bound: int) -> CoefficientSeries:
    """GL(3) symmetric-square lift of a GL(2) provider.

    At good p with Satake {a, b}: multiset {a^2, ab, b^2}; local series by
    the degree-3 recursion.  At ramified p (b = 0): single factor a^2."""
    def local_poly(p: int) -> list[complex]:
        lam = base.coefficient(p)
        if base.conductor % p == 0:
            return [1.0 + 0j, -lam * lam]
        w = base.omega(p)
        e1 = lam * lam - w
        return [1.0 + 0j, -e1, w * e1, -w ** 3]

    def build(upto):
        base.coefficients(min(upto, base.coeff_bound))
        poly_cache: dict[int, list[complex]] = {}

        def local(p: int, k: int) -> complex:
            poly = poly_cache.get(p)
            if poly is None:
                poly = poly_cache[p] = local_poly(p)
            vals = [1.0 + 0j]
            for j in range(1, k + 1):
                vals.append(-sum(poly[i] * vals[j - i]
                                 for i in range(1, min(j, len(poly) - 1) + 1)))
            return vals[k]
        return _multiplicative_array(upto, local)

    omega2 = product_character(base.omega, base.omega)
    # weight-k holomorphic base: GC(s + k - 1) and GR(s + 1) blocks; the eta
    # twist flips the parity of the GR block.
    k_shift = 2 * max(sh for _, sh in base.gamma_shifts)  # k - 1
    prov = CoefficientSeries(
        label=f"sym2({base.label})", dim_n=3,
        conductor=base.conductor ** 2,
        omega=omega2,
        gamma_shifts=((GAMMA_C, k_shift), (GAMMA_R, 1.0)),
        gamma_shifts_eta=((GAMMA_C, k_shift), (GAMMA_R, 0.0)),
        selfdual=base.selfdual and base.real_coeffs,
        eps_half=None,
        coeff_bound=min(coeff_bound, base.coeff_bound),
        _builder=build,
        real_coeffs=base.real_coeffs,
    )
    prov._local = local_poly
    return prov


def dirichlet_twist(base: CoefficientSeries, xi: DirichletCharacter) -> CoefficientSeries:
    """Twist c'(n) = c(n) xi(n); conductor f * f(xi)^2 for coprime levels."""
    fxi = xi.conductor()
    if math.gcd(base.conductor, fxi) != 1:
        raise DomainError("twist requires coprime conductors")
    builder = base._builder

    def build(upto):
        return np.asarray(builder(upto), dtype=np.complex128) * xi.values_upto(upto)

    def local_poly(p: int) -> list[complex]:
        x = xi(p)
        return [coef * x ** j for j, coef in enumerate(base.local_euler_poly(p))]

    xi_real = all(abs(v.imag) < 1e-15 for v in xi.vals)
    eps = None
    if base.eps_half is not None:
        # root number of the twisted form: omega(f_xi) xi(f_Pi) eps(Pi) eps(xi)^n
        q = fxi
        if q == 1:
            eps = base.eps_half
        else:
            a = 0 if xi.parity == 1 else 1
            tau = xi.gauss_sum()
            eps_xi = tau / (1j ** a * math.sqrt(q))
            eps = (base.omega(q) * xi(base.conductor) * base.eps_half
                   * eps_xi ** base.dim_n)
    prov = CoefficientSeries(
        label=f"{base.label}(x){xi.label}", dim_n=base.dim_n,
        conductor=base.conductor * fxi ** 2,
        omega=product_character(base.omega, product_character(xi, xi)),
        gamma_shifts=base.gamma_shifts,
        gamma_shifts_eta=base.gamma_shifts_eta,
        selfdual=base.selfdual and xi_real,
        eps_half=eps,
        coeff_bound=base.coeff_bound,
        _builder=build,
        real_coeffs=base.real_coeffs and xi_real,
    )
    prov._local = local_poly
    return prov


# ---------------------------------------------------------------------------
# Hecke-character coefficients
# ---------------------------------------------------------------------------

_REP_CACHE: dict[tuple, np.ndarray] = {}


def rep_tables(group: ClassGroup, upto: int) -> np.ndarray:
    """r_A(n) for every class (rows) and n <= upto (columns)."""
    key = (group.disc.d0, group.disc.c)
    cached = _REP_CACHE.get(key)
    if cached is not None and cached.shape[1] > upto:
        return cached[:, : upto + 1]
    table = np.vstack([rep_count_table(f, group.w_K, upto) for f in group.forms])
    _REP_CACHE[key] = table
    return table


@dataclass
class HeckeSeries:
    """Coefficients c_chi(n) = sum_A chi(A) r_A(n) of the class character."""

    chi: ClassCharacter

    def coefficients(self, upto: int) -> np.ndarray:
        table = rep_tables(self.chi.group, upto)
        return self.chi.values() @ table

    def coefficient(self, n: int) -> complex:
        if n < 1:
            raise DomainError("coefficient index must be >= 1")
        return complex(self.coefficients(n)[n])


def hecke_coefficient(h: HeckeSeries, n: int) -> complex:
    return h.coefficient(n)


# ---------------------------------------------------------------------------
# symmetric-square partial values
# ---------------------------------------------------------------------------

_SQ_CACHE: dict[int, np.ndarray] = {}


def square_coefficients(prov: CoefficientSeries, upto: int) -> np.ndarray:
    """c(n^2) for n <= upto, assembled multiplicatively from c(p^{2k})
    via the local Euler recursions (no giant square-index arrays)."""
    cached = _SQ_CACHE.get(id(prov))
    if cached is not None and cached.shape[0] > upto:
        return cached[: upto + 1]
    size = max(upto, 4096)
    prov.coefficients(min(prov.coeff_bound, max(2048, size)))

    def local(p: int, k: int) -> complex:
        return prov.local_coefficient(p, 2 * k)
    out = _multiplicative_array(size, local)
    _SQ_CACHE[id(prov)] = out
    return out[: upto + 1]


@dataclass(frozen=True)
class PartialValue:
    value: complex
    tail_bound: float
    terms: int
    stable: bool = True


def sym2_partial_value(prov: CoefficientSeries, s: complex, upto: int,
                       tol: float = 1e-3) -> PartialValue:
    """Partial value of L_1(s, Sym^2 Pi) = L_1(2s, omega) sum c(n^2)/n^s.

    Direct summation for Re(s) > 1; Cesaro-smoothed partial sums near
    s = 1 with a three-window stability criterion.  The reported tail
    bound is enforced, never silently accepted.
    """
    s = complex(s)
    if s.real <= 0.9:
        raise DomainError("symmetric-square partial values need Re(s) > 0.9")
    csq = square_coefficients(prov, upto)
    n = np.arange(upto + 1, dtype=np.float64)
    n[0] = 1.0
    terms = csq * n ** (-s)
    terms[0] = 0.0
    omega_part = _omega_zeta(prov.omega, 2 * s)
    if s.real > 1.05:
        inner = complex(np.sum(terms))
        window = np.abs(terms[upto // 2:]).sum()
        tail = window * 2.0 ** (1.05 - s.real) / max(1e-300, 1 - 2.0 ** (1.05 - s.real))
        tail = max(tail, float(np.abs(terms[-10:]).sum()))
        if tail > tol:
            raise ArithmeticError(
                f"sym2 tail bound {tail:.2e} exceeds tolerance {tol:.2e} at N={upto}")
        return PartialValue(omega_part * inner, abs(omega_part) * tail, upto)
    # Cesaro smoothing: averaged partial sums over three growing windows
    partial = np.cumsum(terms)
    smoothed = np.cumsum(partial) / np.maximum(1, np.arange(upto + 1))
    w1, w2, w3 = smoothed[int(upto * 0.7)], smoothed[int(upto * 0.85)], smoothed[upto]
    spread = max(abs(w1 - w3), abs(w2 - w3))
    stable = spread <= tol
    if not stable and spread > 50 * tol:
        raise ArithmeticError(
            f"sym2 Cesaro windows spread {spread:.2e} at N={upto} (tol {tol:.2e})")
    return PartialValue(omega_part * complex(w3), abs(omega_part) * spread * 3,
                        upto, stable)


def _omega_zeta(omega: DirichletCharacter, s: complex) -> complex:
    from .dirichlet import dirichlet_l
    return dirichlet_l(s, omega)
