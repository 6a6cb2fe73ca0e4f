"""Exact arithmetic of imaginary quadratic discriminants.

Reduced binary quadratic forms, Gauss composition, class groups of the
maximal order and of the order Z + c*O_K, their character groups, and
lattice-point representation counts r_A(n).  Everything in this module is
integer-exact; floating point enters only when character values are
materialised as complex roots of unity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._abelian import polycyclic_dual

# Order discriminants are capped so that all composition intermediates fit
# comfortably in machine-word-scale integers (they stay below ~|d|^2).
MAX_ABS_DISC = 2**40


class DomainError(ValueError):
    """Invalid discriminant, conductor, or group-theoretic input."""


# ---------------------------------------------------------------------------
# discriminants
# ---------------------------------------------------------------------------

def _squarefree(n: int) -> bool:
    n = abs(n)
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def is_fundamental(d0: int) -> bool:
    """True when d0 is a fundamental (field) discriminant, d0 < 0."""
    if d0 >= 0:
        return False
    if d0 % 4 == 1:
        return _squarefree(d0)
    if d0 % 4 == 0:
        m = d0 // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


@dataclass(frozen=True)
class Discriminant:
    """Order discriminant d = c^2 * d0 with d0 fundamental and c >= 1."""

    d0: int
    c: int = 1

    def __post_init__(self):
        if not is_fundamental(self.d0):
            raise DomainError(f"{self.d0} is not a fundamental discriminant < 0")
        if self.c < 1:
            raise DomainError(f"conductor must be >= 1, got {self.c}")
        if abs(self.d) > MAX_ABS_DISC:
            raise DomainError(f"|d| = {abs(self.d)} exceeds cap {MAX_ABS_DISC}")

    @property
    def d(self) -> int:
        return self.c * self.c * self.d0

    @property
    def D_K(self) -> int:
        """Absolute field discriminant |d0|."""
        return abs(self.d0)

    def __str__(self):
        return f"d0={self.d0}, c={self.c}"


# ---------------------------------------------------------------------------
# Kronecker symbol
# ---------------------------------------------------------------------------

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), completely multiplicative in n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker(a, -n)
    # strip factors of 2 from n
    t = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            t = -t
    a %= n
    # Jacobi symbol by reciprocity
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def kronecker_eta(d0: int, n: int) -> int:
    """The quadratic character attached to Q(sqrt(d0)), eta(n) = (d0|n)."""
    if n < 1:
        raise DomainError("eta is evaluated at positive integers")
    return kronecker(d0, n)


def eta_values(d0: int, upto: int) -> np.ndarray:
    """eta(n) for n = 0..upto as an int8 array (index 0 unused)."""
    out = np.zeros(upto + 1, dtype=np.int8)
    for n in range(1, upto + 1):
        out[n] = kronecker(d0, n)
    return out


# ---------------------------------------------------------------------------
# reduced forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class ReducedForm:
    """Primitive reduced form a x^2 + b xy + c y^2 of negative discriminant."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def _reduce(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Reduce a positive-definite form to its canonical representative."""
    while True:
        if -a < b <= a <= c:
            break
        if a > c:
            a, b, c = c, -b, a
            continue
        # normalize b into (-a, a]
        r = (a - b) // (2 * a)
        b, c = b + 2 * r * a, a * r * r + b * r + c
    if a == c and b < 0:
        b = -b
    return a, b, c


def reduced_forms(disc: Discriminant) -> list[ReducedForm]:
    """One reduced primitive form per class, sorted lexicographically."""
    d = disc.d
    forms = []
    amax = math.isqrt(abs(d) // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(math.gcd(a, abs(b)), c) != 1:
                continue
            forms.append(ReducedForm(a, b, c))
    return sorted(forms)


def principal_form(disc: Discriminant) -> ReducedForm:
    d = disc.d
    k = d & 1
    return ReducedForm(1, k, (k * k - d) // 4)


def _solve_linmod(a: int, b: int, m: int) -> tuple[int, int]:
    """Solve a*x = b (mod m); return (x0, step) so x = x0 + step*Z."""
    g = math.gcd(a, m)
    if b % g:
        raise ArithmeticError("no solution to linear congruence")
    a, b, m = a // g, b // g, m // g
    x0 = (b * pow(a, -1, m)) % m if m > 1 else 0
    return x0, m


def compose(disc: Discriminant, f1: ReducedForm, f2: ReducedForm) -> ReducedForm:
    """Gauss composition of two primitive forms of the same discriminant.

    United-forms / Dirichlet recipe with final reduction.
    """
    d = disc.d
    if f1.disc != d or f2.disc != d:
        raise DomainError("forms must share the target discriminant")
    a, b, c = f1.a, f1.b, f1.c
    aa, bb = f2.a, f2.b
    g = (b + bb) // 2
    h = (bb - b) // 2
    w = math.gcd(math.gcd(a, aa), g)
    s = a // w
    t = aa // w
    u = g // w
    mu, nu = _solve_linmod(t * u, h * u + s * c, s * t)
    lam, _ = _solve_linmod(t * nu, h - t * mu, s)
    k = mu + nu * lam
    ell = (k * t - h) // s
    m = (t * u * k - h * u - c * s) // (s * t)
    A = s * t
    B = w * u - (k * t + ell * s)
    C = k * ell - w * m
    out = ReducedForm(*_reduce(A, B, C))
    if out.disc != d:
        raise ArithmeticError("composition left the discriminant")
    return out


# iterating f -> f.f via compose is quadratic-time; fine at desk scale.
def form_pow(disc: Discriminant, f: ReducedForm, k: int) -> ReducedForm:
    out = principal_form(disc)
    base = f
    while k > 0:
        if k & 1:
            out = compose(disc, out, base)
        base = compose(disc, base, base)
        k >>= 1
    return out


# ---------------------------------------------------------------------------
# class groups
# ---------------------------------------------------------------------------

def unit_count(d: int) -> int:
    """Number of automorphs of a form of discriminant d (roots of unity)."""
    if d == -3:
        return 6
    if d == -4:
        return 4
    return 2


@dataclass
class ClassGroup:
    """The form class group C(O_c) with its full composition table."""

    disc: Discriminant
    forms: list[ReducedForm]
    identity: int
    comp: np.ndarray          # comp[i, j] = index of forms[i] * forms[j]
    inv: np.ndarray           # inv[i] = index of forms[i]^(-1)
    h: int
    w_K: int
    # polycyclic data: generator indices, relative orders, normal forms
    gens: list[int] = field(default_factory=list)
    rel_orders: list[int] = field(default_factory=list)
    exps: np.ndarray | None = None   # exps[i] = exponent vector of forms[i]
    _gen_frac: list[list[Fraction]] = field(default_factory=list)

    def index_of(self, f: ReducedForm) -> int:
        return self._lookup[f]

    def power(self, i: int, k: int) -> int:
        out = self.identity
        base = i
        while k > 0:
            if k & 1:
                out = int(self.comp[out, base])
            base = int(self.comp[base, base])
            k >>= 1
        return out

    def element_order(self, i: int) -> int:
        k, j = 1, i
        while j != self.identity:
            j = int(self.comp[j, i])
            k += 1
        return k

    def to_json(self) -> str:
        rec = {
            "disc": {"d0": self.disc.d0, "c": self.disc.c, "d": self.disc.d},
            "forms": [[f.a, f.b, f.c] for f in self.forms],
            "comp": self.comp.tolist(),
            "h": self.h,
            "w_K": self.w_K,
        }
        return json.dumps(rec, separators=(",", ":"))


def _polycyclic(group: ClassGroup) -> None:
    """Attach a polycyclic presentation and exact character data."""
    data = polycyclic_dual(group.comp, group.identity)
    group.gens = data.gens
    group.rel_orders = data.rel_orders
    group.exps = data.exps
    group._gen_frac = data.gen_fracs


def class_group(disc: Discriminant) -> ClassGroup:
    forms = reduced_forms(disc)
    h = len(forms)
    lookup = {f: i for i, f in enumerate(forms)}
    comp = np.zeros((h, h), dtype=np.int32)
    for i in range(h):
        for j in range(i, h):
            k = lookup[compose(disc, forms[i], forms[j])]
            comp[i, j] = comp[j, i] = k
    ident = lookup[principal_form(disc)]
    inv = np.zeros(h, dtype=np.int32)
    for i in range(h):
        inv[i] = int(np.where(comp[i] == ident)[0][0])
    group = ClassGroup(disc, forms, ident, comp, inv, h, unit_count(disc.d))
    group._lookup = lookup
    _polycyclic(group)
    hformula = ring_class_number(disc.d0, disc.c)
    if hformula != h:
        raise ArithmeticError(
            f"class number mismatch at {disc}: enumerated {h}, formula {hformula}")
    return group


@lru_cache(maxsize=None)
def cached_class_group(d0: int, c: int = 1) -> ClassGroup:
    return class_group(Discriminant(d0, c))


def ring_class_number(d0: int, c: int) -> int:
    """Order of C(O_c) by the classical conductor formula:
    h(d0) * c * prod_{q | c} (1 - eta(q)/q) / [O_K^* : O_c^*]."""
    if not is_fundamental(d0):
        raise DomainError(f"{d0} is not fundamental")
    if c < 1:
        raise DomainError("conductor must be >= 1")
    hK = len(reduced_forms(Discriminant(d0, 1)))
    if c == 1:
        return hK
    val = hK * c
    q = 2
    cc = c
    while cc > 1:
        if cc % q == 0:
            val -= (val // q) * kronecker(d0, q)
            while cc % q == 0:
                cc //= q
        q += 1
    # unit index [O_K^* : O_c^*] = w_K/2 when c > 1 and d0 in {-3, -4}
    unit_index = unit_count(d0) // 2 if d0 in (-3, -4) else 1
    if val % unit_index:
        raise ArithmeticError("conductor formula produced a non-integer")
    return val // unit_index


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassCharacter:
    """A character of a class group, stored as exact root-of-unity exponents."""

    group: ClassGroup
    exponents: tuple[int, ...]   # chi(forms[i]) = exp(2 pi i exponents[i]/order)
    order: int
    index: int                   # position in the dual-group enumeration

    def value(self, i: int) -> complex:
        return complex(np.exp(2j * np.pi * self.exponents[i] / self.order))

    def values(self) -> np.ndarray:
        e = np.asarray(self.exponents, dtype=np.float64)
        return np.exp(2j * np.pi * e / self.order)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def conjugate_index(self) -> int:
        """Index of the complex-conjugate character in characters(group)."""
        g = self.group
        target = tuple((-e) % self.order for e in self.exponents)
        for chi in characters(g):
            if chi.order == self.order and chi.exponents == target:
                return chi.index
        raise ArithmeticError("conjugate character not found")


def _char_from_fracs(group: ClassGroup, fracs: list[Fraction], index: int) -> ClassCharacter:
    h = group.h
    vals = []
    for i in range(h):
        tot = sum((int(e) * fracs[k] for k, e in enumerate(group.exps[i])), Fraction(0)) % 1
        vals.append(tot)
    order = 1
    for v in vals:
        order = order * v.denominator // math.gcd(order, v.denominator)
    exps = tuple(int(v * order) % order for v in vals)
    return ClassCharacter(group, exps, order, index)


def characters(group: ClassGroup, order_filter: int | None = None) -> list[ClassCharacter]:
    """All h characters of the dual group; with a filter l, exactly those
    with chi^l trivial (count = [C : C^l])."""
    chars = [_char_from_fracs(group, fr, i) for i, fr in enumerate(group._gen_frac)]
    if order_filter is None:
        return chars
    l = order_filter
    if l < 1 or group.h % l:
        raise DomainError(f"order filter {l} does not divide h = {group.h}")
    kept = [chi for chi in chars if l % chi.order == 0]
    expected = group.h // len(power_subgroup(group, l))
    if len(kept) != expected:
        raise ArithmeticError("character filter count mismatch")
    return kept


def power_subgroup(group: ClassGroup, l: int) -> list[int]:
    """Indices of the subgroup C^l of l-th powers."""
    if l < 1:
        raise DomainError("power exponent must be >= 1")
    return sorted({group.power(i, l) for i in range(group.h)})


# ---------------------------------------------------------------------------
# representation counts
# ---------------------------------------------------------------------------

def rep_count(form: ReducedForm, w_K: int, n: int) -> int:
    """r_A(n): lattice points with q_A(x, y) = n, divided by the automorph
    count.  Exact integer (orbits of the automorph group are free off 0)."""
    if n < 1:
        raise DomainError("rep_count needs n >= 1")
    a, b, c = form.a, form.b, form.c
    d = form.disc
    count = 0
    ymax = math.isqrt(4 * a * n // abs(d))
    for y in range(-ymax, ymax + 1):
        # a x^2 + (b y) x + (c y^2 - n) = 0
        disc_x = b * b * y * y - 4 * a * (c * y * y - n)
        if disc_x < 0:
            continue
        r = math.isqrt(disc_x)
        if r * r != disc_x:
            continue
        for sgn in ((r, -r) if r else (0,)):
            num = -b * y + sgn
            if num % (2 * a) == 0:
                count += 1
    if count % w_K:
        raise ArithmeticError("lattice count not divisible by automorph count")
    return count // w_K


def rep_count_table(form: ReducedForm, w_K: int, upto: int) -> np.ndarray:
    """r_A(n) for all 1 <= n <= upto, as an int64 array indexed by n."""
    a, b, c = form.a, form.b, form.c
    d = form.disc
    counts = np.zeros(upto + 1, dtype=np.int64)
    ymax = math.isqrt(4 * a * upto // abs(d))
    for y in range(-ymax, ymax + 1):
        # x range from a x^2 + b x y + c y^2 <= upto
        disc_x = b * b * y * y - 4 * a * (c * y * y - upto)
        if disc_x < 0:
            continue
        r = math.isqrt(disc_x)
        xlo = -((b * y + r) // (2 * a))          # ceil((-b y - r) / 2a)
        xhi = (-b * y + r) // (2 * a)
        xs = np.arange(xlo, xhi + 1, dtype=np.int64)
        if xs.size == 0:
            continue
        vals = a * xs * xs + (b * y) * xs + (c * y * y)
        keep = (vals >= 1) & (vals <= upto)
        np.add.at(counts, vals[keep], 1)
    if np.any(counts % w_K):
        raise ArithmeticError("lattice count not divisible by automorph count")
    return counts // w_K


def ideal_count_table(d0: int, upto: int) -> np.ndarray:
    """Number of integral ideals of O_K of each norm n <= upto, from the
    multiplicative formula sum_{m | n} eta(m) (Dirichlet convolution 1 * eta)."""
    eta = eta_values(d0, upto).astype(np.int64)
    out = np.zeros(upto + 1, dtype=np.int64)
    for m in range(1, upto + 1):
        e = eta[m]
        if e:
            out[m::m] += e
    return out
