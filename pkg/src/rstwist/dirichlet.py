"""Dirichlet characters over Q and the zeta / Dirichlet L-values they need.

Characters are stored as exact value tables on residues; L-values use
mpmath (alternating-series / Euler-Maclaurin continuation of zeta and
Hurwitz zeta) plus the classical finite formulas at s = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from ._abelian import character_fracs, polycyclic_dual
from .quadclass import DomainError, kronecker

mp.mp.dps = 30


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod q given by its value table on 0..q-1."""

    modulus: int
    vals: tuple[complex, ...]
    label: str = ""

    def __call__(self, n: int) -> complex:
        return self.vals[n % self.modulus]

    def values_upto(self, upto: int) -> np.ndarray:
        """chi(n) for n = 0..upto (complex array)."""
        base = np.asarray(self.vals, dtype=np.complex128)
        reps = upto // self.modulus + 1
        return np.tile(base, reps)[: upto + 1]

    @property
    def is_principal(self) -> bool:
        return all(v == 1 for n, v in enumerate(self.vals)
                   if math.gcd(n, self.modulus) == 1)

    @property
    def is_trivial(self) -> bool:
        return self.modulus == 1

    @property
    def parity(self) -> int:
        """chi(-1): +1 even, -1 odd."""
        if self.modulus == 1:
            return 1
        return int(round(self.vals[self.modulus - 1].real))

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus,
                                  tuple(v.conjugate() for v in self.vals),
                                  self.label + "~" if self.label else "")

    def conductor(self) -> int:
        """Smallest f | q such that the character factors through mod f,
        i.e. chi = 1 on units congruent to 1 mod f."""
        q = self.modulus
        for f in _divisors(q):
            if all(abs(self.vals[n % q] - 1.0) < 1e-12
                   for n in range(1, q + 1, f) if math.gcd(n, q) == 1):
                return f
        return q

    def gauss_sum(self) -> complex:
        q = self.modulus
        a = np.arange(q)
        return complex(np.sum(np.asarray(self.vals) * np.exp(2j * np.pi * a / q)))


def _divisors(n: int) -> list[int]:
    out = []
    k = 1
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            if k != n // k:
                out.append(n // k)
        k += 1
    return sorted(out)


def trivial_character() -> DirichletCharacter:
    return DirichletCharacter(1, (1.0 + 0j,), "1")


def quadratic_character(d: int) -> DirichletCharacter:
    """The Kronecker character (d|.) as a character mod |d|."""
    q = abs(d)
    if q == 1:
        return DirichletCharacter(1, (1.0 + 0j,), f"kron({d})")
    vals = (0j,) + tuple(complex(kronecker(d, n)) for n in range(1, q))
    return DirichletCharacter(q, vals, f"kron({d})")


def dirichlet_group(q: int) -> list[DirichletCharacter]:
    """All characters mod q (value 0 off units), enumerated deterministically."""
    if q == 1:
        return [trivial_character()]
    units = [n for n in range(1, q) if math.gcd(n, q) == 1]
    index = {u: i for i, u in enumerate(units)}
    m = len(units)
    comp = np.zeros((m, m), dtype=np.int32)
    for i, u in enumerate(units):
        for j, v in enumerate(units):
            comp[i, j] = index[(u * v) % q]
    data = polycyclic_dual(comp, index[1])
    out = []
    for k, fr in enumerate(character_fracs(data, m)):
        vals = [0j] * q
        for i, u in enumerate(units):
            vals[u] = complex(np.exp(2j * np.pi * float(fr[i])))
        out.append(DirichletCharacter(q, tuple(vals), f"mod{q}.{k}"))
    return out


def product_character(c1: DirichletCharacter, c2: DirichletCharacter) -> DirichletCharacter:
    """Pointwise product, defined mod lcm of the moduli."""
    q = c1.modulus * c2.modulus // math.gcd(c1.modulus, c2.modulus)
    vals = tuple(c1(n) * c2(n) for n in range(q))
    return DirichletCharacter(q, vals, f"{c1.label}*{c2.label}")


# ---------------------------------------------------------------------------
# zeta and L-values
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _zeta_cached(re: float, im: float) -> complex:
    return complex(mp.zeta(mp.mpc(re, im)))


def zeta(s: complex) -> complex:
    """Riemann zeta, analytically continued (short-circuit at s = 1 pole)."""
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise DomainError("zeta pole at s = 1")
    return _zeta_cached(s.real, s.imag)


def _hurwitz(s: complex, a: float) -> complex:
    return complex(mp.zeta(mp.mpc(s.real, s.imag), a))


def dirichlet_l(s: complex, chi: DirichletCharacter) -> complex:
    """L(s, chi), analytically continued.

    Principal characters reduce to zeta with local factors removed; others
    go through the Hurwitz-zeta decomposition, with the classical finite
    formulas at s = 1.
    """
    s = complex(s)
    q = chi.modulus
    if q == 1:
        return zeta(s)
    if chi.is_principal:
        val = zeta(s)
        for p in _prime_divisors(q):
            val *= 1.0 - p ** (-s)
        return val
    if abs(s - 1.0) < 1e-12:
        return _l_at_one(chi)
    acc = 0j
    for a in range(1, q):
        v = chi.vals[a]
        if v:
            acc += v * _hurwitz(s, a / q)
    return q ** (-s) * acc


def _l_at_one(chi: DirichletCharacter) -> complex:
    """L(1, chi) for non-principal chi by the closed finite formulas."""
    q = chi.modulus
    tau = chi.gauss_sum()
    a = np.arange(1, q)
    cvals = np.conj(np.asarray(chi.vals)[1:])
    if chi.parity == -1:
        return complex(1j * np.pi * tau / q**2 * np.sum(cvals * a))
    return complex(-(tau / q) * np.sum(cvals * np.log(2.0 * np.sin(np.pi * a / q))))


def _prime_divisors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def l_eta(d0: int) -> float:
    """L(1, eta) for the quadratic character of Q(sqrt(d0)), d0 < 0."""
    val = _l_at_one(quadratic_character(d0))
    return float(val.real)
