"""Polycyclic presentations and exact dual groups of finite abelian groups.

Works from a full multiplication table.  Characters are produced as exact
rational exponents (values in Q/Z), so root-of-unity values can be
materialised without drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass
class PolycyclicData:
    gens: list[int]                 # generator element indices
    rel_orders: list[int]           # relative orders m_i
    exps: np.ndarray                # exps[x] = exponent vector of element x
    gen_fracs: list[list[Fraction]]  # per character: chi(g_i) = e(f_i)


def polycyclic_dual(comp: np.ndarray, identity: int) -> PolycyclicData:
    """Build a polycyclic presentation and enumerate all characters.

    Every element gets a unique normal form g_1^{e_1} ... g_r^{e_r} with
    0 <= e_i < m_i; a character assigns chi(g_i) = e(f_i) subject to
    m_i f_i = sum_k t_{ik} f_k (mod 1), where g_i^{m_i} has exponent
    vector t_i over the earlier generators.
    """
    n = comp.shape[0]
    reached: dict[int, tuple] = {identity: ()}
    gens: list[int] = []
    rel_orders: list[int] = []
    tails: list[tuple] = []
    while len(reached) < n:
        g = next(i for i in range(n) if i not in reached)
        m, j = 1, g
        while j not in reached:
            j = int(comp[j, g])
            m += 1
        tails.append(reached[j])
        new = {}
        powg = identity
        for e in range(1, m):
            powg = int(comp[powg, g])
            for idx, vec in reached.items():
                new[int(comp[idx, powg])] = vec + (e,)
        for idx in reached:
            reached[idx] = reached[idx] + (0,)
        reached.update(new)
        gens.append(g)
        rel_orders.append(m)
    r = len(gens)
    exps = np.zeros((n, r), dtype=np.int64)
    for idx, vec in reached.items():
        exps[idx, : len(vec)] = vec
    fracs: list[list[Fraction]] = [[]]
    for i in range(r):
        m = rel_orders[i]
        new_fracs = []
        for partial in fracs:
            base = sum((t * partial[k] for k, t in enumerate(tails[i])), Fraction(0))
            for j in range(m):
                new_fracs.append(partial + [((base + j) / m) % 1])
        fracs = new_fracs
    return PolycyclicData(gens, rel_orders, exps, fracs)


def character_fracs(data: PolycyclicData, n: int) -> list[list[Fraction]]:
    """Exact Q/Z value of each character at each element (list per char)."""
    out = []
    for fr in data.gen_fracs:
        vals = []
        for x in range(n):
            tot = sum((int(e) * fr[k] for k, e in enumerate(data.exps[x])), Fraction(0)) % 1
            vals.append(tot)
        out.append(vals)
    return out
