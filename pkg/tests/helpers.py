"""Shared generators for property tests."""

import random
from fractions import Fraction

from sullivan_dgm.modules import ModGenerator, SemifreeModule


def insert_contractible_pair(M: SemifreeModule, rng: random.Random, k=None):
    """M plus generators u (deg k), w (deg k-1) with du = d(y), dw = u - y.

    y is a random element built from generators placed before the pair, so
    the result is semifree, quasi-isomorphic to M, and not minimal.
    """
    A = M.base
    pos = rng.randint(0, len(M))
    if k is None:
        k = rng.randint(-1, 4)
    y = {}
    for j in range(pos):
        for m in A.basis(k - M.degrees[j]):
            c = rng.randint(-2, 2)
            if c:
                y[(m, j)] = Fraction(c)
    dy = {}
    for lab, c in y.items():
        for t, e in M.d(lab).items():
            dy[t] = dy.get(t, 0) + c * e
    tag = len(M)
    shift = {j: j if j < pos else j + 2 for j in range(len(M))}
    gens = list(M.generators[:pos]) + [ModGenerator(f"u{tag}", k), ModGenerator(f"w{tag}", k - 1)] \
        + list(M.generators[pos:])
    diffs = [{(m, shift[j]): c for (m, j), c in d.items()} for d in M.diffs[:pos]]
    diffs.append({(m, shift[j]): c for (m, j), c in dy.items() if c})
    dw = {((), pos): Fraction(1)}
    for (m, j), c in y.items():
        dw[(m, shift[j])] = dw.get((m, shift[j]), 0) - c
    diffs.append(dw)
    diffs += [{(m, shift[j]): c for (m, j), c in d.items()} for d in M.diffs[pos:]]
    return SemifreeModule(A, gens, diffs, M.name)
