"""
Hom complexes out of free A-modules and Ext.

A *free source* is anything that looks like A⊗V with a chosen basis of V:

* ``gens_in_degree(d)``  generators of degree d,
* ``gen_degree(g)``,
* ``dgen(g)``            {(algebra label, generator): coefficient},
* ``degree_bounds()``    (lowest, highest or None) generator degree,
* ``alg_degree(a)``      degree of an algebra label.

Maps λ of degree k are determined by the values λ(v) ∈ M^{k+|v|}, so the
basis in degree k is the set of pairs (v, b) with |b| = k + |v|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exact import (
    CohomologyResult, DegreeCohomology, GeneratedComplex, WindowError, as_window,
    complex_cohomology, vec_add,
)
from .modules import ModuleTable, SemifreeModule, sign


class SemifreeSource:
    """Free-source view of a finitely generated SemifreeModule."""

    def __init__(self, M: SemifreeModule):
        self.module = M
        self.base = M.base
        self._by_degree: dict = {}
        for i, d in enumerate(M.degrees):
            self._by_degree.setdefault(d, []).append(i)

    def gens_in_degree(self, d):
        return self._by_degree.get(d, [])

    def gen_degree(self, g):
        return self.module.degrees[g]

    def dgen(self, g):
        return self.module.diffs[g]

    def degree_bounds(self):
        if not self.module.degrees:
            return (0, -1)
        return (min(self.module.degrees), max(self.module.degrees))

    def alg_degree(self, a):
        return self.base.degree(a)

    def level(self, g):
        return self.module.degrees[g]

    def format_gen(self, g):
        return self.module.names[g]


def as_source(N):
    if isinstance(N, SemifreeModule):
        return SemifreeSource(N)
    return N


def _target_bounds(M):
    """(lowest, highest) degree where M can be nonzero; None when unbounded."""
    if isinstance(M, ModuleTable):
        if M.min_degree is None:
            if not (M.open_below or M.open_above):
                return (0, -1)
            return (None if M.open_below else M.window.lo, None if M.open_above else M.window.hi)
        return (None if M.open_below else M.min_degree, None if M.open_above else M.max_degree)
    if M.min_degree is None:
        return (0, -1)
    return (M.min_degree, None)


class HomComplex(GeneratedComplex):
    """Hom_A(N, M) with (dλ)(v) = d(λv) - (-1)^k λ(dv) and λ(a·m) = (-1)^{k|a|} a·λ(m)."""

    def __init__(self, source, target):
        self.source = as_source(source)
        self.target = target
        self._cols: dict = {}
        self._tb = _target_bounds(target)

    def _gen_range(self, k):
        slo, shi = self.source.degree_bounds()
        tlo, thi = self._tb
        lo = slo
        if tlo is not None:
            lo = max(lo, tlo - k) if lo is not None else tlo - k
        hi = shi
        if thi is not None:
            hi = min(hi, thi - k) if hi is not None else thi - k
        if lo is None or hi is None:
            raise WindowError("hom complex degree is infinite: bound the source or the target")
        return range(lo, hi + 1)

    def known(self, k):
        try:
            rng = self._gen_range(k)
        except WindowError:
            return False
        return all(self.target.known(k + d) for d in rng if self.source.gens_in_degree(d))

    def basis(self, k):
        out = []
        for d in self._gen_range(k):
            gens = self.source.gens_in_degree(d)
            if not gens:
                continue
            tb = self.target.basis(k + d)
            out.extend((g, b) for g in gens for b in tb)
        return out

    def _columns(self, k):
        hit = self._cols.get(k)
        if hit is not None:
            return hit
        cols: dict = {lab: {} for lab in self.basis(k)}
        src, tgt = self.source, self.target
        for g, b in cols:
            col = cols[(g, b)]
            for t, c in tgt.d(b).items():
                vec_add(col, {(g, t): c})
        s_k = sign(k)
        for d in self._gen_range(k + 1):
            for beta in src.gens_in_degree(d):
                for (a, alpha), c in src.dgen(beta).items():
                    ad = src.alg_degree(a)
                    coeff = -s_k * sign(k * ad) * c
                    for b in tgt.basis(k + src.gen_degree(alpha)):
                        col = cols.get((alpha, b))
                        if col is None:
                            continue
                        for t, e in tgt.act(a, b).items():
                            vec_add(col, {(beta, t): coeff * e})
        self._cols[k] = cols
        return cols

    def d(self, lab):
        g = lab[0]
        k = self.target.label_degree(lab[1]) - self.source.gen_degree(g)
        return self._columns(k)[lab]

    def level(self, lab):
        return self.source.level(lab[0])

    def format_label(self, lab):
        g, b = lab
        fmt = getattr(self.target, "format_label", str)
        return f"[{self.source.format_gen(g)} ↦ {fmt(b)}]"


@dataclass
class ExtResult:
    """Per-degree Ext dimensions inside a window.  ``dims[k]`` is None where incomplete."""

    window: object
    cohomology: CohomologyResult
    certificate: str = "exact"
    complete: bool = True
    notes: list = field(default_factory=list)
    complex: object = None

    def dims(self) -> dict:
        return self.cohomology.dims()

    def dim(self, k):
        return self.cohomology.dim(k)

    def __getitem__(self, k) -> DegreeCohomology:
        return self.cohomology[k]

    def representatives(self, k):
        return self.cohomology[k].representatives


def ext_via_hom(N, M, window) -> ExtResult:
    """Ext_A(N, M) as the cohomology of Hom_A(N, M) for semifree N."""
    w = as_window(window)
    if isinstance(N, SemifreeModule) and isinstance(M, SemifreeModule) and N.base != M.base:
        raise ValueError("modules over different bases")
    if isinstance(M, ModuleTable) and isinstance(N, SemifreeModule) and M.base != N.base:
        raise ValueError("modules over different bases")
    H = HomComplex(N, M)
    coh = complex_cohomology(H, w)
    return ExtResult(w, coh, "exact" if coh.complete else "boundary-incomplete", coh.complete, [], H)


__all__ = ["HomComplex", "SemifreeSource", "ExtResult", "ext_via_hom", "as_source"]
