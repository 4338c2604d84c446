"""
Minimal models of semifree modules.

* :func:`minimize` cancels generator pairs joined by a unit coefficient.
* :func:`minimal_resolution` builds a minimal semifree module mapping
  quasi-isomorphically onto a windowed module table, degree by degree,
  by killing the cohomology of the mapping cone.
* :func:`split_postnikov` cuts a minimal module at a generator degree.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .cdga import UNIT, SemifreeCdga
from .exact import (
    ONE, EchelonBasis, GeneratedComplex, WindowError, as_window, complex_cohomology, vec_add,
)
from .modules import (
    ModGenerator, ModuleMorphism, ModuleTable, SemifreeModule, module_cohomology, sign,
    validate_module,
)


# ---------------------------------------------------------------------------
# minimize

@dataclass
class MinimizeResult:
    module: SemifreeModule
    projection: ModuleMorphism     # M -> Mmin
    section: ModuleMorphism        # Mmin -> M
    eliminated: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.module, (self.projection, self.section)))


def _apply_linear(A: SemifreeCdga, f: dict, vec: dict) -> dict:
    """Apply an A-linear degree-0 map given on generator names (identity elsewhere)."""
    out: dict = {}
    for (m, u), c in vec.items():
        img = f.get(u)
        if img is None:
            vec_add(out, {(m, u): c})
            continue
        for (b, x), e in img.items():
            t, mb = A.mul_monomials(m, b)
            if t:
                vec_add(out, {(mb, x): c * e * t})
    return out


def _triangular_order(names, degrees, diff, position):
    deps = {u: {x for (_m, x) in diff[u] if x != u} for u in names}
    for u in names:
        if any(x == u for (_m, x) in diff[u]):
            raise ValueError(f"generator {u} appears in its own differential")
    users: dict = {u: [] for u in names}
    for u, ds in deps.items():
        for x in ds:
            users[x].append(u)
    waiting = {u: len(ds) for u, ds in deps.items()}
    heap = [(degrees[u], position[u], u) for u in names if not waiting[u]]
    heapq.heapify(heap)
    order = []
    while heap:
        _, _, u = heapq.heappop(heap)
        order.append(u)
        for y in users[u]:
            waiting[y] -= 1
            if not waiting[y]:
                heapq.heappush(heap, (degrees[y], position[y], y))
    if len(order) != len(names):
        raise ValueError("reduced differential admits no triangular order")
    return order


def minimize(M: SemifreeModule) -> MinimizeResult:
    """Minimal model of a finitely generated semifree module.

    Repeatedly picks the first generator w (list order) whose differential
    has a unit coefficient c on some generator v, and cancels the pair.
    With dw = c·v + R the retraction sends v to -R/c and w to 0; the
    reduced differential is the retraction applied to d.
    """
    A = M.base
    if any(d < 1 for d in A.degrees):
        raise ValueError("minimize needs a connected base (generators of degree ≥ 1)")
    names = list(M.names)
    degrees = dict(zip(M.names, M.degrees))
    position = {n: i for i, n in enumerate(names)}
    diff = {M.names[i]: {(a, M.names[j]): c for (a, j), c in M.diffs[i].items()}
            for i in range(len(M))}
    proj = {n: {(UNIT, n): ONE} for n in names}
    sect = {n: {(UNIT, n): ONE} for n in names}
    eliminated = []
    while True:
        pair = None
        for w in names:
            units = [x for (a, x) in diff[w] if a == UNIT]
            if units:
                v = min(units, key=position.__getitem__)
                pair = (v, w)
                break
        if pair is None:
            break
        v, w = pair
        c = diff[w][(UNIT, v)]
        rest = {k: x for k, x in diff[w].items() if k != (UNIT, v)}
        step = {w: {}, v: {k: -x / c for k, x in rest.items()}}
        names = [n for n in names if n not in pair]
        sstep = {}
        for u in names:
            s = {(UNIT, u): ONE}
            for (a, x), e in diff[u].items():
                if x == v:
                    vec_add(s, {(a, w): -sign(A.degree(a)) * e / c})
            sstep[u] = s
        diff = {u: _apply_linear(A, step, diff[u]) for u in names}
        proj = {g: _apply_linear(A, step, im) for g, im in proj.items()}
        sect = {u: _apply_linear(A, sect, sstep[u]) for u in names}
        eliminated.append(pair)
    order = _triangular_order(names, degrees, diff, position)
    idx = {n: i for i, n in enumerate(order)}
    gens = [ModGenerator(n, degrees[n]) for n in order]
    diffs = [{(a, idx[x]): c for (a, x), c in diff[n].items()} for n in order]
    Mmin = SemifreeModule(A, gens, diffs, M.name)
    p = ModuleMorphism(M, Mmin, [{(a, idx[x]): c for (a, x), c in proj[n].items()} for n in M.names])
    s = ModuleMorphism(Mmin, M, [{(a, M.index(x)): c for (a, x), c in sect[n].items()} for n in order])
    return MinimizeResult(Mmin, p, s, eliminated)


# ---------------------------------------------------------------------------
# minimal resolutions

class _Cone(GeneratedComplex):
    """Cone of φ: R -> T, Cone^k = R^{k+1} ⊕ T^k, d(r, t) = (-dr, φ(r) + dt)."""

    def __init__(self, R: SemifreeModule, T, images):
        self.R = R
        self.T = T
        self.phi = ModuleMorphism(R, T, images)

    def known(self, k):
        return self.T.known(k)

    def basis(self, k):
        return [("T", t) for t in self.T.basis(k)] + [("R", r) for r in self.R.basis(k + 1)]

    def d(self, lab):
        side, x = lab
        if side == "T":
            return {("T", t): c for t, c in self.T.d(x).items()}
        out = {("R", r): -c for r, c in self.R.d(x).items()}
        out.update({("T", t): c for t, c in self.phi.on_label(x).items()})
        return out


@dataclass
class ResolutionResult:
    module: SemifreeModule
    comparison: ModuleMorphism          # R -> T
    complete: bool
    offending_degree: int | None = None
    reason: str | None = None
    passes: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.module, self.comparison, self.complete))


def minimal_resolution(A: SemifreeCdga, T: ModuleTable, window, max_generators_per_degree: int = 64,
                       max_rounds: int = 256, prefix: str = "v") -> ResolutionResult:
    """Minimal semifree R with a quasi-isomorphism R -> T through ``window``.

    Degrees are processed upward.  In degree k the classes of H^k(Cone) are
    killed by new degree-k generators; this repeats until H^k(Cone) = 0.
    The first pass in a degree is free, every further pass counts as a
    round.  When a cap trips the result is flagged incomplete.
    """
    if not isinstance(A, SemifreeCdga):
        raise TypeError("minimal_resolution needs a SemifreeCdga base")
    if T.base != A:
        raise ValueError("table is not a module over the given algebra")
    w = as_window(window)
    if getattr(T, "open_below", False):
        raise WindowError("table is open below; resolution needs bounded-below data")
    if not T.known(w.hi + 1):
        raise WindowError(f"table data is needed up to degree {w.hi + 1}")
    gens: list[ModGenerator] = []
    diffs: list[dict] = []
    images: list[dict] = []
    R = SemifreeModule(A, gens, diffs, name="R")
    start = T.min_degree
    passes: dict = {}
    if start is None or start > w.hi:
        return ResolutionResult(R, ModuleMorphism(R, T, []), True, passes=passes)
    for k in range(min(start, w.lo), w.hi + 1):
        p = 0
        per_degree = 0
        while True:
            cone = _Cone(R, T, images)
            hk = complex_cohomology(cone, (k, k))[k]
            if hk.dim is None:
                raise WindowError(f"cone cohomology in degree {k} is not determined by the table")
            if hk.dim == 0:
                break
            if p > max_rounds:
                return ResolutionResult(R, ModuleMorphism(R, T, images), False, k, "max_rounds", passes)
            if per_degree + hk.dim > max_generators_per_degree:
                return ResolutionResult(R, ModuleMorphism(R, T, images), False, k,
                                        "max_generators_per_degree", passes)
            order = {lab: i for i, lab in enumerate(cone.basis(k))}
            for z in hk.representatives:
                first = min(z, key=order.__getitem__)
                scale = ONE / (z[first] if first[0] == "T" else -z[first])
                dv = {}
                phi = {}
                for (side, x), c in z.items():
                    if side == "R":
                        dv[x] = -c * scale
                    else:
                        phi[x] = c * scale
                gens.append(ModGenerator(f"{prefix}{len(gens)}", k))
                diffs.append(dv)
                images.append(phi)
            per_degree += hk.dim
            R = SemifreeModule(A, gens, diffs, name="R")
            p += 1
        passes[k] = p
    return ResolutionResult(R, ModuleMorphism(R, T, images), True, passes=passes)


# ---------------------------------------------------------------------------
# Postnikov splitting

def _restrict(M: SemifreeModule, keep, drop_others: bool, name=None) -> SemifreeModule:
    keep = [i for i in range(len(M)) if i in keep]
    new = {old: j for j, old in enumerate(keep)}
    diffs = []
    for i in keep:
        d = {}
        for (a, j), c in M.diffs[i].items():
            if j in new:
                d[(a, new[j])] = c
            elif not drop_others:
                raise ValueError(f"differential of {M.names[i]} leaves the submodule")
        diffs.append(d)
    return SemifreeModule(M.base, [M.generators[i] for i in keep], diffs, name)


def _rank(vectors) -> int:
    eb = EchelonBasis()
    return sum(1 for v in vectors if eb.add(v) is not None)


@dataclass
class PostnikovSplit:
    module: SemifreeModule
    k: int
    sub: SemifreeModule          # A⊗V^{≤k}
    quot: SemifreeModule         # A⊗V^{≥k+1}
    slice: SemifreeModule        # A⊗V^{=k}
    inclusion: ModuleMorphism    # sub -> M
    projection: ModuleMorphism   # M -> quot
    slice_projection: ModuleMorphism  # sub -> slice

    def __iter__(self):
        return iter((self.sub, self.quot, self.slice, (self.inclusion, self.projection)))

    def les_ranks(self, window) -> dict:
        """Ranks of i^j, p^j and the connecting map δ^j together with the
        cohomology dimensions of sub, M and quot."""
        w = as_window(window)
        ww = (w.lo - 1, w.hi + 1)
        Hs = module_cohomology(self.sub, ww)
        Hm = module_cohomology(self.module, ww)
        Hq = module_cohomology(self.quot, ww)
        M, Q, S = self.module, self.quot, self.sub
        q_to_m = {j: M.index(n) for j, n in enumerate(Q.names)}
        m_to_s = {M.index(n): j for j, n in enumerate(S.names)}
        out = {}
        for j in range(w.lo - 1, w.hi + 1):
            ri = _rank(Hm[j].classify(self.inclusion.apply(z)) for z in Hs[j].representatives)
            rp = _rank(Hq[j].classify(self.projection.apply(z)) for z in Hm[j].representatives)
            deltas = []
            for z in Hq[j].representatives:
                lift = {(m, q_to_m[i]): c for (m, i), c in z.items()}
                dz = {}
                for lab, c in lift.items():
                    vec_add(dz, M.d(lab), c)
                bz = {(m, m_to_s[i]): c for (m, i), c in dz.items()}
                deltas.append(Hs[j + 1].classify(bz))
            out[j] = {"sub": Hs[j].dim, "module": Hm[j].dim, "quot": Hq[j].dim,
                      "i": ri, "p": rp, "delta": _rank(deltas)}
        return out

    def check_exactness(self, window) -> list[str]:
        """Long exact sequence rank identities on every degree of ``window``."""
        r = self.les_ranks(window)
        problems = []
        for j in as_window(window):
            if r[j]["sub"] != r[j - 1]["delta"] + r[j]["i"]:
                problems.append(f"exactness fails at H^{j}(sub)")
            if r[j]["module"] != r[j]["i"] + r[j]["p"]:
                problems.append(f"exactness fails at H^{j}(M)")
            if r[j]["quot"] != r[j]["p"] + r[j]["delta"]:
                problems.append(f"exactness fails at H^{j}(quot)")
        return problems


def split_postnikov(M: SemifreeModule, k: int) -> PostnikovSplit:
    """Split a minimal module at generator degree k.

    ``sub`` keeps the generators of degree ≤ k (a submodule by minimality),
    ``quot`` the generators of degree ≥ k+1 with coefficients on dropped
    generators deleted, and ``slice`` the generators of degree exactly k.
    The connective cover at 0 is ``quot`` for k = -1.
    """
    rep = validate_module(M)
    if not rep.minimal:
        raise ValueError("split_postnikov needs a minimal module")
    low = {i for i, d in enumerate(M.degrees) if d <= k}
    high = {i for i, d in enumerate(M.degrees) if d > k}
    mid = {i for i, d in enumerate(M.degrees) if d == k}
    base = M.name or "M"
    sub = _restrict(M, low, False, f"{base}≤{k}")
    quot = _restrict(M, high, True, f"{base}≥{k + 1}")
    sl = _restrict(M, mid, True, f"{base}={k}")
    inc = ModuleMorphism(sub, M, [{(UNIT, M.index(n)): ONE} for n in sub.names])
    qpos = {n: j for j, n in enumerate(quot.names)}
    proj = ModuleMorphism(M, quot, [{(UNIT, qpos[n]): ONE} if n in qpos else {} for n in M.names])
    spos = {n: j for j, n in enumerate(sl.names)}
    sproj = ModuleMorphism(sub, sl, [{(UNIT, spos[n]): ONE} if n in spos else {} for n in sub.names])
    return PostnikovSplit(M, k, sub, quot, sl, inc, proj, sproj)


__all__ = [
    "minimize", "MinimizeResult", "minimal_resolution", "ResolutionResult",
    "split_postnikov", "PostnikovSplit",
]
