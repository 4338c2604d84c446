"""
Normalized two-sided bar constructions.

B(A;A;N) is the free A-module on words [a_1|...|a_s]n with a_i running over
a basis of the augmentation ideal and n over a basis of N.  Its generator
degree is Σ|a_i| - s + |n|.  With ε_i = |m| + Σ_{j<i}(|a_j| - 1) the
differential on m[a_1|...|a_s]n is

    dm[..]n - Σ (-1)^{ε_i} m[..|da_i|..]n + (-1)^{ε_{s+1}} m[..]dn
    + (-1)^{|m|} m a_1[a_2|..]n + Σ_{i≥2} (-1)^{ε_i} m[..|a_{i-1}a_i|..]n
    - (-1)^{ε_s} m[a_1|..|a_{s-1}](a_s n)

Words longer than a cap L are dropped; this is a subcomplex (the L-th
skeleton).  When A is simply connected every middle entry lowers nothing
below |a| - 1 ≥ 1, so long words live in high degrees and a certificate
decides whether the cap can influence a requested window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .cdga import GradedAlgebraTable, SemifreeCdga, cohomology_algebra
from .exact import (
    ONE, EchelonBasis, GeneratedComplex, WindowError, as_window, complex_cohomology,
    image_and_kernel, vec_add,
)
from .hom import ExtResult, HomComplex
from .modules import ModuleTable, SemifreeModule, module_cohomology, sign, truncate_above


def _alg_min_degree(A):
    return A.min_positive_degree


def _simply_connected(A) -> bool:
    return bool(A.is_simply_connected)


class BarResolution(GeneratedComplex):
    """B_{≤L}(A;A;N) as a free A-module (free-source protocol) and as a complex."""

    def __init__(self, A, N, L: int):
        if isinstance(N, (SemifreeModule, ModuleTable)) and N.base != A:
            raise ValueError("module is not over the given algebra")
        if L < 0:
            raise ValueError("length cap must be ≥ 0")
        self.A = A
        self.base = A
        self.N = N
        self.L = L
        self.N_lo = N.min_degree
        if isinstance(N, ModuleTable) and N.open_below:
            raise WindowError("bar construction needs N bounded below")
        self.m_min = _alg_min_degree(A)
        self._gens: dict = {}
        self._dgen: dict = {}
        self._words = lru_cache(maxsize=None)(self._words_uncached)

    # -- word enumeration -------------------------------------------------------
    def _words_uncached(self, s: int, total: int) -> tuple:
        """Words of s augmentation-ideal basis elements with degrees summing to total."""
        if s == 0:
            return ((),) if total == 0 else ()
        m = self.m_min
        if m is None or total < s * m:
            return ()
        out = []
        for d1 in range(m, total - (s - 1) * m + 1):
            first = self.A.positive_basis(d1)
            if not first:
                continue
            rest = self._words(s - 1, total - d1)
            out.extend((a,) + r for a in first for r in rest)
        return tuple(out)

    def gens_in_degree(self, d):
        hit = self._gens.get(d)
        if hit is not None:
            return hit
        out = []
        if self.N_lo is not None:
            for s in range(0, self.L + 1):
                if s and self.m_min is None:
                    break
                step = (self.m_min - 1) * s if s else 0
                for e in range(self.N_lo, d - step + 1):
                    if not self.N.known(e):
                        raise WindowError(f"module data in degree {e} is needed for bar degree {d}")
                    nb = self.N.basis(e)
                    if not nb:
                        continue
                    for word in self._words(s, d + s - e):
                        out.extend((word, n) for n in nb)
        self._gens[d] = out
        return out

    def gen_degree(self, g):
        word, n = g
        return sum(self.A.label_degree(a) for a in word) - len(word) + self.N.label_degree(n)

    def degree_bounds(self):
        if self.N_lo is None:
            return (0, -1)
        return (self.N_lo, None)

    def alg_degree(self, a):
        return self.A.label_degree(a)

    def level(self, g):
        return len(g[0])

    def format_gen(self, g):
        word, n = g
        fa = getattr(self.A, "format_monomial", str)
        fn = getattr(self.N, "format_label", str)
        return "[" + "|".join(fa(a) for a in word) + "]" + fn(n)

    def dgen(self, g) -> dict:
        hit = self._dgen.get(g)
        if hit is not None:
            return hit
        A, N = self.A, self.N
        unit = A.unit
        word, n = g
        s = len(word)
        eps = [0]
        for a in word:
            eps.append(eps[-1] + A.label_degree(a) - 1)
        # eps[i - 1] is ε_i for i = 1..s+1
        out: dict = {}
        for i, a in enumerate(word):
            for t, c in A.d_label(a).items():
                vec_add(out, {(unit, (word[:i] + (t,) + word[i + 1:], n)): c}, -sign(eps[i]))
        for t, c in N.d(n).items():
            vec_add(out, {(unit, (word, t)): c}, sign(eps[s]))
        if s:
            vec_add(out, {(word[0], (word[1:], n)): ONE})
            for i in range(1, s):
                for t, c in A.mul(word[i - 1], word[i]).items():
                    vec_add(out, {(unit, (word[:i - 1] + (t,) + word[i + 1:], n)): c}, sign(eps[i]))
            for t, c in N.act(word[-1], n).items():
                vec_add(out, {(unit, (word[:-1], t)): c}, -sign(eps[s - 1]))
        self._dgen[g] = out
        return out

    # -- as a complex of A-modules ------------------------------------------------
    def basis(self, k):
        out = []
        lo = self.N_lo
        if lo is None:
            return out
        for gd in range(lo, k + 1):
            ab = self.A.basis(k - gd)
            if not ab:
                continue
            gens = self.gens_in_degree(gd)
            out.extend((a, g) for a in ab for g in gens)
        return out

    def label_degree(self, lab):
        return self.A.label_degree(lab[0]) + self.gen_degree(lab[1])

    def act(self, a, lab):
        m, g = lab
        return {(t, g): c for t, c in self.A.mul(a, m).items()}

    def d(self, lab) -> dict:
        m, g = lab
        out: dict = {}
        for t, c in self.A.d_label(m).items():
            vec_add(out, {(t, g): c})
        s = sign(self.A.label_degree(m))
        for (a, h), c in self.dgen(g).items():
            for t, e in self.A.mul(m, a).items():
                vec_add(out, {(t, h): c * e}, s)
        return out

    def augmentation(self, v: dict) -> dict:
        """ε: B -> N on a label vector; words of positive length go to zero."""
        out: dict = {}
        for (m, (word, n)), c in v.items():
            if not word:
                vec_add(out, self.N.act(m, n), c)
        return out

    # -- certificates -------------------------------------------------------------
    def missing_degree(self):
        """Lowest generator degree of a dropped word (None when nothing is dropped)."""
        if self.m_min is None or self.N_lo is None:
            return None
        return self.N_lo + (self.L + 1) * (self.m_min - 1)

    def certificate(self, needed_below: int) -> tuple[bool, str]:
        """Whether dropped words all have generator degree > ``needed_below``."""
        miss = self.missing_degree()
        if miss is None:
            return True, "complete: no words are dropped"
        if not _simply_connected(self.A):
            return False, "capped: possibly incomplete (base is not simply connected)"
        if miss > needed_below:
            return True, f"complete: words of length > {self.L} start in degree {miss}"
        return False, f"capped: possibly incomplete (words of length > {self.L} reach degree {miss})"


def bar_resolution(A, N, L: int, window, strict: bool = False) -> "BarWindow":
    """B_{≤L}(A;A;N) with its augmentation to N and a certificate for ``window``."""
    w = as_window(window)
    B = BarResolution(A, N, L)
    ok, why = B.certificate(w.hi + 1)
    if strict and not ok:
        raise WindowError(f"length cap {L} is not certified for window {w}: {why}")
    return BarWindow(B, w, ok, why)


@dataclass
class BarWindow:
    resolution: BarResolution
    window: object
    complete: bool
    certificate: str

    def cohomology(self):
        return complex_cohomology(self.resolution, self.window)

    def required_length(self) -> int | None:
        return required_length(self.resolution.A, self.resolution.N_lo, self.window.hi + 1)


def required_length(A, low: int | None, needed_below: int) -> int | None:
    """Smallest L with low + (L+1)(m_min - 1) > needed_below, or None if none exists."""
    m = _alg_min_degree(A)
    if m is None or low is None:
        return 0
    if not _simply_connected(A):
        return None
    L = 0
    while low + (L + 1) * (m - 1) <= needed_below:
        L += 1
    return L


# ---------------------------------------------------------------------------

class TensorWithFree(GeneratedComplex):
    """M ⊗_A F for a free source F = A⊗X, realised as M ⊗ X over Q.

    d(m⊗x) = dm⊗x + (-1)^{|m|} Σ c (m·a)⊗x' for dx = Σ c a·x', with the right
    action m·a = (-1)^{|m||a|} a·m.
    """

    def __init__(self, M, F):
        self.M = M
        self.F = F
        if isinstance(M, ModuleTable) and M.open_below:
            raise WindowError("tensor needs M bounded below")

    def known(self, k):
        lo = self.M.min_degree
        if lo is None:
            return True
        f_lo = self.F.degree_bounds()[0]
        return all(self.M.known(e) for e in range(lo, k - f_lo + 1))

    def basis(self, k):
        lo = self.M.min_degree
        out = []
        if lo is None:
            return out
        f_lo, f_hi = self.F.degree_bounds()
        for e in range(lo, k - f_lo + 1):
            mb = self.M.basis(e)
            if not mb:
                continue
            gens = self.F.gens_in_degree(k - e)
            out.extend((m, x) for m in mb for x in gens)
        return out

    def d(self, lab):
        m, x = lab
        out: dict = {}
        for t, c in self.M.d(m).items():
            vec_add(out, {(t, x): c})
        md = self.M.label_degree(m)
        for (a, y), c in self.F.dgen(x).items():
            s = sign(md) * sign(md * self.F.alg_degree(a))
            for t, e in self.M.act(a, m).items():
                vec_add(out, {(t, y): c * e}, s)
        return out

    def level(self, lab):
        return self.F.level(lab[1])


@dataclass
class TorResult:
    window: object
    cohomology: object
    complete: bool
    certificate: str
    by_length: dict = field(default_factory=dict)

    def dims(self):
        return self.cohomology.dims()

    def dim(self, k):
        return self.cohomology.dim(k)


def _as_module(A, X):
    if isinstance(X, SemifreeCdga):
        return SemifreeModule.unit(X, 0, "1")
    return X


def derived_tensor_tor(M, N, L: int, window) -> TorResult:
    """Tor_A(M, N) = H(B(M;A;N)) on ``window`` with a word-length certificate."""
    w = as_window(window)
    A = N.base
    M = _as_module(A, M)
    B = BarResolution(A, N, L)
    C = TensorWithFree(M, B)
    m_lo = M.min_degree
    miss = B.missing_degree()
    if miss is None:
        ok, why = True, "complete: no words are dropped"
    else:
        ok, why = B.certificate(w.hi + 1 - (m_lo or 0))
    coh = complex_cohomology(C, w)
    by_length: dict = {}
    for k in w:
        for lab in C.basis(k):
            key = (C.level(lab), k)
            by_length[key] = by_length.get(key, 0) + 1
    return TorResult(w, coh, ok and coh.complete, why, by_length)


def ext_via_bar(N, M, L: int, window, target_top: int | None = None) -> ExtResult:
    """Ext_A(N, M) = H[B(A;A;N), M]_A on ``window``.

    M must be bounded above.  A SemifreeModule target is first replaced by
    its truncation at ``target_top``, which is quasi-isomorphic when
    H^{>target_top}(M) = 0.
    """
    w = as_window(window)
    A = N.base if not isinstance(N, SemifreeCdga) else N
    N = _as_module(A, N)
    notes = []
    if isinstance(M, SemifreeCdga):
        M = SemifreeModule.unit(M, 0, "1")
    if isinstance(M, SemifreeModule):
        if target_top is None:
            raise WindowError("a semifree target needs target_top (its cohomology must vanish above it)")
        M = truncate_above(M, target_top)
        notes.append(f"target truncated above degree {target_top}")
    if M.open_above:
        raise WindowError("ext_via_bar needs a target bounded above")
    top = M.max_degree
    B = BarResolution(A, N, L)
    if top is None:
        ok, why = True, "complete: target is zero"
    else:
        ok, why = B.certificate(top - (w.lo - 1))
    H = HomComplex(B, M)
    coh = complex_cohomology(H, w)
    return ExtResult(w, coh, why, ok and coh.complete, notes, H)


# ---------------------------------------------------------------------------
# modules over cohomology algebras

def cohomology_module_table(M, H: GradedAlgebraTable, window, name=None) -> ModuleTable:
    """H(M) as a module over H = cohomology_algebra(A) on ``window``.

    Classes are labelled ``m{k}_{i}``; a class h acts through products of
    representatives, re-classified in H(M).
    """
    w = as_window(window)
    HM = module_cohomology(M, w)
    basis = {}
    reps = {}
    for k in w:
        h = HM[k]
        if h.dim is None:
            raise WindowError(f"H^{k}(M) is not determined on this window")
        labs = [f"m{k}_{i}" for i in range(h.dim)]
        basis[k] = labs
        for lab, z in zip(labs, h.representatives):
            reps[lab] = z
    action = {}
    for k in w:
        for lab in basis[k]:
            z = reps[lab]
            for j in range(1, w.hi - k + 1):
                for a in H.positive_basis(j):
                    rep = H.representatives[a]
                    out: dict = {}
                    for mon, c in rep.terms.items():
                        for x, e in z.items():
                            vec_add(out, M.act(mon, x), c * e)
                    coords = HM[k + j].classify(out) if out else {}
                    vec = {basis[k + j][i]: c for i, c in coords.items() if c}
                    if vec:
                        action[(a, lab)] = vec
    lo_closed = M.min_degree is not None and M.min_degree >= w.lo
    hi_closed = isinstance(M, ModuleTable) and not M.open_above and (
        M.max_degree is None or M.max_degree <= w.hi)
    return ModuleTable(H, w, basis, {}, action, open_below=not lo_closed,
                       open_above=not hi_closed, name=name or f"H({getattr(M, 'name', None) or 'M'})")


@dataclass
class BigradedExt:
    """Ext over a graded algebra, bigraded by (word length p, total degree n)."""

    dims: dict
    complete: bool
    certificate: str

    def total(self, n):
        return sum(v for (p, k), v in self.dims.items() if k == n)


def graded_algebra_bar(H, hN: ModuleTable, hM: ModuleTable, L: int, window) -> BigradedExt:
    """Bigraded Ext_H(hN, hM) through the bar construction over H.

    H has zero differential, so the hom complex splits by word length and
    its differential raises the length by one.  Entries with p ≤ L are
    reported; the complex is built to length L+1.
    """
    w = as_window(window)
    if hM.open_above:
        raise WindowError("target table must be bounded above")
    B = BarResolution(H, hN, L + 1)
    C = HomComplex(B, hM)
    dims: dict = {}
    for n in w:
        for nn in (n - 1, n, n + 1):
            if not C.known(nn):
                raise WindowError(f"hom complex degree {nn} is not determined")
        prev = C.basis(n - 1)
        cur = C.basis(n)
        nxt_index = {lab: i for i, lab in enumerate(C.basis(n + 1))}
        for p in range(0, L + 1):
            cur_p = [lab for lab in cur if C.level(lab) == p]
            if not cur_p:
                continue
            cur_index = {lab: i for i, lab in enumerate(cur_p)}
            cols = [{nxt_index[t]: c for t, c in C.d(lab).items()} for lab in cur_p]
            _, ker = image_and_kernel(cols)
            bnd = EchelonBasis()
            for lab in prev:
                if C.level(lab) != p - 1:
                    continue
                col = {cur_index[t]: c for t, c in C.d(lab).items() if t in cur_index}
                bnd.add(col)
            dims[(p, n)] = len(ker) - len(bnd)
    top = hM.max_degree
    ok, why = B.certificate(top - (w.lo - 1)) if top is not None else (True, "complete: target is zero")
    # the reported lengths stop at L; a complete certificate for L+1 means nothing beyond is missed
    return BigradedExt({k: v for k, v in dims.items() if v}, ok, why)


def cohomology_tables(A: SemifreeCdga, N, M, window, hi: int):
    """(H(A), H(N), H(M)) as tables over H(A) with algebra data through degree ``hi``."""
    H = cohomology_algebra(A, (0, hi))
    hN = cohomology_module_table(N, H, (min(window.lo, N.min_degree or 0), hi))
    hM = cohomology_module_table(M, H, (min(window.lo, M.min_degree or 0), hi))
    return H, hN, hM


__all__ = [
    "BarResolution", "bar_resolution", "BarWindow", "required_length", "TensorWithFree",
    "TorResult", "derived_tensor_tor", "ext_via_bar", "cohomology_module_table",
    "graded_algebra_bar", "BigradedExt",
]
