"""
Spectral sequences of filtered cochain complexes.

Filtrations are decreasing: F^p is spanned by the basis elements of level
≥ p and d(F^p) ⊆ F^p.  Entries are indexed by (p, n) with p the filtration
level and n the total degree, so d_r: E_r^{p,n} -> E_r^{p+r,n+1}.  The
complementary degree is q = n - p; :meth:`SSPage.by_complementary` gives
the (p, q) view, in which d_r goes (p, q) -> (p+r, q-r+1).

Pages use the usual formulas

    Z_r^p = {x ∈ F^p : dx ∈ F^{p+r}},
    E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exact import (
    EchelonBasis, WindowError, as_window, complex_cohomology, image_and_kernel, vec_add,
    CochainComplexWindow,
)


class FilteredComplexWindow:
    """A generated complex with a level per basis label, examined on a window."""

    def __init__(self, complex_, level, window, check: bool = True):
        self.complex = complex_
        self.level = level if callable(level) else level.__getitem__
        self.window = as_window(window)
        self._data: dict = {}
        if check:
            for n in range(self.window.lo - 1, self.window.hi + 2):
                if not self.known(n) or not self.known(n + 1):
                    continue
                for lab in self.basis(n):
                    p = self.level(lab)
                    for t in complex_.d(lab):
                        if self.level(t) < p:
                            raise ValueError(f"d does not respect the filtration at {lab!r}")

    @classmethod
    def from_window(cls, c: CochainComplexWindow, levels) -> "FilteredComplexWindow":
        return cls(_WindowAdapter(c), levels, c.window)

    def known(self, n):
        return self.complex.known(n)

    def basis(self, n):
        d = self._data.get(n)
        if d is None:
            labs = list(self.complex.basis(n))
            d = (labs, {lab: i for i, lab in enumerate(labs)}, [self.level(l) for l in labs])
            self._data[n] = d
        return d[0]

    def index(self, n):
        self.basis(n)
        return self._data[n][1]

    def levels(self, n):
        self.basis(n)
        return self._data[n][2]

    def dvec(self, n, vec: dict) -> dict:
        """d of a coordinate vector in degree n, as coordinates in degree n+1."""
        labs = self.basis(n)
        idx = self.index(n + 1)
        out: dict = {}
        for i, c in vec.items():
            for t, e in self.complex.d(labs[i]).items():
                vec_add(out, {idx[t]: c * e})
        return out


class _WindowAdapter:
    def __init__(self, c: CochainComplexWindow):
        self.c = c
        self._cols = {k: m.columns() for k, m in c.differentials.items()}

    def known(self, k):
        return k in self.c.window

    def basis(self, k):
        return list(self.c.basis(k))

    def d(self, lab):
        for k in self.c.window:
            basis = self.c.basis(k)
            if lab in basis:
                if k == self.c.window.hi:
                    return {}
                nb = self.c.basis(k + 1)
                return {nb[i]: v for i, v in self._cols[k][basis.index(lab)].items()}
        raise KeyError(lab)


@dataclass
class SSPage:
    r: int
    entries: dict                       # (p, n) -> dim
    bases: dict = field(default_factory=dict, repr=False)
    differentials: dict = field(default_factory=dict, repr=False)   # (p, n) -> list of coord dicts

    def dim(self, p, n):
        return self.entries.get((p, n), 0)

    def total(self, n):
        return sum(v for (p, k), v in self.entries.items() if k == n)

    def nonzero(self):
        return {k: v for k, v in self.entries.items() if v}

    def by_complementary(self):
        return {(p, n - p): v for (p, n), v in self.entries.items() if v}


class _Engine:
    def __init__(self, f: FilteredComplexWindow):
        self.f = f
        self._z: dict = {}

    def levels_range(self, n):
        lv = self.f.levels(n)
        return (min(lv), max(lv)) if lv else (0, -1)

    def Z(self, n, p, target):
        """Vectors x ∈ F^p C^n with dx ∈ F^target (target None: dx = 0), as coordinate dicts."""
        key = (n, p, target)
        hit = self._z.get(key)
        if hit is not None:
            return hit
        lv = self.f.levels(n)
        pos = [i for i, l in enumerate(lv) if l >= p]
        if not self.f.known(n + 1):
            raise WindowError(f"degree {n + 1} is not known")
        lv1 = self.f.levels(n + 1)
        cols = []
        for i in pos:
            dx = self.f.dvec(n, {i: 1})
            cols.append({j: c for j, c in dx.items() if target is None or lv1[j] < target})
        _, ker = image_and_kernel(cols)
        out = [{pos[j]: c for j, c in v.items()} for v in ker]
        self._z[key] = out
        return out

    def entry(self, n, p, r):
        """(reps, classifier) for E_r^{p,n}; r None means E_∞."""
        if r is None:
            num = self.Z(n, p, None)
            den = list(self.Z(n, p + 1, None))
            lo, _ = self.levels_range(n - 1)
            den += [self.f.dvec(n - 1, y) for y in self.Z(n - 1, min(lo, p), p)]
        else:
            num = self.Z(n, p, p + r)
            den = list(self.Z(n, p + 1, p + r))
            den += [self.f.dvec(n - 1, y) for y in self.Z(n - 1, p - r + 1, p)]
        cls = EchelonBasis()
        for v in den:
            cls.add(v)
        reps = []
        for z in num:
            if cls.add(z, {len(reps): 1}) is not None:
                reps.append(z)
        return reps, cls


def _classify(cls: EchelonBasis, v: dict) -> dict:
    res, tag = cls.reduce(v)
    if res:
        raise ArithmeticError("vector does not lie in the expected filtration stage")
    return {k: c for k, c in tag.items() if c}


def _rank(cols) -> int:
    eb = EchelonBasis()
    return sum(1 for v in cols if v and eb.add(v) is not None)


@dataclass
class SpectralSequence:
    filtered: FilteredComplexWindow
    pages: list
    einf: dict
    degrees: list
    stabilization: int | None

    def page(self, r) -> SSPage:
        return self.pages[r - 1]

    def einf_totals(self):
        return {n: sum(v for (p, k), v in self.einf.items() if k == n) for n in self.degrees}


def compute_pages(f: FilteredComplexWindow, r_max: int, check: bool = True) -> SpectralSequence:
    """Pages E_1 .. E_{r_max} and E_∞ for every total degree of the window.

    With ``check`` each page's differential is verified to square to zero
    and E_{r+1} is verified to be the cohomology of (E_r, d_r).
    """
    w = f.window
    eng = _Engine(f)
    degrees = [n for n in range(w.lo, w.hi + 1)
               if f.known(n - 1) and f.known(n) and f.known(n + 1)]
    # degree n+1 entries are needed as targets of d_r
    ext = [n for n in range(w.lo - 1, w.hi + 2) if f.known(n - 1) and f.known(n) and f.known(n + 1)]
    plevels = {}
    for n in ext:
        lo = min([eng.levels_range(m)[0] for m in (n - 1, n, n + 1) if f.levels(m)] or [0])
        hi = max([eng.levels_range(m)[1] for m in (n - 1, n, n + 1) if f.levels(m)] or [-1])
        plevels[n] = range(lo, hi + 1)
    pages = []
    for r in range(1, r_max + 1):
        entries, bases, classifiers, diffs = {}, {}, {}, {}
        for n in ext:
            for p in plevels[n]:
                reps, cls = eng.entry(n, p, r)
                entries[(p, n)] = len(reps)
                bases[(p, n)] = reps
                classifiers[(p, n)] = cls
        for (p, n), reps in bases.items():
            tgt = (p + r, n + 1)
            if tgt in classifiers:
                diffs[(p, n)] = [_classify(classifiers[tgt], f.dvec(n, z)) for z in reps]
            elif n + 1 in plevels:
                # target level outside every basis: the image must vanish
                diffs[(p, n)] = [{} for _ in reps]
        pages.append(SSPage(r, entries, bases, diffs))
    if check:
        _check_pages(pages, set(ext))
    einf = {}
    for n in degrees:
        for p in plevels[n]:
            reps, _ = eng.entry(n, p, None)
            einf[(p, n)] = len(reps)
    stab = None
    for pg in pages:
        if all(pg.dim(p, n) == einf[(p, n)] for (p, n) in einf):
            stab = pg.r
            break
    return SpectralSequence(f, pages, einf, degrees, stab)


def _check_pages(pages, computed):
    for i, pg in enumerate(pages):
        r = pg.r
        for (p, n), mat in pg.differentials.items():
            nxt = pg.differentials.get((p + r, n + 1))
            if nxt is None:
                continue
            for col in mat:
                acc: dict = {}
                for j, c in col.items():
                    vec_add(acc, nxt[j], c)
                if acc:
                    raise ArithmeticError(f"d_{r} ∘ d_{r} ≠ 0 at ({p}, {n})")
        if i + 1 >= len(pages):
            continue
        nxt_page = pages[i + 1]
        for (p, n), dim in pg.entries.items():
            if n - 1 not in computed or n + 1 not in computed:
                continue
            out = pg.differentials.get((p, n))
            inc = pg.differentials.get((p - r, n - 1))
            if out is None:
                continue
            rk_out = _rank(out)
            rk_in = _rank(inc) if inc else 0
            if dim - rk_out - rk_in != nxt_page.dim(p, n):
                raise ArithmeticError(f"E_{r + 1} ≠ H(E_{r}) at ({p}, {n})")


@dataclass
class ConvergenceReport:
    einf_totals: dict
    target_dims: dict
    stabilization_page: int | None
    agrees: bool
    complete: bool
    flags: list = field(default_factory=list)
    e1_mismatches: list = field(default_factory=list)
    e2_mismatches: list = field(default_factory=list)


# ---------------------------------------------------------------------------

def _conv(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return out


def bracket_e1(hbar: dict, hN: dict, hM: dict, p: int, n: int) -> int:
    """dim [H(Ā)^{⊗p} ⊗ H(N), H(M)]^{n-p} from dimension tables."""
    src = dict(hN)
    for _ in range(p):
        src = _conv(src, hbar)
    return sum(x * hM.get(j + n - p, 0) for j, x in src.items())


def hyper_ext_ss(A, N, M, L: int, window, r_max: int = 6, target_top: int | None = None):
    """Word-length filtration of [B(A;A;N), M]_A.

    Returns (spectral sequence, report).  The report compares E_∞ totals with
    the direct cohomology, checks E_1 against the bracket formula and E_2
    against the bar construction over H(A).
    """
    from .bar import BarResolution, cohomology_module_table, graded_algebra_bar
    from .cdga import SemifreeCdga, cdga_cohomology, cohomology_algebra
    from .hom import HomComplex
    from .modules import ModuleTable, SemifreeModule, module_cohomology, truncate_above

    w = as_window(window)
    flags = []
    if isinstance(N, SemifreeCdga):
        N = SemifreeModule.unit(N, 0, "1")
    if isinstance(M, SemifreeCdga):
        M = SemifreeModule.unit(M, 0, "1")
    if isinstance(M, SemifreeModule):
        if target_top is None:
            raise WindowError("a semifree target needs target_top")
        M = truncate_above(M, target_top)
        flags.append(f"target truncated above degree {target_top}")
    if M.open_above:
        raise WindowError("hyper-Ext spectral sequence needs a target bounded above")
    if not A.is_simply_connected:
        flags.append("base is not simply connected: convergence is not certified")
    B = BarResolution(A, N, L)
    top = M.max_degree if M.max_degree is not None else 0
    ok, why = B.certificate(top - (w.lo - 1))
    flags.append(why)
    C = HomComplex(B, M)
    f = FilteredComplexWindow(C, C.level, w)
    ss = compute_pages(f, r_max)
    direct = complex_cohomology(C, w).dims()
    totals = ss.einf_totals()
    agrees = all(totals.get(n) == direct.get(n) for n in ss.degrees)

    # E_1 against dimension tables
    n_lo = N.min_degree or 0
    need_hi = top - (w.lo - 1) + L + 2 - min(n_lo, 0)
    hA = cdga_cohomology(A, (0, need_hi)).dims()
    hbar = {k: v for k, v in hA.items() if k >= 1 and v}
    hN = {k: v for k, v in module_cohomology(N, (n_lo, need_hi)).dims().items() if v}
    m_lo = M.min_degree if M.min_degree is not None else 0
    hM = {k: v for k, v in module_cohomology(M, (m_lo, top)).dims().items() if v}
    e1 = ss.page(1)
    e1_bad = []
    for (p, n), v in e1.entries.items():
        if n in ss.degrees and p <= L and bracket_e1(hbar, hN, hM, p, n) != v:
            e1_bad.append((p, n, v, bracket_e1(hbar, hN, hM, p, n)))

    # E_2 against the bar construction over H(A)
    e2_bad = []
    if r_max >= 2 and L >= 1:
        Ht = cohomology_algebra(A, (0, need_hi + 1))
        tN = cohomology_module_table(N, Ht, (n_lo, need_hi + 1))
        tM = cohomology_module_table(M, Ht, (m_lo, top))
        ext = graded_algebra_bar(Ht, tN, tM, L - 1, w)
        e2 = ss.page(2)
        for (p, n), v in e2.entries.items():
            if n in ss.degrees and p <= L - 1 and ext.dims.get((p, n), 0) != v:
                e2_bad.append((p, n, v, ext.dims.get((p, n), 0)))
    rep = ConvergenceReport(totals, {n: direct[n] for n in ss.degrees}, ss.stabilization, agrees,
                            ok and agrees, flags, e1_bad, e2_bad)
    return ss, rep


def minimal_ss(A, Nmin, M, window, r_max: int = 6):
    """Postnikov filtration of [Nmin, M]_A by generator degree.

    E_1^{p,n} is checked against H^n[A⊗V^{=p}, M]_A computed from the slice
    and E_∞ totals against ext_via_hom(Nmin, M).
    """
    from .hom import HomComplex, ext_via_hom
    from .minimal import split_postnikov
    from .cdga import SemifreeCdga
    from .modules import ModuleTable, SemifreeModule, validate_module

    if isinstance(M, SemifreeCdga):
        M = SemifreeModule.unit(M, 0, "1")
    if not validate_module(Nmin).minimal:
        raise ValueError("minimal_ss needs a minimal module")
    w = as_window(window)
    C = HomComplex(Nmin, M)
    f = FilteredComplexWindow(C, C.level, w)
    ss = compute_pages(f, r_max)
    direct = ext_via_hom(Nmin, M, w).dims()
    totals = ss.einf_totals()
    agrees = all(totals.get(n) == direct.get(n) for n in ss.degrees)
    e1 = ss.page(1)
    bad = []
    for p in sorted(set(Nmin.degrees)):
        sl = split_postnikov(Nmin, p).slice
        dims = ext_via_hom(sl, M, w).dims()
        for n in ss.degrees:
            if dims.get(n) is not None and e1.dim(p, n) != dims[n]:
                bad.append((p, n, e1.dim(p, n), dims[n]))
    flags = []
    if not isinstance(M, ModuleTable) or M.open_above:
        flags.append("target not bounded above: strong convergence rests on finite generation of Nmin")
    rep = ConvergenceReport(totals, {n: direct[n] for n in ss.degrees}, ss.stabilization, agrees,
                            agrees, flags, bad, [])
    return ss, rep


__all__ = [
    "FilteredComplexWindow", "SSPage", "SpectralSequence", "ConvergenceReport", "compute_pages",
    "hyper_ext_ss", "minimal_ss", "bracket_e1",
]
