"""
Exact linear algebra over Q and windowed cohomology of cochain complexes.

Everything here works with :class:`fractions.Fraction`; vectors are plain
dicts ``{index_or_label: Fraction}`` with no stored zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

Q = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


class WindowError(ValueError):
    """A computation was asked for degrees the inputs cannot certify."""


class DifferentialError(ValueError):
    """d∘d ≠ 0 on a complex that was supposed to be a cochain complex."""


# ---------------------------------------------------------------------------
# sparse vectors

def vec_add(target: dict, other: Mapping, scale=ONE) -> dict:
    """In-place ``target += scale * other``; drops zeros."""
    if not scale:
        return target
    for k, v in other.items():
        nv = target.get(k, ZERO) + scale * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)
    return target


def vec_scale(v: Mapping, c) -> dict:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_clean(v: Mapping) -> dict:
    return {k: Fraction(x) for k, x in v.items() if x}


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeWindow:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __contains__(self, k) -> bool:
        return self.lo <= k <= self.hi

    def widen(self, by: int = 1) -> "DegreeWindow":
        return DegreeWindow(self.lo - by, self.hi + by)

    def shift(self, n: int) -> "DegreeWindow":
        return DegreeWindow(self.lo + n, self.hi + n)

    @classmethod
    def parse(cls, text: str) -> "DegreeWindow":
        lo, sep, hi = text.partition(":")
        if not sep:
            raise ValueError(f"window must look like lo:hi, got {text!r}")
        return cls(int(lo), int(hi))

    def __str__(self):
        return f"{self.lo}:{self.hi}"


def as_window(w) -> DegreeWindow:
    if isinstance(w, DegreeWindow):
        return w
    if isinstance(w, str):
        return DegreeWindow.parse(w)
    lo, hi = w
    return DegreeWindow(int(lo), int(hi))


# ---------------------------------------------------------------------------

class SparseMatrix:
    """Immutable sparse rational matrix stored as sorted (row, col, value) triples."""

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows: int, ncols: int, entries: Iterable = ()):
        acc: dict = {}
        for r, c, v in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            acc[(r, c)] = acc.get((r, c), ZERO) + Fraction(v)
        self.nrows = nrows
        self.ncols = ncols
        self.entries = tuple(sorted((r, c, v) for (r, c), v in acc.items() if v))

    @classmethod
    def from_rows(cls, rows, ncols: int | None = None) -> "SparseMatrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols,
                   ((i, j, v) for i, row in enumerate(rows) for j, v in enumerate(row)))

    @classmethod
    def from_columns(cls, nrows: int, columns: list[Mapping[int, Fraction]]) -> "SparseMatrix":
        return cls(nrows, len(columns),
                   ((r, j, v) for j, col in enumerate(columns) for r, v in col.items()))

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols)

    def rows(self) -> list[dict]:
        out = [dict() for _ in range(self.nrows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def columns(self) -> list[dict]:
        out = [dict() for _ in range(self.ncols)]
        for r, c, v in self.entries:
            out[c][r] = v
        return out

    def to_dense(self) -> list[list[Fraction]]:
        dense = [[ZERO] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.entries:
            dense[r][c] = v
        return dense

    def apply(self, v: Mapping[int, Fraction]) -> dict:
        out: dict = {}
        cols = self.columns()
        for j, x in v.items():
            vec_add(out, cols[j], x)
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        rows = self.rows()
        orows = other.rows()
        triples = []
        for i, row in enumerate(rows):
            acc: dict = {}
            for k, a in row.items():
                vec_add(acc, orows[k], a)
            triples.extend((i, j, v) for j, v in acc.items())
        return SparseMatrix(self.nrows, other.ncols, triples)

    def scaled(self, c) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, ((r, k, c * v) for r, k, v in self.entries))

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.entries))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={len(self.entries)})"


# ---------------------------------------------------------------------------

class EchelonBasis:
    """Incrementally maintained reduced row-echelon basis of a subspace.

    Every stored row remembers which combination of the inserted vectors it
    is, expressed through user supplied *tags* (sparse vectors).  This makes
    coset classification (cohomology classes, quotient coordinates) a single
    reduction.
    """

    def __init__(self, key=None):
        self.rows: dict = {}      # pivot -> row
        self.tags: dict = {}      # pivot -> tag vector
        self._key = key

    def __len__(self):
        return len(self.rows)

    def _pivot(self, v):
        return min(v, key=self._key) if self._key else min(v)

    def reduce(self, v: Mapping) -> tuple[dict, dict]:
        """Return (residual, tag) with v = residual + (span element whose tag is ``tag``)."""
        res = dict(v)
        tag: dict = {}
        for p in [p for p in v if p in self.rows]:
            c = v[p]
            vec_add(res, self.rows[p], -c)
            vec_add(tag, self.tags[p], c)
        return res, tag

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)[0]

    def add(self, v: Mapping, tag: Mapping | None = None):
        """Insert v.  Returns the new pivot, or None if v was dependent."""
        res, t = self.reduce(v)
        if not res:
            return None
        rtag = vec_add(dict(tag or {}), t, -ONE)
        p = self._pivot(res)
        inv = ONE / res[p]
        res = vec_scale(res, inv)
        rtag = vec_scale(rtag, inv)
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                vec_add(row, res, -c)
                vec_add(self.tags[q], rtag, -c)
        self.rows[p] = res
        self.tags[p] = rtag
        return p

    def dependency(self, v: Mapping, tag: Mapping) -> dict | None:
        """If v is in the span, return ``tag - tag(v)`` (a relation); else None."""
        res, t = self.reduce(v)
        if res:
            return None
        return vec_add(dict(tag), t, -ONE)

    def basis(self) -> list[dict]:
        return [self.rows[p] for p in sorted(self.rows, key=self._key)]


def row_reduce(m: SparseMatrix) -> tuple[SparseMatrix, int, list[dict]]:
    """Reduced row-echelon form, rank and a null-space basis of ``m``.

    Kernel vectors are indexed by column and follow the usual recipe: one
    vector per free column, with that column set to 1.
    """
    eb = EchelonBasis()
    for row in m.rows():
        eb.add(row)
    pivots = sorted(eb.rows)
    reduced = SparseMatrix(m.nrows, m.ncols,
                           ((i, c, v) for i, p in enumerate(pivots) for c, v in eb.rows[p].items()))
    free = [c for c in range(m.ncols) if c not in eb.rows]
    kernel = []
    for f in free:
        vec = {f: ONE}
        for p in pivots:
            c = eb.rows[p].get(f)
            if c:
                vec[p] = -c
        kernel.append(vec)
    return reduced, len(pivots), kernel


def rank(m: SparseMatrix) -> int:
    return row_reduce(m)[1]


def image_and_kernel(columns: list[Mapping]) -> tuple[EchelonBasis, list[dict]]:
    """Echelon basis of the span of ``columns`` and a kernel basis (indexed by column)."""
    eb = EchelonBasis()
    kernel = []
    for j, col in enumerate(columns):
        rel = eb.dependency(col, {j: ONE})
        if rel is not None:
            kernel.append(rel)
        else:
            eb.add(col, {j: ONE})
    return eb, kernel


# ---------------------------------------------------------------------------
# cohomology

@dataclass
class DegreeCohomology:
    """Cohomology in one degree.  ``dim`` is None when the degree is boundary-incomplete."""

    degree: int
    dim: int | None
    representatives: list[dict] = field(default_factory=list)
    complete: bool = True
    _classifier: EchelonBasis | None = field(default=None, repr=False, compare=False)

    def classify(self, cocycle: Mapping) -> dict:
        """Coordinates of a cocycle's class in the representative basis."""
        if self._classifier is None:
            raise WindowError(f"degree {self.degree} is boundary-incomplete")
        res, tag = self._classifier.reduce(cocycle)
        if res:
            raise ValueError(f"vector in degree {self.degree} is not a cocycle")
        return tag


@dataclass
class CohomologyResult:
    degrees: dict[int, DegreeCohomology]

    def dims(self) -> dict[int, int | None]:
        return {k: h.dim for k, h in sorted(self.degrees.items())}

    def dim(self, k: int) -> int | None:
        return self.degrees[k].dim

    @property
    def complete(self) -> bool:
        return all(h.complete for h in self.degrees.values())

    def __getitem__(self, k):
        return self.degrees[k]


def cohomology_at(basis_k: list, d_prev_columns: list[Mapping], d_k_columns: list[Mapping],
                  degree: int) -> DegreeCohomology:
    """H^k from the columns of d_{k-1} (images in C^k) and d_k (indexed by C^k)."""
    boundaries = EchelonBasis()
    for col in d_prev_columns:
        boundaries.add(col)
    _, cocycles = image_and_kernel(d_k_columns)
    classifier = EchelonBasis()
    for row in boundaries.basis():
        classifier.add(row)
    reps = []
    for z in cocycles:
        if classifier.add(z, {len(reps): ONE}) is not None:
            reps.append(z)
    return DegreeCohomology(degree, len(reps), reps, True, classifier)


class GeneratedComplex:
    """Duck-typed interface for complexes given degree by degree.

    Subclasses provide ``basis(k)`` (list of hashable labels), ``d(label)``
    (sparse vector in labels of degree k+1) and optionally ``known(k)``.
    """

    def basis(self, k: int) -> list:
        raise NotImplementedError

    def d(self, label) -> dict:
        raise NotImplementedError

    def known(self, k: int) -> bool:
        return True


def _indexed_columns(cx, k: int, idx_next: dict) -> list[dict]:
    cols = []
    for lab in cx.basis(k):
        col = {}
        for t, v in cx.d(lab).items():
            try:
                col[idx_next[t]] = v
            except KeyError:
                raise DifferentialError(f"d({lab!r}) has a term {t!r} outside degree {k + 1}")
        cols.append(col)
    return cols


def complex_cohomology(cx, window, check: bool = True) -> CohomologyResult:
    """Cohomology of a generated complex for every degree in ``window``.

    A degree k is exact when degrees k-1, k, k+1 are all ``known``; the
    complex is read one degree beyond each edge of the window.  Degrees
    that touch unknown data are reported with ``dim=None``.
    """
    w = as_window(window)
    known = {k: cx.known(k) for k in range(w.lo - 1, w.hi + 2)}
    bases = {k: (list(cx.basis(k)) if known[k] else None) for k in known}
    index = {k: ({lab: i for i, lab in enumerate(b)} if b is not None else None)
             for k, b in bases.items()}
    cols: dict[int, list[dict]] = {}
    for k in range(w.lo - 1, w.hi + 1):
        if known[k] and known[k + 1]:
            cols[k] = _indexed_columns(cx, k, index[k + 1])
    if check:
        for k in range(w.lo - 1, w.hi):
            if k in cols and k + 1 in cols:
                _check_square_zero(cols[k], cols[k + 1], k)
    out = {}
    for k in w:
        if k - 1 in cols and k in cols:
            h = cohomology_at(bases[k], cols[k - 1], cols[k], k)
            h.representatives = [{bases[k][i]: v for i, v in z.items()} for z in h.representatives]
            h._classifier = _LabelClassifier(h._classifier, index[k])
            out[k] = h
        else:
            out[k] = DegreeCohomology(k, None, [], False, None)
    return CohomologyResult(out)


class _LabelClassifier:
    """Adapter so that classification accepts label-keyed vectors."""

    def __init__(self, eb: EchelonBasis, index: dict):
        self.eb = eb
        self.index = index

    def reduce(self, v):
        return self.eb.reduce({self.index[k]: x for k, x in v.items()})


def _check_square_zero(cols_k, cols_k1, k):
    for j, col in enumerate(cols_k):
        acc: dict = {}
        for i, v in col.items():
            vec_add(acc, cols_k1[i], v)
        if acc:
            raise DifferentialError(f"d∘d ≠ 0 on basis element {j} of degree {k}")


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CochainComplexWindow:
    """Explicit cochain complex on a degree window.

    ``spaces[k]`` lists basis labels of degree k; ``differentials[k]`` is the
    matrix of d: C^k -> C^{k+1} (rows indexed by degree k+1), present for
    lo ≤ k < hi.
    """

    spaces: Mapping[int, tuple]
    differentials: Mapping[int, SparseMatrix]
    window: DegreeWindow

    def __post_init__(self):
        for k in self.window:
            n = len(self.spaces.get(k, ()))
            if k < self.window.hi:
                m = self.differentials.get(k)
                nn = len(self.spaces.get(k + 1, ()))
                if m is None or m.ncols != n or m.nrows != nn:
                    raise ValueError(f"differential in degree {k} has wrong shape")

    def basis(self, k):
        return tuple(self.spaces.get(k, ()))

    def dim(self, k):
        return len(self.spaces.get(k, ()))

    def validate(self):
        for k in range(self.window.lo, self.window.hi - 1):
            if not (self.differentials[k + 1] @ self.differentials[k]).is_zero():
                raise DifferentialError(f"d∘d ≠ 0 starting in degree {k}")

    @classmethod
    def from_generated(cls, cx, window) -> "CochainComplexWindow":
        w = as_window(window)
        spaces = {k: tuple(cx.basis(k)) for k in w}
        index = {k: {lab: i for i, lab in enumerate(spaces[k])} for k in w}
        diffs = {}
        for k in range(w.lo, w.hi):
            cols = _indexed_columns(cx, k, index[k + 1])
            diffs[k] = SparseMatrix.from_columns(len(spaces[k + 1]), cols)
        return cls(spaces, diffs, w)

    @classmethod
    def sphere(cls, n: int, window=None) -> "CochainComplexWindow":
        """S(n): one closed generator in degree n."""
        w = as_window(window) if window is not None else DegreeWindow(n - 1, n + 1)
        spaces = {k: (("s", n),) if k == n else () for k in w}
        return cls._with_zero_maps(spaces, w)

    @classmethod
    def disk(cls, n: int, window=None) -> "CochainComplexWindow":
        """D(n): a in degree n-1, b in degree n, da = b."""
        w = as_window(window) if window is not None else DegreeWindow(n - 2, n + 1)
        spaces = {k: () for k in w}
        if n - 1 in w:
            spaces[n - 1] = ("a",)
        if n in w:
            spaces[n] = ("b",)
        diffs = {k: SparseMatrix.zero(len(spaces[k + 1]), len(spaces[k])) for k in range(w.lo, w.hi)}
        if n - 1 in w and n in w:
            diffs[n - 1] = SparseMatrix(1, 1, [(0, 0, 1)])
        return cls(spaces, diffs, w)

    @classmethod
    def _with_zero_maps(cls, spaces, w):
        diffs = {k: SparseMatrix.zero(len(spaces[k + 1]), len(spaces[k])) for k in range(w.lo, w.hi)}
        return cls(spaces, diffs, w)


def cohomology_window(c: CochainComplexWindow) -> CohomologyResult:
    """Cohomology of an explicit window; the two edge degrees are boundary-incomplete."""
    c.validate()
    w = c.window
    out = {}
    for k in w:
        if k - 1 in w and k + 1 in w:
            prev = c.differentials[k - 1].columns()
            cur = c.differentials[k].columns()
            h = cohomology_at(list(c.basis(k)), prev, cur, k)
            basis = c.basis(k)
            h.representatives = [{basis[i]: v for i, v in z.items()} for z in h.representatives]
            h._classifier = _LabelClassifier(h._classifier, {lab: i for i, lab in enumerate(basis)})
            out[k] = h
        else:
            out[k] = DegreeCohomology(k, None, [], False, None)
    return CohomologyResult(out)


def shift_complex(c: CochainComplexWindow, n: int) -> CochainComplexWindow:
    """C[n]: degree k holds C^{k+n}, differential multiplied by (-1)^n."""
    if n == 0:
        return c
    sign = -1 if n % 2 else 1
    w = c.window.shift(-n)
    spaces = {k - n: tuple(v) for k, v in c.spaces.items()}
    diffs = {k - n: m.scaled(sign) for k, m in c.differentials.items()}
    return CochainComplexWindow(spaces, diffs, w)

