"""
Semifree commutative differential graded algebras over Q.

A monomial is a tuple ``((i, e), ...)`` of generator indices with positive
exponents, sorted by index.  Odd generators only ever appear with exponent
one.  The empty tuple is the unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .exact import (
    ONE, ZERO, CohomologyResult, DegreeWindow, GeneratedComplex, WindowError,
    as_window, complex_cohomology, vec_add,
)

Monomial = tuple
UNIT: Monomial = ()


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int
    differential: tuple = ()   # sorted ((monomial, coeff), ...)

    def diff_dict(self) -> dict:
        return dict(self.differential)


def _freeze(terms: Mapping) -> tuple:
    return tuple(sorted((m, Fraction(c)) for m, c in terms.items() if c))


class SemifreeCdga:
    """Λ⟨g_1, g_2, ...⟩ with d g_i a polynomial in earlier generators.

    The well-order is the list order.  Construction does not validate; call
    :func:`validate_cdga` (or :meth:`validated`) before trusting results.
    """

    def __init__(self, generators: Sequence[GeneratorSpec], name: str | None = None):
        self.generators = tuple(generators)
        self.name = name
        self.degrees = tuple(g.degree for g in self.generators)
        self.names = tuple(g.name for g in self.generators)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        self._index = {n: i for i, n in enumerate(self.names)}
        self._basis_cache: dict[int, tuple] = {}
        self._d_cache: dict = {}
        self._diffs = tuple(g.diff_dict() for g in self.generators)
        self.unit = UNIT

    # -- construction helpers -------------------------------------------------
    @classmethod
    def free(cls, gens: Iterable[tuple], name=None) -> "SemifreeCdga":
        """Build from ``(name, degree, differential)`` where the differential is
        ``None``, a dict of monomial -> coeff, or an AlgElement of a prefix algebra."""
        specs = []
        for spec in gens:
            nm, deg = spec[0], spec[1]
            diff = spec[2] if len(spec) > 2 else None
            if diff is None:
                terms = {}
            elif isinstance(diff, AlgElement):
                terms = diff.terms
            else:
                terms = dict(diff)
            specs.append(GeneratorSpec(nm, int(deg), _freeze(terms)))
        return cls(specs, name)

    def extended(self, gens: Iterable[tuple], name=None) -> "SemifreeCdga":
        """Append generators; differentials may be AlgElements over ``self``."""
        new = list(self.generators)
        for spec in gens:
            nm, deg = spec[0], spec[1]
            diff = spec[2] if len(spec) > 2 else None
            terms = diff.terms if isinstance(diff, AlgElement) else dict(diff or {})
            new.append(GeneratorSpec(nm, int(deg), _freeze(terms)))
        return SemifreeCdga(new, name)

    # -- basic structure -----------------------------------------------------
    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"SemifreeCdga({self.name or ''}⟨{gens}⟩)"

    def __eq__(self, other):
        return isinstance(other, SemifreeCdga) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def index(self, name: str) -> int:
        return self._index[name]

    def __getitem__(self, name: str) -> "AlgElement":
        return self.gen(self._index[name])

    def gen(self, i: int) -> "AlgElement":
        return AlgElement(self, {((i, 1),): ONE})

    def one(self) -> "AlgElement":
        return AlgElement(self, {UNIT: ONE})

    def zero(self) -> "AlgElement":
        return AlgElement(self, {})

    def scalar(self, c) -> "AlgElement":
        return AlgElement(self, {UNIT: Fraction(c)} if c else {})

    def element(self, terms: Mapping) -> "AlgElement":
        return AlgElement(self, terms)

    def gen_differential(self, i: int) -> "AlgElement":
        return AlgElement(self, self._diffs[i])

    # -- monomial arithmetic --------------------------------------------------
    def degree(self, m: Monomial) -> int:
        return sum(self.degrees[i] * e for i, e in m)

    label_degree = degree

    def is_odd(self, i: int) -> bool:
        return self.degrees[i] % 2 == 1

    def mul_monomials(self, m1: Monomial, m2: Monomial) -> tuple[int, Monomial | None]:
        """Product of two monomials as (sign, monomial); sign 0 when it vanishes."""
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        return _mul_monomials(self.degrees, m1, m2)

    def mul(self, m1: Monomial, m2: Monomial) -> dict:
        s, m = self.mul_monomials(m1, m2)
        return {m: Fraction(s)} if s else {}

    def normalize_word(self, word: Sequence[int]) -> tuple[int, Monomial | None]:
        """Sort a word of generator indices; returns (Koszul sign, monomial)."""
        w = list(word)
        sign = 1
        # insertion sort, counting odd/odd transpositions
        for a in range(1, len(w)):
            b = a
            while b > 0 and w[b - 1] > w[b]:
                if self.is_odd(w[b - 1]) and self.is_odd(w[b]):
                    sign = -sign
                w[b - 1], w[b] = w[b], w[b - 1]
                b -= 1
        exps: dict[int, int] = {}
        for i in w:
            exps[i] = exps.get(i, 0) + 1
        for i, e in exps.items():
            if e > 1 and self.is_odd(i):
                return 0, None
        return sign, tuple(sorted(exps.items()))

    def d_label(self, m: Monomial) -> dict:
        """d of a monomial via the Leibniz rule, as a dict monomial -> coeff."""
        hit = self._d_cache.get(m)
        if hit is not None:
            return hit
        word = [i for i, e in m for _ in range(e)]
        out: dict = {}
        prefix: Monomial = UNIT
        prefix_deg = 0
        for pos, i in enumerate(word):
            di = self._diffs[i]
            if di:
                suffix = _word_monomial(word[pos + 1:])
                sgn = -1 if prefix_deg % 2 else 1
                for dm, c in di.items():
                    s1, left = self.mul_monomials(prefix, dm)
                    if not s1:
                        continue
                    s2, full = self.mul_monomials(left, suffix)
                    if not s2:
                        continue
                    vec_add(out, {full: c}, sgn * s1 * s2)
            s, prefix = self.mul_monomials(prefix, ((i, 1),))
            if not s:   # cannot happen: the original monomial was nonzero
                break
            prefix_deg += self.degrees[i]
        self._d_cache[m] = out
        return out

    # -- degree slices ----------------------------------------------------------
    def basis(self, k: int) -> tuple:
        """Monomial basis of A^k (finite because every generator has degree ≥ 1)."""
        if k < 0:
            return ()
        hit = self._basis_cache.get(k)
        if hit is None:
            if any(d < 1 for d in self.degrees):
                raise WindowError("generators of degree < 1 make degree slices infinite")
            hit = tuple(sorted(_enumerate_monomials(self.degrees, k)))
            self._basis_cache[k] = hit
        return hit

    def positive_basis(self, k: int) -> tuple:
        return self.basis(k) if k >= 1 else ()

    @property
    def is_simply_connected(self) -> bool:
        return all(d >= 2 for d in self.degrees)

    @property
    def min_positive_degree(self) -> int | None:
        return min(self.degrees) if self.degrees else None

    def format_monomial(self, m: Monomial) -> str:
        if not m:
            return "1"
        return "*".join(self.names[i] if e == 1 else f"{self.names[i]}^{e}" for i, e in m)

    def d(self, e: "AlgElement") -> "AlgElement":
        return extend_derivation(self, e)

    def validated(self) -> "SemifreeCdga":
        rep = validate_cdga(self)
        if not rep.valid:
            raise ValueError(f"invalid cdga: {rep.message}")
        return self


def _word_monomial(word) -> Monomial:
    exps: dict[int, int] = {}
    for i in word:
        exps[i] = exps.get(i, 0) + 1
    return tuple(sorted(exps.items()))


@lru_cache(maxsize=None)
def _mul_monomials(degrees: tuple, m1: Monomial, m2: Monomial):
    # moving each factor of m2 left past the factors of m1 with larger index
    sign = 1
    for j, b in m2:
        if degrees[j] * b % 2 == 0:
            continue
        for i, a in m1:
            if i > j and degrees[i] * a % 2:
                sign = -sign
    exps = dict(m1)
    for j, b in m2:
        e = exps.get(j, 0) + b
        if e > 1 and degrees[j] % 2:
            return 0, None
        exps[j] = e
    return sign, tuple(sorted(exps.items()))


def _enumerate_monomials(degrees: tuple, k: int):
    n = len(degrees)

    def rec(i, remaining, acc):
        if remaining == 0:
            yield tuple(acc)
            return
        if i == n:
            return
        deg = degrees[i]
        emax = remaining // deg
        if deg % 2:
            emax = min(emax, 1)
        for e in range(emax, -1, -1):
            if e:
                acc.append((i, e))
            yield from rec(i + 1, remaining - e * deg, acc)
            if e:
                acc.pop()

    yield from rec(0, k, [])


# ---------------------------------------------------------------------------

class AlgElement:
    """Element of a SemifreeCdga: sparse map monomial -> Fraction."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: SemifreeCdga, terms: Mapping):
        self.alg = alg
        self.terms = {m: Fraction(c) for m, c in terms.items() if c}

    def _coerce(self, other) -> "AlgElement":
        if isinstance(other, AlgElement):
            if other.alg is not self.alg and other.alg != self.alg:
                raise ValueError("elements live in different algebras")
            return other
        if isinstance(other, (int, Fraction)):
            return self.alg.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgElement(self.alg, vec_add(dict(self.terms), other.terms))

    __radd__ = __add__

    def __neg__(self):
        return AlgElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgElement(self.alg, vec_add(dict(self.terms), other.terms, -ONE))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgElement(self.alg, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, AlgElement):
            return NotImplemented
        return normalize_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        out = self.alg.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.alg.scalar(other)
        return isinstance(other, AlgElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    @property
    def degree(self) -> int | None:
        degs = {self.alg.degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("inhomogeneous element has no degree")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len({self.alg.degree(m) for m in self.terms}) <= 1

    def constant_term(self) -> Fraction:
        return self.terms.get(UNIT, ZERO)

    def d(self) -> "AlgElement":
        return extend_derivation(self.alg, self)

    def __repr__(self):
        return format_terms(self.terms, self.alg.format_monomial)

    __str__ = __repr__


def format_terms(terms: Mapping, fmt) -> str:
    if not terms:
        return "0"
    parts = []
    for key in sorted(terms):
        c = terms[key]
        body = fmt(key)
        if body == "1":
            s = str(abs(c))
        elif abs(c) == 1:
            s = body
        else:
            s = f"{abs(c)}*{body}"
        parts.append(("-" if c < 0 else "+", s))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sgn, s in parts[1:]:
        out += f" {sgn} {s}"
    return out


def normalize_product(a: AlgElement, b: AlgElement) -> AlgElement:
    """Product in normal form: Koszul signs applied, odd squares killed."""
    if a.alg is not b.alg and a.alg != b.alg:
        raise ValueError("mismatched parent algebras")
    A = a.alg
    out: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            s, m = A.mul_monomials(m1, m2)
            if s:
                vec_add(out, {m: c1 * c2}, s)
    return AlgElement(A, out)


def extend_derivation(A: SemifreeCdga, e: AlgElement) -> AlgElement:
    """d(e), extending the generator table by d(ab) = (da)b + (-1)^{|a|} a(db)."""
    out: dict = {}
    for m, c in e.terms.items():
        vec_add(out, A.d_label(m), c)
    return AlgElement(A, out)


# ---------------------------------------------------------------------------

@dataclass
class CdgaValidation:
    valid: bool
    minimal: bool = False
    decomposable: bool = False
    degree_monotone: bool = False
    generator: str | None = None
    message: str = "ok"
    errors: list = field(default_factory=list)


def validate_cdga(A: SemifreeCdga) -> CdgaValidation:
    """Degree consistency, lower-triangularity and d² = 0 on every generator.

    Also reports the two halves of minimality: decomposable differentials and
    a degree-monotone generator order.
    """
    errors = []
    for i, g in enumerate(A.generators):
        if g.degree < 1:
            errors.append((g.name, f"generator {g.name} has degree {g.degree} < 1"))
            continue
        dg = A._diffs[i]
        for m in dg:
            if A.degree(m) != g.degree + 1:
                errors.append((g.name, f"degree mismatch: d{g.name} has a term of degree "
                                        f"{A.degree(m)}, expected {g.degree + 1}"))
                break
            if any(j >= i for j, _ in m):
                errors.append((g.name, f"d{g.name} involves a generator not earlier than {g.name}"))
                break
            if any(e > 1 and A.is_odd(j) for j, e in m):
                errors.append((g.name, f"d{g.name} contains a square of an odd generator"))
                break
    if not errors:
        for i, g in enumerate(A.generators):
            dd = extend_derivation(A, A.gen_differential(i))
            if dd:
                errors.append((g.name, f"d(d{g.name}) = {dd} ≠ 0"))
                break
    decomposable = all(sum(e for _, e in m) >= 2 for dg in A._diffs for m in dg)
    monotone = all(a <= b for a, b in zip(A.degrees, A.degrees[1:]))
    if errors:
        return CdgaValidation(False, False, decomposable, monotone, errors[0][0], errors[0][1], errors)
    return CdgaValidation(True, decomposable and monotone, decomposable, monotone)


# ---------------------------------------------------------------------------

def standard_model(kind: str, n: int | None = None) -> SemifreeCdga:
    """Minimal models of spheres, Eilenberg–Mac Lane spaces and the circle."""
    kind = kind.replace("-", "_").lower()
    if kind == "circle":
        return SemifreeCdga.free([("x", 1)], name="S1")
    if n is None or n < 1:
        raise ValueError(f"{kind} needs n ≥ 1")
    if kind == "odd_sphere":
        if n % 2 == 0:
            raise ValueError(f"odd_sphere needs odd n, got {n}")
        return SemifreeCdga.free([(f"x{n}", n)], name=f"S{n}")
    if kind == "even_sphere":
        if n % 2:
            raise ValueError(f"even_sphere needs even n, got {n}")
        return SemifreeCdga.free([(f"x{n}", n), (f"x{2 * n - 1}", 2 * n - 1, {((0, 2),): 1})],
                                 name=f"S{n}")
    if kind in ("eilenberg_maclane", "em", "k"):
        return SemifreeCdga.free([(f"x{n}", n)], name=f"K(Q,{n})")
    raise ValueError(f"unknown model kind {kind!r}")


def ground_field() -> SemifreeCdga:
    """Q as the semifree cdga on no generators."""
    return SemifreeCdga([], name="Q")


# ---------------------------------------------------------------------------

class CdgaMorphism:
    """A cdga map given by the images of the source generators."""

    def __init__(self, source: SemifreeCdga, target: SemifreeCdga, images: Sequence):
        if len(images) != len(source):
            raise ValueError("need one image per source generator")
        self.source = source
        self.target = target
        self.images = tuple(im if isinstance(im, AlgElement) else target.element(im) for im in images)
        self._cache: dict = {}

    @classmethod
    def by_name(cls, source, target, mapping: Mapping[str, AlgElement]) -> "CdgaMorphism":
        return cls(source, target, [mapping.get(n, target.zero()) for n in source.names])

    @classmethod
    def identity(cls, A: SemifreeCdga) -> "CdgaMorphism":
        return cls(A, A, [A.gen(i) for i in range(len(A))])

    @classmethod
    def inclusion(cls, A: SemifreeCdga, B: SemifreeCdga) -> "CdgaMorphism":
        """A is a prefix of B's generator list."""
        if B.generators[:len(A)] != A.generators:
            raise ValueError("source is not a generator prefix of target")
        return cls(A, B, [B.gen(i) for i in range(len(A))])

    def map_monomial(self, m: Monomial) -> dict:
        hit = self._cache.get(m)
        if hit is None:
            out = self.target.one()
            for i, e in m:
                for _ in range(e):
                    out = out * self.images[i]
            hit = out.terms
            self._cache[m] = hit
        return hit

    def __call__(self, e: AlgElement) -> AlgElement:
        out: dict = {}
        for m, c in e.terms.items():
            vec_add(out, self.map_monomial(m), c)
        return AlgElement(self.target, out)

    def check(self) -> list[str]:
        """Problems with degrees or the chain condition (empty when it is a cdga map)."""
        problems = []
        for i, g in enumerate(self.source.generators):
            im = self.images[i]
            if im and (not im.is_homogeneous() or im.degree != g.degree):
                problems.append(f"image of {g.name} has the wrong degree")
            lhs = extend_derivation(self.target, im)
            rhs = self(self.source.gen_differential(i))
            if lhs != rhs:
                problems.append(f"d f({g.name}) ≠ f(d {g.name})")
        return problems


def augmentation(A: SemifreeCdga) -> CdgaMorphism:
    """A -> Q killing every generator."""
    Q = ground_field()
    return CdgaMorphism(A, Q, [Q.zero() for _ in range(len(A))])


# ---------------------------------------------------------------------------

class CdgaComplex(GeneratedComplex):
    """The underlying cochain complex of a cdga, or of its augmentation ideal."""

    def __init__(self, A: SemifreeCdga, reduced: bool = False):
        self.A = A
        self.reduced = reduced

    def basis(self, k):
        return self.A.positive_basis(k) if self.reduced else self.A.basis(k)

    def d(self, label):
        return self.A.d_label(label)


def cdga_cohomology(A: SemifreeCdga, window) -> CohomologyResult:
    return complex_cohomology(CdgaComplex(A), window)


class GradedAlgebraTable:
    """A graded-commutative algebra given by structure constants on a degree window.

    Products landing above the window are not recorded; ``complete_above``
    says whether the algebra is known to vanish there.
    """

    def __init__(self, basis: Mapping[int, Sequence[str]], products: Mapping, unit: str,
                 window, complete_above: bool = False, representatives: Mapping | None = None):
        self.window = as_window(window)
        self.basis_by_degree = {k: tuple(v) for k, v in basis.items() if v}
        self.unit = unit
        self.products = {k: dict(v) for k, v in products.items()}
        self.complete_above = complete_above
        self.representatives = dict(representatives or {})
        self._degree = {lab: k for k, labs in self.basis_by_degree.items() for lab in labs}

    def basis(self, k):
        if k > self.window.hi and not self.complete_above:
            raise WindowError(f"degree {k} lies above the table window {self.window}")
        return self.basis_by_degree.get(k, ())

    def known(self, k):
        return k <= self.window.hi or self.complete_above

    def positive_basis(self, k):
        return self.basis(k) if k >= 1 else ()

    def label_degree(self, lab):
        return self._degree[lab]

    degree = label_degree

    def mul(self, a, b) -> dict:
        if a == self.unit:
            return {b: ONE}
        if b == self.unit:
            return {a: ONE}
        k = self._degree[a] + self._degree[b]
        if k > self.window.hi:
            if self.complete_above:
                return {}
            raise WindowError(f"product {a}*{b} lands in degree {k} outside {self.window}")
        return self.products.get((a, b), {})

    def d_label(self, lab) -> dict:
        return {}

    @property
    def is_simply_connected(self):
        return not self.basis_by_degree.get(1)

    @property
    def min_positive_degree(self):
        pos = [k for k in self.basis_by_degree if k >= 1]
        return min(pos) if pos else None

    def dims(self) -> dict[int, int]:
        return {k: len(self.basis_by_degree.get(k, ())) for k in self.window}

    def validate(self) -> list[str]:
        """Unit law, graded commutativity, associativity on in-window triples."""
        problems = []
        labs = [l for k in sorted(self.basis_by_degree) for l in self.basis_by_degree[k]]
        if self.basis_by_degree.get(0) != (self.unit,):
            problems.append("degree 0 must be spanned by the unit")
        deg = self._degree
        for a in labs:
            for b in labs:
                if deg[a] + deg[b] > self.window.hi:
                    continue
                ab = self.mul(a, b)
                ba = self.mul(b, a)
                sgn = -1 if deg[a] * deg[b] % 2 else 1
                if ab != {k: sgn * v for k, v in ba.items()}:
                    problems.append(f"{a}*{b} is not graded-commutative")
                for c in labs:
                    if deg[a] + deg[b] + deg[c] > self.window.hi:
                        continue
                    left: dict = {}
                    for x, v in ab.items():
                        vec_add(left, self.mul(x, c), v)
                    right: dict = {}
                    for y, v in self.mul(b, c).items():
                        vec_add(right, self.mul(a, y), v)
                    if left != right:
                        problems.append(f"({a}*{b})*{c} ≠ {a}*({b}*{c})")
        return problems

    def __repr__(self):
        return f"GradedAlgebraTable(dims={self.dims()})"


def cohomology_algebra(A: SemifreeCdga, window) -> GradedAlgebraTable:
    """H(A) on a window with structure constants from products of representatives."""
    w = as_window(window)
    if w.lo < 0:
        raise ValueError("cohomology_algebra needs window.lo ≥ 0")
    w = DegreeWindow(0, w.hi)
    H = cdga_cohomology(A, w)
    basis = {}
    reps = {}
    for k in w:
        h = H[k]
        labs = []
        for i, z in enumerate(h.representatives):
            lab = "1" if k == 0 and h.dim == 1 else f"h{k}_{i}"
            labs.append(lab)
            reps[lab] = AlgElement(A, z)
        basis[k] = labs
    if basis.get(0) != ["1"]:
        raise ValueError("H^0 must be one-dimensional (connected cdga)")
    # normalize the unit representative to the monomial 1
    reps["1"] = A.one()
    products = {}
    for i in w:
        for j in w:
            if i + j > w.hi or not basis[i] or not basis[j]:
                continue
            for a in basis[i]:
                for b in basis[j]:
                    prod = reps[a] * reps[b]
                    coords = H[i + j].classify(prod.terms) if prod else {}
                    products[(a, b)] = {basis[i + j][t]: c for t, c in coords.items() if c}
    return GradedAlgebraTable(basis, products, "1", w, complete_above=False, representatives=reps)


# ---------------------------------------------------------------------------

@dataclass
class RelativeCdga:
    """B = A ⊗ ΛV: the generators of ``base`` come first in ``total``."""

    base: SemifreeCdga
    total: SemifreeCdga

    def __post_init__(self):
        if self.total.generators[:len(self.base)] != self.base.generators:
            raise ValueError("base generators must be a prefix of the total algebra")

    @property
    def fibre_indices(self) -> range:
        return range(len(self.base), len(self.total))

    def inclusion(self) -> CdgaMorphism:
        return CdgaMorphism.inclusion(self.base, self.total)

    def split_monomial(self, m: Monomial) -> tuple[Monomial, Monomial]:
        """(base part, fibre part); no sign since base indices come first."""
        nb = len(self.base)
        return tuple(p for p in m if p[0] < nb), tuple(p for p in m if p[0] >= nb)


def adjoin(A: SemifreeCdga, gens: Iterable[tuple], name=None) -> RelativeCdga:
    """A ⊗ Λ⟨new generators⟩ with the given differentials (AlgElements over the result
    can be supplied as dicts of monomials over the extended generator list)."""
    return RelativeCdga(A, A.extended(gens, name=name))
