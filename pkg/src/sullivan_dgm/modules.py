"""
Differential graded modules over semifree cdgas.

Two presentations are supported:

* :class:`SemifreeModule` -- A ⊗ V with a lower-triangular differential on
  the generators of V.  Basis elements of degree k are pairs
  ``(monomial, generator index)``.
* :class:`ModuleTable` -- an explicit cochain complex on a degree window
  with structure constants for the action.  This is how non-semifree
  modules such as Q (via the augmentation) enter the engine.

Both expose the same duck-typed surface: ``basis(k)``, ``d(label)``,
``act(alg_label, label)``, ``label_degree(label)``, ``known(k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import expr
from .cdga import (
    UNIT, AlgElement, CdgaMorphism, GradedAlgebraTable, RelativeCdga, SemifreeCdga,
    format_terms, ground_field,
)
from .exact import (
    ONE, ZERO, CohomologyResult, GeneratedComplex, WindowError, as_window,
    complex_cohomology, vec_add,
)


def sign(n: int) -> int:
    return -1 if n % 2 else 1


@dataclass(frozen=True)
class ModGenerator:
    name: str
    degree: int


class SemifreeModule(GeneratedComplex):
    """A ⊗ V, generators well-ordered by list position.

    ``diffs[i]`` maps ``(monomial, j)`` to a coefficient and encodes
    d v_i = Σ c · m · v_j.
    """

    def __init__(self, base: SemifreeCdga, generators: Sequence[ModGenerator],
                 diffs: Sequence[Mapping], name: str | None = None):
        self.base = base
        self.generators = tuple(generators)
        self.diffs = tuple({k: Fraction(v) for k, v in d.items() if v} for d in diffs)
        if len(self.diffs) != len(self.generators):
            raise ValueError("need one differential per generator")
        self.name = name
        self.names = tuple(g.name for g in self.generators)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate module generator names")
        self.degrees = tuple(g.degree for g in self.generators)
        self._index = {n: i for i, n in enumerate(self.names)}
        self._basis_cache: dict = {}

    # -- construction ------------------------------------------------------------
    @classmethod
    def parse(cls, base: SemifreeCdga, gens: Iterable[tuple], name=None) -> "SemifreeModule":
        """Build from ``(name, degree, expression)`` triples, e.g.
        ``[("e0", 0, "0"), ("e1", 1, "x2*e0")]``."""
        gens = list(gens)
        skeleton = cls(base, [ModGenerator(g[0], int(g[1])) for g in gens],
                       [{} for _ in gens], name)
        ring = ModuleRing(skeleton)
        diffs = []
        for g in gens:
            text = g[2] if len(g) > 2 and g[2] is not None else "0"
            diffs.append(ring.as_module_terms(expr.evaluate(text, ring)))
        return cls(base, skeleton.generators, diffs, name)

    @classmethod
    def free(cls, base: SemifreeCdga, name_degrees: Iterable[tuple], name=None) -> "SemifreeModule":
        gens = [ModGenerator(n, int(d)) for n, d in name_degrees]
        return cls(base, gens, [{} for _ in gens], name)

    @classmethod
    def unit(cls, base: SemifreeCdga, degree: int = 0, gen_name: str = "e") -> "SemifreeModule":
        """A itself (shifted so that the generator sits in ``degree``)."""
        return cls.free(base, [(gen_name, degree)], name=base.name)

    def with_generators(self, generators, diffs, name=None) -> "SemifreeModule":
        return SemifreeModule(self.base, generators, diffs, name if name is not None else self.name)

    # -- structure -------------------------------------------------------------------
    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return f"SemifreeModule({self.name or ''}: " + ", ".join(
            f"{g.name}:{g.degree}" for g in self.generators) + ")"

    def __eq__(self, other):
        return (isinstance(other, SemifreeModule) and self.base == other.base
                and self.generators == other.generators and self.diffs == other.diffs)

    def __hash__(self):
        return hash(self.generators)

    def index(self, name: str) -> int:
        return self._index[name]

    def gen(self, i_or_name) -> "ModElement":
        i = self._index[i_or_name] if isinstance(i_or_name, str) else i_or_name
        return ModElement(self, {(UNIT, i): ONE})

    def __getitem__(self, name):
        return self.gen(name)

    def zero(self) -> "ModElement":
        return ModElement(self, {})

    def gen_differential(self, i) -> "ModElement":
        return ModElement(self, self.diffs[i])

    @property
    def min_degree(self) -> int | None:
        return min(self.degrees) if self.degrees else None

    def label_degree(self, label) -> int:
        m, i = label
        return self.base.degree(m) + self.degrees[i]

    def basis(self, k: int) -> list:
        hit = self._basis_cache.get(k)
        if hit is None:
            hit = [(m, i) for i, dg in enumerate(self.degrees) if dg <= k
                   for m in self.base.basis(k - dg)]
            self._basis_cache[k] = hit
        return hit

    def d(self, label) -> dict:
        m, i = label
        out: dict = {}
        for dm, c in self.base.d_label(m).items():
            vec_add(out, {(dm, i): c})
        if self.diffs[i]:
            s = sign(self.base.degree(m))
            for (a, j), c in self.diffs[i].items():
                t, am = self.base.mul_monomials(m, a)
                if t:
                    vec_add(out, {(am, j): c}, s * t)
        return out

    def act(self, a, label) -> dict:
        """a · (m v_i) = (a m) v_i for a monomial a."""
        m, i = label
        t, am = self.base.mul_monomials(a, m)
        return {(am, i): Fraction(t)} if t else {}

    def format_label(self, label) -> str:
        m, i = label
        if not m:
            return self.names[i]
        return f"{self.base.format_monomial(m)}*{self.names[i]}"

    def format_vector(self, v: Mapping) -> str:
        return format_terms(v, self.format_label)

    def differential_string(self, i) -> str:
        return self.format_vector(self.diffs[i])


class ModElement:
    """Element of a SemifreeModule: sparse map (monomial, generator index) -> Fraction."""

    __slots__ = ("module", "terms")

    def __init__(self, module: SemifreeModule, terms: Mapping):
        self.module = module
        self.terms = {k: Fraction(v) for k, v in terms.items() if v}

    def __add__(self, other):
        if isinstance(other, ModElement):
            return ModElement(self.module, vec_add(dict(self.terms), other.terms))
        if isinstance(other, AlgElement) and not other:
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return ModElement(self.module, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ModElement(self.module, {k: v * other for k, v in self.terms.items()})
        if isinstance(other, AlgElement):
            # m · a = (-1)^{|m||a|} a · m
            return act_element(other, self, right=True)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        if isinstance(other, AlgElement):
            return act_element(other, self)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, AlgElement) and not other:
            return not self.terms
        return isinstance(other, ModElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self):
        degs = {self.module.label_degree(k) for k in self.terms}
        if len(degs) > 1:
            raise ValueError("inhomogeneous module element")
        return degs.pop() if degs else None

    def d(self) -> "ModElement":
        out: dict = {}
        for k, v in self.terms.items():
            vec_add(out, self.module.d(k), v)
        return ModElement(self.module, out)

    def __repr__(self):
        return self.module.format_vector(self.terms)


def act_element(a: AlgElement, x: ModElement, right: bool = False) -> ModElement:
    M = x.module
    if a.alg != M.base:
        raise ValueError("algebra element over the wrong base")
    out: dict = {}
    for am, ac in a.terms.items():
        adeg = M.base.degree(am)
        for lab, xc in x.terms.items():
            s = sign(adeg * M.label_degree(lab)) if right else 1
            vec_add(out, M.act(am, lab), ac * xc * s)
    return ModElement(M, out)


class AlgRing:
    """Evaluation ring for cdga expressions."""

    def __init__(self, A: SemifreeCdga, scope: Sequence[str] | None = None):
        self.A = A
        self.scope = set(A.names if scope is None else scope)

    def const(self, q):
        return self.A.scalar(q)

    def symbol(self, name):
        if name not in self.scope:
            raise KeyError(name)
        return self.A[name]

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b


class ModuleRing(AlgRing):
    """Mixed ring for module expressions: algebra symbols and module generators."""

    def __init__(self, M: SemifreeModule):
        super().__init__(M.base)
        self.M = M
        clash = set(M.names) & set(M.base.names)
        if clash:
            raise ValueError(f"names used for both algebra and module generators: {sorted(clash)}")

    def symbol(self, name):
        if name in self.M._index:
            return self.M.gen(name)
        return super().symbol(name)

    def add(self, a, b):
        if isinstance(a, AlgElement) and isinstance(b, ModElement):
            a, b = b, a
        if isinstance(a, ModElement) and isinstance(b, AlgElement):
            if b:
                raise ValueError("cannot add an algebra element to a module element")
            return a
        return a + b

    def mul(self, a, b):
        if isinstance(a, ModElement) and isinstance(b, ModElement):
            raise ValueError("product of two module generators is not linear")
        return a * b

    def as_module_terms(self, value) -> dict:
        if isinstance(value, AlgElement):
            if value:
                raise ValueError("module differential must be linear in module generators")
            return {}
        return dict(value.terms)


# ---------------------------------------------------------------------------

@dataclass
class ModuleValidation:
    valid: bool
    minimal: bool = False
    generator: str | None = None
    message: str = "ok"
    errors: list = field(default_factory=list)
    coefficients_in_augmentation_ideal: bool = False
    degree_monotone: bool = False


def validate_module(M: SemifreeModule) -> ModuleValidation:
    """Degree consistency, strict lower-triangularity, d² = 0 and minimality."""
    errors = []
    for i, g in enumerate(M.generators):
        for (m, j), _ in M.diffs[i].items():
            if not 0 <= j < len(M.generators):
                errors.append((g.name, f"d{g.name} refers to an unknown generator"))
                break
            if M.base.degree(m) + M.degrees[j] != g.degree + 1:
                errors.append((g.name, f"degree mismatch: d{g.name} has a term of degree "
                                        f"{M.base.degree(m) + M.degrees[j]}, expected {g.degree + 1}"))
                break
            if j >= i:
                errors.append((g.name, f"d{g.name} involves {M.names[j]}, which is not earlier"))
                break
    if not errors:
        for i, g in enumerate(M.generators):
            dd = M.gen_differential(i).d()
            if dd:
                errors.append((g.name, f"d(d{g.name}) = {dd} ≠ 0"))
                break
    aug = all(m != UNIT for d in M.diffs for (m, _j) in d)
    mono = all(a <= b for a, b in zip(M.degrees, M.degrees[1:]))
    if errors:
        return ModuleValidation(False, False, errors[0][0], errors[0][1], errors, aug, mono)
    return ModuleValidation(True, aug and mono, None, "ok", [], aug, mono)


def is_minimal(M: SemifreeModule) -> bool:
    return validate_module(M).minimal


def module_cohomology(M, window) -> CohomologyResult:
    """Cohomology of a semifree module or module table on ``window``.

    Semifree modules are generated in every degree, so all requested degrees
    are exact.  Tables flag degrees whose neighbours lie outside their data.
    """
    w = as_window(window)
    if isinstance(M, SemifreeModule) and M.generators and any(
            g.degree < w.lo - 10**6 for g in M.generators):
        raise WindowError("generator degrees unbounded below")
    return complex_cohomology(M, w)


# ---------------------------------------------------------------------------

class ModuleTable(GeneratedComplex):
    """Windowed A-module given by explicit bases, differential and action constants.

    For a SemifreeCdga base the action is recorded for generators (keys are
    generator indices) and extended to monomials; for a GradedAlgebraTable
    base the keys are algebra basis labels.  ``open_below``/``open_above``
    record whether the module may be nonzero beyond the window.
    """

    def __init__(self, base, window, basis: Mapping[int, Sequence], diff: Mapping | None = None,
                 action: Mapping | None = None, open_below: bool = False, open_above: bool = False,
                 name: str | None = None):
        self.base = base
        self.window = as_window(window)
        self.basis_by_degree = {k: tuple(v) for k, v in basis.items() if v}
        for k in self.basis_by_degree:
            if k not in self.window:
                raise ValueError(f"basis in degree {k} outside window {self.window}")
        self.diff = {k: {t: Fraction(c) for t, c in v.items() if c} for k, v in (diff or {}).items()}
        self.action = {k: {t: Fraction(c) for t, c in v.items() if c} for k, v in (action or {}).items()}
        self.open_below = open_below
        self.open_above = open_above
        self.name = name
        self._degree = {lab: k for k, labs in self.basis_by_degree.items() for lab in labs}
        if len(self._degree) != sum(len(v) for v in self.basis_by_degree.values()):
            raise ValueError("basis labels must be unique")
        self._act_cache: dict = {}

    def known(self, k):
        if k < self.window.lo:
            return not self.open_below
        if k > self.window.hi:
            return not self.open_above
        return True

    def basis(self, k):
        if not self.known(k):
            raise WindowError(f"degree {k} outside the data of table {self.name or ''} {self.window}")
        return list(self.basis_by_degree.get(k, ()))

    def label_degree(self, lab):
        return self._degree[lab]

    def d(self, lab):
        return dict(self.diff.get(lab, {}))

    @property
    def min_degree(self):
        return min(self.basis_by_degree) if self.basis_by_degree else None

    @property
    def max_degree(self):
        return max(self.basis_by_degree) if self.basis_by_degree else None

    def _act_key(self, key, lab) -> dict:
        return self.action.get((key, lab), {})

    def act(self, a, lab) -> dict:
        """Action of an algebra basis label (a monomial for cdga bases)."""
        if isinstance(self.base, SemifreeCdga):
            if not a:
                return {lab: ONE}
            ck = (a, lab)
            hit = self._act_cache.get(ck)
            if hit is not None:
                return hit
            word = [i for i, e in a for _ in range(e)]
            cur = {lab: ONE}
            for i in reversed(word):
                nxt: dict = {}
                for x, c in cur.items():
                    vec_add(nxt, self._act_key(i, x), c)
                cur = nxt
                if not cur:
                    break
            self._act_cache[ck] = cur
            return cur
        if a == self.base.unit:
            return {lab: ONE}
        return dict(self._act_key(a, lab))

    def act_generator(self, i, lab):
        return self._act_key(i, lab)

    def format_label(self, lab):
        return str(lab)

    def format_vector(self, v):
        return format_terms(v, self.format_label)

    def __repr__(self):
        dims = {k: len(v) for k, v in sorted(self.basis_by_degree.items())}
        return f"ModuleTable({self.name or ''} window={self.window} dims={dims})"

    def validate(self) -> list[str]:
        """d² = 0, action Leibniz rule and graded commutativity on in-window data."""
        problems = []
        w = self.window
        for lab, k in self._degree.items():
            dd: dict = {}
            for t, c in self.d(lab).items():
                vec_add(dd, self.d(t), c)
            if dd and k + 2 in w:
                problems.append(f"d∘d ≠ 0 on {lab}")
        if not isinstance(self.base, SemifreeCdga):
            return problems
        A = self.base
        for lab, k in self._degree.items():
            for i, gdeg in enumerate(A.degrees):
                if k + gdeg + 1 > w.hi:
                    continue
                # d(g x) = (dg) x + (-1)^{|g|} g dx
                lhs: dict = {}
                for t, c in self.act_generator(i, lab).items():
                    vec_add(lhs, self.d(t), c)
                rhs: dict = {}
                for m, c in A.d_label(((i, 1),)).items():
                    vec_add(rhs, self.act(m, lab), c)
                for t, c in self.d(lab).items():
                    vec_add(rhs, self.act_generator(i, t), c * sign(gdeg))
                if lhs != rhs:
                    problems.append(f"Leibniz rule fails for {A.names[i]} on {lab}")
                for j, hdeg in enumerate(A.degrees):
                    if k + gdeg + hdeg > w.hi or j < i:
                        continue
                    gh: dict = {}
                    for t, c in self.act_generator(j, lab).items():
                        vec_add(gh, self.act_generator(i, t), c)
                    hg: dict = {}
                    for t, c in self.act_generator(i, lab).items():
                        vec_add(hg, self.act_generator(j, t), c)
                    if i == j:
                        if gdeg % 2 and gh:
                            problems.append(f"{A.names[i]}² does not act by zero on {lab}")
                    elif gh != {t: c * sign(gdeg * hdeg) for t, c in hg.items()}:
                        problems.append(f"{A.names[i]} and {A.names[j]} do not graded-commute on {lab}")
        return problems


def augmentation_module(A) -> ModuleTable:
    """Q as an A-module through the augmentation A -> Q."""
    return ModuleTable(A, (0, 0), {0: ("1",)}, name="Q")


# ---------------------------------------------------------------------------

class ModuleMorphism:
    """A-linear degree-0 map out of a semifree module, given on generators.

    The target may be a SemifreeModule or a ModuleTable; images are sparse
    vectors in the target's basis labels.
    """

    def __init__(self, source: SemifreeModule, target, images: Sequence[Mapping]):
        if len(images) != len(source.generators):
            raise ValueError("need one image per source generator")
        self.source = source
        self.target = target
        self.images = tuple({k: Fraction(v) for k, v in im.items() if v} for im in images)

    def on_label(self, label) -> dict:
        m, i = label
        out: dict = {}
        for t, c in self.images[i].items():
            vec_add(out, self.target.act(m, t), c)
        return out

    def apply(self, v: Mapping) -> dict:
        out: dict = {}
        for lab, c in v.items():
            vec_add(out, self.on_label(lab), c)
        return out

    def __call__(self, x):
        if isinstance(x, ModElement):
            res = self.apply(x.terms)
            return ModElement(self.target, res) if isinstance(self.target, SemifreeModule) else res
        return self.apply(x)

    def check(self) -> list[str]:
        problems = []
        for i, g in enumerate(self.source.generators):
            for t in self.images[i]:
                if self.target.label_degree(t) != g.degree:
                    problems.append(f"image of {g.name} has the wrong degree")
                    break
            lhs: dict = {}
            for t, c in self.images[i].items():
                vec_add(lhs, self.target.d(t), c)
            rhs = self.apply(self.source.diffs[i])
            if lhs != rhs:
                problems.append(f"d f({g.name}) ≠ f(d {g.name})")
        return problems

    def compose(self, first: "ModuleMorphism") -> "ModuleMorphism":
        """self ∘ first."""
        return ModuleMorphism(first.source, self.target, [self.apply(im) for im in first.images])

    def induced_map(self, window):
        """Matrices of H^k(f) in the representative bases of both sides."""
        w = as_window(window)
        Hs = module_cohomology(self.source, w)
        Ht = module_cohomology(self.target, w)
        out = {}
        for k in w:
            hs, ht = Hs[k], Ht[k]
            if hs.dim is None or ht.dim is None:
                out[k] = None
                continue
            out[k] = [ht.classify(self.apply(z)) for z in hs.representatives]
        return out

    @classmethod
    def identity(cls, M: SemifreeModule) -> "ModuleMorphism":
        return cls(M, M, [{(UNIT, i): ONE} for i in range(len(M))])


# ---------------------------------------------------------------------------

def shift_module(M: SemifreeModule, n: int) -> SemifreeModule:
    """M[n]: generator degrees drop by n, d v[n] = (-1)^n Σ (-1)^{n|a|} a · v_j[n]."""
    if n == 0:
        return M
    gens = [ModGenerator(g.name, g.degree - n) for g in M.generators]
    diffs = []
    for d in M.diffs:
        diffs.append({(a, j): c * sign(n) * sign(n * M.base.degree(a)) for (a, j), c in d.items()})
    return SemifreeModule(M.base, gens, diffs, M.name)


def tensor_over_A(M: SemifreeModule, N: SemifreeModule) -> SemifreeModule:
    """(A⊗V) ⊗_A (A⊗W) ≅ A⊗(V⊗W) with the Leibniz differential.

    d(v⊗w) = dv⊗w + (-1)^{|v|} v⊗dw, moving coefficients of dw past v with
    the Koszul sign (-1)^{|a||v|}.  Generators are ordered lexicographically,
    or by (degree, lex) when both factors are minimal.
    """
    if M.base != N.base:
        raise ValueError("tensor_over_A needs modules over the same base")
    A = M.base
    pairs = [(i, j) for i in range(len(M)) for j in range(len(N))]
    if is_minimal(M) and is_minimal(N):
        pairs.sort(key=lambda p: (M.degrees[p[0]] + N.degrees[p[1]], p))
    pos = {p: k for k, p in enumerate(pairs)}
    gens = [ModGenerator(f"{M.names[i]}⊗{N.names[j]}", M.degrees[i] + N.degrees[j]) for i, j in pairs]
    diffs = []
    for i, j in pairs:
        d: dict = {}
        for (a, i2), c in M.diffs[i].items():
            vec_add(d, {(a, pos[(i2, j)]): c})
        s = sign(M.degrees[i])
        for (b, j2), c in N.diffs[j].items():
            vec_add(d, {(b, pos[(i, j2)]): c}, s * sign(A.degree(b) * M.degrees[i]))
        diffs.append(d)
    name = f"{M.name}⊗{N.name}" if M.name and N.name else None
    return SemifreeModule(A, gens, diffs, name)


# ---------------------------------------------------------------------------

def base_change(M, f, mode: str = "extend", window=None):
    """Extension of scalars along a cdga map, or restriction to a ModuleTable.

    ``f`` is a CdgaMorphism, or the string ``"augmentation"`` for A -> Q.
    For ``restrict``, ``M`` is a SemifreeModule over f.target, or the cdga
    f.target itself regarded as a module over itself.
    """
    if mode == "extend":
        if isinstance(f, str):
            if f != "augmentation":
                raise ValueError(f"unknown base change {f!r}")
            from .cdga import augmentation
            f = augmentation(M.base)
        if f.source != M.base:
            raise ValueError("module is not over the source of the morphism")
        diffs = []
        for d in M.diffs:
            nd: dict = {}
            for (a, j), c in d.items():
                for b, bc in f.map_monomial(a).items():
                    vec_add(nd, {(b, j): bc * c})
            diffs.append(nd)
        return SemifreeModule(f.target, M.generators, diffs, M.name)
    if mode == "restrict":
        if window is None:
            raise WindowError("restriction needs an explicit window")
        if isinstance(f, str):
            raise ValueError("restriction needs a CdgaMorphism")
        w = as_window(window)
        if isinstance(M, SemifreeCdga):
            if M != f.target:
                raise ValueError("algebra is not the target of the morphism")
            M = SemifreeModule.unit(M, 0, "1")
        if M.base != f.target:
            raise ValueError("module is not over the target of the morphism")
        basis = {k: M.basis(k) for k in w}
        labels = [lab for k in w for lab in basis[k]]
        diff = {lab: M.d(lab) for lab in labels}
        action = {}
        for i in range(len(f.source)):
            img = f.images[i]
            for lab in labels:
                out: dict = {}
                for b, c in img.terms.items():
                    vec_add(out, M.act(b, lab), c)
                if out:
                    action[(i, lab)] = out
        lo_closed = M.min_degree is None or w.lo <= M.min_degree
        return _LabelledTable(f.source, w, basis, diff, action, open_below=not lo_closed,
                              open_above=True, name=M.name, fmt=M.format_label)
    raise ValueError(f"unknown base-change mode {mode!r}")


class _LabelledTable(ModuleTable):
    def __init__(self, *args, fmt=None, **kwargs):
        super().__init__(*args, **kwargs)
        self._fmt = fmt

    def format_label(self, lab):
        return self._fmt(lab) if self._fmt else str(lab)


def truncate_above(M, top: int, name=None) -> ModuleTable:
    """Bounded-above quotient M / (C^top ⊕ M^{>top}) with C^top a complement of
    the cocycles.  A quasi-isomorphism whenever H^{>top}(M) = 0."""
    lo = M.min_degree
    if lo is None:
        return ModuleTable(M.base, (top, top), {}, name=name)
    if isinstance(M, ModuleTable) and M.open_below:
        raise WindowError("cannot truncate a table that is open below")
    lo = min(lo, top)
    basis = {k: list(M.basis(k)) for k in range(lo, top + 1)}
    # pivot columns of d: M^top -> M^{top+1} span a complement of the cocycles
    from .exact import EchelonBasis
    if not M.known(top + 1):
        raise WindowError(f"degree {top + 1} of the module is not known")
    top_basis = basis.get(top, [])
    idx_next = {lab: i for i, lab in enumerate(M.basis(top + 1))}
    eb = EchelonBasis()
    for j, lab in enumerate(top_basis):
        eb.add({idx_next[t]: c for t, c in M.d(lab).items()}, {j: ONE})
    # which basis vectors of M^top are needed to span the image: greedy choice
    chosen = []
    eb2 = EchelonBasis()
    for j, lab in enumerate(top_basis):
        col = {idx_next[t]: c for t, c in M.d(lab).items()}
        if col and eb2.add(col) is not None:
            chosen.append(j)
    dropped = {top_basis[j] for j in chosen}
    basis[top] = [lab for lab in top_basis if lab not in dropped]
    keep = {lab for k in basis for lab in basis[k]}

    def proj(v):
        return {t: c for t, c in v.items() if t in keep}

    diff = {lab: proj(M.d(lab)) for lab in keep if M.label_degree(lab) < top}
    action = {}
    A = M.base
    if isinstance(A, SemifreeCdga):
        for lab in keep:
            k = M.label_degree(lab)
            for i, gd in enumerate(A.degrees):
                if k + gd <= top:
                    v = proj(M.act(((i, 1),), lab))
                    if v:
                        action[(i, lab)] = v
    else:
        for lab in keep:
            k = M.label_degree(lab)
            for j in range(1, top - k + 1):
                for a in A.basis(j):
                    v = proj(M.act(a, lab))
                    if v:
                        action[(a, lab)] = v
    fmt = getattr(M, "format_label", str)
    return _LabelledTable(A, (lo, top), basis, diff, action, open_below=False,
                          open_above=False, name=name or getattr(M, "name", None), fmt=fmt)


# ---------------------------------------------------------------------------

def free_A_algebra(M: SemifreeModule, name=None) -> RelativeCdga:
    """Λ_A(A⊗V) ≅ A⊗ΛV with the module differential reused on generators."""
    A = M.base
    bad = [g.name for g in M.generators if g.degree < 1]
    if bad:
        raise ValueError(f"free_A_algebra needs generators of degree ≥ 1, got {bad}")
    nb = len(A)
    specs = []
    for i, g in enumerate(M.generators):
        terms: dict = {}
        for (a, j), c in M.diffs[i].items():
            terms[a + ((nb + j, 1),)] = terms.get(a + ((nb + j, 1),), ZERO) + c
        specs.append((g.name, g.degree, terms))
    return RelativeCdga(A, A.extended(specs, name=name))


def _fibre_order_key(rel: RelativeCdga, mu):
    n = len(rel.total)
    exps = dict(mu)
    return tuple(exps.get(i, 0) for i in range(n - 1, len(rel.base) - 1, -1))


def _monomial_module(rel: RelativeCdga, window, include_unit: bool, name=None) -> SemifreeModule:
    w = as_window(window)
    B = rel.total
    nb = len(rel.base)
    fibre_degrees = [B.degrees[i] for i in rel.fibre_indices]
    if any(d < 1 for d in fibre_degrees):
        raise ValueError("fibre generators must have degree ≥ 1")
    mons = []
    for k in range(0, w.hi + 1):
        for m in B.basis(k):
            base_part, fib = rel.split_monomial(m)
            if base_part:
                continue
            if fib or include_unit:
                mons.append(m)
    mons.sort(key=lambda m: _fibre_order_key(rel, m))
    pos = {m: i for i, m in enumerate(mons)}
    diffs = []
    for mu in mons:
        d: dict = {}
        for m, c in B.d_label(mu).items():
            a, fib = rel.split_monomial(m)
            if not fib and not include_unit:
                raise ValueError("the relative algebra is not augmented over its base")
            if fib not in pos:
                raise WindowError(f"d({B.format_monomial(mu)}) leaves the window; widen it")
            d[(a, pos[fib])] = d.get((a, pos[fib]), ZERO) + c
        diffs.append(d)
    aug = all(a != UNIT for d in diffs for (a, _j) in d)
    order = list(range(len(mons)))
    if aug:
        order.sort(key=lambda i: (B.degree(mons[i]), i))
    new_pos = {old: new for new, old in enumerate(order)}

    def gname(m):
        if not m:
            return "one"
        return "·".join(B.names[i] for i, e in m for _ in range(e))

    gens = [ModGenerator(gname(mons[i]), B.degree(mons[i])) for i in order]
    nd = [{(a, new_pos[j]): c for (a, j), c in diffs[i].items()} for i in order]
    # translate base monomials: base indices are the same in A and B
    return SemifreeModule(rel.base, gens, nd, name)


def aug_ideal(rel: RelativeCdga, window, name=None) -> SemifreeModule:
    """The augmentation ideal A⊗Λ^{≥1}V of an augmented relative algebra, as an A-module."""
    return _monomial_module(rel, window, include_unit=False, name=name)


def underlying_module(rel: RelativeCdga, window, name=None) -> SemifreeModule:
    """A⊗ΛV regarded as an A-module (all fibre monomials, including 1)."""
    return _monomial_module(rel, window, include_unit=True, name=name)


def connected_unit_module(A: SemifreeCdga) -> SemifreeModule:
    return SemifreeModule.unit(A)


__all__ = [
    "ModGenerator", "SemifreeModule", "ModElement", "ModuleTable", "ModuleMorphism",
    "ModuleValidation", "validate_module", "module_cohomology", "shift_module",
    "tensor_over_A", "base_change", "truncate_above", "free_A_algebra", "aug_ideal",
    "underlying_module", "augmentation_module", "AlgRing", "ModuleRing", "ground_field",
]
