"""
Polynomial differential forms on the standard simplices.

A form on Δ^n is a sparse map (exponents of t_1..t_n, sorted wedge subset of
{1..n}) -> Fraction.  The barycentric coordinate t_0 and its differential
are eliminated through t_0 = 1 - Σ t_i and dt_0 = -Σ dt_i, so every form has
a unique representation.  dt_1∧...∧dt_n is the positive top form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Mapping

from . import expr
from .exact import vec_add


def _merge_sign(S1, S2) -> int:
    """Sign of sorting the concatenation S1 + S2 (both sorted, disjoint)."""
    inv = 0
    for i in S1:
        for j in S2:
            if i > j:
                inv += 1
    return -1 if inv % 2 else 1


class PolyForm:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping | None = None):
        if n < 0:
            raise ValueError("simplex dimension must be ≥ 0")
        self.n = n
        clean = {}
        for (e, S), c in (terms or {}).items():
            e, S = tuple(e), tuple(S)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for Δ^{n}")
            if list(S) != sorted(set(S)) or any(not 1 <= i <= n for i in S):
                raise ValueError(f"bad wedge subset {S} for Δ^{n}")
            if c:
                clean[(e, S)] = clean.get((e, S), 0) + Fraction(c)
        self.terms = {k: v for k, v in clean.items() if v}

    # -- constructors ------------------------------------------------------------
    @classmethod
    def const(cls, n, c=1):
        return cls(n, {((0,) * n, ()): c})

    @classmethod
    def t(cls, n, i):
        """Barycentric coordinate t_i, 0 ≤ i ≤ n."""
        if not 0 <= i <= n:
            raise ValueError(f"t{i} is not a coordinate on Δ^{n}")
        if i == 0:
            out = {((0,) * n, ()): 1}
            for k in range(1, n + 1):
                out[(_unit(n, k), ())] = -1
            return cls(n, out)
        return cls(n, {(_unit(n, i), ()): 1})

    @classmethod
    def dt(cls, n, i):
        if not 0 <= i <= n:
            raise ValueError(f"dt{i} is not a form on Δ^{n}")
        if i == 0:
            return cls(n, {((0,) * n, (k,)): -1 for k in range(1, n + 1)})
        return cls(n, {((0,) * n, (i,)): 1})

    @classmethod
    def monomial(cls, exps, S=(), c=1):
        return cls(len(exps), {(tuple(exps), tuple(S)): c})

    @classmethod
    def parse(cls, n, text: str) -> "PolyForm":
        """Forms in the expression grammar: t0..tn, dt0..dtn, ``*`` is the wedge."""
        return expr.evaluate(text, _FormRing(n))

    # -- structure ------------------------------------------------------------------
    def degrees(self) -> set:
        return {len(S) for (_e, S) in self.terms}

    @property
    def degree(self) -> int | None:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("form is not homogeneous")
        return ds.pop() if ds else None

    def part(self, k) -> "PolyForm":
        return PolyForm(self.n, {key: c for key, c in self.terms.items() if len(key[1]) == k})

    def __add__(self, other):
        _same(self, other)
        return PolyForm(self.n, vec_add(dict(self.terms), other.terms))

    def __neg__(self):
        return PolyForm(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PolyForm(self.n, {k: c * other for k, c in self.terms.items()})
        return form_wedge(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, PolyForm) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, S), c in sorted(self.terms.items()):
            fac = [f"t{i + 1}" + (f"^{x}" if x > 1 else "") for i, x in enumerate(e) if x]
            fac += [f"dt{i}" for i in S]
            body = "*".join(fac)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def d(self):
        return form_d(self)


def _unit(n, i):
    e = [0] * n
    e[i - 1] = 1
    return tuple(e)


def _same(a, b):
    if not isinstance(b, PolyForm):
        raise TypeError("expected a PolyForm")
    if a.n != b.n:
        raise ValueError(f"forms on Δ^{a.n} and Δ^{b.n} cannot be combined")


class _FormRing:
    def __init__(self, n):
        self.n = n

    def const(self, q):
        return PolyForm.const(self.n, q)

    def symbol(self, name):
        if name.startswith("dt") and name[2:].isdigit():
            i = int(name[2:])
            if i <= self.n:
                return PolyForm.dt(self.n, i)
        elif name.startswith("t") and name[1:].isdigit():
            i = int(name[1:])
            if i <= self.n:
                return PolyForm.t(self.n, i)
        raise KeyError(name)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return form_wedge(a, b)


def form_wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    _same(a, b)
    out: dict = {}
    for (e1, S1), c1 in a.terms.items():
        for (e2, S2), c2 in b.terms.items():
            if set(S1) & set(S2):
                continue
            key = (tuple(x + y for x, y in zip(e1, e2)), tuple(sorted(S1 + S2)))
            out[key] = out.get(key, 0) + c1 * c2 * _merge_sign(S1, S2)
    return PolyForm(a.n, out)


def form_d(a: PolyForm) -> PolyForm:
    """d(f dt_S) = Σ_i ∂f/∂t_i dt_i ∧ dt_S."""
    out: dict = {}
    for (e, S), c in a.terms.items():
        for i in range(1, a.n + 1):
            x = e[i - 1]
            if not x or i in S:
                continue
            e2 = list(e)
            e2[i - 1] -= 1
            s = -1 if sum(1 for j in S if j < i) % 2 else 1
            key = (tuple(e2), tuple(sorted(S + (i,))))
            out[key] = out.get(key, 0) + s * x * c
    return PolyForm(a.n, out)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimplicialOperator:
    """Face ∂_i: 𝔄_n -> 𝔄_{n-1} or degeneracy s_i: 𝔄_n -> 𝔄_{n+1}; n is the source dimension."""

    kind: str
    n: int
    i: int

    def __post_init__(self):
        if self.kind not in ("face", "degeneracy"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == "face" and self.n < 1:
            raise ValueError("faces need n ≥ 1")
        if not 0 <= self.i <= self.n:
            raise ValueError(f"index {self.i} out of range for n = {self.n}")

    @classmethod
    def face(cls, n, i):
        return cls("face", n, i)

    @classmethod
    def degeneracy(cls, n, i):
        return cls("degeneracy", n, i)

    @property
    def target_dim(self):
        return self.n - 1 if self.kind == "face" else self.n + 1

    def image_of_t(self, k) -> PolyForm:
        """Image of the coordinate t_k (0 ≤ k ≤ n) in the target."""
        m, i = self.target_dim, self.i
        if self.kind == "face":
            if k < i:
                return PolyForm.t(m, k)
            if k == i:
                return PolyForm(m)
            return PolyForm.t(m, k - 1)
        if k < i:
            return PolyForm.t(m, k)
        if k == i:
            return PolyForm.t(m, k) + PolyForm.t(m, k + 1)
        return PolyForm.t(m, k + 1)

    def __call__(self, a):
        return apply_simplicial_map(self, a)


def apply_simplicial_map(op: SimplicialOperator, a: PolyForm) -> PolyForm:
    if a.n != op.n:
        raise ValueError(f"operator acts on Δ^{op.n} forms, got Δ^{a.n}")
    m = op.target_dim
    t_img = [op.image_of_t(k) for k in range(1, op.n + 1)]
    dt_img = [form_d(x) for x in t_img]
    powers: dict = {}

    def power(k, e):
        key = (k, e)
        if key not in powers:
            powers[key] = PolyForm.const(m) if e == 0 else form_wedge(power(k, e - 1), t_img[k])
        return powers[key]

    out = PolyForm(m)
    for (e, S), c in a.terms.items():
        term = PolyForm.const(m, c)
        for k, x in enumerate(e):
            if x:
                term = form_wedge(term, power(k, x))
        for j in S:
            term = form_wedge(term, dt_img[j - 1])
        out = out + term
    return out


def integrate(a: PolyForm) -> Fraction:
    """∫_{Δ^n} a for a top-degree form, via ∫ t^e dt_1..dt_n = Π e_i! / (n + Σ e_i)!."""
    n = a.n
    top = tuple(range(1, n + 1))
    total = Fraction(0)
    for (e, S), c in a.terms.items():
        if S != top:
            raise ValueError(f"integrate needs a form of degree {n}")
        num = 1
        for x in e:
            num *= factorial(x)
        total += c * Fraction(num, factorial(n + sum(e)))
    return total


def restrict_to_face(a: PolyForm, face) -> PolyForm:
    """Pull a form on Δ^n back to the face spanned by the increasing vertex tuple ``face``."""
    face = tuple(face)
    if list(face) != sorted(set(face)) or any(not 0 <= v <= a.n for v in face):
        raise ValueError(f"bad face {face} of Δ^{a.n}")
    out = a
    for j in sorted(set(range(a.n + 1)) - set(face), reverse=True):
        out = apply_simplicial_map(SimplicialOperator.face(out.n, j), out)
    return out


@dataclass
class Cochain:
    """Rational k-cochain on Δ^n: one value per increasing (k+1)-tuple of vertices."""

    n: int
    k: int
    values: dict

    @classmethod
    def faces(cls, n, k):
        return list(combinations(range(n + 1), k + 1))

    def coboundary(self) -> "Cochain":
        vals = {}
        for sigma in self.faces(self.n, self.k + 1):
            v = Fraction(0)
            for j in range(len(sigma)):
                v += (-1) ** j * self.values.get(sigma[:j] + sigma[j + 1:], 0)
            vals[sigma] = v
        return Cochain(self.n, self.k + 1, vals)

    def cup(self, other: "Cochain") -> "Cochain":
        """Alexander–Whitney cup product."""
        k, l = self.k, other.k
        vals = {}
        for sigma in self.faces(self.n, k + l):
            vals[sigma] = self.values.get(sigma[:k + 1], 0) * other.values.get(sigma[k:], 0)
        return Cochain(self.n, k + l, vals)


def stokes_pair(a: PolyForm, k: int) -> Cochain:
    """ρ(a) in degree k: the integral of a over each k-face of Δ^n."""
    if not 0 <= k <= a.n:
        raise ValueError(f"degree {k} out of range for Δ^{a.n}")
    ak = a.part(k)
    vals = {}
    for sigma in Cochain.faces(a.n, k):
        vals[sigma] = integrate(restrict_to_face(ak, sigma))
    return Cochain(a.n, k, vals)


def monomial_forms(n: int, max_poly: int, max_form: int | None = None):
    """All monomial forms t^e dt_S on Δ^n with Σe ≤ max_poly and |S| ≤ max_form."""
    top = n if max_form is None else max_form
    exps = [()]
    for _ in range(n):
        exps = [e + (x,) for e in exps for x in range(max_poly + 1)]
    exps = [e for e in exps if sum(e) <= max_poly]
    for e in exps:
        for k in range(0, top + 1):
            for S in combinations(range(1, n + 1), k):
                yield PolyForm(n, {(e, S): 1})


def stokes_check(a: PolyForm) -> bool:
    """ρ(da) = δρ(a) in every degree."""
    da = form_d(a)
    for k in range(0, a.n):
        if stokes_pair(da, k + 1).values != stokes_pair(a, k).coboundary().values:
            return False
    return True


__all__ = [
    "PolyForm", "form_wedge", "form_d", "SimplicialOperator", "apply_simplicial_map",
    "integrate", "restrict_to_face", "Cochain", "stokes_pair", "monomial_forms", "stokes_check",
]
