"""
Model files: JSON text with a versioned schema.

    {
      "format": "sullivan-dgm/1",
      "algebras": [{"name": "S2", "generators": [
          {"name": "x2", "degree": 2, "diff": "0"},
          {"name": "x3", "degree": 3, "diff": "x2^2"}]}],
      "modules": [{"name": "hopf", "base": "S2", "generators": [
          {"name": "e0", "degree": 0, "diff": "0"},
          {"name": "e1", "degree": 1, "diff": "x2*e0"}]}],
      "tables": [{"name": "T", "base": "S2", "window": [0, 2],
                  "basis": {"0": ["a"], "2": ["b"]},
                  "diff": {}, "action": [{"generator": "x2", "label": "a", "value": {"b": "1"}}],
                  "open_below": false, "open_above": false}]
    }

Differentials use the expression grammar.  Everything is validated eagerly
and failures carry the line and column of the offending string.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import expr
from .cdga import GeneratorSpec, SemifreeCdga, _freeze, format_terms, validate_cdga
from .modules import (
    ModGenerator, ModuleRing, ModuleTable, SemifreeModule, AlgRing, validate_module,
)

FORMAT = "sullivan-dgm/1"

_STRING = re.compile(r'"(?:[^"\\]|\\.)*"')


class ModelError(ValueError):
    """Diagnostic with an optional source position and generator name."""

    def __init__(self, message, line=None, col=None, generator=None):
        self.message = message
        self.line = line
        self.col = col
        self.generator = generator
        where = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class ModelFile:
    version: str = FORMAT
    algebras: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    table_specs: dict = field(default_factory=dict)

    def algebra(self, name):
        try:
            return self.algebras[name]
        except KeyError:
            raise ModelError(f"no algebra named {name!r}") from None

    def module(self, name):
        try:
            return self.modules[name]
        except KeyError:
            raise ModelError(f"no module named {name!r}") from None

    def lookup(self, name):
        """A module or table by name."""
        if name in self.modules:
            return self.modules[name]
        if name in self.tables:
            return self.tables[name]
        raise ModelError(f"no module or table named {name!r}")


# -- source positions ---------------------------------------------------------

class _Positions:
    """Maps JSON paths to (line, col) of their string token.

    Keys and string values appear in the text in the same order as a
    pre-order walk of the parsed document, so pairing the two sequences
    recovers the position of every string.
    """

    def __init__(self, text, doc):
        starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                starts.append(i + 1)
        self._starts = starts
        tokens = [m.start() for m in _STRING.finditer(text)]
        paths = []
        self._walk(doc, (), paths)
        self._pos = dict(zip(paths, tokens)) if len(paths) == len(tokens) else {}

    def _walk(self, node, path, out):
        if isinstance(node, dict):
            for k, v in node.items():
                out.append(path + (k, "#key"))
                self._walk(v, path + (k,), out)
        elif isinstance(node, list):
            for i, v in enumerate(node):
                self._walk(v, path + (i,), out)
        elif isinstance(node, str):
            out.append(path)

    def locate(self, path, offset=0):
        """(line, col), 1-based, of the string at ``path`` (or its key)."""
        pos = self._pos.get(tuple(path))
        if pos is None:
            pos = self._pos.get(tuple(path) + ("#key",))
        if pos is None:
            return None, None
        pos += 1 + offset
        line = 0
        lo, hi = 0, len(self._starts) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            if self._starts[mid] <= pos:
                line, lo = mid, mid + 1
            else:
                hi = mid - 1
        return line + 1, pos - self._starts[line] + 1


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ValueError(f"duplicate key {k!r}")
        out[k] = v
    return out


# -- parsing ---------------------------------------------------------------------

def parse_model_file(text: str) -> ModelFile:
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise ModelError(f"malformed JSON: {exc}") from None
    pos = _Positions(text, doc)
    if not isinstance(doc, dict):
        raise ModelError("top level must be an object", 1, 1)
    version = doc.get("format")
    if version != FORMAT:
        line, col = pos.locate(("format",))
        raise ModelError(f"unrecognized format {version!r} (expected {FORMAT!r})", line, col)
    unknown = set(doc) - {"format", "algebras", "modules", "tables"}
    if unknown:
        line, col = pos.locate((sorted(unknown)[0],))
        raise ModelError(f"unknown section {sorted(unknown)[0]!r}", line, col)
    mf = ModelFile(version)
    for i, spec in enumerate(_list(doc, "algebras", pos)):
        A = _parse_algebra(spec, ("algebras", i), pos)
        if A.name in mf.algebras:
            raise ModelError(f"duplicate algebra {A.name!r}", *pos.locate(("algebras", i, "name")))
        mf.algebras[A.name] = A
    for i, spec in enumerate(_list(doc, "modules", pos)):
        M = _parse_module(spec, ("modules", i), pos, mf)
        if M.name in mf.modules or M.name in mf.algebras:
            raise ModelError(f"duplicate name {M.name!r}", *pos.locate(("modules", i, "name")))
        mf.modules[M.name] = M
    for i, spec in enumerate(_list(doc, "tables", pos)):
        T = _parse_table(spec, ("tables", i), pos, mf)
        if T.name in mf.tables or T.name in mf.modules:
            raise ModelError(f"duplicate name {T.name!r}", *pos.locate(("tables", i, "name")))
        mf.tables[T.name] = T
        mf.table_specs[T.name] = spec
    return mf


def _list(doc, key, pos):
    val = doc.get(key, [])
    if not isinstance(val, list):
        raise ModelError(f"section {key!r} must be a list", *pos.locate((key,)))
    return val


def _field(spec, key, kind, path, pos):
    if not isinstance(spec, dict):
        raise ModelError(f"expected an object at {'/'.join(map(str, path))}")
    if key not in spec:
        line, col = pos.locate(path + ("name",))
        raise ModelError(f"missing field {key!r} in {'/'.join(map(str, path))}", line, col)
    val = spec[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise ModelError(f"field {key!r} must be an integer", *pos.locate(path + (key,)))
    if kind is str and not isinstance(val, str):
        raise ModelError(f"field {key!r} must be a string", *pos.locate(path + (key,)))
    return val


def _expr_error(exc, path, pos, generator):
    off = exc.col if exc.col is not None else 0
    line, col = pos.locate(path, off)
    return ModelError(f"generator {generator}: {exc.bare}", line, col, generator)


def _generators(spec, path, pos):
    gens = _field(spec, "generators", list, path, pos)
    out = []
    for j, g in enumerate(gens):
        gp = path + ("generators", j)
        name = _field(g, "name", str, gp, pos)
        deg = _field(g, "degree", int, gp, pos)
        diff = g.get("diff", "0")
        if not isinstance(diff, str):
            raise ModelError(f"generator {name}: diff must be an expression string",
                             *pos.locate(gp + ("diff",)), generator=name)
        out.append((name, deg, diff, gp))
    return out


def _parse_algebra(spec, path, pos) -> SemifreeCdga:
    name = _field(spec, "name", str, path, pos)
    gens = _generators(spec, path, pos)
    try:
        skeleton = SemifreeCdga([GeneratorSpec(n, d) for n, d, _, _ in gens], name)
    except ValueError as exc:
        raise ModelError(f"algebra {name}: {exc}", *pos.locate(path + ("name",))) from None
    ring = AlgRing(skeleton)
    specs = []
    for n, d, text, gp in gens:
        try:
            val = expr.evaluate(text, ring)
        except expr.ExprError as exc:
            raise _expr_error(exc, gp + ("diff",), pos, n) from None
        specs.append(GeneratorSpec(n, d, _freeze(val.terms)))
    A = SemifreeCdga(specs, name)
    rep = validate_cdga(A)
    if not rep.valid:
        gp = next(g[3] for g in gens if g[0] == rep.generator)
        line, col = pos.locate(gp + ("diff",))
        if line is None:
            line, col = pos.locate(gp + ("name",))
        raise ModelError(f"algebra {name}: {rep.message}", line, col, rep.generator)
    return A


def _parse_module(spec, path, pos, mf) -> SemifreeModule:
    name = _field(spec, "name", str, path, pos)
    base_name = _field(spec, "base", str, path, pos)
    if base_name not in mf.algebras:
        raise ModelError(f"module {name}: unknown base algebra {base_name!r}", *pos.locate(path + ("base",)))
    A = mf.algebras[base_name]
    gens = _generators(spec, path, pos)
    try:
        skeleton = SemifreeModule(A, [ModGenerator(n, d) for n, d, _, _ in gens],
                                  [{} for _ in gens], name)
        ring = ModuleRing(skeleton)
    except ValueError as exc:
        raise ModelError(f"module {name}: {exc}", *pos.locate(path + ("name",))) from None
    diffs = []
    for n, d, text, gp in gens:
        try:
            val = expr.evaluate(text, ring)
            diffs.append(ring.as_module_terms(val))
        except expr.ExprError as exc:
            raise _expr_error(exc, gp + ("diff",), pos, n) from None
        except ValueError as exc:
            raise ModelError(f"generator {n}: {exc}", *pos.locate(gp + ("diff",)), generator=n) from None
    M = SemifreeModule(A, skeleton.generators, diffs, name)
    rep = validate_module(M)
    if not rep.valid:
        gp = next((g[3] for g in gens if g[0] == rep.generator), path)
        line, col = pos.locate(gp + ("diff",))
        raise ModelError(f"module {name}: {rep.message}", line, col, rep.generator)
    return M


def _fraction(val, path, pos):
    try:
        if isinstance(val, bool):
            raise ValueError
        return Fraction(val) if isinstance(val, (int, str)) else Fraction(str(val))
    except (ValueError, ZeroDivisionError):
        raise ModelError(f"bad coefficient {val!r}", *pos.locate(path)) from None


def _vector(obj, path, pos, labels):
    if not isinstance(obj, dict):
        raise ModelError("expected an object of label -> coefficient", *pos.locate(path))
    out = {}
    for lab, c in obj.items():
        if lab not in labels:
            raise ModelError(f"unknown basis label {lab!r}", *pos.locate(path + (lab,)))
        out[lab] = _fraction(c, path + (lab,), pos)
    return out


def _parse_table(spec, path, pos, mf) -> ModuleTable:
    name = _field(spec, "name", str, path, pos)
    base_name = _field(spec, "base", str, path, pos)
    if base_name not in mf.algebras:
        raise ModelError(f"table {name}: unknown base algebra {base_name!r}", *pos.locate(path + ("base",)))
    A = mf.algebras[base_name]
    win = spec.get("window")
    if not (isinstance(win, list) and len(win) == 2 and all(isinstance(x, int) for x in win)):
        raise ModelError(f"table {name}: window must be [lo, hi]", *pos.locate(path + ("name",)))
    basis_spec = _field(spec, "basis", dict, path, pos)
    basis = {}
    for k, labs in basis_spec.items():
        try:
            deg = int(k)
        except ValueError:
            raise ModelError(f"table {name}: degree key {k!r} is not an integer",
                             *pos.locate(path + ("basis", k))) from None
        basis[deg] = list(labs)
    labels = {lab for labs in basis.values() for lab in labs}
    diff = {lab: _vector(v, path + ("diff", lab), pos, labels)
            for lab, v in spec.get("diff", {}).items()}
    for lab in diff:
        if lab not in labels:
            raise ModelError(f"table {name}: unknown basis label {lab!r}", *pos.locate(path + ("diff", lab)))
    action = {}
    for j, entry in enumerate(spec.get("action", [])):
        ep = path + ("action", j)
        g = _field(entry, "generator", str, ep, pos)
        lab = _field(entry, "label", str, ep, pos)
        if g not in A.names:
            raise ModelError(f"table {name}: unknown generator {g!r}", *pos.locate(ep + ("generator",)), generator=g)
        if lab not in labels:
            raise ModelError(f"table {name}: unknown basis label {lab!r}", *pos.locate(ep + ("label",)))
        action[(A.index(g), lab)] = _vector(entry.get("value", {}), ep + ("value",), pos, labels)
    try:
        T = ModuleTable(A, tuple(win), basis, diff, action, bool(spec.get("open_below", False)),
                        bool(spec.get("open_above", False)), name)
    except ValueError as exc:
        raise ModelError(f"table {name}: {exc}", *pos.locate(path + ("name",))) from None
    problems = T.validate()
    if problems:
        raise ModelError(f"table {name}: {problems[0]}", *pos.locate(path + ("name",)))
    return T


def load_model_file(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model_file(fh.read())


# -- serialization ---------------------------------------------------------------

def algebra_spec(A: SemifreeCdga) -> dict:
    return {"name": A.name, "generators": [
        {"name": g.name, "degree": g.degree,
         "diff": format_terms(dict(g.differential), A.format_monomial)}
        for g in A.generators]}


def module_spec(M: SemifreeModule) -> dict:
    return {"name": M.name, "base": M.base.name, "generators": [
        {"name": n, "degree": d, "diff": M.differential_string(i)}
        for i, (n, d) in enumerate(zip(M.names, M.degrees))]}


def serialize(mf: ModelFile) -> str:
    doc = {"format": FORMAT,
           "algebras": [algebra_spec(A) for A in mf.algebras.values()],
           "modules": [module_spec(M) for M in mf.modules.values()]}
    if mf.tables:
        doc["tables"] = [mf.table_specs[n] for n in mf.tables]
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def structure(mf: ModelFile) -> dict:
    """Comparable snapshot of all parsed objects."""
    return {
        "algebras": {n: A.generators for n, A in mf.algebras.items()},
        "modules": {n: (M.base.generators, M.generators, M.diffs) for n, M in mf.modules.items()},
        "tables": {n: (T.window.lo, T.window.hi, T.basis_by_degree, T.diff, T.action,
                       T.open_below, T.open_above) for n, T in mf.tables.items()},
    }


__all__ = ["FORMAT", "ModelError", "ModelFile", "parse_model_file", "load_model_file", "serialize",
           "structure", "algebra_spec", "module_spec"]
