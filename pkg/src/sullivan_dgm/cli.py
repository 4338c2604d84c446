"""
Command line interface.

Every subcommand prints a report (text or JSON).  Exit status is 0 for a
complete result, 2 for a result flagged incomplete and 1 for errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bar import derived_tensor_tor, ext_via_bar, required_length
from .cdga import cdga_cohomology, validate_cdga
from .exact import DegreeWindow, WindowError
from .expr import ExprError
from .hom import ext_via_hom
from .minimal import minimal_resolution, minimize, split_postnikov
from .modelfile import ModelError, load_model_file
from .modules import (
    SemifreeModule, augmentation_module, module_cohomology, tensor_over_A,
    truncate_above, validate_module,
)
from .plforms import PolyForm, form_d, integrate, stokes_pair
from .report import Report, error_report
from .specseq import hyper_ext_ss, minimal_ss


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _window(text):
    try:
        return DegreeWindow.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sullivan-dgm", description="Exact computations with semifree cdgas and dg-modules.")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--output", help="also write the report to this file")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def cmd(name, help_, window=True, model=True):
        s = sub.add_parser(name, help=help_)
        if model:
            s.add_argument("model", help="model file")
        if window:
            s.add_argument("--window", type=_window, required=True, help="degree window lo:hi")
        s.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS)
        s.add_argument("--output", default=argparse.SUPPRESS)
        return s

    s = cmd("cohomology", "cohomology of an algebra or module")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--algebra")
    g.add_argument("--module")

    cmd("validate", "validate every object in a model file", window=False)

    s = cmd("minimize", "minimal model of a semifree module", window=False)
    s.add_argument("--module", required=True)

    s = cmd("resolve", "minimal semifree resolution of Q or a table")
    s.add_argument("--algebra", required=True)
    s.add_argument("--target", required=True, help="Q or a table name")
    s.add_argument("--max-rounds", type=int, default=256)
    s.add_argument("--max-generators", type=int, default=64)

    s = cmd("postnikov", "Postnikov split of a minimal module")
    s.add_argument("--module", required=True)
    s.add_argument("--at", type=int, required=True)

    s = cmd("tensor", "cohomology of M ⊗_A N for semifree M, N")
    s.add_argument("--module", required=True)
    s.add_argument("--with", dest="other", required=True)

    s = cmd("ext", "Ext_A(N, M)")
    s.add_argument("--via", choices=["hom", "bar"], required=True)
    s.add_argument("--module", required=True)
    s.add_argument("--target", required=True, help="Q, A or a module/table name")
    s.add_argument("--length", type=int, help="bar word-length cap")
    s.add_argument("--target-top", type=int, help="degree above which H(target) vanishes")

    s = cmd("tor", "Tor_A(M, N) through the bar construction")
    s.add_argument("--module", required=True)
    s.add_argument("--with", dest="other", required=True)
    s.add_argument("--length", type=int)

    s = cmd("ss", "hyper-Ext or minimal spectral sequence")
    s.add_argument("--kind", choices=["hyper", "minimal"], required=True)
    s.add_argument("--module", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--length", type=int)
    s.add_argument("--target-top", type=int)
    s.add_argument("--r-max", type=int, default=6)

    for name, help_ in (("stokes", "integrate a form over every face"), ("integrate", "integrate a top form")):
        s = cmd(name, help_, window=False, model=False)
        s.add_argument("--dim", type=int, required=True, help="simplex dimension n")
        s.add_argument("--form", required=True, help="expression in t0..tn, dt0..dtn")
    return p


# -- helpers ----------------------------------------------------------------------

def _dims_rows(dims):
    return [[k, "?" if v is None else v] for k, v in sorted(dims.items())]


def _flag_unknown(rep, dims, what="cohomology"):
    missing = [k for k, v in dims.items() if v is None]
    if missing:
        rep.incomplete(f"boundary-incomplete {what} in degrees {missing}")


def _target(mf, N, name):
    A = N.base
    if name == "Q":
        return augmentation_module(A)
    if name == "A":
        return SemifreeModule.unit(A, 0, "1")
    T = mf.lookup(name)
    if T.base != A:
        raise ModelError(f"{name!r} is not a module over {A.name}")
    return T


def _bar_length(args, A, low, needed):
    if args.length is not None:
        return args.length
    L = required_length(A, low, needed)
    if L is None:
        raise UsageError("base is not simply connected: pass --length explicitly")
    return L


def _truncated(args, M):
    if isinstance(M, SemifreeModule):
        if args.target_top is None:
            raise UsageError("a semifree target needs --target-top")
        return truncate_above(M, args.target_top)
    return M


def _gens_rows(M):
    return [[n, d, M.differential_string(i)] for i, (n, d) in enumerate(zip(M.names, M.degrees))]


# -- commands ---------------------------------------------------------------------

def run_cohomology(args, mf, rep):
    if args.algebra:
        A = mf.algebra(args.algebra)
        res = cdga_cohomology(A, args.window)
        title = f"H^k({A.name})"
    else:
        M = mf.module(args.module)
        res = module_cohomology(M, args.window)
        title = f"H^k({M.name})"
    dims = res.dims()
    rep.table(title, ["k", "dim"], _dims_rows(dims))
    rep.data["dims"] = dims
    _flag_unknown(rep, dims)


def run_validate(args, mf, rep):
    rows = []
    for A in mf.algebras.values():
        v = validate_cdga(A)
        rows.append(["algebra", A.name, v.valid, v.minimal, v.message])
    for M in mf.modules.values():
        v = validate_module(M)
        rows.append(["module", M.name, v.valid, v.minimal, v.message])
    for T in mf.tables.values():
        probs = T.validate()
        rows.append(["table", T.name, not probs, "-", probs[0] if probs else "ok"])
    rep.table("validation", ["kind", "name", "valid", "minimal", "message"], rows)
    rep.data["objects"] = rows
    if not all(r[2] for r in rows):
        raise ModelError("validation failed")


def run_minimize(args, mf, rep):
    M = mf.module(args.module)
    res = minimize(M)
    rep.table(f"minimal model of {M.name}", ["generator", "degree", "d"], _gens_rows(res.module))
    rep.data["eliminated"] = [list(p) for p in res.eliminated]
    rep.data["generators"] = _gens_rows(res.module)


def run_resolve(args, mf, rep):
    A = mf.algebra(args.algebra)
    if args.target == "Q":
        T = augmentation_module(A)
    else:
        T = mf.tables.get(args.target)
        if T is None:
            raise ModelError(f"no table named {args.target!r}")
    res = minimal_resolution(A, T, args.window, args.max_generators, args.max_rounds)
    rows = _gens_rows(res.module)
    rep.table("resolution generators", ["generator", "degree", "d"], rows)
    rep.data["generators"] = rows
    rep.data["passes"] = res.passes
    if not res.complete:
        rep.incomplete(f"capped: {res.reason} tripped in degree {res.offending_degree}")


def run_postnikov(args, mf, rep):
    M = mf.module(args.module)
    sp = split_postnikov(M, args.at)
    for label, X in (("sub (≤k)", sp.sub), ("quot (≥k+1)", sp.quot), ("slice (=k)", sp.slice)):
        rep.table(f"{label}", ["generator", "degree", "d"], _gens_rows(X))
    r = sp.les_ranks(args.window)
    rows = [[j] + [v[c] for c in ("sub", "module", "quot", "i", "p", "delta")] for j, v in sorted(r.items())]
    rep.table("long exact sequence ranks", ["j", "H(sub)", "H(M)", "H(quot)", "rk i", "rk p", "rk δ"], rows)
    problems = sp.check_exactness(args.window)
    rep.data["les"] = rows
    rep.data["exact"] = not problems
    for pr in problems:
        rep.incomplete(pr)


def run_tensor(args, mf, rep):
    M = mf.module(args.module)
    N = mf.module(args.other)
    res = module_cohomology(tensor_over_A(M, N), args.window)
    dims = res.dims()
    rep.table(f"H^k({M.name} ⊗_A {N.name})", ["k", "dim"], _dims_rows(dims))
    rep.data["dims"] = dims
    _flag_unknown(rep, dims)


def run_ext(args, mf, rep):
    N = mf.module(args.module)
    M = _target(mf, N, args.target)
    w = args.window
    if args.via == "hom":
        res = ext_via_hom(N, M, w)
    else:
        M = _truncated(args, M)
        top = M.max_degree if M.max_degree is not None else 0
        L = _bar_length(args, N.base, N.min_degree, top - (w.lo - 1))
        rep.data["length"] = L
        res = ext_via_bar(N, M, L, w)
    dims = res.dims()
    rep.certificate = res.certificate
    rep.table(f"Ext^k({N.name}, {args.target})", ["k", "dim"], _dims_rows(dims))
    rep.data["dims"] = dims
    for note in res.notes:
        rep.flag(note)
    _flag_unknown(rep, dims, "Ext")
    if not res.complete:
        rep.incomplete(res.certificate)


def run_tor(args, mf, rep):
    M = mf.module(args.module)
    N = mf.module(args.other)
    if M.base != N.base:
        raise ModelError("modules over different bases")
    w = args.window
    L = _bar_length(args, N.base, N.min_degree, w.hi + 1 - (M.min_degree or 0))
    res = derived_tensor_tor(M, N, L, w)
    dims = res.dims()
    rep.certificate = res.certificate
    rep.data["length"] = L
    rep.data["dims"] = dims
    rep.table(f"Tor^k({M.name}, {N.name})", ["k", "dim"], _dims_rows(dims))
    _flag_unknown(rep, dims, "Tor")
    if not res.complete:
        rep.incomplete(res.certificate)


def run_ss(args, mf, rep):
    N = mf.module(args.module)
    M = _target(mf, N, args.target)
    w = args.window
    if args.kind == "hyper":
        M = _truncated(args, M)
        top = M.max_degree if M.max_degree is not None else 0
        L = _bar_length(args, N.base, N.min_degree, top - (w.lo - 1))
        rep.data["length"] = L
        ss, conv = hyper_ext_ss(N.base, N, M, L, w, args.r_max)
    else:
        if not validate_module(N).minimal:
            N = minimize(N).module
            rep.flag("source replaced by its minimal model")
        ss, conv = minimal_ss(N.base, N, M, w, args.r_max)
    for page in ss.pages:
        rows = [[p, n, v] for (p, n), v in sorted(page.nonzero().items())]
        rep.table(f"E_{page.r} (p = filtration, n = total degree)", ["p", "n", "dim"], rows)
    rows = [[n, conv.einf_totals.get(n), conv.target_dims.get(n)] for n in ss.degrees]
    rep.table("convergence", ["n", "E_inf total", "target"], rows)
    rep.data.update({"einf_totals": conv.einf_totals, "target_dims": conv.target_dims,
                     "stabilization_page": conv.stabilization_page, "agrees": conv.agrees,
                     "e1_mismatches": conv.e1_mismatches, "e2_mismatches": conv.e2_mismatches})
    for f in conv.flags:
        rep.flag(f)
    if conv.e1_mismatches or conv.e2_mismatches:
        rep.incomplete("page check mismatches")
    if not conv.complete:
        rep.incomplete("convergence not certified")


def _form(args):
    try:
        return PolyForm.parse(args.dim, args.form)
    except ExprError as exc:
        raise ModelError(f"form: {exc}") from None


def run_stokes(args, mf, rep):
    a = _form(args)
    da = form_d(a)
    ok = True
    for k in range(a.n + 1):
        c = stokes_pair(a, k)
        rows = [[",".join(map(str, s)), v] for s, v in sorted(c.values.items()) if v]
        rep.table(f"ρ(a) in degree {k}", ["face", "value"], rows)
        if k < a.n:
            ok &= stokes_pair(da, k + 1).values == c.coboundary().values
    rep.data["stokes_identity"] = ok
    rep.table("ρ(da) = δρ(a)", ["holds"], [[ok]])
    if not ok:
        raise ModelError("Stokes identity fails")


def run_integrate(args, mf, rep):
    a = _form(args)
    val = integrate(a)
    rep.table(f"∫ over Δ^{a.n}", ["value"], [[val]])
    rep.data["value"] = val


COMMANDS = {
    "cohomology": run_cohomology, "validate": run_validate, "minimize": run_minimize,
    "resolve": run_resolve, "postnikov": run_postnikov, "tensor": run_tensor, "ext": run_ext,
    "tor": run_tor, "ss": run_ss, "stokes": run_stokes, "integrate": run_integrate,
}


def _normalize_argv(argv):
    # "--window -4:6" would otherwise be read as an option
    out = []
    it = iter(argv)
    for a in it:
        if a == "--window":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--window={nxt}")
        else:
            out.append(a)
    return out


def dispatch(argv) -> tuple[int, str]:
    """Run one command; returns (exit status, rendered report)."""
    argv = list(argv)
    # usage errors happen before parsing finishes, so sniff the format
    fmt = "json" if "--format=json" in argv or any(
        a == "--format" and b == "json" for a, b in zip(argv, argv[1:])) else "text"
    try:
        args = build_parser().parse_args(_normalize_argv(argv))
        if args.command is None:
            raise UsageError("missing command")
        fmt = args.format
        mf = load_model_file(args.model) if hasattr(args, "model") else None
        rep = Report(["sullivan-dgm"] + argv)
        COMMANDS[args.command](args, mf, rep)
    except (UsageError, ModelError, WindowError, ExprError, ValueError, OSError) as exc:
        if fmt == "json":
            return 1, json.dumps(error_report(["sullivan-dgm"] + argv, str(exc)), indent=2,
                                 sort_keys=True, ensure_ascii=False) + "\n"
        return 1, f"error: {exc}\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(rep.to_json() if fmt == "json" else rep.to_text())
    return rep.exit_code, rep.to_json() if fmt == "json" else rep.to_text()


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        code, text = dispatch(argv)
    except SystemExit as exc:      # --help
        return int(exc.code or 0)
    (sys.stderr if code == 1 else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
