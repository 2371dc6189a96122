"""Command line front end.

Reads a system from a .sys file or from the fixture registry, runs one
of the workbench operations on it, and prints a deterministic report.
Identical input and flags give byte-identical output (wall time is only
included under --timing for that reason).

Exit codes: 0 when the run completed with a definite verdict, 2 when
the verdict is inconclusive at the search bound, 1 on errors.
"""

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .field import FieldContext, jet_dim
from .ore import (
    BoundExceeded,
    DimensionMismatch,
    OpMatrix,
    OreOperator,
    adjoint_matrix,
    rebase,
)
from .janet import JetMatrix, cc, membership, pp_reduce, rank_D, spencerize, symbol_dims
from .duality import (
    HasTorsion,
    Inconclusive,
    default_search_order,
    double_test,
    five_step_test,
    parametrize,
    self_adjoint_check,
    weighted_adjoint,
)
from . import geom
from . import sysdsl
from .sysdsl import SysSyntaxError, SystemDecl

NEG_INF = float("-inf")

_DEMO_WORKERS_VAR = "DUALOPS_DEMO_WORKERS"

# verdicts that settle the question, and so exit 0
_DEFINITE = {
    "ok",
    "certified",
    "torsion_free",
    "has_torsion",
    "reflexive",
    "torsion_free_not_reflexive",
    "self_adjoint",
    "not_self_adjoint",
}


class CliError(Exception):
    pass


# -- input loading -----------------------------------------------------


def _load_decl(source: str) -> tuple:
    """Resolve a positional source to (SystemDecl, kind).

    A path that exists on disk wins; otherwise the name is looked up in
    the fixture registry.
    """
    if os.path.exists(source):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError("cannot read %s: %s" % (source, exc))
        return sysdsl.parse(text), "file"
    names = geom.demo_names()
    if source in names:
        entry = geom.demo(source)
        return sysdsl.from_matrix(entry.name, entry.matrix), "registry"
    raise CliError(
        "no such file or fixture %r; fixtures: %s" % (source, ", ".join(names))
    )


def _parse_subst(pairs) -> dict:
    subst = {}
    for item in pairs or []:
        if "=" not in item:
            raise CliError("bad --subst %r, expected sym=value" % item)
        sym, _, val = item.partition("=")
        sym, val = sym.strip(), val.strip()
        if not sym or not val:
            raise CliError("bad --subst %r, expected sym=value" % item)
        if sym in subst:
            raise CliError("duplicate --subst for %r" % sym)
        subst[sym] = val
    return subst


def _apply_subst(decl: SystemDecl, subst: dict) -> SystemDecl:
    """Substitute parameters by rationals or by other parameters."""
    if not subst:
        return decl
    for sym in subst:
        if sym not in decl.params:
            raise CliError(
                "--subst symbol %r is not a parameter of %s (params: %s)"
                % (sym, decl.name, ", ".join(decl.params) or "none")
            )
    keep = tuple(p for p in decl.params if p not in subst)
    for sym, val in subst.items():
        try:
            Fraction(val)
            continue
        except ValueError:
            pass
        if val not in keep:
            raise CliError(
                "--subst value %r is neither a rational nor a kept parameter" % val
            )
    new_ctx = FieldContext(decl.indep, keep)
    matrix = rebase(decl.matrix, new_ctx, dict(subst))
    return SystemDecl(
        name=decl.name,
        params=keep,
        indep=decl.indep,
        dep=decl.dep,
        eq_names=decl.eq_names,
        matrix=matrix,
    )


# -- serialization helpers ---------------------------------------------


def _ord_val(o):
    return None if o == NEG_INF else int(o)


def _mat_json(M):
    if M is None:
        return None
    return {
        "shape": [M.p, M.m],
        "order": _ord_val(M.order),
        "rows": [[str(e) for e in row] for row in M.rows],
    }


def _empty_mat_json(cols: int):
    return {"shape": [0, cols], "order": None, "rows": []}


def _mat_lines(out: list, label: str, M, indent: str = "  "):
    if M is None:
        out.append("%s%s: (none)" % (indent, label))
        return
    o = _ord_val(M.order)
    out.append(
        "%s%s: %d x %d, order %s" % (indent, label, M.p, M.m, "-" if o is None else o)
    )
    for row in M.rows:
        out.append("%s  [ %s ]" % (indent, " | ".join(str(e) for e in row)))


def _base_report(command: str, decl: SystemDecl, kind: str, args) -> dict:
    M = decl.matrix
    return {
        "command": command,
        "version": __version__,
        "input": {
            "name": decl.name,
            "kind": kind,
            "digest": decl.digest(),
            "shape": [M.p, M.m],
            "order": _ord_val(M.order),
            "indep": list(decl.indep),
            "dep": list(decl.dep),
            "params": list(decl.params),
        },
        "flags": {
            "max_order": args.max_order,
            "seed": args.seed,
            "subst": {k: args.subst_map[k] for k in sorted(args.subst_map)},
        },
    }


def _head_lines(report: dict) -> list:
    inp = report["input"]
    out = [
        "dualops %s  command=%s" % (report["version"], report["command"]),
        "input: %s (%s, digest %s), %d x %d over (%s)"
        % (
            inp["name"],
            inp["kind"],
            inp["digest"],
            inp["shape"][0],
            inp["shape"][1],
            ", ".join(inp["indep"]),
        ),
    ]
    if inp["params"]:
        out.append("params: %s" % ", ".join(inp["params"]))
    subst = report["flags"]["subst"]
    if subst:
        out.append(
            "subst: %s" % ", ".join("%s=%s" % (k, v) for k, v in subst.items())
        )
    out.append("verdict: %s" % report["verdict"])
    return out


# -- duality payloads (shared by test, test2, param) -------------------


def _torsion_json(torsion) -> list:
    return [
        {
            "row": [str(e) for e in t.row],
            "annihilator": None if t.annihilator is None else str(t.annihilator),
        }
        for t in torsion
    ]


def _duality_payload(rep) -> dict:
    return {
        "verdict": rep.verdict,
        "steps": {
            "input": _mat_json(rep.input),
            "adjoint": _mat_json(rep.adjoint),
            "cc_adjoint": _mat_json(rep.cc_adjoint),
            "parametrization": _mat_json(rep.parametrization),
            "cc_back": _mat_json(rep.cc_back),
        },
        "ranks": {
            "input": rep.rank_input,
            "parametrization": rep.rank_param,
            "back": rep.rank_back,
        },
        "bounds": dict(rep.search_orders),
        "certified": dict(rep.certified),
        "torsion": _torsion_json(rep.torsion),
        "notes": list(rep.notes),
    }


def _duality_lines(out: list, payload: dict, indent: str = ""):
    steps = payload["steps"]
    for label, key in (
        ("step 1 input D1", "input"),
        ("step 2 adjoint", "adjoint"),
        ("step 3 cc of adjoint", "cc_adjoint"),
        ("step 4 parametrization", "parametrization"),
        ("step 5 cc back", "cc_back"),
    ):
        M = steps[key]
        if M is None:
            out.append("%s  %s: (none)" % (indent, label))
            continue
        out.append(
            "%s  %s: %d x %d, order %s"
            % (
                indent,
                label,
                M["shape"][0],
                M["shape"][1],
                "-" if M["order"] is None else M["order"],
            )
        )
        for row in M["rows"]:
            out.append("%s    [ %s ]" % (indent, " | ".join(row)))
    ranks = payload["ranks"]
    out.append(
        "%s  ranks: input %s, parametrization %s, back %s"
        % (indent, ranks["input"], ranks["parametrization"], ranks["back"])
    )
    out.append(
        "%s  bounds: %s"
        % (
            indent,
            ", ".join("%s=%s" % (k, v) for k, v in payload["bounds"].items()) or "-",
        )
    )
    out.append(
        "%s  certified: %s"
        % (
            indent,
            ", ".join(
                "%s=%s" % (k, str(v).lower()) for k, v in payload["certified"].items()
            )
            or "-",
        )
    )
    for t in payload["torsion"]:
        out.append(
            "%s  torsion: (%s) annihilated by %s"
            % (indent, ", ".join(t["row"]), t["annihilator"] or "(not certified)")
        )
    for nline in payload["notes"]:
        out.append("%s  note: %s" % (indent, nline))


# -- command handlers --------------------------------------------------


def _cmd_adjoint(decl, kind, args):
    ad = adjoint_matrix(decl.matrix)
    report = _base_report("adjoint", decl, kind, args)
    report["verdict"] = "ok"
    report["adjoint"] = _mat_json(ad)
    addecl = sysdsl.from_matrix(decl.name + "_adjoint", ad)
    report["sys"] = sysdsl.to_text(addecl)
    lines = _head_lines(report)
    _mat_lines(lines, "adjoint", ad)
    lines.append("as .sys:")
    lines.extend("  " + ln for ln in report["sys"].rstrip("\n").split("\n"))
    return report, lines, 0


def _cmd_cc(decl, kind, args):
    A = decl.matrix
    bound = args.max_order if args.max_order is not None else default_search_order(A)
    res = cc(A, bound)
    report = _base_report("cc", decl, kind, args)
    report["verdict"] = "certified" if res.certified_complete else "inconclusive"
    report["generators"] = (
        _mat_json(res.cc) if res.cc is not None else _empty_mat_json(A.p)
    )
    report["bounds"] = {"search_order": res.search_order}
    report["ranks"] = {"input": res.rank_input, "cc": res.rank_cc}
    lines = _head_lines(report)
    if res.cc is None:
        if res.certified_complete:
            lines.append(
                "  no compatibility conditions: input rows have full rank %d"
                % res.rank_input
            )
        else:
            lines.append(
                "  no compatibility conditions found up to order %d"
                % res.search_order
            )
    else:
        _mat_lines(lines, "generators", res.cc)
    lines.append("  search order: %d" % res.search_order)
    lines.append(
        "  ranks: input %s, cc %s" % (res.rank_input, res.rank_cc)
    )
    return report, lines, 0 if res.certified_complete else 2


def _cmd_rank(decl, kind, args):
    A = decl.matrix
    bound = args.max_order if args.max_order is not None else default_search_order(A)
    report = _base_report("rank", decl, kind, args)
    try:
        r = rank_D(A, bound)
    except BoundExceeded as exc:
        report["verdict"] = "inconclusive"
        report["bounds"] = {"lclm": bound}
        report["notes"] = [str(exc)]
        lines = _head_lines(report)
        lines.append("  note: %s" % exc)
        return report, lines, 2
    report["verdict"] = "ok"
    report["rank"] = r
    report["bounds"] = {"lclm": bound}
    lines = _head_lines(report)
    lines.append("  rank over the operator field: %d (of %d rows)" % (r, A.p))
    return report, lines, 0


def _cmd_test(decl, kind, args):
    rep = five_step_test(decl.matrix, args.max_order)
    report = _base_report("test", decl, kind, args)
    payload = _duality_payload(rep)
    report["verdict"] = payload.pop("verdict")
    report.update(payload)
    lines = _head_lines(report)
    _duality_lines(lines, payload)
    return report, lines, 0 if report["verdict"] in _DEFINITE else 2


def _cmd_test2(decl, kind, args):
    dr = double_test(decl.matrix, args.max_order)
    report = _base_report("test2", decl, kind, args)
    report["verdict"] = dr.verdict
    report["first"] = _duality_payload(dr.first)
    report["second"] = None if dr.second is None else _duality_payload(dr.second)
    lines = _head_lines(report)
    lines.append("first pass:")
    _duality_lines(lines, report["first"])
    if report["second"] is None:
        lines.append("second pass: (not reached)")
    else:
        lines.append("second pass:")
        _duality_lines(lines, report["second"])
    return report, lines, 0 if dr.verdict in _DEFINITE else 2


def _cmd_param(decl, kind, args):
    report = _base_report("param", decl, kind, args)
    try:
        P = parametrize(decl.matrix, args.max_order)
    except HasTorsion as exc:
        report["verdict"] = "has_torsion"
        report["torsion"] = _torsion_json(exc.generators)
        report["parametrization"] = None
        lines = _head_lines(report)
        for t in report["torsion"]:
            lines.append(
                "  torsion: (%s) annihilated by %s"
                % (", ".join(t["row"]), t["annihilator"] or "(not certified)")
            )
        return report, lines, 0
    except Inconclusive as exc:
        report["verdict"] = "inconclusive"
        report["failed_step"] = exc.step
        report["bounds"] = {"search": exc.bound}
        report["parametrization"] = None
        lines = _head_lines(report)
        lines.append("  failed certificate: %s at bound %d" % (exc.step, exc.bound))
        return report, lines, 2
    report["verdict"] = "torsion_free"
    report["parametrization"] = _mat_json(P)
    pdecl = sysdsl.from_matrix(
        decl.name + "_param",
        P,
        dep=["p%d" % (k + 1) for k in range(P.m)],
    )
    report["sys"] = sysdsl.to_text(pdecl)
    lines = _head_lines(report)
    _mat_lines(lines, "parametrization", P)
    lines.append("as .sys:")
    lines.extend("  " + ln for ln in report["sys"].rstrip("\n").split("\n"))
    return report, lines, 0


def _parse_scales(text, count, what):
    if text is None:
        return [Fraction(1)] * count
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise CliError("%s needs %d comma separated rationals" % (what, count))
    try:
        return [Fraction(p) for p in parts]
    except ValueError as exc:
        raise CliError("bad rational in %s: %s" % (what, exc))


def _cmd_selfadjoint(decl, kind, args):
    A = decl.matrix
    if A.p != A.m:
        raise CliError("selfadjoint needs a square system, got %d x %d" % (A.p, A.m))
    rs = _parse_scales(args.row_scale, A.p, "--row-scale")
    cs = _parse_scales(args.col_scale, A.m, "--col-scale")
    ok = self_adjoint_check(A, rs, cs)
    defect = adjoint_matrix(A).scale_rows(rs).scale_cols(cs) - A
    report = _base_report("selfadjoint", decl, kind, args)
    report["verdict"] = "self_adjoint" if ok else "not_self_adjoint"
    report["scalings"] = {
        "row": [str(f) for f in rs],
        "col": [str(f) for f in cs],
    }
    if not ok:
        report["defect"] = _mat_json(defect)
    lines = _head_lines(report)
    lines.append("  row scalings: %s" % ", ".join(report["scalings"]["row"]))
    lines.append("  col scalings: %s" % ", ".join(report["scalings"]["col"]))
    if not ok:
        _mat_lines(lines, "defect (scaled adjoint minus input)", defect)
    return report, lines, 0


def _cmd_dims(decl, kind, args):
    A = decl.matrix
    ctx = A.ctx
    if A.is_zero():
        raise CliError("dims needs a nonzero system")
    up = args.max_order if args.max_order is not None else 4
    q = int(A.order)
    sdims = symbol_dims(A, up)
    table = []
    for r in range(up + 1):
        jm = JetMatrix(A, r)
        total = A.m * jet_dim(ctx.n, q + r)
        rk = jm.rank()
        table.append(
            {
                "r": r,
                "jet_order": q + r,
                "jet_dim": total,
                "rank": rk,
                "solution_dim": total - rk,
                "symbol_dim": sdims[r],
            }
        )
    report = _base_report("dims", decl, kind, args)
    report["verdict"] = "ok"
    report["table"] = table
    lines = _head_lines(report)
    lines.append("  r | jet order | jet dim | rank | solution dim | symbol dim")
    for row in table:
        lines.append(
            "  %d | %9d | %7d | %4d | %12d | %10d"
            % (
                row["r"],
                row["jet_order"],
                row["jet_dim"],
                row["rank"],
                row["solution_dim"],
                row["symbol_dim"],
            )
        )
    return report, lines, 0


def _cmd_pp(decl, kind, args):
    A = decl.matrix
    if A.is_zero():
        raise CliError("pp needs a nonzero system")
    r = args.jet_order
    s = args.max_order if args.max_order is not None else 2
    dims = pp_reduce(A, r, s)
    report = _base_report("pp", decl, kind, args)
    report["verdict"] = "ok"
    report["jet_order"] = r
    report["ambient"] = dims[0]
    report["projections"] = [
        {"sigma": k, "dim": v} for k, v in enumerate(dims[1:])
    ]
    report["stabilized"] = len(dims) >= 3 and dims[-1] == dims[-2]
    lines = _head_lines(report)
    lines.append("  ambient jet dimension at order %d: %d" % (int(A.order) + r, dims[0]))
    for k, v in enumerate(dims[1:]):
        lines.append("  projection from %d prolongations: %d" % (k, v))
    lines.append("  stabilized: %s" % str(report["stabilized"]).lower())
    return report, lines, 0


def _spencer_unknown_names(decl, unknowns):
    names = []
    for (j, mu) in unknowns:
        base = decl.dep[j]
        if mu.order == 0:
            names.append(base)
        else:
            names.append(base + "_" + "".join(str(i) for i in mu.indices()))
    return names


def _cmd_spencerize(decl, kind, args):
    A = decl.matrix
    bound = args.max_order if args.max_order is not None else default_search_order(A)
    try:
        sp = spencerize(A, bound)
    except BoundExceeded as exc:
        report = _base_report("spencerize", decl, kind, args)
        report["verdict"] = "inconclusive"
        report["notes"] = [str(exc)]
        lines = _head_lines(report)
        lines.append("  note: %s" % exc)
        return report, lines, 2
    names = _spencer_unknown_names(decl, sp.unknowns)
    report = _base_report("spencerize", decl, kind, args)
    report["verdict"] = "ok"
    report["prolong_order"] = sp.prolong_order
    report["closed"] = sp.closed
    report["unknowns"] = names
    report["matrix"] = _mat_json(sp.matrix)
    spdecl = sysdsl.from_matrix(decl.name + "_order1", sp.matrix, dep=names)
    report["sys"] = sysdsl.to_text(spdecl)
    lines = _head_lines(report)
    lines.append(
        "  prolonged %d step(s), %s"
        % (sp.prolong_order, "closed" if sp.closed else "top derivatives left free")
    )
    lines.append("  unknowns: %s" % ", ".join(names))
    _mat_lines(lines, "first order system", sp.matrix)
    lines.append("as .sys:")
    lines.extend("  " + ln for ln in report["sys"].rstrip("\n").split("\n"))
    return report, lines, 0


# -- demo suites -------------------------------------------------------


def _b(x) -> str:
    return "true" if bool(x) else "false"


def _hist(M) -> str:
    hist = {}
    for row in M.rows:
        o = max((int(e.order) for e in row if not e.is_zero()), default=-1)
        hist[o] = hist.get(o, 0) + 1
    return "{" + ", ".join("%d: %d" % (k, v) for k, v in sorted(hist.items())) + "}"


def _shape(M) -> str:
    return "%d x %d" % (M.p, M.m)


def _row_strs(M) -> str:
    return "; ".join("[" + ", ".join(str(e) for e in row) + "]" for row in M.rows)


def _suite_state_space():
    from .geom import controllability_rank, kalman

    A = [[0, 1], [0, 0]]
    B = [[0], [1]]
    M = kalman(A, B)
    rep = five_step_test(M)
    rows = [
        ("controllability rank", "2", str(controllability_rank(A, B))),
        ("five step verdict", "torsion_free", rep.verdict),
        (
            "input o parametrization == 0",
            "true",
            _b((M * rep.parametrization).is_zero()),
        ),
    ]
    return rows


def _suite_state_space_uncontrollable():
    from .geom import controllability_rank, kalman

    A = [[1, 0], [0, 2]]
    B = [[1], [0]]
    M = kalman(A, B)
    rep = five_step_test(M)
    rows = [
        ("controllability rank", "1", str(controllability_rank(A, B))),
        ("five step verdict", "has_torsion", rep.verdict),
        ("torsion generators", "1", str(len(rep.torsion))),
    ]
    return rows


def _suite_double_pendulum():
    ctx, M = geom.double_pendulum()
    rep = five_step_test(M)
    P = rep.parametrization
    rows = [
        ("five step verdict", "torsion_free", rep.verdict),
        ("parametrization order", "4", str(_ord_val(P.order))),
        ("input o parametrization == 0", "true", _b((M * P).is_zero())),
    ]
    return rows


def _suite_double_pendulum_equal():
    ctx, M = geom.double_pendulum(equal_lengths=True)
    rep = five_step_test(M)
    tor = rep.torsion
    ann = str(tor[0].annihilator) if tor and tor[0].annihilator is not None else "-"
    rows = [
        ("five step verdict", "has_torsion", rep.verdict),
        ("torsion row", "(0, 1, -1)", "(%s)" % ", ".join(str(e) for e in tor[0].row) if tor else "-"),
        ("annihilator", "d[1,1] + ((g)/(l))", ann),
    ]
    return rows


def _suite_mixed_pair():
    ctx, M = geom.mixed_pair()
    rep = five_step_test(M)
    rows = [
        ("five step verdict", "torsion_free", rep.verdict),
        (
            "input o parametrization == 0",
            "true",
            _b(
                rep.parametrization is not None
                and (M * rep.parametrization).is_zero()
            ),
        ),
    ]
    return rows


def _suite_gradient_triple():
    ctx, M = geom.gradient_triple()
    rep = five_step_test(M)
    tor = rep.torsion
    rows = [
        ("five step verdict", "has_torsion", rep.verdict),
        ("torsion generators", "1", str(len(tor))),
        (
            "torsion row",
            "(0, 1, -1)",
            "(%s)" % ", ".join(str(e) for e in tor[0].row) if tor else "-",
        ),
        (
            "annihilator",
            "d[1]",
            str(tor[0].annihilator) if tor and tor[0].annihilator else "-",
        ),
    ]
    return rows


def _suite_gradient_pair():
    rows = []
    for aval, width in ((0, 1), (1, 2)):
        ctx, M = geom.gradient_pair(a_value=aval)
        rep = five_step_test(M)
        rows.append(("a=%d verdict" % aval, "torsion_free", rep.verdict))
        rows.append(
            ("a=%d parametrization width" % aval, str(width), str(rep.parametrization.m))
        )
        rows.append(
            (
                "a=%d input o parametrization == 0" % aval,
                "true",
                _b((M * rep.parametrization).is_zero()),
            )
        )
    return rows


def _suite_two_jets_pair():
    M = geom.two_jets_pair()
    C = geom.two_jets_single()
    ctx = M.ctx
    d = lambda *ix: OreOperator.d(ctx, *ix)
    one = OreOperator.from_scalar(ctx.one)
    rowA = OpMatrix(ctx, [M.rows[0]])
    rowB = OpMatrix(ctx, [M.rows[1]])
    rows = [
        (
            "row A == (d[1,2] + 1) o C",
            "true",
            _b((rowA - OpMatrix(ctx, [[d(1, 2) + one]]) * C).is_zero()),
        ),
        (
            "row B == d[1,1] o C",
            "true",
            _b((rowB - OpMatrix(ctx, [[d(1, 1)]]) * C).is_zero()),
        ),
        ("five step verdict", "torsion_free", five_step_test(M, max_order=6).verdict),
        (
            "verdict agrees with two_jets_single",
            "true",
            _b(
                five_step_test(M, max_order=6).verdict
                == five_step_test(C, max_order=6).verdict
            ),
        ),
    ]
    return rows


def _suite_two_jets_single():
    C = geom.two_jets_single()
    rows = [
        ("shape", "1 x 2", _shape(C)),
        ("five step verdict", "torsion_free", five_step_test(C, max_order=6).verdict),
    ]
    return rows


def _suite_two_jets_source():
    M = geom.two_jets_system()
    C = geom.two_jets_single()
    res = cc(M, 4)
    got = res.cc
    unique = got is not None and got.p == 1 and got.order == 2
    # the found CC row and C generate the same row module
    same = (
        unique
        and membership(list(got.rows[0]), C, 2) is not None
        and membership(list(C.rows[0]), got, 2) is not None
    )
    rows = [
        ("unique second order cc", "true", _b(unique)),
        ("cc row module equals C", "true", _b(same)),
        (
            "projection dims chain",
            "[6, 4, 3, 2, 1, 0]",
            str(pp_reduce(M, 0, 4)),
        ),
    ]
    return rows


def _suite_macaulay():
    M = geom.macaulay_system()
    ctx = M.ctx
    jm = JetMatrix(M, 1)
    total = jet_dim(3, 3)
    soldim = total - jm.rank()
    sp = spencerize(M, 4)
    base = len(sp.unknowns)
    fibers = [base * math.comb(3, r) for r in range(4)]
    chi = sum((-1) ** r * f for r, f in enumerate(fibers))
    r1 = cc(M, 4)
    r2 = cc(r1.cc, 4)
    rows = [
        ("solution dim at degree bound 3", "8", str(soldim)),
        ("spencer closed", "true", _b(sp.closed)),
        ("spencer unknowns", "8", str(len(sp.unknowns))),
        ("spencer fibers", "[8, 24, 24, 8]", str(fibers)),
        ("euler characteristic", "0", str(chi)),
        (
            "resolution fibers",
            "1, 3, 3, 1",
            "%d, %d, %d, %d" % (M.m, M.p, r1.cc.p, r2.cc.p),
        ),
        (
            "resolution orders",
            "2, 2, 2",
            "%d, %d, %d" % (M.order, r1.cc.order, r2.cc.order),
        ),
    ]
    return rows


def _suite_div3():
    M = geom.div3()
    rep = five_step_test(M)
    P = rep.parametrization
    res = cc(P, 2)
    rows = [
        ("five step verdict", "torsion_free", rep.verdict),
        ("parametrization shape", "3 x 3", _shape(P)),
        ("input o parametrization == 0", "true", _b((M * P).is_zero())),
        ("cc(parametrization) rows", "1", str(res.cc.p if res.cc is not None else 0)),
    ]
    return rows


def _suite_third_order_flat():
    M = geom.third_order_flat()
    jm = JetMatrix(M, 2)
    total = jet_dim(1, 5)
    sp = spencerize(M, 4)
    rows = [
        ("solution dim", "3", str(total - jm.rank())),
        ("spencer closed", "true", _b(sp.closed)),
        ("spencer unknowns", "3", str(len(sp.unknowns))),
    ]
    return rows


def _suite_schwarzian():
    M = geom.third_order_flat()
    ctx = M.ctx
    sp = spencerize(M, 4)
    S = sp.matrix
    d = OreOperator.d(ctx, 1)
    x = ctx.x(1)
    half = Fraction(1, 2)
    T = OpMatrix(
        ctx,
        [
            [1, x, half * x * x],
            [0, 1, x],
            [0, 0, 1],
        ],
    )
    D3 = OpMatrix(ctx, [[d, 0, 0], [0, d, 0], [0, 0, d]])
    ad = adjoint_matrix(S)
    rows = [
        ("first order chain shape", "3 x 3", _shape(S)),
        ("chain closed", "true", _b(sp.closed)),
        ("S o T == T o diag(d)", "true", _b((S * T - T * D3).is_zero())),
        (
            "adjoint of chain rows",
            "[-d[1], 0, 0]; [-1, -d[1], 0]; [0, -1, -d[1]]",
            _row_strs(ad),
        ),
        ("adjoint of chain order", "1", str(_ord_val(ad.order))),
    ]
    return rows


def _suite_cosserat_motion():
    M = geom.cosserat_motion()
    R = geom.cosserat_cc()
    P = geom.cosserat_potentials()
    res = cc(M, 2)
    rows = [
        ("cc rows", "3", str(res.cc.p if res.cc is not None else 0)),
        ("cc certified", "true", _b(res.certified_complete)),
        ("relations o motion == 0", "true", _b((R * M).is_zero())),
        ("ad(motion) o potentials == 0", "true", _b((adjoint_matrix(M) * P).is_zero())),
    ]
    return rows


def _suite_cosserat_cc():
    R = geom.cosserat_cc()
    M = geom.cosserat_motion()
    rows = [
        ("shape", "3 x 6", _shape(R)),
        ("relations o motion == 0", "true", _b((R * M).is_zero())),
    ]
    return rows


def _suite_killing2():
    K = geom.killing(2)
    res = cc(K, 2)
    rows = [
        ("shape", "3 x 2", _shape(K)),
        ("cc rows", "1", str(res.cc.p if res.cc is not None else 0)),
        ("cc certified", "true", _b(res.certified_complete)),
    ]
    return rows


def _suite_killing3():
    K = geom.killing(3)
    res = cc(K, 2)
    gens = geom.conformal_generators(3)[:6]
    killed = all(all(v.is_zero() for v in K.apply(vec)) for vec in gens)
    rows = [
        ("shape", "6 x 3", _shape(K)),
        ("cc rows", "6", str(res.cc.p if res.cc is not None else 0)),
        ("cc certified", "true", _b(res.certified_complete)),
        ("resolution fibers", "(3, 6, 6, 3)", str(geom.killing_resolution_fibers(3))),
        ("isometry generators annihilated", "true", _b(killed)),
    ]
    return rows


def _suite_conformal2():
    CK = geom.conformal_killing(2)
    gens = geom.conformal_generators_for(geom.Metric.euclidean(2))
    killed = all(all(v.is_zero() for v in CK.apply(vec)) for vec in gens)
    rows = [
        ("shape", "3 x 2", _shape(CK)),
        ("generators annihilated", "true", _b(killed)),
        ("generator count", "6", str(len(gens))),
    ]
    return rows


def _suite_conformal3():
    CK = geom.conformal_killing(3)
    res = cc(CK, 3)
    from .janet import symbol_of

    tab = symbol_of(CK)
    gens = geom.conformal_generators_for(geom.Metric.euclidean(3))
    killed = all(all(v.is_zero() for v in CK.apply(vec)) for vec in gens)
    rows = [
        ("cc order histogram", "{0: 1, 3: 5}", _hist(res.cc)),
        ("cc certified", "true", _b(res.certified_complete)),
        ("symbol dims g1, g2, g3", "(4, 3, 0)", str((tab.dim, tab.prolong().dim, tab.prolong().prolong().dim))),
        ("generator count", "10", str(len(gens))),
        ("generators annihilated", "true", _b(killed)),
    ]
    return rows


def _suite_cauchy2():
    C = geom.cauchy(2)
    K = geom.killing(2)
    from .geom import Metric, sym2_weights

    g = Metric.euclidean(2)
    W = sym2_weights(2)
    AdK = weighted_adjoint(K, W, [1, 1])
    scaled = C.scale_rows([Fraction(-2 * g.omega(i)) for i in range(2)])
    res = cc(C, 2)
    rows = [
        ("shape", "2 x 3", _shape(C)),
        ("ad_w(killing2) == -2 cauchy2", "true", _b((AdK - scaled).is_zero())),
        ("cc rows", "0", str(res.cc.p if res.cc is not None else 0)),
        ("parametrize(cauchy2) == airy", "true", _b((parametrize(C) - geom.airy()).is_zero())),
    ]
    return rows


def _suite_cauchy3():
    C = geom.cauchy(3)
    res = cc(C, 2)
    rows = [
        ("shape", "3 x 6", _shape(C)),
        ("cc rows", "0", str(res.cc.p if res.cc is not None else 0)),
        ("cc certified", "true", _b(res.certified_complete)),
        ("cauchy3 o beltrami == 0", "true", _b((C * geom.beltrami()).is_zero())),
        ("cauchy3 o maxwell == 0", "true", _b((C * geom.maxwell_potentials()).is_zero())),
        ("cauchy3 o morera == 0", "true", _b((C * geom.morera_potentials()).is_zero())),
    ]
    return rows


def _suite_riemann2():
    R = geom.riemann_lin(2)
    from .geom import sym2_weights

    AW = weighted_adjoint(R, [1], sym2_weights(2))
    rows = [
        ("shape", "1 x 3", _shape(R)),
        ("order", "2", str(_ord_val(R.order))),
        ("weighted adjoint == airy", "true", _b((AW - geom.airy()).is_zero())),
    ]
    return rows


def _suite_riemann3():
    R = geom.riemann_lin(3)
    from .geom import sym2_weights

    B = geom.beltrami()
    AW = weighted_adjoint(R, [1] * 6, sym2_weights(3))
    pairs = [(0, 5, Fraction(1)), (1, 4, Fraction(-1, 2)), (2, 2, Fraction(1, 2)),
             (3, 3, Fraction(1)), (4, 1, Fraction(-1, 2)), (5, 0, Fraction(1))]
    match = True
    for c, c2, s in pairs:
        for i in range(6):
            if not (AW.rows[i][c2] - s * B.rows[i][c]).is_zero():
                match = False
    res = cc(R, 2)
    rows = [
        ("shape", "6 x 6", _shape(R)),
        ("order", "2", str(_ord_val(R.order))),
        ("cc rows", "3", str(res.cc.p if res.cc is not None else 0)),
        ("cc order", "1", str(_ord_val(res.cc.order)) if res.cc is not None else "-"),
        ("ad_w columns match beltrami columns", "true", _b(match)),
    ]
    return rows


def _suite_airy():
    A = geom.airy()
    R = geom.riemann_lin(2)
    from .geom import sym2_weights

    AW = weighted_adjoint(R, [1], sym2_weights(2))
    C2 = geom.cauchy(2)
    P = parametrize(C2)
    res = cc(A, 3)
    rows = [
        ("shape", "3 x 1", _shape(A)),
        ("airy == weighted adjoint of riemann2", "true", _b((AW - A).is_zero())),
        ("cauchy2 o airy == 0", "true", _b((C2 * A).is_zero())),
        ("parametrize(cauchy2) == airy", "true", _b((P - A).is_zero())),
        ("cc rows", "2", str(res.cc.p if res.cc is not None else 0)),
    ]
    return rows


def _suite_beltrami():
    B = geom.beltrami()
    from .geom import sym2_weights

    W = sym2_weights(3)
    E = geom.einstein_lin(3)
    doubled = OpMatrix(
        B.ctx,
        [[Fraction(-W[i]) * B.rows[i][c] for c in range(6)] for i in range(6)],
    )
    rows = [
        ("shape", "6 x 6", _shape(B)),
        (
            "weighted self adjoint (row 1/W, col W)",
            "true",
            _b(self_adjoint_check(B, [Fraction(1, w) for w in W], W)),
        ),
        ("cauchy3 o beltrami == 0", "true", _b((geom.cauchy(3) * B).is_zero())),
        ("einstein3 == -beltrami row-doubled", "true", _b((E - doubled).is_zero())),
    ]
    return rows


def _suite_maxwell():
    M = geom.maxwell_potentials()
    B = geom.beltrami()
    cols_match = all(
        (M.rows[i][k] - B.rows[i][c]).is_zero()
        for k, c in enumerate((0, 3, 5))
        for i in range(6)
    )
    rows = [
        ("shape", "6 x 3", _shape(M)),
        ("cauchy3 o maxwell == 0", "true", _b((geom.cauchy(3) * M).is_zero())),
        ("columns are beltrami diagonal columns", "true", _b(cols_match)),
    ]
    return rows


def _suite_morera():
    M = geom.morera_potentials()
    B = geom.beltrami()
    cols_match = all(
        (M.rows[i][k] - B.rows[i][c]).is_zero()
        for k, c in enumerate((1, 2, 4))
        for i in range(6)
    )
    rows = [
        ("shape", "6 x 3", _shape(M)),
        ("cauchy3 o morera == 0", "true", _b((geom.cauchy(3) * M).is_zero())),
        ("columns are beltrami off-diagonal columns", "true", _b(cols_match)),
    ]
    return rows


def _suite_einstein3():
    E = geom.einstein_lin(3)
    from .geom import Metric, ricci_lin, sym2_indices

    g = Metric.euclidean(3)
    R = ricci_lin(g)
    pairs = sym2_indices(3)
    slot = {pr: k for k, pr in enumerate(pairs)}
    ctx = R.ctx
    tr = [OreOperator.zero(ctx) for _ in pairs]
    for k in range(3):
        coeff = Fraction(g.inv(k))
        for c in range(len(pairs)):
            tr[c] = tr[c] + coeff * R.rows[slot[(k, k)]][c]
    half = Fraction(1, 2)
    rows = []
    for idx, (i, j) in enumerate(pairs):
        row = list(R.rows[idx])
        if i == j:
            cf = half * Fraction(g.omega(i))
            row = [row[c] - cf * tr[c] for c in range(len(pairs))]
        rows.append(row)
    target = OpMatrix(ctx, rows)
    ones = [Fraction(1)] * 6
    out = [
        ("shape", "6 x 6", _shape(E)),
        ("plainly self adjoint", "true", _b(self_adjoint_check(E, ones, ones))),
        ("div o einstein3 == 0", "true", _b((geom.div_op(3) * E).is_zero())),
        (
            "einstein == ricci - (1/2) omega tr(ricci)",
            "true",
            _b((E - target).is_zero()),
        ),
    ]
    return out


def _suite_einstein4():
    from .geom import Metric, sym2_indices

    mink = Metric.minkowski(4)
    E = geom.einstein_lin(mink)
    gsigns = [
        Fraction(mink.omega(i) * mink.omega(j)) for (i, j) in sym2_indices(4)
    ]
    rows = [
        ("shape", "10 x 10", _shape(E)),
        (
            "sign-scaled self adjoint",
            "true",
            _b(self_adjoint_check(E, gsigns, gsigns)),
        ),
        (
            "scalings",
            "(1, 1, 1, -1, 1, 1, -1, 1, -1, 1)",
            "(" + ", ".join(str(s) for s in gsigns) + ")",
        ),
        ("div o einstein4 == 0", "true", _b((geom.div_op(mink) * E).is_zero())),
    ]
    return rows


def _suite_ricci4():
    from .geom import Metric, ricci_adjoint_formula, sym2_indices, sym2_weights

    mink = Metric.minkowski(4)
    R = geom.ricci_lin(mink)
    W = sym2_weights(4)
    F = ricci_adjoint_formula(mink)
    gsigns = [
        Fraction(mink.omega(i) * mink.omega(j)) for (i, j) in sym2_indices(4)
    ]
    C4 = geom.cauchy(mink)
    rows = [
        ("shape", "10 x 10", _shape(R)),
        (
            "weighted adjoint == displayed formula",
            "true",
            _b((weighted_adjoint(R, [1] * 10, W) - F).is_zero()),
        ),
        (
            "sign-scaled self adjoint",
            "false",
            _b(self_adjoint_check(R, gsigns, gsigns)),
        ),
        ("cauchy4 o formula == 0", "true", _b((C4 * F).is_zero())),
    ]
    return rows


_DEMO_SUITES = {
    "airy": _suite_airy,
    "beltrami": _suite_beltrami,
    "cauchy2": _suite_cauchy2,
    "cauchy3": _suite_cauchy3,
    "conformal2": _suite_conformal2,
    "conformal3": _suite_conformal3,
    "cosserat_cc": _suite_cosserat_cc,
    "cosserat_motion": _suite_cosserat_motion,
    "div3": _suite_div3,
    "double_pendulum": _suite_double_pendulum,
    "double_pendulum_equal": _suite_double_pendulum_equal,
    "einstein3": _suite_einstein3,
    "einstein4": _suite_einstein4,
    "gradient_pair": _suite_gradient_pair,
    "gradient_triple": _suite_gradient_triple,
    "killing2": _suite_killing2,
    "killing3": _suite_killing3,
    "macaulay": _suite_macaulay,
    "maxwell": _suite_maxwell,
    "mixed_pair": _suite_mixed_pair,
    "morera": _suite_morera,
    "ricci4": _suite_ricci4,
    "riemann2": _suite_riemann2,
    "riemann3": _suite_riemann3,
    "schwarzian": _suite_schwarzian,
    "state_space": _suite_state_space,
    "state_space_uncontrollable": _suite_state_space_uncontrollable,
    "third_order_flat": _suite_third_order_flat,
    "two_jets_pair": _suite_two_jets_pair,
    "two_jets_single": _suite_two_jets_single,
    "two_jets_source": _suite_two_jets_source,
}


def demo_suite_names():
    return sorted(_DEMO_SUITES)


def _demo_description(fid: str) -> str:
    if fid == "schwarzian":
        return "third order flatness rewritten as a divergence chain"
    try:
        return geom.demo(fid).description
    except KeyError:
        return ""


def _demo_payload(fid: str) -> dict:
    """Run one fixture suite; returns a JSON-ready dict."""
    try:
        checks = [
            {"name": nm, "expected": exp, "actual": act, "ok": exp == act}
            for (nm, exp, act) in _DEMO_SUITES[fid]()
        ]
    except Exception as exc:
        checks = [
            {
                "name": "suite runs",
                "expected": "completes",
                "actual": "%s: %s" % (type(exc).__name__, exc),
                "ok": False,
            }
        ]
    return {
        "fixture": fid,
        "description": _demo_description(fid),
        "checks": checks,
        "failures": sum(1 for c in checks if not c["ok"]),
    }


def _demo_table_lines(out: list, payload: dict):
    out.append(
        "fixture %s: %s" % (payload["fixture"], payload["description"])
    )
    width = max((len(c["name"]) for c in payload["checks"]), default=10)
    for c in payload["checks"]:
        status = "ok" if c["ok"] else "FAIL"
        out.append(
            "  %-*s  expected %s  actual %s  [%s]"
            % (width, c["name"], c["expected"], c["actual"], status)
        )


def _cmd_demo(args):
    if args.list:
        names = demo_suite_names()
        report = {
            "command": "demo",
            "version": __version__,
            "verdict": "ok",
            "fixtures": [
                {"name": nm, "description": _demo_description(nm)} for nm in names
            ],
        }
        lines = ["dualops %s  command=demo" % __version__]
        for row in report["fixtures"]:
            lines.append("  %-28s %s" % (row["name"], row["description"]))
        return report, lines, 0

    if args.all:
        ids = demo_suite_names()
    else:
        if args.name is None:
            raise CliError("demo needs a fixture name, --all, or --list")
        if args.name not in _DEMO_SUITES:
            raise CliError(
                "no demo suite %r; available: %s"
                % (args.name, ", ".join(demo_suite_names()))
            )
        ids = [args.name]

    workers = 1
    raw = os.environ.get(_DEMO_WORKERS_VAR)
    if raw:
        try:
            workers = max(1, int(raw))
        except ValueError:
            raise CliError("%s must be an integer" % _DEMO_WORKERS_VAR)
    if len(ids) > 1 and workers > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            payloads = list(pool.map(_demo_payload, ids))
    else:
        payloads = [_demo_payload(fid) for fid in ids]

    failures = sum(p["failures"] for p in payloads)
    report = {
        "command": "demo",
        "version": __version__,
        "verdict": "ok" if failures == 0 else "mismatch",
        "fixtures": payloads,
        "failures": failures,
    }
    lines = [
        "dualops %s  command=demo" % __version__,
        "verdict: %s" % report["verdict"],
    ]
    for p in payloads:
        _demo_table_lines(lines, p)
    lines.append(
        "%d fixture(s), %d failing check(s)" % (len(payloads), failures)
    )
    return report, lines, 0 if failures == 0 else 1


# -- argument parsing and dispatch -------------------------------------


_HANDLERS = {
    "adjoint": _cmd_adjoint,
    "cc": _cmd_cc,
    "rank": _cmd_rank,
    "test": _cmd_test,
    "test2": _cmd_test2,
    "param": _cmd_param,
    "selfadjoint": _cmd_selfadjoint,
    "dims": _cmd_dims,
    "pp": _cmd_pp,
    "spencerize": _cmd_spencerize,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--max-order", type=int, default=None, metavar="N",
        help="search bound for completion and membership sweeps",
    )
    common.add_argument(
        "--format", choices=("text", "json"), default="text",
        help="report format (default text)",
    )
    common.add_argument(
        "--seed", type=int, default=None, metavar="S",
        help="seed for randomized cross checks (recorded in the report)",
    )
    common.add_argument(
        "--subst", action="append", default=None, metavar="SYM=VALUE",
        help="substitute a parameter by a rational or another parameter",
    )
    common.add_argument(
        "--timing", action="store_true",
        help="include wall time in the report (breaks byte reproducibility)",
    )

    ap = argparse.ArgumentParser(
        prog="dualops",
        description="symbolic workbench for matrices of linear differential operators",
    )
    ap.add_argument("--version", action="version", version="dualops " + __version__)
    sub = ap.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("adjoint", "formal adjoint of the system"),
        ("cc", "compatibility conditions of the system"),
        ("rank", "rank of the row module over the operator field"),
        ("test", "five step parametrizability test"),
        ("test2", "double test: parametrize the parametrization"),
        ("param", "compute a parametrization or report the obstruction"),
        ("selfadjoint", "check weighted self-adjointness"),
        ("dims", "jet, rank and symbol dimension table"),
        ("pp", "projection dimensions under prolongation"),
        ("spencerize", "equivalent first order system on parametric jets"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("source", help=".sys file or fixture name")
        if name == "selfadjoint":
            p.add_argument(
                "--row-scale", default=None, metavar="CSV",
                help="comma separated rational row scalings (default all 1)",
            )
            p.add_argument(
                "--col-scale", default=None, metavar="CSV",
                help="comma separated rational column scalings (default all 1)",
            )
        if name == "pp":
            p.add_argument(
                "--jet-order", type=int, default=0, metavar="R",
                help="projection target order offset (default 0)",
            )

    pd = sub.add_parser(
        "demo", parents=[common], help="run a fixture suite and compare to frozen facts"
    )
    pd.add_argument("name", nargs="?", default=None, help="fixture name")
    pd.add_argument("--all", action="store_true", help="run every fixture suite")
    pd.add_argument("--list", action="store_true", help="list fixture suites")

    return ap


def _emit(report: dict, lines: list, fmt: str, timing_ms=None) -> None:
    if timing_ms is not None:
        report["wall_ms"] = timing_ms
        lines.append("wall time: %d ms" % timing_ms)
    if fmt == "json":
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    t0 = time.monotonic()
    if args.seed is not None:
        import random

        random.seed(args.seed)
    try:
        if args.command == "demo":
            args.subst_map = _parse_subst(args.subst)
            report, lines, code = _cmd_demo(args)
        else:
            args.subst_map = _parse_subst(args.subst)
            decl, kind = _load_decl(args.source)
            decl = _apply_subst(decl, args.subst_map)
            report, lines, code = _HANDLERS[args.command](decl, kind, args)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except SysSyntaxError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (DimensionMismatch, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    timing = int((time.monotonic() - t0) * 1000) if args.timing else None
    _emit(report, lines, args.format, timing)
    return code


if __name__ == "__main__":
    sys.exit(main())
