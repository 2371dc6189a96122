"""The .sys declaration format: parse, validate, print, digest.

A declaration names a system, its parameters, independent variables,
unknowns and equations:

    system pendulum(g, l1, l2) {
      indep t;
      dep x, th1, th2;
      eq e1: d[1,1](x) + l1*d[1,1](th1) + g*th1;
      eq e2: d[1,1](x) + l2*d[1,1](th2) + g*th2;
    }

Each equation is a sum of terms; a term is an optional rational
coefficient (integers, parameters and independent variables combined
with + - * / and parentheses) applied to a derivative of one unknown,
d[i,j,...](u) with 1-based repeated variable indices. A bare unknown
means its order-0 term, and for one independent variable d(u) is
accepted for d[1](u). Lines starting with # are comments.

Printing is canonical: terms sorted by multi-index (descending deglex)
then by unknown position, coefficients in reduced normal form, so
parse -> print -> parse is the identity and printed text is stable
enough to hash.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .field import FieldContext, MultiIndex, RatFunc
from .ore import OpMatrix, OreOperator

RESERVED = {"system", "indep", "dep", "eq", "d"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(){}\[\],;:+\-*/])
    """,
    re.VERBOSE,
)


class SysSyntaxError(ValueError):
    """Parse failure with position information."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__("line %d, column %d: %s" % (line, col, message))
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Tok:
    kind: str  # int | ident | punct | end
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SysSyntaxError("unexpected character %r" % text[pos], line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            col = 1
        else:
            if kind not in ("ws", "comment"):
                toks.append(_Tok(kind, s, line, col))
            col += len(s)
        pos = m.end()
    toks.append(_Tok("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, message: str, tok: Optional[_Tok] = None):
        t = tok if tok is not None else self.peek()
        raise SysSyntaxError(message, t.line, t.col)

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            self.fail("expected %r, found %r" % (text, t.text or "end of input"), t)
        return t

    def expect_ident(self, what: str) -> _Tok:
        t = self.next()
        if t.kind != "ident":
            self.fail("expected %s, found %r" % (what, t.text or "end of input"), t)
        return t


@dataclass
class SystemDecl:
    """A parsed system: the operator matrix plus all the names."""

    name: str
    params: Tuple[str, ...]
    indep: Tuple[str, ...]
    dep: Tuple[str, ...]
    eq_names: Tuple[str, ...]
    matrix: OpMatrix

    @property
    def ctx(self) -> FieldContext:
        return self.matrix.ctx

    def __eq__(self, other) -> bool:
        if not isinstance(other, SystemDecl):
            return NotImplemented
        return (
            self.name == other.name
            and self.params == other.params
            and self.indep == other.indep
            and self.dep == other.dep
            and self.eq_names == other.eq_names
            and self.matrix.ctx == other.matrix.ctx
            and (self.matrix - other.matrix).is_zero()
        )

    def digest(self) -> str:
        """Short content hash of the canonical text."""
        return hashlib.sha256(to_text(self).encode()).hexdigest()[:12]


def _ident_list(p: _Parser, what: str, terminator: str) -> List[str]:
    names = [p.expect_ident(what).text]
    while p.peek().text == ",":
        p.next()
        names.append(p.expect_ident(what).text)
    p.expect(terminator)
    return names


def parse(text: str) -> SystemDecl:
    """Parse one system declaration."""
    p = _Parser(text)
    p.expect("system")
    name = p.expect_ident("system name").text
    p.expect("(")
    params: List[str] = []
    if p.peek().text != ")":
        params = _ident_list(p, "parameter name", ")")
    else:
        p.next()
    p.expect("{")
    p.expect("indep")
    indep = _ident_list(p, "variable name", ";")
    p.expect("dep")
    dep = _ident_list(p, "unknown name", ";")

    seen: Dict[str, str] = {}
    for role, names in (
        ("system", [name]),
        ("parameter", params),
        ("variable", indep),
        ("unknown", dep),
    ):
        for nm in names:
            if nm in RESERVED:
                raise SysSyntaxError("%r is reserved" % nm, 1, 1)
            if role != "system" and nm in seen:
                raise SysSyntaxError(
                    "duplicate identifier %r (already a %s)" % (nm, seen[nm]), 1, 1
                )
            seen[nm] = role

    ctx = FieldContext(tuple(indep), tuple(params))
    dep_index = {u: j for j, u in enumerate(dep)}
    scalar_names = set(params) | set(indep)

    eq_names: List[str] = []
    rows: List[List[OreOperator]] = []
    while p.peek().text == "eq":
        p.next()
        en = p.expect_ident("equation name").text
        if en in seen or en in RESERVED or en in eq_names:
            p.fail("duplicate or reserved equation name %r" % en)
        eq_names.append(en)
        p.expect(":")
        rows.append(_parse_row(p, ctx, dep_index, scalar_names))
        p.expect(";")
    p.expect("}")
    if p.peek().kind != "end":
        p.fail("trailing input after declaration")
    if not rows:
        raise SysSyntaxError("a system needs at least one equation", 1, 1)
    return SystemDecl(
        name=name,
        params=tuple(params),
        indep=tuple(indep),
        dep=tuple(dep),
        eq_names=tuple(eq_names),
        matrix=OpMatrix(ctx, rows),
    )


def _parse_row(
    p: _Parser,
    ctx: FieldContext,
    dep_index: Dict[str, int],
    scalar_names: set,
) -> List[OreOperator]:
    row = [OreOperator.zero(ctx) for _ in dep_index]
    first = True
    while True:
        sign = 1
        t = p.peek()
        if t.text in ("+", "-"):
            p.next()
            sign = -1 if t.text == "-" else 1
        elif not first:
            break
        coeff, target = _parse_term(p, ctx, dep_index, scalar_names)
        if sign < 0:
            coeff = ctx.zero - coeff
        if target is None:
            # only the literal zero term may omit an unknown
            if not coeff.is_zero():
                p.fail("term does not act on any declared unknown")
        else:
            j, mu = target
            row[j] = row[j] + OreOperator(ctx, {mu: coeff})
        first = False
        if p.peek().text not in ("+", "-"):
            break
    return row


def _parse_term(p, ctx, dep_index, scalar_names):
    """One product of factors; returns (coefficient, (dep, mu) or None)."""
    coeff = ctx.one
    target: Optional[Tuple[int, MultiIndex]] = None
    explicit_zero = False
    while True:
        t = p.peek()
        if t.text == "(":
            coeff = coeff * _parse_paren(p, ctx, scalar_names)
        elif t.kind == "int":
            p.next()
            if t.text == "0":
                explicit_zero = True
            coeff = coeff * ctx.num(int(t.text))
        elif t.kind == "ident":
            if t.text == "d":
                if target is not None:
                    p.fail("second derivative factor in one term", t)
                target = _parse_dterm(p, ctx, dep_index)
            elif t.text in dep_index:
                if target is not None:
                    p.fail("second unknown in one term", t)
                p.next()
                target = (dep_index[t.text], MultiIndex.zero(ctx.n))
            elif t.text in scalar_names:
                p.next()
                coeff = coeff * ctx.var(t.text)
            else:
                p.fail("undeclared identifier %r" % t.text, t)
        else:
            p.fail("expected a term, found %r" % (t.text or "end of input"), t)
        while p.peek().text == "/":
            p.next()
            div = _parse_divisor(p, ctx, scalar_names)
            if div.is_zero():
                p.fail("division by zero in coefficient")
            coeff = coeff / div
        if p.peek().text == "*":
            p.next()
            continue
        break
    if target is None and explicit_zero:
        return ctx.zero, None
    return coeff, target


def _parse_divisor(p, ctx, scalar_names) -> RatFunc:
    t = p.peek()
    if t.text == "(":
        return _parse_paren(p, ctx, scalar_names)
    if t.kind == "int":
        p.next()
        return ctx.num(int(t.text))
    if t.kind == "ident" and t.text in scalar_names:
        p.next()
        return ctx.var(t.text)
    p.fail("cannot divide by %r" % (t.text or "end of input"), t)


def _parse_dterm(p, ctx, dep_index) -> Tuple[int, MultiIndex]:
    p.expect("d")
    t = p.next()
    if t.text == "[":
        idx = []
        while True:
            ti = p.next()
            if ti.kind != "int":
                p.fail("expected a variable index", ti)
            i = int(ti.text)
            if not 1 <= i <= ctx.n:
                p.fail(
                    "variable index %d outside 1..%d" % (i, ctx.n), ti
                )
            idx.append(i)
            sep = p.next()
            if sep.text == ",":
                continue
            if sep.text == "]":
                break
            p.fail("expected ',' or ']'", sep)
        mu = MultiIndex.from_indices(ctx.n, idx)
        p.expect("(")
    elif t.text == "(":
        if ctx.n != 1:
            p.fail("d(u) shorthand needs exactly one independent variable", t)
        mu = MultiIndex.unit(1, 1)
    else:
        p.fail("expected '[' or '(' after d", t)
    tu = p.expect_ident("unknown name")
    if tu.text not in dep_index:
        p.fail("%r is not a declared unknown" % tu.text, tu)
    p.expect(")")
    return dep_index[tu.text], mu


def _parse_paren(p, ctx, scalar_names) -> RatFunc:
    p.expect("(")
    v = _parse_sum(p, ctx, scalar_names)
    p.expect(")")
    return v


def _parse_sum(p, ctx, scalar_names) -> RatFunc:
    t = p.peek()
    neg = False
    if t.text in ("+", "-"):
        p.next()
        neg = t.text == "-"
    v = _parse_product(p, ctx, scalar_names)
    if neg:
        v = ctx.zero - v
    while p.peek().text in ("+", "-"):
        op = p.next().text
        rhs = _parse_product(p, ctx, scalar_names)
        v = v - rhs if op == "-" else v + rhs
    return v


def _parse_product(p, ctx, scalar_names) -> RatFunc:
    v = _parse_atom(p, ctx, scalar_names)
    while p.peek().text in ("*", "/"):
        op = p.next().text
        rhs = _parse_atom(p, ctx, scalar_names)
        if op == "/":
            if rhs.is_zero():
                p.fail("division by zero in coefficient")
            v = v / rhs
        else:
            v = v * rhs
    return v


def _parse_atom(p, ctx, scalar_names) -> RatFunc:
    t = p.next()
    if t.text == "(":
        v = _parse_sum(p, ctx, scalar_names)
        p.expect(")")
        return v
    if t.kind == "int":
        return ctx.num(int(t.text))
    if t.kind == "ident" and t.text in scalar_names:
        return ctx.var(t.text)
    if t.kind == "ident":
        raise SysSyntaxError(
            "%r cannot appear inside a coefficient" % t.text, t.line, t.col
        )
    raise SysSyntaxError(
        "expected a coefficient, found %r" % (t.text or "end of input"),
        t.line,
        t.col,
    )


# -- printing ----------------------------------------------------------


def _coeff_str(c: RatFunc) -> str:
    return str(c)


def _is_atom(cs: str) -> bool:
    return " " not in cs and "/" not in cs


def _row_text(row: Sequence[OreOperator], dep: Sequence[str]) -> str:
    triples = []
    for j, op in enumerate(row):
        for mu, c in op.terms.items():
            triples.append((mu, j, c))
    triples.sort(key=lambda t: (t[0].deglex_key(), -t[1]), reverse=True)
    if not triples:
        return "0"
    parts: List[str] = []
    for mu, j, c in triples:
        cs = _coeff_str(c)
        if mu.order == 0:
            head = dep[j]
        else:
            head = "d[" + ",".join(str(i) for i in mu.indices()) + "](%s)" % dep[j]
        if cs == "1":
            body = head
        elif cs == "-1":
            body = "-" + head
        elif _is_atom(cs):
            body = "%s*%s" % (cs, head)
        else:
            body = "(%s)*%s" % (cs, head)
        if not parts:
            parts.append(body)
        elif body.startswith("-"):
            parts.extend(["-", body[1:]])
        else:
            parts.extend(["+", body])
    return " ".join(parts)


def to_text(decl: SystemDecl) -> str:
    """Canonical printed form; parse(to_text(decl)) == decl."""
    out = ["system %s(%s) {" % (decl.name, ", ".join(decl.params))]
    out.append("  indep %s;" % ", ".join(decl.indep))
    out.append("  dep %s;" % ", ".join(decl.dep))
    for en, row in zip(decl.eq_names, decl.matrix.rows):
        out.append("  eq %s: %s;" % (en, _row_text(row, decl.dep)))
    out.append("}")
    return "\n".join(out) + "\n"


def from_matrix(
    name: str,
    A: OpMatrix,
    dep: Optional[Sequence[str]] = None,
    eq_names: Optional[Sequence[str]] = None,
) -> SystemDecl:
    """Wrap a matrix as a declaration, generating missing names."""
    ctx = A.ctx
    if dep is None:
        dep = tuple("y%d" % (j + 1) for j in range(A.m))
    if eq_names is None:
        eq_names = tuple("e%d" % (i + 1) for i in range(A.p))
    if len(dep) != A.m or len(eq_names) != A.p:
        raise ValueError("name counts do not match the matrix shape")
    return SystemDecl(
        name=name,
        params=tuple(ctx.params),
        indep=tuple(ctx.xvars),
        dep=tuple(dep),
        eq_names=tuple(eq_names),
        matrix=A,
    )
