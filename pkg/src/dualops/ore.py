"""Linear differential operators over K and matrices of them.

An operator is a finite sum  sum_mu  a_mu(x) d_mu  with a_mu in K and
d_mu = d_1^mu_1 ... d_n^mu_n; coefficients are kept on the left and the
commutation rule d_i a = a d_i + (da/dx^i) is applied on multiplication.
The order of the zero operator is -infinity.

The formal adjoint is  ad(P) = sum_mu (-1)^|mu| d_mu o a_mu; on matrices
the adjoint transposes and takes entrywise adjoints, so composition
reverses: ad(A o B) = ad(B) o ad(A).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .field import (
    FieldContext,
    IndexOutOfRange,
    MultiIndex,
    RatFunc,
    multi_indices_up_to,
)
from . import linalg

NEG_INF = float("-inf")


class DimensionMismatch(ValueError):
    """Matrix shapes or contexts do not line up."""


class BoundExceeded(RuntimeError):
    """A semi-decision search hit its order bound without an answer."""


class SingularMap(ValueError):
    """A coordinate change with vanishing determinant."""


def _binom_mi(mu: MultiIndex, alpha: MultiIndex) -> int:
    out = 1
    for m, a in zip(mu, alpha):
        out *= math.comb(m, a)
    return out


def _sub_indices(mu: MultiIndex):
    """All alpha <= mu componentwise."""
    ranges = [range(e + 1) for e in mu]
    for combo in itertools.product(*ranges):
        yield MultiIndex(combo)


class OreOperator:
    """One scalar differential operator in normal form."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: FieldContext, terms: Mapping[MultiIndex, RatFunc]):
        self.ctx = ctx
        self.terms = {
            MultiIndex(mu): c for mu, c in terms.items() if not c.is_zero()
        }

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldContext) -> "OreOperator":
        return cls(ctx, {})

    @classmethod
    def from_scalar(cls, value) -> "OreOperator":
        if isinstance(value, RatFunc):
            return cls(value.ctx, {MultiIndex.zero(value.ctx.n): value})
        raise TypeError("from_scalar needs a RatFunc")

    @classmethod
    def d(cls, ctx: FieldContext, *indices: int) -> "OreOperator":
        """d_{i1 i2 ...}: the monomial derivative for a repeated-index list."""
        mu = MultiIndex.from_indices(ctx.n, indices)
        return cls(ctx, {mu: ctx.one})

    def _coerce(self, other) -> "OreOperator":
        if isinstance(other, OreOperator):
            if other.ctx != self.ctx:
                raise DimensionMismatch("operators from different contexts")
            return other
        if isinstance(other, RatFunc):
            if other.ctx != self.ctx:
                raise DimensionMismatch("operators from different contexts")
            return OreOperator.from_scalar(other)
        if isinstance(other, (int, Fraction)):
            return OreOperator.from_scalar(self.ctx.num(other))
        return NotImplemented

    # -- ring structure ------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for mu, c in other.terms.items():
            cur = terms.get(mu)
            nc = c if cur is None else cur + c
            if nc.is_zero():
                terms.pop(mu, None)
            else:
                terms[mu] = nc
        return OreOperator(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return OreOperator(self.ctx, {mu: -c for mu, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Composition self o other."""
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ctx = self.ctx
        acc: dict[MultiIndex, RatFunc] = {}
        for mu, a in self.terms.items():
            for nu, b in other.terms.items():
                derivs = _all_partials(b, mu)
                for alpha in _sub_indices(mu):
                    gamma = MultiIndex(tuple(m - al for m, al in zip(mu, alpha)))
                    coeff = a * derivs[gamma] * _binom_mi(mu, alpha)
                    if coeff.is_zero():
                        continue
                    key = alpha + nu
                    cur = acc.get(key)
                    nc = coeff if cur is None else cur + coeff
                    if nc.is_zero():
                        acc.pop(key, None)
                    else:
                        acc[key] = nc
        return OreOperator(ctx, acc)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, RatFunc, OreOperator)):
            o = self._coerce(other)
            if o is NotImplemented:
                return NotImplemented
            return self.ctx == o.ctx and self.terms == o.terms
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- operator structure --------------------------------------------

    @property
    def order(self):
        if not self.terms:
            return NEG_INF
        return max(mu.order for mu in self.terms)

    def coeff(self, mu) -> RatFunc:
        return self.terms.get(MultiIndex(mu), self.ctx.zero)

    def adjoint(self) -> "OreOperator":
        ctx = self.ctx
        acc: dict[MultiIndex, RatFunc] = {}
        for mu, a in self.terms.items():
            sign = -1 if mu.order % 2 else 1
            derivs = _all_partials(a, mu)
            for alpha in _sub_indices(mu):
                gamma = MultiIndex(tuple(m - al for m, al in zip(mu, alpha)))
                coeff = derivs[gamma] * (_binom_mi(mu, alpha) * sign)
                if coeff.is_zero():
                    continue
                cur = acc.get(alpha)
                nc = coeff if cur is None else cur + coeff
                if nc.is_zero():
                    acc.pop(alpha, None)
                else:
                    acc[alpha] = nc
        return OreOperator(ctx, acc)

    def apply(self, f: RatFunc) -> RatFunc:
        if not isinstance(f, RatFunc) or f.ctx != self.ctx:
            raise DimensionMismatch("apply needs a RatFunc from the same context")
        out = self.ctx.zero
        for mu, a in self.terms.items():
            g = f
            for i, e in enumerate(mu, start=1):
                for _ in range(e):
                    g = g.partial(i)
            out = out + a * g
        return out

    def map_coeffs(self, fn) -> "OreOperator":
        return OreOperator(self.ctx, {mu: fn(c) for mu, c in self.terms.items()})

    def sorted_terms(self):
        """Terms in descending deglex order, leading first."""
        return sorted(
            self.terms.items(), key=lambda kv: kv[0].deglex_key(), reverse=True
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mu, c in self.sorted_terms():
            cs = str(c)
            if mu.order == 0:
                body = cs if _is_atom(cs) else f"({cs})"
            else:
                dtok = "d[" + ",".join(str(i) for i in mu.indices()) + "]"
                if cs == "1":
                    body = dtok
                elif cs == "-1":
                    body = f"-{dtok}"
                elif _is_atom(cs):
                    body = f"{cs}*{dtok}"
                else:
                    body = f"({cs})*{dtok}"
            if not parts:
                parts.append(body)
            elif body.startswith("-"):
                parts.extend(["-", body[1:]])
            else:
                parts.extend(["+", body])
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"<Op: {self}>"


def _is_atom(cs: str) -> bool:
    return " " not in cs and "/" not in cs


def _all_partials(b: RatFunc, mu: MultiIndex) -> dict[MultiIndex, RatFunc]:
    """All d^gamma b for gamma <= mu, by iterated first derivatives."""
    out = {MultiIndex.zero(len(mu)): b}
    for i, e in enumerate(mu, start=1):
        if e == 0:
            continue
        for gamma in list(out):
            cur = out[gamma]
            g = gamma
            for _ in range(e):
                cur = cur.partial(i)
                g = g.bump(i)
                out[g] = cur
    return out


class OpMatrix:
    """A p x m matrix of operators acting on column vectors."""

    __slots__ = ("ctx", "p", "m", "rows")

    def __init__(self, ctx: FieldContext, rows: Sequence[Sequence]):
        self.ctx = ctx
        self.p = len(rows)
        if self.p == 0:
            raise DimensionMismatch("matrix needs at least one row")
        self.m = len(rows[0])
        if self.m == 0:
            raise DimensionMismatch("matrix needs at least one column")
        norm = []
        for r in rows:
            if len(r) != self.m:
                raise DimensionMismatch("ragged rows")
            nr = []
            for e in r:
                if isinstance(e, OreOperator):
                    if e.ctx != ctx:
                        raise DimensionMismatch("mixed contexts in matrix")
                    nr.append(e)
                elif isinstance(e, RatFunc):
                    nr.append(OreOperator.from_scalar(e))
                elif isinstance(e, (int, Fraction)):
                    nr.append(OreOperator.from_scalar(ctx.num(e)))
                else:
                    raise TypeError(f"bad matrix entry {e!r}")
            norm.append(tuple(nr))
        self.rows = tuple(norm)

    @classmethod
    def zero(cls, ctx: FieldContext, p: int, m: int) -> "OpMatrix":
        z = OreOperator.zero(ctx)
        return cls(ctx, [[z] * m for _ in range(p)])

    @classmethod
    def identity(cls, ctx: FieldContext, m: int) -> "OpMatrix":
        z = OreOperator.zero(ctx)
        one = OreOperator.from_scalar(ctx.one)
        return cls(ctx, [[one if i == j else z for j in range(m)] for i in range(m)])

    def entry(self, i: int, j: int) -> OreOperator:
        return self.rows[i][j]

    @property
    def order(self):
        return max((e.order for r in self.rows for e in r), default=NEG_INF)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OpMatrix)
            and self.ctx == other.ctx
            and self.rows == other.rows
        )

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        if (self.p, self.m) != (other.p, other.m):
            raise DimensionMismatch(
                f"cannot add {self.p}x{self.m} and {other.p}x{other.m}"
            )
        return OpMatrix(
            self.ctx,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        return self + (-other)

    def __neg__(self) -> "OpMatrix":
        return OpMatrix(self.ctx, [[-e for e in r] for r in self.rows])

    def __mul__(self, other):
        """Composition: (A*B) v = A(B v); also scalar scaling."""
        if isinstance(other, OpMatrix):
            if self.ctx != other.ctx:
                raise DimensionMismatch("matrices from different contexts")
            if self.m != other.p:
                raise DimensionMismatch(
                    f"cannot compose {self.p}x{self.m} with {other.p}x{other.m}"
                )
            out = []
            for i in range(self.p):
                row = []
                for j in range(other.m):
                    acc = OreOperator.zero(self.ctx)
                    for k in range(self.m):
                        a = self.rows[i][k]
                        b = other.rows[k][j]
                        if a.is_zero() or b.is_zero():
                            continue
                        acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return OpMatrix(self.ctx, out)
        if isinstance(other, (int, Fraction, RatFunc)):
            return OpMatrix(
                self.ctx, [[e * other for e in r] for r in self.rows]
            )
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RatFunc)):
            return OpMatrix(self.ctx, [[other * e for e in r] for r in self.rows])
        return NotImplemented

    def adjoint(self) -> "OpMatrix":
        """Transpose of entrywise adjoints: the matrix formal adjoint."""
        return OpMatrix(
            self.ctx,
            [
                [self.rows[i][j].adjoint() for i in range(self.p)]
                for j in range(self.m)
            ],
        )

    def apply(self, vec: Sequence[RatFunc]) -> list[RatFunc]:
        if len(vec) != self.m:
            raise DimensionMismatch(f"vector length {len(vec)} != {self.m}")
        out = []
        for r in self.rows:
            acc = self.ctx.zero
            for e, f in zip(r, vec):
                if not e.is_zero():
                    acc = acc + e.apply(f)
            out.append(acc)
        return out

    def scale_rows(self, weights: Sequence) -> "OpMatrix":
        if len(weights) != self.p:
            raise DimensionMismatch("one weight per row required")
        return OpMatrix(
            self.ctx,
            [[w * e for e in r] for w, r in zip(weights, self.rows)],
        )

    def scale_cols(self, weights: Sequence) -> "OpMatrix":
        if len(weights) != self.m:
            raise DimensionMismatch("one weight per column required")
        return OpMatrix(
            self.ctx,
            [[e * w for e, w in zip(r, weights)] for r in self.rows],
        )

    def stack(self, other: "OpMatrix") -> "OpMatrix":
        if self.m != other.m or self.ctx != other.ctx:
            raise DimensionMismatch("stack needs equal widths and context")
        return OpMatrix(self.ctx, list(self.rows) + list(other.rows))

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.rows for e in r)

    def __str__(self) -> str:
        cells = [[str(e) for e in r] for r in self.rows]
        widths = [max(len(cells[i][j]) for i in range(self.p)) for j in range(self.m)]
        lines = []
        for r in cells:
            lines.append(
                "[ " + " | ".join(c.rjust(w) for c, w in zip(r, widths)) + " ]"
            )
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"<OpMatrix {self.p}x{self.m} over {self.ctx!r}>"


# -- module-level contract names --------------------------------------


def op_mul(P: OreOperator, Q: OreOperator) -> OreOperator:
    return P * Q


def adjoint(P: OreOperator) -> OreOperator:
    return P.adjoint()


def adjoint_matrix(A: OpMatrix) -> OpMatrix:
    return A.adjoint()


def apply(A, arg):
    return A.apply(arg)


def lclm(P: OreOperator, Q: OreOperator, max_order: int):
    """Least common left multiple ansatz: find (U, V) with U o P = V o Q.

    Searches total order t = max(ord P, ord Q) .. max_order and returns
    the first nonzero solution with U normalized to a monic leading
    coefficient. Raises BoundExceeded when no multiple shows up in range.
    """
    if P.is_zero() or Q.is_zero():
        raise ValueError("lclm of a zero operator")
    if P.ctx != Q.ctx:
        raise DimensionMismatch("operators from different contexts")
    ctx = P.ctx
    n = ctx.n
    ordp, ordq = int(P.order), int(Q.order)
    for t in range(max(ordp, ordq), max_order + 1):
        alphas = multi_indices_up_to(n, t - ordp)
        betas = multi_indices_up_to(n, t - ordq)
        rows = []
        tags: list[tuple[str, MultiIndex]] = []
        for a in alphas:
            op = OreOperator(ctx, {a: ctx.one}) * P
            rows.append({mu: c for mu, c in op.terms.items()})
            tags.append(("u", a))
        for b in betas:
            op = OreOperator(ctx, {b: ctx.one}) * Q
            rows.append({mu: -c for mu, c in op.terms.items()})
            tags.append(("v", b))
        col_order = sorted(
            {mu for r in rows for mu in r},
            key=MultiIndex.deglex_key,
            reverse=True,
        )
        nulls = linalg.left_nullspace(rows, col_order, one=ctx.one)
        if not nulls:
            continue
        combo = nulls[0]
        uterms: dict[MultiIndex, RatFunc] = {}
        vterms: dict[MultiIndex, RatFunc] = {}
        for idx, coeff in combo.items():
            kind, mi = tags[idx]
            (uterms if kind == "u" else vterms)[mi] = coeff
        U = OreOperator(ctx, uterms)
        V = OreOperator(ctx, vterms)
        lead = max(U.terms, key=MultiIndex.deglex_key)
        scale = 1 / U.terms[lead]
        return scale * U, scale * V
    raise BoundExceeded(f"no common left multiple up to order {max_order}")


def _frac_matrix_inverse(M: Sequence[Sequence[Fraction]]):
    n = len(M)
    aug = [
        [Fraction(M[i][j]) for j in range(n)]
        + [Fraction(1) if j == i else Fraction(0) for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise SingularMap("coordinate change matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def transform_affine(obj, M: Sequence[Sequence], c: Sequence = None):
    """Rewrite an operator in affine coordinates xbar = M x + c.

    Derivatives pull back as d_i = sum_j M[j][i] dbar_j and coefficients
    are precomposed with x = M^-1 (xbar - c); the result lives in the
    same context with xbar taking over the old variable names. M must be
    an exact invertible matrix over Q.
    """
    if isinstance(obj, OpMatrix):
        ctx = obj.ctx
    elif isinstance(obj, OreOperator):
        ctx = obj.ctx
    else:
        raise TypeError("transform_affine wants an OreOperator or OpMatrix")
    n = ctx.n
    M = [[Fraction(e) for e in row] for row in M]
    if len(M) != n or any(len(r) != n for r in M):
        raise DimensionMismatch(f"need a {n}x{n} matrix")
    if c is None:
        c = [Fraction(0)] * n
    c = [Fraction(e) for e in c]
    if len(c) != n:
        raise DimensionMismatch(f"need a length-{n} shift")
    Minv = _frac_matrix_inverse(M)

    import sympy

    xsyms = [sympy.Symbol(nm) for nm in ctx.xvars]
    backmap = {}
    for i in range(n):
        expr = sum(
            (sympy.Rational(Minv[i][j]) * (xsyms[j] - sympy.Rational(c[j]))
             for j in range(n)),
            sympy.Integer(0),
        )
        backmap[xsyms[i]] = expr

    new_d = []
    for i in range(1, n + 1):
        acc = OreOperator.zero(ctx)
        for j in range(1, n + 1):
            w = M[j - 1][i - 1]
            if w:
                acc = acc + ctx.num(w) * OreOperator.d(ctx, j)
        new_d.append(acc)

    def tf_coeff(a: RatFunc) -> RatFunc:
        return ctx.from_expr(a.as_expr().xreplace(backmap))

    def tf_op(P: OreOperator) -> OreOperator:
        out = OreOperator.zero(ctx)
        for mu, a in P.terms.items():
            piece = OreOperator.from_scalar(tf_coeff(a))
            for i, e in enumerate(mu, start=1):
                for _ in range(e):
                    piece = piece * new_d[i - 1]
            out = out + piece
        return out

    if isinstance(obj, OreOperator):
        return tf_op(obj)
    return OpMatrix(ctx, [[tf_op(e) for e in r] for r in obj.rows])


def rebase(obj, new_ctx, mapping: dict = None):
    """Move an operator or matrix into another field context.

    mapping sends variable or parameter names of the old context to
    expressions (strings or sympy expressions) over the new one, e.g.
    {"l1": "l", "l2": "l"} to identify two parameters. The number of
    base variables must agree, since derivation indices carry over.
    """
    import sympy

    if isinstance(obj, OpMatrix):
        src_ctx = obj.ctx
    elif isinstance(obj, OreOperator):
        src_ctx = obj.ctx
    else:
        raise TypeError(f"cannot rebase {type(obj).__name__}")
    if new_ctx.n != src_ctx.n:
        raise DimensionMismatch("contexts have different numbers of variables")
    subs = {}
    for old, new in (mapping or {}).items():
        subs[sympy.Symbol(old)] = sympy.sympify(new)

    def conv(c):
        e = c.as_expr()
        if subs:
            e = e.xreplace(subs)
        return new_ctx.from_expr(e)

    def conv_op(p):
        return OreOperator(
            new_ctx, {mu: conv(c) for mu, c in p.terms.items()}
        )

    if isinstance(obj, OreOperator):
        return conv_op(obj)
    return OpMatrix(new_ctx, [[conv_op(e) for e in r] for r in obj.rows])
