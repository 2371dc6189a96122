"""Jet prolongation, compatibility conditions and symbol cohomology.

A p x m operator matrix A of order q cuts out a linear system on the jets
of m unknowns. Prolonging r times gives a K-linear matrix whose rows are
d_alpha o (row i) for |alpha| <= r and whose columns are jet coordinates
(j, beta) with |beta| <= q + r. Everything here (compatibility conditions,
differential rank, projection dimensions, the first-order reduction and
the delta-cohomology of symbols) is exact linear algebra on those rows.

Column priority is jets-first: higher deglex order is eliminated first,
so parametric jets surface at the bottom. Pivot rows are chosen by lowest
coefficient degree, then lowest position.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import linalg
from .field import (
    FieldContext,
    MultiIndex,
    RatFunc,
    jet_dim,
    multi_indices_of_order,
    multi_indices_up_to,
    sym_dim,
)
from .ore import BoundExceeded, DimensionMismatch, OpMatrix, OreOperator, lclm

JetCoord = tuple  # (dep index j, MultiIndex beta)


def _as_fraction(c: RatFunc) -> Optional[Fraction]:
    fe = c.fe
    if not fe.denom.is_ground or not fe.numer.is_ground:
        return None
    num = fe.numer.LC if fe.numer else 0
    den = fe.denom.LC
    val = Fraction(int(num.numerator), int(num.denominator)) / Fraction(
        int(den.numerator), int(den.denominator)
    )
    return val


def _col_priority_key(col: JetCoord):
    j, mu = col
    return (mu.order, tuple(reversed(mu)), -j)


def _sorted_cols(cols: Iterable[JetCoord]) -> list[JetCoord]:
    return sorted(cols, key=_col_priority_key, reverse=True)


class JetMatrix:
    """Prolongation of an operator matrix, expanded over jet coordinates."""

    __slots__ = ("source", "r", "rows", "row_tags", "one", "constant")

    def __init__(self, source: OpMatrix, r: int):
        if r < 0:
            raise ValueError("prolongation order must be >= 0")
        self.source = source
        self.r = r
        ctx = source.ctx
        rows: list[dict] = []
        tags: list[tuple[int, MultiIndex]] = []
        constant = all(
            _as_fraction(c) is not None
            for oprow in source.rows
            for e in oprow
            for c in e.terms.values()
        )
        for alpha in multi_indices_up_to(ctx.n, r):
            shift = OreOperator(ctx, {alpha: ctx.one})
            for i, oprow in enumerate(source.rows):
                jet: dict = {}
                for j, e in enumerate(oprow):
                    if e.is_zero():
                        continue
                    comp = shift * e
                    for mu, c in comp.terms.items():
                        jet[(j, mu)] = (
                            _as_fraction(c) if constant else c
                        )
                rows.append(jet)
                tags.append((i, alpha))
        self.rows = rows
        self.row_tags = tags
        self.constant = constant
        self.one = Fraction(1) if constant else ctx.one

    @property
    def q(self):
        return self.source.order

    def columns(self) -> list[JetCoord]:
        cols = {c for row in self.rows for c in row}
        return _sorted_cols(cols)

    def all_columns(self) -> list[JetCoord]:
        """Every jet coordinate up to order q + r, present or not."""
        q = int(self.source.order)
        cols = [
            (j, mu)
            for mu in multi_indices_up_to(self.source.ctx.n, q + self.r)
            for j in range(self.source.m)
        ]
        return _sorted_cols(cols)

    def rank(self) -> int:
        return linalg.rank_of(self.rows, self.columns(), one=self.one)

    def echelon(self, track: bool = False) -> linalg.Echelon:
        return linalg.row_reduce(
            self.rows, self.columns(), one=self.one, track=track
        )


def prolong(A: OpMatrix, r: int) -> JetMatrix:
    return JetMatrix(A, r)


def rank_K(A: OpMatrix, r: int) -> int:
    """Rank over K of the r-th prolongation."""
    return JetMatrix(A, r).rank()


# -- differential rank -------------------------------------------------


def _x_constant(A: OpMatrix) -> bool:
    """True when no coefficient depends on the base variables (ground
    rationals and parameters are fine): then operators commute."""
    for row in A.rows:
        for e in row:
            for c in e.terms.values():
                for i in range(1, A.ctx.n + 1):
                    if not c.partial(i).is_zero():
                        return False
    return True


def _commutative_rank(A: OpMatrix) -> int:
    """Rank over the fraction field of the (commutative) operator ring,
    valid when coefficients are free of the base variables: replace each
    d_i by an indeterminate and run exact elimination."""
    ctx = A.ctx
    names = [f"D{i}_" for i in range(1, ctx.n + 1)]
    sub = FieldContext(names, params=ctx.params)
    cache: dict = {}

    def conv(c: RatFunc) -> RatFunc:
        return sub.from_expr(c.as_expr())

    rows = []
    for row in A.rows:
        jr = {}
        for j, e in enumerate(row):
            acc = sub.zero
            for mu, c in e.terms.items():
                mono = sub.one
                for i, exp in enumerate(mu):
                    for _ in range(exp):
                        mono = mono * sub.x(i + 1)
                acc = acc + conv(c) * mono
            if not acc.is_zero():
                jr[j] = acc
        rows.append(jr)
    return linalg.rank_of(rows, list(range(A.m)), one=sub.one)


def _skew_rank(A: OpMatrix, max_order: int) -> int:
    """Rank over the skew fraction field by Gaussian elimination; rows
    are cleared with lclm multipliers, which are nonzero scalars and so
    preserve rank."""
    rows = [list(r) for r in A.rows]
    rank = 0
    for col in range(A.m):
        best = None
        for k in range(rank, len(rows)):
            e = rows[k][col]
            if e.is_zero():
                continue
            key = (int(e.order), len(e.terms))
            if best is None or key < best[0]:
                best = (key, k)
        if best is None:
            continue
        k = best[1]
        rows[rank], rows[k] = rows[k], rows[rank]
        P = rows[rank][col]
        for k in range(rank + 1, len(rows)):
            Q = rows[k][col]
            if Q.is_zero():
                continue
            U, V = lclm(P, Q, max_order)
            rows[k] = [
                V * rows[k][j] - U * rows[rank][j] for j in range(A.m)
            ]
        rank += 1
    return rank


def rank_D(A: OpMatrix, max_order: int) -> int:
    """Rank of the row module over the operator ring's fraction field.

    Exact: commutative elimination when coefficients are free of the
    base variables, skew elimination with lclm multipliers otherwise
    (max_order only bounds the lclm searches on that path)."""
    if A.is_zero():
        return 0
    if _x_constant(A):
        return _commutative_rank(A)
    return _skew_rank(A, max_order)


# -- compatibility conditions ------------------------------------------


@dataclass
class CCResult:
    """Generating compatibility conditions of an operator matrix.

    cc                  OpMatrix of generators (one per row) or None
    search_order        highest coefficient order that was searched
    certified_complete  True when rank additivity rank_input + rank_cc = p
                        confirmed the generators generate everything
    rank_input          rank of the input's row module
    rank_cc             rank of the row module of the generators
    """

    cc: Optional[OpMatrix]
    search_order: int
    certified_complete: bool
    rank_input: Optional[int]
    rank_cc: Optional[int]

    @property
    def generators(self) -> list:
        return [] if self.cc is None else list(self.cc.rows)


def _combo_to_oprow(
    combo: dict, tags: Sequence[tuple[int, MultiIndex]], p: int, ctx: FieldContext
) -> list[OreOperator]:
    terms_per_row: list[dict] = [dict() for _ in range(p)]
    for idx, coeff in combo.items():
        i, alpha = tags[idx]
        if isinstance(coeff, Fraction):
            coeff = ctx.num(coeff)
        cur = terms_per_row[i].get(alpha)
        nc = coeff if cur is None else cur + coeff
        terms_per_row[i][alpha] = nc
    return [OreOperator(ctx, t) for t in terms_per_row]


def _monic_row(row: Sequence[OreOperator], ctx: FieldContext) -> list[OreOperator]:
    for e in row:
        if not e.is_zero():
            lead = max(e.terms, key=MultiIndex.deglex_key)
            c = e.terms[lead]
            return [x.map_coeffs(lambda v: v / c) for x in row]
    return list(row)


def cc(A: OpMatrix, max_order: int, minimize: bool = False) -> CCResult:
    """Generating compatibility conditions, searched order by order.

    At order s every left-kernel combination of the prolonged jet matrix
    is a CC with coefficients of order <= s; combinations already inside
    the row module of earlier generators are pruned, the rest join the
    generating set. The search stops at the first order where
    rank(A) + rank(generators) = p, which certifies completeness.

    `minimize` runs a final sweep dropping generators that sit in the
    module of the others at a slightly larger bound. The greedy pruning
    already yields minimal sets on the worked examples, so the sweep is
    off by default; it can only shrink the set, never change its module.
    """
    ctx = A.ctx
    p = A.p
    try:
        rank_input = rank_D(A, max_order + ctx.n + 2)
    except BoundExceeded:
        rank_input = None

    gens: list[list[OreOperator]] = []
    rank_cc: Optional[int] = 0

    if rank_input == p:
        return CCResult(None, 0, True, rank_input, 0)

    for s in range(0, max_order + 1):
        jm = JetMatrix(A, s)
        nulls = linalg.left_nullspace(jm.rows, jm.columns(), one=jm.one)
        fresh = []
        for combo in nulls:
            row = _combo_to_oprow(combo, jm.row_tags, p, ctx)
            if all(e.is_zero() for e in row):
                continue
            fresh.append(_monic_row(row, ctx))
        if fresh and gens:
            keep_mask = _membership_batch(
                fresh, gens, bound=s, ctx=ctx, width=p
            )
            fresh = [r for r, member in zip(fresh, keep_mask) if not member]
        new_any = False
        for row in fresh:
            if gens:
                inside = _membership_batch([row], gens, bound=s, ctx=ctx, width=p)[0]
                if inside:
                    continue
            gens.append(row)
            new_any = True
        if gens and (new_any or rank_cc is None):
            try:
                rank_cc = rank_D(
                    OpMatrix(ctx, gens), max_order + ctx.n + 2
                )
            except BoundExceeded:
                rank_cc = None
        if (
            rank_input is not None
            and rank_cc is not None
            and rank_input + rank_cc == p
        ):
            if minimize:
                gens = _minimize_gens(gens, s + 2, ctx, p)
            mat = OpMatrix(ctx, gens) if gens else None
            return CCResult(mat, s, True, rank_input, rank_cc)
    if minimize:
        gens = _minimize_gens(gens, max_order + 2, ctx, p)
    mat = OpMatrix(ctx, gens) if gens else None
    return CCResult(mat, max_order, False, rank_input, rank_cc if gens else 0)


def _minimize_gens(
    gens: list[list[OreOperator]], bound: int, ctx: FieldContext, width: int
) -> list[list[OreOperator]]:
    """Drop generators that lie in the module of the remaining ones.

    Later rows are tried first since the within-order pruning already
    vetted earlier rows against smaller sets. Greedy, so the result is
    minimal only with respect to single removals at this bound."""
    out = list(gens)
    i = len(out) - 1
    while i >= 0 and len(out) > 1:
        others = out[:i] + out[i + 1 :]
        member = _membership_batch([out[i]], others, bound, ctx, width)[0]
        if member:
            out.pop(i)
        i -= 1
    return out


# -- membership --------------------------------------------------------


def _oprow_to_jet(row: Sequence[OreOperator], constant: bool) -> dict:
    jet: dict = {}
    for j, e in enumerate(row):
        for mu, c in e.terms.items():
            jet[(j, mu)] = _as_fraction(c) if constant else c
    return jet


def _rows_constant(rows: Iterable[Sequence[OreOperator]]) -> bool:
    for row in rows:
        for e in row:
            for c in e.terms.values():
                if _as_fraction(c) is None:
                    return False
    return True


def _membership_batch(
    targets: list[Sequence[OreOperator]],
    gens: list[Sequence[OreOperator]],
    bound: int,
    ctx: FieldContext,
    width: int,
) -> list[bool]:
    """For each target row, is it a combination of prolonged generators
    with coefficient order <= bound? One echelon per order, shared."""
    constant = _rows_constant(targets) and _rows_constant(gens)
    one = Fraction(1) if constant else ctx.one
    result = [False] * len(targets)
    remaining = list(range(len(targets)))
    tjets = [_oprow_to_jet(t, constant) for t in targets]
    for s in range(0, bound + 1):
        stack = []
        for g in gens:
            for alpha in multi_indices_up_to(ctx.n, s):
                shift = OreOperator(ctx, {alpha: ctx.one})
                stack.append(
                    _oprow_to_jet([shift * e for e in g], constant)
                )
        cols = {c for r in stack for c in r}
        for i in remaining:
            cols.update(tjets[i])
        col_order = _sorted_cols(cols)
        ech = linalg.row_reduce(stack, col_order, one=one, track=True)
        by_col = {c: (r, k) for k, (c, r) in enumerate(ech.pivots)}
        still = []
        for i in remaining:
            rem = dict(tjets[i])
            ok = True
            for col in col_order:
                v = rem.get(col)
                if not v:
                    continue
                hit = by_col.get(col)
                if hit is None:
                    ok = False
                    break
                prow, _ = hit
                for cc_, w in prow.items():
                    nv = rem.get(cc_)
                    nv = -w * v if nv is None else nv - w * v
                    if nv:
                        rem[cc_] = nv
                    elif cc_ in rem:
                        del rem[cc_]
            if ok and not rem:
                result[i] = True
            else:
                still.append(i)
        remaining = still
        if not remaining:
            break
    return result


def membership(
    row, gens: OpMatrix, bound: int
) -> Optional[list[OreOperator]]:
    """Express a 1 x m operator row inside the row module of gens.

    Returns the coefficient operators (one per generator row) of a
    combination sum U_j o G_j = row, or None if none exists with
    ord(U_j) <= bound.
    """
    if isinstance(row, OpMatrix):
        if row.p != 1:
            raise DimensionMismatch("membership target must be a single row")
        row = list(row.rows[0])
    row = list(row)
    ctx = gens.ctx
    if len(row) != gens.m:
        raise DimensionMismatch(f"row width {len(row)} != {gens.m}")
    constant = _rows_constant([row]) and _rows_constant(gens.rows)
    one = Fraction(1) if constant else ctx.one
    target = _oprow_to_jet(row, constant)
    for s in range(0, bound + 1):
        stack = []
        tags = []
        for gi, g in enumerate(gens.rows):
            for alpha in multi_indices_up_to(ctx.n, s):
                shift = OreOperator(ctx, {alpha: ctx.one})
                stack.append(_oprow_to_jet([shift * e for e in g], constant))
                tags.append((gi, alpha))
        cols = {c for r in stack for c in r}
        cols.update(target)
        combo = linalg.combination_of(
            target, stack, _sorted_cols(cols), one=one
        )
        if combo is None:
            continue
        coeffs: list[dict] = [dict() for _ in range(gens.p)]
        for idx, v in combo.items():
            gi, alpha = tags[idx]
            if isinstance(v, Fraction):
                v = ctx.num(v)
            cur = coeffs[gi].get(alpha)
            coeffs[gi][alpha] = v if cur is None else cur + v
        return [OreOperator(ctx, t) for t in coeffs]
    return None


# -- prolongation / projection dimensions ------------------------------


def pp_reduce(A: OpMatrix, r: int, s: int) -> list[int]:
    """[dim J_{q+r}] followed by dims of the projections of R_{q+r+sigma}
    down to order q+r, for sigma = 0..s."""
    ctx = A.ctx
    n = ctx.n
    q = int(A.order)
    ambient = A.m * jet_dim(n, q + r)
    out = [ambient]
    for sigma in range(0, s + 1):
        jm = JetMatrix(A, r + sigma)
        ech = jm.echelon()
        low_pivots = sum(
            1 for (j, mu), _ in ech.pivots if mu.order <= q + r
        )
        out.append(ambient - low_pivots)
    return out


# -- first-order reduction ---------------------------------------------


@dataclass
class SpencerSystem:
    """Equivalent first-order presentation on parametric jet unknowns."""

    matrix: OpMatrix
    unknowns: list[JetCoord]
    prolong_order: int
    closed: bool
    source: OpMatrix


def symbol_dims(A: OpMatrix, up_to: int) -> list[int]:
    """dim of the principal symbol solution space at orders q .. q+up_to."""
    ctx = A.ctx
    q = int(A.order)
    out = []
    for r in range(0, up_to + 1):
        jm = JetMatrix(A, r)
        ech = jm.echelon()
        top_pivots = sum(
            1 for (j, mu), _ in ech.pivots if mu.order == q + r
        )
        out.append(A.m * sym_dim(ctx.n, q + r) - top_pivots)
    return out


def spencerize(A: OpMatrix, max_order: int) -> SpencerSystem:
    """Rewrite an order-q system as a first-order system on its
    parametric jets.

    Prolong until the symbol dies (finite type: every derivative of an
    unknown is expressible, the reduction closes) or until its dimension
    repeats (the top parametric jets keep an unconstrained derivative,
    which is simply omitted). BoundExceeded if neither happens in range.
    """
    ctx = A.ctx
    n = ctx.n
    q = int(A.order)
    dims: list[int] = []
    rstar: Optional[int] = None
    closed = False
    for r in range(0, max_order + 1):
        jm = JetMatrix(A, r)
        ech = jm.echelon()
        top = sum(1 for (j, mu), _ in ech.pivots if mu.order == q + r)
        g = A.m * sym_dim(n, q + r) - top
        dims.append(g)
        if g == 0:
            rstar, closed = r, True
            break
        if len(dims) >= 2 and dims[-1] == dims[-2]:
            rstar, closed = r - 1, False
            break
    if rstar is None:
        raise BoundExceeded(f"symbol neither vanishes nor stabilizes by {max_order}")

    jm = JetMatrix(A, rstar)
    ech = jm.echelon()
    pivot_rows = {col: row for col, row in ech.pivots}
    top_order = q + rstar
    all_cols = jm.all_columns()
    parametric = [c for c in all_cols if c not in pivot_rows]
    parametric.sort(key=lambda c: (c[1].deglex_key(), c[0]))
    z_index = {c: k for k, c in enumerate(parametric)}

    def to_scalar(v) -> RatFunc:
        return ctx.num(v) if isinstance(v, Fraction) else v

    rows = []
    zero = OreOperator.zero(ctx)
    for i in range(n, 0, -1):
        for col in parametric:
            j, beta = col
            bumped = (j, beta.bump(i))
            if bumped[1].order > top_order:
                continue
            row = [zero] * len(parametric)
            row[z_index[col]] = OreOperator.d(ctx, i)
            if bumped in z_index:
                row[z_index[bumped]] = row[z_index[bumped]] - 1
            else:
                solved = pivot_rows[bumped]
                for c2, v in solved.items():
                    if c2 == bumped:
                        continue
                    row[z_index[c2]] = row[z_index[c2]] + to_scalar(v)
            rows.append(row)
    return SpencerSystem(
        matrix=OpMatrix(ctx, rows),
        unknowns=parametric,
        prolong_order=rstar,
        closed=closed,
        source=A,
    )


# -- symbol tableaux and delta cohomology ------------------------------


def symbol_of(A: OpMatrix) -> "SymbolTableau":
    """The principal symbol of a constant-coefficient matrix as a
    tableau: one linear equation per row, from the top-order terms."""
    q = int(A.order)
    eqs = []
    for row in A.rows:
        e = {}
        for j, op in enumerate(row):
            for mu, c in op.terms.items():
                if mu.order != q:
                    continue
                f = _as_fraction(c)
                if f is None:
                    raise ValueError("symbol tableau needs constant coefficients")
                e[(j, mu)] = f
        if e:
            eqs.append(e)
    return SymbolTableau(A.ctx.n, A.m, q, eqs)


class SymbolTableau:
    """A linear subspace g_q of S_q T* tensor R^m, by equations over Q.

    Coordinates are (k, mu) with k the unknown index and |mu| = q.
    Equations are dicts over those coordinates with Fraction values.
    """

    __slots__ = ("n", "m", "q", "equations", "_basis")

    def __init__(self, n: int, m: int, q: int, equations: Iterable[dict]):
        self.n = n
        self.m = m
        self.q = q
        eqs = []
        for e in equations:
            row = {}
            for (k, mu), v in e.items():
                mu = MultiIndex(mu)
                if mu.order != q:
                    raise ValueError(f"coordinate {mu} is not of order {q}")
                v = Fraction(v)
                if v:
                    row[(k, mu)] = v
            if row:
                eqs.append(row)
        self.equations = eqs
        self._basis = None

    def coords(self) -> list[JetCoord]:
        cs = [
            (k, mu)
            for mu in multi_indices_of_order(self.n, self.q)
            for k in range(self.m)
        ]
        return _sorted_cols(cs)

    def basis(self) -> list[dict]:
        if self._basis is None:
            self._basis = linalg.right_nullspace(
                self.equations, self.coords(), one=Fraction(1)
            )
        return self._basis

    @property
    def dim(self) -> int:
        return self.m * sym_dim(self.n, self.q) - linalg.rank_of(
            self.equations, self.coords()
        )

    def prolong(self) -> "SymbolTableau":
        shifted = []
        for i in range(1, self.n + 1):
            for e in self.equations:
                shifted.append(
                    {(k, mu.bump(i)): v for (k, mu), v in e.items()}
                )
        return SymbolTableau(self.n, self.m, self.q + 1, shifted)

    def __repr__(self) -> str:
        return f"<SymbolTableau g_{self.q}: dim {self.dim} in S_{self.q}^{self.m}>"


def _subsets(n: int, r: int):
    return itertools.combinations(range(1, n + 1), r)


def delta_apply(vec: dict, n: int) -> dict:
    """One Spencer differential step on a coordinate vector.

    Input coordinates (k, mu, J) with J a strictly increasing tuple;
    output lives one form-degree up and one symmetric degree down:
    (delta v)^k_{mu, J'} = sum_t (-1)^t v^k_{mu + 1_{j_t}, J' minus j_t}.
    """
    out: dict = {}
    for (k, mu, J), val in vec.items():
        if mu.order == 0:
            continue
        for i in range(1, n + 1):
            if i in J or mu[i - 1] == 0:
                continue
            J2 = tuple(sorted(J + (i,)))
            t = J2.index(i)
            sign = -1 if t % 2 else 1
            key = (k, mu.lower(i), J2)
            cur = out.get(key)
            nv = sign * val if cur is None else cur + sign * val
            if nv:
                out[key] = nv
            elif cur is not None:
                del out[key]
    return out


def _delta_of_basis_vec(b: dict, J: tuple, n: int) -> dict:
    """delta of (e_J tensor b) for b in g_q with coordinates (k, mu)."""
    return delta_apply({(k, mu, J): v for (k, mu), v in b.items()}, n)


@dataclass
class DeltaMap:
    """The Spencer differential Lambda^r tensor g_q -> Lambda^{r+1}
    tensor g_{q-1}, as explicit image rows."""

    domain_dim: int
    rank: int
    rows: list = dc_field(default_factory=list)

    @property
    def kernel_dim(self) -> int:
        return self.domain_dim - self.rank


def delta_map(g: SymbolTableau, r: int) -> DeltaMap:
    if r < 0:
        return DeltaMap(domain_dim=0, rank=0, rows=[])
    n = g.n
    basis = g.basis()
    rows = []
    for J in _subsets(n, r):
        for b in basis:
            rows.append(_delta_of_basis_vec(b, J, n))
    cols = sorted(
        {c for row in rows for c in row},
        key=lambda c: (c[1].deglex_key(), c[0], c[2]),
        reverse=True,
    )
    rank = linalg.rank_of(rows, cols) if rows else 0
    return DeltaMap(domain_dim=len(rows), rank=rank, rows=rows)


def delta_cohomology_dims(g: SymbolTableau, r: int) -> dict:
    """dim of cocycles, coboundaries and H^{q,r} at Lambda^r tensor g_q.

    Coboundaries come from the canonical prolongation g_{q+1}."""
    out_map = delta_map(g, r)
    z = out_map.kernel_dim
    if r == 0:
        b = 0
    else:
        in_map = delta_map(g.prolong(), r - 1)
        b = in_map.rank
    return {"cocycles": z, "coboundaries": b, "dim": z - b}
