"""The operator zoo: constant-coefficient systems from elasticity,
relativity and control, plus the metric bookkeeping they share.

Symmetric 2-tensors are stored as flat vectors over the index pairs
(i <= j) in lexicographic order, e.g. (11) < (12) < (13) < (22) < (23)
< (33) for n = 3.  A component that appears twice in a full-matrix
summation (an off-diagonal one) carries weight 2; `sym2_weights` hands
out those factors and the weighted-adjoint helpers in `duality` consume
them.  Metrics are constant diagonal +-1, which is all the fixtures
need; curvature operators are linearized at that flat metric.

Every builder returns a plain OpMatrix over `FieldContext.std(n)` (or a
parametric context where the fixture has parameters), so the results
compose freely with the rest of the package.  `demo(name)` resolves the
stable string ids used by the command line `demo` subcommand and
`demo_names()` lists them.

Index pairs below are 0-based internally; the 1-based `OreOperator.d`
and `ctx.x` calls convert at the call site.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .field import FieldContext, jet_dim, sym_dim
from .ore import DimensionMismatch, OpMatrix, OreOperator, adjoint_matrix


# -- metrics and symmetric-pair bookkeeping ----------------------------


@dataclass(frozen=True)
class Metric:
    """A constant diagonal metric with entries +1 or -1."""

    diag: Tuple[int, ...]

    def __post_init__(self):
        if not self.diag or any(s not in (1, -1) for s in self.diag):
            raise ValueError("metric diagonal must be nonempty +-1 entries")

    @property
    def n(self) -> int:
        return len(self.diag)

    @classmethod
    def euclidean(cls, n: int) -> "Metric":
        return cls(tuple([1] * n))

    @classmethod
    def minkowski(cls, n: int) -> "Metric":
        """Spacelike signature with the last coordinate as time."""
        if n < 2:
            raise ValueError("minkowski metric needs n >= 2")
        return cls(tuple([1] * (n - 1) + [-1]))

    def omega(self, i: int) -> int:
        """Diagonal entry, 0-based."""
        return self.diag[i]

    def inv(self, i: int) -> int:
        # +-1 diagonal is its own inverse
        return self.diag[i]


def _as_metric(metric) -> Metric:
    if isinstance(metric, Metric):
        return metric
    if isinstance(metric, int):
        return Metric.euclidean(metric)
    raise TypeError("expected a Metric or a dimension")


def sym2_indices(n: int) -> List[Tuple[int, int]]:
    """Index pairs (i <= j), 0-based, in storage order."""
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym2_weights(n: int) -> List[int]:
    """Multiplicity of each stored pair inside a full-matrix sum."""
    return [1 if i == j else 2 for (i, j) in sym2_indices(n)]


_CTX_CACHE: Dict[int, FieldContext] = {}


def _ctx(n: int) -> FieldContext:
    if n not in _CTX_CACHE:
        _CTX_CACHE[n] = FieldContext.std(n)
    return _CTX_CACHE[n]


def _pair_slot(n: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return sym2_indices(n).index((i, j))


def _d0(ctx: FieldContext, *indices0: int) -> OreOperator:
    """Derivative monomial from 0-based repeated indices."""
    return OreOperator.d(ctx, *[i + 1 for i in indices0])


# -- first order geometry: Killing and conformal Killing ---------------


def killing(metric) -> OpMatrix:
    """Metric variation along a vector field, one row per pair (i <= j).

    Row (ij) sends xi to omega_jj d_i xi^j + omega_ii d_j xi^i, so the
    diagonal rows come out as 2 omega_ii d_i xi^i.
    """
    g = _as_metric(metric)
    n = g.n
    ctx = _ctx(n)
    rows = []
    for (i, j) in sym2_indices(n):
        row = [OreOperator.zero(ctx) for _ in range(n)]
        row[j] = row[j] + g.omega(j) * _d0(ctx, i)
        row[i] = row[i] + g.omega(i) * _d0(ctx, j)
        rows.append(row)
    return OpMatrix(ctx, rows)


def conformal_killing(metric) -> OpMatrix:
    """Trace-free part of the Killing rows.

    Each diagonal row loses (2/n) omega_ii sum_k d_k xi^k; for n = 1
    this cancels the single row entirely and the matrix is zero.
    """
    g = _as_metric(metric)
    n = g.n
    ctx = _ctx(n)
    base = killing(g)
    frac = Fraction(2, n)
    rows = []
    for idx, (i, j) in enumerate(sym2_indices(n)):
        row = list(base.rows[idx])
        if i == j:
            for k in range(n):
                row[k] = row[k] - (frac * g.omega(i)) * _d0(ctx, k)
        rows.append(row)
    return OpMatrix(ctx, rows)


# -- divergence shaped operators ---------------------------------------


def cauchy(metric) -> OpMatrix:
    """Divergence of a contravariant symmetric 2-tensor: row i is
    sum_r d_r sigma^{ri} with the stored pair hit once per occurrence."""
    g = _as_metric(metric)
    n = g.n
    ctx = _ctx(n)
    pairs = sym2_indices(n)
    rows = []
    for i in range(n):
        row = [OreOperator.zero(ctx) for _ in pairs]
        for s, (u, v) in enumerate(pairs):
            if u == v == i:
                row[s] = _d0(ctx, i)
            elif u == i:
                row[s] = _d0(ctx, v)
            elif v == i:
                row[s] = _d0(ctx, u)
        rows.append(row)
    return OpMatrix(ctx, rows)


def div_op(metric) -> OpMatrix:
    """Raised divergence acting on weighted covariant components.

    Row s recovers sum_r omega^rr d_r T_rs when the input vector stores
    w_uv T_uv, hence the 1/2 on off-diagonal columns.  Composed with
    `einstein_lin` it vanishes identically.
    """
    g = _as_metric(metric)
    n = g.n
    ctx = _ctx(n)
    pairs = sym2_indices(n)
    half = Fraction(1, 2)
    rows = []
    for s in range(n):
        row = [OreOperator.zero(ctx) for _ in pairs]
        for slot, (u, v) in enumerate(pairs):
            if u == v == s:
                row[slot] = g.inv(s) * _d0(ctx, s)
            elif u == s:
                row[slot] = (half * g.inv(v)) * _d0(ctx, v)
            elif v == s:
                row[slot] = (half * g.inv(u)) * _d0(ctx, u)
        rows.append(row)
    return OpMatrix(ctx, rows)


# -- second order curvature operators ----------------------------------

_RIEMANN_CACHE: Dict[Tuple[int, ...], OpMatrix] = {}


def riemann_lin(metric, max_order: Optional[int] = None) -> OpMatrix:
    """Generating relations of the Killing rows (linearized curvature).

    Computed once per metric as the certified relation module of
    `killing` and cached; n = 2 gives the single row
    (d_22, -2 d_12, d_11).
    """
    from .janet import cc

    g = _as_metric(metric)
    key = g.diag
    if key not in _RIEMANN_CACHE:
        res = cc(killing(g), max_order=2 if max_order is None else max_order)
        if res.cc is None or not res.certified_complete:
            raise RuntimeError("relation search for killing did not certify")
        _RIEMANN_CACHE[key] = res.cc
    return _RIEMANN_CACHE[key]


def ricci_lin(metric) -> OpMatrix:
    """Contracted linearized curvature with S2 row weights included.

    Row (ij) carries w_ij * 2R_ij where
    2R_ij = sum_r omega^rr (d_rr O_ij + d_ij O_rr - d_ri O_rj - d_rj O_ri)
    and the columns hold the stored metric perturbation entries.
    """
    g = _as_metric(metric)
    n = g.n
    ctx = _ctx(n)
    pairs = sym2_indices(n)
    weights = sym2_weights(n)
    rows = []
    for idx, (i, j) in enumerate(pairs):
        acc: Dict[int, OreOperator] = {}

        def add(u, v, coeff, *der0):
            slot = _pair_slot(n, u, v)
            term = coeff * _d0(ctx, *der0)
            acc[slot] = acc.get(slot, OreOperator.zero(ctx)) + term

        w = Fraction(weights[idx])
        for r in range(n):
            s = Fraction(g.inv(r)) * w
            add(i, j, s, r, r)
            add(r, r, s, i, j)
            add(r, j, -s, r, i)
            add(r, i, -s, r, j)
        row = [acc.get(slot, OreOperator.zero(ctx)) for slot in range(len(pairs))]
        rows.append(row)
    return OpMatrix(ctx, rows)


def ricci_trace(metric) -> List[OreOperator]:
    """The row computing 2 tr(R): omega^kk contraction of the diagonal
    ricci rows (their weights are all 1)."""
    g = _as_metric(metric)
    n = g.n
    ctx = _ctx(n)
    ric = ricci_lin(g)
    pairs = sym2_indices(n)
    out = [OreOperator.zero(ctx) for _ in pairs]
    for k in range(n):
        slot = _pair_slot(n, k, k)
        coeff = Fraction(g.inv(k))
        for c in range(len(pairs)):
            out[c] = out[c] + coeff * ric.rows[slot][c]
    return out


def einstein_lin(metric) -> OpMatrix:
    """Trace-reverted ricci rows: row (ij) is
    ricci_row(ij) - (1/2) w_ij omega_ij * trace_row.

    Identically zero for n = 2 and plainly self-adjoint for every n
    because the weighted rows form a symmetric matrix.
    """
    g = _as_metric(metric)
    n = g.n
    ric = ricci_lin(g)
    tr = ricci_trace(g)
    pairs = sym2_indices(n)
    weights = sym2_weights(n)
    half = Fraction(1, 2)
    rows = []
    for idx, (i, j) in enumerate(pairs):
        row = list(ric.rows[idx])
        if i == j:
            coeff = half * Fraction(weights[idx]) * Fraction(g.omega(i))
            row = [row[c] - coeff * tr[c] for c in range(len(pairs))]
        rows.append(row)
    return OpMatrix(ric.ctx, rows)


def ricci_adjoint_formula(metric) -> OpMatrix:
    """The wave-operator form of the dual ricci map on test tensors:
    row (rs) is box lam^rs + omega^rs d_ij lam^ij
    - omega^sj d_ij lam^ri - omega^ri d_ij lam^sj
    with full-matrix summation over i, j."""
    g = _as_metric(metric)
    n = g.n
    ctx = _ctx(n)
    pairs = sym2_indices(n)
    rows = []
    for (r, s) in pairs:
        acc: Dict[int, OreOperator] = {}

        def add(u, v, coeff, *der0):
            if coeff == 0:
                return
            slot = _pair_slot(n, u, v)
            term = Fraction(coeff) * _d0(ctx, *der0)
            acc[slot] = acc.get(slot, OreOperator.zero(ctx)) + term

        # box on the (rs) column
        for k in range(n):
            add(r, s, g.inv(k), k, k)
        # omega^rs d_ij lam^ij, diagonal metric so only r == s contributes
        if r == s:
            for (u, v) in sym2_indices(n):
                add(u, v, g.inv(r) * (1 if u == v else 2), u, v)
        # -omega^sj d_ij lam^ri with j = s, minus the mirrored term
        for i in range(n):
            add(r, i, -g.inv(s), i, s)
            add(s, i, -g.inv(r), i, r)
        row = [acc.get(slot, OreOperator.zero(ctx)) for slot in range(len(pairs))]
        rows.append(row)
    return OpMatrix(ctx, rows)


# -- frozen elasticity matrices (n = 2 and n = 3) ----------------------


def airy() -> OpMatrix:
    """Second order stress-function column for n = 2."""
    ctx = _ctx(2)
    d = lambda *ix: OreOperator.d(ctx, *ix)
    return OpMatrix(ctx, [[d(2, 2)], [-1 * d(1, 2)], [d(1, 1)]])


def beltrami() -> OpMatrix:
    """Second order stress-function square for n = 3, rows ordered like
    the stored stress pairs."""
    ctx = _ctx(3)
    d = lambda *ix: OreOperator.d(ctx, *ix)
    z = OreOperator.zero(ctx)
    return OpMatrix(
        ctx,
        [
            [z, z, z, d(3, 3), -2 * d(2, 3), d(2, 2)],
            [z, -1 * d(3, 3), d(2, 3), z, d(1, 3), -1 * d(1, 2)],
            [z, d(2, 3), -1 * d(2, 2), -1 * d(1, 3), d(1, 2), z],
            [d(3, 3), z, -2 * d(1, 3), z, z, d(1, 1)],
            [-1 * d(2, 3), d(1, 3), d(1, 2), z, -1 * d(1, 1), z],
            [d(2, 2), -2 * d(1, 2), z, d(1, 1), z, z],
        ],
    )


def _column_subset(A: OpMatrix, cols: Sequence[int]) -> OpMatrix:
    return OpMatrix(A.ctx, [[row[c] for c in cols] for row in A.rows])


def maxwell_potentials() -> OpMatrix:
    """Beltrami columns restricted to the three diagonal potentials."""
    return _column_subset(beltrami(), [0, 3, 5])


def morera_potentials() -> OpMatrix:
    """Beltrami columns restricted to the three off-diagonal potentials."""
    return _column_subset(beltrami(), [1, 2, 4])


# -- plane couple-stress fixtures --------------------------------------


def cosserat_motion() -> OpMatrix:
    """First order system on (xi_1, xi_2, xi_12): the deformation rows
    A_11, A_12, A_21, A_22 followed by the two gradient rows of xi_12."""
    ctx = _ctx(2)
    d = lambda *ix: OreOperator.d(ctx, *ix)
    z = OreOperator.zero(ctx)
    one = OreOperator.from_scalar(ctx.one)
    return OpMatrix(
        ctx,
        [
            [d(1), z, z],
            [z, d(1), -1 * one],
            [d(2), z, one],
            [z, d(2), z],
            [z, z, d(1)],
            [z, z, d(2)],
        ],
    )


def cosserat_cc() -> OpMatrix:
    """The three relations among the cosserat_motion rows."""
    ctx = _ctx(2)
    d = lambda *ix: OreOperator.d(ctx, *ix)
    z = OreOperator.zero(ctx)
    one = OreOperator.from_scalar(ctx.one)
    return OpMatrix(
        ctx,
        [
            [d(2), z, -1 * d(1), z, one, z],
            [z, d(2), z, -1 * d(1), z, one],
            [z, z, z, z, d(2), -1 * d(1)],
        ],
    )


def cosserat_potentials() -> OpMatrix:
    """First order three-potential parametrization of the plane
    couple-stress equilibrium: the adjoint of `cosserat_cc`."""
    return adjoint_matrix(cosserat_cc())


# -- control fixtures --------------------------------------------------


def kalman(A: Sequence[Sequence], B: Sequence[Sequence]) -> OpMatrix:
    """First order state-space rows d y - A y - B u over columns (y, u)."""
    k = len(A)
    if k == 0 or any(len(r) != k for r in A):
        raise DimensionMismatch("state matrix must be square")
    r = len(B[0]) if B else 0
    if len(B) != k or any(len(row) != r for row in B):
        raise DimensionMismatch("input matrix must have one row per state")
    ctx = _ctx(1)
    d = OreOperator.d(ctx, 1)
    rows = []
    for i in range(k):
        row = []
        for j in range(k):
            ent = d if i == j else OreOperator.zero(ctx)
            row.append(ent - ctx.num(Fraction(A[i][j])))
        for u in range(r):
            row.append(OreOperator.zero(ctx) - ctx.num(Fraction(B[i][u])))
        rows.append(row)
    return OpMatrix(ctx, rows)


def controllability_rank(A: Sequence[Sequence], B: Sequence[Sequence]) -> int:
    """Rank over Q of (B, AB, ..., A^{k-1} B), computed with Fractions."""
    k = len(A)
    r = len(B[0]) if B else 0
    Af = [[Fraction(x) for x in row] for row in A]
    block = [[Fraction(x) for x in row] for row in B]
    cols: List[List[Fraction]] = [[block[i][u] for i in range(k)] for u in range(r)]
    cur = block
    for _ in range(k - 1):
        cur = [
            [sum(Af[i][t] * cur[t][u] for t in range(k)) for u in range(r)]
            for i in range(k)
        ]
        cols.extend([cur[i][u] for i in range(k)] for u in range(r))
    # plain Gaussian elimination on the column list
    rank = 0
    work = [list(c) for c in cols]
    for pos in range(k):
        piv = next((c for c in work if c[pos] != 0), None)
        if piv is None:
            continue
        work.remove(piv)
        rank += 1
        for c in work:
            if c[pos] != 0:
                f = c[pos] / piv[pos]
                for t in range(k):
                    c[t] -= f * piv[t]
    return rank


def double_pendulum(equal_lengths: bool = False):
    """The horizontally driven two-pendulum rows over (x, th1, th2).

    Returns (ctx, matrix).  With `equal_lengths` the two length
    parameters collapse to a single one and the system acquires the
    autonomous difference of angles.
    """
    if equal_lengths:
        ctx = FieldContext.std(1, params=("g", "l"))
        l1 = l2 = ctx.var("l")
    else:
        ctx = FieldContext.std(1, params=("g", "l1", "l2"))
        l1, l2 = ctx.var("l1"), ctx.var("l2")
    g = ctx.var("g")
    d2 = OreOperator.d(ctx, 1, 1)
    z = OreOperator.zero(ctx)
    rows = [
        [d2, l1 * d2 + g, z],
        [d2, z, l2 * d2 + g],
    ]
    return ctx, OpMatrix(ctx, rows)


def mixed_pair():
    """Two first order rows on three unknowns with a constant parameter:
    (d eta1 - a eta2 - d eta3, eta1 - d eta2 + d eta3)."""
    ctx = FieldContext.std(1, params=("a",))
    a = ctx.var("a")
    d = OreOperator.d(ctx, 1)
    one = OreOperator.from_scalar(ctx.one)
    rows = [
        [d, -1 * OreOperator.from_scalar(a), -1 * d],
        [one, -1 * d, d],
    ]
    return ctx, OpMatrix(ctx, rows)


def gradient_triple():
    """Three rows on (y1, y2, y3) over two variables with parameter a:
    the difference y3 - y2 is annihilated by both derivatives."""
    ctx = FieldContext.std(2, params=("a",))
    a = ctx.var("a")
    x2 = ctx.x(2)
    d1 = OreOperator.d(ctx, 1)
    d2 = OreOperator.d(ctx, 2)
    z = OreOperator.zero(ctx)
    rows = [
        [z, -1 * d2, d2],
        [d1 - a * x2, d2, z],
        [z, -1 * d1, d1],
    ]
    return ctx, OpMatrix(ctx, rows)


def gradient_pair(a_value: Optional[int] = None):
    """The reduced single row (d1 - a x2, d2) on (y1, y2); `a_value`
    substitutes the parameter for the two contrasting cases."""
    if a_value is None:
        ctx = FieldContext.std(2, params=("a",))
        a = ctx.var("a")
    else:
        ctx = _ctx(2)
        a = ctx.num(a_value)
    x2 = ctx.x(2)
    d1 = OreOperator.d(ctx, 1)
    d2 = OreOperator.d(ctx, 2)
    return ctx, OpMatrix(ctx, [[d1 - a * x2, d2]])


# -- two-jet pair fixtures ---------------------------------------------


def two_jets_system() -> OpMatrix:
    """The column (d_22; d_12 - 1) acting on a single unknown."""
    ctx = _ctx(2)
    d = lambda *ix: OreOperator.d(ctx, *ix)
    one = OreOperator.from_scalar(ctx.one)
    return OpMatrix(ctx, [[d(2, 2)], [d(1, 2) - one]])


def two_jets_pair() -> OpMatrix:
    """Fourth order presentation on (u, v): rows A and B."""
    ctx = _ctx(2)
    d = lambda *ix: OreOperator.d(ctx, *ix)
    one = OreOperator.from_scalar(ctx.one)
    A = [d(1, 1, 2, 2) - one, -1 * d(1, 2, 2, 2) - d(2, 2)]
    B = [d(1, 1, 1, 2) - d(1, 1), -1 * d(1, 1, 2, 2)]
    return OpMatrix(ctx, [A, B])


def two_jets_single() -> OpMatrix:
    """Second order presentation on (u, v): the single row C."""
    ctx = _ctx(2)
    d = lambda *ix: OreOperator.d(ctx, *ix)
    one = OreOperator.from_scalar(ctx.one)
    return OpMatrix(ctx, [[d(1, 2) - one, -1 * d(2, 2)]])


# -- small classical systems -------------------------------------------


def macaulay_system() -> OpMatrix:
    """The second order column (d_33; d_23 - d_11; d_22) on one unknown."""
    ctx = _ctx(3)
    d = lambda *ix: OreOperator.d(ctx, *ix)
    return OpMatrix(ctx, [[d(3, 3)], [d(2, 3) - d(1, 1)], [d(2, 2)]])


def div3() -> OpMatrix:
    """The divergence row (d_1, d_2, d_3)."""
    ctx = _ctx(3)
    return OpMatrix(ctx, [[OreOperator.d(ctx, i) for i in (1, 2, 3)]])


def third_order_flat() -> OpMatrix:
    """The single row d^3 on one unknown of one variable."""
    ctx = _ctx(1)
    return OpMatrix(ctx, [[OreOperator.d(ctx, 1, 1, 1)]])


# -- dimension formulas ------------------------------------------------


def dims(n: int, m: int, q: int) -> Dict[str, int]:
    """Fiber dimensions of the order-q symbol and jet spaces for m
    unknowns in n variables."""
    return {"sym": m * sym_dim(n, q), "jet": m * jet_dim(n, q)}


def euler_characteristic(fibers: Sequence[int]) -> int:
    return sum((-1) ** i * int(f) for i, f in enumerate(fibers))


def killing_resolution_fibers(n: int) -> Tuple[int, int, int, int]:
    """Fiber dimensions along the length-three resolution of the
    Killing rows: unknowns, equations, curvature, curvature relations."""
    return (
        n,
        n * (n + 1) // 2,
        n * n * (n * n - 1) // 12,
        n * n * (n * n - 1) * (n - 2) // 24,
    )


def conformal_curvature_dim(n: int) -> int:
    """Components of the trace-free curvature obstruction for n >= 4,
    with the n = 3 count (third order, not second) as a special case."""
    if n == 3:
        return 5
    if n >= 4:
        return n * (n + 1) * (n + 2) * (n - 3) // 12
    return 0


def conformal_sequence(n: int) -> Dict[str, Tuple[int, ...]]:
    """Fibers and operator orders of the minimal conformal sequences
    for the two fully worked dimensions."""
    if n == 3:
        return {"fibers": (3, 5, 5, 3), "orders": (1, 3, 1)}
    if n == 4:
        return {"fibers": (4, 9, 10, 9, 4), "orders": (1, 2, 2, 1)}
    raise ValueError("minimal conformal sequence recorded for n in {3, 4}")


def conformal_generators(n: int) -> List[List]:
    """Polynomial vector fields annihilated by `conformal_killing` for
    the euclidean metric: translations, rotations, the dilatation and
    the elations."""
    return conformal_generators_for(Metric.euclidean(n))


def conformal_generators_for(metric: Metric) -> List[List]:
    """Same list for an arbitrary diagonal metric: n translations,
    n(n-1)/2 rotations x_i d_j - x_j d_i, one dilatation and n elations
    e_s^r = -1/2 x.x delta_s^r + omega_st x^t x^r."""
    g = metric
    n = g.n
    ctx = _ctx(n)
    zero = ctx.zero
    gens: List[List] = []
    xs = [ctx.x(i + 1) for i in range(n)]
    for i in range(n):
        gens.append([ctx.one if k == i else zero for k in range(n)])
    for i in range(n):
        for j in range(i + 1, n):
            vec = [zero] * n
            vec[j] = g.omega(i) * xs[i]
            vec[i] = zero - g.omega(j) * xs[j]
            gens.append(vec)
    gens.append(list(xs))
    xsq = zero
    for i in range(n):
        xsq = xsq + g.omega(i) * xs[i] * xs[i]
    half = Fraction(1, 2)
    for s in range(n):
        vec = []
        for r in range(n):
            comp = g.omega(s) * xs[s] * xs[r]
            if r == s:
                comp = comp - half * xsq
            vec.append(comp)
        gens.append(vec)
    return gens


# -- fixture registry --------------------------------------------------


@dataclass
class NamedOperator:
    """A registry entry: the matrix plus its symmetric-index weights
    (None for plain column spaces) and a short description."""

    name: str
    ctx: FieldContext
    matrix: OpMatrix
    description: str
    row_weights: Optional[List[int]] = None
    col_weights: Optional[List[int]] = None


def _named(name, matrix, description, row_weights=None, col_weights=None, ctx=None):
    return NamedOperator(
        name=name,
        ctx=ctx if ctx is not None else matrix.ctx,
        matrix=matrix,
        description=description,
        row_weights=row_weights,
        col_weights=col_weights,
    )


def _demo_state_space() -> NamedOperator:
    A = [[0, 1], [0, 0]]
    B = [[0], [1]]
    return _named(
        "state_space",
        kalman(A, B),
        "two-state single-input chain of integrators",
    )


def _demo_uncontrollable() -> NamedOperator:
    A = [[1, 0], [0, 2]]
    B = [[1], [0]]
    return _named(
        "state_space_uncontrollable",
        kalman(A, B),
        "decoupled state never reached by the input",
    )


_REGISTRY_BUILDERS: Dict[str, Callable[[], NamedOperator]] = {}


def _register(name: str, builder: Callable[[], NamedOperator]):
    _REGISTRY_BUILDERS[name] = builder


def _init_registry():
    W3 = sym2_weights(3)
    W4 = sym2_weights(4)
    _register("state_space", _demo_state_space)
    _register("state_space_uncontrollable", _demo_uncontrollable)
    _register(
        "double_pendulum",
        lambda: _named(
            "double_pendulum",
            double_pendulum()[1],
            "bar with two pendulums of distinct symbolic lengths",
        ),
    )
    _register(
        "double_pendulum_equal",
        lambda: _named(
            "double_pendulum_equal",
            double_pendulum(equal_lengths=True)[1],
            "equal lengths: the angle difference is autonomous",
        ),
    )
    _register(
        "mixed_pair",
        lambda: _named(
            "mixed_pair",
            mixed_pair()[1],
            "two first order rows on three unknowns with parameter a",
        ),
    )
    _register(
        "gradient_triple",
        lambda: _named(
            "gradient_triple",
            gradient_triple()[1],
            "three rows with one torsion generator y3 - y2",
        ),
    )
    _register(
        "gradient_pair",
        lambda: _named(
            "gradient_pair",
            gradient_pair()[1],
            "single row (d1 - a x2, d2) with parameter a",
        ),
    )
    _register(
        "two_jets_source",
        lambda: _named(
            "two_jets_source",
            two_jets_system(),
            "the column (d_22; d_12 - 1) whose CC module the pair presents",
        ),
    )
    _register(
        "two_jets_pair",
        lambda: _named(
            "two_jets_pair",
            two_jets_pair(),
            "fourth order presentation (A, B) on (u, v)",
        ),
    )
    _register(
        "two_jets_single",
        lambda: _named(
            "two_jets_single",
            two_jets_single(),
            "second order presentation (C) of the same module",
        ),
    )
    _register(
        "macaulay",
        lambda: _named(
            "macaulay",
            macaulay_system(),
            "three second order rows with an eight dimensional solution space",
        ),
    )
    _register(
        "div3",
        lambda: _named("div3", div3(), "divergence row in three variables"),
    )
    _register(
        "third_order_flat",
        lambda: _named(
            "third_order_flat",
            third_order_flat(),
            "d^3 on one unknown of one variable",
        ),
    )
    _register(
        "cosserat_motion",
        lambda: _named(
            "cosserat_motion",
            cosserat_motion(),
            "plane couple-stress motion rows",
        ),
    )
    _register(
        "cosserat_cc",
        lambda: _named(
            "cosserat_cc",
            cosserat_cc(),
            "relations of the plane couple-stress motion rows",
        ),
    )
    for nn in (2, 3):
        _register(
            "killing%d" % nn,
            lambda nn=nn: _named(
                "killing%d" % nn,
                killing(nn),
                "metric variation rows, n = %d" % nn,
                row_weights=sym2_weights(nn),
            ),
        )
        _register(
            "conformal%d" % nn,
            lambda nn=nn: _named(
                "conformal%d" % nn,
                conformal_killing(nn),
                "trace-free metric variation rows, n = %d" % nn,
                row_weights=sym2_weights(nn),
            ),
        )
        _register(
            "cauchy%d" % nn,
            lambda nn=nn: _named(
                "cauchy%d" % nn,
                cauchy(nn),
                "stress divergence rows, n = %d" % nn,
                col_weights=sym2_weights(nn),
            ),
        )
        _register(
            "riemann%d" % nn,
            lambda nn=nn: _named(
                "riemann%d" % nn,
                riemann_lin(nn),
                "curvature rows generated from killing%d" % nn,
                col_weights=sym2_weights(nn),
            ),
        )
    _register("airy", lambda: _named("airy", airy(), "plane stress-function column"))
    _register(
        "beltrami",
        lambda: _named("beltrami", beltrami(), "stress-function square for n = 3"),
    )
    _register(
        "maxwell",
        lambda: _named(
            "maxwell",
            maxwell_potentials(),
            "diagonal three-potential restriction of beltrami",
        ),
    )
    _register(
        "morera",
        lambda: _named(
            "morera",
            morera_potentials(),
            "off-diagonal three-potential restriction of beltrami",
        ),
    )
    _register(
        "einstein3",
        lambda: _named(
            "einstein3",
            einstein_lin(3),
            "trace-reverted curvature contraction, n = 3",
            row_weights=W3,
            col_weights=W3,
        ),
    )
    _register(
        "ricci4",
        lambda: _named(
            "ricci4",
            ricci_lin(Metric.minkowski(4)),
            "curvature contraction over the minkowski metric",
            row_weights=W4,
            col_weights=W4,
        ),
    )
    _register(
        "einstein4",
        lambda: _named(
            "einstein4",
            einstein_lin(Metric.minkowski(4)),
            "trace-reverted curvature contraction over minkowski",
            row_weights=W4,
            col_weights=W4,
        ),
    )


_init_registry()


def demo_names() -> List[str]:
    return sorted(_REGISTRY_BUILDERS)


def demo(name: str) -> NamedOperator:
    try:
        builder = _REGISTRY_BUILDERS[name]
    except KeyError:
        raise KeyError(
            "unknown fixture %r; available: %s" % (name, ", ".join(demo_names()))
        )
    return builder()
