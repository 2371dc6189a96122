"""Exact sparse linear algebra over an arbitrary field of scalars.

Rows are dicts mapping column key to a nonzero scalar. Scalars only need
field arithmetic (+, -, *, /), truthiness as a zero test and equality, so
the same code runs over RatFunc coefficients and over plain Fractions
(the fast path for constant-coefficient operator matrices).

Elimination is deterministic: columns are processed in the priority order
the caller supplies, and among candidate pivot rows the one with the
cheapest entry wins (lowest total degree for rational functions, then
lowest original row index).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

Row = dict


def _default_complexity(s) -> int:
    fe = getattr(s, "fe", None)
    if fe is None:
        return 0
    return sum(sum(m) for m, _ in fe.numer.terms()) + sum(
        sum(m) for m, _ in fe.denom.terms()
    )


class Echelon:
    """Result of a row reduction.

    pivots      list of (column, row) in elimination order; each row is
                fully reduced (entry 1 in its pivot column, zero in every
                other pivot column).
    combos      for every pivot row, its expression in the input rows
                (dict input-index -> scalar); only filled when tracking.
    null_combos left-nullspace basis: combinations of the input rows that
                vanish identically (dict input-index -> scalar).
    """

    __slots__ = ("pivots", "combos", "null_combos")

    def __init__(self, pivots, combos, null_combos):
        self.pivots = pivots
        self.combos = combos
        self.null_combos = null_combos

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_columns(self):
        return [c for c, _ in self.pivots]


def row_reduce(
    rows: Sequence[Row],
    col_order: Sequence[Hashable],
    one=Fraction(1),
    track: bool = False,
    complexity: Callable = _default_complexity,
) -> Echelon:
    """Reduce rows to a canonical echelon form.

    col_order lists every column that may carry a pivot, highest priority
    first. Columns absent from col_order never become pivots (their
    entries just ride along), which is how projection dimensions are read
    off jet matrices.
    """
    work = [dict(r) for r in rows]
    trace: list[Row] = [{i: one} for i in range(len(work))] if track else []
    live = set(range(len(work)))

    occupants: dict[Hashable, set[int]] = {}
    for i in live:
        for c in work[i]:
            occupants.setdefault(c, set()).add(i)

    def axpy(dst: Row, factor, src: Row, idx: int | None):
        for c, v in src.items():
            cur = dst.get(c)
            nv = v * factor if cur is None else cur + v * factor
            if nv:
                if cur is None and idx is not None:
                    occupants.setdefault(c, set()).add(idx)
                dst[c] = nv
            elif cur is not None:
                del dst[c]
                if idx is not None:
                    occupants.get(c, set()).discard(idx)

    pivots: list[tuple[Hashable, int]] = []
    for col in col_order:
        cand = [i for i in occupants.get(col, ()) if i in live]
        if not cand:
            continue
        piv = min(cand, key=lambda i: (complexity(work[i][col]), i))
        live.discard(piv)
        inv = one / work[piv][col]
        for c in list(work[piv]):
            work[piv][c] = work[piv][c] * inv
        if track:
            trace[piv] = {k: v * inv for k, v in trace[piv].items()}
        prow = work[piv]
        for i in list(occupants.get(col, ())):
            if i == piv:
                continue
            f = -work[i][col]
            axpy(work[i], f, prow, i)
            if track:
                axpy(trace[i], f, trace[piv], None)
        pivots.append((col, piv))

    pivot_list = [(c, work[i]) for c, i in pivots]
    combos = [trace[i] for _, i in pivots] if track else []
    nulls = []
    if track:
        for i in sorted(live):
            if not work[i]:
                nulls.append(trace[i])
    return Echelon(pivot_list, combos, nulls)


def rank_of(rows: Sequence[Row], col_order: Sequence[Hashable], one=Fraction(1)) -> int:
    return row_reduce(rows, col_order, one=one).rank


def left_nullspace(
    rows: Sequence[Row], col_order: Sequence[Hashable], one=Fraction(1)
) -> list[Row]:
    """Basis of {c : sum_i c_i row_i = 0} as dicts over row indices."""
    ech = row_reduce(rows, col_order, one=one, track=True)
    return ech.null_combos


class IncrementalEchelon:
    """Rank-only echelon that accepts rows in batches.

    Columns may keep appearing as later batches bring higher-order jets;
    each row is reduced against the pivots seen so far and then becomes a
    pivot at its best remaining column. Priority between columns is given
    by the key function (highest key pivots first), so earlier pivots stay
    valid when new columns arrive with higher keys than anything they
    contain.
    """

    __slots__ = ("key", "one", "pivots")

    def __init__(self, key: Callable, one=Fraction(1)):
        self.key = key
        self.one = one
        self.pivots: dict = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add_row(self, row: Row) -> bool:
        """Reduce one row; True if it contributed a new pivot."""
        work = dict(row)
        while work:
            col = max(work, key=self.key)
            piv = self.pivots.get(col)
            if piv is None:
                inv = self.one / work[col]
                self.pivots[col] = {c: v * inv for c, v in work.items()}
                return True
            f = work[col]
            for c, v in piv.items():
                cur = work.get(c)
                nv = -v * f if cur is None else cur - v * f
                if nv:
                    work[c] = nv
                else:
                    work.pop(c, None)
        return False

    def add_rows(self, rows: Iterable[Row]) -> int:
        added = 0
        for r in rows:
            if self.add_row(r):
                added += 1
        return added


def right_nullspace(
    rows: Sequence[Row], col_order: Sequence[Hashable], one=Fraction(1)
) -> list[Row]:
    """Basis of {x : sum_c row[c] x_c = 0 for every row}.

    Solutions are dicts over column keys. One basis vector per free
    column, with the free coordinate set to 1.
    """
    ech = row_reduce(rows, col_order, one=one)
    pivot_for = {c: r for c, r in ech.pivots}
    basis = []
    for free in col_order:
        if free in pivot_for:
            continue
        vec: Row = {free: one}
        for c, r in ech.pivots:
            v = r.get(free)
            if v:
                vec[c] = -v
        basis.append(vec)
    return basis


def combination_of(
    target: Row,
    rows: Sequence[Row],
    col_order: Sequence[Hashable],
    one=Fraction(1),
):
    """Express target as a combination of rows, or return None.

    The result maps row index to coefficient: target = sum c_i row_i.
    """
    ech = row_reduce(rows, col_order, one=one, track=True)
    rem = dict(target)
    used: Row = {}
    by_col = {c: (r, k) for k, (c, r) in enumerate(ech.pivots)}
    for col in col_order:
        v = rem.get(col)
        if not v:
            continue
        hit = by_col.get(col)
        if hit is None:
            return None
        prow, k = hit
        for c, w in prow.items():
            nv = rem.get(c, None)
            nv = -w * v if nv is None else nv - w * v
            if nv:
                rem[c] = nv
            elif c in rem:
                del rem[c]
        for idx, w in ech.combos[k].items():
            nv = used.get(idx, None)
            nv = w * v if nv is None else nv + w * v
            if nv:
                used[idx] = nv
            elif idx in used:
                del used[idx]
    if rem:
        return None
    return used
