"""Sparse elimination over exact scalars (Fraction and RatFunc rows)."""

import random
from fractions import Fraction

from dualops.field import FieldContext
from dualops.linalg import (
    IncrementalEchelon,
    combination_of,
    left_nullspace,
    rank_of,
    right_nullspace,
    row_reduce,
)


COLS = ["c0", "c1", "c2", "c3"]


def _row(*vals):
    return {c: Fraction(v) for c, v in zip(COLS, vals) if v}


def test_rank_small():
    rows = [_row(1, 2, 0, 0), _row(0, 1, 1, 0), _row(1, 3, 1, 0)]
    assert rank_of(rows, COLS) == 2
    assert rank_of([], COLS) == 0
    assert rank_of([_row(0, 0, 0, 0)], COLS) == 0


def test_left_nullspace_annihilates():
    rows = [_row(1, 2, 0, 0), _row(0, 1, 1, 0), _row(1, 3, 1, 0)]
    null = left_nullspace(rows, COLS)
    assert len(null) == 1
    combo = null[0]
    # the combination of input rows really is zero
    acc = {}
    for i, f in combo.items():
        for c, v in rows[i].items():
            acc[c] = acc.get(c, Fraction(0)) + f * v
    assert all(v == 0 for v in acc.values())


def test_right_nullspace_dimension():
    rows = [_row(1, 0, -1, 0)]
    null = right_nullspace(rows, COLS)
    assert len(null) == 3
    for vec in null:
        s = sum(rows[0].get(c, Fraction(0)) * vec.get(c, Fraction(0)) for c in COLS)
        assert s == 0


def test_combination_of_positive_and_negative():
    rows = [_row(1, 1, 0, 0), _row(0, 1, 1, 0)]
    target = _row(1, 2, 1, 0)
    combo = combination_of(target, rows, COLS)
    assert combo is not None
    acc = {}
    for i, f in combo.items():
        for c, v in rows[i].items():
            acc[c] = acc.get(c, Fraction(0)) + f * v
    assert {c: v for c, v in acc.items() if v} == {c: v for c, v in target.items() if v}
    assert combination_of(_row(0, 0, 0, 1), rows, COLS) is None


def test_incremental_echelon_counts_independent_rows():
    key = COLS.index
    ech = IncrementalEchelon(key=lambda c: -key(c))
    assert ech.add_row(_row(1, 1, 0, 0)) is True
    assert ech.add_row(_row(2, 2, 0, 0)) is False
    assert ech.add_row(_row(0, 0, 1, 1)) is True
    assert ech.rank == 2


def test_random_rank_matches_dense_elimination():
    rng = random.Random(1331)
    for _ in range(25):
        p, m = rng.randint(1, 5), rng.randint(1, 5)
        dense = [[Fraction(rng.randint(-3, 3)) for _ in range(m)] for _ in range(p)]
        cols = list(range(m))
        rows = [{j: v for j, v in enumerate(r) if v} for r in dense]
        # dense Gaussian elimination oracle
        work = [r[:] for r in dense]
        rank = 0
        for j in range(m):
            piv = next((i for i in range(rank, p) if work[i][j] != 0), None)
            if piv is None:
                continue
            work[rank], work[piv] = work[piv], work[rank]
            for i in range(p):
                if i != rank and work[i][j] != 0:
                    f = work[i][j] / work[rank][j]
                    work[i] = [a - f * b for a, b in zip(work[i], work[rank])]
            rank += 1
        assert rank_of(rows, cols) == rank


def test_ratfunc_rows():
    ctx = FieldContext.std(1)
    x = ctx.x(1)
    rows = [
        {"u": x, "v": ctx.one},
        {"u": x * x, "v": x},
    ]
    assert rank_of(rows, ["u", "v"], one=ctx.one) == 1
    null = left_nullspace(rows, ["u", "v"], one=ctx.one)
    assert len(null) == 1
