"""Torsion and parametrizability tests by double duality.

The core test takes an operator matrix D1 (p equations, m unknowns),
forms its adjoint, generates the compatibility conditions of the
adjoint, takes the adjoint of those to get a candidate parametrizing
operator D, and generates the compatibility conditions of D. The rows
coming back (D1') always contain the row module of D1; the system is
parametrizable by D exactly when nothing new appears, and every new row
is a torsion element: some nonzero scalar operator multiplies it into
the row module of D1.

Membership searches are bounded, so verdicts carry their certificates:
a torsion_free verdict rests on explicit combinations plus the rank
certificates of both CC searches, a has_torsion verdict rests on an
explicit annihilator for a row that resisted membership up to the
bound, and anything weaker degrades to inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

from . import janet, linalg
from .field import MultiIndex, multi_indices_up_to
from .janet import CCResult, cc
from .ore import NEG_INF, DimensionMismatch, OpMatrix, OreOperator, adjoint_matrix


def default_search_order(A: OpMatrix) -> int:
    """Heuristic search ceiling: twice (order + n + 1)."""
    q = int(A.order) if A.order != NEG_INF else 0
    return 2 * (q + A.ctx.n + 1)


def weighted_adjoint(
    A: OpMatrix, row_weights: Sequence, col_weights: Sequence
) -> OpMatrix:
    """Adjoint with respect to weighted pairings.

    Weights are the diagonal entries of the pairing on each side, e.g.
    multiplicities 1 (diagonal) and 2 (off diagonal) when rows or
    columns enumerate independent components of symmetric 2-tensors.
    """
    if len(row_weights) != A.p or len(col_weights) != A.m:
        raise DimensionMismatch("weight count does not match matrix shape")
    ad = adjoint_matrix(A)
    inv = [Fraction(1) / Fraction(w) for w in col_weights]
    return ad.scale_rows(inv).scale_cols(list(row_weights))


def self_adjoint_defect(
    A: OpMatrix,
    row_weights: Optional[Sequence] = None,
    col_weights: Optional[Sequence] = None,
) -> OpMatrix:
    """ad(A) - A for square A, with weighted adjoint when given."""
    if A.p != A.m and (row_weights is None or len(row_weights) != A.m):
        # still allow comparison when weights make shapes transpose-equal
        pass
    if row_weights is None and col_weights is None:
        ad = adjoint_matrix(A)
    else:
        rw = row_weights if row_weights is not None else [1] * A.p
        cw = col_weights if col_weights is not None else [1] * A.m
        ad = weighted_adjoint(A, rw, cw)
    if ad.p != A.p or ad.m != A.m:
        raise DimensionMismatch("adjoint shape differs, matrix is not square")
    return ad - A

def is_self_adjoint(
    A: OpMatrix,
    row_weights: Optional[Sequence] = None,
    col_weights: Optional[Sequence] = None,
) -> bool:
    return self_adjoint_defect(A, row_weights, col_weights).is_zero()


def self_adjoint_check(
    A: OpMatrix, row_scale: Sequence, col_scale: Sequence
) -> bool:
    """Whether row_scale . ad(A) . col_scale equals A exactly.

    The scales are diagonal matrices given by their entries; all-ones
    scales test plain self-adjointness. Signature scalings make the
    check work for operators on tensors over an indefinite metric."""
    if A.p != A.m:
        raise DimensionMismatch("self-adjointness needs a square matrix")
    if len(row_scale) != A.p or len(col_scale) != A.m:
        raise DimensionMismatch("scale count does not match matrix shape")
    ad = adjoint_matrix(A).scale_rows(list(row_scale)).scale_cols(list(col_scale))
    return (ad - A).is_zero()


class HasTorsion(Exception):
    """Raised when a parametrization is requested but torsion exists."""

    def __init__(self, generators, report=None):
        self.generators = generators
        self.report = report
        super().__init__(
            "module has %d torsion generator(s)" % len(generators)
        )


class Inconclusive(Exception):
    """Raised when a certificate needed for a definite verdict failed
    within the search bound."""

    def __init__(self, step: str, bound: int, report=None):
        self.step = step
        self.bound = bound
        self.report = report
        super().__init__(
            "certificate %r did not settle within order %d" % (step, bound)
        )


@dataclass
class TorsionElement:
    """A residue class annihilated by a nonzero scalar operator."""

    row: tuple
    annihilator: Optional[OreOperator]

    @property
    def certified(self) -> bool:
        return self.annihilator is not None


@dataclass
class DualityReport:
    verdict: str  # torsion_free | has_torsion | inconclusive
    input: OpMatrix
    adjoint: OpMatrix
    cc_adjoint: Optional[OpMatrix]
    parametrization: Optional[OpMatrix]
    cc_back: Optional[OpMatrix]
    torsion: list = dc_field(default_factory=list)
    rank_input: Optional[int] = None
    rank_param: Optional[int] = None
    rank_back: Optional[int] = None
    search_orders: dict = dc_field(default_factory=dict)
    certified: dict = dc_field(default_factory=dict)
    notes: list = dc_field(default_factory=list)

    @property
    def parametrizable(self) -> bool:
        return self.verdict == "torsion_free"

    # positional aliases following the five-step chain
    @property
    def step2(self) -> OpMatrix:
        return self.adjoint

    @property
    def step3(self) -> Optional[OpMatrix]:
        return self.cc_adjoint

    @property
    def step4(self) -> Optional[OpMatrix]:
        return self.parametrization

    @property
    def step5(self) -> Optional[OpMatrix]:
        return self.cc_back

    @property
    def torsion_generators(self) -> list:
        return self.torsion

    def failing_certificate(self) -> Optional[str]:
        """Name of the first certificate that did not hold, if any."""
        for key in (
            "cc_adjoint",
            "cc_back",
            "membership_forward",
            "torsion",
        ):
            if key in self.certified and not self.certified[key]:
                return key
        return None


def _row_sort_key(row):
    o = max((e.order for e in row), default=NEG_INF)
    o = int(o) if o != NEG_INF else -1
    weight = sum(len(e.terms) for e in row)
    return (o, weight)


def annihilator_of(
    row: Sequence[OreOperator], A: OpMatrix, max_order: int
) -> Optional[OreOperator]:
    """A nonzero scalar operator P with P o row inside the row module
    of A, or None if none shows up with ord(P) <= max_order."""
    ctx = A.ctx
    if len(row) != A.m:
        raise DimensionMismatch("row width does not match matrix")
    z_ord = max((e.order for e in row), default=NEG_INF)
    if z_ord == NEG_INF:
        return None
    q1 = min(
        (max((e.order for e in r), default=NEG_INF) for r in A.rows),
        default=NEG_INF,
    )
    q1 = int(q1) if q1 != NEG_INF else 0
    constant = janet._rows_constant([row]) and janet._rows_constant(A.rows)
    one = Fraction(1) if constant else ctx.one
    for t in range(0, max_order + 1):
        coeff_bound = max(0, t + int(z_ord) - q1)
        stack = []
        tags = []
        for i, g in enumerate(A.rows):
            for beta in multi_indices_up_to(ctx.n, coeff_bound):
                shift = OreOperator(ctx, {beta: ctx.one})
                stack.append(
                    janet._oprow_to_jet([shift * e for e in g], constant)
                )
                tags.append(("g", i, beta))
        nz = len(stack)
        for alpha in multi_indices_up_to(ctx.n, t):
            shift = OreOperator(ctx, {alpha: ctx.one})
            stack.append(
                janet._oprow_to_jet([shift * e for e in row], constant)
            )
            tags.append(("z", alpha))
        cols = {c for r in stack for c in r}
        ech = linalg.row_reduce(
            stack, janet._sorted_cols(cols), one=one, track=True
        )
        for combo in ech.null_combos:
            terms = {}
            for idx, v in combo.items():
                if tags[idx][0] != "z":
                    continue
                alpha = tags[idx][1]
                if isinstance(v, Fraction):
                    v = ctx.num(v)
                terms[alpha] = terms.get(alpha, ctx.zero) + v
            P = OreOperator(ctx, terms)
            if not P.is_zero():
                lead = max(P.terms, key=MultiIndex.deglex_key)
                c = P.terms[lead]
                return P.map_coeffs(lambda v: v / c)
    return None


def five_step_test(
    D1: OpMatrix,
    max_order: Optional[int] = None,
    membership_order: Optional[int] = None,
) -> DualityReport:
    """Decide whether D1 is parametrizable, by double duality.

    Chain: ad(D1) -> CC of that -> adjoint back (the candidate
    parametrization D) -> CC of D. Mutual row-module membership of D1
    and the returned CC generators settles the verdict; rows that stay
    outside get annihilators searched to certify torsion.
    """
    ctx = D1.ctx
    if max_order is None:
        max_order = default_search_order(D1)
    notes: list[str] = []

    adD1 = adjoint_matrix(D1)
    res1 = cc(adD1, max_order)
    if res1.cc is not None:
        paramD = adjoint_matrix(res1.cc)
    else:
        paramD = OpMatrix.zero(ctx, D1.m, 1)
        notes.append(
            "adjoint has no compatibility conditions, zero parametrization used"
        )
    res2 = cc(paramD, max_order)

    back_rows = list(res2.cc.rows) if res2.cc is not None else []
    q_back = max(
        (int(e.order) for r in back_rows for e in r if e.order != NEG_INF),
        default=0,
    )
    q_in = int(D1.order) if D1.order != NEG_INF else 0
    if membership_order is None:
        membership_order = max(q_in, q_back) + 2

    report = DualityReport(
        verdict="inconclusive",
        input=D1,
        adjoint=adD1,
        cc_adjoint=res1.cc,
        parametrization=paramD,
        cc_back=res2.cc,
        rank_param=res2.rank_input,
        rank_back=res2.rank_cc,
        search_orders={
            "cc_adjoint": res1.search_order,
            "cc_back": res2.search_order,
            "membership": membership_order,
        },
        certified={
            "cc_adjoint": res1.certified_complete,
            "cc_back": res2.certified_complete,
        },
        notes=notes,
    )
    try:
        report.rank_input = janet.rank_D(D1, max_order + ctx.n + 2)
    except janet.BoundExceeded:
        report.rank_input = None

    d1_rows = [list(r) for r in D1.rows]
    if back_rows:
        member_back = janet._membership_batch(
            [list(r) for r in back_rows], d1_rows, membership_order, ctx, D1.m
        )
    else:
        member_back = []
    new_rows = [r for r, ok in zip(back_rows, member_back) if not ok]

    if back_rows:
        fwd = janet._membership_batch(
            d1_rows,
            [list(r) for r in back_rows],
            membership_order,
            ctx,
            D1.m,
        )
        fwd_ok = all(fwd)
    else:
        fwd_ok = D1.is_zero()
    report.certified["membership_forward"] = fwd_ok

    if not new_rows:
        ranks_consistent = (
            report.rank_input is not None
            and report.rank_back is not None
            and report.rank_input == report.rank_back
        )
        if (
            res1.certified_complete
            and res2.certified_complete
            and fwd_ok
            and ranks_consistent
        ):
            report.verdict = "torsion_free"
        else:
            if not ranks_consistent:
                notes.append("rank identity rk(input) = rk(cc_back) failed to confirm")
            if not fwd_ok:
                notes.append("input rows not recovered inside cc_back at bound")
            report.verdict = "inconclusive"
        return report

    kept: list = []
    basis = list(d1_rows)
    for row in sorted(new_rows, key=_row_sort_key):
        inside = janet._membership_batch(
            [list(row)], basis, membership_order, ctx, D1.m
        )[0]
        if inside:
            continue
        kept.append(list(row))
        basis.append(list(row))

    torsion = []
    all_certified = True
    for row in kept:
        P = annihilator_of(row, D1, membership_order)
        if P is None:
            all_certified = False
        torsion.append(TorsionElement(row=tuple(row), annihilator=P))
    report.torsion = torsion
    report.certified["torsion"] = all_certified

    if all_certified and torsion:
        report.verdict = "has_torsion"
    else:
        report.verdict = "inconclusive"
        notes.append(
            "new compatibility conditions found but not all annihilators "
            "surfaced within the search bound"
        )
    return report


def parametrize(D1: OpMatrix, max_order: Optional[int] = None) -> OpMatrix:
    """The parametrizing operator when the module is torsion-free.

    Raises HasTorsion with the generator list when torsion is
    certified, and Inconclusive naming the failed certificate when the
    bounds did not settle the verdict. Both exceptions carry the full
    report on their `report` attribute.
    """
    report = five_step_test(D1, max_order)
    if report.verdict == "torsion_free":
        return report.parametrization
    if report.verdict == "has_torsion":
        raise HasTorsion(report.torsion, report=report)
    step = report.failing_certificate() or "membership"
    bound = report.search_orders.get("membership", -1)
    raise Inconclusive(step, bound, report=report)


@dataclass
class DoubleReport:
    verdict: str  # reflexive | torsion_free_not_reflexive | has_torsion | inconclusive
    first: DualityReport
    second: Optional[DualityReport]


def double_test(D1: OpMatrix, max_order: Optional[int] = None) -> DoubleReport:
    """Two-level test: parametrizability of D1, then of its
    parametrization. Both passing makes the module reflexive."""
    first = five_step_test(D1, max_order)
    if first.verdict != "torsion_free":
        return DoubleReport(verdict=first.verdict, first=first, second=None)
    second = five_step_test(first.parametrization, max_order)
    if second.verdict == "torsion_free":
        verdict = "reflexive"
    elif second.verdict == "has_torsion":
        verdict = "torsion_free_not_reflexive"
    else:
        verdict = "inconclusive"
    return DoubleReport(verdict=verdict, first=first, second=second)
