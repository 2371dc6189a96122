"""Shared fixtures: seeded random operators and scalar helpers."""

import random
from fractions import Fraction

import pytest

from dualops.field import FieldContext, MultiIndex, multi_indices_up_to
from dualops.ore import OreOperator


def random_ratfunc(rng, ctx, deg=2, allow_zero=True):
    """A random polynomial scalar of total degree <= deg with small
    integer coefficients (denominator-free keeps products cheap)."""
    terms = []
    for mu in multi_indices_up_to(ctx.n, deg):
        c = rng.randint(-3, 3)
        if c:
            terms.append((mu, c))
    if not terms:
        if allow_zero:
            return ctx.zero
        return ctx.one
    out = ctx.zero
    for mu, c in terms:
        mono = ctx.num(c)
        for i in range(1, ctx.n + 1):
            for _ in range(mu[i - 1]):
                mono = mono * ctx.x(i)
        out = out + mono
    return out


def random_operator(rng, ctx, max_order=3, deg=2, max_terms=4):
    """A random operator: a few d_mu monomials with polynomial
    coefficients; never identically zero."""
    pool = multi_indices_up_to(ctx.n, max_order)
    k = rng.randint(1, max_terms)
    terms = {}
    for mu in rng.sample(pool, min(k, len(pool))):
        c = random_ratfunc(rng, ctx, deg=deg)
        if not c.is_zero():
            terms[mu] = c
    if not terms:
        terms[MultiIndex.zero(ctx.n)] = ctx.one
    return OreOperator(ctx, terms)


@pytest.fixture
def rng():
    return random.Random(90125)


@pytest.fixture(params=[1, 2, 3])
def ctx_n(request):
    return FieldContext.std(request.param)
