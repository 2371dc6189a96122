"""Ground field arithmetic for operator coefficients.

Everything downstream works over K = Q(params)(x^1, ..., x^n): rational
functions in the independent variables, with commuting formal parameters
adjoined to the constants. Elements are kept in a canonical form (numerator
and denominator coprime, denominator monic under the fixed monomial order)
so that equality is structural and hashing is safe.

The monomial order is degrevlex with x^1 < x^2 < ... < x^n < params.
Exact arithmetic only; floats are rejected.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import sympy
from sympy import QQ
from sympy.polys.fields import field as _construct_field
from sympy.polys.orderings import grevlex


class ZeroDenominator(ZeroDivisionError):
    """Division by the zero element of K."""


class PoleAtPoint(ArithmeticError):
    """Evaluation or specialization hit a vanishing denominator."""


class IndexOutOfRange(IndexError):
    """A variable index outside 1..n was used."""


_IDENT_OK = str.isidentifier


def _as_rational(value):
    """Coerce an exact scalar to sympy QQ, rejecting floats."""
    if isinstance(value, bool):
        raise TypeError("boolean is not a field scalar")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("inexact float rejected; use Fraction or int")
    raise TypeError(f"cannot coerce {type(value).__name__} to a rational scalar")


class MultiIndex(tuple):
    """Exponent vector mu = (mu_1, ..., mu_n) for a derivative d_mu.

    Stored as exponents of d_1 .. d_n. The printable index list repeats
    each variable index by its exponent, so (1, 2) over n=2 prints as
    d[1,2,2].
    """

    def __new__(cls, exps: Iterable[int]):
        t = tuple(int(e) for e in exps)
        if any(e < 0 for e in t):
            raise ValueError(f"negative exponent in multi-index {t}")
        return super().__new__(cls, t)

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "MultiIndex":
        if not 1 <= i <= n:
            raise IndexOutOfRange(f"variable index {i} outside 1..{n}")
        return cls(tuple(1 if k == i - 1 else 0 for k in range(n)))

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "MultiIndex":
        """Build from a repeated-index list, e.g. [1,2,2] -> (1,2) for n=2."""
        exps = [0] * n
        for i in indices:
            if not 1 <= i <= n:
                raise IndexOutOfRange(f"variable index {i} outside 1..{n}")
            exps[i - 1] += 1
        return cls(exps)

    @property
    def order(self) -> int:
        return sum(self)

    def indices(self) -> list[int]:
        """Repeated-index form, ascending: (1,2) -> [1,2,2]."""
        out: list[int] = []
        for pos, e in enumerate(self, start=1):
            out.extend([pos] * e)
        return out

    def bump(self, i: int) -> "MultiIndex":
        """mu + 1_i (1-based)."""
        if not 1 <= i <= len(self):
            raise IndexOutOfRange(f"variable index {i} outside 1..{len(self)}")
        return MultiIndex(
            tuple(e + 1 if k == i - 1 else e for k, e in enumerate(self))
        )

    def lower(self, i: int) -> "MultiIndex":
        """mu - 1_i (1-based); requires mu_i > 0."""
        if not 1 <= i <= len(self):
            raise IndexOutOfRange(f"variable index {i} outside 1..{len(self)}")
        if self[i - 1] == 0:
            raise ValueError(f"cannot lower index {i} of {tuple(self)}")
        return MultiIndex(
            tuple(e - 1 if k == i - 1 else e for k, e in enumerate(self))
        )

    def __add__(self, other) -> "MultiIndex":  # type: ignore[override]
        if len(self) != len(other):
            raise ValueError("multi-index length mismatch")
        return MultiIndex(tuple(a + b for a, b in zip(self, other)))

    def deglex_key(self):
        """Sort key: total order first, then exponents read from x^n down.

        Larger key means the jet variable sits higher in the elimination
        order used for pivoting; parametric jets come out lowest.
        """
        return (self.order, tuple(reversed(self)))

    def __repr__(self) -> str:
        return f"MultiIndex({tuple(self)})"


def multi_indices_of_order(n: int, r: int) -> list[MultiIndex]:
    """All multi-indices with |mu| = r, ascending in deglex."""
    if r < 0:
        return []
    out = [
        MultiIndex(e)
        for e in _compositions(r, n)
    ]
    out.sort(key=MultiIndex.deglex_key)
    return out


def multi_indices_up_to(n: int, r: int) -> list[MultiIndex]:
    """All multi-indices with |mu| <= r, ascending in deglex."""
    out: list[MultiIndex] = []
    for k in range(r + 1):
        out.extend(multi_indices_of_order(n, k))
    return out


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def sym_dim(n: int, r: int) -> int:
    """dim S_r T* = C(r+n-1, n-1); zero for negative r."""
    if r < 0:
        return 0
    return _binom(r + n - 1, n - 1)


def jet_dim(n: int, q: int) -> int:
    """dim J_q for one unknown = C(q+n, n); zero for q < 0... -1 gives 0."""
    if q < 0:
        return 0
    return _binom(q + n, n)


def _binom(a: int, b: int) -> int:
    import math

    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


class FieldContext:
    """The differential field K = Q(params)(x^1 .. x^n).

    Independent variables and parameters are fixed at construction; the
    sympy generator list puts parameters first and reverses the x's, which
    realizes x^1 < ... < x^n < params under grevlex (sympy treats earlier
    generators as larger).
    """

    __slots__ = ("xvars", "params", "_field", "_gens", "_zero", "_one")

    def __init__(self, xvars: Sequence[str], params: Sequence[str] = ()):
        xvars = tuple(xvars)
        params = tuple(params)
        if not xvars:
            raise ValueError("need at least one independent variable")
        names = params + xvars
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for nm in names:
            if not _IDENT_OK(nm):
                raise ValueError(f"bad variable name {nm!r}")
        self.xvars = xvars
        self.params = params
        ordered = list(params) + list(reversed(xvars))
        fld, *gens = _construct_field(ordered, QQ, order=grevlex)
        self._field = fld
        self._gens = dict(zip(ordered, gens))
        self._zero = RatFunc(self, fld.zero)
        self._one = RatFunc(self, fld.one)

    @classmethod
    def std(cls, n: int, params: Sequence[str] = ()) -> "FieldContext":
        """Context with the default variable names x1 .. xn."""
        return cls(tuple(f"x{i}" for i in range(1, n + 1)), params)

    @property
    def n(self) -> int:
        return len(self.xvars)

    @property
    def zero(self) -> "RatFunc":
        return self._zero

    @property
    def one(self) -> "RatFunc":
        return self._one

    def var(self, name: str) -> "RatFunc":
        if name not in self._gens:
            raise KeyError(f"{name!r} is not a variable of this field")
        return RatFunc(self, self._gens[name])

    def x(self, i: int) -> "RatFunc":
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"variable index {i} outside 1..{self.n}")
        return self.var(self.xvars[i - 1])

    def num(self, value) -> "RatFunc":
        """Embed an exact scalar."""
        return RatFunc(self, self._field.ground_new(_as_rational(value)))

    def from_expr(self, expr) -> "RatFunc":
        try:
            fe = self._field.from_expr(expr)
        except ZeroDivisionError:
            raise ZeroDenominator("zero denominator in expression") from None
        return RatFunc(self, fe)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldContext)
            and self.xvars == other.xvars
            and self.params == other.params
        )

    def __hash__(self) -> int:
        return hash((self.xvars, self.params))

    def __repr__(self) -> str:
        ps = f", params={list(self.params)}" if self.params else ""
        return f"FieldContext({list(self.xvars)}{ps})"


class RatFunc:
    """One element of K, canonically reduced.

    Thin wrapper over a sympy FracElement; sympy keeps numerator and
    denominator coprime with an integer-primitive, positive-leading
    denominator, which is equivalent to (and convertible into) the monic
    normal form exposed by :meth:`normalize`.
    """

    __slots__ = ("ctx", "fe")

    def __init__(self, ctx: FieldContext, fe):
        self.ctx = ctx
        self.fe = fe

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        """sympy-level operand, float rejection, NotImplemented passthrough."""
        if isinstance(other, RatFunc):
            if other.ctx != self.ctx:
                raise ValueError("operands live in different field contexts")
            return other.fe
        if isinstance(other, float):
            raise TypeError("inexact float rejected; use Fraction or int")
        if isinstance(other, (int, Fraction)):
            return _as_rational(other)
        return NotImplemented

    def __add__(self, other):
        fe = self._coerce(other)
        if fe is NotImplemented:
            return NotImplemented
        return RatFunc(self.ctx, self.fe + fe)

    __radd__ = __add__

    def __sub__(self, other):
        fe = self._coerce(other)
        if fe is NotImplemented:
            return NotImplemented
        return RatFunc(self.ctx, self.fe - fe)

    def __rsub__(self, other):
        fe = self._coerce(other)
        if fe is NotImplemented:
            return NotImplemented
        return RatFunc(self.ctx, fe - self.fe)

    def __mul__(self, other):
        fe = self._coerce(other)
        if fe is NotImplemented:
            return NotImplemented
        return RatFunc(self.ctx, self.fe * fe)

    __rmul__ = __mul__

    def __truediv__(self, other):
        fe = self._coerce(other)
        if fe is NotImplemented:
            return NotImplemented
        if not fe:
            raise ZeroDenominator("division by zero in K")
        return RatFunc(self.ctx, self.fe / fe)

    def __rtruediv__(self, other):
        fe = self._coerce(other)
        if fe is NotImplemented:
            return NotImplemented
        if not self.fe:
            raise ZeroDenominator("division by zero in K")
        return RatFunc(self.ctx, fe / self.fe)

    def __neg__(self):
        return RatFunc(self.ctx, -self.fe)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be int")
        if k < 0 and not self.fe:
            raise ZeroDenominator("negative power of zero")
        return RatFunc(self.ctx, self.fe ** k)

    def inverse(self) -> "RatFunc":
        return self.__pow__(-1)

    def __bool__(self) -> bool:
        return bool(self.fe)

    def is_zero(self) -> bool:
        return not self.fe

    def __eq__(self, other) -> bool:
        if isinstance(other, RatFunc):
            return self.ctx == other.ctx and self.fe == other.fe
        if isinstance(other, (int, Fraction)):
            return self.fe == _as_rational(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.fe)

    # -- calculus ------------------------------------------------------

    def partial(self, i: int) -> "RatFunc":
        """d/dx^i, 1-based."""
        ctx = self.ctx
        if not 1 <= i <= ctx.n:
            raise IndexOutOfRange(f"variable index {i} outside 1..{ctx.n}")
        gen = ctx._gens[ctx.xvars[i - 1]]
        return RatFunc(ctx, self.fe.diff(gen))

    # -- normal form and conversions ----------------------------------

    def normalize(self):
        """Return (num_terms, den_terms) with the denominator monic.

        Each side is a list of (coefficient, monomial) pairs in descending
        monomial order; coefficients are Fractions, monomials map variable
        name to exponent (zero exponents omitted).
        """
        num, den = self.fe.numer, self.fe.denom
        lc = den.LC if den else QQ(1)
        gens_names = [str(g) for g in self.fe.field.symbols]

        def side(poly):
            out = []
            for mono, coeff in poly.terms():
                c = coeff / lc
                frac = Fraction(int(c.numerator), int(c.denominator))
                md = {
                    gens_names[k]: e for k, e in enumerate(mono) if e
                }
                out.append((frac, md))
            return out

        return side(num), side(den)

    def eval(self, point: Mapping[str, "int | Fraction"]) -> Fraction:
        """Evaluate at a point covering every variable and parameter."""
        ctx = self.ctx
        missing = [v for v in ctx.params + ctx.xvars if v not in point]
        if missing:
            raise KeyError(f"point does not cover {missing}")
        subs = {
            sympy.Symbol(name): sympy.Rational(_as_rational(point[name]))
            for name in ctx.params + ctx.xvars
        }
        num = sympy.Rational(self.fe.numer.as_expr().xreplace(subs))
        den = sympy.Rational(self.fe.denom.as_expr().xreplace(subs))
        if den == 0:
            raise PoleAtPoint(f"denominator vanishes at {dict(point)}")
        val = num / den
        return Fraction(int(val.p), int(val.q))

    def subst(self, values: Mapping[str, "int | Fraction"]) -> "RatFunc":
        """Specialize parameters to exact scalars.

        Returns an element of the smaller context with those parameters
        dropped. Only parameters may be specialized here; independent
        variables stay symbolic.
        """
        ctx = self.ctx
        for name in values:
            if name in ctx.xvars:
                raise ValueError(f"cannot specialize independent variable {name!r}")
            if name not in ctx.params:
                raise KeyError(f"{name!r} is not a parameter of this field")
        remaining = tuple(p for p in ctx.params if p not in values)
        target = FieldContext(ctx.xvars, remaining)
        subs = {
            sympy.Symbol(k): sympy.Rational(_as_rational(v))
            for k, v in values.items()
        }
        num = sympy.expand(self.fe.numer.as_expr().xreplace(subs))
        den = sympy.expand(self.fe.denom.as_expr().xreplace(subs))
        if den == 0:
            raise PoleAtPoint(f"denominator vanishes identically under {dict(values)}")
        return target.from_expr(num / den)

    def as_expr(self):
        return self.fe.as_expr()

    def __str__(self) -> str:
        num, den = self.normalize()
        if not num:
            return "0"
        ns = _terms_str(num)
        if den == [(Fraction(1), {})]:
            return ns
        return f"({ns})/({_terms_str(den)})"

    def __repr__(self) -> str:
        return f"<K: {self}>"


def _terms_str(terms) -> str:
    parts = []
    for coeff, mono in terms:
        factors = []
        for name in sorted(mono):
            factors.extend([name] * mono[name])
        if coeff == 1 and factors:
            body = "*".join(factors)
        elif coeff == -1 and factors:
            body = "-" + "*".join(factors)
        else:
            cs = str(coeff)
            if "/" in cs and factors:
                cs = f"({cs})"
            body = "*".join([cs] + factors) if factors else cs
        if parts and not body.startswith("-"):
            parts.append("+")
            parts.append(body)
        elif parts:
            parts.append("-")
            parts.append(body[1:])
        else:
            parts.append(body)
    return " ".join(parts)


def normalize(f: RatFunc):
    return f.normalize()


def partial(f: RatFunc, i: int) -> RatFunc:
    return f.partial(i)


def eval_at(f: RatFunc, point: Mapping[str, "int | Fraction"]) -> Fraction:
    return f.eval(point)
