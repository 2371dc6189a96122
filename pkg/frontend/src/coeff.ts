/** Multivariate rational coefficients over QQ(params)(x1..xn).
 *
 * Polynomials are stored as exponent-vector maps over a fixed generator
 * list: all scalar parameters first, then the independent variables in
 * reverse declaration order.  Monomials compare in graded reverse
 * lexicographic order with an earlier generator counting as larger, so
 * x1 < x2 < ... < xn < params.  Printing follows the same conventions
 * as the dualops canonical form: terms descending, factors inside a
 * monomial alphabetical, fractional or parenthesised coefficients
 * wrapped before a "*".
 *
 * Normalisation of ratios is deliberately light: common monomial
 * content is cancelled, the denominator is made monic, and p/p folds
 * to 1.  Full polynomial gcd cancellation is not implemented, so a
 * ratio like (x1*x1 - 1)/(x1 - 1) keeps both parts.  Canonical .sys
 * files written by dualops are already fully cancelled, which makes
 * round trips through this module byte-stable.
 */

import { Frac } from "./fraction.js";

export interface Term {
  readonly exps: readonly number[];
  readonly c: Frac;
}

/** Total degree of an exponent vector. */
function degOf(exps: readonly number[]): number {
  let s = 0;
  for (const e of exps) {
    s += e;
  }
  return s;
}

/** Classic cmp contract: positive when a is the larger monomial.
 * Grevlex with the earlier generator larger: compare total degree,
 * then the rightmost nonzero entry of a-b decides (negative => a larger). */
export function grevlexCmp(a: readonly number[], b: readonly number[]): number {
  const da = degOf(a);
  const db = degOf(b);
  if (da !== db) {
    return da < db ? -1 : 1;
  }
  for (let i = a.length - 1; i >= 0; i--) {
    const d = (a[i] ?? 0) - (b[i] ?? 0);
    if (d !== 0) {
      return d < 0 ? 1 : -1;
    }
  }
  return 0;
}

function keyOf(exps: readonly number[]): string {
  return exps.join(",");
}

export class Poly {
  readonly nGens: number;
  private readonly byKey: Map<string, Term>;

  private constructor(nGens: number, byKey: Map<string, Term>) {
    this.nGens = nGens;
    this.byKey = byKey;
  }

  static fromTerms(nGens: number, terms: Iterable<Term>): Poly {
    const byKey = new Map<string, Term>();
    for (const t of terms) {
      if (t.exps.length !== nGens) {
        throw new RangeError("exponent vector length mismatch");
      }
      const k = keyOf(t.exps);
      const prev = byKey.get(k);
      const c = prev === undefined ? t.c : prev.c.add(t.c);
      if (c.isZero()) {
        byKey.delete(k);
      } else {
        byKey.set(k, { exps: t.exps, c });
      }
    }
    return new Poly(nGens, byKey);
  }

  static zero(nGens: number): Poly {
    return Poly.fromTerms(nGens, []);
  }

  static constant(nGens: number, c: Frac): Poly {
    return Poly.fromTerms(nGens, [{ exps: new Array<number>(nGens).fill(0), c }]);
  }

  static one(nGens: number): Poly {
    return Poly.constant(nGens, Frac.ONE);
  }

  static gen(nGens: number, index: number): Poly {
    const exps = new Array<number>(nGens).fill(0);
    exps[index] = 1;
    return Poly.fromTerms(nGens, [{ exps, c: Frac.ONE }]);
  }

  isZero(): boolean {
    return this.byKey.size === 0;
  }

  isOne(): boolean {
    if (this.byKey.size !== 1) {
      return false;
    }
    const t = this.termsDesc()[0]!;
    return t.c.isOne() && degOf(t.exps) === 0;
  }

  termsDesc(): Term[] {
    const out = [...this.byKey.values()];
    out.sort((a, b) => grevlexCmp(b.exps, a.exps));
    return out;
  }

  leadingCoeff(): Frac {
    const ts = this.termsDesc();
    if (ts.length === 0) {
      return Frac.ZERO;
    }
    return ts[0]!.c;
  }

  add(other: Poly): Poly {
    return Poly.fromTerms(this.nGens, [...this.byKey.values(), ...other.byKey.values()]);
  }

  neg(): Poly {
    return this.scale(new Frac(-1n));
  }

  sub(other: Poly): Poly {
    return this.add(other.neg());
  }

  scale(c: Frac): Poly {
    if (c.isZero()) {
      return Poly.zero(this.nGens);
    }
    const terms: Term[] = [];
    for (const t of this.byKey.values()) {
      terms.push({ exps: t.exps, c: t.c.mul(c) });
    }
    return Poly.fromTerms(this.nGens, terms);
  }

  mul(other: Poly): Poly {
    const terms: Term[] = [];
    for (const a of this.byKey.values()) {
      for (const b of other.byKey.values()) {
        const exps = a.exps.map((e, i) => e + (b.exps[i] ?? 0));
        terms.push({ exps, c: a.c.mul(b.c) });
      }
    }
    return Poly.fromTerms(this.nGens, terms);
  }

  equals(other: Poly): boolean {
    if (this.byKey.size !== other.byKey.size) {
      return false;
    }
    for (const [k, t] of this.byKey) {
      const o = other.byKey.get(k);
      if (o === undefined || !o.c.eq(t.c)) {
        return false;
      }
    }
    return true;
  }

  /** Per-generator minimum exponent over all terms; zero poly gives zeros. */
  monomialContent(): number[] {
    const content = new Array<number>(this.nGens).fill(0);
    let first = true;
    for (const t of this.byKey.values()) {
      for (let i = 0; i < this.nGens; i++) {
        const e = t.exps[i] ?? 0;
        content[i] = first ? e : Math.min(content[i]!, e);
      }
      first = false;
    }
    return first ? new Array<number>(this.nGens).fill(0) : content;
  }

  /** Divide every term by x^shift; caller guarantees divisibility. */
  shiftDown(shift: readonly number[]): Poly {
    const terms: Term[] = [];
    for (const t of this.byKey.values()) {
      const exps = t.exps.map((e, i) => {
        const s = e - (shift[i] ?? 0);
        if (s < 0) {
          throw new RangeError("monomial shift below zero");
        }
        return s;
      });
      terms.push({ exps, c: t.c });
    }
    return Poly.fromTerms(this.nGens, terms);
  }
}

/** Generator naming for one system: params then reversed xvars. */
export class CoeffField {
  readonly params: readonly string[];
  readonly xvars: readonly string[];
  readonly gens: readonly string[];
  private readonly genIndex: Map<string, number>;

  constructor(xvars: readonly string[], params: readonly string[] = []) {
    this.params = [...params];
    this.xvars = [...xvars];
    this.gens = [...params, ...[...xvars].reverse()];
    this.genIndex = new Map();
    this.gens.forEach((g, i) => {
      if (this.genIndex.has(g)) {
        throw new RangeError(`duplicate generator ${g}`);
      }
      this.genIndex.set(g, i);
    });
  }

  hasScalar(name: string): boolean {
    return this.genIndex.has(name);
  }

  zero(): Rat {
    return Rat.make(this, Poly.zero(this.gens.length), Poly.one(this.gens.length));
  }

  one(): Rat {
    return Rat.make(this, Poly.one(this.gens.length), Poly.one(this.gens.length));
  }

  fromInt(n: bigint | number): Rat {
    return Rat.make(this, Poly.constant(this.gens.length, new Frac(n)), Poly.one(this.gens.length));
  }

  scalar(name: string): Rat {
    const i = this.genIndex.get(name);
    if (i === undefined) {
      throw new RangeError(`unknown scalar ${name}`);
    }
    return Rat.make(this, Poly.gen(this.gens.length, i), Poly.one(this.gens.length));
  }
}

/** One term of a polynomial in display form. */
function termBody(field: CoeffField, t: Term): string {
  const factors: string[] = [];
  const named: Array<[string, number]> = [];
  t.exps.forEach((e, i) => {
    if (e > 0) {
      named.push([field.gens[i]!, e]);
    }
  });
  named.sort((a, b) => (a[0] < b[0] ? -1 : a[0] > b[0] ? 1 : 0));
  for (const [name, e] of named) {
    for (let k = 0; k < e; k++) {
      factors.push(name);
    }
  }
  if (factors.length > 0 && t.c.isOne()) {
    return factors.join("*");
  }
  if (factors.length > 0 && t.c.eq(new Frac(-1n))) {
    return "-" + factors.join("*");
  }
  let cs = t.c.toString();
  if (factors.length > 0 && cs.includes("/")) {
    cs = `(${cs})`;
  }
  return factors.length > 0 ? [cs, ...factors].join("*") : cs;
}

/** " + " / " - " joining of term bodies, sign folded into the connective. */
export function joinSigned(bodies: readonly string[]): string {
  let out = "";
  bodies.forEach((body, i) => {
    if (i === 0) {
      out = body;
    } else if (body.startsWith("-")) {
      out += " - " + body.slice(1);
    } else {
      out += " + " + body;
    }
  });
  return out;
}

export function polyToString(field: CoeffField, p: Poly): string {
  const ts = p.termsDesc();
  if (ts.length === 0) {
    return "0";
  }
  return joinSigned(ts.map((t) => termBody(field, t)));
}

export class Rat {
  readonly field: CoeffField;
  readonly num: Poly;
  readonly den: Poly;

  private constructor(field: CoeffField, num: Poly, den: Poly) {
    this.field = field;
    this.num = num;
    this.den = den;
  }

  /** Normalise: cancel monomial content, make the denominator monic,
   * fold p/p to 1 and anything/0-num to the canonical zero. */
  static make(field: CoeffField, num: Poly, den: Poly): Rat {
    const n = field.gens.length;
    if (den.isZero()) {
      throw new RangeError("zero denominator");
    }
    if (num.isZero()) {
      return new Rat(field, Poly.zero(n), Poly.one(n));
    }
    const cn = num.monomialContent();
    const cd = den.monomialContent();
    const shared = cn.map((e, i) => Math.min(e, cd[i] ?? 0));
    let num2 = num;
    let den2 = den;
    if (shared.some((e) => e > 0)) {
      num2 = num2.shiftDown(shared);
      den2 = den2.shiftDown(shared);
    }
    const lead = den2.leadingCoeff();
    if (!lead.isOne()) {
      const inv = new Frac(lead.den, lead.num);
      num2 = num2.scale(inv);
      den2 = den2.scale(inv);
    }
    if (num2.equals(den2)) {
      return new Rat(field, Poly.one(n), Poly.one(n));
    }
    return new Rat(field, num2, den2);
  }

  isZero(): boolean {
    return this.num.isZero();
  }

  isOne(): boolean {
    return this.num.isOne() && this.den.isOne();
  }

  neg(): Rat {
    return Rat.make(this.field, this.num.neg(), this.den);
  }

  add(other: Rat): Rat {
    return Rat.make(
      this.field,
      this.num.mul(other.den).add(other.num.mul(this.den)),
      this.den.mul(other.den),
    );
  }

  sub(other: Rat): Rat {
    return this.add(other.neg());
  }

  mul(other: Rat): Rat {
    return Rat.make(this.field, this.num.mul(other.num), this.den.mul(other.den));
  }

  div(other: Rat): Rat {
    if (other.isZero()) {
      throw new RangeError("division by zero");
    }
    return Rat.make(this.field, this.num.mul(other.den), this.den.mul(other.num));
  }

  /** Exact equality by cross multiplication, immune to missed gcd cancellation. */
  eq(other: Rat): boolean {
    return this.num.mul(other.den).equals(other.num.mul(this.den));
  }

  toString(): string {
    if (this.num.isZero()) {
      return "0";
    }
    const ns = polyToString(this.field, this.num);
    if (this.den.isOne()) {
      return ns;
    }
    const ds = polyToString(this.field, this.den);
    return `(${ns})/(${ds})`;
  }
}
