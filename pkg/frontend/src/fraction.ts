/** Exact rational arithmetic on bigint, always kept in lowest terms
 * with the sign carried by the numerator. */

function bigAbs(a: bigint): bigint {
  return a < 0n ? -a : a;
}

function bigGcd(a: bigint, b: bigint): bigint {
  a = bigAbs(a);
  b = bigAbs(b);
  while (b !== 0n) {
    const t = a % b;
    a = b;
    b = t;
  }
  return a;
}

export class Frac {
  readonly num: bigint;
  readonly den: bigint;

  constructor(num: bigint | number, den: bigint | number = 1n) {
    let n = BigInt(num);
    let d = BigInt(den);
    if (d === 0n) {
      throw new RangeError("zero denominator");
    }
    if (d < 0n) {
      n = -n;
      d = -d;
    }
    const g = bigGcd(n, d);
    if (g > 1n) {
      n /= g;
      d /= g;
    }
    this.num = n;
    this.den = d;
  }

  static readonly ZERO = new Frac(0n);
  static readonly ONE = new Frac(1n);

  /** Parse "3", "-3", "3/2", "-3/2". */
  static parse(text: string): Frac {
    const m = /^(-?\d+)(?:\/(\d+))?$/.exec(text.trim());
    if (m === null) {
      throw new RangeError(`not a rational literal: ${JSON.stringify(text)}`);
    }
    return new Frac(BigInt(m[1]!), m[2] === undefined ? 1n : BigInt(m[2]));
  }

  isZero(): boolean {
    return this.num === 0n;
  }

  isOne(): boolean {
    return this.num === 1n && this.den === 1n;
  }

  sign(): -1 | 0 | 1 {
    return this.num < 0n ? -1 : this.num > 0n ? 1 : 0;
  }

  neg(): Frac {
    return new Frac(-this.num, this.den);
  }

  add(other: Frac): Frac {
    return new Frac(this.num * other.den + other.num * this.den, this.den * other.den);
  }

  sub(other: Frac): Frac {
    return new Frac(this.num * other.den - other.num * this.den, this.den * other.den);
  }

  mul(other: Frac): Frac {
    return new Frac(this.num * other.num, this.den * other.den);
  }

  div(other: Frac): Frac {
    if (other.num === 0n) {
      throw new RangeError("division by zero");
    }
    return new Frac(this.num * other.den, this.den * other.num);
  }

  eq(other: Frac): boolean {
    return this.num === other.num && this.den === other.den;
  }

  /** "5", "-5", "3/2", "-3/2"; integers print without a slash. */
  toString(): string {
    if (this.den === 1n) {
      return this.num.toString();
    }
    return `${this.num}/${this.den}`;
  }
}
