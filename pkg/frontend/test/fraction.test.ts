import { describe, expect, it } from "vitest";
import { Frac } from "../src/fraction.js";

describe("Frac", () => {
  it("normalizes sign and gcd at construction", () => {
    expect(new Frac(2, 4).toString()).toBe("1/2");
    expect(new Frac(2, -4).toString()).toBe("-1/2");
    expect(new Frac(-2, -4).toString()).toBe("1/2");
    expect(new Frac(0, 7).toString()).toBe("0");
    expect(new Frac(6, 3).toString()).toBe("2");
  });

  it("rejects zero denominators", () => {
    expect(() => new Frac(1, 0)).toThrow(RangeError);
    expect(() => Frac.ONE.div(Frac.ZERO)).toThrow(RangeError);
  });

  it("does exact arithmetic", () => {
    const a = new Frac(1, 6);
    const b = new Frac(1, 10);
    expect(a.add(b).toString()).toBe("4/15");
    expect(a.sub(b).toString()).toBe("1/15");
    expect(a.mul(b).toString()).toBe("1/60");
    expect(a.div(b).toString()).toBe("5/3");
    expect(a.neg().add(a).isZero()).toBe(true);
  });

  it("survives magnitudes past 2^53", () => {
    const big = new Frac(2n ** 80n, 3n);
    const same = big.mul(new Frac(3n)).div(new Frac(3n));
    expect(same.eq(big)).toBe(true);
    expect(big.mul(new Frac(3n)).toString()).toBe((2n ** 80n).toString());
  });

  it("parses integer and slash literals", () => {
    expect(Frac.parse("3").toString()).toBe("3");
    expect(Frac.parse("-3/6").toString()).toBe("-1/2");
    expect(() => Frac.parse("1.5")).toThrow(RangeError);
  });

  it("compares by value", () => {
    expect(new Frac(2, 4).eq(new Frac(1, 2))).toBe(true);
    expect(new Frac(1, 2).eq(new Frac(1, 3))).toBe(false);
    expect(new Frac(-3).sign()).toBe(-1);
    expect(Frac.ZERO.sign()).toBe(0);
  });
});
