import { describe, expect, it } from "vitest";
import { parseReport } from "../src/report.js";
import { renderReport } from "../src/render.js";

const INPUT = {
  name: "pendulum",
  kind: "file",
  digest: "75231b5d90a5",
  shape: [2, 3] as [number, number],
  order: 2,
  indep: ["t"],
  dep: ["x", "th1", "th2"],
  params: ["g", "l1", "l2"],
};

describe("renderReport", () => {
  it("leads with command and verdict", () => {
    const lines = renderReport(
      parseReport({
        command: "rank",
        version: "0.1.0",
        verdict: "ok",
        input: INPUT,
        rank: 2,
      }),
    );
    expect(lines[0]).toBe("rank: ok");
    expect(lines).toContain("rank: 2");
    expect(lines.join("\n")).toContain("pendulum");
  });

  it("shows steps, ranks and witnesses for the five step test", () => {
    const lines = renderReport(
      parseReport({
        command: "test",
        version: "0.1.0",
        verdict: "has_torsion",
        input: INPUT,
        steps: {
          input: { shape: [2, 3], order: 2, rows: [["a", "b", "c"], ["d", "e", "f"]] },
          adjoint: { shape: [3, 2], order: 2, rows: [["a", "b"], ["c", "d"], ["e", "f"]] },
          cc_adjoint: null,
          parametrization: null,
          cc_back: null,
        },
        ranks: { input: 2 },
        bounds: { cc: 4 },
        certified: { cc: true },
        torsion: [{ row: ["0", "1", "-1"], annihilator: "l2*d[1,1] + g" }],
      }),
    );
    const text = lines.join("\n");
    expect(lines[0]).toBe("test: has_torsion");
    expect(text).toContain("steps:");
    expect(text).toContain("input: 2x3, order 2");
    expect(text).toContain("cc_adjoint: (not reached)");
    expect(text).toContain("ranks: input=2");
    expect(text).toContain("torsion witnesses (1):");
    expect(text).toContain("annihilated by l2*d[1,1] + g");
  });

  it("summarizes demo fixtures and surfaces failing checks", () => {
    const lines = renderReport(
      parseReport({
        command: "demo",
        version: "0.1.0",
        verdict: "mismatch",
        fixtures: [
          {
            fixture: "airy",
            description: "stress functions",
            checks: [
              { name: "shape", expected: "3x1", actual: "3x1", ok: true },
              { name: "order", expected: "2", actual: "1", ok: false },
            ],
            failures: 1,
          },
        ],
        failures: 1,
      }),
    );
    const text = lines.join("\n");
    expect(text).toContain("airy: 1 FAILED (2 checks)");
    expect(text).toContain("order: expected 2, got 1");
    expect(text).toContain("total failures: 1");
  });

  it("prints the canonical sys block indented", () => {
    const lines = renderReport(
      parseReport({
        command: "adjoint",
        version: "0.1.0",
        verdict: "ok",
        input: INPUT,
        adjoint: { shape: [1, 1], order: 0, rows: [["1"]] },
        sys: "system adj() {\n  indep t;\n  dep y;\n  eq e1: y;\n}\n",
      }),
    );
    const text = lines.join("\n");
    expect(text).toContain("canonical form:");
    expect(text).toContain("  system adj() {");
    expect(lines[lines.length - 1]).toBe("  }");
  });

  it("reports projection chains and stabilization", () => {
    const lines = renderReport(
      parseReport({
        command: "pp",
        version: "0.1.0",
        verdict: "ok",
        input: INPUT,
        ambient: 6,
        projections: [
          { sigma: 0, dim: 4 },
          { sigma: 1, dim: 3 },
        ],
        stabilized: false,
      }),
    );
    const text = lines.join("\n");
    expect(text).toContain("ambient dimension: 6");
    expect(text).toContain("sigma=0:4 -> sigma=1:3");
    expect(text).toContain("stabilized: no");
  });
});
