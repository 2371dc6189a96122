/** Turn a validated report into compact human-readable lines. */

import {
  isFixtureResult,
  type Duality,
  type InputInfo,
  type MaybeMatrix,
  type Report,
  type Steps,
  type TorsionElement,
} from "./report.js";

function matrixLines(label: string, m: MaybeMatrix, indent = "  "): string[] {
  if (m === null) {
    return [`${indent}${label}: (none)`];
  }
  const [p, q] = m.shape;
  const head = `${indent}${label}: ${p}x${q}` + (m.order === null ? "" : `, order ${m.order}`);
  const out = [head];
  m.rows.forEach((row, i) => {
    out.push(`${indent}  [${i + 1}]  ${row.join("  |  ")}`);
  });
  return out;
}

function inputLines(input: InputInfo): string[] {
  const [p, q] = input.shape;
  const order = input.order === null ? "?" : String(input.order);
  return [
    `input ${input.name} (${input.kind}, digest ${input.digest})`,
    `  shape ${p}x${q}, order ${order}`,
    `  indep ${input.indep.join(", ") || "(none)"}; dep ${input.dep.join(", ") || "(none)"}` +
      (input.params.length > 0 ? `; params ${input.params.join(", ")}` : ""),
  ];
}

function stepLines(steps: Steps): string[] {
  const out = ["steps:"];
  const order: Array<[string, MaybeMatrix]> = [
    ["input", steps.input],
    ["adjoint", steps.adjoint],
    ["cc_adjoint", steps.cc_adjoint],
    ["parametrization", steps.parametrization],
    ["cc_back", steps.cc_back],
  ];
  for (const [label, m] of order) {
    if (m === null) {
      out.push(`  ${label}: (not reached)`);
    } else {
      const [p, q] = m.shape;
      out.push(`  ${label}: ${p}x${q}` + (m.order === null ? "" : `, order ${m.order}`));
    }
  }
  return out;
}

function torsionLines(torsion: readonly TorsionElement[]): string[] {
  if (torsion.length === 0) {
    return [];
  }
  const out = [`torsion witnesses (${torsion.length}):`];
  torsion.forEach((t, i) => {
    const ann = t.annihilator === null ? "none recorded" : t.annihilator;
    out.push(`  [${i + 1}] row (${t.row.join(", ")})  annihilated by ${ann}`);
  });
  return out;
}

function recordLines(label: string, rec: Record<string, unknown> | undefined): string[] {
  if (rec === undefined) {
    return [];
  }
  const keys = Object.keys(rec);
  if (keys.length === 0) {
    return [];
  }
  const body = keys
    .sort()
    .map((k) => `${k}=${rec[k] === null ? "?" : String(rec[k])}`)
    .join(", ");
  return [`${label}: ${body}`];
}

function dualityLines(label: string, d: Duality): string[] {
  const out = [`${label}: ${d.verdict}`];
  out.push(...stepLines(d.steps).map((s) => "  " + s));
  out.push(...recordLines("  ranks", d.ranks));
  out.push(...torsionLines(d.torsion).map((s) => "  " + s));
  for (const note of d.notes) {
    out.push(`  note: ${note}`);
  }
  return out;
}

export function renderReport(r: Report): string[] {
  const out: string[] = [`${r.command}: ${r.verdict}`];
  if (r.input !== undefined) {
    out.push(...inputLines(r.input));
  }
  switch (r.command) {
    case "test":
      if (r.steps !== undefined) {
        out.push(...stepLines(r.steps));
      }
      out.push(...recordLines("ranks", r.ranks));
      out.push(...recordLines("bounds", r.bounds));
      out.push(...recordLines("certified", r.certified));
      if (r.torsion !== undefined) {
        out.push(...torsionLines(r.torsion));
      }
      break;
    case "test2":
      if (r.first !== undefined) {
        out.push(...dualityLines("first pass", r.first));
      }
      if (r.second !== undefined && r.second !== null) {
        out.push(...dualityLines("second pass", r.second));
      } else if (r.second === null) {
        out.push("second pass: skipped");
      }
      break;
    case "cc":
      if (r.generators !== undefined) {
        out.push(...matrixLines("compatibility conditions", r.generators, ""));
      }
      out.push(...recordLines("ranks", r.ranks));
      out.push(...recordLines("bounds", r.bounds));
      break;
    case "adjoint":
      if (r.adjoint !== undefined) {
        out.push(...matrixLines("adjoint", r.adjoint, ""));
      }
      break;
    case "param":
      if (r.parametrization !== undefined) {
        out.push(...matrixLines("parametrization", r.parametrization, ""));
      }
      if (r.failed_step !== undefined) {
        out.push(`failed at: ${r.failed_step}`);
      }
      break;
    case "selfadjoint":
      if (r.scalings !== undefined) {
        out.push(`row scalings: ${r.scalings.row.join(", ") || "(none)"}`);
        out.push(`col scalings: ${r.scalings.col.join(", ") || "(none)"}`);
      }
      if (r.defect !== undefined && r.defect !== null) {
        out.push(...matrixLines("defect", r.defect, ""));
      }
      break;
    case "dims":
      if (r.table !== undefined) {
        out.push("r  jet_order  jet_dim  rank  solution_dim  symbol_dim");
        for (const row of r.table) {
          out.push(
            [row.r, row.jet_order, row.jet_dim, row.rank, row.solution_dim, row.symbol_dim]
              .map(String)
              .join("  "),
          );
        }
      }
      break;
    case "pp":
      if (r.ambient !== undefined) {
        out.push(`ambient dimension: ${r.ambient}`);
      }
      if (r.projections !== undefined) {
        out.push(
          "projection chain: " +
            r.projections.map((pr) => `sigma=${pr.sigma}:${pr.dim}`).join(" -> "),
        );
      }
      if (r.stabilized !== undefined) {
        out.push(`stabilized: ${r.stabilized ? "yes" : "no"}`);
      }
      break;
    case "spencerize":
      if (r.prolong_order !== undefined) {
        out.push(`prolongation order: ${r.prolong_order}`);
      }
      if (r.closed !== undefined) {
        out.push(`closed: ${r.closed ? "yes" : "no"}`);
      }
      if (r.unknowns !== undefined) {
        out.push(`unknowns (${r.unknowns.length}): ${r.unknowns.join(", ")}`);
      }
      if (r.matrix !== undefined) {
        out.push(...matrixLines("first order form", r.matrix, ""));
      }
      break;
    case "rank":
      if (r.rank !== undefined) {
        out.push(`rank: ${r.rank}`);
      }
      break;
    case "demo":
      if (r.fixtures !== undefined) {
        for (const f of r.fixtures) {
          if (isFixtureResult(f)) {
            const status = f.failures === 0 ? "ok" : `${f.failures} FAILED`;
            out.push(`${f.fixture}: ${status} (${f.checks.length} checks)`);
            for (const c of f.checks) {
              if (!c.ok) {
                out.push(`  ${c.name}: expected ${c.expected}, got ${c.actual}`);
              }
            }
          } else {
            out.push(`${f.name}: ${f.description}`);
          }
        }
      }
      if (r.failures !== undefined) {
        out.push(`total failures: ${r.failures}`);
      }
      break;
  }
  if (r.sys !== undefined) {
    out.push("canonical form:");
    for (const line of r.sys.replace(/\n$/, "").split("\n")) {
      out.push("  " + line);
    }
  }
  if (r.notes !== undefined) {
    for (const note of r.notes) {
      out.push(`note: ${note}`);
    }
  }
  if (r.wall_ms !== undefined) {
    out.push(`wall time: ${r.wall_ms} ms`);
  }
  return out;
}
