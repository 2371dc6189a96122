/** Typed view of the dualops --format json reports.
 *
 * The zod schemas below mirror report_schema.json from the Python
 * side field for field, including the per-command required sets, so a
 * report that validates here validates there and vice versa.  Parsing
 * is strict: unknown keys are rejected.
 */

import { z } from "zod";

const int = z.number().int();
const intOrNull = z.union([int, z.null()]);

export const shapeSchema = z.tuple([int, int]);

export const matrixSchema = z
  .object({
    shape: shapeSchema,
    order: intOrNull,
    rows: z.array(z.array(z.string())),
  })
  .strict();

export const maybeMatrixSchema = z.union([z.null(), matrixSchema]);

export const stepsSchema = z
  .object({
    input: maybeMatrixSchema,
    adjoint: maybeMatrixSchema,
    cc_adjoint: maybeMatrixSchema,
    parametrization: maybeMatrixSchema,
    cc_back: maybeMatrixSchema,
  })
  .strict();

export const torsionElementSchema = z
  .object({
    row: z.array(z.string()),
    annihilator: z.union([z.string(), z.null()]),
  })
  .strict();

export const dualityVerdictSchema = z.enum([
  "torsion_free",
  "has_torsion",
  "inconclusive",
]);

export const dualitySchema = z
  .object({
    verdict: dualityVerdictSchema,
    steps: stepsSchema,
    ranks: z.record(z.string(), intOrNull),
    bounds: z.record(z.string(), int),
    certified: z.record(z.string(), z.boolean()),
    torsion: z.array(torsionElementSchema),
    notes: z.array(z.string()),
  })
  .strict();

export const inputSchema = z
  .object({
    name: z.string(),
    kind: z.enum(["file", "registry"]),
    digest: z.string().regex(/^[0-9a-f]{12}$/),
    shape: shapeSchema,
    order: intOrNull,
    indep: z.array(z.string()),
    dep: z.array(z.string()),
    params: z.array(z.string()),
  })
  .strict();

export const checkSchema = z
  .object({
    name: z.string(),
    expected: z.string(),
    actual: z.string(),
    ok: z.boolean(),
  })
  .strict();

export const fixtureResultSchema = z
  .object({
    fixture: z.string(),
    description: z.string(),
    checks: z.array(checkSchema),
    failures: int,
  })
  .strict();

export const fixtureListingSchema = z
  .object({
    name: z.string(),
    description: z.string(),
  })
  .strict();

export const commandSchema = z.enum([
  "adjoint",
  "cc",
  "rank",
  "test",
  "test2",
  "param",
  "selfadjoint",
  "dims",
  "pp",
  "spencerize",
  "demo",
]);

export const verdictSchema = z.enum([
  "ok",
  "certified",
  "inconclusive",
  "torsion_free",
  "has_torsion",
  "reflexive",
  "torsion_free_not_reflexive",
  "self_adjoint",
  "not_self_adjoint",
  "mismatch",
]);

export const flagsSchema = z
  .object({
    max_order: intOrNull,
    seed: intOrNull,
    subst: z.record(z.string(), z.string()),
  })
  .strict();

export const tableRowSchema = z
  .object({
    r: int,
    jet_order: int,
    jet_dim: int,
    rank: int,
    solution_dim: int,
    symbol_dim: int,
  })
  .strict();

export const projectionSchema = z
  .object({
    sigma: int,
    dim: int,
  })
  .strict();

export const scalingsSchema = z
  .object({
    row: z.array(z.string()),
    col: z.array(z.string()),
  })
  .strict();

const reportBase = z
  .object({
    command: commandSchema,
    version: z.string(),
    verdict: verdictSchema,
    input: inputSchema.optional(),
    flags: flagsSchema.optional(),
    adjoint: maybeMatrixSchema.optional(),
    sys: z.string().optional(),
    generators: maybeMatrixSchema.optional(),
    bounds: z.record(z.string(), int).optional(),
    ranks: z.record(z.string(), intOrNull).optional(),
    rank: int.optional(),
    notes: z.array(z.string()).optional(),
    steps: stepsSchema.optional(),
    certified: z.record(z.string(), z.boolean()).optional(),
    torsion: z.array(torsionElementSchema).optional(),
    first: dualitySchema.optional(),
    second: z.union([z.null(), dualitySchema]).optional(),
    parametrization: maybeMatrixSchema.optional(),
    failed_step: z.string().optional(),
    scalings: scalingsSchema.optional(),
    defect: maybeMatrixSchema.optional(),
    table: z.array(tableRowSchema).optional(),
    jet_order: int.optional(),
    ambient: int.optional(),
    projections: z.array(projectionSchema).optional(),
    stabilized: z.boolean().optional(),
    prolong_order: int.optional(),
    closed: z.boolean().optional(),
    unknowns: z.array(z.string()).optional(),
    matrix: maybeMatrixSchema.optional(),
    fixtures: z
      .array(z.union([fixtureResultSchema, fixtureListingSchema]))
      .optional(),
    failures: int.optional(),
    wall_ms: int.min(0).optional(),
  })
  .strict();

/** Keys each command must carry, matching the schema's allOf chain. */
const REQUIRED_BY_COMMAND: Readonly<Record<string, readonly string[]>> = {
  test: ["input", "steps", "ranks", "bounds", "certified", "torsion"],
  test2: ["input", "first", "second"],
  cc: ["input", "generators", "bounds", "ranks"],
  adjoint: ["input", "adjoint", "sys"],
  selfadjoint: ["input", "scalings"],
  param: ["input", "parametrization"],
  dims: ["input", "table"],
  demo: ["fixtures"],
};

export const reportSchema = reportBase.superRefine((r, ctx) => {
  const needed = REQUIRED_BY_COMMAND[r.command] ?? [];
  for (const key of needed) {
    if ((r as Record<string, unknown>)[key] === undefined) {
      ctx.addIssue({
        code: "custom",
        path: [key],
        message: `${r.command} report requires ${key}`,
      });
    }
  }
});

export type Matrix = z.infer<typeof matrixSchema>;
export type MaybeMatrix = z.infer<typeof maybeMatrixSchema>;
export type Steps = z.infer<typeof stepsSchema>;
export type TorsionElement = z.infer<typeof torsionElementSchema>;
export type Duality = z.infer<typeof dualitySchema>;
export type InputInfo = z.infer<typeof inputSchema>;
export type Check = z.infer<typeof checkSchema>;
export type FixtureResult = z.infer<typeof fixtureResultSchema>;
export type FixtureListing = z.infer<typeof fixtureListingSchema>;
export type TableRow = z.infer<typeof tableRowSchema>;
export type Report = z.infer<typeof reportSchema>;

export function parseReport(data: unknown): Report {
  return reportSchema.parse(data);
}

export function safeParseReport(data: unknown): ReturnType<typeof reportSchema.safeParse> {
  return reportSchema.safeParse(data);
}

export function isFixtureResult(
  f: FixtureResult | FixtureListing,
): f is FixtureResult {
  return "fixture" in f;
}
