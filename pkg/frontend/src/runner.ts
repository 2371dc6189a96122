/** Spawn the dualops CLI and hand back validated reports.
 *
 * The binary is resolved from DUALOPS_BIN when set, otherwise PATH.
 * Exit code 0 means a definite verdict, 2 an honest inconclusive, 1
 * an error; json mode still writes a report for 0 and 2.
 */

import { execFile } from "node:child_process";
import { parseReport, type Report } from "./report.js";

export interface RunResult {
  readonly code: number;
  readonly stdout: string;
  readonly stderr: string;
}

export function dualopsBin(): string {
  const bin = process.env["DUALOPS_BIN"];
  return bin !== undefined && bin !== "" ? bin : "dualops";
}

export function runRaw(args: readonly string[]): Promise<RunResult> {
  return new Promise((resolve, reject) => {
    execFile(
      dualopsBin(),
      args,
      { maxBuffer: 64 * 1024 * 1024 },
      (err, stdout, stderr) => {
        if (err === null) {
          resolve({ code: 0, stdout, stderr });
          return;
        }
        const code = (err as NodeJS.ErrnoException & { code?: unknown }).code;
        if (typeof code === "number") {
          resolve({ code, stdout, stderr });
          return;
        }
        reject(
          new Error(
            `failed to launch ${dualopsBin()}: ${String(code ?? err.message)}`,
          ),
        );
      },
    );
  });
}

export interface JsonRun {
  readonly code: number;
  readonly report: Report;
  readonly stderr: string;
}

/** Run one subcommand with --format json appended and validate the report.
 * Throws on exit code 1 (no report is promised there). */
export async function runJson(args: readonly string[]): Promise<JsonRun> {
  const res = await runRaw([...args, "--format", "json"]);
  if (res.code !== 0 && res.code !== 2) {
    throw new Error(
      `dualops ${args.join(" ")} exited ${res.code}: ${res.stderr.trim()}`,
    );
  }
  let data: unknown;
  try {
    data = JSON.parse(res.stdout);
  } catch (e) {
    throw new Error(`dualops ${args.join(" ")} wrote invalid JSON: ${String(e)}`);
  }
  return { code: res.code, report: parseReport(data), stderr: res.stderr };
}
