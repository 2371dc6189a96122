#!/usr/bin/env node
/** Command line front end: format and hash .sys declarations locally,
 * run dualops subcommands and render the JSON reports for reading.
 * Argument handling sticks to node:util parseArgs. */

import { readFile, writeFile } from "node:fs/promises";
import { parseArgs } from "node:util";
import { digest, parse, toText, SysError, type SystemDecl } from "./sys.js";
import { renderReport } from "./render.js";
import { runJson } from "./runner.js";

const USAGE = `usage: dualops-front <command> [options]

commands:
  fmt <file> [--check | --write]   print the canonical form of a .sys file
  digest <file>                    print its 12 hex digit content digest
  info <file>                      summarize names, shape and digest
  run <subcommand> [source] [...]  run dualops and render the json report
                                   (forwards --max-order, --seed, --subst,
                                    --timing, --list, --all)
`;

async function loadDecl(path: string): Promise<{ text: string; decl: SystemDecl }> {
  const text = await readFile(path, "utf8");
  return { text, decl: parse(text) };
}

function reportError(path: string, e: unknown): void {
  if (e instanceof SysError) {
    process.stderr.write(`${path}:${e.line}:${e.col}: ${e.detail}\n`);
  } else {
    process.stderr.write(`${path}: ${String(e instanceof Error ? e.message : e)}\n`);
  }
  process.exitCode = 1;
}

function need(positionals: string[], what: string): string {
  const v = positionals[0];
  if (v === undefined) {
    process.stderr.write(`missing ${what}\n${USAGE}`);
    process.exitCode = 1;
    return "";
  }
  return v;
}

async function cmdFmt(rest: string[]): Promise<void> {
  const { values, positionals } = parseArgs({
    args: rest,
    options: {
      check: { type: "boolean", default: false },
      write: { type: "boolean", default: false },
    },
    allowPositionals: true,
  });
  const file = need(positionals, "a .sys file");
  if (file === "") {
    return;
  }
  try {
    const { text, decl } = await loadDecl(file);
    const canon = toText(decl);
    if (values.check) {
      if (text !== canon) {
        process.stderr.write(`${file}: not canonical\n`);
        process.exitCode = 1;
      }
      return;
    }
    if (values.write) {
      if (text !== canon) {
        await writeFile(file, canon, "utf8");
      }
      return;
    }
    process.stdout.write(canon);
  } catch (e) {
    reportError(file, e);
  }
}

async function cmdDigest(rest: string[]): Promise<void> {
  const { positionals } = parseArgs({ args: rest, options: {}, allowPositionals: true });
  const file = need(positionals, "a .sys file");
  if (file === "") {
    return;
  }
  try {
    const { decl } = await loadDecl(file);
    process.stdout.write(digest(decl) + "\n");
  } catch (e) {
    reportError(file, e);
  }
}

async function cmdInfo(rest: string[]): Promise<void> {
  const { positionals } = parseArgs({ args: rest, options: {}, allowPositionals: true });
  const file = need(positionals, "a .sys file");
  if (file === "") {
    return;
  }
  try {
    const { decl } = await loadDecl(file);
    const lines = [
      `system ${decl.name}`,
      `digest ${digest(decl)}`,
      `params ${decl.params.join(", ") || "(none)"}`,
      `indep ${decl.indep.join(", ")}`,
      `dep ${decl.dep.join(", ")}`,
      `equations ${decl.eqNames.length} (${decl.eqNames.join(", ")})`,
      `shape ${decl.rows.length}x${decl.dep.length}`,
    ];
    process.stdout.write(lines.join("\n") + "\n");
  } catch (e) {
    reportError(file, e);
  }
}

async function cmdRun(rest: string[]): Promise<void> {
  const { values, positionals } = parseArgs({
    args: rest,
    options: {
      "max-order": { type: "string" },
      seed: { type: "string" },
      subst: { type: "string", multiple: true },
      timing: { type: "boolean", default: false },
      list: { type: "boolean", default: false },
      all: { type: "boolean", default: false },
    },
    allowPositionals: true,
  });
  const sub = need(positionals, "a dualops subcommand");
  if (sub === "") {
    return;
  }
  const args: string[] = [sub, ...positionals.slice(1)];
  if (values["max-order"] !== undefined) {
    args.push("--max-order", values["max-order"]);
  }
  if (values.seed !== undefined) {
    args.push("--seed", values.seed);
  }
  for (const s of values.subst ?? []) {
    args.push("--subst", s);
  }
  if (values.timing) {
    args.push("--timing");
  }
  if (values.list) {
    args.push("--list");
  }
  if (values.all) {
    args.push("--all");
  }
  try {
    const res = await runJson(args);
    process.stdout.write(renderReport(res.report).join("\n") + "\n");
    process.exitCode = res.code;
  } catch (e) {
    process.stderr.write(String(e instanceof Error ? e.message : e) + "\n");
    process.exitCode = 1;
  }
}

async function main(): Promise<void> {
  const argv = process.argv.slice(2);
  const cmd = argv[0];
  const rest = argv.slice(1);
  switch (cmd) {
    case "fmt":
      await cmdFmt(rest);
      break;
    case "digest":
      await cmdDigest(rest);
      break;
    case "info":
      await cmdInfo(rest);
      break;
    case "run":
      await cmdRun(rest);
      break;
    case "--help":
    case "-h":
    case "help":
    case undefined:
      process.stdout.write(USAGE);
      if (cmd === undefined) {
        process.exitCode = 1;
      }
      break;
    default:
      process.stderr.write(`unknown command ${cmd}\n${USAGE}`);
      process.exitCode = 1;
  }
}

main().catch((e) => {
  process.stderr.write(String(e) + "\n");
  process.exitCode = 1;
});
