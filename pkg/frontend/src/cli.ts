/**
 * Figure renderer entry point.
 *
 *   node dist/cli.js render --spec figspecs/regulation_phase.json [--out fig.svg]
 *
 * One process per figure; exits nonzero with the offending file/column named
 * on any schema mismatch.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { SchemaError } from "./csv.js";
import { loadSpec, render } from "./spec.js";

function parseArgs(argv: string[]): { spec: string; out?: string } {
  if (argv[0] !== "render") {
    throw new SchemaError(`usage: render --spec <figspec.json> [--out <file.svg>]`);
  }
  let spec: string | undefined;
  let out: string | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new SchemaError(`missing value for ${key}`);
    if (key === "--spec") spec = value;
    else if (key === "--out") out = value;
    else throw new SchemaError(`unknown flag ${key}`);
  }
  if (!spec) throw new SchemaError("missing required flag --spec");
  return { spec, out };
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const spec = loadSpec(args.spec);
    const svg = render(spec);
    const out = args.out ?? spec.out;
    if (!out) throw new SchemaError(`${args.spec}: no output path (spec "out" or --out)`);
    const target = resolve(dirname(resolve(args.spec)), out);
    mkdirSync(dirname(target), { recursive: true });
    writeFileSync(target, svg);
    console.log(target);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exitCode = main(process.argv.slice(2));
