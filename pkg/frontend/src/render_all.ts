/** Render every figure spec under figspecs/ into build/figures/. */

import { readdirSync } from "node:fs";
import { mkdirSync, writeFileSync } from "node:fs";
import { basename, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import { loadSpec, render } from "./spec.js";

const root = resolve(fileURLToPath(new URL(".", import.meta.url)), "..");
const specsDir = join(root, "figspecs");
const outDir = join(root, "build", "figures");
mkdirSync(outDir, { recursive: true });

let failures = 0;
for (const name of readdirSync(specsDir).sort()) {
  if (!name.endsWith(".json")) continue;
  const specPath = join(specsDir, name);
  try {
    const svg = render(loadSpec(specPath));
    const target = join(outDir, basename(name, ".json") + ".svg");
    writeFileSync(target, svg);
    console.log(`rendered ${target}`);
  } catch (err) {
    console.error(`FAILED ${name}: ${(err as Error).message}`);
    failures += 1;
  }
}
process.exitCode = failures === 0 ? 0 : 1;
