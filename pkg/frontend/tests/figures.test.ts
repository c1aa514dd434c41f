import { mkdtempSync, readdirSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { SchemaError } from "../src/csv.js";
import { renderEigencloud, renderNyquist, renderPhase } from "../src/figures.js";
import { loadSpec, render } from "../src/spec.js";

const FIGSPECS = join(__dirname, "..", "figspecs");
const specNames = readdirSync(FIGSPECS)
  .filter((n) => n.endsWith(".json"))
  .sort();

describe("bundled figure specs", () => {
  it("cover every bundled scenario family", () => {
    // regulation, both oscillatory regimes, all four saturating loops,
    // both uncertainty sweeps, and the all-sequestration feasibility views
    expect(specNames.length).toBeGreaterThanOrEqual(15);
  });

  for (const name of specNames) {
    it(`renders ${name} deterministically`, () => {
      const spec = loadSpec(join(FIGSPECS, name));
      const first = render(spec);
      expect(first.startsWith("<svg ")).toBe(true);
      expect(first).toContain("</svg>");
      expect(first).not.toContain("NaN");
      expect(render(loadSpec(join(FIGSPECS, name)))).toBe(first);
    });
  }
});

describe("schema failures", () => {
  it("names a missing trajectory column", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const bad = join(dir, "traj.csv");
    writeFileSync(bad, "t,xi_1\n0,1\n1,2\n");
    expect(() => renderPhase([{ path: bad, coords: [0, 1] }], undefined, {})).toThrowError(
      /missing column xi_2/,
    );
  });

  it("names a missing spectrum column", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const bad = join(dir, "spectrum.csv");
    writeFileSync(bad, "which_vertex,re_1\n0,1\n");
    expect(() => renderEigencloud(bad, 0.0, {})).toThrowError(/missing column im_1/);
  });

  it("rejects an empty trajectory file", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const bad = join(dir, "traj.csv");
    writeFileSync(bad, "t,xi_1,xi_2\n");
    expect(() => renderPhase([{ path: bad }], undefined, {})).toThrowError(SchemaError);
  });

  it("rejects a sidecar without loci", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const locus = join(dir, "locus.csv");
    writeFileSync(locus, "omega,re,im\n0,1,0\n1,0.5,0.2\n");
    const sidecar = join(dir, "sidecar.json");
    writeFileSync(sidecar, JSON.stringify({ lambda: 0 }));
    expect(() => renderNyquist([locus], sidecar, {})).toThrowError(/missing column loci/);
  });

  it("rejects an unknown figure kind", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const spec = join(dir, "spec.json");
    writeFileSync(spec, JSON.stringify({ kind: "pie" }));
    expect(() => loadSpec(spec)).toThrowError(/kind must be one of/);
  });

  it("rejects a spec referencing a missing file", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const spec = join(dir, "spec.json");
    writeFileSync(
      spec,
      JSON.stringify({ kind: "phase", trajectories: [{ path: "gone.csv" }] }),
    );
    expect(() => loadSpec(spec)).toThrowError(/does not exist/);
  });
});

describe("figure content", () => {
  it("phase overlays the region polygon in the region style", () => {
    const spec = loadSpec(join(FIGSPECS, "regulation_phase.json"));
    const svg = render(spec);
    expect(svg).toContain('stroke="#cc2222"');
    expect((svg.match(/<polyline/g) ?? []).length).toBe(1);
    expect((svg.match(/<polygon/g) ?? []).length).toBe(1);
  });

  it("uncertainty sweep draws three attractors", () => {
    const spec = loadSpec(join(FIGSPECS, "robust_eta_theta2_4_sweep_phase.json"));
    const svg = render(spec);
    expect((svg.match(/<polyline/g) ?? []).length).toBeGreaterThanOrEqual(3);
  });

  it("eigencloud draws the split line at -lambda", () => {
    const spec = loadSpec(join(FIGSPECS, "cycle_eigencloud_theta2_4.json"));
    const svg = render(spec);
    expect(svg).toContain("stroke-dasharray");
    expect((svg.match(/<circle/g) ?? []).length).toBeGreaterThan(50);
  });

  it("nyquist marks the critical point", () => {
    const spec = loadSpec(join(FIGSPECS, "cycle_nyquist_theta2_4.json"));
    const svg = render(spec);
    expect(svg).toContain('<path d="M ');
  });

  it("feasibility shades every checked point", () => {
    const spec = loadSpec(join(FIGSPECS, "allseq_feasibility_z.json"));
    const svg = render(spec);
    expect((svg.match(/<circle/g) ?? []).length).toBeGreaterThan(100);
  });
});
