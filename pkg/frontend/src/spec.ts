/**
 * Figure specifications: one JSON file per figure, naming the input files
 * (relative to the spec file), the plot kind, and axis settings.
 */

import { existsSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { SchemaError, readJson } from "./csv.js";
import {
  AxesOptions,
  TrajectoryLayer,
  renderEigencloud,
  renderFeasibility,
  renderNyquist,
  renderPhase,
} from "./figures.js";

export type FigureKind = "phase" | "eigencloud" | "nyquist" | "feasibility";

export interface FigureSpec {
  kind: FigureKind;
  title?: string;
  xlabel?: string;
  ylabel?: string;
  xrange?: [number, number];
  yrange?: [number, number];
  out?: string;
  trajectories?: TrajectoryLayer[];
  region?: string;
  spectrum?: string;
  lambda?: number;
  loci?: string[];
  sidecar?: string;
  certificate?: string;
  coords?: [number, number];
}

const KINDS: FigureKind[] = ["phase", "eigencloud", "nyquist", "feasibility"];

function requireFile(path: string, what: string): string {
  if (!existsSync(path)) {
    throw new SchemaError(`${what}: referenced file does not exist: ${path}`);
  }
  return path;
}

export function loadSpec(path: string): FigureSpec {
  const raw = readJson(path) as FigureSpec;
  if (!KINDS.includes(raw.kind)) {
    throw new SchemaError(`${path}: kind must be one of ${KINDS.join(", ")}, got ${raw.kind}`);
  }
  const base = dirname(resolve(path));
  const abs = (p: string): string => resolve(base, p);
  if (raw.trajectories) {
    raw.trajectories = raw.trajectories.map((t) => ({ ...t, path: requireFile(abs(t.path), path) }));
  }
  for (const key of ["region", "spectrum", "sidecar", "certificate"] as const) {
    if (raw[key] !== undefined) {
      raw[key] = requireFile(abs(raw[key]!), path);
    }
  }
  if (raw.loci) {
    raw.loci = raw.loci.map((p) => requireFile(abs(p), path));
  }
  return raw;
}

export function render(spec: FigureSpec): string {
  const axes: AxesOptions = {
    title: spec.title,
    xlabel: spec.xlabel,
    ylabel: spec.ylabel,
    xrange: spec.xrange,
    yrange: spec.yrange,
  };
  switch (spec.kind) {
    case "phase":
      if (!spec.trajectories) throw new SchemaError("phase spec needs trajectories");
      return renderPhase(spec.trajectories, spec.region, axes);
    case "eigencloud":
      if (!spec.spectrum) throw new SchemaError("eigencloud spec needs a spectrum file");
      if (spec.lambda === undefined) throw new SchemaError("eigencloud spec needs lambda");
      return renderEigencloud(spec.spectrum, spec.lambda, axes);
    case "nyquist":
      if (!spec.loci || !spec.sidecar) throw new SchemaError("nyquist spec needs loci and sidecar");
      return renderNyquist(spec.loci, spec.sidecar, axes);
    case "feasibility":
      if (!spec.certificate) throw new SchemaError("feasibility spec needs a certificate");
      return renderFeasibility(spec.certificate, spec.coords ?? [0, 1], axes);
  }
}
