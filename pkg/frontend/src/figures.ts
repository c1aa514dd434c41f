/**
 * The four figure kinds rendered from experiment outputs:
 *
 * - phase:       trajectory projections with the certification region overlay
 * - eigencloud:  Jacobian eigenvalues sampled over a region, split line at -lambda
 * - nyquist:     shifted-axis locus family with the critical point marker
 * - feasibility: certificate check points shaded over the region
 *
 * Pixel positions are affine in the input values (one linear scale per axis);
 * rendering never filters, smooths, or reorders the numbers it is given.
 */

import { SchemaError, column, readCsv, readJson } from "./csv.js";
import { Frame, extent, padded } from "./svg.js";

export const STYLE = {
  trajectory: "#2166ac",
  attractorSweep: "#9a9a9a",
  region: "#cc2222",
  eigen: "#2166ac",
  splitLine: "#cc2222",
  locus: "#2166ac",
  critical: "#cc2222",
  feasible: "#555555",
  violating: "#cc2222",
};

export interface TrajectoryLayer {
  path: string;
  coords?: [number, number];
  color?: string;
  label?: string;
}

interface RegionData {
  polytope: Array<[number, number]>;
  polyCoords: [number, number];
  xBox: Map<number, [number, number]>;
}

function asRegion(raw: unknown, path: string): RegionData {
  const node = raw as Record<string, unknown>;
  const verts = node["z_polytope"];
  if (!Array.isArray(verts) || verts.length === 0) {
    throw new SchemaError(`${path}: missing column z_polytope in region`);
  }
  const xBox = new Map<number, [number, number]>();
  for (const [key, iv] of Object.entries((node["x_box"] ?? {}) as Record<string, [number, number]>)) {
    xBox.set(Number(key), [iv[0], iv[1]]);
  }
  return {
    polytope: verts as Array<[number, number]>,
    polyCoords: ((node["poly_coords"] as [number, number]) ?? [0, 1]),
    xBox,
  };
}

/** Region payloads appear bare, under "region", or inside a certificate. */
export function readRegion(path: string): RegionData {
  const raw = readJson(path) as Record<string, unknown>;
  if (raw["z_polytope"] !== undefined) return asRegion(raw, path);
  if (raw["region"] !== undefined) {
    const r = raw["region"] as Record<string, unknown>;
    return asRegion(r["region"] ?? r, path);
  }
  if (raw["certificate"] !== undefined) {
    return asRegion((raw["certificate"] as Record<string, unknown>)["region"], path);
  }
  throw new SchemaError(`${path}: no region payload found`);
}

interface CertificateData {
  region: RegionData;
  checkedPoints: number[][];
}

export function readCertificate(path: string): CertificateData {
  const raw = readJson(path) as Record<string, unknown>;
  const cert = (raw["certificate"] ?? raw) as Record<string, unknown>;
  if (cert["region"] === undefined || cert["checked_points"] === undefined) {
    throw new SchemaError(`${path}: missing column region/checked_points in certificate`);
  }
  return {
    region: asRegion(cert["region"] as Record<string, unknown>, path),
    checkedPoints: cert["checked_points"] as number[][],
  };
}

function overlayRegion(frame: Frame, region: RegionData, coords: [number, number]): void {
  const [c0, c1] = coords;
  const [p0, p1] = region.polyCoords;
  if (c0 === p0 && c1 === p1) {
    frame.polygon(
      region.polytope.map((v) => v[0]),
      region.polytope.map((v) => v[1]),
      STYLE.region,
    );
    return;
  }
  const b0 = region.xBox.get(c0);
  const b1 = region.xBox.get(c1);
  if (b0 && b1) {
    frame.polygon([b0[0], b0[1], b0[1], b0[0]], [b1[0], b1[0], b1[1], b1[1]], STYLE.region);
  }
}

function regionExtent(region: RegionData, coords: [number, number]): [number[], number[]] {
  const [c0, c1] = coords;
  const [p0, p1] = region.polyCoords;
  if (c0 === p0 && c1 === p1) {
    return [region.polytope.map((v) => v[0]), region.polytope.map((v) => v[1])];
  }
  const b0 = region.xBox.get(c0);
  const b1 = region.xBox.get(c1);
  return [b0 ? [...b0] : [], b1 ? [...b1] : []];
}

export interface AxesOptions {
  title?: string;
  xlabel?: string;
  ylabel?: string;
  xrange?: [number, number];
  yrange?: [number, number];
}

export function renderPhase(
  trajectories: TrajectoryLayer[],
  regionPath: string | undefined,
  opts: AxesOptions,
): string {
  if (trajectories.length === 0) {
    throw new SchemaError("phase figure needs at least one trajectory");
  }
  const layers = trajectories.map((layer) => {
    const coords = layer.coords ?? [0, 1];
    const cols = [`xi_${coords[0] + 1}`, `xi_${coords[1] + 1}`];
    const table = readCsv(layer.path, ["t", ...cols]);
    return {
      xs: column(table, cols[0], layer.path),
      ys: column(table, cols[1], layer.path),
      color: layer.color ?? (trajectories.length > 1 ? STYLE.attractorSweep : STYLE.trajectory),
      label: layer.label,
      coords,
    };
  });
  const region = regionPath ? readRegion(regionPath) : undefined;
  const coords = layers[0].coords;
  const [rx, ry] = region ? regionExtent(region, coords) : [[], []];
  const xdom = opts.xrange ?? padded(extent(layers.flatMap((l) => l.xs).concat(rx)));
  const ydom = opts.yrange ?? padded(extent(layers.flatMap((l) => l.ys).concat(ry)));
  const frame = new Frame(xdom, ydom, opts);
  for (const layer of layers) {
    frame.polyline(layer.xs, layer.ys, layer.color, 1.1);
  }
  if (region) overlayRegion(frame, region, coords);
  const labeled = layers.filter((l) => l.label);
  if (labeled.length > 0) {
    frame.legend(labeled.map((l) => [l.label!, l.color]));
  }
  return frame.render();
}

export function renderEigencloud(spectrumPath: string, lambda: number, opts: AxesOptions): string {
  const table = readCsv(spectrumPath, ["which_vertex", "re_1", "im_1"]);
  const res: number[] = [];
  const ims: number[] = [];
  for (let i = 1; table.data.has(`re_${i}`); i++) {
    const re = column(table, `re_${i}`, spectrumPath);
    const im = column(table, `im_${i}`, spectrumPath);
    res.push(...re);
    ims.push(...im);
  }
  const xdom = opts.xrange ?? padded(extent(res.concat([-lambda, 0])));
  const ydom = opts.yrange ?? padded(extent(ims));
  const frame = new Frame(xdom, ydom, opts);
  frame.vline(-lambda, STYLE.splitLine);
  frame.dots(res, ims, STYLE.eigen);
  return frame.render();
}

interface LocusMeta {
  critical_point: [number, number];
}

export function renderNyquist(lociPaths: string[], sidecarPath: string, opts: AxesOptions): string {
  if (lociPaths.length === 0) {
    throw new SchemaError("nyquist figure needs at least one locus file");
  }
  const sidecar = readJson(sidecarPath) as Record<string, unknown>;
  const loci = sidecar["loci"] as LocusMeta[] | undefined;
  if (!loci || loci.length === 0) {
    throw new SchemaError(`${sidecarPath}: missing column loci in sidecar`);
  }
  const curves = lociPaths.map((p) => {
    const table = readCsv(p, ["omega", "re", "im"]);
    return { xs: column(table, "re", p), ys: column(table, "im", p) };
  });
  const criticals = new Map<string, [number, number]>();
  for (const meta of loci) {
    criticals.set(meta.critical_point.join(","), meta.critical_point);
  }
  const cx = [...criticals.values()].map((c) => c[0]);
  // the locus diverges near the contour poles, so default to a window sized
  // by the criticals rather than the raw extent
  const span = 4 * Math.max(1, ...cx.map(Math.abs));
  const xdom = opts.xrange ?? [Math.min(...cx) - span / 2, span / 2];
  const ydom = opts.yrange ?? [-span / 2, span / 2];
  const frame = new Frame(xdom, ydom, opts);
  for (const curve of curves) {
    frame.polyline(curve.xs, curve.ys, STYLE.locus, 1.0);
  }
  for (const c of criticals.values()) {
    frame.cross(c[0], c[1], STYLE.critical);
  }
  return frame.render();
}

export function renderFeasibility(
  certificatePath: string,
  coords: [number, number],
  opts: AxesOptions,
): string {
  const cert = readCertificate(certificatePath);
  const [c0, c1] = coords;
  const xs: number[] = [];
  const ys: number[] = [];
  const bad: Array<[number, number]> = [];
  for (const point of cert.checkedPoints) {
    // a checked point is [state..., residual_top_eigenvalue]
    const residual = point[point.length - 1];
    if (residual <= 0) {
      xs.push(point[c0]);
      ys.push(point[c1]);
    } else {
      bad.push([point[c0], point[c1]]);
    }
  }
  const [rx, ry] = regionExtent(cert.region, coords);
  const xdom = opts.xrange ?? padded(extent(xs.concat(bad.map((b) => b[0]), rx)));
  const ydom = opts.yrange ?? padded(extent(ys.concat(bad.map((b) => b[1]), ry)));
  const frame = new Frame(xdom, ydom, opts);
  frame.dots(xs, ys, STYLE.feasible, 2.6);
  for (const [bx, by] of bad) {
    frame.cross(bx, by, STYLE.violating, 4);
  }
  overlayRegion(frame, cert.region, coords);
  return frame.render();
}
