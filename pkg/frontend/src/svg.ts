/**
 * Minimal deterministic SVG plotting surface: affine data-to-pixel scales,
 * axis ticks, polylines, polygons, and markers. No DOM, no randomness, no
 * timestamps; numbers are formatted with fixed precision so identical
 * inputs yield identical bytes.
 */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

/** Tick step of the form {1, 2, 5} * 10^k giving roughly `count` ticks. */
export function tickStep(lo: number, hi: number, count: number): number {
  const span = Math.abs(hi - lo) || 1;
  const raw = span / Math.max(1, count);
  const power = Math.floor(Math.log10(raw));
  const base = Math.pow(10, power);
  const err = raw / base;
  const factor = err >= Math.sqrt(50) ? 10 : err >= Math.sqrt(10) ? 5 : err >= Math.sqrt(2) ? 2 : 1;
  return factor * base;
}

export function ticks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) return [lo];
  const step = tickStep(lo, hi, count);
  const i0 = Math.ceil(lo / step - 1e-9);
  const i1 = Math.floor(hi / step + 1e-9);
  const out: number[] = [];
  for (let i = i0; i <= i1; i++) {
    out.push(i === 0 ? 0 : i * step);
  }
  return out;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  return lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi];
}

export function padded(ext: [number, number], frac = 0.06): [number, number] {
  const pad = (ext[1] - ext[0]) * frac;
  return [ext[0] - pad, ext[1] + pad];
}

const px = (v: number): string => v.toFixed(2);

export function fmtTick(v: number): string {
  const s = Number(v.toPrecision(6));
  return String(s);
}

export interface FrameOptions {
  width?: number;
  height?: number;
  title?: string;
  xlabel?: string;
  ylabel?: string;
}

const MARGIN = { left: 62, right: 18, top: 36, bottom: 48 };

/** A plotting frame with data-space drawing primitives. */
export class Frame {
  readonly width: number;
  readonly height: number;
  readonly x: Scale;
  readonly y: Scale;
  private body: string[] = [];
  private readonly opts: FrameOptions;

  constructor(xdomain: [number, number], ydomain: [number, number], opts: FrameOptions = {}) {
    this.opts = opts;
    this.width = opts.width ?? 640;
    this.height = opts.height ?? 480;
    this.x = linearScale(xdomain, [MARGIN.left, this.width - MARGIN.right]);
    this.y = linearScale(ydomain, [this.height - MARGIN.bottom, MARGIN.top]);
  }

  polyline(xs: number[], ys: number[], stroke: string, width = 1.2, dash = ""): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      pts.push(`${px(this.x(xs[i]))},${px(this.y(ys[i]))}`);
    }
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.body.push(
      `<polyline fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr} points="${pts.join(" ")}"/>`,
    );
  }

  polygon(xs: number[], ys: number[], stroke: string, fill = "none", width = 1.6): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      pts.push(`${px(this.x(xs[i]))},${px(this.y(ys[i]))}`);
    }
    this.body.push(
      `<polygon fill="${fill}" stroke="${stroke}" stroke-width="${width}" points="${pts.join(" ")}"/>`,
    );
  }

  dots(xs: number[], ys: number[], fill: string, r = 2.2): void {
    for (let i = 0; i < xs.length; i++) {
      this.body.push(`<circle cx="${px(this.x(xs[i]))}" cy="${px(this.y(ys[i]))}" r="${r}" fill="${fill}"/>`);
    }
  }

  cross(xd: number, yd: number, stroke: string, size = 5): void {
    const cx = this.x(xd);
    const cy = this.y(yd);
    this.body.push(
      `<path d="M ${px(cx - size)} ${px(cy)} H ${px(cx + size)} M ${px(cx)} ${px(cy - size)} V ${px(cy + size)}" stroke="${stroke}" stroke-width="1.6"/>`,
    );
  }

  vline(xd: number, stroke: string, dash = "4 3"): void {
    const X = px(this.x(xd));
    this.body.push(
      `<line x1="${X}" y1="${px(this.y.range[1])}" x2="${X}" y2="${px(this.y.range[0])}" stroke="${stroke}" stroke-dasharray="${dash}" stroke-width="1"/>`,
    );
  }

  hline(yd: number, stroke: string, dash = "4 3"): void {
    const Y = px(this.y(yd));
    this.body.push(
      `<line x1="${px(this.x.range[0])}" y1="${Y}" x2="${px(this.x.range[1])}" y2="${Y}" stroke="${stroke}" stroke-dasharray="${dash}" stroke-width="1"/>`,
    );
  }

  legend(entries: Array<[string, string]>): void {
    let y = MARGIN.top + 6;
    for (const [label, color] of entries) {
      const x0 = this.width - MARGIN.right - 120;
      this.body.push(
        `<line x1="${px(x0)}" y1="${px(y)}" x2="${px(x0 + 18)}" y2="${px(y)}" stroke="${color}" stroke-width="2"/>`,
        `<text x="${px(x0 + 24)}" y="${px(y + 4)}" font-size="11" fill="#333">${escapeXml(label)}</text>`,
      );
      y += 16;
    }
  }

  private axes(): string[] {
    const out: string[] = [];
    const [x0, x1] = this.x.range;
    const [y0, y1] = this.y.range;
    out.push(
      `<rect x="${px(x0)}" y="${px(y1)}" width="${px(x1 - x0)}" height="${px(y0 - y1)}" fill="none" stroke="#222" stroke-width="1"/>`,
    );
    for (const t of ticks(this.x.domain[0], this.x.domain[1])) {
      const X = px(this.x(t));
      out.push(
        `<line x1="${X}" y1="${px(y0)}" x2="${X}" y2="${px(y0 + 5)}" stroke="#222" stroke-width="1"/>`,
        `<text x="${X}" y="${px(y0 + 18)}" font-size="11" text-anchor="middle" fill="#222">${fmtTick(t)}</text>`,
      );
    }
    for (const t of ticks(this.y.domain[0], this.y.domain[1])) {
      const yPix = this.y(t);
      out.push(
        `<line x1="${px(x0 - 5)}" y1="${px(yPix)}" x2="${px(x0)}" y2="${px(yPix)}" stroke="#222" stroke-width="1"/>`,
        `<text x="${px(x0 - 8)}" y="${px(yPix + 4)}" font-size="11" text-anchor="end" fill="#222">${fmtTick(t)}</text>`,
      );
    }
    if (this.opts.title) {
      out.push(
        `<text x="${px((x0 + x1) / 2)}" y="${px(MARGIN.top - 14)}" font-size="14" text-anchor="middle" fill="#000">${escapeXml(this.opts.title)}</text>`,
      );
    }
    if (this.opts.xlabel) {
      out.push(
        `<text x="${px((x0 + x1) / 2)}" y="${px(y0 + 36)}" font-size="12" text-anchor="middle" fill="#000">${escapeXml(this.opts.xlabel)}</text>`,
      );
    }
    if (this.opts.ylabel) {
      const X = px(x0 - 44);
      const Y = px((y0 + y1) / 2);
      out.push(
        `<text x="${X}" y="${Y}" font-size="12" text-anchor="middle" fill="#000" transform="rotate(-90 ${X} ${Y})">${escapeXml(this.opts.ylabel)}</text>`,
      );
    }
    return out;
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${this.width}" height="${this.height}" fill="#ffffff"/>`,
      ...this.axes(),
      ...this.body,
      `</svg>`,
      ``,
    ].join("\n");
  }
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
