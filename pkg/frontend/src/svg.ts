/**
 * Minimal SVG chart scaffolding shared by all figure kinds: linear and
 * log scales, tick generation, axes, series primitives, and annotations.
 * Output is plain SVG markup built as a string, so rendering the same
 * data twice yields byte-identical files.
 */

export interface ChartOptions {
  width: number;
  height: number;
  title: string;
  xLabel: string;
  yLabel: string;
  xDomain: [number, number];
  yDomain: [number, number];
  xLog?: boolean;
  yLog?: boolean;
  hideXTicks?: boolean;
}

export interface StrokeStyle {
  stroke: string;
  width?: number;
  dash?: string;
  opacity?: number;
}

export interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Round tick positions covering [min, max] with a 1/2/5 step. */
export function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

/** Powers of ten covering [min, max]; both endpoints must be positive. */
export function decadeTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(min) - 1e-9); Math.pow(10, e) <= max * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const mant = v / Math.pow(10, e);
    const m = Math.abs(mant - 1) < 1e-9 ? "1" : mant.toPrecision(2);
    return `${m}e${e}`;
  }
  return Number(v.toPrecision(6)).toString();
}

export class Chart {
  private readonly o: ChartOptions;
  private readonly ml = 64;
  private readonly mr = 20;
  private readonly mt = 34;
  private readonly mb = 48;
  private readonly body: string[] = [];
  private legendEntries: LegendEntry[] = [];
  private annotations: string[] = [];

  constructor(o: ChartOptions) {
    if (o.xDomain[0] >= o.xDomain[1] || o.yDomain[0] >= o.yDomain[1]) {
      throw new Error("chart domain must have positive extent");
    }
    if ((o.xLog && o.xDomain[0] <= 0) || (o.yLog && o.yDomain[0] <= 0)) {
      throw new Error("log axes need strictly positive domains");
    }
    this.o = o;
  }

  private get pw(): number {
    return this.o.width - this.ml - this.mr;
  }

  private get ph(): number {
    return this.o.height - this.mt - this.mb;
  }

  xOf(v: number): number {
    const [a, b] = this.o.xDomain;
    const t = this.o.xLog
      ? (Math.log(v) - Math.log(a)) / (Math.log(b) - Math.log(a))
      : (v - a) / (b - a);
    return this.ml + t * this.pw;
  }

  yOf(v: number): number {
    const [a, b] = this.o.yDomain;
    const t = this.o.yLog
      ? (Math.log(v) - Math.log(a)) / (Math.log(b) - Math.log(a))
      : (v - a) / (b - a);
    return this.mt + (1 - t) * this.ph;
  }

  polyline(xs: number[], ys: number[], style: StrokeStyle): void {
    if (xs.length !== ys.length || xs.length < 2) {
      throw new Error("polyline needs matching x/y arrays with at least two points");
    }
    const pts = xs.map((x, i) =>
      `${this.xOf(x).toFixed(2)},${this.yOf(ys[i] as number).toFixed(2)}`).join(" ");
    this.body.push(
      `<polyline clip-path="url(#plot)" fill="none" stroke="${style.stroke}"`
      + ` stroke-width="${style.width ?? 1}"`
      + (style.dash ? ` stroke-dasharray="${style.dash}"` : "")
      + (style.opacity !== undefined ? ` opacity="${style.opacity}"` : "")
      + ` points="${pts}"/>`);
  }

  dots(xs: number[], ys: number[], radius: number, fill: string): void {
    for (let i = 0; i < xs.length; i++) {
      this.body.push(
        `<circle clip-path="url(#plot)" cx="${this.xOf(xs[i] as number).toFixed(2)}"`
        + ` cy="${this.yOf(ys[i] as number).toFixed(2)}" r="${radius}" fill="${fill}"/>`);
    }
  }

  /** Short horizontal dash centered on a point; used for eigenvalue levels. */
  levelMark(x: number, y: number, halfWidth: number, style: StrokeStyle): void {
    const cx = this.xOf(x);
    const cy = this.yOf(y).toFixed(2);
    this.body.push(
      `<line clip-path="url(#plot)" x1="${(cx - halfWidth).toFixed(2)}" y1="${cy}"`
      + ` x2="${(cx + halfWidth).toFixed(2)}" y2="${cy}"`
      + ` stroke="${style.stroke}" stroke-width="${style.width ?? 2}"/>`);
  }

  hline(y: number, style: StrokeStyle): void {
    const yy = this.yOf(y).toFixed(2);
    this.body.push(
      `<line x1="${this.ml}" y1="${yy}" x2="${this.ml + this.pw}" y2="${yy}"`
      + ` stroke="${style.stroke}" stroke-width="${style.width ?? 1}"`
      + (style.dash ? ` stroke-dasharray="${style.dash}"` : "") + `/>`);
  }

  /** One line of annotation text in the upper right of the plot area. */
  annotate(text: string): void {
    this.annotations.push(text);
  }

  legend(entries: LegendEntry[]): void {
    this.legendEntries = entries;
  }

  render(): string {
    const { width: W, height: H, title, xLabel, yLabel } = this.o;
    const parts: string[] = [];
    parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}"`
      + ` font-family="Helvetica, Arial, sans-serif">`);
    parts.push(`<rect width="${W}" height="${H}" fill="#ffffff"/>`);
    parts.push(
      `<defs><clipPath id="plot"><rect x="${this.ml}" y="${this.mt}"`
      + ` width="${this.pw}" height="${this.ph}"/></clipPath></defs>`);
    parts.push(
      `<text x="${this.ml}" y="${this.mt - 12}" font-size="13" font-weight="600"`
      + ` fill="#222">${esc(title)}</text>`);

    const xTicks = this.o.hideXTicks ? []
      : this.o.xLog
        ? decadeTicks(this.o.xDomain[0], this.o.xDomain[1])
        : niceTicks(this.o.xDomain[0], this.o.xDomain[1], 6);
    const yTicks = this.o.yLog
      ? decadeTicks(this.o.yDomain[0], this.o.yDomain[1])
      : niceTicks(this.o.yDomain[0], this.o.yDomain[1], 6);

    for (const v of yTicks) {
      const y = this.yOf(v).toFixed(2);
      parts.push(
        `<line x1="${this.ml}" y1="${y}" x2="${this.ml + this.pw}" y2="${y}"`
        + ` stroke="#eeeeee" stroke-width="0.6"/>`);
    }
    for (const v of xTicks) {
      const x = this.xOf(v).toFixed(2);
      parts.push(
        `<line x1="${x}" y1="${this.mt}" x2="${x}" y2="${this.mt + this.ph}"`
        + ` stroke="#eeeeee" stroke-width="0.6"/>`);
    }

    parts.push(...this.body);

    const bot = this.mt + this.ph;
    parts.push(
      `<line x1="${this.ml}" y1="${this.mt}" x2="${this.ml}" y2="${bot}"`
      + ` stroke="#333333" stroke-width="0.8"/>`);
    parts.push(
      `<line x1="${this.ml}" y1="${bot}" x2="${this.ml + this.pw}" y2="${bot}"`
      + ` stroke="#333333" stroke-width="0.8"/>`);
    for (const v of xTicks) {
      const x = this.xOf(v).toFixed(2);
      parts.push(
        `<line x1="${x}" y1="${bot}" x2="${x}" y2="${bot + 4}"`
        + ` stroke="#333333" stroke-width="0.6"/>`);
      parts.push(
        `<text x="${x}" y="${bot + 15}" text-anchor="middle" font-size="9"`
        + ` fill="#555555">${esc(fmtTick(v))}</text>`);
    }
    for (const v of yTicks) {
      const y = this.yOf(v);
      parts.push(
        `<line x1="${this.ml - 4}" y1="${y.toFixed(2)}" x2="${this.ml}"`
        + ` y2="${y.toFixed(2)}" stroke="#333333" stroke-width="0.6"/>`);
      parts.push(
        `<text x="${this.ml - 7}" y="${(y + 3).toFixed(2)}" text-anchor="end"`
        + ` font-size="9" fill="#555555">${esc(fmtTick(v))}</text>`);
    }
    parts.push(
      `<text x="${this.ml + this.pw / 2}" y="${H - 8}" text-anchor="middle"`
      + ` font-size="11" fill="#333333">${esc(xLabel)}</text>`);
    const yc = this.mt + this.ph / 2;
    parts.push(
      `<text x="16" y="${yc}" text-anchor="middle" font-size="11" fill="#333333"`
      + ` transform="rotate(-90,16,${yc})">${esc(yLabel)}</text>`);

    let ay = this.mt + 16;
    for (const text of this.annotations) {
      parts.push(
        `<text class="annotation" x="${this.ml + this.pw - 8}" y="${ay}"`
        + ` text-anchor="end" font-size="11" fill="#222222">${esc(text)}</text>`);
      ay += 15;
    }

    if (this.legendEntries.length > 0) {
      let ly = ay + 4;
      const lx = this.ml + this.pw - 120;
      for (const e of this.legendEntries) {
        parts.push(
          `<line x1="${lx}" y1="${ly - 3}" x2="${lx + 18}" y2="${ly - 3}"`
          + ` stroke="${e.color}" stroke-width="2"`
          + (e.dash ? ` stroke-dasharray="${e.dash}"` : "") + `/>`);
        parts.push(
          `<text x="${lx + 23}" y="${ly}" font-size="10" fill="#444444">`
          + `${esc(e.label)}</text>`);
        ly += 14;
      }
    }

    parts.push(`</svg>`);
    return parts.join("\n") + "\n";
  }
}

/** Symmetric padding around a data interval, with a degenerate-range guard. */
export function padded(min: number, max: number, frac = 0.05): [number, number] {
  const span = max - min || Math.abs(max) || 1;
  return [min - frac * span, max + frac * span];
}
