/**
 * Branch-convergence figure: distance to the limit state against the
 * continuation parameter on log-log axes.  The annotated slope is the
 * least-squares fit through the plotted artifact points (the zero point
 * of the branch has no log image and is skipped).
 */

import { BranchRow } from "../csv.js";
import { Chart } from "../svg.js";
import { FigureStyle } from "./portrait.js";

export const BRANCH_SLOPE_DECIMALS = 3;

export function branchSlope(rows: BranchRow[]): number {
  const pts = rows.filter((r) => r.eps > 0 && r.distanceToLimit > 0);
  if (pts.length < 2) {
    throw new Error("branch needs at least two positive points for a slope");
  }
  const xs = pts.map((r) => Math.log(r.eps));
  const ys = pts.map((r) => Math.log(r.distanceToLimit));
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += ((xs[i] as number) - mx) * ((ys[i] as number) - my);
    den += ((xs[i] as number) - mx) ** 2;
  }
  return num / den;
}

export function renderBranch(rows: BranchRow[], style: FigureStyle): string {
  const pts = rows.filter((r) => r.eps > 0 && r.distanceToLimit > 0);
  if (pts.length < 2) {
    throw new Error("branch needs at least two positive points to plot");
  }
  const eps = pts.map((r) => r.eps);
  const dist = pts.map((r) => r.distanceToLimit);
  const slope = branchSlope(rows);

  const chart = new Chart({
    width: style.width,
    height: style.height,
    title: style.title,
    xLabel: "continuation parameter eps",
    yLabel: "distance to limit state",
    xDomain: [Math.min(...eps) / 1.5, Math.max(...eps) * 1.5],
    yDomain: [Math.min(...dist) / 1.5, Math.max(...dist) * 1.5],
    xLog: true,
    yLog: true,
  });
  chart.polyline(eps, dist, { stroke: "#1f77b4", width: 1.4 });
  chart.dots(eps, dist, 3, "#1f77b4");
  chart.annotate(`slope = ${slope.toFixed(BRANCH_SLOPE_DECIMALS)}`);
  return chart.render();
}
