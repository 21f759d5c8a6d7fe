/**
 * Decay figure: the tail-compensated log profile log(u) + ((d-1)/2) log(r)
 * against the recorded straight-line fit.  The annotated slope is printed
 * verbatim from the fit artifact; nothing is refitted here.
 */

import { DecayFit, Trajectory } from "../csv.js";
import { Chart, padded } from "../svg.js";
import { FigureStyle } from "./portrait.js";

export const SLOPE_DECIMALS = 6;

export function slopeAnnotation(fit: DecayFit): string {
  return `slope = ${(-fit.rate).toFixed(SLOPE_DECIMALS)}`;
}

export function renderDecay(traj: Trajectory, fit: DecayFit, style: FigureStyle): string {
  const rs: number[] = [];
  const ys: number[] = [];
  // r below ~0.2 only shows the log(r) blowup; past the fit window the
  // integrated tail is dominated by solver noise, so stop shortly after
  for (let i = 0; i < traj.r.length; i++) {
    const r = traj.r[i] as number;
    const u = traj.u[i] as number;
    if (r < 0.2 || u <= 0) continue;
    if (r > fit.windowHi + 0.1 * (fit.windowHi - fit.windowLo)) break;
    ys.push(Math.log(u) + 0.5 * (fit.d - 1) * Math.log(r));
    rs.push(r);
  }
  if (rs.length < 2) {
    throw new Error("trajectory has no usable decay segment");
  }

  const lineX = [fit.windowLo, fit.windowHi];
  const lineY = lineX.map((r) => Math.log(fit.amplitude) - fit.rate * r);

  const chart = new Chart({
    width: style.width,
    height: style.height,
    title: style.title,
    xLabel: "radius r",
    yLabel: "log u + ((d-1)/2) log r",
    xDomain: padded(rs[0] as number, rs[rs.length - 1] as number),
    yDomain: padded(Math.min(...ys, ...lineY), Math.max(...ys, ...lineY)),
  });
  chart.polyline(rs, ys, { stroke: "#1f77b4", width: 1.4 });
  chart.polyline(lineX, lineY, { stroke: "#d62728", width: 1.4, dash: "6,4" });
  chart.annotate(slopeAnnotation(fit));
  chart.legend([
    { label: "profile", color: "#1f77b4" },
    { label: "recorded fit", color: "#d62728", dash: "6,4" },
  ]);
  return chart.render();
}
