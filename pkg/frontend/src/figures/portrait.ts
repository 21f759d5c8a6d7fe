/**
 * Phase-portrait figure: each shot drawn as a curve in the (slope, angle)
 * plane, colored by its recorded classification, with the certified
 * ground-state profile overlaid in black.
 */

import { PortraitTable, Trajectory } from "../csv.js";
import { Chart, LegendEntry, padded } from "../svg.js";

export const TAG_COLORS: Record<string, string> = {
  SPlus: "#1f77b4",
  SZero: "#2ca02c",
  SMinus: "#d62728",
  Unresolved: "#7f7f7f",
};

export interface PortraitInputs {
  portrait: PortraitTable;
  trajectories: Trajectory[];
  ground: Trajectory | null;
}

export interface FigureStyle {
  width: number;
  height: number;
  title: string;
}

/** The classification of a curve is looked up by its initial angle. */
export function matchTag(portrait: PortraitTable, traj: Trajectory): string {
  const u0 = traj.u[0];
  if (u0 === undefined) throw new Error("trajectory has no samples");
  let best = -1;
  let bestGap = Infinity;
  for (let i = 0; i < portrait.y.length; i++) {
    const gap = Math.abs((portrait.y[i] as number) - u0);
    if (gap < bestGap) {
      bestGap = gap;
      best = i;
    }
  }
  if (best < 0 || bestGap > 1e-3) {
    throw new Error(
      `trajectory starting at u(0)=${u0.toFixed(6)} matches no portrait sample `
      + `(closest gap ${bestGap.toExponential(2)})`);
  }
  return portrait.tag[best] as string;
}

export function renderPortrait(inputs: PortraitInputs, style: FigureStyle): string {
  const { portrait, trajectories, ground } = inputs;
  if (trajectories.length === 0) {
    throw new Error("portrait figure needs at least one trajectory");
  }
  const curves = trajectories.map((t) => ({ traj: t, tag: matchTag(portrait, t) }));

  const all = ground === null ? [...trajectories, ...[]] : [...trajectories, ground];
  const dus = all.flatMap((t) => t.du);
  const us = all.flatMap((t) => t.u);
  const chart = new Chart({
    width: style.width,
    height: style.height,
    title: style.title,
    xLabel: "slope u'",
    yLabel: "angle u",
    xDomain: padded(Math.min(...dus), Math.max(...dus)),
    yDomain: padded(Math.min(...us), Math.max(...us)),
  });

  for (const { traj, tag } of curves) {
    chart.polyline(traj.du, traj.u, {
      stroke: TAG_COLORS[tag] as string,
      width: 1.1,
      opacity: 0.85,
    });
  }
  if (ground !== null) {
    chart.polyline(ground.du, ground.u, { stroke: "#000000", width: 2.2 });
  }

  const present = [...new Set(curves.map((c) => c.tag))];
  const legend: LegendEntry[] = present.map((tag) => ({
    label: tag,
    color: TAG_COLORS[tag] as string,
  }));
  if (ground !== null) {
    legend.push({ label: "ground state", color: "#000000" });
  }
  chart.legend(legend);
  return chart.render();
}
