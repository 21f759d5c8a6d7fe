/**
 * Spectrum figure: the lowest eigenvalues of each operator sector shown
 * as horizontal level marks over labeled slots, with the zero line dashed.
 */

import { SpectrumRow } from "../csv.js";
import { Chart, esc, padded } from "../svg.js";
import { FigureStyle } from "./portrait.js";

const OPERATOR_COLORS: Record<string, string> = {
  A: "#1f77b4",
  L1: "#2ca02c",
  L2: "#d62728",
};

function slotLabel(operator: string, ell: number): string {
  return `${operator} l=${ell}`;
}

export function renderSpectrum(rows: SpectrumRow[], style: FigureStyle): string {
  const slots: string[] = [];
  for (const row of rows) {
    const label = slotLabel(row.operator, row.ell);
    if (!slots.includes(label)) slots.push(label);
  }
  const eigenvalues = rows.map((r) => r.eigenvalue);
  const lo = Math.min(...eigenvalues, 0);
  const hi = Math.max(...eigenvalues, 0);

  const chart = new Chart({
    width: style.width,
    height: style.height,
    title: style.title,
    xLabel: "operator sector",
    yLabel: "eigenvalue",
    xDomain: [-0.5, slots.length - 0.5],
    yDomain: padded(lo, hi, 0.08),
    hideXTicks: true,
  });
  chart.hline(0, { stroke: "#888888", width: 0.8, dash: "4,4" });
  for (const row of rows) {
    const slot = slots.indexOf(slotLabel(row.operator, row.ell));
    chart.levelMark(slot, row.eigenvalue, 16, {
      stroke: OPERATOR_COLORS[row.operator] ?? "#7f7f7f",
      width: 2.4,
    });
  }
  chart.legend(Object.entries(OPERATOR_COLORS)
    .filter(([op]) => rows.some((r) => r.operator === op))
    .map(([op, color]) => ({ label: op, color })));

  // slot labels rendered as an extra annotation row under the x axis
  const svg = chart.render();
  const labels = slots.map((label, i) => {
    const x = chart.xOf(i).toFixed(2);
    return `<text x="${x}" y="${style.height - 22}" text-anchor="middle"`
      + ` font-size="9" fill="#333333">${esc(label)}</text>`;
  }).join("\n");
  return svg.replace("</svg>", labels + "\n</svg>");
}
