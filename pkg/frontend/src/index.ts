export * from "./csv.js";
export * from "./svg.js";
export * from "./figures/portrait.js";
export * from "./figures/decay.js";
export * from "./figures/spectrum.js";
export * from "./figures/branch.js";
export { FigureSpec, parseArgs, runCli } from "./cli.js";
