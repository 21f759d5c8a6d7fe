#!/usr/bin/env node
/**
 * figure-studio: one vector figure per invocation, straight from the
 * solver's CSV artifacts.
 *
 * Usage:
 *   figure-studio render --kind portrait --in portrait.csv \
 *       --traj shot_a.csv --traj shot_b.csv [--ground q.csv] --out fig.svg
 *   figure-studio render --kind decay --in trajectory.csv \
 *       --fit decay_fit.csv --out fig.svg
 *   figure-studio render --kind spectrum --in spectrum.csv --out fig.svg
 *   figure-studio render --kind branch --in branch.csv --out fig.svg
 *
 * Options: --width N --height N --title TEXT
 */

import { readFile, writeFile } from "fs/promises";

import {
  loadBranch,
  loadDecayFit,
  loadPortrait,
  loadSpectrum,
  loadTrajectory,
} from "./csv.js";
import { renderBranch } from "./figures/branch.js";
import { renderDecay } from "./figures/decay.js";
import { FigureStyle, renderPortrait } from "./figures/portrait.js";
import { renderSpectrum } from "./figures/spectrum.js";

const KINDS = ["portrait", "decay", "spectrum", "branch"];

export interface FigureSpec {
  kind: string;
  input: string;
  output: string;
  trajPaths: string[];
  groundPath: string | null;
  fitPath: string | null;
  style: FigureStyle;
}

export function parseArgs(argv: string[]): FigureSpec {
  if (argv[0] !== "render") {
    throw new Error(`unknown command "${argv[0] ?? ""}" (expected "render")`);
  }
  let kind: string | null = null;
  let input: string | null = null;
  let output: string | null = null;
  const trajPaths: string[] = [];
  let groundPath: string | null = null;
  let fitPath: string | null = null;
  let width = 720;
  let height = 440;
  let title: string | null = null;

  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i] as string;
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`flag "${flag}" is missing a value`);
    }
    switch (flag) {
      case "--kind":
        kind = value;
        break;
      case "--in":
        input = value;
        break;
      case "--out":
        output = value;
        break;
      case "--traj":
        trajPaths.push(value);
        break;
      case "--ground":
        groundPath = value;
        break;
      case "--fit":
        fitPath = value;
        break;
      case "--width":
        width = Number(value);
        break;
      case "--height":
        height = Number(value);
        break;
      case "--title":
        title = value;
        break;
      default:
        throw new Error(`unknown flag "${flag}"`);
    }
  }

  if (kind === null || !KINDS.includes(kind)) {
    throw new Error(`--kind must be one of ${KINDS.join(", ")}`);
  }
  if (input === null) throw new Error("--in is required");
  if (output === null) throw new Error("--out is required");
  if (!output.endsWith(".svg")) {
    throw new Error(`output must be a vector .svg file, got "${output}"`);
  }
  if (!Number.isFinite(width) || !Number.isFinite(height)
      || width < 100 || height < 100) {
    throw new Error("--width and --height must be at least 100");
  }
  if (kind === "portrait" && trajPaths.length === 0) {
    throw new Error("portrait figures need at least one --traj trajectory");
  }
  if (kind !== "portrait" && (trajPaths.length > 0 || groundPath !== null)) {
    throw new Error(`--traj/--ground only apply to portrait figures`);
  }
  if (kind === "decay" && fitPath === null) {
    throw new Error("decay figures need --fit pointing at the recorded fit");
  }
  if (kind !== "decay" && fitPath !== null) {
    throw new Error("--fit only applies to decay figures");
  }

  const defaultTitles: Record<string, string> = {
    portrait: "Shooting phase portrait",
    decay: "Exponential tail against the recorded fit",
    spectrum: "Sector spectra",
    branch: "Branch distance to the limit state",
  };
  return {
    kind,
    input,
    output,
    trajPaths,
    groundPath,
    fitPath,
    style: { width, height, title: title ?? (defaultTitles[kind] as string) },
  };
}

async function renderSpec(spec: FigureSpec): Promise<string> {
  const main = await readFile(spec.input, "utf-8");
  switch (spec.kind) {
    case "portrait": {
      const portrait = loadPortrait(main, spec.input);
      const trajectories = [];
      for (const path of spec.trajPaths) {
        trajectories.push(loadTrajectory(await readFile(path, "utf-8"), path));
      }
      const ground = spec.groundPath === null
        ? null
        : loadTrajectory(await readFile(spec.groundPath, "utf-8"), spec.groundPath);
      return renderPortrait({ portrait, trajectories, ground }, spec.style);
    }
    case "decay": {
      const traj = loadTrajectory(main, spec.input);
      const fit = loadDecayFit(
        await readFile(spec.fitPath as string, "utf-8"), spec.fitPath as string);
      return renderDecay(traj, fit, spec.style);
    }
    case "spectrum":
      return renderSpectrum(loadSpectrum(main, spec.input), spec.style);
    case "branch":
      return renderBranch(loadBranch(main, spec.input), spec.style);
    default:
      throw new Error(`unreachable kind "${spec.kind}"`);
  }
}

export async function runCli(argv: string[]): Promise<number> {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`figure-studio: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const svg = await renderSpec(spec);
    await writeFile(spec.output, svg);
    process.stdout.write(`${spec.kind} figure written to ${spec.output}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`figure-studio: ${(err as Error).message}\n`);
    return 1;
  }
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  runCli(process.argv.slice(2)).then((code) => process.exit(code));
}
