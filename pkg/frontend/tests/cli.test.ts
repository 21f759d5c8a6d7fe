import { mkdtemp, readFile } from "fs/promises";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";
import { describe, expect, it } from "vitest";

import { parseArgs, runCli } from "../src/cli.js";

function fx(name: string): string {
  return fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
}

async function outPath(name: string): Promise<string> {
  return join(await mkdtemp(join(tmpdir(), "figstudio-")), name);
}

describe("argument validation", () => {
  it("requires the render command", () => {
    expect(() => parseArgs(["plot"])).toThrow(/expected "render"/);
  });

  it("requires a known kind", () => {
    expect(() => parseArgs(["render", "--kind", "pie", "--in", "a", "--out", "b.svg"]))
      .toThrow(/--kind must be one of/);
  });

  it("accepts vector output only", () => {
    expect(() => parseArgs(
      ["render", "--kind", "branch", "--in", "a.csv", "--out", "fig.png"]))
      .toThrow(/vector .svg/);
  });

  it("ties trajectory and fit flags to their kinds", () => {
    expect(() => parseArgs(
      ["render", "--kind", "portrait", "--in", "p.csv", "--out", "f.svg"]))
      .toThrow(/at least one --traj/);
    expect(() => parseArgs(
      ["render", "--kind", "branch", "--in", "b.csv", "--out", "f.svg",
       "--fit", "d.csv"]))
      .toThrow(/--fit only applies/);
    expect(() => parseArgs(
      ["render", "--kind", "decay", "--in", "t.csv", "--out", "f.svg"]))
      .toThrow(/need --fit/);
  });

  it("rejects unknown flags and tiny canvases", () => {
    expect(() => parseArgs(
      ["render", "--kind", "branch", "--in", "b.csv", "--out", "f.svg",
       "--shade", "3"]))
      .toThrow(/unknown flag/);
    expect(() => parseArgs(
      ["render", "--kind", "branch", "--in", "b.csv", "--out", "f.svg",
       "--width", "10"]))
      .toThrow(/at least 100/);
  });
});

describe("end-to-end rendering", () => {
  it("renders a branch figure and exits 0", async () => {
    const out = await outPath("branch.svg");
    const code = await runCli(
      ["render", "--kind", "branch", "--in", fx("branch.csv"), "--out", out]);
    expect(code).toBe(0);
    const svg = await readFile(out, "utf-8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg).toContain("slope = ");
  });

  it("renders the portrait with ground-state overlay", async () => {
    const out = await outPath("portrait.svg");
    const code = await runCli([
      "render", "--kind", "portrait", "--in", fx("portrait.csv"),
      "--traj", fx("traj_low.csv"), "--traj", fx("traj_cross.csv"),
      "--ground", fx("ground.csv"), "--out", out,
      "--title", "Phase portrait"]);
    expect(code).toBe(0);
    const svg = await readFile(out, "utf-8");
    expect(svg).toContain("Phase portrait");
    expect(svg).toContain('stroke="#000000"');
  });

  it("renders decay and spectrum figures", async () => {
    for (const [kind, input, extra] of [
      ["decay", "ground.csv", ["--fit", fx("decay_fit.csv")]],
      ["spectrum", "spectrum.csv", []],
    ] as [string, string, string[]][]) {
      const out = await outPath(`${kind}.svg`);
      const code = await runCli(
        ["render", "--kind", kind, "--in", fx(input), "--out", out, ...extra]);
      expect(code).toBe(0);
      expect((await readFile(out, "utf-8")).endsWith("</svg>\n")).toBe(true);
    }
  });

  it("exits 2 on usage errors and 1 on bad inputs", async () => {
    expect(await runCli(["render", "--kind", "nope"])).toBe(2);
    const out = await outPath("x.svg");
    expect(await runCli(
      ["render", "--kind", "branch", "--in", "/does/not/exist.csv",
       "--out", out])).toBe(1);
    // schema violation in an otherwise valid CSV file
    expect(await runCli(
      ["render", "--kind", "branch", "--in", fx("portrait.csv"),
       "--out", out])).toBe(1);
  });
});
