import { readFileSync } from "fs";
import { fileURLToPath } from "url";
import { describe, expect, it } from "vitest";

import {
  loadBranch,
  loadDecayFit,
  loadPortrait,
  loadSpectrum,
  loadTrajectory,
  parseCsv,
} from "../src/csv.js";

export function fixture(name: string): string {
  return readFileSync(
    fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url)), "utf-8");
}

describe("artifact parsing", () => {
  it("reads the config hash comment", () => {
    const csv = parseCsv(fixture("portrait.csv"), "portrait.csv");
    expect(csv.configHash).toMatch(/^[0-9a-f]{64}$/);
    expect(csv.header).toEqual(["y", "tag", "r_event"]);
    expect(csv.records).toHaveLength(12);
  });

  it("works without the hash comment", () => {
    const csv = parseCsv("a,b\n1,2\n", "x");
    expect(csv.configHash).toBeNull();
    expect(csv.records).toEqual([["1", "2"]]);
  });

  it("rejects an empty table", () => {
    expect(() => parseCsv("r,u,du,H\n", "x")).toThrow(/no data rows/);
    expect(() => parseCsv("", "x")).toThrow(/no header/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1,2,3\n", "x")).toThrow(/row 2 has 3 cells/);
  });

  it("rejects unknown columns", () => {
    const text = "r,u,du,H,extra\n1,2,3,4,5\n";
    expect(() => loadTrajectory(text, "x")).toThrow(/does not match the expected schema/);
  });

  it("rejects reordered columns", () => {
    const text = "u,r,du,H\n1,2,3,4\n";
    expect(() => loadTrajectory(text, "x")).toThrow(/expected schema/);
  });

  it("rejects non-numeric cells", () => {
    const text = "r,u,du,H\n0.1,oops,3,4\n";
    expect(() => loadTrajectory(text, "x")).toThrow(/non-numeric cell "oops"/);
  });

  it("accepts nan cells", () => {
    const rows = loadPortrait("y,tag,r_event\n0.5,SPlus,nan\n", "x");
    expect(Number.isNaN(rows.rEvent[0])).toBe(true);
  });

  it("rejects unknown classification tags", () => {
    const text = "y,tag,r_event\n0.5,Exploded,1.0\n";
    expect(() => loadPortrait(text, "x")).toThrow(/unknown classification tag/);
  });

  it("loads the real trajectory fixture", () => {
    const t = loadTrajectory(fixture("ground.csv"), "ground.csv");
    expect(t.r.length).toBeGreaterThan(100);
    expect(t.r[0]).toBeCloseTo(1e-4, 10);
    expect(t.u[0]).toBeCloseTo(1.4725843, 6);
  });

  it("requires exactly one decay fit row", () => {
    const fit = loadDecayFit(fixture("decay_fit.csv"), "decay_fit.csv");
    expect(fit.d).toBe(3);
    expect(fit.rate).toBeCloseTo(1.0, 3);
    expect(fit.windowLo).toBeLessThan(fit.windowHi);
    const doubled = fixture("decay_fit.csv").trimEnd()
      + "\n3,1.0,40.0,8.0,16.0\n";
    expect(() => loadDecayFit(doubled, "x")).toThrow(/exactly one fit row/);
  });

  it("loads spectrum and branch tables", () => {
    const rows = loadSpectrum(fixture("spectrum.csv"), "spectrum.csv");
    expect(rows.length).toBe(15);
    expect(new Set(rows.map((r) => r.operator))).toEqual(new Set(["A", "L1", "L2"]));
    const branch = loadBranch(fixture("branch.csv"), "branch.csv");
    expect(branch.length).toBe(6);
    expect(branch[0]?.eps).toBe(0);
    expect(branch[5]?.distanceToLimit).toBeGreaterThan(1);
  });
});
