/**
 * Strict readers for the solver's CSV artifacts.
 *
 * Every artifact may start with a `# config_hash=<hex>` comment line,
 * followed by a header that must match the expected schema exactly.
 * Unknown, missing, or reordered columns are rejected, as are ragged
 * rows and non-numeric cells, so a figure can never silently render
 * from a file it does not understand.
 */

export interface RawCsv {
  configHash: string | null;
  header: string[];
  records: string[][];
}

export interface Trajectory {
  r: number[];
  u: number[];
  du: number[];
  H: number[];
}

export interface PortraitTable {
  y: number[];
  tag: string[];
  rEvent: number[];
}

export interface DecayFit {
  d: number;
  rate: number;
  amplitude: number;
  windowLo: number;
  windowHi: number;
}

export interface SpectrumRow {
  operator: string;
  ell: number;
  index: number;
  eigenvalue: number;
}

export interface BranchRow {
  eps: number;
  newtonIters: number;
  residual: number;
  distanceToLimit: number;
  phiAt0: number;
  chiPeak: number;
}

export const KNOWN_TAGS = ["SPlus", "SZero", "SMinus", "Unresolved"];

const HASH_LINE = /^# config_hash=([0-9a-f]+)$/;

export function parseCsv(text: string, name: string): RawCsv {
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  let configHash: string | null = null;
  let at = 0;
  const first = lines[0];
  if (first !== undefined) {
    const m = HASH_LINE.exec(first);
    if (m) {
      configHash = m[1] ?? null;
      at = 1;
    }
  }
  const headerLine = lines[at];
  if (headerLine === undefined) {
    throw new Error(`"${name}" has no header line`);
  }
  const header = headerLine.split(",");
  const records: string[][] = [];
  for (let i = at + 1; i < lines.length; i++) {
    const cells = (lines[i] as string).split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `"${name}" row ${i + 1} has ${cells.length} cells, expected ${header.length}`);
    }
    records.push(cells);
  }
  if (records.length === 0) {
    throw new Error(`"${name}" contains no data rows`);
  }
  return { configHash, header, records };
}

export function requireHeader(csv: RawCsv, expected: string[], name: string): void {
  if (csv.header.length !== expected.length
      || expected.some((col, i) => csv.header[i] !== col)) {
    throw new Error(
      `"${name}" header [${csv.header.join(",")}] does not match the `
      + `expected schema [${expected.join(",")}]`);
  }
}

function toNumber(cell: string, where: string): number {
  if (/^-?nan$/i.test(cell)) return NaN;
  const v = Number(cell);
  if (cell.trim() === "" || Number.isNaN(v)) {
    throw new Error(`non-numeric cell "${cell}" in ${where}`);
  }
  return v;
}

function column(csv: RawCsv, i: number, name: string): number[] {
  return csv.records.map((rec, row) =>
    toNumber(rec[i] as string, `"${name}" row ${row + 1}`));
}

export function loadTrajectory(text: string, name: string): Trajectory {
  const csv = parseCsv(text, name);
  requireHeader(csv, ["r", "u", "du", "H"], name);
  return {
    r: column(csv, 0, name),
    u: column(csv, 1, name),
    du: column(csv, 2, name),
    H: column(csv, 3, name),
  };
}

export function loadPortrait(text: string, name: string): PortraitTable {
  const csv = parseCsv(text, name);
  requireHeader(csv, ["y", "tag", "r_event"], name);
  const tag = csv.records.map((rec, row) => {
    const t = rec[1] as string;
    if (!KNOWN_TAGS.includes(t)) {
      throw new Error(`unknown classification tag "${t}" in "${name}" row ${row + 1}`);
    }
    return t;
  });
  return { y: column(csv, 0, name), tag, rEvent: column(csv, 2, name) };
}

export function loadDecayFit(text: string, name: string): DecayFit {
  const csv = parseCsv(text, name);
  requireHeader(csv, ["d", "rate", "amplitude", "window_lo", "window_hi"], name);
  if (csv.records.length !== 1) {
    throw new Error(`"${name}" must hold exactly one fit row, found ${csv.records.length}`);
  }
  return {
    d: column(csv, 0, name)[0] as number,
    rate: column(csv, 1, name)[0] as number,
    amplitude: column(csv, 2, name)[0] as number,
    windowLo: column(csv, 3, name)[0] as number,
    windowHi: column(csv, 4, name)[0] as number,
  };
}

export function loadSpectrum(text: string, name: string): SpectrumRow[] {
  const csv = parseCsv(text, name);
  requireHeader(csv, ["operator", "ell", "index", "eigenvalue"], name);
  return csv.records.map((rec, row) => {
    const operator = rec[0] as string;
    if (!/^[A-Za-z][A-Za-z0-9]*$/.test(operator)) {
      throw new Error(`bad operator label "${operator}" in "${name}" row ${row + 1}`);
    }
    const where = `"${name}" row ${row + 1}`;
    return {
      operator,
      ell: toNumber(rec[1] as string, where),
      index: toNumber(rec[2] as string, where),
      eigenvalue: toNumber(rec[3] as string, where),
    };
  });
}

export function loadBranch(text: string, name: string): BranchRow[] {
  const csv = parseCsv(text, name);
  requireHeader(csv,
    ["eps", "newton_iters", "residual", "distance_to_limit", "phi_at_0", "chi_peak"],
    name);
  return csv.records.map((rec, row) => {
    const where = `"${name}" row ${row + 1}`;
    return {
      eps: toNumber(rec[0] as string, where),
      newtonIters: toNumber(rec[1] as string, where),
      residual: toNumber(rec[2] as string, where),
      distanceToLimit: toNumber(rec[3] as string, where),
      phiAt0: toNumber(rec[4] as string, where),
      chiPeak: toNumber(rec[5] as string, where),
    };
  });
}
