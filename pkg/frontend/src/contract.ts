/**
 * The density export contract: one CSV per coupling with columns
 * (r, theta, phi, density) over a full product grid, plus a JSON sidecar
 * carrying quantum numbers, separation constants, normalization constants,
 * the fixed slice and the axis sizes.
 */

import { readFileSync, readdirSync } from "fs";
import { basename, join } from "path";
import { z } from "zod";

const complexRecord = z.object({ re: z.number(), im: z.number() });

export const sidecarSchema = z.object({
  tag: z.string(),
  quantum: z.object({
    n_r: z.number().int(),
    k_or_l: z.number().int(),
    m: z.number().int(),
  }),
  lambda: z.number(),
  energy: z.number(),
  Lambda: complexRecord,
  m_squared: complexRecord,
  norm_constant_phi: z.number(),
  total_norm: z.number(),
  slice: z.object({ r: z.number(), theta: z.number() }),
  axes: z.object({
    n_r_samples: z.number().int().positive(),
    n_theta_samples: z.number().int().positive(),
    n_phi_samples: z.number().int().positive(),
  }),
  a: z.number().optional(),
});

export type Sidecar = z.infer<typeof sidecarSchema>;

export class SchemaMismatchError extends Error {}

export interface DensityGrid {
  r: Float64Array;
  theta: Float64Array;
  phi: Float64Array;
  /** density[(i * nTheta + j) * nPhi + k] for (r_i, theta_j, phi_k) */
  density: Float64Array;
  sidecar: Sidecar;
  csvPath: string;
}

export function loadSidecar(path: string): Sidecar {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new SchemaMismatchError(`${path}: unreadable sidecar (${err})`);
  }
  const parsed = sidecarSchema.safeParse(raw);
  if (!parsed.success) {
    throw new SchemaMismatchError(
      `${path}: sidecar does not match the export contract: ${parsed.error.issues
        .map((i) => `${i.path.join(".")}: ${i.message}`)
        .join("; ")}`
    );
  }
  return parsed.data;
}

const HEADER = "r,theta,phi,density";

export function loadDensityGrid(csvPath: string, sidecar: Sidecar): DensityGrid {
  const text = readFileSync(csvPath, "utf-8");
  const lines = text.split("\n").filter((ln) => ln.length > 0);
  if (lines[0] !== HEADER) {
    throw new SchemaMismatchError(
      `${csvPath}: expected header "${HEADER}", found "${lines[0]}"`
    );
  }
  const { n_r_samples: nr, n_theta_samples: nt, n_phi_samples: np } = sidecar.axes;
  const expected = nr * nt * np;
  if (lines.length - 1 !== expected) {
    throw new SchemaMismatchError(
      `${csvPath}: ${lines.length - 1} rows, sidecar promises ${expected}`
    );
  }
  const r = new Float64Array(nr);
  const theta = new Float64Array(nt);
  const phi = new Float64Array(np);
  const density = new Float64Array(expected);
  for (let row = 0; row < expected; row++) {
    const parts = lines[row + 1].split(",");
    if (parts.length !== 4) {
      throw new SchemaMismatchError(`${csvPath}: malformed row ${row + 2}`);
    }
    const rv = Number(parts[0]);
    const tv = Number(parts[1]);
    const pv = Number(parts[2]);
    const dv = Number(parts[3]);
    if (![rv, tv, pv, dv].every(Number.isFinite)) {
      throw new SchemaMismatchError(`${csvPath}: non-finite entry at row ${row + 2}`);
    }
    const k = row % np;
    const j = Math.floor(row / np) % nt;
    const i = Math.floor(row / (np * nt));
    if (i === 0 && j === 0) phi[k] = pv;
    if (i === 0 && k === 0) theta[j] = tv;
    if (j === 0 && k === 0) r[i] = rv;
    density[row] = dv;
  }
  return { r, theta, phi, density, sidecar, csvPath };
}

export interface DensityInput {
  csvPath: string;
  jsonPath: string;
  sidecar: Sidecar;
}

/** Discover density exports (CSV + sidecar pairs) inside a directory. */
export function discoverInputs(dir: string): DensityInput[] {
  const out: DensityInput[] = [];
  for (const name of readdirSync(dir).sort()) {
    if (!name.startsWith("density_") || !name.endsWith(".json")) continue;
    const jsonPath = join(dir, name);
    const csvPath = join(dir, basename(name, ".json") + ".csv");
    const sidecar = loadSidecar(jsonPath);
    out.push({ csvPath, jsonPath, sidecar });
  }
  return out;
}
