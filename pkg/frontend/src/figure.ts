/**
 * Azimuthal density profiles: one curve per coupling at a fixed (r, theta)
 * slice, phi remapped to [-pi, pi]. The figure model (the exact arrays
 * handed to the renderer) is returned alongside the written SVG so tests
 * and callers can inspect the plotted data rather than pixels.
 */

import { writeFileSync } from "fs";
import * as echarts from "echarts";

import {
  DensityGrid,
  DensityInput,
  SchemaMismatchError,
  discoverInputs,
  loadDensityGrid,
} from "./contract";

export class MissingSliceError extends Error {}

export interface SliceRequest {
  /** radial slice: a number, or "PEAK" for the sidecar's density peak */
  r: number | "PEAK";
  theta: number;
}

export interface FigureSpec {
  inputDir: string;
  slice: SliceRequest;
  outPath: string;
  width?: number;
  height?: number;
  title?: string;
}

export interface Curve {
  label: string;
  a: number | null;
  phi: number[];
  density: number[];
  sliceR: number;
  sliceTheta: number;
}

export interface FigureData {
  curves: Curve[];
  outPath: string;
  svg: string;
}

function nearestIndex(axis: Float64Array, value: number): number {
  let best = 0;
  let bestDist = Infinity;
  for (let i = 0; i < axis.length; i++) {
    const d = Math.abs(axis[i] - value);
    if (d < bestDist) {
      best = i;
      bestDist = d;
    }
  }
  return best;
}

function wrapToPi(phi: number): number {
  let x = ((phi + Math.PI) % (2 * Math.PI)) - Math.PI;
  if (x < -Math.PI) x += 2 * Math.PI;
  return x;
}

export function extractCurve(grid: DensityGrid, slice: SliceRequest): Curve {
  const rTarget = slice.r === "PEAK" ? grid.sidecar.slice.r : slice.r;
  const i = nearestIndex(grid.r, rTarget);
  const j = nearestIndex(grid.theta, slice.theta);
  const nt = grid.theta.length;
  const np = grid.phi.length;
  const base = (i * nt + j) * np;
  const pairs: Array<[number, number]> = [];
  for (let k = 0; k < np; k++) {
    pairs.push([wrapToPi(grid.phi[k]), grid.density[base + k]]);
  }
  pairs.sort((p, q) => p[0] - q[0]);
  const a = grid.sidecar.a ?? null;
  return {
    label: a !== null ? `a=${a}` : grid.sidecar.tag,
    a,
    phi: pairs.map((p) => p[0]),
    density: pairs.map((p) => p[1]),
    sliceR: grid.r[i],
    sliceTheta: grid.theta[j],
  };
}

export function prepareFigure(inputs: DensityInput[], slice: SliceRequest): Curve[] {
  if (inputs.length < 1) {
    throw new SchemaMismatchError("no density exports found in the input directory");
  }
  const curves = inputs
    .map((inp) => extractCurve(loadDensityGrid(inp.csvPath, inp.sidecar), slice))
    .sort((x, y) => (x.a ?? 0) - (y.a ?? 0));
  return curves;
}

/** Renumber zrender's process-global instance/class counters so identical
 * inputs produce byte-identical SVG regardless of how many charts ran
 * before (suffixes stay unique within one document). */
function canonicalizeSvg(svg: string): string {
  const stripped = svg.replace(/zr\d+-/g, "zr-");
  const seen = new Map<string, string>();
  return stripped.replace(/zr-cls-\d+/g, (tok) => {
    if (!seen.has(tok)) seen.set(tok, `zr-cls-${seen.size}`);
    return seen.get(tok)!;
  });
}

function renderSvg(curves: Curve[], spec: FigureSpec): string {
  const chart = echarts.init(null as never, null, {
    renderer: "svg",
    ssr: true,
    width: spec.width ?? 840,
    height: spec.height ?? 520,
  });
  const title =
    spec.title ??
    `azimuthal density profile at r=${curves[0].sliceR.toPrecision(4)}, ` +
    `theta=${curves[0].sliceTheta.toPrecision(4)}`;
  chart.setOption({
    animation: false,
    title: { text: title, left: "center", textStyle: { fontSize: 14 } },
    legend: { bottom: 0, data: curves.map((c) => c.label) },
    grid: { left: 70, right: 25, top: 45, bottom: 60 },
    xAxis: {
      type: "value",
      name: "phi",
      min: -Math.PI,
      max: Math.PI,
      nameLocation: "middle",
      nameGap: 28,
    },
    yAxis: { type: "value", name: "density", nameLocation: "middle", nameGap: 52 },
    series: curves.map((c) => ({
      type: "line",
      name: c.label,
      showSymbol: false,
      data: c.phi.map((p, idx) => [p, c.density[idx]]),
    })),
  });
  const svg = canonicalizeSvg(chart.renderToSVGString());
  chart.dispose();
  return svg;
}

/** Build the figure for every density export under spec.inputDir. */
export function renderDensityFigure(spec: FigureSpec): FigureData {
  const inputs = discoverInputs(spec.inputDir);
  const curves = prepareFigure(inputs, spec.slice);
  const svg = renderSvg(curves, spec);
  let outPath = spec.outPath;
  if (!outPath.toLowerCase().endsWith(".svg")) {
    // vector-only pipeline: keep the requested stem, fix the extension
    outPath = outPath.replace(/\.[A-Za-z0-9]+$/, "") + ".svg";
  }
  writeFileSync(outPath, svg, "utf-8");
  return { curves, outPath, svg };
}

export function parseSliceArg(text: string): SliceRequest {
  const parts = new Map<string, string>();
  for (const tok of text.split(",")) {
    const [key, value] = tok.split("=");
    if (key && value !== undefined) parts.set(key.trim().toLowerCase(), value.trim());
  }
  const rRaw = parts.get("r");
  const thetaRaw = parts.get("theta");
  if (rRaw === undefined || thetaRaw === undefined) {
    throw new MissingSliceError(
      `slice needs both coordinates, e.g. r=PEAK,theta=1.5708 (got "${text}")`
    );
  }
  const r = rRaw.toUpperCase() === "PEAK" ? ("PEAK" as const) : Number(rRaw);
  const theta = Number(thetaRaw);
  if ((r !== "PEAK" && !Number.isFinite(r)) || !Number.isFinite(theta)) {
    throw new MissingSliceError(`slice coordinates must be numbers or r=PEAK ("${text}")`);
  }
  return { r, theta };
}
