#!/usr/bin/env node
/**
 * render --in DIR --slice r=PEAK,theta=1.5708 --out FIG.svg
 *
 * Reads every density export (CSV + JSON sidecar) in DIR and draws one
 * azimuthal profile per coupling at the requested slice. Exit codes:
 * 0 success, 1 bad invocation or contract mismatch.
 */

import { MissingSliceError, parseSliceArg, renderDensityFigure } from "./figure";
import { SchemaMismatchError } from "./contract";

function usage(): string {
  return "usage: render --in DIR --slice r=PEAK,theta=1.5708 --out FIG.svg [--width W] [--height H] [--title T]";
}

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    process.stderr.write(usage() + "\n");
    return 1;
  }
  const opts = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      process.stderr.write(usage() + "\n");
      return 1;
    }
    opts.set(key.slice(2), value);
  }
  const inDir = opts.get("in");
  const sliceText = opts.get("slice");
  const outPath = opts.get("out");
  if (!inDir || !sliceText || !outPath) {
    process.stderr.write(usage() + "\n");
    return 1;
  }
  try {
    const fig = renderDensityFigure({
      inputDir: inDir,
      slice: parseSliceArg(sliceText),
      outPath,
      width: opts.has("width") ? Number(opts.get("width")) : undefined,
      height: opts.has("height") ? Number(opts.get("height")) : undefined,
      title: opts.get("title"),
    });
    process.stdout.write(
      `wrote ${fig.outPath} (${fig.curves.length} curve(s): ` +
      `${fig.curves.map((c) => c.label).join(", ")})\n`
    );
    return 0;
  } catch (err) {
    if (err instanceof MissingSliceError || err instanceof SchemaMismatchError) {
      process.stderr.write(`render error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`render error: ${err}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
