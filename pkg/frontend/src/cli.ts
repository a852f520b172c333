#!/usr/bin/env node
/**
 * Render a sweep CSV (plus its optional .resonances.json sidecar) to SVG.
 *
 *   ionres-figures <sweep.csv> <resonances|coherence_fit> <out.svg> [--log-y]
 *
 * The sidecar is looked up next to the CSV (<name>.resonances.json); figures
 * render without it, minus guide lines and the precomputed fit.  Output is
 * written atomically (temp file + rename).  Exit codes: 0 ok, 1 bad
 * usage/schema/empty input.
 */

import { readFileSync, renameSync, writeFileSync } from "node:fs";
import { basename, dirname, extname, join } from "node:path";

import { EmptyInput, SchemaMismatch, Sidecar, parseSidecar, parseSweepCsv } from "./data.js";
import { renderCoherenceFigure, renderResonanceFigure } from "./figures.js";

export function sidecarPathFor(csvPath: string): string {
  const base = basename(csvPath, extname(csvPath));
  return join(dirname(csvPath), `${base}.resonances.json`);
}

export function renderToString(
  csvText: string,
  sidecarText: string | null,
  kind: string,
  logY: boolean,
): string {
  const rows = parseSweepCsv(csvText);
  const sidecar: Sidecar | null = sidecarText === null ? null : parseSidecar(sidecarText);
  if (kind === "resonances") {
    return renderResonanceFigure(rows, sidecar, { logY });
  }
  if (kind === "coherence_fit") {
    return renderCoherenceFigure(rows, sidecar);
  }
  throw new SchemaMismatch(
    `unknown figure kind ${JSON.stringify(kind)}; expected resonances or coherence_fit`,
  );
}

function writeAtomic(path: string, content: string): void {
  const tmp = join(dirname(path), `.${basename(path)}.tmp`);
  writeFileSync(tmp, content);
  renameSync(tmp, path);
}

export function main(argv: string[]): number {
  const args = argv.filter((a) => a !== "--log-y");
  const logY = argv.includes("--log-y");
  if (args.length !== 3) {
    console.error(
      "usage: ionres-figures <sweep.csv> <resonances|coherence_fit> <out.svg> [--log-y]",
    );
    return 1;
  }
  const [csvPath, kind, outPath] = args as [string, string, string];
  try {
    const csvText = readFileSync(csvPath, "utf8");
    let sidecarText: string | null = null;
    try {
      sidecarText = readFileSync(sidecarPathFor(csvPath), "utf8");
    } catch {
      sidecarText = null; // optional
    }
    writeAtomic(outPath, renderToString(csvText, sidecarText, kind, logY));
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatch || err instanceof EmptyInput) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && basename(process.argv[1]).startsWith("cli")) {
  process.exit(main(process.argv.slice(2)));
}
