/** render --kind fig6 --in data.csv --out fig6.png
 *
 * Validates the CSV against the figure kind's expected columns (mismatch is a
 * hard error), renders a fixed-size PNG deterministically, and writes it
 * atomically; on any error no output file is produced.  Exit codes: 0 ok,
 * 2 usage/schema error, 3 render failure. */

import { readFileSync, renameSync, unlinkSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { parseCsv, SchemaError } from "./csv.js";
import { buildFigure, FIGURE_KINDS, FigureKind } from "./figures.js";
import { renderFigure } from "./render.js";

export function renderToPng(kind: FigureKind, csvText: string): Buffer {
  const model = buildFigure(kind, parseCsv(csvText));
  return renderFigure(model).encodePng();
}

function parseArgs(argv: string[]): { kind: FigureKind; input: string; output: string } {
  const opts: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (!key.startsWith("--") || val === undefined) {
      throw new SchemaError(`cannot parse arguments near '${key}'`);
    }
    opts[key.slice(2)] = val;
  }
  for (const need of ["kind", "in", "out"]) {
    if (!(need in opts)) throw new SchemaError(`missing required option --${need}`);
  }
  const extras = Object.keys(opts).filter((k) => !["kind", "in", "out"].includes(k));
  if (extras.length > 0) throw new SchemaError(`unknown option(s): ${extras.join(", ")}`);
  if (!FIGURE_KINDS.includes(opts.kind as FigureKind)) {
    throw new SchemaError(`--kind must be one of ${FIGURE_KINDS.join(", ")}`);
  }
  if (!opts.out.endsWith(".png")) {
    throw new SchemaError("--out must be a .png path");
  }
  return { kind: opts.kind as FigureKind, input: opts.in, output: opts.out };
}

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const csvText = readFileSync(args.input, "utf-8");
    const png = renderToPng(args.kind, csvText);
    const tmp = join(dirname(args.output) || ".", `.render-${process.pid}.part`);
    writeFileSync(tmp, png);
    try {
      renameSync(tmp, args.output);
    } catch (err) {
      unlinkSync(tmp);
      throw err;
    }
    console.log(`${args.kind}: ${png.length} bytes -> ${args.output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    console.error(`render failure: ${(err as Error).message}`);
    return 3;
  }
}

const isMain = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split("/").pop() as string);
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
