#!/usr/bin/env node
/** plots --in <export dir> --out <figure dir> [--kinds boxplot,heatmap,...] */

import { FIGURE_KINDS, FigureKind, renderAll } from "./render.js";

interface Args {
  input: string;
  out: string;
  kinds: FigureKind[];
}

export function parseArgs(argv: string[]): Args {
  let input = "";
  let out = "";
  let kinds: FigureKind[] = [...FIGURE_KINDS];
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--in":
        input = value ?? "";
        i += 1;
        break;
      case "--out":
        out = value ?? "";
        i += 1;
        break;
      case "--kinds": {
        const requested = (value ?? "").split(",").filter((k) => k.length > 0);
        for (const kind of requested) {
          if (!FIGURE_KINDS.includes(kind as FigureKind)) {
            throw new UsageError(`unknown figure kind: ${kind}`);
          }
        }
        kinds = requested as FigureKind[];
        i += 1;
        break;
      }
      default:
        throw new UsageError(`unknown flag: ${flag}`);
    }
  }
  if (!input || !out) {
    throw new UsageError("usage: plots --in <export dir> --out <figure dir> [--kinds a,b,...]");
  }
  return { input, out, kinds };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (error) {
    console.error((error as Error).message);
    return 2;
  }
  try {
    const written = renderAll(args.input, args.out, args.kinds);
    console.log(`wrote ${written.length} figures to ${args.out}`);
    return 0;
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 1;
  }
}

import { pathToFileURL } from "node:url";

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
