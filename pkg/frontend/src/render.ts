import { readFileSync, writeFileSync, mkdirSync, existsSync } from "node:fs";
import { join } from "node:path";

import { parseCsv, Row } from "./csv.js";
import { renderBarchart } from "./charts/barchart.js";
import { renderBoxplot } from "./charts/boxplot.js";
import { renderHeatmap } from "./charts/heatmap.js";
import { renderNnTimeTable } from "./charts/table.js";
import { renderTraces } from "./charts/trace.js";
import { renderTrajectories } from "./charts/trajectory.js";

export const FIGURE_KINDS = ["boxplot", "heatmap", "trace", "trajectory",
  "barchart", "table"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface ExportBundle {
  summary: Row[];
  significance: Row[];
  traces: Row[];
  trajectories: Row[];
  mofNorm: Row[];
  nnTime: Row[];
}

function readRows(dir: string, name: string): Row[] {
  const path = join(dir, name);
  if (!existsSync(path)) {
    throw new Error(`missing artifact file: ${path}`);
  }
  return parseCsv(readFileSync(path, "utf-8"));
}

export function loadExport(dir: string): ExportBundle {
  return {
    summary: readRows(dir, "summary.csv"),
    significance: readRows(dir, "significance.csv"),
    traces: readRows(dir, "traces.csv"),
    trajectories: readRows(dir, "trajectories.csv"),
    mofNorm: readRows(dir, "mof_norm.csv"),
    nnTime: readRows(dir, "nn_time.csv"),
  };
}

/** Render the requested figure kinds; returns the written file names. */
export function renderAll(exportDir: string, outDir: string,
                          kinds: readonly FigureKind[] = FIGURE_KINDS): string[] {
  const bundle = loadExport(exportDir);
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  const write = (name: string, payload: string) => {
    writeFileSync(join(outDir, name), payload);
    written.push(name);
  };
  for (const kind of kinds) {
    switch (kind) {
      case "boxplot":
        write("boxplot_mof.svg", renderBoxplot(bundle.summary, "mof"));
        write("boxplot_arr.svg", renderBoxplot(bundle.summary, "arr"));
        write("boxplot_sr.svg", renderBoxplot(bundle.summary, "sr"));
        break;
      case "heatmap":
        write("heatmap_significance.svg", renderHeatmap(bundle.significance));
        break;
      case "trace":
        write("trace_fitness.svg", renderTraces(bundle.traces));
        break;
      case "trajectory":
        write("trajectory_optimum.svg", renderTrajectories(bundle.trajectories));
        break;
      case "barchart":
        write("barchart_mof_norm.svg", renderBarchart(bundle.mofNorm));
        break;
      case "table":
        write("table_nn_time.svg", renderNnTimeTable(bundle.nnTime));
        break;
      default: {
        const never: never = kind;
        throw new Error(`unknown figure kind ${never}`);
      }
    }
  }
  return written;
}
