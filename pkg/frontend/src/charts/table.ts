import { Row, num, unique } from "../csv.js";
import { line, rect, svgDocument, textEl } from "../svg.js";

const CELL_W = 108;
const CELL_H = 26;
const LEFT = 170;
const TOP = 74;

/** Fraction of the time budget spent in the predictor, mean (+-std) per cell,
 * rows per function x method and columns per experiment x tau. */
export function renderNnTimeTable(nnTime: Row[]): string {
  const rows = nnTime.filter((r) => r.method !== "noNN");
  const columns = unique(
    rows.map((r) => ({ key: `${r.experiment}|${r.tau}` } as Row)), "key").sort();
  const lines = unique(
    rows.map((r) => ({ key: `${r.function}|${r.method}` } as Row)), "key").sort();
  const width = LEFT + columns.length * CELL_W + 24;
  const height = TOP + (lines.length + 1) * CELL_H + 30;
  const body: string[] = [];

  body.push(textEl(24, 24, "Predictor share of the optimization time",
    { "font-size": 15, "font-weight": "bold" }));
  body.push(textEl(24, 42, "mean (+-std) of per-run fractions",
    { "font-size": 11, fill: "#555" }));

  columns.forEach((column, i) => {
    const [experiment, tau] = column.split("|");
    const x = LEFT + i * CELL_W + CELL_W / 2;
    body.push(textEl(x, TOP - 8, `${experiment} tau=${tau}`,
      { "font-size": 10, "text-anchor": "middle", "font-weight": "bold" }));
  });

  lines.forEach((rowKey, r) => {
    const [fn, method] = rowKey.split("|");
    const y = TOP + r * CELL_H;
    if (r % 2 === 0) {
      body.push(rect(24, y, width - 48, CELL_H, { fill: "#f3f3f3" }));
    }
    body.push(textEl(28, y + CELL_H / 2 + 4, `${fn} / ${method}`,
      { "font-size": 11 }));
    columns.forEach((column, c) => {
      const [experiment, tau] = column.split("|");
      const cell = rows.find((row) => row.function === fn && row.method === method
        && row.experiment === experiment && row.tau === tau);
      const x = LEFT + c * CELL_W + CELL_W / 2;
      if (cell) {
        const label = `${num(cell, "mean").toFixed(2)} (±${num(cell, "std").toFixed(2)})`;
        body.push(textEl(x, y + CELL_H / 2 + 4, label,
          { "font-size": 10, "text-anchor": "middle", class: "nn-time-cell" }));
      }
    });
  });
  const bottom = TOP + lines.length * CELL_H;
  body.push(line(24, TOP - 2, width - 24, TOP - 2));
  body.push(line(24, bottom + 2, width - 24, bottom + 2));
  return svgDocument(width, height, body);
}
