import { Row, num, unique } from "../csv.js";
import { NS_COLOR, rect, svgDocument, textEl } from "../svg.js";

const CELL = 56;
const PANEL_GAP = 34;
const LEFT = 96;
const TOP = 72;

/** Shade for a significant pairwise p-value: smaller p, deeper green. */
export function significanceColor(p: number): string {
  const depth = Math.max(0, Math.min(1, -Math.log10(Math.max(p, 1e-12)) / 6));
  const green = [229 - 160 * depth, 245 - 140 * depth, 224 - 150 * depth];
  return `rgb(${green.map((v) => Math.round(v)).join(",")})`;
}

/** Pairwise-comparison matrices, one panel per function x experiment x tau;
 * pink cells mark pairs that are not significantly different. */
export function renderHeatmap(significance: Row[]): string {
  const panels = unique(
    significance.map((r) => ({ key: `${r.function}|${r.experiment}|${r.tau}` } as Row)),
    "key",
  );
  const methods = unique(significance, "method_a").sort();
  const size = methods.length * CELL;
  const columns = Math.min(3, Math.max(panels.length, 1));
  const width = LEFT + columns * (size + PANEL_GAP) + 40;
  const rowsOfPanels = Math.ceil(panels.length / columns);
  const height = TOP + rowsOfPanels * (size + PANEL_GAP + 28) + 30;
  const body: string[] = [];

  body.push(textEl(LEFT, 24, "Pairwise comparison of methods (adjusted p-values)",
    { "font-size": 15, "font-weight": "bold" }));
  // legend: NS swatch plus the significance gradient
  body.push(rect(LEFT, 36, 14, 14, { fill: NS_COLOR, stroke: "#888", class: "legend-ns" }));
  body.push(textEl(LEFT + 18, 48, "NS (p >= 0.05)", { "font-size": 12, class: "legend-ns-label" }));
  const gradientStops: Array<[string, number]> = [["0.04", 0.04], ["1e-3", 1e-3], ["1e-6", 1e-6]];
  gradientStops.forEach(([label, p], i) => {
    const x = LEFT + 150 + i * 84;
    body.push(rect(x, 36, 14, 14, { fill: significanceColor(p), stroke: "#888" }));
    body.push(textEl(x + 18, 48, `p=${label}`, { "font-size": 12 }));
  });

  panels.forEach((panel, index) => {
    const [fn, experiment, tau] = panel.split("|");
    const px = LEFT + (index % columns) * (size + PANEL_GAP);
    const py = TOP + Math.floor(index / columns) * (size + PANEL_GAP + 28);
    body.push(textEl(px + size / 2, py - 8, `${fn} / ${experiment} / tau=${tau}`,
      { "font-size": 11, "text-anchor": "middle", "font-style": "italic" }));
    const cells = significance.filter(
      (r) => r.function === fn && r.experiment === experiment && r.tau === tau);
    methods.forEach((ma, i) => {
      body.push(textEl(px - 6, py + i * CELL + CELL / 2 + 4, ma,
        { "font-size": 10, "text-anchor": "end" }));
      body.push(textEl(px + i * CELL + CELL / 2, py + size + 14, ma,
        { "font-size": 10, "text-anchor": "middle" }));
      methods.forEach((mb, j) => {
        const cell = cells.find((r) => r.method_a === ma && r.method_b === mb);
        if (!cell) return;
        const p = num(cell, "p_adjusted");
        const ns = cell.not_significant === "1";
        body.push(rect(px + j * CELL, py + i * CELL, CELL - 2, CELL - 2, {
          fill: ns ? NS_COLOR : significanceColor(p),
          stroke: "#ffffff",
          class: ns ? "cell-ns" : "cell-significant",
        }));
        body.push(textEl(px + j * CELL + (CELL - 2) / 2, py + i * CELL + CELL / 2 + 3,
          ns ? "NS" : formatP(p), { "font-size": 9, "text-anchor": "middle" }));
      });
    });
  });
  return svgDocument(width, height, body);
}

function formatP(p: number): string {
  if (p >= 0.01) return p.toFixed(2);
  return p.toExponential(0);
}
