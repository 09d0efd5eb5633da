import { Row, num, unique } from "../csv.js";
import { extent, formatTick, linearScale, niceTicks } from "../scale.js";
import { el, line, polyline, svgDocument, textEl } from "../svg.js";

const PANEL_W = 380;
const PANEL_H = 170;
const MARGIN = { top: 42, right: 18, bottom: 34, left: 64 };

/** One-dimensional projection of the best-known optimum position over time,
 * one panel per experiment. */
export function renderTrajectories(trajectories: Row[]): string {
  const experiments = unique(trajectories, "experiment").sort();
  const width = MARGIN.left + PANEL_W + MARGIN.right;
  const height = MARGIN.top + experiments.length * (PANEL_H + 28) + MARGIN.bottom;
  const body: string[] = [];
  body.push(textEl(MARGIN.left, 22, "Optimum position trajectory (first principal direction)",
    { "font-size": 15, "font-weight": "bold" }));

  experiments.forEach((experiment, index) => {
    const py = MARGIN.top + index * (PANEL_H + 28);
    const series = trajectories.filter((r) => r.experiment === experiment);
    const ts = series.map((r) => num(r, "t"));
    const values = series.map((r) => num(r, "projection"));
    const x = linearScale(extent(ts), [MARGIN.left, MARGIN.left + PANEL_W]);
    const y = linearScale(extent(values), [py + PANEL_H, py + 16]);

    body.push(textEl(MARGIN.left + PANEL_W / 2, py + 8, experiment,
      { "font-size": 12, "text-anchor": "middle", "font-style": "italic" }));
    body.push(line(MARGIN.left, py + 16, MARGIN.left, py + PANEL_H));
    body.push(line(MARGIN.left, py + PANEL_H, MARGIN.left + PANEL_W, py + PANEL_H));
    for (const tick of niceTicks(y.domain[0], y.domain[1], 4)) {
      body.push(line(MARGIN.left - 3, y(tick), MARGIN.left, y(tick)));
      body.push(textEl(MARGIN.left - 6, y(tick) + 4, formatTick(tick),
        { "font-size": 9, "text-anchor": "end" }));
    }
    for (const tick of niceTicks(x.domain[0], x.domain[1], 6)) {
      body.push(textEl(x(tick), py + PANEL_H + 14, formatTick(tick),
        { "font-size": 9, "text-anchor": "middle" }));
    }
    const points = series.map((r): [number, number] =>
      [x(num(r, "t")), y(num(r, "projection"))]);
    body.push(polyline(points, { stroke: "#2b8cbe", "stroke-width": 1.4,
      class: `trajectory-${experiment}` }));
    for (const [cx, cy] of points) {
      body.push(el("circle", { cx, cy, r: 1.8, fill: "#2b8cbe" }));
    }
  });
  return svgDocument(width, height, body);
}
