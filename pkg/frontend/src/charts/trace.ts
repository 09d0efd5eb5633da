import { Row, num, unique } from "../csv.js";
import { extent, formatTick, linearScale, niceTicks } from "../scale.js";
import { line, methodColor, polyline, rect, svgDocument, textEl } from "../svg.js";

const PANEL_W = 420;
const PANEL_H = 190;
const MARGIN = { top: 48, right: 16, bottom: 36, left: 66 };

/** Best feasible objective over the run, one line per method, one panel per
 * function x experiment x tau. Infeasible stretches break the line. */
export function renderTraces(traces: Row[]): string {
  const panels = unique(
    traces.map((r) => ({ key: `${r.function}|${r.experiment}|${r.tau}` } as Row)), "key");
  const methods = unique(traces, "method").sort();
  const width = MARGIN.left + PANEL_W + MARGIN.right;
  const height = MARGIN.top + panels.length * (PANEL_H + 26) + MARGIN.bottom;
  const body: string[] = [];

  body.push(textEl(MARGIN.left, 22, "Best feasible objective over time (run 0)",
    { "font-size": 15, "font-weight": "bold" }));
  methods.forEach((method, i) => {
    const x = MARGIN.left + 250 + i * 90;
    body.push(rect(x, 12, 14, 4, { fill: methodColor(method) }));
    body.push(textEl(x + 18, 18, method, { "font-size": 12 }));
  });

  panels.forEach((panel, index) => {
    const [fn, experiment, tau] = panel.split("|");
    const py = MARGIN.top + index * (PANEL_H + 26);
    const inPanel = traces.filter(
      (r) => r.function === fn && r.experiment === experiment && r.tau === tau);
    const values = inPanel.map((r) => num(r, "f_best")).filter(Number.isFinite);
    const steps = inPanel.map((r) => num(r, "step"));
    const x = linearScale(extent(steps), [MARGIN.left, MARGIN.left + PANEL_W]);
    const [lo, hi] = extent(values);
    const y = linearScale([Math.min(0, lo), hi], [py + PANEL_H, py + 16]);

    body.push(textEl(MARGIN.left + PANEL_W / 2, py + 8, `${fn} / ${experiment} / tau=${tau}`,
      { "font-size": 11, "text-anchor": "middle", "font-style": "italic" }));
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

    for (const method of methods) {
      const series = inPanel.filter((r) => r.method === method);
      let segment: Array<[number, number]> = [];
      const flush = () => {
        if (segment.length > 1) {
          body.push(polyline(segment, { stroke: methodColor(method), "stroke-width": 1.2,
            class: `trace-${method}` }));
        }
        segment = [];
      };
      for (const row of series) {
        const value = num(row, "f_best");
        if (Number.isFinite(value)) {
          segment.push([x(num(row, "step")), y(value)]);
        } else {
          flush();
        }
      }
      flush();
    }
  });
  return svgDocument(width, height, body);
}
