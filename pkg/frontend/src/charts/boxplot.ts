import { Row, num, unique } from "../csv.js";
import { extent, formatTick, linearScale, niceTicks } from "../scale.js";
import { boxSummary } from "../stats.js";
import { line, rect, svgDocument, tauColor, textEl } from "../svg.js";

const PANEL_W = 330;
const PANEL_H = 230;
const MARGIN = { top: 46, right: 14, bottom: 40, left: 58 };

/** Distribution of one per-run measure, boxed per method and hued per tau,
 * one panel per function x experiment pair. */
export function renderBoxplot(summary: Row[], measure: string): string {
  const rows = summary.filter((r) => r[measure] !== "" && r[measure] !== undefined);
  const panels = panelKeys(rows);
  const methods = unique(rows, "method").sort();
  const taus = unique(rows, "tau").sort((a, b) => Number(a) - Number(b));
  const columns = Math.min(2, Math.max(panels.length, 1));
  const width = MARGIN.left + columns * PANEL_W + MARGIN.right;
  const rowsOfPanels = Math.ceil(panels.length / columns);
  const height = MARGIN.top + rowsOfPanels * PANEL_H + MARGIN.bottom;
  const body: string[] = [];

  body.push(textEl(MARGIN.left, 22, `${measure.toUpperCase()} distribution per method`,
    { "font-size": 15, "font-weight": "bold" }));
  taus.forEach((tau, i) => {
    const x = MARGIN.left + 240 * i + 220;
    body.push(rect(x, 12, 14, 14, { fill: tauColor(tau) }));
    body.push(textEl(x + 18, 24, `tau=${tau}`, { "font-size": 12 }));
  });

  panels.forEach((panel, index) => {
    const px = MARGIN.left + (index % columns) * PANEL_W;
    const py = MARGIN.top + Math.floor(index / columns) * PANEL_H;
    body.push(...renderPanel(rows, panel, methods, taus, px, py, measure));
  });
  return svgDocument(width, height, body);
}

function panelKeys(rows: Row[]): string[] {
  const keys = new Set<string>();
  for (const row of rows) keys.add(`${row.function}|${row.experiment}`);
  return [...keys].sort();
}

function renderPanel(rows: Row[], panel: string, methods: string[], taus: string[],
                     px: number, py: number, measure: string): string[] {
  const [fn, experiment] = panel.split("|");
  const inPanel = rows.filter((r) => r.function === fn && r.experiment === experiment);
  const values = inPanel.map((r) => num(r, measure));
  const [lo, hi] = extent(values);
  const pad = (hi - lo) * 0.08;
  const innerW = PANEL_W - 50;
  const innerH = PANEL_H - 58;
  const y = linearScale([Math.min(lo - pad, 0), hi + pad], [py + innerH, py + 18]);
  const out: string[] = [];

  out.push(textEl(px + innerW / 2, py + 12, `${fn} / ${experiment}`,
    { "font-size": 12, "text-anchor": "middle", "font-style": "italic" }));
  out.push(line(px, py + 18, px, py + innerH));
  out.push(line(px, py + innerH, px + innerW, py + innerH));
  for (const tick of niceTicks(y.domain[0], y.domain[1], 4)) {
    out.push(line(px - 3, y(tick), px, y(tick)));
    out.push(textEl(px - 6, y(tick) + 4, formatTick(tick),
      { "font-size": 9, "text-anchor": "end" }));
  }

  const groupWidth = innerW / Math.max(methods.length, 1);
  const boxWidth = Math.min(26, groupWidth / (taus.length + 1));
  methods.forEach((method, mi) => {
    const cx = px + groupWidth * (mi + 0.5);
    out.push(textEl(cx, py + innerH + 16, method, { "font-size": 11, "text-anchor": "middle" }));
    taus.forEach((tau, ti) => {
      const sample = inPanel
        .filter((r) => r.method === method && r.tau === tau)
        .map((r) => num(r, measure));
      if (sample.length === 0) return;
      const box = boxSummary(sample);
      const bx = cx + (ti - (taus.length - 1) / 2) * (boxWidth + 6) - boxWidth / 2;
      const color = tauColor(tau);
      out.push(line(bx + boxWidth / 2, y(box.min), bx + boxWidth / 2, y(box.q1),
        { stroke: color }));
      out.push(line(bx + boxWidth / 2, y(box.q3), bx + boxWidth / 2, y(box.max),
        { stroke: color }));
      out.push(rect(bx, y(box.q3), boxWidth, Math.max(y(box.q1) - y(box.q3), 0.5),
        { fill: color, "fill-opacity": 0.45, stroke: color, class: "box" }));
      out.push(line(bx, y(box.median), bx + boxWidth, y(box.median),
        { stroke: color, "stroke-width": 2 }));
    });
  });
  return out;
}
