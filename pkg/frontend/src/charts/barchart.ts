import { Row, num, unique } from "../csv.js";
import { formatTick, linearScale, niceTicks } from "../scale.js";
import { line, rect, svgDocument, tauColor, textEl } from "../svg.js";

const PANEL_W = 340;
const PANEL_H = 210;
const MARGIN = { top: 48, right: 16, bottom: 40, left: 58 };

/** Normalized tracking error per method (best method = 1), bars hued per tau
 * with the cross-frequency mean alongside; one panel per function x experiment. */
export function renderBarchart(mofNorm: Row[]): string {
  const panels = unique(
    mofNorm.map((r) => ({ key: `${r.function}|${r.experiment}` } as Row)), "key");
  const methods = unique(mofNorm, "method").sort();
  const taus = unique(mofNorm, "tau").sort(tauOrder);
  const columns = Math.min(2, Math.max(panels.length, 1));
  const width = MARGIN.left + columns * PANEL_W + MARGIN.right;
  const height = MARGIN.top + Math.ceil(panels.length / columns) * PANEL_H + MARGIN.bottom;
  const body: string[] = [];

  body.push(textEl(MARGIN.left, 22, "Normalized tracking error per method",
    { "font-size": 15, "font-weight": "bold" }));
  taus.forEach((tau, i) => {
    const x = MARGIN.left + 150 + i * 92;
    body.push(rect(x, 12, 14, 14, { fill: tauColor(tau) }));
    body.push(textEl(x + 18, 24, tau === "mean" ? "mean" : `tau=${tau}`, { "font-size": 12 }));
  });

  panels.forEach((panel, index) => {
    const [fn, experiment] = panel.split("|");
    const px = MARGIN.left + (index % columns) * PANEL_W;
    const py = MARGIN.top + Math.floor(index / columns) * PANEL_H;
    const inPanel = mofNorm.filter((r) => r.function === fn && r.experiment === experiment);
    const top = Math.max(...inPanel.map((r) => num(r, "mof_norm")), 1.5);
    const innerW = PANEL_W - 46;
    const innerH = PANEL_H - 56;
    const y = linearScale([0, top * 1.06], [py + innerH, py + 16]);

    body.push(textEl(px + innerW / 2, py + 10, `${fn} / ${experiment}`,
      { "font-size": 12, "text-anchor": "middle", "font-style": "italic" }));
    body.push(line(px, py + 16, px, py + innerH));
    body.push(line(px, py + innerH, px + innerW, py + innerH));
    for (const tick of niceTicks(0, top, 4)) {
      body.push(line(px - 3, y(tick), px, y(tick)));
      body.push(textEl(px - 6, y(tick) + 4, formatTick(tick),
        { "font-size": 9, "text-anchor": "end" }));
    }
    body.push(line(px, y(1), px + innerW, y(1),
      { stroke: "#999", "stroke-dasharray": "4 3" }));

    const groupWidth = innerW / Math.max(methods.length, 1);
    const barWidth = Math.min(20, groupWidth / (taus.length + 1));
    methods.forEach((method, mi) => {
      const cx = px + groupWidth * (mi + 0.5);
      body.push(textEl(cx, py + innerH + 16, method,
        { "font-size": 11, "text-anchor": "middle" }));
      taus.forEach((tau, ti) => {
        const row = inPanel.find((r) => r.method === method && r.tau === tau);
        if (!row) return;
        const value = num(row, "mof_norm");
        const bx = cx + (ti - (taus.length - 1) / 2) * (barWidth + 4) - barWidth / 2;
        body.push(rect(bx, y(value), barWidth, Math.max(y(0) - y(value), 0.5),
          { fill: tauColor(tau), class: "bar" }));
      });
    });
  });
  return svgDocument(width, height, body);
}

function tauOrder(a: string, b: string): number {
  const rank = (v: string) => (v === "mean" ? Number.POSITIVE_INFINITY : Number(v));
  return rank(a) - rank(b);
}
