/** String-based SVG construction: deterministic output, no DOM required. */

export type Attrs = Record<string, string | number>;

export function escapeText(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const attrText = Object.entries(attrs)
    .map(([key, value]) => ` ${key}="${value}"`)
    .join("");
  if (children.length === 0) return `<${tag}${attrText}/>`;
  return `<${tag}${attrText}>${children.join("")}</${tag}>`;
}

export function textEl(x: number, y: number, content: string, attrs: Attrs = {}): string {
  const base: Attrs = { x: round(x), y: round(y), "font-family": "sans-serif", ...attrs };
  const attrText = Object.entries(base)
    .map(([key, value]) => ` ${key}="${value}"`)
    .join("");
  return `<text${attrText}>${escapeText(content)}</text>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs = {}): string {
  return el("line", { x1: round(x1), y1: round(y1), x2: round(x2), y2: round(y2),
    stroke: "#333", "stroke-width": 1, ...attrs });
}

export function rect(x: number, y: number, w: number, h: number, attrs: Attrs = {}): string {
  return el("rect", { x: round(x), y: round(y), width: round(w), height: round(h), ...attrs });
}

export function polyline(points: Array<[number, number]>, attrs: Attrs = {}): string {
  const text = points.map(([x, y]) => `${round(x)},${round(y)}`).join(" ");
  return el("polyline", { points: text, fill: "none", ...attrs });
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}">`,
    rect(0, 0, width, height, { fill: "#ffffff" }),
    ...body,
    "</svg>",
  ].join("\n");
}

export function round(value: number): number {
  return Math.round(value * 100) / 100;
}

/** Hue per change frequency, matching across every figure. */
export const TAU_COLORS: Record<string, string> = {
  "0.5": "#d95f02",
  "1.0": "#7570b3",
  "4.0": "#1b9e77",
  mean: "#636363",
};

export const METHOD_COLORS: Record<string, string> = {
  noNN: "#e41a1c",
  NNW: "#377eb8",
  NNR: "#4daf4a",
};

export const NS_COLOR = "#f8c8dc"; // pink marks not-significantly-different pairs

export function tauColor(tau: string): string {
  return TAU_COLORS[tau] ?? "#999999";
}

export function methodColor(method: string): string {
  return METHOD_COLORS[method] ?? "#999999";
}
