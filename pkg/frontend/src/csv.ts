/** Minimal CSV reader for the export bundle (plain comma-separated, no quoting). */

export type Row = Record<string, string>;

export function parseCsv(text: string): Row[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) return [];
  const header = lines[0].split(",");
  return lines.slice(1).map((line) => {
    const parts = line.split(",");
    const row: Row = {};
    header.forEach((name, i) => {
      row[name] = parts[i] ?? "";
    });
    return row;
  });
}

export function num(row: Row, key: string): number {
  return Number(row[key]);
}

export function unique(rows: Row[], key: string): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const row of rows) {
    const value = row[key];
    if (!seen.has(value)) {
      seen.add(value);
      out.push(value);
    }
  }
  return out;
}
