/** CSV ingestion for the thermokerr dataset contract: a header row, numeric
 * data rows, and an optional trailing `# config: ...` provenance line. */

export interface Dataset {
  header: string[];
  rows: Record<string, string>[];
  config: Record<string, string>;
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Dataset {
  const lines = text.split("\n").map((l) => l.trimEnd()).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("CSV is empty");
  }
  const config: Record<string, string> = {};
  const body: string[] = [];
  for (const line of lines) {
    if (line.startsWith("# config:")) {
      for (const tok of line.slice("# config:".length).trim().split(/\s+/)) {
        const eq = tok.indexOf("=");
        if (eq > 0) config[tok.slice(0, eq)] = tok.slice(eq + 1);
      }
    } else if (line.startsWith("#")) {
      continue;
    } else {
      body.push(line);
    }
  }
  if (body.length === 0) {
    throw new SchemaError("CSV has no header row");
  }
  const header = body[0].split(",").map((h) => h.trim());
  const rows = body.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(`row ${i + 1} has ${parts.length} fields, expected ${header.length}`);
    }
    const row: Record<string, string> = {};
    header.forEach((h, j) => (row[h] = parts[j].trim()));
    return row;
  });
  return { header, rows, config };
}

export function requireColumns(data: Dataset, expected: string[], kind: string): void {
  for (const col of expected) {
    if (!data.header.includes(col)) {
      throw new SchemaError(
        `figure '${kind}' needs column '${col}'; CSV has [${data.header.join(", ")}]`,
      );
    }
  }
}

export function numericColumn(data: Dataset, name: string): number[] {
  return data.rows.map((r, i) => {
    const v = Number(r[name]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`row ${i + 1}: column '${name}' is not numeric: '${r[name]}'`);
    }
    return v;
  });
}
