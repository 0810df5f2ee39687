/** Figure catalogue: which CSV columns each kind expects and how its series
 * are assembled.  Reference curves (SQL/HL for the phase-error figure) are
 * drawn dashed. */

import { Dataset, numericColumn, requireColumns, SchemaError } from "./csv.js";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: [number, number, number];
  dashed?: boolean;
  markers?: boolean;
}

export interface FigureModel {
  kind: FigureKind;
  title: string;
  xLabel: string;
  yLabel: string;
  logX: boolean;
  logY: boolean;
  series: Series[];
}

export type FigureKind = "fig3" | "fig6" | "fig8a" | "fig8b";

export const FIGURE_KINDS: FigureKind[] = ["fig3", "fig6", "fig8a", "fig8b"];

const PALETTE: [number, number, number][] = [
  [199, 60, 38],   // red
  [34, 103, 166],  // blue
  [42, 130, 60],   // green
  [150, 85, 170],  // purple
  [190, 130, 30],  // ochre
];

export const EXPECTED_COLUMNS: Record<FigureKind, string[]> = {
  fig3: ["chi", "ratio_1f", "ratio_4f", "stderr_1f", "stderr_4f"],
  fig6: ["nbar", "dphi_min", "dphi_sql", "dphi_hl", "kind", "chi"],
  fig8a: ["t", "eta", "wc", "mean_na_out"],
  fig8b: ["nbar_a", "eta_max", "process"],
};

export function buildFigure(kind: FigureKind, data: Dataset): FigureModel {
  requireColumns(data, EXPECTED_COLUMNS[kind], kind);
  if (data.rows.length === 0) {
    throw new SchemaError(`figure '${kind}': CSV contains no data rows`);
  }
  switch (kind) {
    case "fig3":
      return {
        kind,
        title: "output/input intensity ratio vs kerr strength",
        xLabel: "chi",
        yLabel: "ratio",
        logX: false,
        logY: false,
        series: [
          { label: "mode 1f", x: numericColumn(data, "chi"), y: numericColumn(data, "ratio_1f"), color: PALETTE[0] },
          { label: "mode 4f", x: numericColumn(data, "chi"), y: numericColumn(data, "ratio_4f"), color: PALETTE[1] },
        ],
      };
    case "fig6": {
      const inputKind = data.rows[0].kind ?? "";
      return {
        kind,
        title: `minimal phase error (${inputKind} input)`,
        xLabel: "nbar",
        yLabel: "dphi min",
        logX: true,
        logY: true,
        series: [
          { label: inputKind || "dphi min", x: numericColumn(data, "nbar"), y: numericColumn(data, "dphi_min"), color: PALETTE[0], markers: true },
          { label: "sql", x: numericColumn(data, "nbar"), y: numericColumn(data, "dphi_sql"), color: PALETTE[1], dashed: true },
          { label: "hl", x: numericColumn(data, "nbar"), y: numericColumn(data, "dphi_hl"), color: PALETTE[2], dashed: true },
        ],
      };
    }
    case "fig8a":
      return {
        kind,
        title: "work-capacity efficiency trace",
        xLabel: "coupling * t",
        yLabel: "eta",
        logX: false,
        logY: false,
        series: [
          { label: "eta", x: numericColumn(data, "t"), y: numericColumn(data, "eta"), color: PALETTE[0] },
        ],
      };
    case "fig8b": {
      const nbar = numericColumn(data, "nbar_a");
      const eta = numericColumn(data, "eta_max");
      const byProcess = new Map<string, { x: number[]; y: number[] }>();
      data.rows.forEach((row, i) => {
        const key = row.process;
        if (!byProcess.has(key)) byProcess.set(key, { x: [], y: [] });
        byProcess.get(key)!.x.push(nbar[i]);
        byProcess.get(key)!.y.push(eta[i]);
      });
      const series: Series[] = [...byProcess.entries()].map(([label, pts], i) => ({
        label,
        x: pts.x,
        y: pts.y,
        color: PALETTE[i % PALETTE.length],
        markers: true,
      }));
      return {
        kind,
        title: "maximal efficiency vs input photon number",
        xLabel: "nbar a",
        yLabel: "eta max",
        logX: false,
        logY: false,
        series,
      };
    }
  }
}
