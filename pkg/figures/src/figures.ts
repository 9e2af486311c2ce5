/** Assemble the six figure families from the solver CSV schemas. */

import { DataError, Table, loadCsv, numeric, requireColumns } from "./csv.js";
import { PanelOptions, Series, panelWidth, renderPanel, svgDocument } from "./plot.js";
import { FigureSpec } from "./spec.js";

function sortedUnique(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function seriesNote(series: Series[]): string | undefined {
  const total = series.reduce((n, s) => n + s.points.length, 0);
  return total === 1 ? "single data point" : undefined;
}

/** Group the 7-column error report into one curve per group column. */
function errorCurves(
  table: Table,
  xcol: "n_ts" | "epsilon",
  groupCol: "epsilon" | "n_ts",
  solver: string
): Series[] {
  const idx = requireColumns(table, ["epsilon", "n_ts", "linf_error", "solver_id"]);
  const rows = table.rows.filter((r) => r[idx.solver_id] === solver);
  if (rows.length === 0) throw new DataError(`no rows with solver_id=${solver}`);
  const groups = sortedUnique(rows.map((r) => numeric(r[idx[groupCol]], groupCol)));
  return groups.map((g) => {
    const pts = rows
      .filter((r) => numeric(r[idx[groupCol]], groupCol) === g)
      .map((r): [number, number] => [
        numeric(r[idx[xcol]], xcol),
        numeric(r[idx.linf_error], "linf_error"),
      ])
      .sort((a, b) => a[0] - b[0]);
    const label = groupCol === "epsilon" ? `eps = ${g}` : `n_ts = ${g}`;
    return { label, points: pts };
  });
}

function renderLogLogErrors(spec: FigureSpec, table: Table, xcol: "n_ts" | "epsilon"): string {
  const groupCol = xcol === "n_ts" ? "epsilon" : "n_ts";
  const series = errorCurves(table, xcol, groupCol, "ngo");
  const opt: PanelOptions = {
    title: spec.title || `sup error vs ${xcol}`,
    xlabel: spec.xlabel,
    ylabel: spec.ylabel,
    xlog: true,
    ylog: true,
    guideSlope: xcol === "n_ts" ? -1 : undefined,
    note: seriesNote(series),
  };
  return svgDocument([renderPanel(series, opt)], panelWidth());
}

function renderEpsDistance(spec: FigureSpec, table: Table): string {
  const idx = requireColumns(table, ["epsilon", "linf_error", "solver_id"]);
  const pts = table.rows
    .map((r): [number, number] => [
      numeric(r[idx.epsilon], "epsilon"),
      numeric(r[idx.linf_error], "linf_error"),
    ])
    .sort((a, b) => a[0] - b[0]);
  const series: Series[] = [{ label: "model distance", points: pts }];
  const opt: PanelOptions = {
    title: spec.title || "distance to the averaged model",
    xlabel: spec.xlabel,
    ylabel: spec.ylabel,
    xlog: true,
    ylog: true,
    guideSlope: 1,
    note: seriesNote(series),
  };
  return svgDocument([renderPanel(series, opt)], panelWidth());
}

function solverCurves(
  table: Table,
  xcol: string,
  ycol: string,
  extraFilter?: (r: string[]) => boolean
): Series[] {
  const idx = requireColumns(table, [xcol, ycol, "solver_id"]);
  const rows = extraFilter ? table.rows.filter(extraFilter) : table.rows;
  if (rows.length === 0) throw new DataError("empty selection after filtering");
  const solvers = [...new Set(rows.map((r) => r[idx.solver_id]))].sort();
  return solvers.map((solver, i) => ({
    label: solver,
    points: rows
      .filter((r) => r[idx.solver_id] === solver)
      .map((r): [number, number] => [numeric(r[idx[xcol]], xcol), numeric(r[idx[ycol]], ycol)])
      .sort((a, b) => a[0] - b[0]),
    dashed: i > 0,
  }));
}

function renderSnapshot(spec: FigureSpec, table: Table): string {
  const series = solverCurves(table, "x", "re");
  const base: PanelOptions = {
    title: spec.title || "solution snapshot (real part)",
    xlabel: spec.xlabel,
    ylabel: spec.ylabel,
    xlog: false,
    ylog: false,
    note: seriesNote(series),
  };
  const panels = [renderPanel(series, base)];
  if (spec.zoom) {
    panels.push(
      renderPanel(series, { ...base, title: `${base.title} (zoom)`, xwindow: spec.zoom }, panelWidth())
    );
  }
  return svgDocument(panels, panelWidth() * panels.length);
}

function renderTimeseries(spec: FigureSpec, table: Table): string {
  const series = solverCurves(table, "t", "r");
  const base: PanelOptions = {
    title: spec.title || "first-moment history",
    xlabel: spec.xlabel,
    ylabel: spec.ylabel,
    xlog: false,
    ylog: false,
    note: seriesNote(series),
  };
  const panels = [renderPanel(series, base)];
  if (spec.zoom) {
    panels.push(
      renderPanel(series, { ...base, title: `${base.title} (zoom)`, xwindow: spec.zoom }, panelWidth())
    );
  }
  return svgDocument(panels, panelWidth() * panels.length);
}

function renderHoppingPanel(spec: FigureSpec, table: Table): string {
  const idx = requireColumns(table, ["epsilon", "x", "field", "value", "solver_id"]);
  let rows = table.rows;
  if (spec.epsilon !== undefined) {
    rows = rows.filter((r) => numeric(r[idx.epsilon], "epsilon") === spec.epsilon);
  } else {
    const epsilons = sortedUnique(table.rows.map((r) => numeric(r[idx.epsilon], "epsilon")));
    if (epsilons.length > 1) {
      throw new DataError(
        `bundle holds several epsilon values (${epsilons.join(", ")}); set epsilon = <value>`
      );
    }
  }
  if (rows.length === 0) throw new DataError("empty selection after filtering");
  const fields = [...new Set(rows.map((r) => r[idx.field]))].sort();
  const panels = fields.map((field, i) => {
    const sub: Table = { columns: table.columns, rows: rows.filter((r) => r[idx.field] === field) };
    const series = solverCurves(sub, "x", "value");
    return renderPanel(
      series,
      {
        title: `${spec.title || "kinetic comparison"}: ${field}`,
        xlabel: spec.xlabel,
        ylabel: spec.ylabel,
        xlog: false,
        ylog: false,
        note: seriesNote(series),
      },
      panelWidth() * i
    );
  });
  return svgDocument(panels, panelWidth() * fields.length);
}

export function renderFigure(spec: FigureSpec): string {
  const table = loadCsv(spec.input);
  switch (spec.kind) {
    case "loglog_error_vs_nts":
      return renderLogLogErrors(spec, table, "n_ts");
    case "loglog_error_vs_eps":
      return renderLogLogErrors(spec, table, "epsilon");
    case "loglog_eps_distance":
      return renderEpsDistance(spec, table);
    case "snapshot":
      return renderSnapshot(spec, table);
    case "timeseries":
      return renderTimeseries(spec, table);
    case "hopping_panel":
      return renderHoppingPanel(spec, table);
  }
}
