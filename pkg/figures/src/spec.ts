/**
 * Figure specification files: the same flat key-value format the solver
 * harness uses (INI-style sections, comma-separated lists, `pi` allowed in
 * numbers).  Unknown sections or keys are errors.
 */

import { readFileSync } from "fs";

export class SpecError extends Error {}

export type FigureKind =
  | "loglog_error_vs_nts"
  | "loglog_error_vs_eps"
  | "loglog_eps_distance"
  | "snapshot"
  | "timeseries"
  | "hopping_panel";

const KINDS: FigureKind[] = [
  "loglog_error_vs_nts",
  "loglog_error_vs_eps",
  "loglog_eps_distance",
  "snapshot",
  "timeseries",
  "hopping_panel",
];

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  title: string;
  xlabel: string;
  ylabel: string;
  /** optional zoom window [lo, hi] in x; adds a zoomed second panel */
  zoom?: [number, number];
  /** optional epsilon filter for multi-epsilon hopping bundles */
  epsilon?: number;
}

const KEYS = new Set([
  "kind",
  "input",
  "output",
  "title",
  "xlabel",
  "ylabel",
  "zoom",
  "epsilon",
]);

export function parseNumber(text: string): number {
  const cleaned = text.trim();
  if (!/^[0-9pie+\-*/(). ]+$/.test(cleaned)) {
    throw new SpecError(`bad numeric value ${JSON.stringify(text)}`);
  }
  const expr = cleaned.replace(/\bpi\b/g, String(Math.PI)).replace(/\be\b/g, String(Math.E));
  let value: number;
  try {
    value = Function(`"use strict"; return (${expr});`)() as number;
  } catch {
    throw new SpecError(`bad numeric value ${JSON.stringify(text)}`);
  }
  if (typeof value !== "number" || !isFinite(value)) {
    throw new SpecError(`bad numeric value ${JSON.stringify(text)}`);
  }
  return value;
}

/** Parse INI-style sections into a nested map, rejecting duplicate keys. */
export function parseIni(text: string): Map<string, Map<string, string>> {
  const sections = new Map<string, Map<string, string>>();
  let current: Map<string, string> | null = null;
  let name = "";
  for (const rawLine of text.split(/\r?\n/)) {
    const line = rawLine.replace(/[;#].*$/, "").trim();
    if (!line) continue;
    const header = line.match(/^\[(.+)\]$/);
    if (header) {
      name = header[1].trim();
      if (sections.has(name)) throw new SpecError(`duplicate section [${name}]`);
      current = new Map();
      sections.set(name, current);
      continue;
    }
    const eq = line.indexOf("=");
    if (eq < 0 || current === null) {
      throw new SpecError(`cannot parse line ${JSON.stringify(rawLine)}`);
    }
    const key = line.slice(0, eq).trim();
    if (current.has(key)) throw new SpecError(`duplicate key ${key} in [${name}]`);
    current.set(key, line.slice(eq + 1).trim());
  }
  return sections;
}

export function parseSpecText(text: string): FigureSpec {
  const sections = parseIni(text);
  for (const name of sections.keys()) {
    if (name !== "figure") throw new SpecError(`unknown section [${name}]`);
  }
  const body = sections.get("figure");
  if (!body) throw new SpecError("missing [figure] section");
  for (const key of body.keys()) {
    if (!KEYS.has(key)) throw new SpecError(`unknown key ${JSON.stringify(key)} in [figure]`);
  }
  const kind = body.get("kind") ?? "";
  if (!(KINDS as string[]).includes(kind)) {
    throw new SpecError(`kind must be one of ${KINDS.join(", ")}, got ${JSON.stringify(kind)}`);
  }
  const input = body.get("input");
  const output = body.get("output");
  if (!input || !output) throw new SpecError("input and output paths are required");
  const spec: FigureSpec = {
    kind: kind as FigureKind,
    input,
    output,
    title: body.get("title") ?? "",
    xlabel: body.get("xlabel") ?? defaultXLabel(kind as FigureKind),
    ylabel: body.get("ylabel") ?? defaultYLabel(kind as FigureKind),
  };
  const zoom = body.get("zoom");
  if (zoom !== undefined) {
    const parts = zoom.split(",").map(parseNumber);
    if (parts.length !== 2 || !(parts[0] < parts[1])) {
      throw new SpecError(`zoom must be "lo, hi" with lo < hi, got ${JSON.stringify(zoom)}`);
    }
    spec.zoom = [parts[0], parts[1]];
  }
  const eps = body.get("epsilon");
  if (eps !== undefined) spec.epsilon = parseNumber(eps);
  return spec;
}

export function loadSpec(path: string): FigureSpec {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new SpecError(`cannot read spec file ${JSON.stringify(path)}`);
  }
  return parseSpecText(text);
}

function defaultXLabel(kind: FigureKind): string {
  switch (kind) {
    case "loglog_error_vs_nts":
      return "n_ts";
    case "loglog_error_vs_eps":
    case "loglog_eps_distance":
      return "epsilon";
    case "timeseries":
      return "t";
    default:
      return "x";
  }
}

function defaultYLabel(kind: FigureKind): string {
  switch (kind) {
    case "loglog_eps_distance":
      return "model distance";
    case "timeseries":
      return "R(t)";
    case "snapshot":
    case "hopping_panel":
      return "value";
    default:
      return "sup error";
  }
}
