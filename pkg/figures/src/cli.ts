#!/usr/bin/env node
/**
 * Figure renderer CLI.
 *
 *     phasefold-figures render --spec <path> [--spec <path> ...]
 *
 * Exit codes mirror the solver harness: 0 success, 2 malformed spec file,
 * 3 data failure (unreadable/empty CSV, missing columns, empty selection).
 * Nothing is written on failure.
 */

import { mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";

import { DataError } from "./csv.js";
import { renderFigure } from "./figures.js";
import { SpecError, loadSpec } from "./spec.js";

function usage(): string {
  return "usage: phasefold-figures render --spec <path> [--spec <path> ...]";
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "render") {
    process.stderr.write(usage() + "\n");
    return 2;
  }
  const specs: string[] = [];
  for (let i = 0; i < rest.length; i += 2) {
    if (rest[i] !== "--spec" || rest[i + 1] === undefined) {
      process.stderr.write(usage() + "\n");
      return 2;
    }
    specs.push(rest[i + 1]);
  }
  if (specs.length === 0) {
    process.stderr.write(usage() + "\n");
    return 2;
  }
  for (const path of specs) {
    try {
      const spec = loadSpec(path);
      const svg = renderFigure(spec);
      mkdirSync(dirname(spec.output), { recursive: true });
      writeFileSync(spec.output, svg);
      process.stdout.write(`${spec.kind}: ${spec.output}\n`);
    } catch (err) {
      if (err instanceof SpecError) {
        process.stderr.write(`spec error (${path}): ${err.message}\n`);
        return 2;
      }
      if (err instanceof DataError) {
        process.stderr.write(`data error (${path}): ${err.message}\n`);
        return 3;
      }
      throw err;
    }
  }
  return 0;
}

const isMain = process.argv[1]?.endsWith("cli.js");
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
