import { mkdtempSync, writeFileSync, existsSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { beforeAll, describe, expect, it } from "vitest";

import { DataError, parseCsv, requireColumns } from "../src/csv.js";
import { renderFigure } from "../src/figures.js";
import { main } from "../src/cli.js";
import { FigureSpec } from "../src/spec.js";

let dir: string;

function write(name: string, text: string): string {
  const path = join(dir, name);
  writeFileSync(path, text);
  return path;
}

const HEADER = "epsilon,n_ts,dt,dx,linf_error,wall_seconds,solver_id";

function errorsCsv(): string {
  const eps = [1, 0.1, 0.01, 0.001];
  const nts = [20, 40, 100, 200, 1000];
  const lines = [HEADER];
  for (const e of eps) {
    for (const n of nts) {
      lines.push(`${e},${n},${0.1 / n},${Math.PI / n},${1.0 / n},0.01,ngo`);
    }
    lines.push(`${e},4000,0.1,0.001,0,1.5,direct`);
  }
  return lines.join("\n") + "\n";
}

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "pf-figs-"));
});

describe("csv", () => {
  it("parses and checks columns", () => {
    const t = parseCsv("a,b\n1,2\n3,4\n");
    expect(t.rows).toHaveLength(2);
    expect(requireColumns(t, ["b"]).b).toBe(1);
    expect(() => requireColumns(t, ["missing"])).toThrow(DataError);
  });

  it("rejects empty and ragged input", () => {
    expect(() => parseCsv("")).toThrow(DataError);
    expect(() => parseCsv("a,b\n")).toThrow(DataError);
    expect(() => parseCsv("a,b\n1\n")).toThrow(DataError);
  });
});

describe("error figures", () => {
  it("renders one curve per epsilon with a slope guide", () => {
    const input = write("errors.csv", errorsCsv());
    const spec: FigureSpec = {
      kind: "loglog_error_vs_nts",
      input,
      output: join(dir, "f1.svg"),
      title: "",
      xlabel: "n_ts",
      ylabel: "sup error",
    };
    const svg = renderFigure(spec);
    expect(svg).toContain("<svg");
    expect((svg.match(/eps = /g) ?? []).length).toBe(4);
    expect(svg).toContain("slope -1");
    expect(svg).toContain('stroke-dasharray="6 4"');
  });

  it("renders the transposed view grouped by resolution", () => {
    const input = write("errors.csv", errorsCsv());
    const svg = renderFigure({
      kind: "loglog_error_vs_eps",
      input,
      output: join(dir, "f2.svg"),
      title: "",
      xlabel: "epsilon",
      ylabel: "sup error",
    });
    expect((svg.match(/n_ts = /g) ?? []).length).toBe(5);
  });

  it("is deterministic", () => {
    const input = write("errors.csv", errorsCsv());
    const spec: FigureSpec = {
      kind: "loglog_error_vs_nts",
      input,
      output: join(dir, "f3.svg"),
      title: "t",
      xlabel: "x",
      ylabel: "y",
    };
    expect(renderFigure(spec)).toBe(renderFigure(spec));
  });

  it("annotates single-point inputs instead of failing", () => {
    const input = write(
      "one.csv",
      HEADER + "\n0.01,100,0.001,0.03,0.002,0.01,ngo\n"
    );
    const svg = renderFigure({
      kind: "loglog_error_vs_nts",
      input,
      output: join(dir, "f4.svg"),
      title: "",
      xlabel: "n",
      ylabel: "e",
    });
    expect(svg).toContain("single data point");
  });

  it("rejects log axes on non-positive data", () => {
    const input = write(
      "neg.csv",
      HEADER + "\n0.01,100,0.001,0.03,0,0.01,ngo\n0.01,200,0.001,0.03,0.001,0.01,ngo\n"
    );
    expect(() =>
      renderFigure({
        kind: "loglog_error_vs_nts",
        input,
        output: join(dir, "f5.svg"),
        title: "",
        xlabel: "n",
        ylabel: "e",
      })
    ).toThrow(DataError);
  });
});

describe("distance, snapshot, timeseries, hopping", () => {
  it("distance figure carries a slope +1 guide", () => {
    const input = write(
      "dist.csv",
      HEADER + "\n0.1,512,0.001,0.01,0.08,0.1,asym_distance\n" +
        "0.01,512,0.001,0.01,0.011,0.1,asym_distance\n" +
        "0.001,512,0.001,0.01,0.002,0.1,asym_distance\n"
    );
    const svg = renderFigure({
      kind: "loglog_eps_distance",
      input,
      output: join(dir, "d.svg"),
      title: "",
      xlabel: "epsilon",
      ylabel: "distance",
    });
    expect(svg).toContain("slope 1");
  });

  it("snapshot zoom adds a second panel", () => {
    const rows = ["x,re,im,solver_id"];
    for (let j = 0; j < 32; j++) {
      const x = -Math.PI / 2 + (j * Math.PI) / 32;
      rows.push(`${x},${Math.cos(3 * x)},0,ngo`);
      rows.push(`${x},${Math.cos(3 * x) + 0.01},0,direct`);
    }
    const input = write("snap.csv", rows.join("\n") + "\n");
    const base: FigureSpec = {
      kind: "snapshot",
      input,
      output: join(dir, "s.svg"),
      title: "",
      xlabel: "x",
      ylabel: "Re u",
    };
    const plain = renderFigure(base);
    const zoomed = renderFigure({ ...base, zoom: [-0.5, 0.5] });
    expect(zoomed).toContain("(zoom)");
    expect(zoomed.length).toBeGreaterThan(plain.length);
    expect(plain).toContain("ngo");
    expect(plain).toContain("direct");
  });

  it("timeseries renders both solver histories", () => {
    const rows = ["t,r,solver_id"];
    for (let k = 0; k <= 20; k++) {
      rows.push(`${k * 0.05},${1 + 0.1 * Math.sin(k)},ngo`);
      rows.push(`${k * 0.05},${1 + 0.1 * Math.sin(k) + 0.002},direct`);
    }
    const input = write("ts.csv", rows.join("\n") + "\n");
    const svg = renderFigure({
      kind: "timeseries",
      input,
      output: join(dir, "t.svg"),
      title: "",
      xlabel: "t",
      ylabel: "R",
    });
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
  });

  it("hopping panel makes one subplot per field and filters epsilon", () => {
    const rows = ["epsilon,x,field,value,solver_id"];
    for (const eps of [1, 0.03125]) {
      for (const field of ["rho_plus", "rho_minus"]) {
        for (let j = 0; j < 8; j++) {
          rows.push(`${eps},${j},${field},${Math.sin(j) + eps},ngo`);
          rows.push(`${eps},${j},${field},${Math.sin(j) + eps + 0.01},direct`);
        }
      }
    }
    const input = write("hop.csv", rows.join("\n") + "\n");
    const base: FigureSpec = {
      kind: "hopping_panel",
      input,
      output: join(dir, "h.svg"),
      title: "",
      xlabel: "x",
      ylabel: "density",
    };
    expect(() => renderFigure(base)).toThrow(DataError); // several eps, no filter
    const svg = renderFigure({ ...base, epsilon: 1 });
    expect(svg).toContain("rho_plus");
    expect(svg).toContain("rho_minus");
  });
});

describe("cli", () => {
  it("writes the figure and returns 0", () => {
    const input = write("errors.csv", errorsCsv());
    const out = join(dir, "cli-out", "fig.svg");
    const spec = write(
      "good.spec",
      `[figure]\nkind = loglog_error_vs_nts\ninput = ${input}\noutput = ${out}\n`
    );
    expect(main(["render", "--spec", spec])).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it("returns 2 on malformed specs and usage errors", () => {
    const bad = write("bad.spec", "[figure]\nkind = nope\ninput = a\noutput = b\n");
    expect(main(["render", "--spec", bad])).toBe(2);
    expect(main(["paint"])).toBe(2);
    expect(main(["render"])).toBe(2);
  });

  it("returns 3 and writes nothing on an empty CSV", () => {
    const input = write("empty.csv", "");
    const out = join(dir, "never.svg");
    const spec = write(
      "empty.spec",
      `[figure]\nkind = timeseries\ninput = ${input}\noutput = ${out}\n`
    );
    expect(main(["render", "--spec", spec])).toBe(3);
    expect(existsSync(out)).toBe(false);
  });

  it("returns 3 when columns are missing", () => {
    const input = write("wrong.csv", "a,b\n1,2\n");
    const spec = write(
      "wrong.spec",
      `[figure]\nkind = snapshot\ninput = ${input}\noutput = ${join(dir, "w.svg")}\n`
    );
    expect(main(["render", "--spec", spec])).toBe(3);
  });
});
