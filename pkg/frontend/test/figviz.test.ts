import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { loadFigCsv, REQUIRED_COLUMNS } from "../src/csv.js";
import { renderFigure } from "../src/render.js";

const FIXTURES = join(__dirname, "fixtures");
const NAMES = [
  "fig5_serial_spin.csv",
  "fig5_parallel_spin.csv",
  "fig5_serial_mechanical.csv",
  "fig5_parallel_mechanical.csv",
];

function loadAll() {
  return NAMES.map((name) => loadFigCsv(join(FIXTURES, name)));
}

describe("loadFigCsv", () => {
  it("round-trips the emitted CSVs without loss", () => {
    for (const file of loadAll()) {
      for (const column of REQUIRED_COLUMNS) {
        expect(file.columns[column]).toHaveLength(600);
      }
      expect(file.columns.f_hz[0]).toBeCloseTo(5.0, 12);
      expect(file.columns.f_hz[599]).toBeCloseTo(2000.0, 9);
    }
  });

  it("infers the topology from the file name", () => {
    const files = loadAll();
    expect(files.map((f) => f.topology)).toEqual([
      "serial",
      "parallel",
      "serial",
      "parallel",
    ]);
  });

  it("rejects an empty CSV with an explicit error", () => {
    const dir = mkdtempSync(join(tmpdir(), "figviz-"));
    const path = join(dir, "empty.csv");
    writeFileSync(path, "# config_sha256: abc\n" + REQUIRED_COLUMNS.join(",") + "\n");
    expect(() => loadFigCsv(path)).toThrow(/empty CSV.*empty\.csv/);
  });

  it("names the missing column and the file", () => {
    const dir = mkdtempSync(join(tmpdir(), "figviz-"));
    const path = join(dir, "truncated.csv");
    writeFileSync(path, "f_hz,S_x_serial\n5.0,1e-37\n");
    expect(() => loadFigCsv(path)).toThrow(/'S_x_parallel'.*truncated\.csv/);
  });
});

describe("renderFigure", () => {
  const svg = renderFigure(loadAll());

  it("produces a two-panel figure", () => {
    const panels = svg.match(/<g class="panel"/g) ?? [];
    expect(panels).toHaveLength(2);
    expect(svg).toContain('data-title="Position sensitivity"');
    expect(svg).toContain('data-title="Sensitivity gain"');
  });

  it("draws four traces per panel", () => {
    const traces = svg.match(/<polyline class="trace"/g) ?? [];
    expect(traces).toHaveLength(8); // 4 CSVs x 2 panels
  });

  it("labels the axes", () => {
    const labels = svg.match(/<text class="axis-label"[^>]*>([^<]*)<\/text>/g) ?? [];
    const texts = labels.map((l) => l.replace(/<[^>]*>/g, ""));
    expect(texts.filter((t) => t === "f (Hz)")).toHaveLength(2);
    expect(texts).toContain("Sˣ (m²/Hz)");
    expect(texts).toContain("gain (dB)");
  });

  it("includes a 0 dB reference line in the gain panel", () => {
    expect(svg).toMatch(/<line class="reference-line" data-value="0"/);
  });

  it("builds the legend from the file names", () => {
    for (const name of NAMES) {
      expect(svg).toContain(name.replace(".csv", ""));
    }
  });

  it("refuses to render with no inputs", () => {
    expect(() => renderFigure([])).toThrow(/no input CSVs/);
  });
});
