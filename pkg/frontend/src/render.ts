import type { FigCsv } from "./csv.js";

const PANEL_WIDTH = 430;
const PANEL_HEIGHT = 340;
const MARGIN = { top: 40, right: 20, bottom: 55, left: 75 };
const GAP = 40;

const TRACE_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

type Scale = (value: number) => number;

function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain.map(Math.log10);
  const [r0, r1] = range;
  return (v) => r0 + ((Math.log10(v) - d0) / (d1 - d0)) * (r1 - r0);
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  return (v) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0);
}

function extent(series: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const values of series) {
    for (const v of values) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  return [lo, hi];
}

function decades(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); e <= Math.floor(Math.log10(hi)); e++) {
    ticks.push(10 ** e);
  }
  return ticks;
}

function linearTicks(lo: number, hi: number, count = 6): number[] {
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

function polyline(x: number[], y: number[], sx: Scale, sy: Scale): string {
  return x.map((xv, i) => `${sx(xv).toFixed(2)},${sy(y[i]).toFixed(2)}`).join(" ");
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

interface PanelDef {
  title: string;
  yLabel: string;
  yLog: boolean;
  /** Trace values per file, same order as the files array. */
  traces: (file: FigCsv) => number[];
  /** Horizontal reference lines in data units. */
  referenceLines: number[];
}

function renderPanel(
  files: FigCsv[],
  def: PanelDef,
  originX: number,
  originY: number
): string {
  const x0 = originX + MARGIN.left;
  const y0 = originY + MARGIN.top;
  const plotW = PANEL_WIDTH - MARGIN.left - MARGIN.right;
  const plotH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;

  const freqs = files.map((f) => f.columns.f_hz);
  const values = files.map(def.traces);
  const [fLo, fHi] = extent(freqs);
  let [vLo, vHi] = extent([...values, ...def.referenceLines.map((v) => [v])]);
  if (!def.yLog) {
    const pad = 0.05 * (vHi - vLo || 1);
    vLo -= pad;
    vHi += pad;
  }

  const sx = logScale([fLo, fHi], [x0, x0 + plotW]);
  const sy = def.yLog
    ? logScale([vLo, vHi], [y0 + plotH, y0])
    : linearScale([vLo, vHi], [y0 + plotH, y0]);

  const parts: string[] = [`<g class="panel" data-title="${esc(def.title)}">`];
  parts.push(
    `<rect x="${x0}" y="${y0}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`
  );
  parts.push(
    `<text class="panel-title" x="${x0 + plotW / 2}" y="${y0 - 14}" text-anchor="middle">${esc(def.title)}</text>`
  );

  for (const tick of decades(fLo, fHi)) {
    const px = sx(tick);
    parts.push(`<line x1="${px}" y1="${y0 + plotH}" x2="${px}" y2="${y0 + plotH + 5}" stroke="#333"/>`);
    parts.push(
      `<text class="tick" x="${px}" y="${y0 + plotH + 18}" text-anchor="middle">${tick}</text>`
    );
  }
  const yTicks = def.yLog ? decades(vLo, vHi) : linearTicks(vLo, vHi);
  for (const tick of yTicks) {
    const py = sy(tick);
    parts.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`);
    const label = def.yLog ? `1e${Math.round(Math.log10(tick))}` : tick.toFixed(1);
    parts.push(
      `<text class="tick" x="${x0 - 8}" y="${py + 4}" text-anchor="end">${label}</text>`
    );
  }

  parts.push(
    `<text class="axis-label" x="${x0 + plotW / 2}" y="${y0 + plotH + 40}" text-anchor="middle">f (Hz)</text>`
  );
  parts.push(
    `<text class="axis-label" x="${originX + 18}" y="${y0 + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 ${originX + 18} ${y0 + plotH / 2})">${esc(def.yLabel)}</text>`
  );

  for (const ref of def.referenceLines) {
    const py = sy(ref);
    parts.push(
      `<line class="reference-line" data-value="${ref}" x1="${x0}" y1="${py.toFixed(2)}" ` +
        `x2="${x0 + plotW}" y2="${py.toFixed(2)}" stroke="#888" stroke-dasharray="5,4"/>`
    );
  }

  files.forEach((file, i) => {
    parts.push(
      `<polyline class="trace" data-label="${esc(file.label)}" fill="none" ` +
        `stroke="${TRACE_COLORS[i % TRACE_COLORS.length]}" stroke-width="1.6" ` +
        `points="${polyline(file.columns.f_hz, values[i], sx, sy)}"/>`
    );
  });

  parts.push("</g>");
  return parts.join("\n");
}

/**
 * Render the two-panel figure: absolute displacement sensitivity (log-log)
 * on the left, sensitivity gain in dB (with a 0 dB reference line) on the
 * right. One trace per input CSV in each panel; which column a file
 * contributes is chosen by its topology (serial or parallel), so the
 * renderer never recomputes any spectral quantity.
 */
export function renderFigure(files: FigCsv[]): string {
  if (files.length === 0) {
    throw new Error("no input CSVs");
  }
  const width = 2 * PANEL_WIDTH + GAP;
  const legendHeight = 18 * files.length + 12;
  const height = PANEL_HEIGHT + legendHeight;

  const absolute: PanelDef = {
    title: "Position sensitivity",
    yLabel: "Sˣ (m²/Hz)",
    yLog: true,
    traces: (f) => (f.topology === "serial" ? f.columns.S_x_serial : f.columns.S_x_parallel),
    referenceLines: [],
  };
  const gain: PanelDef = {
    title: "Sensitivity gain",
    yLabel: "gain (dB)",
    yLog: false,
    traces: (f) =>
      f.topology === "serial" ? f.columns.gain_serial_db : f.columns.gain_parallel_db,
    referenceLines: [0],
  };

  const legend = files
    .map((file, i) => {
      const y = PANEL_HEIGHT + 14 + 18 * i;
      return (
        `<line x1="20" y1="${y}" x2="48" y2="${y}" stroke="${TRACE_COLORS[i % TRACE_COLORS.length]}" stroke-width="2"/>` +
        `<text class="legend" x="54" y="${y + 4}">${esc(file.label)}</text>`
      );
    })
    .join("\n");

  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    renderPanel(files, absolute, 0, 0),
    renderPanel(files, gain, PANEL_WIDTH + GAP, 0),
    `<g class="legend-block">`,
    legend,
    `</g>`,
    `</svg>`,
  ].join("\n");
}
