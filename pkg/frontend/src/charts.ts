/**
 * Minimal canvas time-series rendering. No resampling or smoothing: every
 * received point is drawn at its iteration, so the charts are a faithful
 * image of the stream.
 */

import type { SeriesPoint } from "./model.js";

interface ChartOptions {
  stroke: string;
  label: string;
  yMax?: number;
  boolean?: boolean;
}

export function drawSeries(
  canvas: HTMLCanvasElement,
  points: SeriesPoint[],
  pick: (p: SeriesPoint) => number,
  options: ChartOptions,
): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#9aa3b2";
  ctx.font = "11px system-ui, sans-serif";
  ctx.fillText(options.label, 8, 14);
  if (points.length === 0) return;

  const pad = { left: 42, right: 10, top: 20, bottom: 18 };
  const innerW = width - pad.left - pad.right;
  const innerH = height - pad.top - pad.bottom;
  const xMax = Math.max(points[points.length - 1]!.iteration, 1);
  const values = points.map(pick);
  const yMax = options.boolean ? 1 : Math.max(options.yMax ?? 0, ...values, 1);

  const x = (iter: number) => pad.left + (iter / xMax) * innerW;
  const y = (v: number) => pad.top + innerH - (v / yMax) * innerH;

  ctx.strokeStyle = "#2a3142";
  ctx.beginPath();
  ctx.moveTo(pad.left, pad.top);
  ctx.lineTo(pad.left, pad.top + innerH);
  ctx.lineTo(pad.left + innerW, pad.top + innerH);
  ctx.stroke();

  ctx.fillStyle = "#6b7385";
  ctx.fillText(String(Math.round(yMax)), 6, pad.top + 8);
  ctx.fillText("0", 6, pad.top + innerH);
  ctx.fillText(String(xMax), pad.left + innerW - 18, height - 4);

  ctx.strokeStyle = options.stroke;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  points.forEach((p, i) => {
    const px = x(p.iteration);
    const py = y(pick(p));
    if (i === 0) ctx.moveTo(px, py);
    else if (options.boolean) {
      // step style for on/off series
      ctx.lineTo(px, y(pick(points[i - 1]!)));
      ctx.lineTo(px, py);
    } else ctx.lineTo(px, py);
  });
  ctx.stroke();
}

export function renderTelemetry(
  canvases: { size: HTMLCanvasElement; energy: HTMLCanvasElement; connectivity: HTMLCanvasElement },
  series: SeriesPoint[],
): void {
  drawSeries(canvases.size, series, (p) => p.size, {
    stroke: "#5aa9e6",
    label: "swarm size",
  });
  drawSeries(canvases.energy, series, (p) => p.totalEnergy, {
    stroke: "#f4a259",
    label: "total energy (W)",
  });
  drawSeries(canvases.connectivity, series, (p) => (p.connected ? 1 : 0), {
    stroke: "#7fc96b",
    label: "connectivity",
    boolean: true,
  });
}
