/**
 * Geometry for the trade-off chart: map sampled curve points into SVG
 * space, band the regimes between breakpoints, and answer hovers with the
 * nearest sampled point. All risk values pass through untouched — the
 * chart plots what the service sampled, nothing interpolated.
 */

import type { CurvePoint, CurveResponse } from "./api";

export interface PlotBox {
  width: number;
  height: number;
  padX: number;
  padY: number;
}

export const PLOT: PlotBox = { width: 480, height: 240, padX: 34, padY: 16 };

export function riskScale(curve: CurveResponse): number {
  const top = curve.points.reduce((acc, pt) => Math.max(acc, pt.risk), 0);
  return top > 0 ? top : 1;
}

export function toX(mu: number, muMax: number, box: PlotBox = PLOT): number {
  return box.padX + (mu / muMax) * (box.width - 2 * box.padX);
}

export function toY(risk: number, riskMax: number, box: PlotBox = PLOT): number {
  return box.height - box.padY - (risk / riskMax) * (box.height - 2 * box.padY);
}

export function curvePathD(curve: CurveResponse, box: PlotBox = PLOT): string {
  const riskMax = riskScale(curve);
  return curve.points
    .map((pt, i) => {
      const x = toX(pt.mu, curve.mu_max, box).toFixed(2);
      const y = toY(pt.risk, riskMax, box).toFixed(2);
      return `${i === 0 ? "M" : "L"}${x},${y}`;
    })
    .join(" ");
}

/** Activity regimes: one band per gap in [0, bp₁, …, μ_max]. */
export function regimeBands(curve: CurveResponse): { from: number; to: number }[] {
  const edges = [0, ...curve.breakpoints, curve.mu_max];
  const bands: { from: number; to: number }[] = [];
  for (let i = 0; i + 1 < edges.length; i++) {
    if (edges[i + 1] > edges[i]) bands.push({ from: edges[i], to: edges[i + 1] });
  }
  return bands;
}

/** Sampled point closest to the hovered offer; curves are mu-sorted. */
export function nearestPoint(curve: CurveResponse, mu: number): CurvePoint {
  let best = curve.points[0];
  let gap = Math.abs(best.mu - mu);
  for (const pt of curve.points) {
    const d = Math.abs(pt.mu - mu);
    if (d < gap) {
      best = pt;
      gap = d;
    }
  }
  return best;
}

export function tooltipText(curve: CurveResponse, mu: number): string {
  const pt = nearestPoint(curve, mu);
  return `μ ${pt.mu.toFixed(4)} → risk ${pt.risk.toFixed(4)}`;
}
