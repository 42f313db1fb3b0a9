import type { Directive, ForecastResponse } from "./types.js";
import { escapeHtml } from "./charts.js";

/** Headline numbers after a scenario run. Both are arithmetic over values
 *  the API returned; no model is evaluated here. Severe days are counted
 *  from the service's own severity labels. */
export interface DeltaSummary {
  mean_loss_delta_pct: number;
  severe_days: number;
}

function mean(xs: number[]): number {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

export function deltaSummary(
  baseline: ForecastResponse,
  scenario: ForecastResponse,
  directives: Directive[],
): DeltaSummary {
  return {
    mean_loss_delta_pct:
      mean(scenario.efficiency_loss_pct) - mean(baseline.efficiency_loss_pct),
    severe_days: directives.filter((d) => d.severity === "SEVERE").length,
  };
}

export function renderSummary(s: DeltaSummary, stale: boolean): string {
  const sign = s.mean_loss_delta_pct >= 0 ? "+" : "";
  return [
    `<div class="summary${stale ? " stale" : ""}">`,
    stale ? `<span class="stale-flag">form changed since this result</span>` : "",
    `<span class="summary-item">mean efficiency-loss change: ` +
      `<b>${sign}${s.mean_loss_delta_pct.toFixed(3)} pct points</b></span>`,
    `<span class="summary-item">SEVERE days in window: <b>${s.severe_days}</b></span>`,
    `</div>`,
  ].join("");
}

export function renderBanner(message: string | null): string {
  if (message === null) return "";
  return (
    `<div class="banner" role="alert">${escapeHtml(message)}` +
    `<button class="dismiss" type="button">dismiss</button></div>`
  );
}
