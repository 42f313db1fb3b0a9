import type { AttributionReport } from "./types.js";
import { escapeHtml } from "./charts.js";

/** Sum check tolerance for the waterfall footer. The service guarantees
 *  base + sum(phi) equals the prediction to this bound; the footer shows
 *  both numbers so an operator can see the identity hold. */
export const SUM_CHECK_TOL = 1e-6;

/** Feature indices in display order for the mean-magnitude bar chart.
 *  The API's rank vector is authoritative (it already encodes the
 *  lexicographic tie-break); nothing is re-sorted client side. */
export function orderByRank(report: AttributionReport): number[] {
  const indices = report.feature_names.map((_, i) => i);
  return indices.sort((a, b) => report.rank[a] - report.rank[b]);
}

/** Waterfall bar order for one instance: magnitude descending, ties by
 *  feature name, matching the service's own ordering convention. */
export function waterfallOrder(report: AttributionReport, instance: number): number[] {
  const phi = report.per_instance_phi[instance];
  const indices = report.feature_names.map((_, i) => i);
  return indices.sort((a, b) => {
    const mag = Math.abs(phi[b]) - Math.abs(phi[a]);
    if (mag !== 0) return mag;
    return report.feature_names[a] < report.feature_names[b] ? -1 : 1;
  });
}

export function renderMeanBars(report: AttributionReport, title: string): string {
  const order = orderByRank(report);
  const maxPhi = Math.max(...report.mean_abs_phi);
  const rows = order.map((i) => {
    const widthPct = maxPhi === 0 ? 0 : (100 * report.mean_abs_phi[i]) / maxPhi;
    return (
      `<div class="bar-row" data-feature="${escapeHtml(report.feature_names[i])}">` +
      `<span class="bar-label">#${report.rank[i]} ${escapeHtml(report.feature_names[i])}</span>` +
      `<span class="bar" style="width:${widthPct.toFixed(2)}%" ` +
      `data-value="${report.mean_abs_phi[i]}"></span>` +
      `<span class="bar-value">${report.mean_abs_phi[i].toFixed(4)}</span>` +
      `</div>`
    );
  });
  return (
    `<section class="attribution-bars">` +
    `<h3>${escapeHtml(title)} (mean |contribution|, ${escapeHtml(report.mode)})</h3>` +
    rows.join("") +
    `</section>`
  );
}

export function renderWaterfall(report: AttributionReport, instance: number): string {
  if (instance < 0 || instance >= report.per_instance_phi.length) {
    throw new RangeError(`instance ${instance} out of range`);
  }
  const phi = report.per_instance_phi[instance];
  const order = waterfallOrder(report, instance);
  const phiSum = phi.reduce((a, b) => a + b, 0);
  const displayed = report.base_value + phiSum;
  const prediction = report.predictions[instance];
  const ok = Math.abs(displayed - prediction) <= SUM_CHECK_TOL;

  let running = report.base_value;
  const rows = order.map((i) => {
    const from = running;
    running += phi[i];
    const direction = phi[i] >= 0 ? "up" : "down";
    return (
      `<div class="wf-row ${direction}" data-feature="${escapeHtml(report.feature_names[i])}" ` +
      `data-phi="${phi[i]}" data-from="${from}" data-to="${running}">` +
      `<span class="wf-label">${escapeHtml(report.feature_names[i])}</span>` +
      `<span class="wf-value">${phi[i] >= 0 ? "+" : ""}${phi[i].toFixed(4)}</span>` +
      `</div>`
    );
  });

  return (
    `<section class="waterfall" data-instance="${instance}">` +
    `<div class="wf-base">base ${report.base_value.toFixed(4)}</div>` +
    rows.join("") +
    `<div class="wf-check ${ok ? "check-ok" : "check-bad"}">` +
    `base + sum = ${displayed.toFixed(6)}, prediction = ${prediction.toFixed(6)}` +
    `</div>` +
    `</section>`
  );
}

export function renderAttributionPlaceholder(): string {
  return `<p class="placeholder">attribution report not available</p>`;
}
