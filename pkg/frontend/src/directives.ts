import type { Directive } from "./types.js";
import { escapeHtml } from "./charts.js";

/** One card per forecast day, color keyed by the severity the service
 *  assigned. Everything on the card is echoed from the API payload. */
export function renderDirectiveCards(directives: Directive[]): string {
  if (directives.length === 0) {
    return `<p class="placeholder">no directives</p>`;
  }
  return directives.map(renderCard).join("");
}

function renderCard(d: Directive): string {
  const severityClass = `severity-${d.severity.toLowerCase()}`;
  const pressure = signedPct(d.ro_pressure_delta_pct);
  const parts = [
    `<article class="card ${severityClass}" data-severity="${escapeHtml(d.severity)}">`,
    `<header><time>${escapeHtml(d.date)}</time>` +
      `<span class="severity">${escapeHtml(d.severity)}</span></header>`,
    `<p class="pressure">RO pressure ${pressure}</p>`,
  ];
  if (d.robotic_cleaning) {
    parts.push(`<span class="badge badge-robotic" title="robotic cleaning dispatched">&#9881; robotic cleaning</span>`);
  }
  if (d.chemical_cleaning_deferral_h > 0) {
    parts.push(`<span class="badge badge-deferral">chemical cleaning deferred ${d.chemical_cleaning_deferral_h} h</span>`);
  }
  if (d.grid_import_increase_pct > 0) {
    parts.push(`<span class="badge badge-grid">grid import ${signedPct(d.grid_import_increase_pct)}</span>`);
  }
  if (d.pretreatment) {
    parts.push(`<span class="badge badge-pretreatment">pretreatment on</span>`);
  }
  parts.push(`<p class="throughput">throughput ${escapeHtml(d.throughput_mode)}</p>`);
  parts.push(
    `<ul class="rationale">` +
      d.rationale.map((r) => `<li>${escapeHtml(r)}</li>`).join("") +
      `</ul>`,
  );
  parts.push(`</article>`);
  return parts.join("");
}

function signedPct(v: number): string {
  const text = Number.isInteger(v) ? v.toFixed(0) : String(v);
  return v > 0 ? `+${text}%` : `${text}%`;
}
