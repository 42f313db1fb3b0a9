/** SVG overlay charts rendered straight from API series.
 *
 *  Deliberately no smoothing, no resampling, no rounding of data values:
 *  operators must see raw model output, and tests invert the coordinate
 *  transform to prove the displayed points are the numbers the service
 *  sent.
 */

export interface OverlaySpec {
  title: string;
  baseline: number[];
  scenario?: number[] | null;
  width?: number;
  height?: number;
  pad?: number;
}

const DEFAULTS = { width: 640, height: 220, pad: 28 };

export interface ValueRange {
  min: number;
  max: number;
}

export function valueRange(series: number[][]): ValueRange {
  const all = series.flat();
  if (all.length === 0) return { min: 0, max: 1 };
  let min = Math.min(...all);
  let max = Math.max(...all);
  if (min === max) {
    // flat series still needs a drawable band
    min -= 0.5;
    max += 0.5;
  }
  return { min, max };
}

export function polylinePoints(
  values: number[],
  width: number,
  height: number,
  pad: number,
  range: ValueRange,
): string {
  const innerW = width - 2 * pad;
  const innerH = height - 2 * pad;
  const span = range.max - range.min;
  return values
    .map((v, i) => {
      const x = values.length === 1 ? pad + innerW / 2
        : pad + (i * innerW) / (values.length - 1);
      const y = height - pad - ((v - range.min) * innerH) / span;
      return `${x},${y}`;
    })
    .join(" ");
}

export function overlayChart(spec: OverlaySpec): string {
  const width = spec.width ?? DEFAULTS.width;
  const height = spec.height ?? DEFAULTS.height;
  const pad = spec.pad ?? DEFAULTS.pad;
  const series = [spec.baseline];
  if (spec.scenario) series.push(spec.scenario);
  const range = valueRange(series);

  const lines = [
    `<polyline class="series baseline" fill="none" points="` +
      polylinePoints(spec.baseline, width, height, pad, range) + `"/>`,
  ];
  if (spec.scenario) {
    lines.push(
      `<polyline class="series scenario" fill="none" points="` +
        polylinePoints(spec.scenario, width, height, pad, range) + `"/>`,
    );
  }

  return [
    `<figure class="chart">`,
    `<figcaption>${escapeHtml(spec.title)}</figcaption>`,
    `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="${escapeHtml(spec.title)}">`,
    `<text class="axis-label min" x="4" y="${height - pad}">${formatTick(range.min)}</text>`,
    `<text class="axis-label max" x="4" y="${pad}">${formatTick(range.max)}</text>`,
    ...lines,
    `</svg>`,
    `</figure>`,
  ].join("");
}

/** Axis ticks may be rounded for display; data points never are. */
function formatTick(v: number): string {
  return Math.abs(v) >= 100 ? v.toFixed(0) : v.toFixed(2);
}

export function escapeHtml(s: string): string {
  return s
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
