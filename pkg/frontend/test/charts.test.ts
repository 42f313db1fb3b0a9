import { describe, expect, it } from "vitest";

import { overlayChart, polylinePoints, valueRange } from "../src/charts.js";
import type { ForecastResponse } from "../src/types.js";
import { fixture, rawFixture } from "./helpers.js";

const baseline = fixture<ForecastResponse>("forecast.json");
const stressed = fixture<ForecastResponse>("scenario_stress.json");

const GEOM = { width: 640, height: 220, pad: 28 };

function parsePoints(points: string): Array<[number, number]> {
  return points.split(" ").map((pair) => {
    const [x, y] = pair.split(",").map(Number);
    return [x, y];
  });
}

describe("polyline geometry", () => {
  it("emits one point per day", () => {
    const range = valueRange([baseline.aod]);
    const pts = parsePoints(
      polylinePoints(baseline.aod, GEOM.width, GEOM.height, GEOM.pad, range),
    );
    expect(pts).toHaveLength(baseline.horizon);
  });

  it("applies no smoothing: inverting the transform recovers the raw series", () => {
    const range = valueRange([baseline.efficiency_loss_pct]);
    const pts = parsePoints(polylinePoints(
      baseline.efficiency_loss_pct, GEOM.width, GEOM.height, GEOM.pad, range,
    ));
    const innerH = GEOM.height - 2 * GEOM.pad;
    const span = range.max - range.min;
    pts.forEach(([, y], i) => {
      const recovered = range.min + ((GEOM.height - GEOM.pad - y) * span) / innerH;
      expect(Math.abs(recovered - baseline.efficiency_loss_pct[i])).toBeLessThan(1e-9);
    });
  });

  it("x positions are strictly increasing", () => {
    const range = valueRange([baseline.aod]);
    const xs = parsePoints(
      polylinePoints(baseline.aod, GEOM.width, GEOM.height, GEOM.pad, range),
    ).map(([x]) => x);
    for (let i = 1; i < xs.length; i++) expect(xs[i]).toBeGreaterThan(xs[i - 1]);
  });

  it("a flat series still renders inside the frame", () => {
    const flat = [5, 5, 5];
    const range = valueRange([flat]);
    const ys = parsePoints(
      polylinePoints(flat, GEOM.width, GEOM.height, GEOM.pad, range),
    ).map(([, y]) => y);
    ys.forEach((y) => {
      expect(y).toBeGreaterThanOrEqual(GEOM.pad);
      expect(y).toBeLessThanOrEqual(GEOM.height - GEOM.pad);
    });
  });
});

describe("overlay chart", () => {
  it("draws baseline and scenario series from the recorded responses", () => {
    const svg = overlayChart({
      title: "AOD forecast",
      baseline: baseline.aod,
      scenario: stressed.aod,
    });
    expect(svg).toContain('class="series baseline"');
    expect(svg).toContain('class="series scenario"');
    expect(svg).toContain("AOD forecast");
  });

  it("identity scenario curves coincide exactly", () => {
    // the recorded identity response is byte-identical to the baseline
    expect(rawFixture("scenario_identity.json")).toBe(rawFixture("forecast.json"));
    const identity = fixture<ForecastResponse>("scenario_identity.json");
    const range = valueRange([baseline.aod, identity.aod]);
    const a = polylinePoints(baseline.aod, GEOM.width, GEOM.height, GEOM.pad, range);
    const b = polylinePoints(identity.aod, GEOM.width, GEOM.height, GEOM.pad, range);
    expect(b).toBe(a);
  });

  it("series lengths equal the horizon on both recorded responses", () => {
    for (const fc of [baseline, stressed]) {
      expect(fc.aod).toHaveLength(fc.horizon);
      expect(fc.efficiency_loss_pct).toHaveLength(fc.horizon);
      expect(fc.solar_efficiency_pct).toHaveLength(fc.horizon);
    }
  });

  it("escapes markup in titles", () => {
    const svg = overlayChart({ title: "<b>x</b>", baseline: [1, 2] });
    expect(svg).not.toContain("<b>x</b>");
    expect(svg).toContain("&lt;b&gt;x&lt;/b&gt;");
  });
});
