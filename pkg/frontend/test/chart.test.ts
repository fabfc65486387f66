import { describe, expect, it } from "vitest";

import { DEFAULT_LAYOUT, polylinePoints, valueRange } from "../src/chart.js";

describe("valueRange", () => {
  it("spans all curves", () => {
    const range = valueRange([
      { label: "a", values: [0.2, 0.5], color: "#fff" },
      { label: "b", values: [0.1, 0.9], color: "#fff" },
    ]);
    expect(range).toEqual([0.1, 0.9]);
  });

  it("degenerate constant curve widens to a usable band", () => {
    const [lo, hi] = valueRange([{ label: "c", values: [0.4, 0.4], color: "#fff" }]);
    expect(lo).toBeLessThan(0.4);
    expect(hi).toBeGreaterThan(0.4);
  });

  it("no curves falls back to the unit range", () => {
    expect(valueRange([])).toEqual([0, 1]);
  });
});

describe("polylinePoints", () => {
  it("emits one point per band", () => {
    const pts = polylinePoints([0.1, 0.5, 0.9], [0, 1]);
    expect(pts.split(" ").length).toBe(3);
  });

  it("maps the minimum to the bottom and maximum to the top", () => {
    const { height, padding } = DEFAULT_LAYOUT;
    const pts = polylinePoints([0, 1], [0, 1]).split(" ");
    const yOf = (p: string) => Number(p.split(",")[1]);
    expect(yOf(pts[0])).toBeCloseTo(height - padding, 1);
    expect(yOf(pts[1])).toBeCloseTo(padding, 1);
  });

  it("identical inputs produce identical polylines", () => {
    const a = polylinePoints([0.3, 0.6, 0.2], [0, 1]);
    const b = polylinePoints([0.3, 0.6, 0.2], [0, 1]);
    expect(a).toBe(b);
  });
});
