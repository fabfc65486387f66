/** Spectrum inspector geometry: spectra -> SVG polyline point strings. */

export interface ChartLayout {
  width: number;
  height: number;
  padding: number;
}

export const DEFAULT_LAYOUT: ChartLayout = { width: 360, height: 180, padding: 10 };

export interface Curve {
  label: string;
  values: number[];
  color: string;
}

/** Shared y-range over all curves so pinned references stay comparable. */
export function valueRange(curves: Curve[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const curve of curves) {
    for (const v of curve.values) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

/** "x1,y1 x2,y2 ..." for an SVG <polyline>; one point per band. */
export function polylinePoints(
  values: number[],
  range: [number, number],
  layout: ChartLayout = DEFAULT_LAYOUT,
): string {
  const { width, height, padding } = layout;
  const [lo, hi] = range;
  const innerW = width - 2 * padding;
  const innerH = height - 2 * padding;
  const n = values.length;
  const pts: string[] = [];
  for (let i = 0; i < n; i++) {
    const x = padding + (n === 1 ? innerW / 2 : (i * innerW) / (n - 1));
    const y = padding + innerH - ((values[i] - lo) / (hi - lo)) * innerH;
    pts.push(`${x.toFixed(1)},${y.toFixed(1)}`);
  }
  return pts.join(" ");
}

const PIN_COLORS = ["#4fc3f7", "#aed581", "#ffd54f", "#ba68c8", "#ff8a65"];

export function pinColor(index: number): string {
  return PIN_COLORS[index % PIN_COLORS.length];
}
