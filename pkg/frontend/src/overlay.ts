/** Pure overlay math: score map + threshold + opacity -> RGBA bytes.
 *
 * The score map is never mutated; re-thresholding is a cheap local pass so
 * moving the slider costs zero network calls.
 */

export interface OverlayStyle {
  r: number;
  g: number;
  b: number;
  opacity: number; // 0..1 applied to foreground pixels
}

export const DEFAULT_STYLE: OverlayStyle = { r: 255, g: 64, b: 129, opacity: 0.45 };

/** Strict comparison: pixels exactly at tau are background. */
export function thresholdMask(scores: ArrayLike<number>, tau: number): Uint8Array {
  const out = new Uint8Array(scores.length);
  for (let i = 0; i < scores.length; i++) out[i] = scores[i] > tau ? 1 : 0;
  return out;
}

/** RGBA buffer for a binary overlay; background pixels are transparent. */
export function overlayRgba(mask: Uint8Array, style: OverlayStyle = DEFAULT_STYLE) {
  const alpha = Math.round(Math.min(1, Math.max(0, style.opacity)) * 255);
  // explicit ArrayBuffer so the result is accepted by the ImageData constructor
  const out = new Uint8ClampedArray(new ArrayBuffer(mask.length * 4));
  for (let i = 0; i < mask.length; i++) {
    if (mask[i]) {
      const j = i * 4;
      out[j] = style.r;
      out[j + 1] = style.g;
      out[j + 2] = style.b;
      out[j + 3] = alpha;
    }
  }
  return out;
}

/** Convenience: scores -> RGBA in one pass (still pure). */
export function computeOverlay(
  scores: ArrayLike<number>,
  tau: number,
  style: OverlayStyle = DEFAULT_STYLE,
) {
  return overlayRgba(thresholdMask(scores, tau), style);
}

export function foregroundCount(mask: Uint8Array): number {
  let n = 0;
  for (let i = 0; i < mask.length; i++) n += mask[i];
  return n;
}
