/** Interaction state machine for the click-and-refine loop.
 *
 * The server is stateless, so this controller owns the single source of
 * truth: the ordered click list mirrors exactly what was last sent. Clicks,
 * undo and method switches hit the network; threshold and opacity changes
 * never do. Responses are matched by sequence number and anything stale is
 * discarded; the previous in-flight request is aborted when a new one
 * starts.
 */

import type { Click, DiceReadout, ImageInfo, SegmentResponse } from "./api.js";
import { decodeScores } from "./api.js";

export interface UiState {
  image: ImageInfo | null;
  method: string;
  clicks: Click[];
  tau: number;
  opacity: number;
  classId: number | null;
  scores: Float64Array | null;
  dice: DiceReadout | null;
  banner: string | null;
  busy: boolean;
}

export function initialState(): UiState {
  return {
    image: null,
    method: "sa",
    clicks: [],
    tau: 0.5,
    opacity: 0.45,
    classId: null,
    scores: null,
    dice: null,
    banner: null,
    busy: false,
  };
}

export type SegmentTransport = (
  imageId: string,
  method: string,
  clicks: Click[],
  classId?: number,
  signal?: AbortSignal,
) => Promise<SegmentResponse>;

export class SessionController {
  state: UiState = initialState();

  private seq = 0;
  private applied = 0;
  private inflight: AbortController | null = null;
  private listeners: Array<(s: UiState) => void> = [];

  constructor(private transport: SegmentTransport) {}

  onChange(listener: (s: UiState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  selectImage(image: ImageInfo): void {
    this.inflight?.abort();
    this.inflight = null;
    this.state = {
      ...initialState(),
      method: this.state.method,
      tau: this.state.tau,
      opacity: this.state.opacity,
      image,
    };
    this.emit();
  }

  /** Threshold slider: pure re-render, never a network call. */
  setThreshold(tau: number): void {
    this.state = { ...this.state, tau: Math.min(1, Math.max(0, tau)) };
    this.emit();
  }

  setOpacity(opacity: number): void {
    this.state = { ...this.state, opacity: Math.min(1, Math.max(0, opacity)) };
    this.emit();
  }

  setClassId(classId: number | null): void {
    this.state = { ...this.state, classId };
    if (this.state.clicks.length > 0) void this.resend();
  }

  dismissBanner(): void {
    this.state = { ...this.state, banner: null };
    this.emit();
  }

  hasClicked(row: number, col: number): boolean {
    return this.state.clicks.some(([r, c]) => r === row && c === col);
  }

  /** Append a click and POST the full list; list unchanged on failure. */
  async addClick(row: number, col: number): Promise<void> {
    if (!this.state.image || this.hasClicked(row, col)) return;
    const previous = this.state.clicks;
    this.state = { ...this.state, clicks: [...previous, [row, col]], banner: null };
    this.emit();
    await this.request(previous);
  }

  /** Drop the newest click and re-segment with the shortened list. */
  async undo(): Promise<void> {
    if (this.state.clicks.length === 0) return;
    const previous = this.state.clicks;
    const clicks = previous.slice(0, -1);
    this.state = { ...this.state, clicks, banner: null };
    if (clicks.length === 0) {
      this.inflight?.abort();
      this.inflight = null;
      this.state = { ...this.state, scores: null, dice: null, busy: false };
      this.emit();
      return;
    }
    this.emit();
    await this.request(previous);
  }

  /** Switch backends and replay the same prompt for comparison. */
  async setMethod(method: string): Promise<void> {
    this.state = { ...this.state, method };
    this.emit();
    if (this.state.clicks.length > 0) await this.resend();
  }

  private async resend(): Promise<void> {
    await this.request(this.state.clicks);
  }

  /** POST the current click list; roll back to `rollback` on failure. */
  private async request(rollback: Click[]): Promise<void> {
    const image = this.state.image;
    if (!image) return;
    const mySeq = ++this.seq;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.state = { ...this.state, busy: true };
    this.emit();

    const clicks = this.state.clicks;
    try {
      const resp = await this.transport(
        image.id,
        this.state.method,
        clicks,
        this.state.classId ?? undefined,
        controller.signal,
      );
      if (mySeq <= this.applied || mySeq !== this.seq) return; // stale
      this.applied = mySeq;
      this.state = {
        ...this.state,
        scores: decodeScores(resp.scores_b64, image.height * image.width),
        dice: resp.dice ?? null,
        busy: false,
      };
      this.emit();
    } catch (err) {
      if (controller.signal.aborted || mySeq !== this.seq) return; // superseded
      this.state = {
        ...this.state,
        clicks: rollback,
        banner: err instanceof Error ? err.message : String(err),
        busy: false,
      };
      this.emit();
    }
  }
}

/** Trailing-edge throttle for hover-driven lookups. */
export function throttle<A extends unknown[]>(
  fn: (...args: A) => void,
  intervalMs: number,
  now: () => number = () => Date.now(),
  schedule: (cb: () => void, ms: number) => unknown = (cb, ms) => setTimeout(cb, ms),
): (...args: A) => void {
  let last = -Infinity;
  let pending: A | null = null;
  let scheduled = false;
  const flush = () => {
    scheduled = false;
    if (pending) {
      last = now();
      const args = pending;
      pending = null;
      fn(...args);
    }
  };
  return (...args: A) => {
    const t = now();
    if (t - last >= intervalMs) {
      last = t;
      fn(...args);
    } else {
      pending = args;
      if (!scheduled) {
        scheduled = true;
        schedule(flush, intervalMs - (t - last));
      }
    }
  };
}
