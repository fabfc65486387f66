/** Typed client for the segmentation service HTTP API. */

export interface ImageInfo {
  id: string;
  height: number;
  width: number;
  bands: number;
  has_labels: boolean;
}

export interface DiceReadout {
  at_05: number;
  at_max: number;
  best_tau: number;
}

export interface SegmentResponse {
  scores_b64: string;
  dice?: DiceReadout;
}

export interface SpectrumResponse {
  values: number[];
  wavelengths?: number[];
}

export type Click = [number, number]; // [row, col]

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

/** Raw little-endian float32 payload -> number[]; length must match. */
export function decodeScores(b64: string, count: number): Float64Array {
  const raw = atob(b64);
  if (raw.length !== count * 4) {
    throw new Error(`score payload has ${raw.length} bytes, expected ${count * 4}`);
  }
  const bytes = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) bytes[i] = raw.charCodeAt(i);
  const view = new DataView(bytes.buffer);
  const out = new Float64Array(count);
  for (let i = 0; i < count; i++) out[i] = view.getFloat32(i * 4, true);
  return out;
}

async function parseError(resp: Response): Promise<ApiError> {
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const doc = await resp.json();
    if (doc && typeof doc.error === "string") message = doc.error;
  } catch {
    /* non-JSON error body; keep the status line */
  }
  return new ApiError(resp.status, message);
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async listImages(): Promise<ImageInfo[]> {
    const resp = await this.fetchImpl(`${this.base}/api/images`);
    if (!resp.ok) throw await parseError(resp);
    return resp.json();
  }

  previewUrl(imageId: string, bands?: [number, number, number]): string {
    const suffix = bands ? `?bands=${bands.join(",")}` : "";
    return `${this.base}/api/images/${encodeURIComponent(imageId)}/preview${suffix}`;
  }

  async segment(
    imageId: string,
    method: string,
    clicks: Click[],
    classId?: number,
    signal?: AbortSignal,
  ): Promise<SegmentResponse> {
    const body: Record<string, unknown> = { method, clicks };
    if (classId !== undefined) body.class_id = classId;
    const resp = await this.fetchImpl(
      `${this.base}/api/images/${encodeURIComponent(imageId)}/segment`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        signal,
      },
    );
    if (!resp.ok) throw await parseError(resp);
    return resp.json();
  }

  async spectrum(imageId: string, row: number, col: number): Promise<SpectrumResponse> {
    const resp = await this.fetchImpl(
      `${this.base}/api/images/${encodeURIComponent(imageId)}/spectrum?row=${row}&col=${col}`,
    );
    if (!resp.ok) throw await parseError(resp);
    return resp.json();
  }
}
