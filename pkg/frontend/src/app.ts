/** DOM wiring: canvas stack, controls, spectrum inspector, error banner. */

import { ApiClient, ImageInfo } from "./api.js";
import { Curve, DEFAULT_LAYOUT, pinColor, polylinePoints, valueRange } from "./chart.js";
import { computeOverlay } from "./overlay.js";
import { SessionController, throttle } from "./state.js";

const METHODS = ["sa", "sa-eq", "pcc", "remote"];

export interface AppElements {
  imageSelect: HTMLSelectElement;
  methodSelect: HTMLSelectElement;
  baseCanvas: HTMLCanvasElement;
  overlayCanvas: HTMLCanvasElement;
  tauSlider: HTMLInputElement;
  tauLabel: HTMLElement;
  opacitySlider: HTMLInputElement;
  classInput: HTMLInputElement;
  undoButton: HTMLButtonElement;
  clickCount: HTMLElement;
  diceReadout: HTMLElement;
  banner: HTMLElement;
  bannerDismiss: HTMLButtonElement;
  spectrumSvg: SVGSVGElement;
  status: HTMLElement;
}

export function queryElements(root: Document): AppElements {
  const get = <T>(id: string): T => {
    const el = root.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el as T;
  };
  return {
    imageSelect: get("image-select"),
    methodSelect: get("method-select"),
    baseCanvas: get("base-canvas"),
    overlayCanvas: get("overlay-canvas"),
    tauSlider: get("tau-slider"),
    tauLabel: get("tau-label"),
    opacitySlider: get("opacity-slider"),
    classInput: get("class-input"),
    undoButton: get("undo-button"),
    clickCount: get("click-count"),
    diceReadout: get("dice-readout"),
    banner: get("banner"),
    bannerDismiss: get("banner-dismiss"),
    spectrumSvg: get("spectrum-svg"),
    status: get("status"),
  };
}

export class App {
  private pinned = new Map<string, number[]>();
  private hovered: number[] | null = null;
  private images: ImageInfo[] = [];

  constructor(
    private api: ApiClient,
    private controller: SessionController,
    private el: AppElements,
  ) {}

  async start(): Promise<void> {
    this.bind();
    this.controller.onChange(() => this.render());
    try {
      this.images = await this.api.listImages();
    } catch (err) {
      this.showBanner(err instanceof Error ? err.message : String(err));
      return;
    }
    this.el.imageSelect.innerHTML = "";
    for (const info of this.images) {
      const opt = document.createElement("option");
      opt.value = info.id;
      opt.textContent = `${info.id} (${info.width}x${info.height}, ${info.bands} bands)`;
      this.el.imageSelect.appendChild(opt);
    }
    if (this.images.length > 0) await this.selectImage(this.images[0].id);
  }

  private bind(): void {
    const el = this.el;
    el.imageSelect.addEventListener("change", () => void this.selectImage(el.imageSelect.value));
    el.methodSelect.innerHTML = "";
    for (const m of METHODS) {
      const opt = document.createElement("option");
      opt.value = m;
      opt.textContent = m;
      el.methodSelect.appendChild(opt);
    }
    el.methodSelect.addEventListener("change", () => void this.controller.setMethod(el.methodSelect.value));
    el.tauSlider.addEventListener("input", () => this.controller.setThreshold(Number(el.tauSlider.value)));
    el.opacitySlider.addEventListener("input", () => this.controller.setOpacity(Number(el.opacitySlider.value)));
    el.classInput.addEventListener("change", () => {
      const text = el.classInput.value.trim();
      this.controller.setClassId(text === "" ? null : Number(text));
    });
    el.undoButton.addEventListener("click", () => void this.onUndo());
    el.bannerDismiss.addEventListener("click", () => this.controller.dismissBanner());

    el.overlayCanvas.addEventListener("click", (ev) => void this.onCanvasClick(ev));
    const hover = throttle((row: number, col: number) => void this.loadHoverSpectrum(row, col), 120);
    el.overlayCanvas.addEventListener("mousemove", (ev) => {
      const pixel = this.eventPixel(ev);
      if (pixel) hover(pixel[0], pixel[1]);
    });
    el.overlayCanvas.addEventListener("mouseleave", () => {
      this.hovered = null;
      this.renderSpectra();
    });
  }

  private async selectImage(id: string): Promise<void> {
    const info = this.images.find((i) => i.id === id);
    if (!info) return;
    this.pinned.clear();
    this.hovered = null;
    this.controller.selectImage(info);
    const { baseCanvas, overlayCanvas } = this.el;
    baseCanvas.width = overlayCanvas.width = info.width;
    baseCanvas.height = overlayCanvas.height = info.height;
    const img = new Image();
    img.onload = () => {
      baseCanvas.getContext("2d")?.drawImage(img, 0, 0);
    };
    img.src = this.api.previewUrl(id);
  }

  private eventPixel(ev: MouseEvent): [number, number] | null {
    const info = this.controller.state.image;
    if (!info) return null;
    const rect = this.el.overlayCanvas.getBoundingClientRect();
    if (rect.width === 0 || rect.height === 0) return null;
    const col = Math.floor(((ev.clientX - rect.left) / rect.width) * info.width);
    const row = Math.floor(((ev.clientY - rect.top) / rect.height) * info.height);
    if (row < 0 || col < 0 || row >= info.height || col >= info.width) return null;
    return [row, col];
  }

  private async onCanvasClick(ev: MouseEvent): Promise<void> {
    const pixel = this.eventPixel(ev);
    if (!pixel) return;
    const [row, col] = pixel;
    const before = this.controller.state.clicks.length;
    await this.controller.addClick(row, col);
    // pin the reference spectrum only if the click survived (no rollback)
    if (this.controller.state.clicks.length > before) {
      try {
        const spec = await this.api.spectrum(this.controller.state.image!.id, row, col);
        this.pinned.set(`${row},${col}`, spec.values);
        this.renderSpectra();
      } catch {
        /* inspector is best-effort; segmentation already succeeded */
      }
    }
  }

  private async onUndo(): Promise<void> {
    const clicks = this.controller.state.clicks;
    if (clicks.length > 0) {
      const [r, c] = clicks[clicks.length - 1];
      this.pinned.delete(`${r},${c}`);
    }
    await this.controller.undo();
    this.renderSpectra();
  }

  private async loadHoverSpectrum(row: number, col: number): Promise<void> {
    const info = this.controller.state.image;
    if (!info) return;
    try {
      const spec = await this.api.spectrum(info.id, row, col);
      this.hovered = spec.values;
    } catch {
      this.hovered = null; // fetch failure clears the chart
    }
    this.renderSpectra();
  }

  private showBanner(message: string): void {
    this.el.banner.hidden = false;
    this.el.banner.querySelector("span")!.textContent = message;
  }

  render(): void {
    const s = this.controller.state;
    this.el.tauLabel.textContent = s.tau.toFixed(2);
    this.el.clickCount.textContent = String(s.clicks.length);
    this.el.undoButton.disabled = s.clicks.length === 0;
    this.el.status.textContent = s.busy ? "segmenting..." : "";

    if (s.banner) this.showBanner(s.banner);
    else this.el.banner.hidden = true;

    if (s.dice) {
      this.el.diceReadout.textContent =
        `dice@0.5 ${s.dice.at_05.toFixed(3)} | dice@max ${s.dice.at_max.toFixed(3)}` +
        ` (tau* ${s.dice.best_tau.toFixed(3)})`;
    } else {
      this.el.diceReadout.textContent = "";
    }
    this.renderOverlay();
  }

  renderOverlay(): void {
    const s = this.controller.state;
    const ctx = this.el.overlayCanvas.getContext("2d");
    if (!ctx || !s.image) return;
    ctx.clearRect(0, 0, s.image.width, s.image.height);
    if (!s.scores) return;
    const rgba = computeOverlay(s.scores, s.tau, {
      r: 255, g: 64, b: 129, opacity: s.opacity,
    });
    ctx.putImageData(new ImageData(rgba, s.image.width, s.image.height), 0, 0);
  }

  renderSpectra(): void {
    const curves: Curve[] = [];
    let pinIndex = 0;
    for (const [key, values] of this.pinned) {
      curves.push({ label: `click ${key}`, values, color: pinColor(pinIndex++) });
    }
    if (this.hovered) curves.push({ label: "hover", values: this.hovered, color: "#ffffff" });

    const svg = this.el.spectrumSvg;
    svg.innerHTML = "";
    if (curves.length === 0) return;
    const range = valueRange(curves);
    for (const curve of curves) {
      const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
      line.setAttribute("points", polylinePoints(curve.values, range, DEFAULT_LAYOUT));
      line.setAttribute("fill", "none");
      line.setAttribute("stroke", curve.color);
      line.setAttribute("stroke-width", "1.5");
      svg.appendChild(line);
    }
  }
}
