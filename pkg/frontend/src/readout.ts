/** Live V / I / pf readouts, polled from the measurements endpoint. */

import { ApiClient, ApiError } from "./client.js";
import type { MeasurementFrame, MeasurementsResponse } from "./types.js";

export interface ReadoutOptions {
  intervalMs?: number;
  onAuthLost?: () => void;
  onFrame?: (frame: MeasurementFrame, stale: boolean) => void;
}

export class ReadoutPanel {
  readonly host: HTMLElement;

  private readonly intervalMs: number;
  private readonly onAuthLost?: () => void;
  private readonly onFrame?: (frame: MeasurementFrame, stale: boolean) => void;
  private readonly fields: Record<"vrms" | "irms" | "pf", HTMLElement>;
  private readonly note: HTMLElement;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    host: HTMLElement,
    private readonly client: ApiClient,
    options: ReadoutOptions = {},
  ) {
    this.host = host;
    this.intervalMs = options.intervalMs ?? 500;
    this.onAuthLost = options.onAuthLost;
    this.onFrame = options.onFrame;

    const make = (label: string, field: string): HTMLElement => {
      const box = document.createElement("div");
      box.className = "readout";
      const name = document.createElement("span");
      name.className = "readout-label";
      name.textContent = label;
      const value = document.createElement("span");
      value.className = "readout-value";
      value.dataset.field = field;
      value.textContent = "--";
      box.append(name, value);
      host.appendChild(box);
      return value;
    };
    this.fields = {
      vrms: make("Voltage (V)", "vrms"),
      irms: make("Current (A)", "irms"),
      pf: make("Power factor", "pf"),
    };
    this.note = document.createElement("div");
    this.note.className = "readout-note";
    host.appendChild(this.note);
  }

  start(): void {
    if (this.timer !== null) return;
    void this.tick();
    this.timer = setInterval(() => void this.tick(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  get polling(): boolean {
    return this.timer !== null;
  }

  private async tick(): Promise<void> {
    let body: MeasurementsResponse;
    try {
      body = await this.client.measurements();
    } catch (error) {
      if (error instanceof ApiError && (error.status === 401 || error.status === 403)) {
        this.stop();
        this.onAuthLost?.();
        return;
      }
      this.note.textContent = "measurement read failed";
      return;
    }
    this.render(body);
  }

  private render(body: MeasurementsResponse): void {
    this.host.classList.toggle("stale", body.stale);
    if (body.frame === null) {
      this.fields.vrms.textContent = "--";
      this.fields.irms.textContent = "--";
      this.fields.pf.textContent = "--";
      this.note.textContent = body.error ?? "no signal";
      return;
    }
    this.note.textContent = "";
    this.fields.vrms.textContent = body.frame.vrms.toFixed(1);
    this.fields.irms.textContent = body.frame.irms.toFixed(2);
    this.fields.pf.textContent = body.frame.power_factor.toFixed(3);
    this.onFrame?.(body.frame, body.stale);
  }
}
