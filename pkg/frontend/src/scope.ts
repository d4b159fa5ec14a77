/** Dual-trace oscilloscope view over the scope stream. */

import { ApiClient, SocketLike } from "./client.js";
import { crossingLagDeg } from "./phase.js";
import type { RigConstants, ScopeMessage, WindowMessage } from "./types.js";

export interface TracePoint {
  x: number;
  y: number;
}

export interface Traces {
  v: TracePoint[];
  i: TracePoint[];
}

/**
 * Map a window message onto viewport coordinates. Pure: the same
 * message and viewport always produce the same points. Each channel
 * is normalized to its own peak so both traces fill the height.
 */
export function projectWindow(
  message: WindowMessage,
  width: number,
  height: number,
): Traces {
  const mid = height / 2;
  const project = (samples: number[]): TracePoint[] => {
    let peak = 0;
    for (const s of samples) peak = Math.max(peak, Math.abs(s));
    const scale = peak > 0 ? (0.45 * height) / peak : 0;
    const step = samples.length > 1 ? width / (samples.length - 1) : 0;
    return samples.map((s, k) => ({ x: k * step, y: mid - s * scale }));
  };
  return { v: project(message.v), i: project(message.i) };
}

export type TraceRenderer = (traces: Traces) => void;

export interface ScopeOptions {
  hz?: number;
  cycles?: number;
  reconnectDelayMs?: number;
  width?: number;
  height?: number;
  renderer?: TraceRenderer;
}

export class ScopeView {
  readonly canvas: HTMLCanvasElement;
  readonly phaseEl: HTMLElement;
  readonly pauseButton: HTMLButtonElement;

  lastPhaseDeg: number | null = null;

  private readonly hz: number;
  private readonly cycles: number;
  private readonly reconnectDelayMs: number;
  private readonly width: number;
  private readonly height: number;
  private readonly renderer: TraceRenderer;

  private socket: SocketLike | null = null;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private stopped = true;
  private paused = false;
  private lastWindow: WindowMessage | null = null;

  constructor(
    host: HTMLElement,
    private readonly client: ApiClient,
    private readonly constants: RigConstants,
    options: ScopeOptions = {},
  ) {
    this.hz = options.hz ?? 2;
    this.cycles = options.cycles ?? 2;
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
    this.width = options.width ?? 800;
    this.height = options.height ?? 300;

    this.canvas = document.createElement("canvas");
    this.canvas.width = this.width;
    this.canvas.height = this.height;
    this.canvas.className = "scope-canvas";
    this.phaseEl = document.createElement("div");
    this.phaseEl.className = "scope-phase";
    this.phaseEl.textContent = "phase: --";
    this.pauseButton = document.createElement("button");
    this.pauseButton.textContent = "Pause";
    this.pauseButton.addEventListener("click", () => {
      if (this.paused) this.resume();
      else this.pause();
    });
    host.append(this.canvas, this.phaseEl, this.pauseButton);

    this.renderer = options.renderer ?? ((traces) => this.drawOnCanvas(traces));
  }

  start(): void {
    if (!this.stopped) return;
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close(1000, "view closed");
    this.socket = null;
  }

  pause(): void {
    this.paused = true;
    this.pauseButton.textContent = "Resume";
  }

  resume(): void {
    this.paused = false;
    this.pauseButton.textContent = "Pause";
    if (this.lastWindow) this.render(this.lastWindow);
  }

  get isPaused(): boolean {
    return this.paused;
  }

  private connect(): void {
    const socket = this.client.openScope();
    this.socket = socket;
    socket.onopen = () => {
      socket.send(JSON.stringify({ subscribe: this.hz, cycles: this.cycles }));
    };
    socket.onmessage = (event) => {
      const message = JSON.parse(event.data) as ScopeMessage;
      if ("type" in message && message.type === "window") {
        this.lastWindow = message;
        if (!this.paused) this.render(message);
      }
    };
    socket.onclose = () => {
      if (this.stopped || this.socket !== socket) return;
      this.socket = null;
      this.reconnectTimer = setTimeout(() => {
        this.reconnectTimer = null;
        if (!this.stopped) this.connect();
      }, this.reconnectDelayMs);
    };
  }

  private render(message: WindowMessage): void {
    this.renderer(projectWindow(message, this.width, this.height));
    const perCycle = Math.round(
      this.constants.sample_rate / this.constants.frequency,
    );
    const phase = crossingLagDeg(message.v, message.i, perCycle);
    this.lastPhaseDeg = phase;
    if (phase === null) {
      this.phaseEl.textContent = "phase: --";
    } else {
      const pf = Math.cos((phase * Math.PI) / 180);
      this.phaseEl.textContent = `phase: ${phase.toFixed(1)}° (pf ${pf.toFixed(3)})`;
    }
  }

  private drawOnCanvas(traces: Traces): void {
    // jsdom has no 2d context; tests inject a recording renderer instead
    const context =
      typeof this.canvas.getContext === "function"
        ? this.canvas.getContext("2d")
        : null;
    if (!context) return;
    context.clearRect(0, 0, this.width, this.height);
    context.strokeStyle = "#888";
    context.beginPath();
    context.moveTo(0, this.height / 2);
    context.lineTo(this.width, this.height / 2);
    context.stroke();
    const trace = (points: TracePoint[], style: string) => {
      if (!points.length) return;
      context.strokeStyle = style;
      context.beginPath();
      context.moveTo(points[0].x, points[0].y);
      for (const p of points) context.lineTo(p.x, p.y);
      context.stroke();
    };
    trace(traces.v, "#caa200");
    trace(traces.i, "#2d7dd2");
  }
}
