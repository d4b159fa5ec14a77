/** The capacitor relay button.
 *
 * The label is derived only from committed server state: either the
 * body of a successful relay POST or a fresh (non-stale) measurement
 * frame. Clicks while a request is in flight are ignored, so the
 * label can never run ahead of the rig.
 */

import { ApiClient, ApiError } from "./client.js";

export interface ToggleOptions {
  onError?: (message: string) => void;
}

export class CapacitorToggle {
  readonly button: HTMLButtonElement;

  private engaged = false;
  private pending = false;
  private readonly onError?: (message: string) => void;

  constructor(
    host: HTMLElement,
    private readonly client: ApiClient,
    options: ToggleOptions = {},
  ) {
    this.onError = options.onError;
    this.button = document.createElement("button");
    this.button.className = "capacitor-toggle";
    this.button.addEventListener("click", () => void this.click());
    host.appendChild(this.button);
    this.refresh();
  }

  get label(): string {
    return this.engaged ? "Remove Capacitor" : "Add Capacitor";
  }

  get isEngaged(): boolean {
    return this.engaged;
  }

  /** Sync from a committed frame; ignored while a command is in flight. */
  setKnownState(engaged: boolean): void {
    if (this.pending) return;
    this.engaged = engaged;
    this.refresh();
  }

  async click(): Promise<void> {
    if (this.pending) return;
    this.pending = true;
    this.button.disabled = true;
    try {
      const state = await this.client.setRelay(!this.engaged);
      this.engaged = state.capacitor_engaged;
    } catch (error) {
      const message =
        error instanceof ApiError ? error.message : "relay command failed";
      this.onError?.(message);
    } finally {
      this.pending = false;
      this.button.disabled = false;
      this.refresh();
    }
  }

  private refresh(): void {
    this.button.textContent = this.label;
  }
}
