/** Claim-code entry form. */

import { ApiClient, ApiError } from "./client.js";
import type { TokenRecord } from "./types.js";

export interface ClaimOptions {
  onClaimed: (record: TokenRecord) => void;
}

export class ClaimForm {
  readonly input: HTMLInputElement;
  readonly button: HTMLButtonElement;
  readonly errorEl: HTMLElement;

  constructor(
    host: HTMLElement,
    private readonly client: ApiClient,
    private readonly options: ClaimOptions,
  ) {
    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.placeholder = "claim code";
    this.button = document.createElement("button");
    this.button.textContent = "Claim session";
    this.button.addEventListener("click", () => void this.submit());
    this.errorEl = document.createElement("div");
    this.errorEl.className = "claim-error";
    host.append(this.input, this.button, this.errorEl);
  }

  async submit(): Promise<void> {
    const code = this.input.value.trim();
    if (!code) {
      this.errorEl.textContent = "enter your claim code";
      return;
    }
    this.button.disabled = true;
    try {
      const record = await this.client.claim(code);
      this.errorEl.textContent = "";
      this.options.onClaimed(record);
    } catch (error) {
      this.errorEl.textContent =
        error instanceof ApiError ? error.message : "claim failed";
    } finally {
      this.button.disabled = false;
    }
  }
}
