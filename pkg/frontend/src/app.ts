/** Wires the console together against the real browser transport. */

import { ApiClient } from "./client.js";
import { ClaimForm } from "./claim.js";
import { ReadoutPanel } from "./readout.js";
import { CapacitorToggle } from "./toggle.js";
import { ScopeView } from "./scope.js";

function toast(host: HTMLElement, message: string): void {
  const el = document.createElement("div");
  el.className = "toast";
  el.textContent = message;
  host.appendChild(el);
  setTimeout(() => el.remove(), 4000);
}

/** The one deployment setting: where the lab service lives. */
function baseUrl(): string {
  const meta = document.querySelector<HTMLMetaElement>('meta[name="lab-base-url"]');
  return meta?.content || window.location.origin;
}

export function bootstrap(root: HTMLElement): void {
  const client = new ApiClient({ baseUrl: baseUrl() });

  const claimHost = root.querySelector<HTMLElement>("#claim")!;
  const panelHost = root.querySelector<HTMLElement>("#panel")!;
  const readoutHost = root.querySelector<HTMLElement>("#readouts")!;
  const toggleHost = root.querySelector<HTMLElement>("#toggle")!;
  const scopeHost = root.querySelector<HTMLElement>("#scope")!;
  const toastHost = root.querySelector<HTMLElement>("#toasts")!;

  panelHost.hidden = true;

  const form = new ClaimForm(claimHost, client, {
    onClaimed: () => {
      claimHost.hidden = true;
      panelHost.hidden = false;
      void startPanel();
    },
  });
  void form;

  async function startPanel(): Promise<void> {
    const constants = await client.rigConfig();
    const toggle = new CapacitorToggle(toggleHost, client, {
      onError: (message) => toast(toastHost, message),
    });
    const readout = new ReadoutPanel(readoutHost, client, {
      onAuthLost: () => {
        readoutHost.replaceChildren();
        panelHost.hidden = true;
        claimHost.hidden = false;
      },
      onFrame: (frame, stale) => {
        if (!stale) toggle.setKnownState(frame.capacitor_engaged);
      },
    });
    const scope = new ScopeView(scopeHost, client, constants);
    readout.start();
    scope.start();
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap(document.getElementById("app")!);
}
