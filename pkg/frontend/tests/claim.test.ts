import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/client.js";
import { ClaimForm } from "../src/claim.js";
import type { TokenRecord } from "../src/types.js";
import { MockServer } from "./mock-server.js";

function setup(server: MockServer) {
  const client = new ApiClient({
    baseUrl: "http://lab.local",
    fetchFn: server.fetchFn,
    socketFactory: server.socketFactory,
  });
  const host = document.createElement("div");
  document.body.appendChild(host);
  const onClaimed = vi.fn<(record: TokenRecord) => void>();
  const form = new ClaimForm(host, client, { onClaimed });
  return { client, form, onClaimed };
}

afterEach(() => {
  document.body.replaceChildren();
});

describe("ClaimForm", () => {
  it("claims with the entered code and hands over the record", async () => {
    const server = new MockServer();
    const { client, form, onClaimed } = setup(server);

    form.input.value = "  good-code  ";
    await form.submit();

    expect(onClaimed).toHaveBeenCalledTimes(1);
    expect(onClaimed.mock.calls[0][0].token).toBe("tok-1");
    expect(client.token).toBe("tok-1");
    expect(form.errorEl.textContent).toBe("");
  });

  it("shows the server message for a rejected code", async () => {
    const server = new MockServer();
    const { form, onClaimed } = setup(server);

    form.input.value = "wrong-code";
    await form.submit();

    expect(onClaimed).not.toHaveBeenCalled();
    expect(form.errorEl.textContent).toBe("no slot with that code");
  });

  it("refuses an empty code without a round trip", async () => {
    const server = new MockServer();
    const { form } = setup(server);

    form.input.value = "   ";
    await form.submit();

    expect(server.requests).toHaveLength(0);
    expect(form.errorEl.textContent).toBe("enter your claim code");
  });
});
