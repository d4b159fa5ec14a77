/** Typed access to the lab service.
 *
 * All transport goes through an injected fetch function and socket
 * factory, so component tests can run against a scripted mock server.
 * Real deployments pass nothing and get window.fetch / WebSocket.
 */

import type {
  MeasurementsResponse,
  RigConstants,
  RigStateBody,
  TokenRecord,
} from "./types.js";

export interface HttpResponse {
  status: number;
  json(): Promise<unknown>;
}

export interface RequestOptions {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}

export type FetchLike = (url: string, init?: RequestOptions) => Promise<HttpResponse>;

export interface SocketLike {
  send(data: string): void;
  close(code?: number, reason?: string): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: ((event: { code: number }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface ErrorShape {
  error?: { code?: string; message?: string };
}

export class ApiClient {
  token: string | null = null;

  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private readonly socketFactory: SocketFactory;

  constructor(options: {
    baseUrl: string;
    fetchFn?: FetchLike;
    socketFactory?: SocketFactory;
  }) {
    this.baseUrl = options.baseUrl.replace(/\/+$/, "");
    this.fetchFn =
      options.fetchFn ?? ((url, init) => fetch(url, init as RequestInit));
    this.socketFactory =
      options.socketFactory ??
      ((url) => new WebSocket(url) as unknown as SocketLike);
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<unknown> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const init: RequestOptions = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const doc = await response.json().catch(() => null);
    if (response.status >= 400) {
      const shape = (doc ?? {}) as ErrorShape;
      throw new ApiError(
        response.status,
        shape.error?.code ?? "error",
        shape.error?.message ?? `HTTP ${response.status}`,
      );
    }
    return doc;
  }

  async claim(claimCode: string): Promise<TokenRecord> {
    const record = (await this.request("POST", "/api/v1/session/claim", {
      claim_code: claimCode,
    })) as TokenRecord;
    this.token = record.token;
    return record;
  }

  async release(): Promise<boolean> {
    const doc = (await this.request("DELETE", "/api/v1/session")) as {
      released: boolean;
    };
    this.token = null;
    return doc.released;
  }

  measurements(): Promise<MeasurementsResponse> {
    return this.request("GET", "/api/v1/measurements") as Promise<MeasurementsResponse>;
  }

  rigConfig(): Promise<RigConstants> {
    return this.request("GET", "/api/v1/rig/config") as Promise<RigConstants>;
  }

  setRelay(engaged: boolean): Promise<RigStateBody> {
    return this.request("POST", "/api/v1/relay", { engaged }) as Promise<RigStateBody>;
  }

  scopeUrl(): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    const query = this.token ? `?token=${encodeURIComponent(this.token)}` : "";
    return `${ws}/api/v1/scope${query}`;
  }

  openScope(): SocketLike {
    return this.socketFactory(this.scopeUrl());
  }
}
