import type { ZodType } from "zod";
import {
  ArrangementSchema,
  SessionSchema,
  SubmitResponseSchema,
  type ArrangementDoc,
  type SessionDoc,
  type SubmitResponseDoc,
} from "./types";

/** Raised for transport failures (status 0) and non-2xx service replies. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }

  get unreachable(): boolean {
    return this.status === 0;
  }
}

export interface RecolorBySession {
  sessionId: string;
}

export interface RecolorByProfile {
  type: "none" | "protan" | "deutan" | "tritan";
  severity?: number;
}

export type RecolorSource = RecolorBySession | RecolorByProfile;

export interface RecolorOptions {
  mode?: "simulate" | "correct";
  space?: "linear" | "gamma";
}

/**
 * Thin typed client for the assessment/recoloring service.  Every number
 * shown in the UI comes out of this client unmodified; nothing is computed
 * client side.
 */
export class HuecapClient {
  constructor(private readonly base: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    try {
      return await fetch(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
  }

  private async json<T>(schema: ZodType<T>, path: string, init?: RequestInit): Promise<T> {
    const resp = await this.request(path, init);
    const body: unknown = await resp.json().catch(() => null);
    if (!resp.ok) {
      const detail =
        body !== null && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : resp.statusText;
      throw new ApiError(resp.status, detail);
    }
    const parsed = schema.safeParse(body);
    if (!parsed.success) {
      throw new ApiError(0, `malformed service payload: ${parsed.error.message}`);
    }
    return parsed.data;
  }

  async healthz(): Promise<{ version: string; kernel: string }> {
    const resp = await this.request("/healthz");
    if (!resp.ok) throw new ApiError(resp.status, resp.statusText);
    return (await resp.json()) as { version: string; kernel: string };
  }

  async createSession(seed?: number): Promise<SessionDoc> {
    return this.json(SessionSchema, "/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(seed === undefined ? {} : { seed }),
    });
  }

  async getSession(sessionId: string): Promise<SessionDoc> {
    return this.json(SessionSchema, `/sessions/${encodeURIComponent(sessionId)}/palette`);
  }

  async submitArrangement(
    sessionId: string,
    arrangement: ArrangementDoc,
  ): Promise<SubmitResponseDoc> {
    // guard the wire format before it leaves the client
    const checked = ArrangementSchema.safeParse(arrangement);
    if (!checked.success) {
      throw new ApiError(0, `refusing to send malformed arrangement: ${checked.error.message}`);
    }
    return this.json(
      SubmitResponseSchema,
      `/sessions/${encodeURIComponent(sessionId)}/arrangement`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(checked.data),
      },
    );
  }

  async recolor(
    image: Blob,
    source: RecolorSource,
    options: RecolorOptions = {},
  ): Promise<Blob> {
    const form = new FormData();
    form.append("image", image, "image.png");
    form.append("mode", options.mode ?? "correct");
    form.append("space", options.space ?? "linear");
    if ("sessionId" in source) {
      form.append("session_id", source.sessionId);
    } else {
      form.append("type", source.type);
      if (source.severity !== undefined) {
        form.append("severity", String(source.severity));
      }
    }
    const resp = await this.request("/recolor", { method: "POST", body: form });
    if (!resp.ok) {
      const body: unknown = await resp.json().catch(() => null);
      const detail =
        body !== null && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : resp.statusText;
      throw new ApiError(resp.status, detail);
    }
    return resp.blob();
  }
}
