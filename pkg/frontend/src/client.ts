/**
 * Gateway HTTP + server-sent-events client. Uses fetch streaming for the
 * event channel so the same code runs in the browser and in tests; the
 * subscription loop auto-reconnects with backoff, and every (re)connect
 * starts with the gateway's sync snapshot, which resynchronizes the view.
 */

import type { StreamDoc } from "./model.js";

export interface GatewayError {
  status: number;
  message: string;
  field?: string;
}

async function request(url: string, init?: RequestInit): Promise<any> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw { status: 0, message: `gateway unreachable: ${String(err)}` } as GatewayError;
  }
  let body: any = null;
  try {
    body = await response.json();
  } catch {
    // non-JSON error bodies fall through with a generic message
  }
  if (!response.ok) {
    throw {
      status: response.status,
      message: body?.error ?? `gateway error ${response.status}`,
      field: body?.field,
    } as GatewayError;
  }
  return body;
}

export interface CreateSessionBody {
  mode?: string;
  initial_size?: number;
  policy?: string;
  tick_ms?: number;
  params?: Record<string, number>;
}

export function createSession(baseUrl: string, body: CreateSessionBody = {}) {
  return request(`${baseUrl}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}

export function getSessionState(baseUrl: string, sessionId: string) {
  return request(`${baseUrl}/sessions/${sessionId}`);
}

export function getSessionLog(baseUrl: string, sessionId: string) {
  return request(`${baseUrl}/sessions/${sessionId}/log`);
}

export function postEvent(baseUrl: string, sessionId: string, event: Record<string, unknown>) {
  return request(`${baseUrl}/sessions/${sessionId}/events`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(event),
  });
}

/** Parse one SSE connection, invoking onDoc per data frame, until EOF. */
export async function readStream(
  baseUrl: string,
  sessionId: string,
  onDoc: (doc: StreamDoc) => void,
  signal: AbortSignal,
): Promise<void> {
  const response = await fetch(`${baseUrl}/sessions/${sessionId}/stream`, { signal });
  if (!response.ok || response.body === null) {
    throw { status: response.status, message: `stream rejected (${response.status})` };
  }
  const reader = response.body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  for (;;) {
    const { done, value } = await reader.read();
    if (done) return;
    buffer += decoder.decode(value, { stream: true });
    let cut;
    while ((cut = buffer.indexOf("\n\n")) >= 0) {
      const frame = buffer.slice(0, cut);
      buffer = buffer.slice(cut + 2);
      for (const line of frame.split("\n")) {
        if (line.startsWith("data: ")) {
          onDoc(JSON.parse(line.slice("data: ".length)) as StreamDoc);
        }
      }
    }
  }
}

export interface SubscriptionHandlers {
  onDoc: (doc: StreamDoc) => void;
  onStatus: (status: "connecting" | "live" | "disconnected", message?: string) => void;
}

/**
 * Keep a live subscription, resubscribing after drops. Stops when the
 * signal aborts or the session is gone (HTTP 404).
 */
export async function subscribeWithRetry(
  baseUrl: string,
  sessionId: string,
  handlers: SubscriptionHandlers,
  signal: AbortSignal,
  backoffMs = 500,
): Promise<void> {
  let delay = backoffMs;
  while (!signal.aborted) {
    handlers.onStatus("connecting");
    try {
      let sawDoc = false;
      await readStream(
        baseUrl,
        sessionId,
        (doc) => {
          if (!sawDoc) {
            sawDoc = true;
            delay = backoffMs;
            handlers.onStatus("live");
          }
          handlers.onDoc(doc);
        },
        signal,
      );
      handlers.onStatus("disconnected", "stream closed by gateway");
    } catch (err: any) {
      if (signal.aborted) return;
      if (err?.status === 404) {
        handlers.onStatus("disconnected", "session not found");
        return;
      }
      handlers.onStatus("disconnected", String(err?.message ?? err));
    }
    await new Promise((resolve) => setTimeout(resolve, delay));
    delay = Math.min(delay * 2, 10_000);
  }
}
